//! On-disk formats for channels, decompositions and unitaries.
//!
//! Matrices are arrays of rows and every entry is an `[re, im]` pair.
//! Numbers are written as shortest round-tripping decimals, so a
//! write-then-read cycle reproduces every entry bit for bit.

use std::fs;
use std::path::{Path, PathBuf};

use oqec::noiseless::COLUMN_CONVENTION;
use oqec::{ComplexMatrix, QuantumChannel, SubsystemDecomposition, Tolerance, C64};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type Entry = [f64; 2];
pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim: usize,
    pub kraus: Vec<MatrixRows>,
    /// Set on recovery files to record how the channel was built.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub dim: usize,
    pub m: usize,
    pub n: usize,
    #[serde(default = "default_convention")]
    pub convention: String,
    pub isometry: MatrixRows,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryFile {
    pub dim: usize,
    pub matrix: MatrixRows,
}

fn default_convention() -> String {
    COLUMN_CONVENTION.to_string()
}

pub fn rows_of(x: &ComplexMatrix) -> MatrixRows {
    (0..x.rows())
        .map(|i| (0..x.cols()).map(|j| [x[(i, j)].re, x[(i, j)].im]).collect())
        .collect()
}

/// Parses rows into a `rows × cols` matrix; `what` names the field in errors.
pub fn matrix_of(rows: &MatrixRows, shape: (usize, usize), what: &str) -> Result<ComplexMatrix, CliError> {
    if rows.len() != shape.0 {
        return Err(CliError::Input(format!(
            "{what}: expected {} rows, found {}",
            shape.0,
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != shape.1 {
            return Err(CliError::Input(format!(
                "{what}[{i}]: expected {} entries, found {}",
                shape.1,
                row.len()
            )));
        }
        if let Some(j) = row.iter().position(|z| !(z[0].is_finite() && z[1].is_finite())) {
            return Err(CliError::Input(format!("{what}[{i}][{j}]: entry is not finite")));
        }
    }
    Ok(ComplexMatrix::from_fn(shape.0, shape.1, |i, j| {
        let [re, im] = rows[i][j];
        C64::new(re, im)
    }))
}

impl ChannelFile {
    pub fn from_kraus(kraus: &[ComplexMatrix], origin: Option<String>) -> Self {
        Self {
            dim: kraus.first().map_or(0, |k| k.rows()),
            kraus: kraus.iter().map(rows_of).collect(),
            origin,
        }
    }

    pub fn from_channel(ch: &QuantumChannel) -> Self {
        Self::from_kraus(ch.kraus(), None)
    }

    /// The Kraus list with shapes checked, trace preservation not yet.
    pub fn kraus_matrices(&self) -> Result<Vec<ComplexMatrix>, CliError> {
        if self.kraus.is_empty() {
            return Err(CliError::Input("kraus: empty Kraus list".into()));
        }
        let d = self.dim;
        self.kraus
            .iter()
            .enumerate()
            .map(|(a, rows)| matrix_of(rows, (d, d), &format!("kraus[{a}]")))
            .collect()
    }

    pub fn channel(&self, tol: &Tolerance) -> Result<QuantumChannel, CliError> {
        QuantumChannel::with_tolerance(self.kraus_matrices()?, tol).map_err(|e| CliError::Invalid(e.to_string()))
    }
}

impl DecompositionFile {
    pub fn from_decomposition(dec: &SubsystemDecomposition) -> Self {
        Self {
            dim: dec.dim(),
            m: dec.m(),
            n: dec.n(),
            convention: default_convention(),
            isometry: rows_of(dec.isometry()),
        }
    }

    pub fn decomposition(&self, tol: &Tolerance) -> Result<SubsystemDecomposition, CliError> {
        if self.convention != COLUMN_CONVENTION {
            return Err(CliError::Input(format!(
                "convention: unsupported column convention {:?}, expected {COLUMN_CONVENTION:?}",
                self.convention
            )));
        }
        let w = matrix_of(&self.isometry, (self.dim, self.m * self.n), "isometry")?;
        SubsystemDecomposition::new(self.m, self.n, w, tol).map_err(|e| CliError::Input(format!("isometry: {e}")))
    }
}

impl UnitaryFile {
    pub fn from_matrix(u: &ComplexMatrix) -> Self {
        Self {
            dim: u.rows(),
            matrix: rows_of(u),
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix, CliError> {
        matrix_of(&self.matrix, (self.dim, self.dim), "matrix")
    }
}

/// Parses JSON text, reporting the field path and position of any error.
pub fn parse<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Input(format!("{origin}: at {path}: {}", e.into_inner()))
    })
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

pub fn to_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file formats serialize");
    s.push('\n');
    s
}

/// Writes through a temporary sibling and a rename, so readers never see a
/// partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| CliError::Input(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

pub fn write<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_atomic(path, &to_text(value))
}
