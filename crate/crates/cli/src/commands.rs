use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};

use itertools::Itertools;
use oqec::algebra::{commutant, decompose_structure, generate_algebra};
use oqec::channel;
use oqec::correction::{oqec_check, synthesize_oqec_recovery, triple_deviation};
use oqec::error::UnsError;
use oqec::noiseless::{find_ns_unital, fixed_points, verify_ns, verify_ns_semantic};
use oqec::uns::{uns_algebra_seeded, uns_deviation};
use oqec::{examples, ComplexMatrix, OperatorSpace, QuantumChannel, SubsystemDecomposition, Tolerance, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::files::{self, ChannelFile, DecompositionFile, UnitaryFile};
use crate::report::{self, Report};
use crate::{CliError, Outcome, Status};

/// Largest dimension for which `uns --scan` tries all sign flips.
pub const SCAN_SIGNS_MAX_DIM: usize = 10;
/// Largest dimension for which `uns --scan` tries all permutations.
pub const SCAN_PERMUTATIONS_MAX_DIM: usize = 6;
const SCAN_REPORTED: usize = 10;

/// A scanned unitary: label, algebra dimension, block table, evolve residual.
type ScanHit = (String, usize, Vec<(usize, usize)>, f64);

fn synthesis(e: impl Display) -> CliError {
    CliError::Synthesis(e.to_string())
}

fn finish(mut r: Report, status: Status) -> Outcome {
    r.set("status", status.label());
    Outcome {
        status,
        report: r.into_value(),
    }
}

pub fn load_channel(path: &Path, tol: &Tolerance) -> Result<QuantumChannel, CliError> {
    let file: ChannelFile = files::read(path)?;
    file.channel(tol)
        .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
}

pub fn load_decomposition(path: &Path, tol: &Tolerance) -> Result<SubsystemDecomposition, CliError> {
    let file: DecompositionFile = files::read(path)?;
    file.decomposition(tol)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_pair(
    channel: &Path,
    decomposition: &Path,
    tol: &Tolerance,
) -> Result<(QuantumChannel, SubsystemDecomposition), CliError> {
    let ch = load_channel(channel, tol)?;
    let dec = load_decomposition(decomposition, tol)?;
    if ch.dim() != dec.dim() {
        return Err(CliError::Input(format!(
            "channel dimension {} differs from decomposition dimension {}",
            ch.dim(),
            dec.dim()
        )));
    }
    Ok((ch, dec))
}

fn write_decompositions(
    dir: &Path,
    prefix: &str,
    decs: &[SubsystemDecomposition],
) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
    decs.iter()
        .enumerate()
        .map(|(i, dec)| {
            let path = dir.join(format!("{prefix}{}.json", i + 1));
            files::write(&path, &DecompositionFile::from_decomposition(dec))?;
            Ok(path.display().to_string())
        })
        .collect()
}

pub fn validate(path: &Path, tol: &Tolerance) -> Result<Outcome, CliError> {
    let file: ChannelFile = files::read(path)?;
    let kraus = file.kraus_matrices()?;
    let rep = channel::validate(&kraus, tol).map_err(|e| CliError::Input(e.to_string()))?;
    let mut r = Report::new("validate");
    r.set("file", path.display().to_string())
        .set("dim", rep.dim)
        .set("kraus_count", rep.kraus_count)
        .set("trace_preserving", rep.trace_preserving)
        .set("tp_residual", rep.tp_residual)
        .set("unital", rep.unital)
        .set("unital_residual", rep.unital_residual)
        .set("atol", tol.atol);
    let status = if rep.trace_preserving { Status::Pass } else { Status::Fail };
    Ok(finish(r, status))
}

fn analyze_channel(
    ch: &QuantumChannel,
    out: Option<(&Path, &str)>,
    seed: u64,
    tol: &Tolerance,
) -> Result<Report, CliError> {
    let alg = generate_algebra(ch.kraus(), tol).map_err(synthesis)?;
    let structure = decompose_structure(&alg, tol, seed).map_err(synthesis)?;
    let comm = commutant(&alg, tol).map_err(synthesis)?;
    let fix = fixed_points(ch, tol);
    let rep = ch.report(tol);
    let mut r = Report::new("analyze");
    r.set("seed", seed)
        .set("dim", ch.dim())
        .set("kraus_count", ch.kraus().len())
        .set("unital", rep.unital)
        .set("unital_residual", rep.unital_residual)
        .set("interaction_algebra_dim", alg.dim())
        .set("commutant_dim", comm.dim())
        .set("fixed_point_dim", fix.dim())
        .set("blocks", report::blocks(&structure.dims()))
        .set("block_convention", "algebra = sum_J M_m (x) 1_n, commutant = sum_J 1_m (x) M_n")
        .set("complement_dim", structure.complement_dim)
        .set("matrix_unit_residual", structure.matrix_unit_residual())
        .set("reconstruction_residual", structure.reconstruction_residual(&alg));
    if !rep.unital {
        r.set(
            "note",
            "channel is not unital: fixed points need not equal the commutant and noiseless \
             subsystems are not discovered automatically; test candidate decompositions with \
             check-ns or check-oqec",
        );
        return Ok(r);
    }
    r.set(
        "fixed_point_commutant_distance",
        OperatorSpace::span_distance(comm.space(), &fix),
    );
    let found = find_ns_unital(ch, tol, seed).map_err(synthesis)?;
    let dims: Vec<(usize, usize)> = found.noiseless.iter().map(|d| (d.m(), d.n())).collect();
    r.set("noiseless_subsystems", report::blocks(&dims))
        .set("classical_sectors", found.classical.len());
    if let Some((dir, prefix)) = out {
        let written = write_decompositions(dir, prefix, &found.noiseless)?;
        r.set("written", written);
    }
    Ok(r)
}

pub fn analyze(path: &Path, out: Option<&Path>, seed: u64, tol: &Tolerance) -> Result<Outcome, CliError> {
    let ch = load_channel(path, tol)?;
    let mut r = analyze_channel(&ch, out.map(|d| (d, "ns-")), seed, tol)?;
    r.set("file", path.display().to_string());
    Ok(finish(r, Status::Pass))
}

/// Analyzes every `*.json` channel file of `dir` in parallel; each report
/// goes to `<out>/<stem>.report.json`. Reports and emitted `*.ns-N.json`
/// decompositions are skipped as inputs.
pub fn analyze_batch(dir: &Path, out: Option<&Path>, seed: u64, tol: &Tolerance) -> Result<Outcome, CliError> {
    let io = |e: std::io::Error| CliError::Input(format!("{}: {e}", dir.display()));
    let mut inputs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            p.is_file()
                && name.ends_with(".json")
                && !name.ends_with(".report.json")
                && !name.contains(".ns-")
                && !name.starts_with('.')
        })
        .collect();
    inputs.sort();
    let out = out.unwrap_or(dir);
    fs::create_dir_all(out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    let results: Vec<Result<Value, CliError>> = inputs
        .par_iter()
        .map(|path| {
            let stem = path.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            let prefix = format!("{stem}.ns-");
            let outcome = load_channel(path, tol)
                .and_then(|ch| analyze_channel(&ch, Some((out, &prefix)), seed, tol))
                .map(|r| finish(r, Status::Pass))
                .unwrap_or_else(|e| {
                    let mut r = Report::new("analyze");
                    r.set("error", e.to_string());
                    finish(r, e.status())
                });
            let target = out.join(format!("{stem}.report.json"));
            files::write(&target, &outcome.report)?;
            Ok(json!({
                "file": path.display().to_string(),
                "report": target.display().to_string(),
                "status": outcome.status.label(),
                "code": outcome.status.code(),
            }))
        })
        .collect();
    let entries: Vec<Value> = results.into_iter().collect::<Result<_, _>>()?;
    let status = entries
        .iter()
        .map(|e| match e["code"].as_u64() {
            Some(0) => Status::Pass,
            Some(1) => Status::Fail,
            Some(3) => Status::Synthesis,
            _ => Status::Input,
        })
        .max()
        .unwrap_or(Status::Pass);
    let mut r = Report::new("analyze");
    r.set("seed", seed)
        .set("batch", dir.display().to_string())
        .set("files", Value::Array(entries));
    Ok(finish(r, status))
}

pub fn check_ns(channel: &Path, decomposition: &Path, tol: &Tolerance) -> Result<Outcome, CliError> {
    let (ch, dec) = load_pair(channel, decomposition, tol)?;
    let ns = verify_ns(&ch, &dec, tol).map_err(synthesis)?;
    let sem = verify_ns_semantic(&ch, &dec, tol).map_err(synthesis)?;
    let mut r = Report::new("check-ns");
    r.set("m", dec.m())
        .set("n", dec.n())
        .set("noiseless", ns.noiseless)
        .set("cond1_residual", ns.cond1_residual)
        .set("cond2_residual", ns.cond2_residual)
        .set("lambda", Value::Array(ns.lambda.iter().map(report::matrix).collect()))
        .set(
            "direct",
            json!({
                "noiseless": sem.noiseless,
                "support_residual": sem.support_residual,
                "factor_residual": sem.factor_residual,
                "tau_spread": sem.tau_spread,
                "tau": report::matrix(&sem.tau),
            }),
        );
    Ok(finish(r, if ns.noiseless { Status::Pass } else { Status::Fail }))
}

fn lambda_dump(lambda4: &[Vec<ComplexMatrix>]) -> Value {
    Value::Array(
        lambda4
            .iter()
            .map(|row| Value::Array(row.iter().map(report::matrix).collect()))
            .collect(),
    )
}

pub fn check_oqec(channel: &Path, decomposition: &Path, tol: &Tolerance) -> Result<Outcome, CliError> {
    let (ch, dec) = load_pair(channel, decomposition, tol)?;
    let rep = oqec_check(&ch, &dec, tol).map_err(synthesis)?;
    let mut r = Report::new("check-oqec");
    r.set("m", dec.m())
        .set("n", dec.n())
        .set("correctable", rep.correctable)
        .set("residual", rep.residual)
        .set("lambda_layout", "lambda[a][b][k][l] with zero-based indices")
        .set("lambda", lambda_dump(&rep.lambda4));
    Ok(finish(r, if rep.correctable { Status::Pass } else { Status::Fail }))
}

pub fn recover(channel: &Path, decomposition: &Path, out: &Path, tol: &Tolerance) -> Result<Outcome, CliError> {
    let (ch, dec) = load_pair(channel, decomposition, tol)?;
    let rep = oqec_check(&ch, &dec, tol).map_err(synthesis)?;
    let mut r = Report::new("recover");
    r.set("m", dec.m()).set("n", dec.n()).set("residual", rep.residual);
    if !rep.correctable {
        r.set("correctable", false);
        return Ok(finish(r, Status::Fail));
    }
    let rec = synthesize_oqec_recovery(&ch, &dec, tol).map_err(synthesis)?;
    let deviation = triple_deviation(&rec.channel, &ch, &dec).map_err(synthesis)?;
    if deviation > tol.atol {
        return Err(CliError::Synthesis(format!(
            "synthesized recovery failed verification (deviation {deviation:.3e})"
        )));
    }
    let file = ChannelFile::from_kraus(rec.channel.kraus(), Some(rec.origin.to_string()));
    files::write(out, &file)?;
    r.set("correctable", true)
        .set("origin", rec.origin.to_string())
        .set("kraus_count", rec.channel.kraus().len())
        .set("deviation", deviation)
        .set("written", out.display().to_string());
    Ok(finish(r, Status::Pass))
}

fn uns_error(e: UnsError) -> CliError {
    match e {
        UnsError::NotUnital { .. } => CliError::Invalid(e.to_string()),
        UnsError::NotUnitary { .. } | UnsError::Shape { .. } => CliError::Input(e.to_string()),
        other => synthesis(other),
    }
}

pub fn uns(
    channel: &Path,
    unitary: &Path,
    seed: u64,
    out: Option<&Path>,
    tol: &Tolerance,
) -> Result<Outcome, CliError> {
    let ch = load_channel(channel, tol)?;
    let file: UnitaryFile = files::read(unitary)?;
    let u = file.matrix()?;
    let rep = uns_algebra_seeded(&ch, &u, tol, seed).map_err(uns_error)?;
    let sectors = rep.sectors();
    let mut table = Vec::with_capacity(sectors.len());
    for dec in &sectors {
        let deviation = uns_deviation(&ch, dec, &u, tol).map_err(uns_error)?;
        table.push(json!({"m": dec.m(), "n": dec.n(), "deviation": deviation}));
    }
    let mut r = Report::new("uns");
    r.set("seed", seed)
        .set("dim", ch.dim())
        .set("algebra_dim", rep.algebra.dim())
        .set("blocks", report::blocks(&rep.structure.dims()))
        .set("evolve_residual", rep.evolve_residual)
        .set("sectors", Value::Array(table));
    if let Some(dir) = out {
        r.set("written", write_decompositions(dir, "uns-sector-", &sectors)?);
    }
    Ok(finish(r, Status::Pass))
}

/// Diagonal sign flips (first sign fixed, since a global phase changes
/// nothing) and permutation matrices of dimension `d`.
pub fn scan_candidates(d: usize) -> Vec<(String, ComplexMatrix)> {
    let mut out = Vec::new();
    if d <= SCAN_SIGNS_MAX_DIM {
        for mask in 0..1usize << (d - 1) {
            let signs: Vec<f64> = (0..d)
                .map(|i| if i > 0 && mask >> (i - 1) & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let label: String = signs.iter().map(|&s| if s > 0.0 { '+' } else { '-' }).collect();
            let u = ComplexMatrix::from_fn(d, d, |i, j| if i == j { C64::new(signs[i], 0.0) } else { C64::new(0.0, 0.0) });
            out.push((format!("signs {label}"), u));
        }
    }
    if (2..=SCAN_PERMUTATIONS_MAX_DIM).contains(&d) {
        for perm in (0..d).permutations(d).skip(1) {
            let u = ComplexMatrix::from_fn(d, d, |i, j| C64::new(if perm[j] == i { 1.0 } else { 0.0 }, 0.0));
            out.push((format!("permutation {perm:?}"), u));
        }
    }
    out
}

pub fn uns_scan(channel: &Path, seed: u64, tol: &Tolerance) -> Result<Outcome, CliError> {
    let ch = load_channel(channel, tol)?;
    let candidates = scan_candidates(ch.dim());
    let found: Vec<ScanHit> = candidates
        .par_iter()
        .map(|(label, u)| {
            uns_algebra_seeded(&ch, u, tol, seed)
                .map(|rep| (label.clone(), rep.algebra.dim(), rep.structure.dims(), rep.evolve_residual))
                .map_err(uns_error)
        })
        .collect::<Result<_, _>>()?;
    let mut ranked: Vec<_> = found.into_iter().filter(|f| f.1 > 1).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let best: Vec<Value> = ranked
        .iter()
        .take(SCAN_REPORTED)
        .map(|(label, dim, blocks, res)| {
            json!({"unitary": label, "algebra_dim": dim, "blocks": report::blocks(blocks), "evolve_residual": res})
        })
        .collect();
    let mut r = Report::new("uns");
    r.set("seed", seed)
        .set("dim", ch.dim())
        .set("candidates", candidates.len())
        .set("nontrivial", ranked.len())
        .set("best", Value::Array(best));
    Ok(finish(r, Status::Pass))
}

pub fn example(name: &str, params: &[(String, f64)], out: &Path) -> Result<Outcome, CliError> {
    let ex = examples::by_name(name, params).map_err(CliError::Input)?;
    fs::create_dir_all(out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    let mut written = Vec::new();
    let mut put = |file: String, text: String| -> Result<(), CliError> {
        let path = out.join(file);
        files::write_atomic(&path, &text)?;
        written.push(path.display().to_string());
        Ok(())
    };
    put("channel.json".into(), files::to_text(&ChannelFile::from_channel(&ex.channel)))?;
    for d in &ex.decompositions {
        put(
            format!("decomposition-{}.json", d.label.to_lowercase()),
            files::to_text(&DecompositionFile::from_decomposition(&d.decomposition)),
        )?;
    }
    for (i, rec) in ex.recoveries.iter().enumerate() {
        let file = if ex.recoveries.len() == 1 { "recovery.json".to_string() } else { format!("recovery-{}.json", i + 1) };
        put(file, files::to_text(&ChannelFile::from_kraus(rec.channel.kraus(), Some(rec.origin.to_string()))))?;
    }
    if let Some(u) = &ex.unitary {
        put("unitary.json".into(), files::to_text(&UnitaryFile::from_matrix(u)))?;
    }
    let params: serde_json::Map<String, Value> = ex.parameters.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
    let mut r = Report::new("example");
    r.set("name", ex.name).set("parameters", Value::Object(params)).set("written", written);
    Ok(finish(r, Status::Pass))
}
