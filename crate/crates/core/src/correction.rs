//! Error correction for subspaces and subsystems: the Knill–Laflamme check,
//! the subsystem correctability condition, recovery synthesis and the
//! reduction of a correctable subsystem to a correctable subspace.

use std::fmt;

use crate::channel::{apply_kraus, QuantumChannel};
use crate::error::CorrectionError;
use crate::matkit::{ComplexMatrix, Tolerance, C64};
use crate::noiseless::{project_on_units, SubsystemDecomposition};

#[derive(Clone, Debug)]
pub struct KLReport {
    pub satisfied: bool,
    /// `λ_ab = Tr(P E_a†E_b P) / Tr P`
    pub lambda: ComplexMatrix,
    /// `max ‖P E_a†E_b P − λ_ab P‖_F`
    pub residual: f64,
    /// Smallest eigenvalue of the Hermitian part of `λ` (reported only).
    pub lambda_psd_mineig: f64,
}

#[derive(Clone, Debug)]
pub struct OQECReport {
    pub correctable: bool,
    /// `lambda4[a][b]` is the `m × m` matrix `λ_{abkl}`.
    pub lambda4: Vec<Vec<ComplexMatrix>>,
    /// `max ‖P_kk E_a†E_b P_ll − λ_abkl P_kl‖_F`
    pub residual: f64,
}

impl OQECReport {
    /// `λ_{abkl}` with zero-based indices.
    pub fn lambda(&self, a: usize, b: usize, k: usize, l: usize) -> C64 {
        self.lambda4[a][b][(k, l)]
    }
}

/// Which construction produced a recovery.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RecoveryOrigin {
    /// Polar decomposition of the diagonalized errors on a code subspace.
    Standard,
    /// Standard recovery of the induced code on `H^B`, followed by
    /// `ρ^B ↦ (1/m)(1^A ⊗ ρ^B)`.
    Subsystem,
    /// Compression of a subsystem recovery onto one code subspace.
    Reduction,
    Supplied,
}

impl fmt::Display for RecoveryOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard synthesis",
            Self::Subsystem => "subsystem synthesis",
            Self::Reduction => "reduction to a code subspace",
            Self::Supplied => "supplied",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RecoveryChannel {
    pub channel: QuantumChannel,
    pub origin: RecoveryOrigin,
}

fn check_projector(
    ch: &QuantumChannel,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ComplexMatrix, CorrectionError> {
    if p.shape() != (ch.dim(), ch.dim()) {
        return Err(CorrectionError::ProjectorShape {
            shape: p.shape(),
            dim: ch.dim(),
        });
    }
    let residual = p.projector_residual();
    if residual > tol.atol {
        return Err(CorrectionError::NotProjector { residual });
    }
    let q = p.range_basis(tol);
    if q.cols() == 0 || p.frobenius_norm() < 0.5 {
        return Err(CorrectionError::EmptyCode);
    }
    Ok(q)
}

/// Knill–Laflamme check `P E_a†E_b P = λ_ab P`.
///
/// Evaluated as `G_a†G_b = λ_ab 1` with `G_a = E_a Q` for an orthonormal
/// basis `Q` of the code, which has the same residuals.
pub fn kl_check(
    ch: &QuantumChannel,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<KLReport, CorrectionError> {
    let q = check_projector(ch, p, tol)?;
    let c = q.cols();
    let g: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e * &q).collect();
    let na = g.len();
    let id = ComplexMatrix::identity(c);
    let mut lambda = ComplexMatrix::zeros(na, na);
    let mut residual: f64 = 0.0;
    for a in 0..na {
        for b in 0..na {
            let x = g[a].adjoint_mul(&g[b]);
            let lam = x.trace() / c as f64;
            lambda[(a, b)] = lam;
            residual = residual.max(x.distance(&id.scale(lam)));
        }
    }
    let lambda_psd_mineig = lambda
        .hermitian_part()
        .eig_hermitian(tol)
        .map(|e| e.values[0])
        .unwrap_or(f64::NAN);
    Ok(KLReport {
        satisfied: residual <= tol.atol,
        lambda,
        residual,
        lambda_psd_mineig,
    })
}

fn code_basis_images(
    q: &ComplexMatrix,
    mut map: impl FnMut(&ComplexMatrix) -> ComplexMatrix,
) -> f64 {
    let cols = q.columns();
    let mut worst: f64 = 0.0;
    for u in &cols {
        for v in &cols {
            let sigma = ComplexMatrix::outer(u, v);
            worst = worst.max(map(&sigma).distance(&sigma));
        }
    }
    worst
}

/// `max ‖(ℛ∘ℰ)(σ) − σ‖_F` over the operator basis `|q_i⟩⟨q_j|` of `P B(H) P`.
pub fn standard_triple_deviation(
    r: &QuantumChannel,
    e: &QuantumChannel,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<f64, CorrectionError> {
    if r.dim() != e.dim() {
        return Err(CorrectionError::Channel(
            crate::error::ChannelError::DimensionMismatch(r.dim(), e.dim()),
        ));
    }
    let q = check_projector(e, p, tol)?;
    Ok(code_basis_images(&q, |s| {
        apply_kraus(r.kraus(), &apply_kraus(e.kraus(), s))
    }))
}

/// Whether `ℛ` undoes `ℰ` on every operator supported on the code `P`.
pub fn verify_standard_triple(
    r: &QuantumChannel,
    e: &QuantumChannel,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<bool, CorrectionError> {
    Ok(standard_triple_deviation(r, e, p, tol)? <= tol.atol)
}

/// Subsystem correctability condition `P_kk E_a†E_b P_ll = λ_abkl P_kl`.
pub fn oqec_check(
    ch: &QuantumChannel,
    dec: &SubsystemDecomposition,
    tol: &Tolerance,
) -> Result<OQECReport, CorrectionError> {
    dec.check_channel(ch)?;
    let kraus = ch.kraus();
    let mut residual: f64 = 0.0;
    let mut lambda4 = Vec::with_capacity(kraus.len());
    for ea in kraus {
        let mut row = Vec::with_capacity(kraus.len());
        for eb in kraus {
            let (lam, r) = project_on_units(dec, &ea.adjoint_mul(eb));
            residual = residual.max(r);
            row.push(lam);
        }
        lambda4.push(row);
    }
    Ok(OQECReport {
        correctable: residual <= tol.atol,
        lambda4,
        residual,
    })
}

/// Recovery Kraus operators `R_c` (`c × d`, `c` the input dimension of the
/// code maps) for a family of maps `K_i : C^c → C^d` satisfying
/// `K_i†K_j = Λ_ij 1_c`: diagonalize `Λ`, remix, and invert each remixed
/// error by the adjoint of its polar isometry. The returned list is
/// completed to a trace-preserving map on `C^d` by `|e_1⟩⟨u_j|` for an
/// orthonormal basis `u_j` of the part of `C^d` not reached by any error.
fn invert_code_errors(
    k: &[ComplexMatrix],
    lambda: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Vec<ComplexMatrix>, CorrectionError> {
    let d = k[0].rows();
    let c = k[0].cols();
    let eig = lambda
        .hermitian_part()
        .eig_hermitian(tol)
        .map_err(|e| CorrectionError::Synthesis(e.to_string()))?;
    let dmax = eig.values.iter().cloned().fold(0.0, f64::max);
    if dmax <= 0.0 {
        return Err(CorrectionError::Synthesis("all error weights vanish".into()));
    }
    let mut out = Vec::new();
    let mut reached = ComplexMatrix::zeros(d, d);
    for (ci, &dc) in eig.values.iter().enumerate() {
        if dc <= tol.rank_rtol * dmax {
            continue;
        }
        // F_c = Σ_i W_ic K_i, so F_c†F_c' = (W†ΛW)_cc' 1
        let mut f = ComplexMatrix::zeros(d, c);
        for (i, ki) in k.iter().enumerate() {
            f += &ki.scale(eig.vectors[(i, ci)]);
        }
        let v = f.polar_isometry(tol);
        if v.rank(tol) != c {
            return Err(CorrectionError::Synthesis(format!(
                "remixed error {ci} is not an isometry on the code"
            )));
        }
        reached += &v.range_projector();
        out.push(v.adjoint());
    }
    let rest = &ComplexMatrix::identity(d) - &reached;
    let overlap = rest.projector_residual();
    if overlap > tol.scaled(d as f64) {
        return Err(CorrectionError::Synthesis(format!(
            "error subspaces overlap (residual {overlap:.3e})"
        )));
    }
    let eig = rest
        .hermitian_part()
        .eig_hermitian(tol)
        .map_err(|e| CorrectionError::Synthesis(e.to_string()))?;
    for j in 0..d {
        if eig.values[j] > 0.5 {
            let u = eig.vectors.column(j);
            let mut e1 = vec![C64::new(0.0, 0.0); c];
            e1[0] = C64::new(1.0, 0.0);
            out.push(ComplexMatrix::outer(&e1, &u));
        }
    }
    Ok(out)
}

/// Recovery for a code subspace satisfying the Knill–Laflamme condition.
pub fn synthesize_standard_recovery(
    ch: &QuantumChannel,
    p: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<RecoveryChannel, CorrectionError> {
    let kl = kl_check(ch, p, tol)?;
    if !kl.satisfied {
        return Err(CorrectionError::KnillLaflamme {
            residual: kl.residual,
        });
    }
    let q = p.range_basis(tol);
    let k: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| e * &q).collect();
    // R_c = Q V_c† maps the c-th error subspace back onto the code
    let kraus: Vec<ComplexMatrix> = invert_code_errors(&k, &kl.lambda, tol)?
        .iter()
        .map(|r| &q * r)
        .collect();
    finish(kraus, RecoveryOrigin::Standard, tol, |rec| {
        standard_triple_deviation(rec, ch, p, tol)
    })
}

fn finish(
    kraus: Vec<ComplexMatrix>,
    origin: RecoveryOrigin,
    tol: &Tolerance,
    deviation: impl FnOnce(&QuantumChannel) -> Result<f64, CorrectionError>,
) -> Result<RecoveryChannel, CorrectionError> {
    let channel = QuantumChannel::with_tolerance(kraus, tol)
        .map_err(|e| CorrectionError::Synthesis(e.to_string()))?;
    let dev = deviation(&channel)?;
    if dev > tol.atol {
        return Err(CorrectionError::Synthesis(format!(
            "synthesized recovery misses the code (deviation {dev:.3e})"
        )));
    }
    Ok(RecoveryChannel { channel, origin })
}

/// Recovery for a correctable subsystem.
///
/// The maps `E_a W_k / √m : H^B → C^d` (`W_k` the slice of the isometry for
/// `α_k`) satisfy the Knill–Laflamme condition on all of `H^B` with
/// `Λ_{(a,k),(b,l)} = λ_abkl / m`. Their standard recovery `ℛ` returns
/// `H^B`, and `ρ^B ↦ (1/m) W(1^A ⊗ ρ^B)W†` re-embeds it, giving Kraus
/// operators `W_k R_c / √m`. For `m = 1` the standard path is used directly.
pub fn synthesize_oqec_recovery(
    ch: &QuantumChannel,
    dec: &SubsystemDecomposition,
    tol: &Tolerance,
) -> Result<RecoveryChannel, CorrectionError> {
    let report = oqec_check(ch, dec, tol)?;
    if !report.correctable {
        return Err(CorrectionError::NotCorrectable {
            residual: report.residual,
        });
    }
    let m = dec.m();
    if m == 1 {
        return synthesize_standard_recovery(ch, &dec.projector(), tol);
    }
    let na = ch.kraus().len();
    let scale = 1.0 / (m as f64).sqrt();
    let slices: Vec<ComplexMatrix> = (0..m).map(|k| dec.slice(k)).collect();
    let mut maps = Vec::with_capacity(na * m);
    for e in ch.kraus() {
        for wk in &slices {
            maps.push((e * wk).scale_real(scale));
        }
    }
    let mut lambda = ComplexMatrix::zeros(na * m, na * m);
    for a in 0..na {
        for k in 0..m {
            for b in 0..na {
                for l in 0..m {
                    lambda[(a * m + k, b * m + l)] = report.lambda(a, b, k, l) / m as f64;
                }
            }
        }
    }
    let inverse = invert_code_errors(&maps, &lambda, tol)?;
    let mut kraus = Vec::with_capacity(m * inverse.len());
    for wk in &slices {
        for r in &inverse {
            kraus.push((wk * r).scale_real(scale));
        }
    }
    finish(kraus, RecoveryOrigin::Subsystem, tol, |rec| {
        triple_deviation(rec, ch, dec)
    })
}

/// `max ‖Tr_A(W†(ℛ∘ℰ)(σ)W) − Tr_A(σ)‖_F` over the spanning set
/// `|α_i⟩⟨α_j| ⊗ |β_k⟩⟨β_l|` of `𝔄`.
pub fn triple_deviation(
    r: &QuantumChannel,
    e: &QuantumChannel,
    dec: &SubsystemDecomposition,
) -> Result<f64, CorrectionError> {
    dec.check_channel(e)?;
    dec.check_channel(r)?;
    let (m, n) = (dec.m(), dec.n());
    let mut worst: f64 = 0.0;
    for ((i, j, k, l), sigma) in dec.semigroup_basis() {
        let out = apply_kraus(r.kraus(), &apply_kraus(e.kraus(), &sigma));
        let reduced = dec.compress(&out).partial_trace_a(m, n)?;
        let want = if i == j {
            ComplexMatrix::ket_bra(n, k, l)
        } else {
            ComplexMatrix::zeros(n, n)
        };
        worst = worst.max(reduced.distance(&want));
    }
    Ok(worst)
}

/// Whether `Tr_A ∘ 𝒫_𝔄 ∘ ℛ ∘ ℰ = Tr_A` on `𝔄`.
pub fn verify_correctable_triple(
    r: &QuantumChannel,
    e: &QuantumChannel,
    dec: &SubsystemDecomposition,
    tol: &Tolerance,
) -> Result<bool, CorrectionError> {
    Ok(triple_deviation(r, e, dec)? <= tol.atol)
}

/// A correctable code subspace obtained from a correctable subsystem.
#[derive(Clone, Debug)]
pub struct StandardReduction {
    /// `𝒫_k ∘ ℛ` with `𝒫_k(·) = Σ_l P_kl (·) P_kl†`, completed on the
    /// complement of `P_𝔄`.
    pub recovery: QuantumChannel,
    /// The code projector `P_kk`.
    pub code: ComplexMatrix,
    /// `Tr(P_kk (𝒫_k∘ℛ∘ℰ)(P_kk)) / Tr(P_kk)`.
    pub factor: f64,
    /// Deviation of the reduced triple on the code basis.
    pub deviation: f64,
}

/// Turns a correctable triple into a standard one on the code `P_kk`
/// (`k` is one-based).
pub fn reduce_to_standard(
    r: &QuantumChannel,
    e: &QuantumChannel,
    dec: &SubsystemDecomposition,
    k: usize,
    tol: &Tolerance,
) -> Result<StandardReduction, CorrectionError> {
    let m = dec.m();
    if k == 0 || k > m {
        return Err(CorrectionError::IndexOutOfRange { k, m });
    }
    let deviation = triple_deviation(r, e, dec)?;
    if deviation > tol.atol {
        return Err(CorrectionError::TripleNotCorrectable { deviation });
    }
    let k = k - 1;
    let units = dec.matrix_units();
    let outside = &ComplexMatrix::identity(dec.dim()) - &dec.projector();
    let mut kraus = Vec::with_capacity((m + 1) * r.kraus().len());
    for rb in r.kraus() {
        for pkl in &units[k] {
            kraus.push(pkl * rb);
        }
        if outside.frobenius_norm() > tol.atol {
            kraus.push(&outside * rb);
        }
    }
    let recovery = QuantumChannel::with_tolerance(kraus, tol)?;
    let code = units[k][k].clone();
    let image = apply_kraus(recovery.kraus(), &apply_kraus(e.kraus(), &code));
    let factor = ((&code * &image).trace() / code.trace()).re;
    let deviation = standard_triple_deviation(&recovery, e, &code, tol)?;
    Ok(StandardReduction {
        recovery,
        code,
        factor,
        deviation,
    })
}
