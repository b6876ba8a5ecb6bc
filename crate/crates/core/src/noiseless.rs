//! Noiseless subsystems: fixed points, verification and discovery.
//!
//! A [`SubsystemDecomposition`] fixes a subspace `H^A ⊗ H^B ⊆ C^d` through an
//! isometry `W`. The subsystem `H^B` is noiseless for a channel when
//! `ℰ(σ^A ⊗ σ^B) = τ^A ⊗ σ^B` for all inputs, which is checked both through
//! the operator conditions on the matrix units ([`verify_ns`]) and directly
//! on the action of the channel ([`verify_ns_semantic`]).

use crate::algebra::{decompose_structure, generate_algebra, Block, BlockStructure};
use crate::channel::QuantumChannel;
use crate::error::NoiselessError;
use crate::matkit::{ComplexMatrix, Tolerance, C64};
use crate::space::OperatorSpace;

/// The subspace `H^A ⊗ H^B` of `C^d`, `dim H^A = m`, `dim H^B = n`.
#[derive(Clone, Debug)]
pub struct SubsystemDecomposition {
    dim: usize,
    m: usize,
    n: usize,
    /// Column `k·n + l` (zero-based) is `|α_k⟩ ⊗ |β_l⟩`.
    isometry: ComplexMatrix,
}

/// Column ordering convention stored alongside serialized decompositions.
pub const COLUMN_CONVENTION: &str = "column (k-1)*n + (l-1) holds |alpha_k> (x) |beta_l>";

impl SubsystemDecomposition {
    pub fn new(
        m: usize,
        n: usize,
        isometry: ComplexMatrix,
        tol: &Tolerance,
    ) -> Result<Self, NoiselessError> {
        let dim = isometry.rows();
        let mn = m * n;
        if mn == 0 || mn > dim {
            return Err(NoiselessError::TooLarge { mn, dim });
        }
        if isometry.cols() != mn {
            return Err(NoiselessError::IsometryShape {
                shape: isometry.shape(),
                dim,
                mn,
            });
        }
        let residual = isometry.isometry_residual();
        if residual > tol.atol {
            return Err(NoiselessError::NotIsometry { residual });
        }
        Ok(Self { dim, m, n, isometry })
    }

    /// The first `m·n` computational basis vectors of `C^dim`.
    pub fn standard(dim: usize, m: usize, n: usize) -> Result<Self, NoiselessError> {
        let mn = m * n;
        if mn == 0 || mn > dim {
            return Err(NoiselessError::TooLarge { mn, dim });
        }
        let w = ComplexMatrix::from_fn(dim, mn, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        Ok(Self { dim, m, n, isometry: w })
    }

    /// Decomposition whose `H^B` is the multiplicity space of an algebra
    /// block (`A` acts as `M_m`, `B` is untouched).
    pub fn from_block(block: &Block) -> Self {
        Self {
            dim: block.isometry.rows(),
            m: block.m,
            n: block.n,
            isometry: block.isometry.clone(),
        }
    }

    /// Decomposition whose `H^B` is the factor on which the block's
    /// commutant acts (`m` and `n` exchanged).
    pub fn from_block_commutant(block: &Block) -> Self {
        Self {
            dim: block.isometry.rows(),
            m: block.n,
            n: block.m,
            isometry: block.swapped_isometry(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn isometry(&self) -> &ComplexMatrix {
        &self.isometry
    }

    /// `W_k = W(|α_k⟩ ⊗ 1_n)`, the `d × n` slice of columns for `α_k`.
    pub fn slice(&self, k: usize) -> ComplexMatrix {
        self.isometry.column_range(k * self.n, self.n)
    }

    /// `P_kl = |α_k⟩⟨α_l| ⊗ 1_n` (zero-based indices).
    pub fn matrix_unit(&self, k: usize, l: usize) -> ComplexMatrix {
        &self.slice(k) * &self.slice(l).adjoint()
    }

    pub fn matrix_units(&self) -> Vec<Vec<ComplexMatrix>> {
        let slices: Vec<ComplexMatrix> = (0..self.m).map(|k| self.slice(k)).collect();
        slices
            .iter()
            .map(|wk| slices.iter().map(|wl| wk * &wl.adjoint()).collect())
            .collect()
    }

    /// `P_𝔄 = Σ_k P_kk = W W†`.
    pub fn projector(&self) -> ComplexMatrix {
        self.isometry.range_projector()
    }

    /// `W X W†` for `X` on `H^A ⊗ H^B`.
    pub fn embed(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &(&self.isometry * x) * &self.isometry.adjoint()
    }

    /// `W (σ^A ⊗ σ^B) W†`.
    pub fn embed_product(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        self.embed(&a.tensor(b))
    }

    /// `W† X W`, the block coordinates of `X`.
    pub fn compress(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.isometry.adjoint_mul(x) * &self.isometry
    }

    /// Spanning set `|α_i⟩⟨α_j| ⊗ |β_k⟩⟨β_l|` of `𝔄`, as `((i, j, k, l), σ)`.
    pub fn semigroup_basis(&self) -> Vec<((usize, usize, usize, usize), ComplexMatrix)> {
        let (m, n) = (self.m, self.n);
        let mut out = Vec::with_capacity(m * m * n * n);
        for i in 0..m {
            for j in 0..m {
                for k in 0..n {
                    for l in 0..n {
                        let s = self.embed_product(
                            &ComplexMatrix::ket_bra(m, i, j),
                            &ComplexMatrix::ket_bra(n, k, l),
                        );
                        out.push(((i, j, k, l), s));
                    }
                }
            }
        }
        out
    }

    /// Same decomposition with `{|α_k⟩}` re-based by the unitary `w`:
    /// `|α′_k⟩ = Σ_j w_jk |α_j⟩`.
    pub fn rebase_a(&self, w: &ComplexMatrix) -> Self {
        let u = w.tensor(&ComplexMatrix::identity(self.n));
        Self {
            dim: self.dim,
            m: self.m,
            n: self.n,
            isometry: &self.isometry * &u,
        }
    }

    pub(crate) fn check_channel(&self, ch: &QuantumChannel) -> Result<(), NoiselessError> {
        if ch.dim() != self.dim {
            return Err(NoiselessError::DimensionMismatch {
                channel: ch.dim(),
                decomposition: self.dim,
            });
        }
        Ok(())
    }
}

/// Orthonormal basis of `{σ : ℰ(σ) = σ}`, the null space of `S − I` for the
/// superoperator `S`.
pub fn fixed_points(ch: &QuantumChannel, tol: &Tolerance) -> OperatorSpace {
    let d = ch.dim();
    let s = &ch.superoperator() - &ComplexMatrix::identity(d * d);
    let ns = s.null_space(tol);
    OperatorSpace::from_orthonormal_columns(d, &ns)
}

/// Outcome of the operator conditions on the matrix units.
#[derive(Clone, Debug)]
pub struct NSReport {
    pub noiseless: bool,
    /// `lambda[a]` is the `m × m` matrix `λ_{akl}`.
    pub lambda: Vec<ComplexMatrix>,
    /// `max ‖P_kk E_a P_ll − λ_akl P_kl‖_F`
    pub cond1_residual: f64,
    /// `max ‖E_a P_𝔄 − P_𝔄 E_a P_𝔄‖_F`
    pub cond2_residual: f64,
}

/// For every operator `X`, the coefficients `⟨P_kl, P_kk X P_ll⟩ / ⟨P_kl, P_kl⟩`
/// and the largest residual `‖P_kk X P_ll − c_kl P_kl‖_F`.
///
/// Both are computed in block coordinates: `P_kk X P_ll = W_k (W_k† X W_l) W_l†`
/// and `W_k`, `W_l` are isometries.
pub(crate) fn project_on_units(
    dec: &SubsystemDecomposition,
    x: &ComplexMatrix,
) -> (ComplexMatrix, f64) {
    let (m, n) = (dec.m, dec.n);
    let c = dec.compress(x);
    let mut coeff = ComplexMatrix::zeros(m, m);
    let mut worst: f64 = 0.0;
    for k in 0..m {
        for l in 0..m {
            let mut tr = C64::new(0.0, 0.0);
            for j in 0..n {
                tr += c[(k * n + j, l * n + j)];
            }
            let lam = tr / n as f64;
            coeff[(k, l)] = lam;
            let mut r2 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { lam } else { C64::new(0.0, 0.0) };
                    r2 += (c[(k * n + i, l * n + j)] - want).norm_sqr();
                }
            }
            worst = worst.max(r2.sqrt());
        }
    }
    (coeff, worst)
}

pub fn verify_ns(
    ch: &QuantumChannel,
    dec: &SubsystemDecomposition,
    tol: &Tolerance,
) -> Result<NSReport, NoiselessError> {
    dec.check_channel(ch)?;
    let w = dec.isometry();
    let p = dec.projector();
    let mut lambda = Vec::with_capacity(ch.kraus().len());
    let mut cond1: f64 = 0.0;
    let mut cond2: f64 = 0.0;
    for e in ch.kraus() {
        let (lam, r) = project_on_units(dec, e);
        lambda.push(lam);
        cond1 = cond1.max(r);
        let ew = e * w;
        cond2 = cond2.max(ew.distance(&(&p * &ew)));
    }
    Ok(NSReport {
        noiseless: cond1 <= tol.atol && cond2 <= tol.atol,
        lambda,
        cond1_residual: cond1,
        cond2_residual: cond2,
    })
}

/// Outcome of the direct check `ℰ(1^A ⊗ σ^B) = τ^A ⊗ σ^B`.
#[derive(Clone, Debug)]
pub struct SemanticReport {
    pub noiseless: bool,
    /// `max ‖ρ − P_𝔄 ρ P_𝔄‖_F` over the probes.
    pub support_residual: f64,
    /// `max ‖W†ρW − τ ⊗ σ^B‖_F` over the probes.
    pub factor_residual: f64,
    /// Largest Frobenius distance between the `τ^A` of two probes.
    pub tau_spread: f64,
    /// `τ^A` read off the first probe.
    pub tau: ComplexMatrix,
}

/// Reads `τ` off block coordinates `r ≈ τ ⊗ s` by contracting with `s`:
/// `τ_kk′ = Σ_ll′ r[(k,l),(k′,l′)] conj(s_ll′) / ‖s‖²`.
fn contract_factor(r: &ComplexMatrix, s: &ComplexMatrix, m: usize, n: usize) -> ComplexMatrix {
    let norm2 = s.frobenius_norm().powi(2);
    ComplexMatrix::from_fn(m, m, |k, kp| {
        let mut acc = C64::new(0.0, 0.0);
        for l in 0..n {
            for lp in 0..n {
                acc += r[(k * n + l, kp * n + lp)] * s[(l, lp)].conj();
            }
        }
        acc / norm2
    })
}

/// Checks `ℰ(1^A ⊗ σ^B) = τ^A ⊗ σ^B` on the matrix units `σ^B = |β_l⟩⟨β_l′|`,
/// with the output supported on `P_𝔄` and `τ^A` independent of the probe.
pub fn verify_ns_semantic(
    ch: &QuantumChannel,
    dec: &SubsystemDecomposition,
    tol: &Tolerance,
) -> Result<SemanticReport, NoiselessError> {
    dec.check_channel(ch)?;
    let (m, n) = (dec.m, dec.n);
    let p = dec.projector();
    let id_a = ComplexMatrix::identity(m);
    let mut support: f64 = 0.0;
    let mut factor: f64 = 0.0;
    let mut taus = Vec::with_capacity(n * n);
    for l in 0..n {
        for lp in 0..n {
            let s = ComplexMatrix::ket_bra(n, l, lp);
            let rho = ch.apply(&dec.embed_product(&id_a, &s))?;
            support = support.max(rho.distance(&(&(&p * &rho) * &p)));
            let r = dec.compress(&rho);
            let tau = contract_factor(&r, &s, m, n);
            factor = factor.max(r.distance(&tau.tensor(&s)));
            taus.push(tau);
        }
    }
    let mut spread: f64 = 0.0;
    for (i, a) in taus.iter().enumerate() {
        for b in &taus[i + 1..] {
            spread = spread.max(a.distance(b));
        }
    }
    let limit = tol.scaled(m as f64);
    Ok(SemanticReport {
        noiseless: support <= limit && factor <= limit && spread <= limit,
        support_residual: support,
        factor_residual: factor,
        tau_spread: spread,
        tau: taus.swap_remove(0),
    })
}

/// `τ^A` with `ℰ(σ^A ⊗ σ^B) = τ^A ⊗ σ^B`.
///
/// The factor is read off the unit-trace probe `|β_1⟩⟨β_1|` and then
/// cross-checked against every matrix unit of `B(H^B)` and against `σB`.
/// No trace normalization is applied: for `σA = 1^A` the result has trace
/// `m` when the channel is trace preserving on the code.
pub fn extract_tau(
    ch: &QuantumChannel,
    dec: &SubsystemDecomposition,
    sigma_a: &ComplexMatrix,
    sigma_b: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ComplexMatrix, NoiselessError> {
    dec.check_channel(ch)?;
    let (m, n) = (dec.m, dec.n);
    for (x, want) in [(sigma_a, m), (sigma_b, n)] {
        if x.shape() != (want, want) {
            return Err(NoiselessError::OperandShape {
                shape: x.shape(),
                expected: want,
            });
        }
    }
    let report = verify_ns(ch, dec, tol)?;
    if !report.noiseless {
        return Err(NoiselessError::NotNoiseless {
            cond1: report.cond1_residual,
            cond2: report.cond2_residual,
        });
    }
    let image = |s: &ComplexMatrix| -> Result<ComplexMatrix, NoiselessError> {
        Ok(ch.apply(&dec.embed_product(sigma_a, s))?)
    };
    let probe = ComplexMatrix::ket_bra(n, 0, 0);
    let tau = dec
        .compress(&image(&probe)?)
        .partial_trace_b(m, n)?;
    let mut probes: Vec<ComplexMatrix> = (0..n)
        .flat_map(|l| (0..n).map(move |lp| ComplexMatrix::ket_bra(n, l, lp)))
        .collect();
    probes.push(sigma_b.clone());
    let mut worst: f64 = 0.0;
    for s in &probes {
        let want = dec.embed_product(&tau, s);
        worst = worst.max(image(s)?.distance(&want));
    }
    let scale = sigma_a.frobenius_norm() * sigma_b.frobenius_norm().max(1.0);
    if worst > tol.scaled(scale) {
        return Err(NoiselessError::NotNoiseless {
            cond1: report.cond1_residual.max(worst),
            cond2: report.cond2_residual,
        });
    }
    Ok(tau)
}

/// Noiseless subsystems read off the interaction algebra of a unital channel.
#[derive(Clone, Debug)]
pub struct NsDiscovery {
    /// Block structure `⊕_J M_{m_J} ⊗ 1_{n_J}` of the interaction algebra.
    pub structure: BlockStructure,
    /// One decomposition per block with `n_J ≥ 2`; `H^B` is the `1_{n_J}` factor.
    pub noiseless: Vec<SubsystemDecomposition>,
    /// `(m_J, n_J)` of the blocks with `n_J = 1` (classical sectors).
    pub classical: Vec<(usize, usize)>,
}

/// Noiseless subsystems of a unital channel from the block structure of its
/// interaction algebra. Every emitted decomposition is checked with
/// [`verify_ns`].
pub fn find_ns_unital(
    ch: &QuantumChannel,
    tol: &Tolerance,
    seed: u64,
) -> Result<NsDiscovery, NoiselessError> {
    let report = ch.report(tol);
    if !report.unital {
        return Err(NoiselessError::NotUnital {
            residual: report.unital_residual,
        });
    }
    let alg = generate_algebra(ch.kraus(), tol)?;
    let structure = decompose_structure(&alg, tol, seed)?;
    let mut noiseless = Vec::new();
    let mut classical = Vec::new();
    for block in &structure.blocks {
        if block.n < 2 {
            classical.push((block.m, block.n));
            continue;
        }
        let dec = SubsystemDecomposition::from_block(block);
        let check = verify_ns(ch, &dec, tol)?;
        if !check.noiseless {
            return Err(NoiselessError::NotNoiseless {
                cond1: check.cond1_residual,
                cond2: check.cond2_residual,
            });
        }
        noiseless.push(dec);
    }
    Ok(NsDiscovery {
        structure,
        noiseless,
        classical,
    })
}
