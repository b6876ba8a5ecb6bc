//! Quantum channels in operator-sum form.

use crate::error::ChannelError;
use crate::matkit::{ComplexMatrix, Tolerance, C64};

/// A trace-preserving map `σ ↦ Σ_a E_a σ E_a†` on `d × d` operators.
#[derive(Clone, Debug)]
pub struct QuantumChannel {
    dim: usize,
    kraus: Vec<ComplexMatrix>,
}

/// Trace-preservation and unitality diagnostics for a Kraus list.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelReport {
    pub dim: usize,
    pub kraus_count: usize,
    pub trace_preserving: bool,
    /// `‖Σ E_a†E_a − I‖_F`
    pub tp_residual: f64,
    pub unital: bool,
    /// `‖Σ E_a E_a† − I‖_F`
    pub unital_residual: f64,
}

fn check_shapes(kraus: &[ComplexMatrix]) -> Result<usize, ChannelError> {
    let first = kraus.first().ok_or(ChannelError::Empty)?;
    let dim = first.rows();
    for (index, k) in kraus.iter().enumerate() {
        if k.shape() != (dim, dim) {
            return Err(ChannelError::Ragged {
                index,
                shape: k.shape(),
                dim,
            });
        }
    }
    Ok(dim)
}

/// `‖Σ_a E_a†E_a − I‖_F` for any (possibly rectangular) Kraus list.
pub fn tp_residual(kraus: &[ComplexMatrix]) -> f64 {
    let Some(first) = kraus.first() else {
        return f64::INFINITY;
    };
    let mut acc = ComplexMatrix::zeros(first.cols(), first.cols());
    for k in kraus {
        acc += &k.adjoint_mul(k);
    }
    acc.distance(&ComplexMatrix::identity(first.cols()))
}

fn unital_residual(kraus: &[ComplexMatrix]) -> f64 {
    let d = kraus[0].rows();
    let mut acc = ComplexMatrix::zeros(d, d);
    for k in kraus {
        acc += &(k * &k.adjoint());
    }
    acc.distance(&ComplexMatrix::identity(d))
}

/// Checks a Kraus list for trace preservation and unitality.
///
/// Structural problems (empty list, ragged shapes) are errors; a failed
/// trace-preservation check is reported in the returned flags.
pub fn validate(kraus: &[ComplexMatrix], tol: &Tolerance) -> Result<ChannelReport, ChannelError> {
    let dim = check_shapes(kraus)?;
    let tp = tp_residual(kraus);
    let un = unital_residual(kraus);
    Ok(ChannelReport {
        dim,
        kraus_count: kraus.len(),
        trace_preserving: tp <= tol.atol,
        tp_residual: tp,
        unital: un <= tol.atol,
        unital_residual: un,
    })
}

/// `Σ_a K_a σ K_a†` for an arbitrary Kraus list (no trace-preservation
/// requirement, rectangular operators allowed).
pub fn apply_kraus(kraus: &[ComplexMatrix], sigma: &ComplexMatrix) -> ComplexMatrix {
    let rows = kraus.first().map_or(0, |k| k.rows());
    let mut out = ComplexMatrix::zeros(rows, rows);
    for k in kraus {
        out += &(&(k * sigma) * &k.adjoint());
    }
    out
}

impl QuantumChannel {
    /// Builds a channel, checking trace preservation at the default tolerance.
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self, ChannelError> {
        Self::with_tolerance(kraus, &Tolerance::default())
    }

    pub fn with_tolerance(kraus: Vec<ComplexMatrix>, tol: &Tolerance) -> Result<Self, ChannelError> {
        let report = validate(&kraus, tol)?;
        if !report.trace_preserving {
            return Err(ChannelError::NotTracePreserving {
                residual: report.tp_residual,
            });
        }
        Ok(Self {
            dim: report.dim,
            kraus,
        })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kraus: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// Conjugation `σ ↦ U σ U†`.
    pub fn unitary(u: ComplexMatrix, tol: &Tolerance) -> Result<Self, ChannelError> {
        Self::with_tolerance(vec![u], tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<ComplexMatrix> {
        self.kraus
    }

    pub fn report(&self, tol: &Tolerance) -> ChannelReport {
        validate(&self.kraus, tol).expect("a constructed channel has consistent shapes")
    }

    pub fn is_unital(&self, tol: &Tolerance) -> bool {
        self.report(tol).unital
    }

    fn check_operand(&self, sigma: &ComplexMatrix) -> Result<(), ChannelError> {
        if sigma.shape() != (self.dim, self.dim) {
            return Err(ChannelError::OperandShape {
                shape: sigma.shape(),
                dim: self.dim,
            });
        }
        Ok(())
    }

    pub fn apply(&self, sigma: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        self.check_operand(sigma)?;
        Ok(apply_kraus(&self.kraus, sigma))
    }

    /// Heisenberg-picture dual `X ↦ Σ_a E_a† X E_a`, returned as the
    /// Kraus-adjoint map. It is unital because the channel is trace
    /// preserving; it is trace preserving only when the channel is unital.
    pub fn dual_kraus(&self) -> Vec<ComplexMatrix> {
        self.kraus.iter().map(ComplexMatrix::adjoint).collect()
    }

    pub fn apply_dual(&self, x: &ComplexMatrix) -> Result<ComplexMatrix, ChannelError> {
        self.check_operand(x)?;
        Ok(apply_kraus(&self.dual_kraus(), x))
    }

    /// Channel `outer ∘ inner` with Kraus operators `{R_b E_a}`.
    pub fn compose(outer: &Self, inner: &Self) -> Result<Self, ChannelError> {
        if outer.dim != inner.dim {
            return Err(ChannelError::DimensionMismatch(outer.dim, inner.dim));
        }
        let kraus = outer
            .kraus
            .iter()
            .flat_map(|r| inner.kraus.iter().map(move |e| r * e))
            .collect();
        Ok(Self {
            dim: outer.dim,
            kraus,
        })
    }

    /// Kraus remixing `F_a = Σ_b u_ab E_b` by a unitary `u`. Rows of `u`
    /// beyond the Kraus count are treated as zero operators (padding).
    pub fn remix(&self, u: &ComplexMatrix) -> Self {
        let k = u.rows();
        assert!(u.cols() >= self.kraus.len(), "remix matrix too narrow");
        let kraus = (0..k)
            .map(|a| {
                let mut f = ComplexMatrix::zeros(self.dim, self.dim);
                for (b, e) in self.kraus.iter().enumerate() {
                    f += &e.scale(u[(a, b)]);
                }
                f
            })
            .collect();
        Self {
            dim: self.dim,
            kraus,
        }
    }

    /// Transfer matrix on row-major vectorized operators:
    /// `vec(ℰ(σ)) = S · vec(σ)` with `S = Σ_a E_a ⊗ conj(E_a)`.
    pub fn superoperator(&self) -> ComplexMatrix {
        let n = self.dim * self.dim;
        let mut s = ComplexMatrix::zeros(n, n);
        for e in &self.kraus {
            s += &e.tensor(&e.conj());
        }
        s
    }

    /// Unnormalized system-first Choi matrix `J = Σ_ij |i⟩⟨j| ⊗ ℰ(|i⟩⟨j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut j = ComplexMatrix::zeros(d * d, d * d);
        for e in &self.kraus {
            // |E⟩⟩ = Σ_i |i⟩ ⊗ E|i⟩
            let w: Vec<C64> = (0..d * d).map(|idx| e[(idx % d, idx / d)]).collect();
            j += &ComplexMatrix::outer(&w, &w);
        }
        j
    }

    /// Minimal Kraus representation from a Choi matrix.
    ///
    /// Eigenvalues at or below `rank_rtol·λ_max` are discarded.
    pub fn from_choi(j: &ComplexMatrix, dim: usize, tol: &Tolerance) -> Result<Self, ChannelError> {
        let n = dim * dim;
        if j.shape() != (n, n) {
            return Err(ChannelError::ChoiShape {
                shape: j.shape(),
                expected: n,
            });
        }
        let eig = j.eig_hermitian(tol)?;
        let lmax = eig.values.last().copied().unwrap_or(0.0);
        let lmin = eig.values.first().copied().unwrap_or(0.0);
        if lmin < -tol.scaled(j.frobenius_norm()) {
            return Err(ChannelError::NotPositive {
                min_eigenvalue: lmin,
            });
        }
        let cut = tol.rank_rtol * lmax;
        let mut kraus = Vec::new();
        for (k, &lambda) in eig.values.iter().enumerate().rev() {
            if lambda <= cut || lambda <= 0.0 {
                continue;
            }
            let s = lambda.sqrt();
            kraus.push(ComplexMatrix::from_fn(dim, dim, |r, i| {
                eig.vectors[(i * dim + r, k)] * s
            }));
        }
        if kraus.is_empty() {
            kraus.push(ComplexMatrix::zeros(dim, dim));
        }
        Self::with_tolerance(kraus, tol)
    }

    /// Frobenius norm of the Choi-matrix difference.
    pub fn distance(a: &Self, b: &Self) -> Result<f64, ChannelError> {
        if a.dim != b.dim {
            return Err(ChannelError::DimensionMismatch(a.dim, b.dim));
        }
        Ok(a.choi().distance(&b.choi()))
    }
}

/// Choi matrix of an arbitrary linear map on `d × d` operators, built by
/// evaluating the map on the matrix units `|i⟩⟨j|`.
pub fn choi_of_map(dim: usize, map: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> ComplexMatrix {
    let mut j = ComplexMatrix::zeros(dim * dim, dim * dim);
    for i in 0..dim {
        for k in 0..dim {
            let out = map(&ComplexMatrix::ket_bra(dim, i, k));
            for r in 0..dim {
                for c in 0..dim {
                    j[(i * dim + r, k * dim + c)] = out[(r, c)];
                }
            }
        }
    }
    j
}

/// Choi matrix of a map restricted to inputs from the span of the orthonormal
/// columns of `basis`: `Σ_ij |i⟩⟨j| ⊗ ℰ(|v_i⟩⟨v_j|)`.
pub fn restricted_choi(
    basis: &ComplexMatrix,
    map: impl Fn(&ComplexMatrix) -> ComplexMatrix,
) -> ComplexMatrix {
    let d = basis.rows();
    let k = basis.cols();
    let mut j = ComplexMatrix::zeros(k * d, k * d);
    let cols = basis.columns();
    for i in 0..k {
        for l in 0..k {
            let out = map(&ComplexMatrix::outer(&cols[i], &cols[l]));
            for r in 0..d {
                for c in 0..d {
                    j[(i * d + r, l * d + c)] = out[(r, c)];
                }
            }
        }
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_channel_report() {
        let r = validate(&[ComplexMatrix::identity(2)], &tol()).unwrap();
        assert!(r.trace_preserving && r.unital);
        assert_eq!(r.kraus_count, 1);
    }

    #[test]
    fn structural_errors() {
        assert_eq!(validate(&[], &tol()), Err(ChannelError::Empty));
        let ragged = [ComplexMatrix::identity(2), ComplexMatrix::identity(3)];
        assert!(matches!(
            validate(&ragged, &tol()),
            Err(ChannelError::Ragged { index: 1, .. })
        ));
        let bad = vec![ComplexMatrix::identity(2).scale_real(2.0)];
        match QuantumChannel::new(bad) {
            Err(ChannelError::NotTracePreserving { residual }) => {
                assert!((residual - 3.0 * 2f64.sqrt()).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn apply_checks_shape() {
        let ch = QuantumChannel::identity(2);
        assert!(ch.apply(&ComplexMatrix::identity(3)).is_err());
        let sigma = ComplexMatrix::from_real_rows(&[&[0.3, 0.1], &[0.1, 0.7]]);
        assert_eq!(ch.apply(&sigma).unwrap(), sigma);
    }

    #[test]
    fn apply_preserves_trace_and_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for trial in 0..30 {
            let d = 2 + trial % 4;
            let ch = random::channel(d, 1 + trial % 3, &mut rng);
            let rho = random::density(d, &mut rng);
            let out = ch.apply(&rho).unwrap();
            assert!((out.trace() - rho.trace()).norm() <= 1e-10 * d as f64);
            let eig = out.eig_hermitian(&tol()).unwrap();
            assert!(eig.values[0] >= -1e-9);
        }
    }

    #[test]
    fn remix_leaves_action_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ch = random::channel(3, 3, &mut rng);
        let u = random::remix(3, &mut rng);
        let remixed = ch.remix(&u);
        let sigma = random::ginibre(3, 3, &mut rng);
        let a = ch.apply(&sigma).unwrap();
        let b = remixed.apply(&sigma).unwrap();
        assert!(a.distance(&b) < 1e-10);
        assert!(QuantumChannel::distance(&ch, &remixed).unwrap() < 1e-10);
    }

    #[test]
    fn compose_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ch = random::channel(3, 2, &mut rng);
        let id = QuantumChannel::identity(3);
        let c = QuantumChannel::compose(&id, &ch).unwrap();
        assert!(QuantumChannel::distance(&c, &ch).unwrap() < 1e-10);

        let u = random::unitary(3, &mut rng);
        let fwd = QuantumChannel::unitary(u.clone(), &tol()).unwrap();
        let back = QuantumChannel::unitary(u.adjoint(), &tol()).unwrap();
        let c = QuantumChannel::compose(&back, &fwd).unwrap();
        assert!(QuantumChannel::distance(&c, &id).unwrap() < 1e-10);

        let other = random::channel(3, 3, &mut rng);
        let c = QuantumChannel::compose(&other, &ch).unwrap();
        let direct = choi_of_map(3, |x| other.apply(&ch.apply(x).unwrap()).unwrap());
        assert!(c.choi().distance(&direct) < 1e-10);

        assert!(QuantumChannel::compose(&QuantumChannel::identity(2), &ch).is_err());
    }

    #[test]
    fn choi_matches_definition_and_is_psd() {
        let id = QuantumChannel::identity(2);
        let j = id.choi();
        assert_eq!(j.rank(&tol()), 1);
        assert!((j.trace().re - 2.0).abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..100 {
            let d = 2 + trial % 3;
            let ch = random::channel(d, 1 + trial % 4, &mut rng);
            let j = ch.choi();
            let direct = choi_of_map(d, |x| ch.apply(x).unwrap());
            assert!(j.distance(&direct) < 1e-12);
            let eig = j.eig_hermitian(&tol()).unwrap();
            assert!(eig.values[0] > -1e-10);
            // trace preservation ⇔ Tr_B J = I
            let marginal = j.partial_trace_b(d, d).unwrap();
            assert!(marginal.distance(&ComplexMatrix::identity(d)) < 1e-10);
        }
    }

    #[test]
    fn choi_round_trip_and_minimal_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..20 {
            let ch = random::channel(3, 2, &mut rng);
            let back = QuantumChannel::from_choi(&ch.choi(), 3, &tol()).unwrap();
            assert!(QuantumChannel::distance(&ch, &back).unwrap() < 1e-9);
        }
        let id = QuantumChannel::from_choi(&QuantumChannel::identity(2).choi(), 2, &tol()).unwrap();
        assert_eq!(id.kraus().len(), 1);
        let k = &id.kraus()[0];
        let phase = k[(0, 0)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!(k.distance(&ComplexMatrix::identity(2).scale(phase)) < 1e-12);

        // mixtures of r generic unitaries have Choi rank r
        for r in 1..=4 {
            let ch = random::unital_channel(3, r, &mut rng);
            assert_eq!(ch.choi().rank(&tol()), r);
            let back = QuantumChannel::from_choi(&ch.choi(), 3, &tol()).unwrap();
            assert_eq!(back.kraus().len(), r);
        }
    }

    #[test]
    fn from_choi_rejects_negative() {
        let mut j = QuantumChannel::identity(2).choi();
        j[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(matches!(
            QuantumChannel::from_choi(&j, 2, &tol()),
            Err(ChannelError::NotPositive { .. })
        ));
    }

    #[test]
    fn distance_detects_difference() {
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let zc = QuantumChannel::unitary(z, &tol()).unwrap();
        let id = QuantumChannel::identity(2);
        assert!(QuantumChannel::distance(&id, &zc).unwrap() > 1.0);
        assert_eq!(QuantumChannel::distance(&id, &id).unwrap(), 0.0);
        assert!(QuantumChannel::distance(&id, &QuantumChannel::identity(3)).is_err());
    }

    #[test]
    fn superoperator_matches_apply() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let ch = random::channel(3, 2, &mut rng);
        let sigma = random::ginibre(3, 3, &mut rng);
        let s = ch.superoperator();
        let v = sigma.to_vector();
        let out: Vec<C64> = (0..9)
            .map(|i| (0..9).map(|j| s[(i, j)] * v[j]).sum())
            .collect();
        let direct = ch.apply(&sigma).unwrap();
        assert!(ComplexMatrix::from_vector(3, 3, &out).distance(&direct) < 1e-12);
    }

    #[test]
    fn dual_is_unital_for_tp_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let ch = random::channel(3, 2, &mut rng);
        let out = ch.apply_dual(&ComplexMatrix::identity(3)).unwrap();
        assert!(out.distance(&ComplexMatrix::identity(3)) < 1e-12);
        // Tr(ℰ(σ) X) = Tr(σ ℰ*(X))
        let sigma = random::ginibre(3, 3, &mut rng);
        let x = random::ginibre(3, 3, &mut rng);
        let lhs = (&ch.apply(&sigma).unwrap() * &x).trace();
        let rhs = (&sigma * &ch.apply_dual(&x).unwrap()).trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
