//! Unitarily noiseless subsystems: sectors on which a channel acts as
//! conjugation by a fixed unitary `U`, so that `U†(·)U` corrects them.

use crate::algebra::{commutant_of, decompose_structure, AlgebraBasis, BlockStructure};
use crate::channel::QuantumChannel;
use crate::correction::triple_deviation;
use crate::error::UnsError;
use crate::matkit::{ComplexMatrix, Tolerance};
use crate::noiseless::SubsystemDecomposition;

#[derive(Clone, Debug)]
pub struct UNSReport {
    /// `{U†E_a}′`
    pub algebra: AlgebraBasis,
    pub structure: BlockStructure,
    /// `max ‖ℰ(σ) − UσU†‖_F` over the algebra basis.
    pub evolve_residual: f64,
}

impl UNSReport {
    /// One decomposition per block of the algebra, with `H^B` the factor on
    /// which the algebra acts fully.
    pub fn sectors(&self) -> Vec<SubsystemDecomposition> {
        self.structure
            .blocks
            .iter()
            .map(SubsystemDecomposition::from_block_commutant)
            .collect()
    }
}

fn check_unitary(ch: &QuantumChannel, u: &ComplexMatrix, tol: &Tolerance) -> Result<(), UnsError> {
    if u.shape() != (ch.dim(), ch.dim()) {
        return Err(UnsError::Shape {
            shape: u.shape(),
            dim: ch.dim(),
        });
    }
    let residual = u.unitarity_residual();
    if residual > tol.atol {
        return Err(UnsError::NotUnitary { residual });
    }
    Ok(())
}

/// The algebra `{U†E_a}′` of a unital channel with its block structure.
pub fn uns_algebra(
    ch: &QuantumChannel,
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<UNSReport, UnsError> {
    uns_algebra_seeded(ch, u, tol, 0)
}

pub fn uns_algebra_seeded(
    ch: &QuantumChannel,
    u: &ComplexMatrix,
    tol: &Tolerance,
    seed: u64,
) -> Result<UNSReport, UnsError> {
    check_unitary(ch, u, tol)?;
    let report = ch.report(tol);
    if !report.unital {
        return Err(UnsError::NotUnital {
            residual: report.unital_residual,
        });
    }
    let ops: Vec<ComplexMatrix> = ch.kraus().iter().map(|e| u.adjoint_mul(e)).collect();
    let algebra = commutant_of(&ops, tol)?;
    let structure = decompose_structure(&algebra, tol, seed)?;
    let mut evolve_residual: f64 = 0.0;
    for sigma in algebra.basis() {
        let out = ch.apply(sigma)?;
        let want = &(u * sigma) * &u.adjoint();
        evolve_residual = evolve_residual.max(out.distance(&want));
    }
    Ok(UNSReport {
        algebra,
        structure,
        evolve_residual,
    })
}

/// `max` deviation of `Tr_A ∘ 𝒫_𝔄 ∘ 𝒰⁻¹ ∘ ℰ` from `Tr_A` on `𝔄`.
pub fn uns_deviation(
    ch: &QuantumChannel,
    dec: &SubsystemDecomposition,
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<f64, UnsError> {
    check_unitary(ch, u, tol)?;
    let inverse = QuantumChannel::with_tolerance(vec![u.adjoint()], tol)?;
    Ok(triple_deviation(&inverse, ch, dec)?)
}

/// Whether `H^B` is corrected by `U†(·)U`; applies to non-unital channels.
pub fn verify_uns(
    ch: &QuantumChannel,
    dec: &SubsystemDecomposition,
    u: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<bool, UnsError> {
    Ok(uns_deviation(ch, dec, u, tol)? <= tol.atol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correction::verify_correctable_triple;
    use crate::noiseless::{fixed_points, verify_ns_semantic};
    use crate::random;
    use crate::space::OperatorSpace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn identity_unitary_gives_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(60);
        let ch = random::unital_channel(3, 2, &mut rng);
        let r = uns_algebra(&ch, &ComplexMatrix::identity(3), &tol()).unwrap();
        let fix = fixed_points(&ch, &tol());
        assert!(OperatorSpace::span_distance(r.algebra.space(), &fix) < 1e-8);
        assert!(r.evolve_residual < 1e-10);
    }

    #[test]
    fn generic_unitary_leaves_scalars_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let ch = random::unital_channel(3, 2, &mut rng);
        let u = random::unitary(3, &mut rng);
        let r = uns_algebra(&ch, &u, &tol()).unwrap();
        assert_eq!(r.algebra.dim(), 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        let ch = random::channel(2, 2, &mut rng);
        assert!(matches!(
            uns_algebra(&ch, &ComplexMatrix::identity(2), &tol()),
            Err(UnsError::NotUnital { .. })
        ));
        assert!(matches!(
            uns_algebra(&ch, &ComplexMatrix::identity(2).scale_real(2.0), &tol()),
            Err(UnsError::NotUnitary { .. })
        ));
        assert!(matches!(
            uns_algebra(&ch, &ComplexMatrix::identity(3), &tol()),
            Err(UnsError::Shape { .. })
        ));
    }

    #[test]
    fn unitary_channel_is_undone_by_its_own_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        let v = random::unitary(4, &mut rng);
        let ch = QuantumChannel::unitary(v.clone(), &tol()).unwrap();
        let w = random::isometry(4, 2, &mut rng);
        let dec = SubsystemDecomposition::new(1, 2, w, &tol()).unwrap();
        assert!(verify_uns(&ch, &dec, &v, &tol()).unwrap());
    }

    #[test]
    fn agrees_with_noiseless_and_correctable_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(64);
        let id = ComplexMatrix::identity(4);
        for _ in 0..20 {
            let ch = random::channel(4, 2, &mut rng);
            let dec = SubsystemDecomposition::new(2, 2, random::unitary(4, &mut rng), &tol()).unwrap();
            let u_is_id = verify_uns(&ch, &dec, &id, &tol()).unwrap();
            assert_eq!(u_is_id, verify_ns_semantic(&ch, &dec, &tol()).unwrap().noiseless);
            let u = random::unitary(4, &mut rng);
            let r = QuantumChannel::unitary(u.adjoint(), &tol()).unwrap();
            assert_eq!(
                verify_uns(&ch, &dec, &u, &tol()).unwrap(),
                verify_correctable_triple(&r, &ch, &dec, &tol()).unwrap()
            );
        }
    }
}
