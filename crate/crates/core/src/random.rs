//! Seeded random ensembles used by the property suites, the examples and the
//! randomized block splitting.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::channel::QuantumChannel;
use crate::matkit::{ComplexMatrix, Tolerance, C64};
use crate::noiseless::SubsystemDecomposition;

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(dim, dim, rng).hermitian_part()
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase of `R` fixed).
pub fn unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    isometry(dim, dim, rng)
}

/// Random `rows × cols` matrix with orthonormal columns, `cols ≤ rows`.
pub fn isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    assert!(cols <= rows, "isometry needs cols <= rows");
    let g = ginibre(rows, cols, rng).into_nalgebra();
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q[(i, j)] * phase
    })
}

/// Random density matrix (trace one, positive semidefinite).
pub fn density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let rho = &g * &g.adjoint();
    let t = rho.trace().re;
    rho.scale_real(1.0 / t)
}

/// Random channel with `kraus_count` operators, cut from a random isometry
/// `C^d → C^(d·k)`.
pub fn channel<R: Rng + ?Sized>(dim: usize, kraus_count: usize, rng: &mut R) -> QuantumChannel {
    let v = isometry(dim * kraus_count, dim, rng);
    let kraus = (0..kraus_count)
        .map(|a| ComplexMatrix::from_fn(dim, dim, |i, j| v[(a * dim + i, j)]))
        .collect();
    QuantumChannel::new(kraus).expect("isometry blocks are trace preserving")
}

/// Random unital channel: a mixture of `count` random unitaries with random
/// weights.
pub fn unital_channel<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> QuantumChannel {
    let weights: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let kraus = weights
        .iter()
        .map(|w| unitary(dim, rng).scale_real((w / total).sqrt()))
        .collect();
    QuantumChannel::new(kraus).expect("unitary mixture is trace preserving")
}

/// Random Kraus remixing matrix: a `count × count` unitary.
pub fn remix<R: Rng + ?Sized>(count: usize, rng: &mut R) -> ComplexMatrix {
    unitary(count, rng)
}

/// Random `(m, n)` decomposition of `C^dim` with a Haar-random isometry.
pub fn decomposition<R: Rng + ?Sized>(
    dim: usize,
    m: usize,
    n: usize,
    rng: &mut R,
) -> SubsystemDecomposition {
    SubsystemDecomposition::new(m, n, isometry(dim, m * n, rng), &Tolerance::default())
        .expect("random isometry is valid")
}

/// A channel for which `dec` is correctable.
///
/// On the code the Kraus operators act as `E_a W = V (M_a ⊗ 1_n)` for an
/// isometry `V : C^r ⊗ C^n → C^d` and a random isometry stacked from the
/// `r × m` blocks `M_a`; on the complement they are completed to a random
/// Stinespring isometry. `dim ≥ r·n` is required.
pub fn correctable_channel<R: Rng + ?Sized>(
    dec: &SubsystemDecomposition,
    r: usize,
    kraus_count: usize,
    rng: &mut R,
) -> QuantumChannel {
    assert!(r * dec.n() <= dec.dim(), "infeasible sizes");
    let v = isometry(dec.dim(), r * dec.n(), rng);
    code_channel(dec, &v, r, kraus_count, rng)
}

/// A channel for which `H^B` of `dec` is noiseless: `E_a W = W (M_a ⊗ 1_n)`.
pub fn noiseless_channel<R: Rng + ?Sized>(
    dec: &SubsystemDecomposition,
    kraus_count: usize,
    rng: &mut R,
) -> QuantumChannel {
    code_channel(dec, &dec.isometry().clone(), dec.m(), kraus_count, rng)
}

fn code_channel<R: Rng + ?Sized>(
    dec: &SubsystemDecomposition,
    v: &ComplexMatrix,
    r: usize,
    kraus_count: usize,
    rng: &mut R,
) -> QuantumChannel {
    let (d, m, n) = (dec.dim(), dec.m(), dec.n());
    assert!(kraus_count * r >= m, "infeasible sizes");
    let stacked = isometry(kraus_count * r, m, rng);
    let id_n = ComplexMatrix::identity(n);
    // T W, the Stinespring isometry restricted to the code
    let blocks: Vec<ComplexMatrix> = (0..kraus_count)
        .map(|a| {
            let ma = ComplexMatrix::from_fn(r, m, |i, j| stacked[(a * r + i, j)]);
            v * &ma.tensor(&id_n)
        })
        .collect();
    let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
    let tw = ComplexMatrix::vcat(&refs);
    // columns for the complement, orthogonal to the range of T W
    let extra = d - m * n;
    let g = ginibre(kraus_count * d, extra, rng);
    let g = &g - &(&tw * &tw.adjoint_mul(&g));
    let tperp = g.range_basis(&Tolerance::default());
    assert_eq!(tperp.cols(), extra, "complement completion is rank deficient");
    let wperp = (&ComplexMatrix::identity(d) - &dec.projector()).range_basis(&Tolerance::default());
    let t = &(&tw * &dec.isometry().adjoint()) + &(&tperp * &wperp.adjoint());
    let kraus = (0..kraus_count)
        .map(|a| ComplexMatrix::from_fn(d, d, |i, j| t[(a * d + i, j)]))
        .collect();
    QuantumChannel::new(kraus).expect("Stinespring blocks are trace preserving")
}

/// Random correctable instance with `m, n ≤ 3` and `dim ≤ 12`.
pub fn correctable_instance<R: Rng + ?Sized>(rng: &mut R) -> (QuantumChannel, SubsystemDecomposition) {
    let m: usize = rng.random_range(1..=3);
    let n: usize = rng.random_range(1..=3);
    let dim = rng.random_range(m * n..=12);
    let r = rng.random_range(1..=dim / n);
    let base = m.div_ceil(r);
    let kraus_count = rng.random_range(base..=base + 2);
    let dec = decomposition(dim, m, n, rng);
    (correctable_channel(&dec, r, kraus_count, rng), dec)
}

/// Unital channel whose interaction algebra is contained in a randomly
/// rotated `⊕_J M_{m_J} ⊗ 1_{n_J}`: a mixture of unitaries
/// `Q (⊕_J V_{iJ} ⊗ 1_{n_J}) Q†`.
pub fn block_unital_channel<R: Rng + ?Sized>(
    blocks: &[(usize, usize)],
    count: usize,
    rng: &mut R,
) -> QuantumChannel {
    let d: usize = blocks.iter().map(|(m, n)| m * n).sum();
    let q = unitary(d, rng);
    let weights: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let kraus = weights
        .iter()
        .map(|w| {
            let mut u = ComplexMatrix::zeros(d, d);
            let mut off = 0;
            for &(m, n) in blocks {
                let local = unitary(m, rng).tensor(&ComplexMatrix::identity(n));
                for i in 0..m * n {
                    for j in 0..m * n {
                        u[(off + i, off + j)] = local[(i, j)];
                    }
                }
                off += m * n;
            }
            (&(&q * &u) * &q.adjoint()).scale_real((w / total).sqrt())
        })
        .collect();
    QuantumChannel::new(kraus).expect("unitary mixture is trace preserving")
}
