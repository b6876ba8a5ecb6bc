//! Finite-dimensional †-algebras: generation, commutants, centers and the
//! block decomposition `A ≅ ⊕_J (M_{m_J} ⊗ 1_{n_J})` with explicit matrix units.
//!
//! Blocks are found by randomized spectral splitting. A generic self-adjoint
//! element of the center separates the minimal central projections; inside
//! each central summand a generic self-adjoint element of the algebra has `m`
//! distinct eigenvalues of multiplicity `n`, whose spectral projections are a
//! maximal family of minimal projections. Off-diagonal matrix units come from
//! the polar parts of `p_11 · a · p_kk` for a generic `a`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::AlgebraError;
use crate::matkit::{ComplexMatrix, Tolerance, C64};
use crate::random;
use crate::space::OperatorSpace;

/// Relative eigenvalue gap below which two eigenvalues of a random probe are
/// treated as accidentally degenerate.
pub const DEGENERACY_GAP: f64 = 1e-6;

/// Number of seeds tried by [`decompose_structure`] (the given seed and the
/// next four).
pub const SEED_ATTEMPTS: u64 = 5;

/// Orthonormal basis of an operator subspace together with its closure flags.
#[derive(Clone, Debug)]
pub struct AlgebraBasis {
    space: OperatorSpace,
    /// A †-closed generating set; commutants are computed against it.
    generators: Vec<ComplexMatrix>,
    pub selfadjoint_closed: bool,
    pub multiplicatively_closed: bool,
}

impl AlgebraBasis {
    /// Wraps an arbitrary operator space, computing the closure flags by
    /// brute force.
    pub fn from_space(space: OperatorSpace, tol: &Tolerance) -> Self {
        let selfadjoint_closed = space
            .basis()
            .iter()
            .all(|b| space.contains(&b.adjoint(), tol));
        let multiplicatively_closed = products_in_span(&space, space.basis(), tol);
        let generators = space.basis().to_vec();
        Self {
            space,
            generators,
            selfadjoint_closed,
            multiplicatively_closed,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        self.space.basis()
    }

    pub fn space(&self) -> &OperatorSpace {
        &self.space
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: &Tolerance) -> bool {
        self.space.contains(x, tol)
    }

    pub fn is_unital(&self, tol: &Tolerance) -> bool {
        self.contains(&ComplexMatrix::identity(self.ambient_dim()), tol)
    }

    /// A random element `Σ_i g_i b_i` with complex Gaussian coefficients.
    fn random_element(&self, rng: &mut ChaCha8Rng) -> ComplexMatrix {
        let d = self.ambient_dim();
        let mut x = ComplexMatrix::zeros(d, d);
        for b in self.basis() {
            x += &b.scale(random::gaussian(rng));
        }
        x
    }
}

/// Whether `x·y` lies in the span for every basis element `x` and every `y`
/// in `right`.
fn products_in_span(space: &OperatorSpace, right: &[ComplexMatrix], tol: &Tolerance) -> bool {
    let basis = space.basis();
    if basis.is_empty() {
        return true;
    }
    let q = space.as_columns();
    let d = space.ambient_dim();
    for x in basis {
        let prods: Vec<ComplexMatrix> = right.iter().map(|y| x * y).collect();
        let cols: Vec<Vec<C64>> = prods.iter().map(ComplexMatrix::to_vector).collect();
        let p = ComplexMatrix::from_columns(d * d, &cols);
        let resid = &p - &(&q * &q.adjoint_mul(&p));
        for (j, prod) in prods.iter().enumerate() {
            let r: f64 = (0..d * d)
                .map(|i| resid[(i, j)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if r > tol.scaled(prod.frobenius_norm()) {
                return false;
            }
        }
    }
    true
}

/// The unital †-algebra generated by `generators`.
///
/// Starts from the identity and repeatedly multiplies new basis elements on
/// the left by the generators and their adjoints until the span stops
/// growing; the algebra is the span of all such words.
pub fn generate_algebra(
    generators: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<AlgebraBasis, AlgebraError> {
    let d = match generators.first() {
        Some(g) => g.rows(),
        None => return Err(AlgebraError::Generators),
    };
    if generators.iter().any(|g| g.shape() != (d, d)) {
        return Err(AlgebraError::Generators);
    }
    let mut gens: Vec<ComplexMatrix> = Vec::with_capacity(2 * generators.len());
    for g in generators {
        gens.push(g.clone());
        if !g.is_hermitian(tol) {
            gens.push(g.adjoint());
        }
    }
    let mut space = OperatorSpace::empty(d);
    space.try_extend(&ComplexMatrix::identity(d), tol);
    let mut next = 0;
    while next < space.dim() {
        let x = space.basis()[next].clone();
        for g in &gens {
            space.try_extend(&(g * &x), tol);
        }
        next += 1;
    }
    let selfadjoint_closed = gens.iter().all(|g| space.contains(&g.adjoint(), tol));
    // The span of words is closed under products once it is closed under
    // right multiplication by each generator.
    let multiplicatively_closed = products_in_span(&space, &gens, tol);
    Ok(AlgebraBasis {
        space,
        generators: gens,
        selfadjoint_closed,
        multiplicatively_closed,
    })
}

/// `{X : XG = GX for every generator G}` of a self-adjoint closed algebra.
pub fn commutant(alg: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis, AlgebraError> {
    if !alg.selfadjoint_closed {
        return Err(AlgebraError::NotClosed("adjoints"));
    }
    let space = OperatorSpace::commuting_with(alg.ambient_dim(), alg.generators(), tol);
    Ok(AlgebraBasis::from_space(space, tol))
}

/// Commutant of an arbitrary operator set, made †-closed first.
pub fn commutant_of(
    ops: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<AlgebraBasis, AlgebraError> {
    let d = ops.first().ok_or(AlgebraError::Generators)?.rows();
    if ops.iter().any(|g| g.shape() != (d, d)) {
        return Err(AlgebraError::Generators);
    }
    let mut gens = ops.to_vec();
    gens.extend(ops.iter().map(ComplexMatrix::adjoint));
    let space = OperatorSpace::commuting_with(d, &gens, tol);
    Ok(AlgebraBasis::from_space(space, tol))
}

/// `A ∩ A′`.
pub fn center(alg: &AlgebraBasis, tol: &Tolerance) -> Result<AlgebraBasis, AlgebraError> {
    if !(alg.selfadjoint_closed && alg.multiplicatively_closed) {
        return Err(AlgebraError::NotClosed("products and adjoints"));
    }
    let comm = commutant(alg, tol)?;
    let meet = OperatorSpace::intersection(alg.space(), comm.space(), tol);
    Ok(AlgebraBasis::from_space(meet, tol))
}

/// One summand `M_m ⊗ 1_n` of a block decomposition.
#[derive(Clone, Debug)]
pub struct Block {
    pub m: usize,
    pub n: usize,
    /// `d × (m·n)` isometry; column `k·n + l` (zero-based) is `|α_k⟩ ⊗ |β_l⟩`.
    pub isometry: ComplexMatrix,
    /// `matrix_units[k][l] = P_kl = |α_k⟩⟨α_l| ⊗ 1_n`, embedded in `C^d`.
    pub matrix_units: Vec<Vec<ComplexMatrix>>,
}

impl Block {
    /// `Σ_k P_kk`.
    pub fn projector(&self) -> ComplexMatrix {
        self.isometry.range_projector()
    }

    /// Isometry with the two tensor factors swapped: column `l·m + k` is
    /// `|β_l⟩ ⊗ |α_k⟩`. This is the view in which the block's commutant
    /// `1_m ⊗ M_n` acts on the left factor.
    pub fn swapped_isometry(&self) -> ComplexMatrix {
        let (m, n) = (self.m, self.n);
        let order: Vec<usize> = (0..n)
            .flat_map(|l| (0..m).map(move |k| k * n + l))
            .collect();
        self.isometry.select_columns(&order)
    }
}

/// The decomposition `⊕_J (M_{m_J} ⊗ 1_{n_J}) ⊕ 0_K` of a †-algebra.
#[derive(Clone, Debug)]
pub struct BlockStructure {
    pub dim: usize,
    pub blocks: Vec<Block>,
    pub complement_dim: usize,
    /// Orthonormal basis of `K` as columns (`d × complement_dim`).
    pub complement: ComplexMatrix,
    /// Seed whose random probes produced this structure.
    pub seed: u64,
}

impl BlockStructure {
    pub fn dims(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().map(|b| (b.m, b.n)).collect()
    }

    /// Dimension multiset sorted for comparisons.
    pub fn sorted_dims(&self) -> Vec<(usize, usize)> {
        let mut v = self.dims();
        v.sort_unstable_by(|a, b| b.cmp(a));
        v
    }

    /// Largest violation of the matrix-unit identities over all blocks,
    /// plus `‖P_𝔄² − P_𝔄‖` and the rank condition.
    pub fn matrix_unit_residual(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| matrix_unit_residual(&b.matrix_units))
            .fold(0.0, f64::max)
    }

    /// Largest deviation of any basis element of `alg` from the block form:
    /// within each block it must be `X ⊗ 1_n`, across blocks (and on `K`)
    /// it must vanish.
    pub fn reconstruction_residual(&self, alg: &AlgebraBasis) -> f64 {
        let mut worst: f64 = 0.0;
        let frames: Vec<&ComplexMatrix> = self
            .blocks
            .iter()
            .map(|b| &b.isometry)
            .chain(std::iter::once(&self.complement))
            .collect();
        for x in alg.basis() {
            for (j, wj) in frames.iter().enumerate() {
                for (k, wk) in frames.iter().enumerate() {
                    if wj.cols() == 0 || wk.cols() == 0 {
                        continue;
                    }
                    let c = &wj.adjoint_mul(x) * *wk;
                    let r = if j == k && j < self.blocks.len() {
                        let b = &self.blocks[j];
                        let reduced = c
                            .partial_trace_b(b.m, b.n)
                            .expect("block coordinates are m·n square")
                            .scale_real(1.0 / b.n as f64);
                        c.distance(&reduced.tensor(&ComplexMatrix::identity(b.n)))
                    } else if j == k {
                        // the algebra acts on K only through the zero block
                        c.frobenius_norm()
                    } else {
                        c.frobenius_norm()
                    };
                    worst = worst.max(r);
                }
            }
        }
        worst
    }
}

/// Largest violation of `P_kl = P_kk P_kl P_ll`, `P_kl† = P_lk`,
/// `P_kl P_l′k′ = δ_{ll′} P_kk′` and of `Σ_k P_kk` being a projector.
pub fn matrix_unit_residual(units: &[Vec<ComplexMatrix>]) -> f64 {
    let m = units.len();
    if m == 0 {
        return 0.0;
    }
    let d = units[0][0].rows();
    let zero = ComplexMatrix::zeros(d, d);
    let mut worst: f64 = 0.0;
    for k in 0..m {
        for l in 0..m {
            let pkl = &units[k][l];
            worst = worst.max(pkl.distance(&(&(&units[k][k] * pkl) * &units[l][l])));
            worst = worst.max(pkl.adjoint().distance(&units[l][k]));
            for lp in 0..m {
                for kp in 0..m {
                    let prod = pkl * &units[lp][kp];
                    let want = if l == lp { &units[k][kp] } else { &zero };
                    worst = worst.max(prod.distance(want));
                }
            }
        }
    }
    let mut p = ComplexMatrix::zeros(d, d);
    for (k, row) in units.iter().enumerate() {
        p += &row[k];
    }
    worst.max(p.projector_residual())
}

/// `Γ(σ) = Σ_kl P_kl σ P_kl†` for one block's matrix units.
pub fn gamma_map(
    units: &[Vec<ComplexMatrix>],
    sigma: &ComplexMatrix,
) -> Result<ComplexMatrix, AlgebraError> {
    let m = units.len();
    if m == 0 || units.iter().any(|row| row.len() != m) {
        return Err(AlgebraError::MatrixUnits);
    }
    let d = units[0][0].rows();
    if units.iter().flatten().any(|p| p.shape() != (d, d)) {
        return Err(AlgebraError::MatrixUnits);
    }
    if sigma.shape() != (d, d) {
        return Err(AlgebraError::Shape {
            shape: sigma.shape(),
            dim: d,
        });
    }
    let mut out = ComplexMatrix::zeros(d, d);
    for row in units {
        for p in row {
            out += &(&(p * sigma) * &p.adjoint());
        }
    }
    Ok(out)
}

/// Block decomposition of a unital †-algebra, retrying seeds
/// `seed..seed + SEED_ATTEMPTS` on numerical degeneracy.
pub fn decompose_structure(
    alg: &AlgebraBasis,
    tol: &Tolerance,
    seed: u64,
) -> Result<BlockStructure, AlgebraError> {
    if !alg.selfadjoint_closed {
        return Err(AlgebraError::NotClosed("adjoints"));
    }
    if !alg.multiplicatively_closed {
        return Err(AlgebraError::NotClosed("products"));
    }
    if !alg.is_unital(tol) {
        return Err(AlgebraError::NotUnital);
    }
    let cent = center(alg, tol)?;
    let mut tried = Vec::new();
    let mut last = String::new();
    for s in seed..seed + SEED_ATTEMPTS {
        tried.push(s);
        match split_blocks(alg, &cent, tol, s) {
            Ok(bs) => return Ok(bs),
            Err(detail) => last = detail,
        }
    }
    Err(AlgebraError::Degenerate {
        detail: last,
        seeds: tried,
    })
}

fn split_blocks(
    alg: &AlgebraBasis,
    cent: &AlgebraBasis,
    tol: &Tolerance,
    seed: u64,
) -> Result<BlockStructure, String> {
    let d = alg.ambient_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cluster_gap = DEGENERACY_GAP * 1e-2;

    // minimal central projections
    let h = cent.random_element(&mut rng).hermitian_part();
    let eig = h.eig_hermitian(tol).map_err(|e| e.to_string())?;
    let clusters = eig.clusters(cluster_gap);
    if clusters.len() != cent.dim() {
        return Err(format!(
            "central probe has {} distinct eigenvalues, center has dimension {}",
            clusters.len(),
            cent.dim()
        ));
    }
    if eig.min_gap_between(&clusters) < DEGENERACY_GAP {
        return Err("central probe eigenvalue gap below threshold".into());
    }

    let probe = alg.random_element(&mut rng).hermitian_part();
    let linker = alg.random_element(&mut rng);
    let mut blocks = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let frame = eig.vectors.select_columns(cluster);
        blocks.push(split_central_summand(alg, &frame, &probe, &linker, tol)?);
    }

    let mut covered = ComplexMatrix::zeros(d, d);
    for b in &blocks {
        covered += &b.projector();
    }
    let rest = &ComplexMatrix::identity(d) - &covered;
    let rest_eig = rest.eig_hermitian(tol).map_err(|e| e.to_string())?;
    let kept: Vec<usize> = (0..d).filter(|&i| rest_eig.values[i] > 0.5).collect();
    let complement = rest_eig.vectors.select_columns(&kept);

    sort_blocks(&mut blocks);
    let bs = BlockStructure {
        dim: d,
        complement_dim: complement.cols(),
        complement,
        blocks,
        seed,
    };
    let total: usize = bs.blocks.iter().map(|b| b.m * b.n).sum::<usize>() + bs.complement_dim;
    if total != d {
        return Err(format!("block dimensions sum to {total}, expected {d}"));
    }
    let mu = bs.matrix_unit_residual();
    if mu > tol.atol {
        return Err(format!("matrix-unit residual {mu:.3e}"));
    }
    let rec = bs.reconstruction_residual(alg);
    if rec > tol.atol {
        return Err(format!("reconstruction residual {rec:.3e}"));
    }
    Ok(bs)
}

/// Splits one central summand (given by an orthonormal frame of its range)
/// into `M_m ⊗ 1_n` with matrix units.
fn split_central_summand(
    alg: &AlgebraBasis,
    frame: &ComplexMatrix,
    probe: &ComplexMatrix,
    linker: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<Block, String> {
    let r = frame.cols();
    let compress = |x: &ComplexMatrix| &frame.adjoint_mul(x) * frame;

    // dimension of the compressed algebra is m²
    let local = OperatorSpace::from_spanning(
        r,
        alg.basis().iter().map(compress).collect::<Vec<_>>().iter(),
        tol,
    );
    let m = (local.dim() as f64).sqrt().round() as usize;
    if m * m != local.dim() || m == 0 || !r.is_multiple_of(m) {
        return Err(format!(
            "central summand of rank {r} carries a {}-dimensional algebra",
            local.dim()
        ));
    }
    let n = r / m;

    let eig = compress(probe)
        .eig_hermitian(tol)
        .map_err(|e| e.to_string())?;
    let clusters = eig.clusters(DEGENERACY_GAP * 1e-2);
    if clusters.len() != m || clusters.iter().any(|c| c.len() != n) {
        return Err(format!(
            "probe spectrum in a rank-{r} summand splits as {:?}, expected {m} x {n}",
            clusters.iter().map(Vec::len).collect::<Vec<_>>()
        ));
    }
    if eig.min_gap_between(&clusters) < DEGENERACY_GAP {
        return Err("probe eigenvalue gap below threshold".into());
    }
    let minimal: Vec<ComplexMatrix> = clusters.iter().map(|c| eig.projector(c)).collect();

    // P_1k from the polar part of p_11 a p_kk
    let a = compress(linker);
    let mut first_row = Vec::with_capacity(m);
    first_row.push(minimal[0].clone());
    for pk in minimal.iter().skip(1) {
        let x = &(&minimal[0] * &a) * pk;
        if x.frobenius_norm() < DEGENERACY_GAP {
            return Err("linking element vanishes between minimal projections".into());
        }
        first_row.push(x.polar_isometry(tol));
    }
    let mut local_units = vec![vec![ComplexMatrix::zeros(r, r); m]; m];
    for k in 0..m {
        for l in 0..m {
            local_units[k][l] = &first_row[k].adjoint() * &first_row[l];
        }
    }
    // |α_1⟩ ⊗ |β_l⟩ spans the range of P_11; |α_k⟩ ⊗ |β_l⟩ = P_k1 (|α_1⟩ ⊗ |β_l⟩)
    let base = minimal[0].range_basis(tol);
    if base.cols() != n {
        return Err("minimal projection has unexpected rank".into());
    }
    let mut cols = Vec::with_capacity(m * n);
    for row in &local_units {
        let moved = &row[0] * &base;
        cols.extend(moved.columns());
    }
    let local_iso = ComplexMatrix::from_columns(r, &cols);
    let isometry = frame * &local_iso;
    let matrix_units = local_units
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| &(frame * p) * &frame.adjoint())
                .collect()
        })
        .collect();
    Ok(Block {
        m,
        n,
        isometry,
        matrix_units,
    })
}

fn sort_blocks(blocks: &mut [Block]) {
    let key = |b: &Block| -> Vec<i64> {
        b.isometry
            .iter()
            .flat_map(|z| [(z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64])
            .collect()
    };
    blocks.sort_by(|x, y| {
        y.m.cmp(&x.m)
            .then(y.n.cmp(&x.n))
            .then_with(|| key(x).cmp(&key(y)))
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn z1z2() -> (ComplexMatrix, ComplexMatrix) {
        let z = ComplexMatrix::diag_real(&[1.0, -1.0]);
        let id = ComplexMatrix::identity(2);
        (z.tensor(&id), id.tensor(&z))
    }

    fn sign_flip() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, 1.0, 1.0, -1.0])
    }

    #[test]
    fn generated_algebra_dimensions() {
        let a = generate_algebra(&[ComplexMatrix::identity(2)], &tol()).unwrap();
        assert_eq!(a.dim(), 1);
        let (z1, z2) = z1z2();
        let a = generate_algebra(&[z1.clone(), z2.clone()], &tol()).unwrap();
        assert_eq!(a.dim(), 4);
        assert!(a.selfadjoint_closed && a.multiplicatively_closed);
        assert!(a.contains(&(&z1 * &z2), &tol()));
        assert!(generate_algebra(&[], &tol()).is_err());
    }

    #[test]
    fn commutant_cases() {
        let full = AlgebraBasis::from_space(OperatorSpace::full(3), &tol());
        assert_eq!(commutant(&full, &tol()).unwrap().dim(), 1);

        let (z1, z2) = z1z2();
        let a = generate_algebra(&[z1.clone(), z2.clone()], &tol()).unwrap();
        let c = commutant(&a, &tol()).unwrap();
        assert_eq!(c.dim(), 4);
        assert!(c.contains(&ComplexMatrix::diag_real(&[1.0, 2.0, 3.0, 4.0]), &tol()));

        let u = sign_flip();
        let a = generate_algebra(&[&u.adjoint() * &z1, &u.adjoint() * &z2], &tol()).unwrap();
        let c = commutant(&a, &tol()).unwrap();
        assert_eq!(c.dim(), 6);
        // |00⟩⟨11| and |11⟩⟨00| couple the two +1 sign sectors
        assert!(c.contains(&ComplexMatrix::ket_bra(4, 0, 3), &tol()));
        assert!(c.contains(&ComplexMatrix::ket_bra(4, 3, 0), &tol()));
        assert!(!c.contains(&ComplexMatrix::ket_bra(4, 0, 1), &tol()));
        assert!(c.selfadjoint_closed && c.multiplicatively_closed);
    }

    #[test]
    fn center_cases() {
        let full = AlgebraBasis::from_space(OperatorSpace::full(3), &tol());
        let z = center(&full, &tol()).unwrap();
        assert_eq!(z.dim(), 1);
        assert!(z.contains(&ComplexMatrix::identity(3), &tol()));

        let (z1, z2) = z1z2();
        let diag = generate_algebra(&[z1, z2], &tol()).unwrap();
        let zc = center(&diag, &tol()).unwrap();
        assert!(OperatorSpace::span_distance(zc.space(), diag.space()) < 1e-10);
    }

    /// `W ((M_2 ⊗ 1_3) ⊕ M_1) W†` for a random unitary `W`, given by a
    /// spanning set.
    fn conjugated_direct_sum(
        blocks: &[(usize, usize)],
        seed: u64,
    ) -> (AlgebraBasis, ComplexMatrix) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d: usize = blocks.iter().map(|(m, n)| m * n).sum();
        let w = random::unitary(d, &mut rng);
        let mut gens = Vec::new();
        let mut off = 0;
        for &(m, n) in blocks {
            for i in 0..m {
                for j in 0..m {
                    let local = ComplexMatrix::ket_bra(m, i, j).tensor(&ComplexMatrix::identity(n));
                    let mut full = ComplexMatrix::zeros(d, d);
                    for r in 0..m * n {
                        for c in 0..m * n {
                            full[(off + r, off + c)] = local[(r, c)];
                        }
                    }
                    gens.push(&(&w * &full) * &w.adjoint());
                }
            }
            off += m * n;
        }
        let space = OperatorSpace::from_spanning(d, &gens, &tol());
        (AlgebraBasis::from_space(space, &tol()), w)
    }

    #[test]
    fn center_dimension_counts_blocks() {
        let (alg, _) = conjugated_direct_sum(&[(2, 3), (1, 1)], 30);
        assert_eq!(alg.dim(), 5);
        assert_eq!(center(&alg, &tol()).unwrap().dim(), 2);
    }

    #[test]
    fn decompose_full_matrix_algebra() {
        let full = AlgebraBasis::from_space(OperatorSpace::full(3), &tol());
        let bs = decompose_structure(&full, &tol(), 0).unwrap();
        assert_eq!(bs.dims(), vec![(3, 1)]);
        assert_eq!(bs.complement_dim, 0);
        assert!(bs.matrix_unit_residual() < 1e-9);
        assert!(bs.reconstruction_residual(&full) < 1e-9);
    }

    #[test]
    fn decompose_uns_commutant() {
        let (z1, z2) = z1z2();
        let u = sign_flip();
        let gens = generate_algebra(&[&u.adjoint() * &z1, &u.adjoint() * &z2], &tol()).unwrap();
        let c = commutant(&gens, &tol()).unwrap();
        let bs = decompose_structure(&c, &tol(), 0).unwrap();
        assert_eq!(bs.dims(), vec![(2, 1), (1, 1), (1, 1)]);
        assert!(bs.reconstruction_residual(&c) < 1e-9);
    }

    #[test]
    fn decompose_conjugated_sum() {
        let (alg, _) = conjugated_direct_sum(&[(2, 2), (1, 1), (1, 1)], 31);
        let bs = decompose_structure(&alg, &tol(), 0).unwrap();
        assert_eq!(bs.dims(), vec![(2, 2), (1, 1), (1, 1)]);
        assert!(bs.matrix_unit_residual() < 1e-9);
        assert!(bs.reconstruction_residual(&alg) < 1e-9);
        for b in &bs.blocks {
            assert!(b.isometry.isometry_residual() < 1e-9);
        }
    }

    #[test]
    fn decompose_rejects_non_algebra() {
        let space = OperatorSpace::from_spanning(2, [&ComplexMatrix::ket_bra(2, 0, 1)], &tol());
        let a = AlgebraBasis::from_space(space, &tol());
        assert!(matches!(
            decompose_structure(&a, &tol(), 0),
            Err(AlgebraError::NotClosed(_))
        ));
    }

    #[test]
    fn seeds_agree_on_block_dims() {
        let (alg, _) = conjugated_direct_sum(&[(2, 3), (1, 2), (1, 1)], 32);
        let reference = decompose_structure(&alg, &tol(), 0).unwrap().sorted_dims();
        for seed in 1..6 {
            let bs = decompose_structure(&alg, &tol(), seed).unwrap();
            assert_eq!(bs.sorted_dims(), reference);
        }
    }

    #[test]
    fn gamma_map_matches_partial_trace() {
        let (alg, _) = conjugated_direct_sum(&[(2, 2), (1, 1)], 33);
        let bs = decompose_structure(&alg, &tol(), 0).unwrap();
        let block = &bs.blocks[0];
        let w = &block.isometry;
        let mut rng = ChaCha8Rng::seed_from_u64(34);

        // product input ∝ 1 ⊗ σ^B
        let sa = random::ginibre(2, 2, &mut rng);
        let sb = random::ginibre(2, 2, &mut rng);
        let sigma = &(w * &sa.tensor(&sb)) * &w.adjoint();
        let out = gamma_map(&block.matrix_units, &sigma).unwrap();
        let want = &(w * &ComplexMatrix::identity(2).tensor(&sb.scale(sa.trace()))) * &w.adjoint();
        assert!(out.distance(&want) < 1e-10);

        // support on K is annihilated
        let k = &bs.blocks[1].isometry;
        let on_k = &(k * &random::ginibre(1, 1, &mut rng)) * &k.adjoint();
        assert!(gamma_map(&block.matrix_units, &on_k).unwrap().frobenius_norm() < 1e-12);

        // generic σ against 1 ⊗ Tr_A(W† σ W)
        let sigma = random::ginibre(5, 5, &mut rng);
        let out = gamma_map(&block.matrix_units, &sigma).unwrap();
        let reduced = w.adjoint_mul(&sigma).multiply(w).unwrap().partial_trace_a(2, 2).unwrap();
        let want = &(w * &ComplexMatrix::identity(2).tensor(&reduced)) * &w.adjoint();
        assert!(out.distance(&want) < 1e-10);

        assert!(gamma_map(&block.matrix_units, &ComplexMatrix::identity(3)).is_err());
    }
}
