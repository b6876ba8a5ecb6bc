//! Dense complex linear algebra used by every other module.
//!
//! [`ComplexMatrix`] is a thin newtype over a column-major `nalgebra` matrix.
//! All tensor products use the left-factor-major index convention: row `i`
//! of `A ⊗ B` is `i_A * rows(B) + i_B`. Vectorization ([`ComplexMatrix::to_vector`])
//! is row-major, so `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::MatError;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Numerical thresholds shared by all checks.
///
/// `atol` is an absolute Frobenius-norm threshold; `rank_rtol` is the
/// relative singular-value cutoff used for ranks, null spaces and polar
/// decompositions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub atol: f64,
    pub rank_rtol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            atol: 1e-9,
            rank_rtol: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(atol: f64, rank_rtol: f64) -> Result<Self, MatError> {
        if !(atol > 0.0 && atol.is_finite()) {
            return Err(MatError::InvalidTolerance(format!(
                "atol must be positive, got {atol}"
            )));
        }
        if !(rank_rtol > 0.0 && rank_rtol < 1.0) {
            return Err(MatError::InvalidTolerance(format!(
                "rank_rtol must lie in (0, 1), got {rank_rtol}"
            )));
        }
        Ok(Self { atol, rank_rtol })
    }

    pub fn with_atol(self, atol: f64) -> Result<Self, MatError> {
        Self::new(atol, self.rank_rtol)
    }

    /// Threshold for a residual measured against an operator of norm `scale`.
    pub fn scaled(&self, scale: f64) -> f64 {
        self.atol * scale.max(1.0)
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Result of [`ComplexMatrix::eig_hermitian`]: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Groups eigenvalue indices into clusters whose consecutive gaps are at
    /// most `gap`. Clusters come out in ascending eigenvalue order.
    pub fn clusters(&self, gap: f64) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            match out.last_mut() {
                Some(last) if v - self.values[*last.last().unwrap()] <= gap => last.push(i),
                _ => out.push(vec![i]),
            }
        }
        out
    }

    /// Smallest gap between adjacent clusters (infinite when only one).
    pub fn min_gap_between(&self, clusters: &[Vec<usize>]) -> f64 {
        clusters
            .windows(2)
            .map(|w| self.values[w[1][0]] - self.values[*w[0].last().unwrap()])
            .fold(f64::INFINITY, f64::min)
    }

    /// Orthogonal projector onto the span of the given eigenvector columns.
    pub fn projector(&self, indices: &[usize]) -> ComplexMatrix {
        self.vectors.select_columns(indices).range_projector()
    }
}

/// Singular values at or below this absolute level are always treated as zero.
pub const RANK_FLOOR: f64 = 1e-12;

/// Singular value decomposition `M = U diag(s) V†` with singular values in
/// descending order. `u` is `rows × k`, `v` is `cols × k`, `k = min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    /// `rank_rtol·σ_max`, floored at [`RANK_FLOOR`] so that round-off in a
    /// numerically zero matrix does not count as rank.
    fn cutoff(&self, rank_rtol: f64) -> f64 {
        let smax = self.singular_values.first().copied().unwrap_or(0.0);
        (rank_rtol * smax).max(RANK_FLOOR)
    }

    pub fn rank(&self, rank_rtol: f64) -> usize {
        let cut = self.cutoff(rank_rtol);
        self.singular_values.iter().filter(|&&s| s > cut).count()
    }
}

fn from_faer(z: faer::c64) -> C64 {
    C64::new(z.re, z.im)
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    /// Builds a matrix from entries listed row by row.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self, MatError> {
        if entries.len() != rows * cols {
            return Err(MatError::EntryCount {
                rows,
                cols,
                len: entries.len(),
            });
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Real matrix from nested rows. Panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn diag(values: &[C64]) -> Self {
        let d = values.len();
        Self::from_fn(d, d, |i, j| if i == j { values[i] } else { ZERO })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let d = values.len();
        Self::from_fn(d, d, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
    }

    /// The matrix unit `|i⟩⟨j|` in dimension `dim`.
    pub fn ket_bra(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        m[(i, j)] = ONE;
        m
    }

    /// Outer product `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn from_columns(rows: usize, columns: &[Vec<C64>]) -> Self {
        assert!(columns.iter().all(|c| c.len() == rows), "column length mismatch");
        Self::from_fn(rows, columns.len(), |i, j| columns[j][i])
    }

    /// Inverse of [`Self::to_vector`].
    pub fn from_vector(rows: usize, cols: usize, v: &[C64]) -> Self {
        assert_eq!(v.len(), rows * cols, "vector length mismatch");
        Self::from_fn(rows, cols, |i, j| v[i * cols + j])
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.0.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    /// Entries in row-major order.
    pub fn to_vector(&self) -> Vec<C64> {
        let (r, c) = self.shape();
        let mut out = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn columns(&self) -> Vec<Vec<C64>> {
        (0..self.cols()).map(|j| self.column(j)).collect()
    }

    pub fn select_columns(&self, indices: &[usize]) -> Self {
        Self::from_fn(self.rows(), indices.len(), |i, j| self.0[(i, indices[j])])
    }

    /// Columns `start..start + len`.
    pub fn column_range(&self, start: usize, len: usize) -> Self {
        Self(self.0.columns(start, len).into_owned())
    }

    pub fn hcat(blocks: &[&ComplexMatrix]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows());
        assert!(blocks.iter().all(|b| b.rows() == rows), "row mismatch in hcat");
        let cols: usize = blocks.iter().map(|b| b.cols()).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            out.0.columns_mut(off, b.cols()).copy_from(&b.0);
            off += b.cols();
        }
        out
    }

    pub fn vcat(blocks: &[&ComplexMatrix]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols());
        assert!(blocks.iter().all(|b| b.cols() == cols), "column mismatch in vcat");
        let rows: usize = blocks.iter().map(|b| b.rows()).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            out.0.rows_mut(off, b.rows()).copy_from(&b.0);
            off += b.rows();
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    /// Checked matrix product.
    pub fn multiply(&self, other: &Self) -> Result<Self, MatError> {
        if self.cols() != other.rows() {
            return Err(MatError::DimensionMismatch {
                op: "multiply",
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(Self(&self.0 * &other.0))
    }

    /// `A† B` without materializing the adjoint.
    pub fn adjoint_mul(&self, other: &Self) -> Self {
        Self(self.0.ad_mul(&other.0))
    }

    pub fn trace(&self) -> C64 {
        self.0.diagonal().iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Hilbert–Schmidt inner product `Tr(A† B)`, antilinear in the first slot.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!(self.shape(), other.shape(), "hs_inner shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Frobenius distance `‖A − B‖_F`.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "distance shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.distance(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.hermiticity_residual() <= tol.scaled(self.frobenius_norm())
    }

    pub fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }

    /// Residual of `P² = P = P†`.
    pub fn projector_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let sq = self * self;
        self.distance(&sq).max(self.hermiticity_residual())
    }

    pub fn is_projector(&self, tol: &Tolerance) -> bool {
        self.projector_residual() <= tol.scaled(self.frobenius_norm())
    }

    /// Residual of `U†U = I = UU†`.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let id = Self::identity(self.rows());
        self.adjoint_mul(self)
            .distance(&id)
            .max((self * &self.adjoint()).distance(&id))
    }

    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        self.unitarity_residual() <= tol.atol * (self.rows() as f64).sqrt().max(1.0)
    }

    /// Residual of `V†V = I` (orthonormal columns).
    pub fn isometry_residual(&self) -> f64 {
        self.adjoint_mul(self).distance(&Self::identity(self.cols()))
    }

    /// Kronecker product with left-factor-major indexing.
    pub fn tensor(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// Traces out the left factor of a `(dim_a·dim_b)`-square matrix.
    pub fn partial_trace_a(&self, dim_a: usize, dim_b: usize) -> Result<Self, MatError> {
        self.check_bipartite(dim_a, dim_b)?;
        Ok(Self::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a)
                .map(|k| self.0[(k * dim_b + i, k * dim_b + j)])
                .sum()
        }))
    }

    /// Traces out the right factor of a `(dim_a·dim_b)`-square matrix.
    pub fn partial_trace_b(&self, dim_a: usize, dim_b: usize) -> Result<Self, MatError> {
        self.check_bipartite(dim_a, dim_b)?;
        Ok(Self::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b)
                .map(|l| self.0[(i * dim_b + l, j * dim_b + l)])
                .sum()
        }))
    }

    fn check_bipartite(&self, dim_a: usize, dim_b: usize) -> Result<(), MatError> {
        let n = dim_a * dim_b;
        if self.shape() != (n, n) {
            return Err(MatError::DimensionMismatch {
                op: "partial_trace",
                left: self.shape(),
                right: (n, n),
            });
        }
        Ok(())
    }

    /// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
    pub fn eig_hermitian(&self, tol: &Tolerance) -> Result<HermitianEigen, MatError> {
        if !self.is_square() {
            return Err(MatError::NotSquare(self.shape()));
        }
        let residual = self.hermiticity_residual();
        if residual > tol.scaled(self.frobenius_norm()) {
            return Err(MatError::NotHermitian { residual });
        }
        let d = self.rows();
        if d == 0 {
            return Ok(HermitianEigen {
                values: vec![],
                vectors: Self::zeros(0, 0),
            });
        }
        let h = self.hermitian_part().to_faer();
        let eig = h
            .self_adjoint_eigen(faer::Side::Lower)
            .map_err(|_| MatError::NoConvergence("hermitian eigensolver"))?;
        let (s, u) = (eig.S(), eig.U());
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| s[a].re.total_cmp(&s[b].re));
        let values = order.iter().map(|&k| s[k].re).collect();
        let vectors = Self::from_fn(d, d, |i, j| from_faer(u[(i, order[j])]));
        Ok(HermitianEigen { values, vectors })
    }

    /// Thin SVD with singular values sorted in descending order.
    pub fn svd(&self) -> Svd {
        let (r, c) = self.shape();
        let k = r.min(c);
        if k == 0 {
            return Svd {
                u: Self::zeros(r, 0),
                singular_values: vec![],
                v: Self::zeros(c, 0),
            };
        }
        let svd = self
            .to_faer()
            .thin_svd()
            .expect("faer SVD converges on finite input");
        let (u, sv, v) = (svd.U(), svd.S(), svd.V());
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| sv[b].re.total_cmp(&sv[a].re));
        Svd {
            u: Self::from_fn(r, k, |i, j| from_faer(u[(i, order[j])])),
            singular_values: order.iter().map(|&j| sv[j].re).collect(),
            v: Self::from_fn(c, k, |i, j| from_faer(v[(i, order[j])])),
        }
    }

    fn to_faer(&self) -> faer::Mat<faer::c64> {
        faer::Mat::from_fn(self.rows(), self.cols(), |i, j| {
            let z = self.0[(i, j)];
            faer::c64::new(z.re, z.im)
        })
    }

    pub fn rank(&self, tol: &Tolerance) -> usize {
        self.svd().rank(tol.rank_rtol)
    }

    /// Orthonormal basis (as columns) of the numerical null space.
    ///
    /// A right singular vector belongs to the null space when its singular
    /// value is at most `rank_rtol·σ_max`.
    pub fn null_space(&self, tol: &Tolerance) -> Self {
        let (r, c) = self.shape();
        if c == 0 {
            return Self::zeros(0, 0);
        }
        // Pad wide matrices so the SVD returns a complete set of right vectors.
        let padded;
        let m = if r < c {
            padded = Self::vcat(&[self, &Self::zeros(c - r, c)]);
            &padded
        } else {
            self
        };
        let svd = m.svd();
        let rank = svd.rank(tol.rank_rtol);
        svd.v.column_range(rank, c - rank)
    }

    /// Orthonormal basis (as columns) of the numerical range.
    pub fn range_basis(&self, tol: &Tolerance) -> Self {
        let svd = self.svd();
        let rank = svd.rank(tol.rank_rtol);
        svd.u.column_range(0, rank)
    }

    /// `Q Q†` for a matrix `Q` with orthonormal columns.
    pub fn range_projector(&self) -> Self {
        self * &self.adjoint()
    }

    /// Partial-isometry factor `W` of the polar decomposition `M = W (M†M)^{1/2}`.
    ///
    /// Singular values at or below `rank_rtol·σ_max` are dropped, so `W†W`
    /// is the projector onto the numerical row space of `M`.
    pub fn polar_isometry(&self, tol: &Tolerance) -> Self {
        let svd = self.svd();
        let rank = svd.rank(tol.rank_rtol);
        let u = svd.u.column_range(0, rank);
        let v = svd.v.column_range(0, rank);
        &u * &v.adjoint()
    }

    /// Square root of a positive semidefinite matrix.
    pub fn sqrt_psd(&self, tol: &Tolerance) -> Result<Self, MatError> {
        let eig = self.eig_hermitian(tol)?;
        let roots: Vec<f64> = eig.values.iter().map(|&v| v.max(0.0).sqrt()).collect();
        let v = &eig.vectors;
        Ok(&(v * &Self::diag_real(&roots)) * &v.adjoint())
    }

    /// Commutator `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.0.iter()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols(),
            rhs.rows(),
            "matrix product {:?} x {:?}",
            self.shape(),
            rhs.shape()
        );
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        self.0 -= &rhs.0;
    }
}

/// Sum of a non-empty list of equally shaped matrices.
pub fn sum<'a>(mats: impl IntoIterator<Item = &'a ComplexMatrix>) -> Option<ComplexMatrix> {
    let mut it = mats.into_iter();
    let mut acc = it.next()?.clone();
    for m in it {
        acc += m;
    }
    Some(acc)
}

/// Normalizes a vector in place; returns the original norm.
pub(crate) fn normalize(v: &mut [C64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, -1.0])
    }

    #[test]
    fn identity_and_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random::ginibre(2, 2, &mut rng);
        let id = ComplexMatrix::identity(2);
        assert_eq!(id.multiply(&x).unwrap(), x);
        assert_eq!(&pauli_z() * &pauli_z(), id);
    }

    #[test]
    fn multiply_rejects_mismatch() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            a.multiply(&b),
            Err(MatError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn matrix_unit_product_from_two_qubit_outer_products() {
        // P12 = |00><10| + |11><01|, P21 = |10><00| + |01><11|, P11 = |00><00| + |11><11|
        let kb = |i, j| ComplexMatrix::ket_bra(4, i, j);
        let p12 = &kb(0, 2) + &kb(3, 1);
        let p21 = &kb(2, 0) + &kb(1, 3);
        let p11 = &kb(0, 0) + &kb(3, 3);
        assert_eq!(&p12 * &p21, p11);
    }

    #[test]
    fn tensor_conventions() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let one = ComplexMatrix::identity(1);
        assert_eq!(one.tensor(&m), m);
        let z1 = pauli_z().tensor(&ComplexMatrix::identity(2));
        assert_eq!(z1, ComplexMatrix::diag_real(&[1.0, 1.0, -1.0, -1.0]));
        // left-major: (A ⊗ B)[(iA*rB + iB), (jA*cB + jB)] = A[iA,jA] B[iB,jB]
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random::ginibre(3, 3, &mut rng);
        let b = random::ginibre(2, 2, &mut rng);
        let t = a.tensor(&b);
        for ia in 0..3 {
            for ja in 0..3 {
                for ib in 0..2 {
                    for jb in 0..2 {
                        let expect = a[(ia, ja)] * b[(ib, jb)];
                        assert!((t[(ia * 2 + ib, ja * 2 + jb)] - expect).norm() < 1e-14);
                    }
                }
            }
        }
        let lhs = t.trace();
        let rhs = a.trace() * b.trace();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn partial_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sa = random::ginibre(3, 3, &mut rng);
        let sb = random::ginibre(2, 2, &mut rng);
        let prod = sa.tensor(&sb);
        let ta = prod.partial_trace_a(3, 2).unwrap();
        assert!(ta.distance(&sb.scale(sa.trace())) < 1e-12);
        let tb = prod.partial_trace_b(3, 2).unwrap();
        assert!(tb.distance(&sa.scale(sb.trace())) < 1e-12);

        let i4 = ComplexMatrix::identity(4);
        assert_eq!(
            i4.partial_trace_a(2, 2).unwrap(),
            ComplexMatrix::identity(2).scale_real(2.0)
        );

        // duality oracle: Tr(Tr_A(M) Y) = Tr(M (I ⊗ Y)) with Y = |j><i|
        let m = random::ginibre(6, 6, &mut rng);
        let t = m.partial_trace_a(3, 2).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let probe = ComplexMatrix::identity(3).tensor(&ComplexMatrix::ket_bra(2, j, i));
                let oracle = (&m * &probe).trace();
                assert!((t[(i, j)] - oracle).norm() < 1e-12);
            }
        }
        assert!((t.trace() - m.trace()).norm() < 1e-12);
        assert!(m.partial_trace_a(2, 2).is_err());
    }

    #[test]
    fn eig_small_cases() {
        let tol = Tolerance::default();
        let e = ComplexMatrix::diag_real(&[3.0, 1.0, 2.0])
            .eig_hermitian(&tol)
            .unwrap();
        assert_eq!(e.values.len(), 3);
        for (v, want) in e.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - want).abs() < 1e-14);
        }
        let z = pauli_z().eig_hermitian(&tol).unwrap();
        assert!((z.values[0] + 1.0).abs() < 1e-14 && (z.values[1] - 1.0).abs() < 1e-14);

        let nonherm = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(
            nonherm.eig_hermitian(&tol),
            Err(MatError::NotHermitian { .. })
        ));
    }

    #[test]
    fn eig_reconstruction_random() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let h = random::hermitian(8, &mut rng);
            let e = h.eig_hermitian(&tol).unwrap();
            let v = &e.vectors;
            let rebuilt = &(v * &ComplexMatrix::diag_real(&e.values)) * &v.adjoint();
            assert!(rebuilt.distance(&h) < 1e-10);
            assert!(v.isometry_residual() < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn null_space_cases() {
        let tol = Tolerance::default();
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(z.null_space(&tol).cols(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let inv = random::unitary(4, &mut rng);
        assert_eq!(inv.null_space(&tol).cols(), 0);

        let a = random::ginibre(4, 2, &mut rng);
        let b = random::ginibre(2, 4, &mut rng);
        let m = &a * &b;
        let ns = m.null_space(&tol);
        assert_eq!(ns.cols(), 2);
        assert!(ns.isometry_residual() < 1e-12);
        assert!((&m * &ns).frobenius_norm() < 1e-10);

        // wide input
        let w = random::ginibre(2, 5, &mut rng);
        let ns = w.null_space(&tol);
        assert_eq!(ns.cols(), 3);
        assert!((&w * &ns).frobenius_norm() < 1e-10);
    }

    #[test]
    fn polar_cases() {
        let tol = Tolerance::default();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let u = random::unitary(3, &mut rng);
        assert!(u.polar_isometry(&tol).distance(&u) < 1e-12);
        assert!(u.scale_real(2.5).polar_isometry(&tol).distance(&u) < 1e-12);

        // U1 P1 maps span{e0,e1} onto the span of two orthonormal vectors
        let basis = random::unitary(4, &mut rng);
        let p1 = ComplexMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0]);
        let mut u1 = ComplexMatrix::zeros(4, 4);
        for i in 0..4 {
            u1[(i, 0)] = basis[(i, 0)];
            u1[(i, 1)] = basis[(i, 1)];
        }
        let m = u1.scale_real(0.7);
        let w = m.polar_isometry(&tol);
        assert!(w.adjoint_mul(&w).distance(&p1) < 1e-12);
        let q1 = basis.column_range(0, 2).range_projector();
        assert!((&w * &w.adjoint()).distance(&q1) < 1e-12);
        let root = m.adjoint_mul(&m).sqrt_psd(&tol).unwrap();
        assert!((&w * &root).distance(&m) < 1e-12);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 1e-8).is_err());
        assert!(Tolerance::new(1e-9, 1.0).is_err());
        assert!(Tolerance::new(1e-9, 1e-8).is_ok());
    }
}
