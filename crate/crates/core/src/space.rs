//! Subspaces of `B(C^d)` with Hilbert–Schmidt orthonormal bases.

use crate::matkit::{normalize, ComplexMatrix, Tolerance, C64};

/// An orthonormal (Hilbert–Schmidt) basis of a subspace of `d × d` operators.
#[derive(Clone, Debug)]
pub struct OperatorSpace {
    dim: usize,
    basis: Vec<ComplexMatrix>,
}

impl OperatorSpace {
    pub fn empty(dim: usize) -> Self {
        Self { dim, basis: vec![] }
    }

    /// All of `B(C^d)`, spanned by the matrix units `|i⟩⟨j|`.
    pub fn full(dim: usize) -> Self {
        let basis = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| ComplexMatrix::ket_bra(dim, i, j)))
            .collect();
        Self { dim, basis }
    }

    /// Orthonormalizes a spanning list, dropping elements already in the span.
    pub fn from_spanning<'a>(
        dim: usize,
        mats: impl IntoIterator<Item = &'a ComplexMatrix>,
        tol: &Tolerance,
    ) -> Self {
        let mut space = Self::empty(dim);
        for m in mats {
            space.try_extend(m, tol);
        }
        space
    }

    /// Interprets each column of `q` (length `d²`, row-major vectorization)
    /// as an operator. The columns must already be orthonormal.
    pub fn from_orthonormal_columns(dim: usize, q: &ComplexMatrix) -> Self {
        assert_eq!(q.rows(), dim * dim, "column length must be d^2");
        let basis = (0..q.cols())
            .map(|j| ComplexMatrix::from_vector(dim, dim, &q.column(j)))
            .collect();
        Self { dim, basis }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[ComplexMatrix] {
        &self.basis
    }

    /// Basis as the columns of a `d² × k` matrix (row-major vectorization).
    pub fn as_columns(&self) -> ComplexMatrix {
        let n = self.dim * self.dim;
        let vecs: Vec<Vec<C64>> = self.basis.iter().map(ComplexMatrix::to_vector).collect();
        ComplexMatrix::from_fn(n, vecs.len(), |i, j| vecs[j][i])
    }

    /// Hilbert–Schmidt coefficients `⟨b_i, X⟩`.
    pub fn coefficients(&self, x: &ComplexMatrix) -> Vec<C64> {
        self.basis.iter().map(|b| b.hs_inner(x)).collect()
    }

    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for (b, c) in self.basis.iter().zip(self.coefficients(x)) {
            out += &b.scale(c);
        }
        out
    }

    /// `‖X − proj(X)‖_F`.
    pub fn residual(&self, x: &ComplexMatrix) -> f64 {
        x.distance(&self.project(x))
    }

    /// Membership with the scale-free threshold `atol·max(1, ‖X‖_F)`.
    pub fn contains(&self, x: &ComplexMatrix, tol: &Tolerance) -> bool {
        self.residual(x) <= tol.scaled(x.frobenius_norm())
    }

    /// Adds the component of `x` orthogonal to the span, if it is
    /// numerically nonzero. Returns whether the span grew.
    ///
    /// Uses two passes of modified Gram–Schmidt.
    pub fn try_extend(&mut self, x: &ComplexMatrix, tol: &Tolerance) -> bool {
        assert_eq!(x.shape(), (self.dim, self.dim), "operator shape mismatch");
        let scale = x.frobenius_norm();
        if scale == 0.0 || self.basis.len() >= self.dim * self.dim {
            return false;
        }
        let mut v = x.to_vector();
        for _ in 0..2 {
            for b in &self.basis {
                let bv = b.to_vector();
                let c: C64 = bv.iter().zip(&v).map(|(p, q)| p.conj() * q).sum();
                for (q, p) in v.iter_mut().zip(&bv) {
                    *q -= c * p;
                }
            }
        }
        let n = normalize(&mut v);
        if n <= Self::growth_threshold(tol) * scale.max(1.0) {
            return false;
        }
        self.basis
            .push(ComplexMatrix::from_vector(self.dim, self.dim, &v));
        true
    }

    /// Relative size below which an orthogonal component is treated as
    /// round-off.
    fn growth_threshold(tol: &Tolerance) -> f64 {
        tol.rank_rtol.sqrt()
    }

    /// `‖Π_a − Π_b‖_F` for the orthogonal projectors onto the two spans
    /// (as subspaces of the `d²`-dimensional operator space).
    pub fn span_distance(a: &Self, b: &Self) -> f64 {
        assert_eq!(a.dim, b.dim, "ambient dimensions differ");
        // ‖Π_a − Π_b‖² = ‖(1 − Π_b)Q_a‖² + ‖(1 − Π_a)Q_b‖²
        let leak = |from: &Self, onto: &Self| -> f64 {
            from.basis.iter().map(|x| onto.residual(x).powi(2)).sum()
        };
        (leak(a, b) + leak(b, a)).sqrt()
    }

    /// Intersection of two spans via principal angles: directions whose
    /// cosine is within `rank_rtol` of one.
    pub fn intersection(a: &Self, b: &Self, tol: &Tolerance) -> Self {
        assert_eq!(a.dim, b.dim, "ambient dimensions differ");
        if a.is_empty() || b.is_empty() {
            return Self::empty(a.dim);
        }
        let qa = a.as_columns();
        let qb = b.as_columns();
        let svd = qa.adjoint_mul(&qb).svd();
        let common: Vec<usize> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s >= 1.0 - tol.rank_rtol)
            .map(|(i, _)| i)
            .collect();
        let dirs = &qa * &svd.u.select_columns(&common);
        let mut out = Self::empty(a.dim);
        for j in 0..dirs.cols() {
            let x = ComplexMatrix::from_vector(a.dim, a.dim, &dirs.column(j));
            out.try_extend(&x, tol);
        }
        out
    }

    /// Subspace of `X` with `[X, G] = 0` for all `G` in `gens`, as the null
    /// space of the stacked maps `vec(X) ↦ vec(XG − GX)`.
    pub fn commuting_with(dim: usize, gens: &[ComplexMatrix], tol: &Tolerance) -> Self {
        let n = dim * dim;
        if gens.is_empty() {
            return Self::full(dim);
        }
        let id = ComplexMatrix::identity(dim);
        let blocks: Vec<ComplexMatrix> = gens
            .iter()
            .map(|g| &id.tensor(&g.transpose()) - &g.tensor(&id))
            .collect();
        let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
        let stacked = ComplexMatrix::vcat(&refs);
        debug_assert_eq!(stacked.cols(), n);
        let ns = stacked.null_space(tol);
        Self::from_orthonormal_columns(dim, &ns)
    }
}
