use crate::error::{Error, Result};
use crate::field::Field;

use super::Matrix;

/// A linear subspace of `F^d` in canonical form.
///
/// The basis is the reduced row echelon form of any spanning set, so two
/// subspaces are equal exactly when their representations are identical.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<F: Field> {
    field: F,
    ambient: usize,
    rows: Vec<Vec<F::Elem>>,
    pivots: Vec<usize>,
}

/// How `complement_within` picks a complement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplementPolicy {
    /// Orthogonal complement under the coordinate dot product when it is a
    /// genuine complement, otherwise the greedy choice.
    #[default]
    OrthogonalFirst,
    /// Extend `inner` by the canonical basis vectors of `outer`, in order.
    Greedy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Complement<F: Field> {
    pub space: Subspace<F>,
    /// The orthogonal candidate was isotropic and the greedy fallback was used.
    pub degenerate: bool,
}

impl<F: Field> Subspace<F> {
    pub fn zero(field: &F, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: &F, ambient: usize) -> Self {
        let rows = (0..ambient)
            .map(|i| {
                let mut v = vec![field.zero(); ambient];
                v[i] = field.one();
                v
            })
            .collect();
        Subspace { field: field.clone(), ambient, rows, pivots: (0..ambient).collect() }
    }

    pub fn span<I>(field: &F, ambient: usize, vectors: I) -> Self
    where
        I: IntoIterator<Item = Vec<F::Elem>>,
    {
        let mut s = Self::zero(field, ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn from_columns(m: &Matrix<F>) -> Self {
        m.column_space()
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn dim(&self) -> usize {
        self.rows.len()
    }
    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }
    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// The canonical basis vectors, in pivot order.
    pub fn vectors(&self) -> &[Vec<F::Elem>] {
        &self.rows
    }

    /// Canonical basis as the columns of an `ambient x dim` matrix.
    pub fn basis(&self) -> Matrix<F> {
        Matrix::from_columns(&self.field, self.ambient, &self.rows)
    }

    /// Residual of `v` after eliminating the pivot coordinates.
    pub fn reduce(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.ambient, "vector length mismatch");
        let f = &self.field;
        let mut v = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                if !f.is_zero(r) {
                    *x = f.sub(x, &f.mul(&c, r));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F::Elem]) -> bool {
        self.reduce(v).iter().all(|x| self.field.is_zero(x))
    }

    pub fn contains_space(&self, other: &Self) -> bool {
        other.rows.iter().all(|v| self.contains(v))
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the space.
    pub fn coordinates(&self, v: &[F::Elem]) -> Option<Vec<F::Elem>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&p| v[p].clone()).collect())
    }

    /// Vector with the given coordinates in the canonical basis.
    pub fn combine(&self, coords: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(coords.len(), self.dim());
        let f = &self.field;
        let mut out = vec![f.zero(); self.ambient];
        for (c, row) in coords.iter().zip(&self.rows) {
            if f.is_zero(c) {
                continue;
            }
            for (o, r) in out.iter_mut().zip(row) {
                *o = f.add(o, &f.mul(c, r));
            }
        }
        out
    }

    /// Adds `v` to the span, keeping the canonical form. Returns whether the
    /// dimension grew.
    pub fn insert(&mut self, v: Vec<F::Elem>) -> bool {
        let f = self.field.clone();
        let mut v = self.reduce(&v);
        let Some(p) = v.iter().position(|x| !f.is_zero(x)) else {
            return false;
        };
        let inv = f.inv(&v[p]);
        for x in v.iter_mut() {
            *x = f.mul(x, &inv);
        }
        for row in self.rows.iter_mut() {
            let c = row[p].clone();
            if f.is_zero(&c) {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&v) {
                if !f.is_zero(y) {
                    *x = f.sub(x, &f.mul(&c, y));
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, v);
        true
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient);
        let mut s = self.clone();
        for v in &other.rows {
            s.insert(v.clone());
        }
        s
    }

    /// `{x : <b, x> = 0 for all b}` under the coordinate dot product.
    pub fn orthogonal(&self) -> Self {
        Matrix::from_rows(&self.field, self.ambient, self.rows.clone()).kernel()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient);
        if self.is_zero() || other.is_zero() {
            return Self::zero(&self.field, self.ambient);
        }
        if self.is_full() {
            return other.clone();
        }
        if other.is_full() {
            return self.clone();
        }
        self.orthogonal().sum(&other.orthogonal()).orthogonal()
    }

    /// Image of the space under `m`.
    pub fn image(&self, m: &Matrix<F>) -> Self {
        assert_eq!(m.cols(), self.ambient);
        Self::span(&self.field, m.rows(), self.rows.iter().map(|v| m.apply(v)))
    }

    /// `{x : m x in self}`.
    pub fn preimage(&self, m: &Matrix<F>) -> Self {
        assert_eq!(m.rows(), self.ambient);
        let annihilator = Matrix::from_rows(&self.field, self.ambient, self.orthogonal().rows);
        annihilator.mul(m).kernel()
    }

    /// Restriction of `m` to `self`, expressed in the canonical bases of
    /// `self` and `target`. Fails when `m(self)` is not inside `target`.
    pub fn restrict(&self, m: &Matrix<F>, target: &Self) -> Option<Matrix<F>> {
        let cols: Option<Vec<Vec<F::Elem>>> =
            self.rows.iter().map(|v| target.coordinates(&m.apply(v))).collect();
        Some(Matrix::from_columns(&self.field, target.dim(), &cols?))
    }
}

/// A complement of `inner` inside `outer` (requires `inner ⊆ outer`).
pub fn complement_within<F: Field>(
    inner: &Subspace<F>,
    outer: &Subspace<F>,
    policy: ComplementPolicy,
) -> Result<Complement<F>> {
    if !outer.contains_space(inner) {
        return Err(Error::internal("complement_within: inner is not contained in outer"));
    }
    if policy == ComplementPolicy::OrthogonalFirst {
        let candidate = inner.orthogonal().intersection(outer);
        if candidate.dim() + inner.dim() == outer.dim() && candidate.intersection(inner).is_zero() {
            return Ok(Complement { space: candidate, degenerate: false });
        }
    }
    Ok(Complement {
        space: greedy_complement(inner, outer),
        degenerate: policy == ComplementPolicy::OrthogonalFirst,
    })
}

fn greedy_complement<F: Field>(inner: &Subspace<F>, outer: &Subspace<F>) -> Subspace<F> {
    let mut acc = inner.clone();
    let mut chosen = Subspace::zero(inner.field(), inner.ambient());
    for v in outer.vectors() {
        if acc.insert(v.clone()) {
            chosen.insert(v.clone());
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};

    fn f2() -> Fp {
        Fp::new(2).unwrap()
    }

    #[test]
    fn canonical_form_is_basis_independent() {
        let f = f2();
        let a = Subspace::span(&f, 3, vec![vec![1, 1, 0], vec![0, 1, 1]]);
        let b = Subspace::span(&f, 3, vec![vec![1, 0, 1], vec![1, 1, 0]]);
        assert_eq!(a, b);
        assert_eq!(a.vectors(), &[vec![1, 0, 1], vec![0, 1, 1]]);
    }

    #[test]
    fn intersection_and_sum_dimensions() {
        let q = Rationals;
        let e = |v: &[i64]| v.iter().map(|&x| q.from_i64(x)).collect::<Vec<_>>();
        let a = Subspace::span(&q, 3, vec![e(&[1, 0, 0]), e(&[0, 1, 0])]);
        let b = Subspace::span(&q, 3, vec![e(&[0, 1, 0]), e(&[0, 0, 1])]);
        assert_eq!(a.intersection(&b), Subspace::span(&q, 3, vec![e(&[0, 1, 0])]));
        assert!(a.sum(&b).is_full());
    }

    #[test]
    fn orthogonal_complement_falls_back_when_isotropic() {
        // (1,1) is isotropic over F_2
        let f = f2();
        let inner = Subspace::span(&f, 2, vec![vec![1, 1]]);
        let outer = Subspace::full(&f, 2);
        let c = complement_within(&inner, &outer, ComplementPolicy::OrthogonalFirst).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.space, Subspace::span(&f, 2, vec![vec![1, 0]]));
    }

    #[test]
    fn orthogonal_complement_used_when_valid() {
        let f = f2();
        let inner = Subspace::span(&f, 3, vec![vec![1, 1, 1]]);
        let outer = Subspace::full(&f, 3);
        let c = complement_within(&inner, &outer, ComplementPolicy::OrthogonalFirst).unwrap();
        assert!(!c.degenerate);
        assert_eq!(c.space.vectors(), &[vec![1, 0, 1], vec![0, 1, 1]]);
    }

    #[test]
    fn preimage_of_line() {
        let f = f2();
        let m = Matrix::from_i64(&f, &[&[1, 1, 0], &[0, 0, 1]]);
        let target = Subspace::span(&f, 2, vec![vec![1, 0]]);
        let pre = target.preimage(&m);
        assert_eq!(pre, Subspace::span(&f, 3, vec![vec![1, 0, 0], vec![0, 1, 0]]));
    }
}
