use crate::field::Field;

/// Dense row-major matrix over a field.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F: Field> {
    field: F,
    rows: usize,
    cols: usize,
    data: Vec<F::Elem>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<F: Field> {
    pub matrix: Matrix<F>,
    pub pivots: Vec<usize>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(field: &F, rows: usize, cols: usize) -> Self {
        Matrix {
            data: vec![field.zero(); rows * cols],
            field: field.clone(),
            rows,
            cols,
        }
    }

    pub fn identity(field: &F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: &F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { field: field.clone(), rows, cols, data }
    }

    /// Builds from row vectors; `cols` is needed when there are no rows.
    pub fn from_rows(field: &F, cols: usize, rows: Vec<Vec<F::Elem>>) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r);
        }
        Matrix { field: field.clone(), rows: n, cols, data }
    }

    /// Builds from column vectors; `rows` is needed when there are no columns.
    pub fn from_columns(field: &F, rows: usize, cols: &[Vec<F::Elem>]) -> Self {
        for c in cols {
            assert_eq!(c.len(), rows, "ragged column");
        }
        Self::from_fn(field, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    /// Small integer matrices, mostly for tests and fixtures.
    pub fn from_i64(field: &F, rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
            .collect();
        Self::from_rows(field, cols, rows)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F::Elem {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F::Elem) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F::Elem>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<F::Elem>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if f.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if f.is_zero(b) {
                        continue;
                    }
                    let idx = i * out.cols + j;
                    out.data[idx] = f.add(&out.data[idx], &f.mul(a, b));
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols, "dimension mismatch in apply");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = f.zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !f.is_zero(a) && !f.is_zero(x) {
                        acc = f.add(&acc, &f.mul(a, x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.add(a, b)).collect();
        Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(a, b)| f.sub(a, b)).collect();
        Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        let data = self.data.iter().map(|a| f.neg(a)).collect();
        Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(&self.field, self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.get(i, j).clone()
            } else {
                other.get(i, j - self.cols).clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { field: self.field.clone(), rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::from_fn(&self.field, self.rows + other.rows, self.cols + other.cols, |i, j| {
            match (i < self.rows, j < self.cols) {
                (true, true) => self.get(i, j).clone(),
                (false, false) => other.get(i - self.rows, j - self.cols).clone(),
                _ => self.field.zero(),
            }
        })
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(&self.field, self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        Self::from_fn(&self.field, idx.len(), self.cols, |i, j| self.get(idx[i], j).clone())
    }

    pub fn rref(&self) -> Rref<F> {
        let f = self.field.clone();
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !f.is_zero(m.get(i, c))) else {
                continue;
            };
            m.swap_rows(pr, r);
            let inv = f.inv(m.get(r, c));
            let pivot_row: Vec<(usize, F::Elem)> = (c..m.cols)
                .filter(|&j| !f.is_zero(m.get(r, j)))
                .map(|j| (j, f.mul(m.get(r, j), &inv)))
                .collect();
            for (j, v) in &pivot_row {
                m.set(r, *j, v.clone());
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c).clone();
                if f.is_zero(&factor) {
                    continue;
                }
                for (j, v) in &pivot_row {
                    let cur = f.sub(m.get(i, *j), &f.mul(&factor, v));
                    m.set(i, *j, cur);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the null space from the RREF: one vector per free column.
    pub fn kernel_vectors(&self) -> Vec<Vec<F::Elem>> {
        let f = &self.field;
        let Rref { matrix: r, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![f.zero(); self.cols];
                v[free] = f.one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = f.neg(r.get(row, free));
                }
                v
            })
            .collect()
    }

    pub fn kernel(&self) -> super::Subspace<F> {
        super::Subspace::span(&self.field, self.cols, self.kernel_vectors())
    }

    pub fn column_space(&self) -> super::Subspace<F> {
        super::Subspace::span(&self.field, self.rows, self.columns())
    }

    pub fn solver(&self) -> Solver<F> {
        Solver::new(self)
    }

    /// Some `x` with `self * x = b`, or `None` when inconsistent.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        self.solver().solve(b)
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(self.clone());
        }
        let aug = self.hstack(&Self::identity(&self.field, n));
        let Rref { matrix, pivots } = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Self::from_fn(&self.field, n, n, |i, j| matrix.get(i, n + j).clone()))
    }

    /// `self^e` by repeated squaring; returns the number of products taken.
    pub fn pow(&self, e: u64) -> (Self, usize) {
        assert!(self.is_square());
        let mut result: Option<Self> = None;
        let mut base = self.clone();
        let mut e = e;
        let mut count = 0;
        while e > 0 {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => {
                        count += 1;
                        r.mul(&base)
                    }
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
                count += 1;
            }
        }
        (result.unwrap_or_else(|| Self::identity(&self.field, self.rows)), count)
    }

    /// Entries as nested JSON arrays (rows).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            (0..self.rows)
                .map(|i| serde_json::Value::Array(self.row(i).iter().map(|x| self.field.to_json(x)).collect()))
                .collect(),
        )
    }

    /// Rows rendered as space-separated text.
    pub fn to_text(&self) -> String {
        if self.rows == 0 || self.cols == 0 {
            return format!("({}x{} empty)", self.rows, self.cols);
        }
        (0..self.rows)
            .map(|i| {
                let cells: Vec<String> = self.row(i).iter().map(|x| self.field.format(x)).collect();
                format!("[{}]", cells.join(" "))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Precomputed elimination for repeated solves against one matrix.
///
/// Holds `E` with `E A = rref(A)`, so a right-hand side `b` is consistent iff
/// `(E b)` vanishes below the rank.
#[derive(Clone, Debug)]
pub struct Solver<F: Field> {
    transform: Matrix<F>,
    pivots: Vec<usize>,
    cols: usize,
}

impl<F: Field> Solver<F> {
    pub fn new(a: &Matrix<F>) -> Self {
        let m = a.rows;
        let aug = a.hstack(&Matrix::identity(&a.field, m));
        let Rref { matrix, pivots } = aug.rref();
        let pivots: Vec<usize> = pivots.into_iter().take_while(|&p| p < a.cols).collect();
        let transform = Matrix::from_fn(&a.field, m, m, |i, j| matrix.get(i, a.cols + j).clone());
        Solver { transform, pivots, cols: a.cols }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        let f = self.transform.field();
        let y = self.transform.apply(b);
        if y[self.pivots.len()..].iter().any(|v| !f.is_zero(v)) {
            return None;
        }
        let mut x = vec![f.zero(); self.cols];
        for (k, &p) in self.pivots.iter().enumerate() {
            x[p] = y[k].clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};

    #[test]
    fn rref_over_f2() {
        let f = Fp::new(2).unwrap();
        let m = Matrix::from_i64(&f, &[&[1, 1, 0], &[1, 1, 1], &[0, 0, 1]]);
        let r = m.rref();
        assert_eq!(r.pivots, vec![0, 2]);
        assert_eq!(r.matrix, Matrix::from_i64(&f, &[&[1, 1, 0], &[0, 0, 1], &[0, 0, 0]]));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let q = Rationals;
        let m = Matrix::from_i64(&q, &[&[1, 2, 3, 4], &[2, 4, 7, 1]]);
        let k = m.kernel_vectors();
        assert_eq!(k.len(), 2);
        for v in k {
            assert!(m.apply(&v).iter().all(|x| q.is_zero(x)));
        }
    }

    #[test]
    fn inverse_and_solve() {
        let f = Fp::new(5).unwrap();
        let m = Matrix::from_i64(&f, &[&[2, 1], &[1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(&f, 2));
        let x = m.solve(&[1, 0]).unwrap();
        assert_eq!(m.apply(&x), vec![1, 0]);
        let singular = Matrix::from_i64(&f, &[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&[0, 1]).is_none());
    }

    #[test]
    fn pow_counts_products() {
        let f = Fp::new(2).unwrap();
        let m = Matrix::from_i64(&f, &[&[1, 1], &[0, 1]]);
        let (p, count) = m.pow(5);
        assert_eq!(p, Matrix::from_i64(&f, &[&[1, 1], &[0, 1]]));
        assert_eq!(count, 3);
    }
}
