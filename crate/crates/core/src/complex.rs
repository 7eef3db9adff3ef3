//! Finite cell complexes, chain maps and homology with explicit bases.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::exactla::{Matrix, Solver, Subspace};
use crate::field::Field;

/// A finite chain complex with named cells.
///
/// `boundary[k]` is the matrix of `∂_k : C_k → C_{k-1}` in the order of
/// `cells[k]`; `boundary[0]` is the empty map out of `C_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellComplex<F: Field> {
    field: F,
    cells: Vec<Vec<String>>,
    boundary: Vec<Matrix<F>>,
    filtration: Option<Vec<Vec<i64>>>,
}

impl<F: Field> CellComplex<F> {
    /// Assembles and validates a complex.
    pub fn new(
        field: F,
        cells: Vec<Vec<String>>,
        boundary: Vec<Matrix<F>>,
        filtration: Option<Vec<Vec<i64>>>,
    ) -> Result<Self> {
        let c = CellComplex { field, cells, boundary, filtration };
        validate(&c)?;
        Ok(c)
    }

    pub fn empty(field: F) -> Self {
        CellComplex { field, cells: Vec::new(), boundary: Vec::new(), filtration: None }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// Number of stored degrees (top dimension + 1).
    pub fn degrees(&self) -> usize {
        self.cells.len()
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.get(k).map_or(0, Vec::len)
    }

    pub fn cell_ids(&self, k: usize) -> &[String] {
        self.cells.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// `∂_k` as a `count(k-1) x count(k)` matrix (zero-sized outside range).
    pub fn boundary(&self, k: usize) -> Matrix<F> {
        match self.boundary.get(k) {
            Some(m) => m.clone(),
            None => Matrix::zeros(&self.field, if k == 0 { 0 } else { self.count(k - 1) }, self.count(k)),
        }
    }

    pub fn filtration(&self) -> Option<&[Vec<i64>]> {
        self.filtration.as_deref()
    }

    pub fn index_of(&self, k: usize, id: &str) -> Option<usize> {
        self.cells.get(k)?.iter().position(|c| c == id)
    }

    /// Map from cell id to `(degree, index)`.
    pub fn index(&self) -> HashMap<&str, (usize, usize)> {
        let mut m = HashMap::new();
        for (k, ids) in self.cells.iter().enumerate() {
            for (i, id) in ids.iter().enumerate() {
                m.insert(id.as_str(), (k, i));
            }
        }
        m
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 0 { c.len() as i64 } else { -(c.len() as i64) })
            .sum()
    }

    /// Nonzero entries of a chain as `(cell id, coefficient)` JSON objects.
    pub fn chain_to_json(&self, k: usize, chain: &[F::Elem]) -> serde_json::Value {
        let ids = self.cell_ids(k);
        serde_json::Value::Array(
            chain
                .iter()
                .enumerate()
                .filter(|(_, x)| !self.field.is_zero(x))
                .map(|(i, x)| serde_json::json!({ "cell": ids[i], "coeff": self.field.to_json(x) }))
                .collect(),
        )
    }

    pub fn chain_to_text(&self, k: usize, chain: &[F::Elem]) -> String {
        let ids = self.cell_ids(k);
        let terms: Vec<String> = chain
            .iter()
            .enumerate()
            .filter(|(_, x)| !self.field.is_zero(x))
            .map(|(i, x)| {
                if self.field.is_one(x) {
                    ids[i].clone()
                } else {
                    format!("{}*{}", self.field.format(x), ids[i])
                }
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// Checks shapes, `∂∘∂ = 0` and, if present, that the filtration is
/// monotone along faces.
pub fn validate<F: Field>(c: &CellComplex<F>) -> Result<()> {
    if c.boundary.len() != c.cells.len() {
        return Err(Error::invalid("one boundary matrix per degree is required"));
    }
    for (k, m) in c.boundary.iter().enumerate() {
        let rows = if k == 0 { 0 } else { c.count(k - 1) };
        if m.rows() != rows || m.cols() != c.count(k) {
            return Err(Error::invalid(format!(
                "boundary in degree {k} is {}x{}, expected {rows}x{}",
                m.rows(),
                m.cols(),
                c.count(k)
            )));
        }
    }
    for k in 2..c.boundary.len() {
        if !c.boundary[k - 1].mul(&c.boundary[k]).is_zero() {
            return Err(Error::invalid(format!("boundary of boundary is nonzero in degree {k}")));
        }
    }
    if let Some(filt) = &c.filtration {
        if filt.len() != c.cells.len() || filt.iter().zip(&c.cells).any(|(a, b)| a.len() != b.len()) {
            return Err(Error::invalid("filtration does not match the cells"));
        }
        for k in 1..c.boundary.len() {
            for j in 0..c.count(k) {
                for i in 0..c.count(k - 1) {
                    if !c.field.is_zero(c.boundary[k].get(i, j)) && filt[k - 1][i] > filt[k][j] {
                        return Err(Error::invalid(format!(
                            "cell {} appears before its face {}",
                            c.cells[k][j],
                            c.cells[k - 1][i]
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// A chain map given degreewise.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainMap<F: Field> {
    pub maps: Vec<Matrix<F>>,
}

impl<F: Field> ChainMap<F> {
    /// Matrix in degree `k`; zero-sized maps outside the stored range.
    pub fn degree(&self, k: usize, source: &CellComplex<F>, target: &CellComplex<F>) -> Matrix<F> {
        self.maps
            .get(k)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(source.field(), target.count(k), source.count(k)))
    }

    /// Shape checks and `∂ f = f ∂`.
    pub fn validate(&self, source: &CellComplex<F>, target: &CellComplex<F>) -> Result<()> {
        let top = source.degrees().max(target.degrees());
        for k in 0..top {
            let f = self.degree(k, source, target);
            if f.rows() != target.count(k) || f.cols() != source.count(k) {
                return Err(Error::invalid(format!("chain map has wrong shape in degree {k}")));
            }
            if k >= 1 {
                let lhs = target.boundary(k).mul(&f);
                let rhs = self.degree(k - 1, source, target).mul(&source.boundary(k));
                if lhs != rhs {
                    return Err(Error::invalid(format!("chain map does not commute with boundary in degree {k}")));
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &ChainMap<F>) -> ChainMap<F> {
        ChainMap { maps: self.maps.iter().zip(&after.maps).map(|(f, g)| g.mul(f)).collect() }
    }
}

/// Homology in one degree, with representatives and a coordinate solver.
#[derive(Clone, Debug)]
pub struct DegreeHomology<F: Field> {
    pub cycles: Subspace<F>,
    pub boundaries: Subspace<F>,
    pub representatives: Vec<Vec<F::Elem>>,
    solver: Solver<F>,
}

impl<F: Field> DegreeHomology<F> {
    pub fn betti(&self) -> usize {
        self.representatives.len()
    }

    /// Homology coordinates of a cycle.
    pub fn coordinates(&self, z: &[F::Elem]) -> Result<Vec<F::Elem>> {
        if z.len() != self.cycles.ambient() {
            return Err(Error::invalid("chain has the wrong length"));
        }
        if !self.cycles.contains(z) {
            return Err(Error::NotACycle("chain has nonzero boundary".into()));
        }
        let x = self
            .solver
            .solve(z)
            .ok_or_else(|| Error::internal("cycle not expressible in homology basis"))?;
        Ok(x[..self.betti()].to_vec())
    }

    /// The cycle `Σ coords[r] · rep_r`.
    pub fn representative(&self, coords: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.cycles.field();
        let mut out = vec![f.zero(); self.cycles.ambient()];
        for (c, rep) in coords.iter().zip(&self.representatives) {
            if f.is_zero(c) {
                continue;
            }
            for (o, r) in out.iter_mut().zip(rep) {
                *o = f.add(o, &f.mul(c, r));
            }
        }
        out
    }

    pub fn representatives_matrix(&self) -> Matrix<F> {
        Matrix::from_columns(self.cycles.field(), self.cycles.ambient(), &self.representatives)
    }
}

/// Homology in all degrees of a complex.
#[derive(Clone, Debug)]
pub struct HomologyBasis<F: Field> {
    field: F,
    degrees: Vec<DegreeHomology<F>>,
}

impl<F: Field> HomologyBasis<F> {
    pub fn top(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, k: usize) -> Option<&DegreeHomology<F>> {
        self.degrees.get(k)
    }

    pub fn betti(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, DegreeHomology::betti)
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        self.degrees.iter().map(DegreeHomology::betti).collect()
    }

    pub fn coordinates(&self, k: usize, z: &[F::Elem]) -> Result<Vec<F::Elem>> {
        match self.degrees.get(k) {
            Some(h) => h.coordinates(z),
            None if z.is_empty() => Ok(Vec::new()),
            None => Err(Error::invalid(format!("no cells in degree {k}"))),
        }
    }

    pub fn representative(&self, k: usize, coords: &[F::Elem]) -> Vec<F::Elem> {
        match self.degrees.get(k) {
            Some(h) => h.representative(coords),
            None => Vec::new(),
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
}

/// Homology with a deterministic basis.
///
/// Over `Q` representatives are the canonical basis of the harmonic cycles
/// `Z ∩ B^⊥`; over `F_p` they are the canonical cycle basis vectors that
/// extend a basis of the boundaries, taken greedily in order.
pub fn homology<F: Field>(c: &CellComplex<F>) -> HomologyBasis<F> {
    let f = c.field().clone();
    let degrees = (0..c.degrees())
        .map(|k| {
            let n = c.count(k);
            let cycles = if k == 0 { Subspace::full(&f, n) } else { c.boundary(k).kernel() };
            let boundaries = c.boundary(k + 1).column_space();
            let representatives: Vec<Vec<F::Elem>> = if f.anisotropic() {
                cycles.intersection(&boundaries.orthogonal()).vectors().to_vec()
            } else {
                let mut acc = boundaries.clone();
                cycles.vectors().iter().filter(|z| acc.insert((*z).clone())).cloned().collect()
            };
            let mut cols = representatives.clone();
            cols.extend(boundaries.vectors().iter().cloned());
            let solver = Matrix::from_columns(&f, n, &cols).solver();
            DegreeHomology { cycles, boundaries, representatives, solver }
        })
        .collect();
    HomologyBasis { field: f, degrees }
}

/// Matrices of the map induced on homology, one per degree.
pub fn induced_map<F: Field>(
    map: &ChainMap<F>,
    source: &HomologyBasis<F>,
    target: &HomologyBasis<F>,
) -> Result<Vec<Matrix<F>>> {
    let f = source.field().clone();
    let top = source.top().max(target.top());
    (0..top)
        .map(|k| {
            let cols: Result<Vec<Vec<F::Elem>>> = match (source.degree(k), map.maps.get(k)) {
                (Some(hs), Some(m)) => hs
                    .representatives
                    .iter()
                    .map(|rep| target.coordinates(k, &m.apply(rep)))
                    .collect(),
                _ => Ok(Vec::new()),
            };
            let cols = cols.map_err(|e| match e {
                Error::NotACycle(_) => Error::invalid(format!("map is not a chain map in degree {k}")),
                other => other,
            })?;
            Ok(Matrix::from_columns(&f, target.betti(k), &pad(cols, source.betti(k), target.betti(k), &f)))
        })
        .collect()
}

fn pad<F: Field>(mut cols: Vec<Vec<F::Elem>>, n: usize, len: usize, f: &F) -> Vec<Vec<F::Elem>> {
    cols.resize(n, vec![f.zero(); len]);
    cols
}

/// The subcomplex of cells with filtration value at most `step`, and its
/// inclusion.
pub fn subcomplex_at_step<F: Field>(c: &CellComplex<F>, step: i64) -> Result<(CellComplex<F>, ChainMap<F>)> {
    let filt = c.filtration().ok_or_else(|| Error::invalid("complex has no filtration"))?;
    let f = c.field().clone();
    let keep: Vec<Vec<usize>> =
        filt.iter().map(|vals| (0..vals.len()).filter(|&i| vals[i] <= step).collect()).collect();
    let cells = keep
        .iter()
        .enumerate()
        .map(|(k, idx)| idx.iter().map(|&i| c.cells[k][i].clone()).collect())
        .collect();
    let boundary = (0..c.degrees())
        .map(|k| {
            let rows: Vec<usize> = if k == 0 { Vec::new() } else { keep[k - 1].clone() };
            c.boundary(k).select_rows(&rows).select_columns(&keep[k])
        })
        .collect();
    let sub_filt = keep
        .iter()
        .enumerate()
        .map(|(k, idx)| idx.iter().map(|&i| filt[k][i]).collect())
        .collect();
    let sub = CellComplex::new(f.clone(), cells, boundary, Some(sub_filt))?;
    let maps = keep
        .iter()
        .enumerate()
        .map(|(k, idx)| {
            let mut m = Matrix::zeros(&f, c.count(k), idx.len());
            for (j, &i) in idx.iter().enumerate() {
                m.set(i, j, f.one());
            }
            m
        })
        .collect();
    Ok((sub, ChainMap { maps }))
}

/// Inclusion of a complex into another whose cells include all of its cells
/// (matched by id).
pub fn inclusion_by_id<F: Field>(sub: &CellComplex<F>, sup: &CellComplex<F>) -> Result<ChainMap<F>> {
    let f = sub.field().clone();
    let index = sup.index();
    let maps = (0..sub.degrees())
        .map(|k| {
            let mut m = Matrix::zeros(&f, sup.count(k), sub.count(k));
            for (j, id) in sub.cell_ids(k).iter().enumerate() {
                match index.get(id.as_str()) {
                    Some(&(kk, i)) if kk == k => m.set(i, j, f.one()),
                    _ => return Err(Error::invalid(format!("cell {id} missing from the larger complex"))),
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ChainMap { maps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rationals};

    fn circle<F: Field>(f: F) -> CellComplex<F> {
        // two vertices, two edges forming a loop
        let d1 = Matrix::from_i64(&f, &[&[-1, 1], &[1, -1]]);
        CellComplex::new(
            f.clone(),
            vec![vec!["v".into(), "w".into()], vec!["e".into(), "g".into()]],
            vec![Matrix::zeros(&f, 0, 2), d1],
            None,
        )
        .unwrap()
    }

    #[test]
    fn circle_betti() {
        let h = homology(&circle(Fp::new(2).unwrap()));
        assert_eq!(h.betti_numbers(), vec![1, 1]);
        let h = homology(&circle(Rationals));
        assert_eq!(h.betti_numbers(), vec![1, 1]);
    }

    #[test]
    fn harmonic_vertex_representative_over_q() {
        let q = Rationals;
        let h = homology(&circle(q));
        let rep = &h.degree(0).unwrap().representatives[0];
        assert_eq!(rep, &vec![q.from_i64(1), q.from_i64(1)]);
    }

    #[test]
    fn rejects_nonzero_square() {
        let f = Fp::new(3).unwrap();
        let d1 = Matrix::from_i64(&f, &[&[1]]);
        let d2 = Matrix::from_i64(&f, &[&[1]]);
        let r = CellComplex::new(
            f,
            vec![vec!["v".into()], vec!["e".into()], vec!["t".into()]],
            vec![Matrix::zeros(&f, 0, 1), d1, d2],
            None,
        );
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn identity_induces_identity() {
        let f = Fp::new(2).unwrap();
        let c = circle(f);
        let h = homology(&c);
        let id = inclusion_by_id(&c, &c).unwrap();
        let m = induced_map(&id, &h, &h).unwrap();
        assert_eq!(m[0], Matrix::identity(&f, 1));
        assert_eq!(m[1], Matrix::identity(&f, 1));
    }

    #[test]
    fn sublevel_complex() {
        let f = Fp::new(2).unwrap();
        let mut c = circle(f);
        c.filtration = Some(vec![vec![0, 0], vec![1, 2]]);
        let (sub, inc) = subcomplex_at_step(&c, 1).unwrap();
        assert_eq!(sub.count(1), 1);
        inc.validate(&sub, &c).unwrap();
        assert_eq!(homology(&sub).betti_numbers(), vec![1, 0]);
    }
}
