//! Periodic complexes given by orbit cells under a free `Z`-action, and the
//! finite complexes derived from them: the window pair `(U, V)`, the cyclic
//! quotients `G_n` and the finite strips.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::complex::{subcomplex_at_step, CellComplex, ChainMap};
use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::field::Field;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitCell {
    pub id: String,
    pub dim: usize,
}

/// `coeff · t^shift · face` in the boundary of an orbit cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryEntry<F: Field> {
    pub face: usize,
    pub shift: i64,
    pub coeff: F::Elem,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicComplex<F: Field> {
    field: F,
    cells: Vec<OrbitCell>,
    boundary: Vec<Vec<BoundaryEntry<F>>>,
    filtration: Option<Vec<i64>>,
}

/// Outcome of [`normalize`].
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized<F: Field> {
    pub complex: PeriodicComplex<F>,
    /// Coarsening factor: the new generator is `t^r`.
    pub period_factor: usize,
    /// Per-cell shift applied to the orbit representative (after coarsening).
    pub offsets: Vec<i64>,
}

const MAX_COARSENING: usize = 64;

impl<F: Field> PeriodicComplex<F> {
    /// Assembles a periodic complex, merging repeated boundary entries and
    /// validating it.
    pub fn new(
        field: F,
        cells: Vec<OrbitCell>,
        boundary: Vec<Vec<BoundaryEntry<F>>>,
        filtration: Option<Vec<i64>>,
    ) -> Result<Self> {
        if boundary.len() != cells.len() {
            return Err(Error::invalid("one boundary list per cell is required"));
        }
        let boundary = boundary.into_iter().map(|b| merge_entries(&field, b)).collect();
        let p = PeriodicComplex { field, cells, boundary, filtration };
        p.validate()?;
        Ok(p)
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn cells(&self) -> &[OrbitCell] {
        &self.cells
    }
    pub fn boundary_of(&self, cell: usize) -> &[BoundaryEntry<F>] {
        &self.boundary[cell]
    }
    pub fn filtration(&self) -> Option<&[i64]> {
        self.filtration.as_deref()
    }

    pub fn top_dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    /// Number of degrees (top dimension + 1, or 0 when empty).
    pub fn degrees(&self) -> usize {
        self.top_dim().map_or(0, |d| d + 1)
    }

    /// Orbit cells of dimension `k`, in input order.
    pub fn orbit_cells(&self, k: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim == k).collect()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }

    /// Distinct filtration values in increasing order.
    pub fn filtration_steps(&self) -> Vec<i64> {
        let mut s: Vec<i64> = self.filtration.clone().unwrap_or_default();
        s.sort_unstable();
        s.dedup();
        s
    }

    fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for c in &self.cells {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::invalid(format!("duplicate cell id {:?}", c.id)));
            }
        }
        for (e, entries) in self.boundary.iter().enumerate() {
            let dim = self.cells[e].dim;
            for en in entries {
                let Some(face) = self.cells.get(en.face) else {
                    return Err(Error::invalid(format!("cell {} has an unknown face", self.cells[e].id)));
                };
                if dim == 0 || face.dim + 1 != dim {
                    return Err(Error::invalid(format!(
                        "cell {} (dim {dim}) has face {} of dim {}",
                        self.cells[e].id, face.id, face.dim
                    )));
                }
            }
        }
        // twisted ∂∂ = 0
        for (e, entries) in self.boundary.iter().enumerate() {
            let mut acc: BTreeMap<(usize, i64), F::Elem> = BTreeMap::new();
            for en in entries {
                for g in &self.boundary[en.face] {
                    let key = (g.face, en.shift + g.shift);
                    let term = self.field.mul(&en.coeff, &g.coeff);
                    let cur = acc.remove(&key).unwrap_or_else(|| self.field.zero());
                    acc.insert(key, self.field.add(&cur, &term));
                }
            }
            if let Some(((g, s), _)) = acc.iter().find(|(_, v)| !self.field.is_zero(v)) {
                return Err(Error::invalid(format!(
                    "boundary of boundary of {} is nonzero at {} shifted by {s}",
                    self.cells[e].id, self.cells[*g].id
                )));
            }
        }
        if let Some(filt) = &self.filtration {
            if filt.len() != self.cells.len() {
                return Err(Error::invalid("filtration does not cover every cell"));
            }
            for (e, entries) in self.boundary.iter().enumerate() {
                for en in entries {
                    if filt[en.face] > filt[e] {
                        return Err(Error::invalid(format!(
                            "cell {} appears before its face {}",
                            self.cells[e].id, self.cells[en.face].id
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// `(cell, cumulative shift)` pairs in the closure of each orbit cell,
    /// excluding the cell itself.
    fn closures(&self) -> Vec<HashSet<(usize, i64)>> {
        let mut memo: Vec<Option<HashSet<(usize, i64)>>> = vec![None; self.cells.len()];
        let mut order: Vec<usize> = (0..self.cells.len()).collect();
        order.sort_by_key(|&i| self.cells[i].dim);
        for e in order {
            let mut set = HashSet::new();
            for en in &self.boundary[e] {
                set.insert((en.face, en.shift));
                for &(g, s) in memo[en.face].as_ref().expect("faces processed first") {
                    set.insert((g, en.shift + s));
                }
            }
            memo[e] = Some(set);
        }
        memo.into_iter().map(|s| s.unwrap_or_default()).collect()
    }

    /// Whether every closure `cl(c, 0)` lies within shifts `{0, 1}`.
    pub fn is_normalized(&self) -> bool {
        self.closures().iter().all(|cl| cl.iter().all(|&(_, s)| s == 0 || s == 1))
    }

    /// Orbit cells hit at shift 1 by some closure `cl(c, 0)`; these are the
    /// orbit cells of `V`.
    pub fn shift_one_cells(&self) -> Vec<bool> {
        let mut hit = vec![false; self.cells.len()];
        for cl in self.closures() {
            for (g, s) in cl {
                if s == 1 {
                    hit[g] = true;
                }
            }
        }
        hit
    }

    /// The subcomplex of orbit cells with filtration value at most `step`.
    pub fn sublevel(&self, step: i64) -> Result<Self> {
        let filt = self.filtration.as_ref().ok_or_else(|| Error::invalid("complex has no filtration"))?;
        let keep: Vec<usize> = (0..self.cells.len()).filter(|&i| filt[i] <= step).collect();
        let mut new_index = vec![usize::MAX; self.cells.len()];
        for (n, &o) in keep.iter().enumerate() {
            new_index[o] = n;
        }
        let cells = keep.iter().map(|&i| self.cells[i].clone()).collect();
        let boundary = keep
            .iter()
            .map(|&i| {
                self.boundary[i]
                    .iter()
                    .map(|en| BoundaryEntry { face: new_index[en.face], shift: en.shift, coeff: en.coeff.clone() })
                    .collect()
            })
            .collect();
        let filtration = Some(keep.iter().map(|&i| filt[i]).collect());
        PeriodicComplex::new(self.field.clone(), cells, boundary, filtration)
    }

    /// Same complex without filtration data.
    pub fn without_filtration(&self) -> Self {
        PeriodicComplex { filtration: None, ..self.clone() }
    }

    /// Re-expresses the complex over the generator `t^r`.
    fn coarsen(&self, r: usize) -> Self {
        let n = self.cells.len();
        let ri = r as i64;
        let mut cells = Vec::with_capacity(n * r);
        let mut boundary = Vec::with_capacity(n * r);
        let mut filtration = self.filtration.as_ref().map(|_| Vec::with_capacity(n * r));
        for k in 0..r {
            for (c, cell) in self.cells.iter().enumerate() {
                cells.push(OrbitCell { id: format!("{}~{k}", cell.id), dim: cell.dim });
                boundary.push(
                    self.boundary[c]
                        .iter()
                        .map(|en| {
                            let total = k as i64 + en.shift;
                            BoundaryEntry {
                                face: total.rem_euclid(ri) as usize * n + en.face,
                                shift: total.div_euclid(ri),
                                coeff: en.coeff.clone(),
                            }
                        })
                        .collect(),
                );
                if let (Some(out), Some(f)) = (filtration.as_mut(), self.filtration.as_ref()) {
                    out.push(f[c]);
                }
            }
        }
        PeriodicComplex { field: self.field.clone(), cells, boundary, filtration }
    }

    fn with_offsets(&self, offsets: &[i64]) -> Self {
        let boundary = self
            .boundary
            .iter()
            .enumerate()
            .map(|(e, entries)| {
                merge_entries(
                    &self.field,
                    entries
                        .iter()
                        .map(|en| BoundaryEntry {
                            face: en.face,
                            shift: en.shift + offsets[en.face] - offsets[e],
                            coeff: en.coeff.clone(),
                        })
                        .collect(),
                )
            })
            .collect();
        PeriodicComplex { boundary, ..self.clone() }
    }

    /// Per-cell offsets putting every closure within shifts `{0, 1}`, found
    /// as a solution of difference constraints, or `None`.
    fn find_offsets(&self) -> Option<Vec<i64>> {
        let n = self.cells.len();
        // o[c] - o[e] in [-min_s, 1 - max_s] for every c in cl(e)
        let mut bounds: HashMap<(usize, usize), (i64, i64)> = HashMap::new();
        for (e, cl) in self.closures().into_iter().enumerate() {
            for (c, s) in cl {
                let b = bounds.entry((e, c)).or_insert((s, s));
                b.0 = b.0.min(s);
                b.1 = b.1.max(s);
            }
        }
        // edge (u -> v, w) encodes o[v] <= o[u] + w
        let mut edges: Vec<(usize, usize, i64)> = Vec::new();
        let mut keys: Vec<_> = bounds.into_iter().collect();
        keys.sort_unstable();
        for ((e, c), (lo, hi)) in keys {
            if hi - lo > 1 {
                return None;
            }
            edges.push((e, c, 1 - hi));
            edges.push((c, e, lo));
        }
        let mut dist = vec![0i64; n];
        for round in 0..=n {
            let mut changed = false;
            for &(u, v, w) in &edges {
                if dist[u] + w < dist[v] {
                    dist[v] = dist[u] + w;
                    changed = true;
                }
            }
            if !changed {
                return Some(dist);
            }
            if round == n {
                return None;
            }
        }
        None
    }
}

fn merge_entries<F: Field>(field: &F, entries: Vec<BoundaryEntry<F>>) -> Vec<BoundaryEntry<F>> {
    let mut out: Vec<BoundaryEntry<F>> = Vec::new();
    for en in entries {
        if let Some(prev) = out.iter_mut().find(|p| p.face == en.face && p.shift == en.shift) {
            prev.coeff = field.add(&prev.coeff, &en.coeff);
        } else {
            out.push(en);
        }
    }
    out.retain(|en| !field.is_zero(&en.coeff));
    out
}

/// Chooses orbit representatives so that every closure `cl(c, 0)` lies
/// within shifts `{0, 1}`, coarsening the period when that is impossible.
/// Already-normalized complexes are returned unchanged.
pub fn normalize<F: Field>(p: &PeriodicComplex<F>) -> Result<Normalized<F>> {
    for r in 1..=MAX_COARSENING {
        let q = if r == 1 { p.clone() } else { p.coarsen(r) };
        if q.is_normalized() {
            let offsets = vec![0; q.cells.len()];
            return Ok(Normalized { complex: q, period_factor: r, offsets });
        }
        if let Some(offsets) = q.find_offsets() {
            let complex = q.with_offsets(&offsets);
            debug_assert!(complex.is_normalized());
            return Ok(Normalized { complex, period_factor: r, offsets });
        }
    }
    Err(Error::invalid(format!("no normalization found with period coarsening up to {MAX_COARSENING}")))
}

fn id_at(id: &str, shift: impl std::fmt::Display) -> String {
    format!("{id}@{shift}")
}

/// The window pair: `U` is the union of closures of the shift-0 cells and
/// `V = U ∩ tU`, with the inclusion `i` and the shift-back map `j`.
#[derive(Clone, Debug)]
pub struct WindowPair<F: Field> {
    pub u: CellComplex<F>,
    pub v: CellComplex<F>,
    /// `V ↪ U`, `(c, 1) ↦ (c, 1)`.
    pub i: ChainMap<F>,
    /// `V → U`, `(c, 1) ↦ (c, 0)`.
    pub j: ChainMap<F>,
    /// Per degree, the `(orbit cell, shift)` of each `U` cell.
    pub u_cells: Vec<Vec<(usize, i64)>>,
    /// Per degree, the orbit cell of each `V` cell (all at shift 1).
    pub v_cells: Vec<Vec<usize>>,
}

/// Builds the window pair of a normalized periodic complex. Cells of `U` are
/// ordered with all shift-0 cells first, then shift-1 cells, each block in
/// orbit order.
pub fn build_window<F: Field>(p: &PeriodicComplex<F>) -> Result<WindowPair<F>> {
    if !p.is_normalized() {
        return Err(Error::invalid("periodic complex must be normalized before building the window"));
    }
    let f = p.field().clone();
    let degrees = p.degrees();
    let hit = p.shift_one_cells();
    let mut u_cells: Vec<Vec<(usize, i64)>> = Vec::with_capacity(degrees);
    let mut v_cells: Vec<Vec<usize>> = Vec::with_capacity(degrees);
    for k in 0..degrees {
        let orbit = p.orbit_cells(k);
        let ones: Vec<usize> = orbit.iter().copied().filter(|&c| hit[c]).collect();
        let mut uk: Vec<(usize, i64)> = orbit.iter().map(|&c| (c, 0)).collect();
        uk.extend(ones.iter().map(|&c| (c, 1)));
        u_cells.push(uk);
        v_cells.push(ones);
    }
    let u_pos: HashMap<(usize, i64), usize> = u_cells
        .iter()
        .flat_map(|cells| cells.iter().enumerate().map(|(i, &key)| (key, i)))
        .collect();
    let v_pos: HashMap<usize, usize> =
        v_cells.iter().flat_map(|cells| cells.iter().enumerate().map(|(i, &c)| (c, i))).collect();

    let mut u_boundary = Vec::with_capacity(degrees);
    let mut v_boundary = Vec::with_capacity(degrees);
    for k in 0..degrees {
        let rows_u = if k == 0 { 0 } else { u_cells[k - 1].len() };
        let rows_v = if k == 0 { 0 } else { v_cells[k - 1].len() };
        let mut du = Matrix::zeros(&f, rows_u, u_cells[k].len());
        for (col, &(c, s)) in u_cells[k].iter().enumerate() {
            for en in p.boundary_of(c) {
                let row = *u_pos
                    .get(&(en.face, s + en.shift))
                    .ok_or_else(|| Error::internal("window is not closed under faces"))?;
                du.set(row, col, f.add(du.get(row, col), &en.coeff));
            }
        }
        let mut dv = Matrix::zeros(&f, rows_v, v_cells[k].len());
        for (col, &c) in v_cells[k].iter().enumerate() {
            for en in p.boundary_of(c) {
                if en.shift != 0 {
                    return Err(Error::internal("shift-1 cell has a face outside the window"));
                }
                let row = v_pos[&en.face];
                dv.set(row, col, f.add(dv.get(row, col), &en.coeff));
            }
        }
        u_boundary.push(du);
        v_boundary.push(dv);
    }
    let name_u = |k: usize| -> Vec<String> {
        u_cells[k].iter().map(|&(c, s)| id_at(&p.cells()[c].id, s)).collect()
    };
    let name_v = |k: usize| -> Vec<String> { v_cells[k].iter().map(|&c| id_at(&p.cells()[c].id, 1)).collect() };
    let filt_u = p.filtration().map(|filt| {
        u_cells.iter().map(|cells| cells.iter().map(|&(c, _)| filt[c]).collect()).collect()
    });
    let filt_v = p.filtration().map(|filt| v_cells.iter().map(|cells| cells.iter().map(|&c| filt[c]).collect()).collect());
    let u = CellComplex::new(f.clone(), (0..degrees).map(name_u).collect(), u_boundary, filt_u)?;
    let v = CellComplex::new(f.clone(), (0..degrees).map(name_v).collect(), v_boundary, filt_v)?;

    let map = |shift: i64| -> ChainMap<F> {
        let maps = (0..degrees)
            .map(|k| {
                let mut m = Matrix::zeros(&f, u_cells[k].len(), v_cells[k].len());
                for (col, &c) in v_cells[k].iter().enumerate() {
                    m.set(u_pos[&(c, shift)], col, f.one());
                }
                m
            })
            .collect();
        ChainMap { maps }
    };
    let i = map(1);
    let j = map(0);
    i.validate(&v, &u)?;
    j.validate(&v, &u)?;
    Ok(WindowPair { u, v, i, j, u_cells, v_cells })
}

impl<F: Field> WindowPair<F> {
    /// The pair `(U ∩ K_s, V ∩ K_s)` for the sublevel set at `step`, with the
    /// restricted maps. Requires a filtration on the cells.
    pub fn sublevel(&self, step: i64) -> Result<WindowPair<F>> {
        let (u, inc_u) = subcomplex_at_step(&self.u, step)?;
        let (v, inc_v) = subcomplex_at_step(&self.v, step)?;
        let restrict = |m: &ChainMap<F>| -> ChainMap<F> {
            let maps = (0..self.u.degrees())
                .map(|k| inc_u.maps[k].transpose().mul(&m.maps[k]).mul(&inc_v.maps[k]))
                .collect();
            ChainMap { maps }
        };
        let i = restrict(&self.i);
        let j = restrict(&self.j);
        i.validate(&v, &u)?;
        j.validate(&v, &u)?;
        let filt_u = self.u.filtration().expect("checked by subcomplex_at_step");
        let filt_v = self.v.filtration().expect("checked by subcomplex_at_step");
        let u_cells = self
            .u_cells
            .iter()
            .enumerate()
            .map(|(k, cells)| cells.iter().enumerate().filter(|(x, _)| filt_u[k][*x] <= step).map(|(_, &c)| c).collect())
            .collect();
        let v_cells = self
            .v_cells
            .iter()
            .enumerate()
            .map(|(k, cells)| cells.iter().enumerate().filter(|(x, _)| filt_v[k][*x] <= step).map(|(_, &c)| c).collect())
            .collect();
        Ok(WindowPair { u, v, i, j, u_cells, v_cells })
    }
}

/// The cyclic quotient `G_n = K / t^n`.
#[derive(Clone, Debug)]
pub struct QuotientComplex<F: Field> {
    pub complex: CellComplex<F>,
    pub n: usize,
    /// Per degree, the `(orbit cell, copy index)` of each cell.
    pub cells: Vec<Vec<(usize, usize)>>,
}

impl<F: Field> QuotientComplex<F> {
    /// Position of `(orbit cell, copy)` within its degree.
    pub fn position(&self, k: usize, orbit: usize, copy: usize) -> Option<usize> {
        self.cells.get(k)?.iter().position(|&key| key == (orbit, copy))
    }

    /// The deck transformation `(c, ℓ) ↦ (c, ℓ + 1 mod n)`.
    pub fn deck(&self) -> ChainMap<F> {
        let f = self.complex.field();
        let maps = self
            .cells
            .iter()
            .enumerate()
            .map(|(k, cells)| {
                let mut m = Matrix::zeros(f, cells.len(), cells.len());
                for (col, &(c, l)) in cells.iter().enumerate() {
                    let row = self.position(k, c, (l + 1) % self.n).expect("copy exists");
                    m.set(row, col, f.one());
                }
                m
            })
            .collect();
        ChainMap { maps }
    }
}

/// Builds `G_n` with cells ordered copy by copy, each copy in orbit order.
pub fn build_quotient<F: Field>(p: &PeriodicComplex<F>, n: usize) -> Result<QuotientComplex<F>> {
    if n == 0 {
        return Err(Error::invalid("quotient index n must be at least 1"));
    }
    let f = p.field().clone();
    let degrees = p.degrees();
    let cells: Vec<Vec<(usize, usize)>> = (0..degrees)
        .map(|k| {
            let orbit = p.orbit_cells(k);
            (0..n).flat_map(|l| orbit.iter().map(move |&c| (c, l))).collect()
        })
        .collect();
    let pos: HashMap<(usize, usize), usize> =
        cells.iter().flat_map(|cs| cs.iter().enumerate().map(|(i, &key)| (key, i))).collect();
    let ni = n as i64;
    let boundary = (0..degrees)
        .map(|k| {
            let rows = if k == 0 { 0 } else { cells[k - 1].len() };
            let mut d = Matrix::zeros(&f, rows, cells[k].len());
            for (col, &(c, l)) in cells[k].iter().enumerate() {
                for en in p.boundary_of(c) {
                    let copy = (l as i64 + en.shift).rem_euclid(ni) as usize;
                    let row = pos[&(en.face, copy)];
                    d.set(row, col, f.add(d.get(row, col), &en.coeff));
                }
            }
            d
        })
        .collect();
    let names = cells
        .iter()
        .map(|cs| cs.iter().map(|&(c, l)| id_at(&p.cells()[c].id, l)).collect())
        .collect();
    let complex = CellComplex::new(f, names, boundary, None)?;
    Ok(QuotientComplex { complex, n, cells })
}

/// The finite strip `t^0 U ∪ … ∪ t^(L-1) U`.
#[derive(Clone, Debug)]
pub struct Strip<F: Field> {
    pub complex: CellComplex<F>,
    pub length: usize,
    /// Per degree, the `(orbit cell, position)` of each cell.
    pub cells: Vec<Vec<(usize, usize)>>,
}

impl<F: Field> Strip<F> {
    /// The covering projection onto `G_n`, `(c, ℓ) ↦ (c, ℓ mod n)`.
    pub fn projection(&self, g: &QuotientComplex<F>) -> ChainMap<F> {
        let f = self.complex.field();
        let maps = self
            .cells
            .iter()
            .enumerate()
            .map(|(k, cells)| {
                let mut m = Matrix::zeros(f, g.complex.count(k), cells.len());
                for (col, &(c, l)) in cells.iter().enumerate() {
                    let row = g.position(k, c, l % g.n).expect("orbit cell present in quotient");
                    m.set(row, col, f.one());
                }
                m
            })
            .collect();
        ChainMap { maps }
    }
}

/// Builds the strip of length `L >= 1` of a normalized complex.
pub fn build_strip<F: Field>(p: &PeriodicComplex<F>, length: usize) -> Result<Strip<F>> {
    if length == 0 {
        return Err(Error::invalid("strip length must be at least 1"));
    }
    if !p.is_normalized() {
        return Err(Error::invalid("periodic complex must be normalized before building strips"));
    }
    let f = p.field().clone();
    let degrees = p.degrees();
    let hit = p.shift_one_cells();
    let cells: Vec<Vec<(usize, usize)>> = (0..degrees)
        .map(|k| {
            let orbit = p.orbit_cells(k);
            let mut cs: Vec<(usize, usize)> = (0..length).flat_map(|l| orbit.iter().map(move |&c| (c, l))).collect();
            cs.extend(orbit.iter().filter(|&&c| hit[c]).map(|&c| (c, length)));
            cs
        })
        .collect();
    let pos: HashMap<(usize, usize), usize> =
        cells.iter().flat_map(|cs| cs.iter().enumerate().map(|(i, &key)| (key, i))).collect();
    let boundary = (0..degrees)
        .map(|k| {
            let rows = if k == 0 { 0 } else { cells[k - 1].len() };
            let mut d = Matrix::zeros(&f, rows, cells[k].len());
            for (col, &(c, l)) in cells[k].iter().enumerate() {
                for en in p.boundary_of(c) {
                    let at = l as i64 + en.shift;
                    let row = *pos
                        .get(&(en.face, at as usize))
                        .ok_or_else(|| Error::internal("strip is not closed under faces"))?;
                    d.set(row, col, f.add(d.get(row, col), &en.coeff));
                }
            }
            Ok(d)
        })
        .collect::<Result<Vec<_>>>()?;
    let names = cells
        .iter()
        .map(|cs| cs.iter().map(|&(c, l)| id_at(&p.cells()[c].id, l)).collect())
        .collect();
    let complex = CellComplex::new(f, names, boundary, None)?;
    Ok(Strip { complex, length, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::homology;
    use crate::field::Fp;

    fn line(shift: i64) -> PeriodicComplex<Fp> {
        let f = Fp::new(2).unwrap();
        PeriodicComplex::new(
            f,
            vec![OrbitCell { id: "a".into(), dim: 0 }, OrbitCell { id: "e".into(), dim: 1 }],
            vec![
                vec![],
                vec![
                    BoundaryEntry { face: 0, shift: 0, coeff: 1 },
                    BoundaryEntry { face: 0, shift, coeff: 1 },
                ],
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn normalized_line_is_unchanged() {
        let p = line(1);
        let n = normalize(&p).unwrap();
        assert_eq!(n.period_factor, 1);
        assert_eq!(n.complex, p);
    }

    #[test]
    fn negative_shift_is_rechosen() {
        let n = normalize(&line(-1)).unwrap();
        assert_eq!(n.period_factor, 1);
        assert!(n.complex.is_normalized());
    }

    #[test]
    fn shift_two_loop_coarsens() {
        let n = normalize(&line(2)).unwrap();
        assert_eq!(n.period_factor, 2);
        assert_eq!(n.complex.orbit_cells(0).len(), 2);
    }

    #[test]
    fn line_window_and_quotients() {
        let p = line(1);
        let w = build_window(&p).unwrap();
        assert_eq!(w.u.count(0), 2);
        assert_eq!(w.v.count(0), 1);
        for n in 1..5 {
            let g = build_quotient(&p, n).unwrap();
            assert_eq!(homology(&g.complex).betti_numbers(), vec![1, 1]);
            g.deck().validate(&g.complex, &g.complex).unwrap();
        }
        let s = build_strip(&p, 3).unwrap();
        assert_eq!(homology(&s.complex).betti_numbers(), vec![1, 0]);
        let g = build_quotient(&p, 2).unwrap();
        s.projection(&g).validate(&s.complex, &g.complex).unwrap();
    }
}
