//! JSON formats for periodic complexes and chains in cyclic quotients.
//!
//! A complex file looks like
//!
//! ```json
//! {
//!   "field": {"kind": "Fp", "p": 2},
//!   "cells": [{"id": "a", "dim": 0}, {"id": "h", "dim": 1}],
//!   "boundary": [{"cell": "h", "entries": [
//!       {"cell": "a", "shift": 0, "coeff": 1},
//!       {"cell": "a", "shift": 1, "coeff": -1}]}],
//!   "filtration": {"a": 1, "h": 2}
//! }
//! ```
//!
//! Coefficients are integers or `"num/den"` strings. Filtration values that
//! are not all integers are replaced by their rank among the distinct values.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::complex::CellComplex;
use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec};
use crate::periodic::{BoundaryEntry, OrbitCell, PeriodicComplex, QuotientComplex};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Int(i64),
    Text(String),
}

impl Default for Coeff {
    fn default() -> Self {
        Coeff::Int(1)
    }
}

impl Coeff {
    pub fn to_elem<F: Field>(&self, f: &F) -> Result<F::Elem> {
        match self {
            Coeff::Int(v) => Ok(f.from_i64(*v)),
            Coeff::Text(s) => f.parse(s),
        }
    }

    pub fn from_elem<F: Field>(f: &F, a: &F::Elem) -> Self {
        let s = f.format(a);
        match s.parse::<i64>() {
            Ok(v) => Coeff::Int(v),
            Err(_) => Coeff::Text(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSpec {
    pub id: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub cell: String,
    #[serde(default)]
    pub shift: i64,
    #[serde(default)]
    pub coeff: Coeff,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    pub cell: String,
    pub entries: Vec<EntrySpec>,
}

/// A periodic complex as read from disk, before the field is fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default)]
    pub field: FieldSpec,
    pub cells: Vec<CellSpec>,
    #[serde(default)]
    pub boundary: Vec<BoundarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtration: Option<BTreeMap<String, serde_json::Number>>,
}

impl ComplexFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: ComplexFile =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed complex file: {e}")))?;
        file.field.validate()?;
        Ok(file)
    }

    /// Filtration values per cell id, rank-reindexed when not all integral.
    fn integer_filtration(&self) -> Result<Option<HashMap<String, i64>>> {
        let Some(raw) = &self.filtration else {
            return Ok(None);
        };
        let ints: Option<HashMap<String, i64>> =
            raw.iter().map(|(k, v)| v.as_i64().map(|x| (k.clone(), x))).collect();
        if let Some(ints) = ints {
            return Ok(Some(ints));
        }
        let mut values: Vec<f64> = raw
            .values()
            .map(|v| v.as_f64().ok_or_else(|| Error::invalid("filtration value is not a number")))
            .collect::<Result<_>>()?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("filtration values must be finite"));
        }
        values.sort_by(f64::total_cmp);
        values.dedup();
        let rank = |x: f64| values.partition_point(|&v| v < x) as i64 + 1;
        Ok(Some(raw.iter().map(|(k, v)| (k.clone(), rank(v.as_f64().unwrap_or(0.0)))).collect()))
    }

    pub fn build<F: Field>(&self, field: &F) -> Result<PeriodicComplex<F>> {
        let index: HashMap<&str, usize> =
            self.cells.iter().enumerate().map(|(i, c)| (c.id.as_str(), i)).collect();
        if index.len() != self.cells.len() {
            return Err(Error::invalid("duplicate cell ids"));
        }
        let mut boundary: Vec<Vec<BoundaryEntry<F>>> = vec![Vec::new(); self.cells.len()];
        let mut seen = vec![false; self.cells.len()];
        for b in &self.boundary {
            let &cell = index
                .get(b.cell.as_str())
                .ok_or_else(|| Error::invalid(format!("boundary given for unknown cell {:?}", b.cell)))?;
            if std::mem::replace(&mut seen[cell], true) {
                return Err(Error::invalid(format!("boundary of {:?} given twice", b.cell)));
            }
            for en in &b.entries {
                let &face = index
                    .get(en.cell.as_str())
                    .ok_or_else(|| Error::invalid(format!("unknown face {:?} of {:?}", en.cell, b.cell)))?;
                boundary[cell].push(BoundaryEntry { face, shift: en.shift, coeff: en.coeff.to_elem(field)? });
            }
        }
        let filtration = match self.integer_filtration()? {
            None => None,
            Some(map) => {
                if let Some(extra) = map.keys().find(|k| !index.contains_key(k.as_str())) {
                    return Err(Error::invalid(format!("filtration names unknown cell {extra:?}")));
                }
                Some(
                    self.cells
                        .iter()
                        .map(|c| {
                            map.get(&c.id)
                                .copied()
                                .ok_or_else(|| Error::invalid(format!("cell {:?} has no filtration value", c.id)))
                        })
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };
        let cells = self.cells.iter().map(|c| OrbitCell { id: c.id.clone(), dim: c.dim }).collect();
        PeriodicComplex::new(field.clone(), cells, boundary, filtration)
    }

    /// A finite complex written as a periodic one whose boundaries all stay
    /// at shift 0, so that it can be read back and validated.
    pub fn from_finite<F: Field>(c: &CellComplex<F>, name: Option<String>) -> Self {
        let f = c.field();
        let mut cells = Vec::new();
        let mut boundary = Vec::new();
        for k in 0..c.degrees() {
            let ids = c.cell_ids(k);
            cells.extend(ids.iter().map(|id| CellSpec { id: id.clone(), dim: k }));
            if k == 0 {
                continue;
            }
            let d = c.boundary(k);
            let faces = c.cell_ids(k - 1);
            for (col, id) in ids.iter().enumerate() {
                let entries: Vec<EntrySpec> = (0..d.rows())
                    .filter(|&r| !f.is_zero(d.get(r, col)))
                    .map(|r| EntrySpec { cell: faces[r].clone(), shift: 0, coeff: Coeff::from_elem(f, d.get(r, col)) })
                    .collect();
                if !entries.is_empty() {
                    boundary.push(BoundarySpec { cell: id.clone(), entries });
                }
            }
        }
        ComplexFile { schema: None, name, description: None, field: f.spec(), cells, boundary, filtration: None }
    }

    /// File representation of an in-memory complex.
    pub fn from_complex<F: Field>(p: &PeriodicComplex<F>, name: Option<String>) -> Self {
        let f = p.field();
        let cells = p.cells().iter().map(|c| CellSpec { id: c.id.clone(), dim: c.dim }).collect();
        let boundary = (0..p.cells().len())
            .filter(|&c| !p.boundary_of(c).is_empty())
            .map(|c| BoundarySpec {
                cell: p.cells()[c].id.clone(),
                entries: p
                    .boundary_of(c)
                    .iter()
                    .map(|en| EntrySpec {
                        cell: p.cells()[en.face].id.clone(),
                        shift: en.shift,
                        coeff: Coeff::from_elem(f, &en.coeff),
                    })
                    .collect(),
            })
            .collect();
        let filtration = p.filtration().map(|vals| {
            p.cells().iter().zip(vals).map(|(c, &v)| (c.id.clone(), serde_json::Number::from(v))).collect()
        });
        ComplexFile {
            schema: None,
            name,
            description: None,
            field: f.spec(),
            cells,
            boundary,
            filtration,
        }
    }
}

/// One term of a chain in `G_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainTerm {
    pub cell: String,
    #[serde(default)]
    pub copy: usize,
    #[serde(default)]
    pub coeff: Coeff,
}

/// A chain in `G_n`, as read from or written to a cycle file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub degree: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub entries: Vec<ChainTerm>,
}

impl ChainFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed cycle file: {e}")))
    }

    /// The chain as a coefficient vector on the cells of `G_n`.
    pub fn to_vector<F: Field>(&self, p: &PeriodicComplex<F>, g: &QuotientComplex<F>) -> Result<Vec<F::Elem>> {
        if let Some(n) = self.n {
            if n != g.n {
                return Err(Error::invalid(format!("cycle is for n = {n}, but n = {} was requested", g.n)));
            }
        }
        let f = p.field();
        let k = self.degree;
        let mut v = vec![f.zero(); g.complex.count(k)];
        for term in &self.entries {
            let orbit = p
                .index_of(&term.cell)
                .ok_or_else(|| Error::invalid(format!("unknown cell {:?} in cycle", term.cell)))?;
            if p.cells()[orbit].dim != k {
                return Err(Error::invalid(format!("cell {:?} is not of degree {k}", term.cell)));
            }
            if term.copy >= g.n {
                return Err(Error::invalid(format!("copy index {} out of range for n = {}", term.copy, g.n)));
            }
            let pos = g.position(k, orbit, term.copy).expect("cell exists in quotient");
            v[pos] = f.add(&v[pos], &term.coeff.to_elem(f)?);
        }
        Ok(v)
    }

    pub fn from_vector<F: Field>(p: &PeriodicComplex<F>, g: &QuotientComplex<F>, k: usize, v: &[F::Elem]) -> Self {
        let f = p.field();
        let entries = g
            .cells
            .get(k)
            .map(|cells| {
                cells
                    .iter()
                    .zip(v)
                    .filter(|(_, x)| !f.is_zero(x))
                    .map(|(&(c, l), x)| ChainTerm {
                        cell: p.cells()[c].id.clone(),
                        copy: l,
                        coeff: Coeff::from_elem(f, x),
                    })
                    .collect()
            })
            .unwrap_or_default();
        ChainFile { degree: k, n: Some(g.n), entries }
    }
}
