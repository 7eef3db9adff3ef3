//! Filtered periodic complexes: per-step monodromy, the persistence maps
//! between steps, and the unimodality check for generalized kernels.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::complex::{homology, inclusion_by_id, induced_map};
use crate::error::{Error, Result};
use crate::exactla::{Matrix, Subspace};
use crate::exec::Exec;
use crate::field::Field;
use crate::monodromy::{build_monodromy_with, MonodromyOptions, MonodromySet};
use crate::periodic::{build_window, PeriodicComplex, WindowPair};
use crate::toroidal::{classify_with, Classification};

/// One filtration step.
#[derive(Clone, Debug)]
pub struct Step<F: Field> {
    pub value: i64,
    pub window: WindowPair<F>,
    pub monodromy: MonodromySet<F>,
}

/// Which side of the window a check refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    V,
    U,
}

/// A pair of steps where `ι ∘ M_{V_k} ≠ M_{V_ℓ} ∘ ι`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommutationFailure {
    pub degree: usize,
    /// Step indices (0-based) and values.
    pub k: usize,
    pub l: usize,
    pub k_value: i64,
    pub l_value: i64,
}

#[derive(Clone, Debug)]
pub struct FiltrationAnalysis<F: Field> {
    pub complex: PeriodicComplex<F>,
    pub steps: Vec<Step<F>>,
    /// `ι_{kℓ} : H_q(V_k) → H_q(V_ℓ)` keyed by `(q, k, ℓ)` for `k ≤ ℓ`.
    pub iota_v: BTreeMap<(usize, usize, usize), Matrix<F>>,
    /// `κ_{kℓ} : H_q(U_k) → H_q(U_ℓ)`.
    pub iota_u: BTreeMap<(usize, usize, usize), Matrix<F>>,
    pub commutation_log: Vec<CommutationFailure>,
}

impl<F: Field> FiltrationAnalysis<F> {
    pub fn degrees(&self) -> usize {
        self.complex.degrees()
    }

    pub fn iota(&self, side: Side, q: usize, k: usize, l: usize) -> Option<&Matrix<F>> {
        match side {
            Side::V => self.iota_v.get(&(q, k, l)),
            Side::U => self.iota_u.get(&(q, k, l)),
        }
    }
}

/// Builds every per-step object of a filtered, normalized periodic complex.
///
/// The window at step `s` is `(U ∩ K_s, V ∩ K_s)` for the window `(U, V)` of
/// the whole complex, so `V_k ⊆ V_ℓ` for `k ≤ ℓ` by construction.
pub fn analyze_filtration<F: Field>(p: &PeriodicComplex<F>, options: MonodromyOptions) -> Result<FiltrationAnalysis<F>> {
    analyze_filtration_with(p, options, Exec::default())
}

pub fn analyze_filtration_with<F: Field>(
    p: &PeriodicComplex<F>,
    options: MonodromyOptions,
    exec: Exec,
) -> Result<FiltrationAnalysis<F>> {
    if p.filtration().is_none() {
        return Err(Error::invalid("complex has no filtration"));
    }
    let full = build_window(p)?;
    let values = p.filtration_steps();
    let steps = exec
        .map(&values, |&value| -> Result<Step<F>> {
            let window = full.sublevel(value)?;
            let monodromy = build_monodromy_with(&window, options, Exec::Sequential)?;
            Ok(Step { value, window, monodromy })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    let s = steps.len();
    let pairs: Vec<(usize, usize)> = (0..s).flat_map(|k| (k..s).map(move |l| (k, l))).collect();
    let maps = exec
        .map(&pairs, |&(k, l)| -> Result<(Vec<Matrix<F>>, Vec<Matrix<F>>)> {
            let (a, b) = (&steps[k], &steps[l]);
            let iv = inclusion_by_id(&a.window.v, &b.window.v)?;
            let iu = inclusion_by_id(&a.window.u, &b.window.u)?;
            Ok((
                induced_map(&iv, &a.monodromy.hv, &b.monodromy.hv)?,
                induced_map(&iu, &a.monodromy.hu, &b.monodromy.hu)?,
            ))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut iota_v = BTreeMap::new();
    let mut iota_u = BTreeMap::new();
    for (&(k, l), (mv, mu)) in pairs.iter().zip(maps) {
        for (q, m) in mv.into_iter().enumerate() {
            iota_v.insert((q, k, l), m);
        }
        for (q, m) in mu.into_iter().enumerate() {
            iota_u.insert((q, k, l), m);
        }
    }

    let mut commutation_log = Vec::new();
    for &(k, l) in &pairs {
        for q in 0..p.degrees() {
            let (Some(iota), Some(mk), Some(ml)) =
                (iota_v.get(&(q, k, l)), steps[k].monodromy.degree(q), steps[l].monodromy.degree(q))
            else {
                continue;
            };
            if iota.mul(&mk.m_v) != ml.m_v.mul(iota) {
                commutation_log.push(CommutationFailure {
                    degree: q,
                    k,
                    l,
                    k_value: steps[k].value,
                    l_value: steps[l].value,
                });
            }
        }
    }
    commutation_log.sort_by_key(|c| (c.degree, c.k, c.l));
    Ok(FiltrationAnalysis { complex: p.clone(), steps, iota_v, iota_u, commutation_log })
}

/// A triple violating unimodality, with a witness vector in `H_q(·_k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnimodalityViolation {
    pub side: Side,
    pub degree: usize,
    pub k: usize,
    pub l: usize,
    pub m: usize,
    pub witness: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnimodalityVerdict {
    pub degree: usize,
    pub triples_checked: usize,
    pub holds: bool,
    pub violations: Vec<UnimodalityViolation>,
}

fn generalized_kernel<F: Field>(ms: &MonodromySet<F>, side: Side, q: usize) -> Option<&Subspace<F>> {
    ms.degree(q).map(|d| match side {
        Side::V => &d.fit_v.gker,
        Side::U => &d.fit_u.gker,
    })
}

fn generalized_image<F: Field>(ms: &MonodromySet<F>, side: Side, q: usize) -> Option<&Subspace<F>> {
    ms.degree(q).map(|d| match side {
        Side::V => &d.fit_v.gim,
        Side::U => &d.fit_u.gim,
    })
}

/// For all `k ≤ ℓ ≤ m`, checks
/// `ι_{kℓ}⁻¹(gker M_ℓ) ∩ gim M_k ⊆ ι_{km}⁻¹(gker M_m) ∩ gim M_k`
/// for both `M_V` and `M_U`, one verdict per degree.
pub fn check_unimodality<F: Field>(fa: &FiltrationAnalysis<F>) -> Vec<UnimodalityVerdict> {
    check_unimodality_with(fa, Exec::default())
}

pub fn check_unimodality_with<F: Field>(fa: &FiltrationAnalysis<F>, exec: Exec) -> Vec<UnimodalityVerdict> {
    let s = fa.steps.len();
    let mut jobs = Vec::new();
    for q in 0..fa.degrees() {
        for side in [Side::V, Side::U] {
            for k in 0..s {
                for m in k..s {
                    jobs.push((q, side, k, m));
                }
            }
        }
    }
    let results = exec.map(&jobs, |&(q, side, k, m)| {
        let mut violations = Vec::new();
        let mut checked = 0;
        let ms_k = &fa.steps[k].monodromy;
        let (Some(gim_k), Some(iota_km), Some(gker_m)) = (
            generalized_image(ms_k, side, q),
            fa.iota(side, q, k, m),
            generalized_kernel(&fa.steps[m].monodromy, side, q),
        ) else {
            return (q, 0, violations);
        };
        let rhs = gker_m.preimage(iota_km).intersection(gim_k);
        for l in k..=m {
            checked += 1;
            let (Some(iota_kl), Some(gker_l)) =
                (fa.iota(side, q, k, l), generalized_kernel(&fa.steps[l].monodromy, side, q))
            else {
                continue;
            };
            let lhs = gker_l.preimage(iota_kl).intersection(gim_k);
            if let Some(w) = lhs.vectors().iter().find(|v| !rhs.contains(v)) {
                let f = fa.complex.field();
                violations.push(UnimodalityViolation {
                    side,
                    degree: q,
                    k,
                    l,
                    m,
                    witness: w.iter().map(|x| f.format(x)).collect(),
                });
            }
        }
        (q, checked, violations)
    });
    let mut verdicts: Vec<UnimodalityVerdict> = (0..fa.degrees())
        .map(|degree| UnimodalityVerdict { degree, triples_checked: 0, holds: true, violations: Vec::new() })
        .collect();
    for (q, checked, violations) in results {
        let v = &mut verdicts[q];
        v.triples_checked += checked;
        v.holds &= violations.is_empty();
        v.violations.extend(violations);
    }
    verdicts
}

/// When a generalized-image class born at one step dies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TimelineEntry {
    pub degree: usize,
    pub birth_step: i64,
    /// Index of the class among the canonical basis of `gim(M_V)` at birth.
    pub class_index: usize,
    pub class: Vec<String>,
    /// First later step where the pushforward lies in `gker(M_V)`.
    pub death_step: Option<i64>,
    /// The pushforward left `gker` again after dying (a unimodality failure).
    pub returns: bool,
}

#[derive(Clone, Debug)]
pub struct Timeline<F: Field> {
    pub n: usize,
    pub entries: Vec<TimelineEntry>,
    /// Classification of `G_n` at every step.
    pub per_step: Vec<(i64, Classification<F>)>,
}

/// Tracks every canonical `gim(M_V)` class through the filtration, and
/// classifies `G_n` of each sublevel complex.
pub fn toroidal_timeline<F: Field>(fa: &FiltrationAnalysis<F>, n: usize) -> Result<Timeline<F>> {
    toroidal_timeline_with(fa, n, Exec::default())
}

pub fn toroidal_timeline_with<F: Field>(fa: &FiltrationAnalysis<F>, n: usize, exec: Exec) -> Result<Timeline<F>> {
    let f = fa.complex.field().clone();
    let s = fa.steps.len();
    let mut entries = Vec::new();
    for k in 0..s {
        for q in 0..fa.degrees() {
            let Some(gim) = generalized_image(&fa.steps[k].monodromy, Side::V, q) else {
                continue;
            };
            for (idx, theta) in gim.vectors().iter().enumerate() {
                let mut death = None;
                let mut returns = false;
                for l in k..s {
                    let (Some(iota), Some(gker)) =
                        (fa.iota(Side::V, q, k, l), generalized_kernel(&fa.steps[l].monodromy, Side::V, q))
                    else {
                        continue;
                    };
                    let dead = gker.contains(&iota.apply(theta));
                    match (death, dead) {
                        (None, true) => death = Some(fa.steps[l].value),
                        (Some(_), false) => returns = true,
                        _ => {}
                    }
                }
                entries.push(TimelineEntry {
                    degree: q,
                    birth_step: fa.steps[k].value,
                    class_index: idx,
                    class: theta.iter().map(|x| f.format(x)).collect(),
                    death_step: death,
                    returns,
                });
            }
        }
    }
    let idx: Vec<usize> = (0..s).collect();
    let per_step = exec
        .map(&idx, |&k| -> Result<(i64, Classification<F>)> {
            let step = &fa.steps[k];
            let sub = fa.complex.sublevel(step.value)?;
            Ok((step.value, classify_with(&sub, &step.monodromy, n, None, Exec::Sequential)?))
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(Timeline { n, entries, per_step })
}

/// Homology of the window pieces at each step, `(step, betti(U), betti(V))`.
pub fn step_betti<F: Field>(fa: &FiltrationAnalysis<F>) -> Vec<(i64, Vec<usize>, Vec<usize>)> {
    fa.steps
        .iter()
        .map(|s| (s.value, homology(&s.window.u).betti_numbers(), homology(&s.window.v).betti_numbers()))
        .collect()
}
