//! Seeded random periodic complexes and the sweep that runs every invariant
//! check on them.
//!
//! Complexes are generated already normalized: vertices, edges from `(a, 0)`
//! to `(b, s)` with `s ∈ {0, 1}`, and 2-cells glued along random cycles of
//! the part of the edge graph that stays inside shifts `{0, 1}`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{homology, inclusion_by_id};
use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::exec::Exec;
use crate::field::{Field, FieldSpec, Fp, Rationals};
use crate::io::ComplexFile;
use crate::monodromy::{build_monodromy_with, MonodromyOptions};
use crate::mvss::{build_blowup, total_homology};
use crate::periodic::{build_window, normalize, BoundaryEntry, OrbitCell, PeriodicComplex};
use crate::persistence::{analyze_filtration_with, check_unimodality_with, Side};
use crate::exactla::Subspace;
use crate::toroidal::{classify_with, nontoroidal_image, is_toroidal, recover, recover_at};

fn default_max_n() -> usize {
    4
}

/// Parameters of a random corpus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    /// Upper bound on orbit cells per complex.
    pub max_cells: usize,
    /// Fields are assigned round-robin.
    pub fields: Vec<FieldSpec>,
    /// When set, every complex carries a filtration with at most this many
    /// distinct values.
    #[serde(default)]
    pub filtration_steps: Option<usize>,
    /// Quotients `G_1 … G_max_n` are checked.
    #[serde(default = "default_max_n")]
    pub max_n: usize,
}

impl CorpusConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: CorpusConfig =
            serde_json::from_str(text).map_err(|e| Error::invalid(format!("corpus config: {e}")))?;
        if c.fields.is_empty() {
            return Err(Error::invalid("corpus config lists no fields"));
        }
        if c.max_cells < 2 {
            return Err(Error::invalid("corpus config needs max_cells >= 2"));
        }
        for f in &c.fields {
            f.validate()?;
        }
        Ok(c)
    }
}

fn small<F: Field>(f: &F, rng: &mut ChaCha8Rng) -> F::Elem {
    loop {
        let x = f.from_i64(rng.gen_range(-2..=2));
        if !f.is_zero(&x) {
            return x;
        }
    }
}

/// One random normalized periodic complex over `f`.
pub fn random_complex<F: Field>(
    f: &F,
    rng: &mut ChaCha8Rng,
    max_cells: usize,
    filtration_steps: Option<usize>,
) -> Result<PeriodicComplex<F>> {
    let nv = rng.gen_range(1..=3.min(max_cells - 1));
    let ne = rng.gen_range(1..=5.min(max_cells - nv));
    let nf = rng.gen_range(0..=3.min(max_cells - nv - ne));

    let mut cells = Vec::new();
    let mut boundary: Vec<Vec<BoundaryEntry<F>>> = Vec::new();
    for v in 0..nv {
        cells.push(OrbitCell { id: format!("v{v}"), dim: 0 });
        boundary.push(Vec::new());
    }
    let mut edges = Vec::with_capacity(ne);
    for e in 0..ne {
        let a = rng.gen_range(0..nv);
        let b = rng.gen_range(0..nv);
        let s = if a == b { 1 } else { rng.gen_range(0..=1) };
        let sign = if rng.gen_bool(0.5) { f.one() } else { f.neg(&f.one()) };
        cells.push(OrbitCell { id: format!("e{e}"), dim: 1 });
        boundary.push(vec![
            BoundaryEntry { face: a, shift: 0, coeff: f.neg(&sign) },
            BoundaryEntry { face: b, shift: s, coeff: sign },
        ]);
        edges.push((a, b, s));
    }

    // edge copies whose closure stays in shifts {0, 1}
    let mut copies: Vec<(usize, i64)> = (0..ne).map(|e| (e, 0)).collect();
    copies.extend((0..ne).filter(|&e| edges[e].2 == 0).map(|e| (e, 1)));
    let mut d = Matrix::zeros(f, 2 * nv, copies.len());
    for (col, &(e, t)) in copies.iter().enumerate() {
        for en in &boundary[nv + e] {
            let row = (en.shift + t) as usize * nv + en.face;
            d.set(row, col, f.add(d.get(row, col), &en.coeff));
        }
    }
    let cycles = d.kernel_vectors();
    for k in 0..nf {
        if cycles.is_empty() {
            break;
        }
        let mut z = vec![f.zero(); copies.len()];
        for c in &cycles {
            if rng.gen_bool(0.6) {
                let a = small(f, rng);
                for (zi, ci) in z.iter_mut().zip(c) {
                    *zi = f.add(zi, &f.mul(&a, ci));
                }
            }
        }
        if z.iter().all(|x| f.is_zero(x)) {
            z = cycles.choose(rng).expect("nonempty").clone();
        }
        cells.push(OrbitCell { id: format!("f{k}"), dim: 2 });
        boundary.push(
            copies
                .iter()
                .zip(&z)
                .filter(|(_, x)| !f.is_zero(x))
                .map(|(&(e, t), x)| BoundaryEntry { face: nv + e, shift: t, coeff: x.clone() })
                .collect(),
        );
    }

    let filtration = filtration_steps.map(|steps| {
        let steps = steps.max(1) as i64;
        let mut vals = vec![0i64; cells.len()];
        for c in 0..cells.len() {
            let floor = boundary[c].iter().map(|en| vals[en.face]).max().unwrap_or(1);
            vals[c] = floor.max(rng.gen_range(1..=steps));
        }
        vals
    });
    PeriodicComplex::new(f.clone(), cells, boundary, filtration)
}

/// Generates the whole corpus as files, deterministically from the seed.
pub fn generate(config: &CorpusConfig) -> Result<Vec<ComplexFile>> {
    (0..config.count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            let spec = config.fields[i % config.fields.len()];
            let name = Some(format!("random-{}-{i}", config.seed));
            let steps = config.filtration_steps;
            match spec {
                FieldSpec::Prime { p } => {
                    let f = Fp::new(p)?;
                    Ok(ComplexFile::from_complex(&random_complex(&f, &mut rng, config.max_cells, steps)?, name))
                }
                FieldSpec::Rationals => Ok(ComplexFile::from_complex(
                    &random_complex(&Rationals, &mut rng, config.max_cells, steps)?,
                    name,
                )),
            }
        })
        .collect()
}

/// Outcome of all checks on one complex. Each violation names the property.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct InstanceReport {
    pub name: String,
    pub field: String,
    pub cells: usize,
    pub period_factor: usize,
    pub gim_dims: Vec<usize>,
    pub toroidal_dims: Vec<Vec<usize>>,
    pub recovered: usize,
    /// Classes whose monodromy orbit never closes (infinite order over `Q`).
    pub unwound: usize,
    pub unimodality_triples: usize,
    /// Monodromy consistency failures (`degree:check`).
    pub monodromy: Vec<String>,
    /// Toroidal dimension above `dim gim(M_V)`.
    pub toroidal_bound: Vec<String>,
    pub mvss: Vec<String>,
    pub recovery: Vec<String>,
    pub unimodality: Vec<String>,
    pub functoriality: Vec<String>,
}

impl InstanceReport {
    pub fn ok(&self) -> bool {
        self.monodromy.is_empty()
            && self.toroidal_bound.is_empty()
            && self.mvss.is_empty()
            && self.recovery.is_empty()
            && self.unimodality.is_empty()
            && self.functoriality.is_empty()
    }
}

/// Runs the invariant checks on one complex.
pub fn check_complex<F: Field>(
    name: &str,
    input: &PeriodicComplex<F>,
    max_n: usize,
    options: MonodromyOptions,
) -> Result<InstanceReport> {
    let norm = normalize(input)?;
    let p = &norm.complex;
    let mut r = InstanceReport {
        name: name.to_string(),
        field: p.field().spec().to_string(),
        cells: input.cells().len(),
        period_factor: norm.period_factor,
        ..Default::default()
    };
    let w = build_window(p)?;
    let ms = build_monodromy_with(&w, options, Exec::Sequential)?;
    r.monodromy = ms.diagnostics.iter().map(|d| format!("{}:{}", d.degree, d.check)).collect();
    r.gim_dims = (0..ms.degrees.len()).map(|q| ms.gim_dim_v(q)).collect();

    for n in 1..=max_n {
        let c = classify_with(p, &ms, n, None, Exec::Sequential)?;
        r.toroidal_dims.push(c.degrees.iter().map(|d| d.toroidal_dim).collect());
        for d in &c.degrees {
            if d.toroidal_dim > d.gim_dim_v {
                r.toroidal_bound.push(format!("n={n} k={}: {} > {}", d.degree, d.toroidal_dim, d.gim_dim_v));
            }
        }
        if ms.diagnostics.is_empty() {
            generation_check(p, &ms, n, &c, &mut r)?;
        }
        let b = build_blowup(&w, n)?;
        for failed in b.check_identities() {
            r.mvss.push(format!("n={n}: {failed}"));
        }
        let hb = total_homology(&b).betti_numbers();
        let hg = c.homology.betti_numbers();
        let top = hb.len().max(hg.len());
        let at = |v: &[usize], k: usize| v.get(k).copied().unwrap_or(0);
        if (0..top).any(|k| at(&hb, k) != at(&hg, k)) {
            r.mvss.push(format!("n={n}: blow-up betti {hb:?} vs quotient {hg:?}"));
        }
    }

    if r.monodromy.is_empty() {
        for d in &ms.degrees {
            let q = d.degree;
            for theta in d.fit_v.gim.vectors() {
                let rec = match recover(p, &ms, 1, q, theta) {
                    Ok(rec) => rec,
                    Err(Error::NoFinitePeriod(_)) => {
                        r.unwound += 1;
                        continue;
                    }
                    Err(e) => {
                        r.recovery.push(format!("q={q}: {e}"));
                        continue;
                    }
                };
                r.recovered += 1;
                let v = is_toroidal(p, &ms, &rec.quotient, q + 1, &rec.chain)?;
                if !v.toroidal || !v.psi0_agrees {
                    r.recovery.push(format!(
                        "q={q}: recovered cycle toroidal={} psi0_agrees={}",
                        v.toroidal, v.psi0_agrees
                    ));
                }
                // The deck shift re-indexes the orbit, so it carries the
                // cycle of θ to the cycle of M_V⁻¹θ up to non-toroidal classes.
                let prev = d.m_v_tilde.apply(theta);
                if d.m_v.apply(&prev) != *theta {
                    r.recovery.push(format!("q={q}: M̃_V is not inverse to M_V on gim"));
                    continue;
                }
                let g = &rec.quotient;
                let moved = g.deck().maps[q + 1].apply(&rec.chain);
                let hg = homology(&g.complex);
                let image = nontoroidal_image(p, g, &hg, q + 1, None)?;
                match recover_at(p, &ms, rec.n_used, q, &prev) {
                    Ok(other) => {
                        let diff = sub(p.field(), &hg.coordinates(q + 1, &moved)?, &other.class);
                        if !image.space.contains(&diff) {
                            r.recovery.push(format!("q={q}: deck translate differs from the cycle of M_V⁻¹θ"));
                        }
                    }
                    Err(e) => r.recovery.push(format!("q={q}: recovering M_V⁻¹θ at n={}: {e}", rec.n_used)),
                }
            }
        }
    }

    if p.filtration().is_some() {
        let fa = analyze_filtration_with(p, options, Exec::Sequential)?;
        for v in check_unimodality_with(&fa, Exec::Sequential) {
            r.unimodality_triples += v.triples_checked;
            for x in v.violations {
                r.unimodality.push(format!("{:?} q={} ({},{},{})", x.side, x.degree, x.k, x.l, x.m));
            }
        }
        let s = fa.steps.len();
        for side in [Side::V, Side::U] {
            for q in 0..p.degrees() {
                for k in 0..s {
                    for l in k..s {
                        for m in l..s {
                            let (Some(a), Some(b), Some(c)) =
                                (fa.iota(side, q, k, l), fa.iota(side, q, l, m), fa.iota(side, q, k, m))
                            else {
                                continue;
                            };
                            if b.mul(a) != *c {
                                r.functoriality.push(format!("{side:?} q={q} ({k},{l},{m})"));
                            }
                        }
                    }
                }
            }
        }
        // the inclusion hypothesis V_k ⊆ V_ℓ
        for k in 1..s {
            if inclusion_by_id(&fa.steps[k - 1].window.v, &fa.steps[k].window.v).is_err() {
                r.functoriality.push(format!("V step {k} does not contain step {}", k - 1));
            }
        }
    }
    Ok(r)
}

fn sub<F: Field>(f: &F, a: &[F::Elem], b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter().zip(b).map(|(x, y)| f.sub(x, y)).collect()
}

/// Where `φ` is an isomorphism at `n`, the cycles recovered from a basis of
/// `gim(M_V)` together with `I^n` span `H_{q+1}(G_n)`.
fn generation_check<F: Field>(
    p: &PeriodicComplex<F>,
    ms: &crate::monodromy::MonodromySet<F>,
    n: usize,
    c: &crate::toroidal::Classification<F>,
    r: &mut InstanceReport,
) -> Result<()> {
    for d in c.degrees.iter().filter(|d| d.iso && d.degree >= 1) {
        let q = d.degree - 1;
        let Some(dm) = ms.degree(q) else { continue };
        let mut span: Subspace<F> = d.image.space.clone();
        let mut closed = true;
        for theta in dm.fit_v.gim.vectors() {
            match recover_at(p, ms, n, q, theta) {
                Ok(rec) => {
                    span.insert(rec.class);
                }
                Err(Error::NoFinitePeriod(_)) => closed = false,
                Err(e) => {
                    r.recovery.push(format!("n={n} q={q}: {e}"));
                    closed = false;
                }
            }
        }
        if closed && span.dim() != d.betti {
            r.recovery.push(format!("n={n} q={q}: recovered cycles span {} of {}", span.dim(), d.betti));
        }
    }
    Ok(())
}

/// [`check_complex`] on a file, dispatching on its field.
pub fn check_file(file: &ComplexFile, max_n: usize, options: MonodromyOptions) -> Result<InstanceReport> {
    let name = file.name.clone().unwrap_or_default();
    match file.field {
        FieldSpec::Prime { p } => check_complex(&name, &file.build(&Fp::new(p)?)?, max_n, options),
        FieldSpec::Rationals => check_complex(&name, &file.build(&Rationals)?, max_n, options),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepSummary {
    pub seed: u64,
    pub count: usize,
    pub failures: usize,
    pub instances: Vec<InstanceReport>,
}

/// Generates the corpus and checks every instance.
pub fn sweep(config: &CorpusConfig, options: MonodromyOptions, exec: Exec) -> Result<SweepSummary> {
    let files = generate(config)?;
    let instances = exec
        .map(&files, |file| check_file(file, config.max_n, options))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let failures = instances.iter().filter(|r| !r.ok()).count();
    Ok(SweepSummary { seed: config.seed, count: instances.len(), failures, instances })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> CorpusConfig {
        CorpusConfig {
            seed: 7,
            count: 12,
            max_cells: 12,
            fields: vec![FieldSpec::Prime { p: 2 }, FieldSpec::Prime { p: 5 }, FieldSpec::Rationals],
            filtration_steps: Some(3),
            max_n: 2,
        }
    }

    #[test]
    fn generation_is_deterministic_and_normalized() {
        let a = generate(&config()).unwrap();
        let b = generate(&config()).unwrap();
        assert_eq!(a, b);
        for file in &a {
            assert!(file.cells.len() <= 12);
            let normalized = match file.field {
                FieldSpec::Prime { p } => file.build(&Fp::new(p).unwrap()).unwrap().is_normalized(),
                FieldSpec::Rationals => file.build(&Rationals).unwrap().is_normalized(),
            };
            assert!(normalized);
        }
    }
}
