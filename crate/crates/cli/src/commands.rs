use std::path::Path;

use perihom::complex::{homology, validate};
use perihom::corpus::{self, CorpusConfig};
use perihom::io::{ChainFile, ComplexFile};
use perihom::monodromy::{build_monodromy_with, LiftPolicy, MonodromyOptions, MonodromySet};
use perihom::mvss::{build_blowup, total_homology};
use perihom::periodic::{build_quotient, build_window, normalize, Normalized, PeriodicComplex};
use perihom::persistence::{analyze_filtration_with, check_unimodality_with, toroidal_timeline_with};
use perihom::report::{self, Report};
use perihom::toroidal::{
    classify_with, is_toroidal, nontoroidal_image, recover, smallest_iso_n, strip_image_at, strip_length_bound,
};
use perihom::{Error, Exec, Field, FieldSpec, Fp, Rationals, Result};
use serde_json::{json, Value};

use crate::{Command, Global, Lift};

pub struct Outcome {
    pub report: Report,
    pub code: u8,
    /// Lines for stderr.
    pub notes: Vec<String>,
}

impl Outcome {
    fn ok(report: Report) -> Self {
        Outcome { report, code: 0, notes: Vec::new() }
    }

    fn fail_if(mut self, failed: bool, code: u8, note: impl Into<String>) -> Self {
        if failed {
            self.code = self.code.max(code);
            self.notes.push(note.into());
        }
        self
    }
}

impl Global {
    fn options(&self) -> MonodromyOptions {
        let lift = match self.lift {
            Lift::Plain => LiftPolicy::Plain,
            Lift::Adapted => LiftPolicy::Adapted,
            Lift::Stable => LiftPolicy::Stable,
        };
        MonodromyOptions { lift, ..Default::default() }
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(Vec<u8>, ComplexFile)> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::invalid("input is not UTF-8"))?;
    Ok((bytes, ComplexFile::parse(&text)?))
}

/// Calls `$body` with `$p` bound to the complex built over the file's field.
macro_rules! with_field {
    ($file:expr, |$p:ident| $body:expr) => {
        match $file.field {
            FieldSpec::Prime { p } => {
                let $p = $file.build(&Fp::new(p)?)?;
                $body
            }
            FieldSpec::Rationals => {
                let $p = $file.build(&Rationals)?;
                $body
            }
        }
    };
}

pub fn run(command: &Command, global: &Global) -> Result<Outcome> {
    match command {
        Command::Validate { file } => validate_cmd(file),
        Command::Homology { file, n } => {
            let (bytes, f) = load(file)?;
            with_field!(f, |p| homology_cmd(&bytes, &f, &p, *n))
        }
        Command::Monodromy { file, degree, emit_matrices } => {
            let degree = match degree.as_str() {
                "all" => None,
                d => Some(d.parse::<usize>().map_err(|_| Error::invalid(format!("bad degree {d:?}")))?),
            };
            let (bytes, f) = load(file)?;
            with_field!(f, |p| monodromy_cmd(&bytes, &f, &p, global, degree, *emit_matrices))
        }
        Command::Toroidal { file, n, recover, max_n } => {
            let (bytes, f) = load(file)?;
            with_field!(f, |p| toroidal_cmd(&bytes, &f, &p, global, *n, *recover, *max_n))
        }
        Command::Classify { file, n, cycle } => {
            let (bytes, f) = load(file)?;
            let chain = ChainFile::parse(
                &String::from_utf8(read(cycle)?).map_err(|_| Error::invalid("cycle file is not UTF-8"))?,
            )?;
            with_field!(f, |p| classify_cmd(&bytes, &f, &p, global, *n, &chain))
        }
        Command::Persist { file, n } => {
            let (bytes, f) = load(file)?;
            with_field!(f, |p| persist_cmd(&bytes, &f, &p, global, *n))
        }
        Command::Oracle { file, n, max_strips } => {
            let (bytes, f) = load(file)?;
            with_field!(f, |p| oracle_cmd(&bytes, &f, &p, *n, *max_strips))
        }
        Command::Sweep { config } => sweep_cmd(config, global),
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    Ok(())
}

fn base<F: Field>(command: &str, bytes: &[u8], file: &ComplexFile, p: &PeriodicComplex<F>) -> Result<(Report, Normalized<F>)> {
    let norm = normalize(p)?;
    let mut r = Report::new(command, bytes);
    r.input_field("name", json!(file.name))
        .input_field("field", json!(p.field().spec().to_string()))
        .input_field("orbit_cells", json!(p.cells().len()))
        .set("normalization", report::normalization_json(p, &norm));
    Ok((r, norm))
}

fn monodromy_of<F: Field>(norm: &Normalized<F>, global: &Global) -> Result<MonodromySet<F>> {
    let w = build_window(&norm.complex)?;
    build_monodromy_with(&w, global.options(), global.exec())
}

fn incompatible(ms_diagnostics: usize) -> String {
    format!("{ms_diagnostics} monodromy consistency check(s) failed; see diagnostics")
}

fn validate_cmd(path: &Path) -> Result<Outcome> {
    let bytes = read(path)?;
    let mut r = Report::new("validate", &bytes);
    let checked = std::str::from_utf8(&bytes)
        .map_err(|_| Error::invalid("input is not UTF-8"))
        .and_then(ComplexFile::parse)
        .and_then(|f| with_field!(f, |p| validate_complex(&p)));
    match checked {
        Ok(summary) => {
            r.set("valid", json!(true)).set("summary", summary);
            Ok(Outcome::ok(r))
        }
        Err(e) => {
            r.set("valid", json!(false)).set("error", json!(e.to_string()));
            Ok(Outcome { report: r, code: e.exit_code() as u8, notes: vec![e.to_string()] })
        }
    }
}

fn validate_complex<F: Field>(p: &PeriodicComplex<F>) -> Result<Value> {
    let norm = normalize(p)?;
    let w = build_window(&norm.complex)?;
    validate(&w.u)?;
    validate(&w.v)?;
    w.i.validate(&w.v, &w.u)?;
    w.j.validate(&w.v, &w.u)?;
    Ok(json!({
        "field": p.field().spec().to_string(),
        "orbit_cells": p.cells().len(),
        "top_dim": p.top_dim(),
        "filtered": p.filtration().is_some(),
        "normalization_factor": norm.period_factor,
    }))
}

fn homology_cmd<F: Field>(bytes: &[u8], file: &ComplexFile, p: &PeriodicComplex<F>, n: usize) -> Result<Outcome> {
    check_n(n)?;
    let (mut r, norm) = base("homology", bytes, file, p)?;
    let w = build_window(&norm.complex)?;
    let g = build_quotient(&norm.complex, n)?;
    let (hu, hv, hg) = (homology(&w.u), homology(&w.v), homology(&g.complex));
    r.set(
        "homology",
        json!({
            "n": n,
            "u": report::homology_json(&w.u, &hu, "U"),
            "v": report::homology_json(&w.v, &hv, "V"),
            "g_n": report::homology_json(&g.complex, &hg, &format!("G{n}")),
        }),
    );
    Ok(Outcome::ok(r))
}

fn monodromy_cmd<F: Field>(
    bytes: &[u8],
    file: &ComplexFile,
    p: &PeriodicComplex<F>,
    global: &Global,
    degree: Option<usize>,
    emit_matrices: bool,
) -> Result<Outcome> {
    let (mut r, norm) = base("monodromy", bytes, file, p)?;
    let ms = monodromy_of(&norm, global)?;
    if let Some(q) = degree {
        if ms.degree(q).is_none() {
            return Err(Error::invalid(format!("no homology degree {q} in the window")));
        }
    }
    r.set("window", report::window_json(&ms))
        .set("monodromy", report::monodromy_json(&ms, degree, emit_matrices))
        .set("diagnostics", report::diagnostics_json(&ms));
    let bad = ms.diagnostics.len();
    Ok(Outcome::ok(r).fail_if(bad > 0, 2, incompatible(bad)))
}

fn toroidal_cmd<F: Field>(
    bytes: &[u8],
    file: &ComplexFile,
    p: &PeriodicComplex<F>,
    global: &Global,
    n: usize,
    recover_cycles: bool,
    max_n: Option<usize>,
) -> Result<Outcome> {
    check_n(n)?;
    let (mut r, norm) = base("toroidal", bytes, file, p)?;
    let q = &norm.complex;
    let ms = monodromy_of(&norm, global)?;
    let c = classify_with(q, &ms, n, None, global.exec())?;
    r.set("toroidal", report::classification_json(&c))
        .set("monodromy", report::monodromy_json(&ms, None, false))
        .set("diagnostics", report::diagnostics_json(&ms));
    let mut outcome_failures = 0;
    if recover_cycles {
        let mut out = Vec::new();
        for d in &ms.degrees {
            for theta in d.fit_v.gim.vectors() {
                let entry = match recover(q, &ms, n, d.degree, theta) {
                    Ok(rec) => {
                        let v = is_toroidal(q, &ms, &rec.quotient, d.degree + 1, &rec.chain)?;
                        if !v.toroidal {
                            outcome_failures += 1;
                        }
                        let mut e = report::recovery_json(q, theta, &rec);
                        e["verdict"] = report::verdict_json(q.field(), &v);
                        e
                    }
                    Err(e @ Error::NoFinitePeriod(_)) => json!({
                        "degree": d.degree,
                        "theta": report::vector_json(q.field(), theta),
                        "unwound": e.to_string(),
                    }),
                    Err(e) => {
                        outcome_failures += 1;
                        json!({
                            "degree": d.degree,
                            "theta": report::vector_json(q.field(), theta),
                            "error": e.to_string(),
                        })
                    }
                };
                out.push(entry);
            }
        }
        r.set("recovered", Value::Array(out));
    }
    if let Some(bound) = max_n {
        check_n(bound)?;
        let (first, all) = smallest_iso_n(q, &ms, bound, global.exec())?;
        r.set(
            "search",
            json!({
                "max_n": bound,
                "first_iso_n": first,
                "per_n": all.iter().map(report::classification_json).collect::<Vec<_>>(),
            }),
        );
    }
    let bad = ms.diagnostics.len();
    Ok(Outcome::ok(r)
        .fail_if(bad > 0, 2, incompatible(bad))
        .fail_if(outcome_failures > 0, 2, format!("{outcome_failures} recovery attempt(s) failed verification")))
}

fn classify_cmd<F: Field>(
    bytes: &[u8],
    file: &ComplexFile,
    p: &PeriodicComplex<F>,
    global: &Global,
    n: usize,
    chain: &ChainFile,
) -> Result<Outcome> {
    check_n(n)?;
    let (mut r, norm) = base("classify", bytes, file, p)?;
    let q = &norm.complex;
    let ms = monodromy_of(&norm, global)?;
    let g = build_quotient(q, n)?;
    let cycle = chain.to_vector(q, &g)?;
    let v = is_toroidal(q, &ms, &g, chain.degree, &cycle)?;
    r.set("n", json!(n))
        .set("cycle", serde_json::to_value(chain).expect("chain serializes"))
        .set("verdict", report::verdict_json(q.field(), &v))
        .set("diagnostics", report::diagnostics_json(&ms));
    Ok(Outcome::ok(r).fail_if(!v.psi0_agrees, 2, "blow-up trace disagrees with the strip oracle"))
}

fn persist_cmd<F: Field>(
    bytes: &[u8],
    file: &ComplexFile,
    p: &PeriodicComplex<F>,
    global: &Global,
    n: Option<usize>,
) -> Result<Outcome> {
    let (mut r, norm) = base("persist", bytes, file, p)?;
    let fa = analyze_filtration_with(&norm.complex, global.options(), global.exec())?;
    let verdicts = check_unimodality_with(&fa, global.exec());
    let timeline = match n {
        Some(n) => {
            check_n(n)?;
            Some(toroidal_timeline_with(&fa, n, global.exec())?)
        }
        None => None,
    };
    r.set("persistence", report::persistence_json(&fa, &verdicts, timeline.as_ref()));
    let violations: usize = verdicts.iter().map(|v| v.violations.len()).sum();
    Ok(Outcome::ok(r).fail_if(violations > 0, 2, format!("{violations} unimodality violation(s)")))
}

fn oracle_cmd<F: Field>(
    bytes: &[u8],
    file: &ComplexFile,
    p: &PeriodicComplex<F>,
    n: usize,
    max_strips: Option<usize>,
) -> Result<Outcome> {
    check_n(n)?;
    let (mut r, norm) = base("oracle", bytes, file, p)?;
    let q = &norm.complex;
    let w = build_window(q)?;
    let g = build_quotient(q, n)?;
    let hg = homology(&g.complex);
    let mut strips = Vec::new();
    for k in 0..g.complex.degrees() {
        let bound = strip_length_bound(q, n, k);
        let cap = max_strips.unwrap_or(bound + n).max(1);
        let dims = (1..=cap)
            .map(|len| Ok(json!({ "length": len, "dim": strip_image_at(q, &g, &hg, k, len)?.dim() })))
            .collect::<Result<Vec<_>>>()?;
        let image = nontoroidal_image(q, &g, &hg, k, max_strips)?;
        strips.push(json!({
            "degree": k,
            "betti": hg.betti(k),
            "length_bound": bound,
            "images": dims,
            "nontoroidal_dim": image.space.dim(),
            "strip_length": image.strip_length,
            "stable": image.stable,
        }));
    }
    let b = build_blowup(&w, n)?;
    let failed = b.check_identities();
    let total = total_homology(&b).betti_numbers();
    let direct = hg.betti_numbers();
    let at = |v: &[usize], k: usize| v.get(k).copied().unwrap_or(0);
    let agree = (0..total.len().max(direct.len())).all(|k| at(&total, k) == at(&direct, k));
    r.set("oracle", json!({ "n": n, "strips": strips }))
        .set(
            "mvss_check",
            json!({
                "n": n,
                "identities_failed": failed,
                "total_betti": total,
                "direct_betti": direct,
                "agree": agree,
            }),
        );
    Ok(Outcome::ok(r)
        .fail_if(!failed.is_empty(), 2, "blow-up differential identities fail")
        .fail_if(!agree, 2, "blow-up homology differs from G_n"))
}

fn sweep_cmd(path: &Path, global: &Global) -> Result<Outcome> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::invalid("config is not UTF-8"))?;
    let mut config = CorpusConfig::parse(&text)?;
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    let summary = corpus::sweep(&config, global.options(), global.exec())?;
    let mut r = Report::new("sweep", &bytes);
    let failing: Vec<&corpus::InstanceReport> = summary.instances.iter().filter(|i| !i.ok()).collect();
    let recovered: usize = summary.instances.iter().map(|i| i.recovered).sum();
    let unwound: usize = summary.instances.iter().map(|i| i.unwound).sum();
    let triples: usize = summary.instances.iter().map(|i| i.unimodality_triples).sum();
    r.set(
        "sweep",
        json!({
            "seed": summary.seed,
            "count": summary.count,
            "failures": summary.failures,
            "recovered": recovered,
            "unwound": unwound,
            "unimodality_triples": triples,
            "failing": serde_json::to_value(&failing).expect("instances serialize"),
        }),
    );
    let failures = summary.failures;
    Ok(Outcome::ok(r).fail_if(failures > 0, 2, format!("{failures} instance(s) violated an invariant")))
}
