//! JSON reports and their plain-text rendering.
//!
//! Every matrix carries the labels of its row and column bases, and every
//! homology class is labeled by a representative chain, so a report can be
//! checked without rerunning the computation. Objects are emitted with
//! sorted keys.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::complex::{CellComplex, HomologyBasis};
use crate::exactla::{Matrix, Subspace};
use crate::field::Field;
use crate::io::{ChainFile, ComplexFile};
use crate::monodromy::{DegreeMonodromy, MonodromySet};
use crate::periodic::{Normalized, PeriodicComplex};
use crate::persistence::{FiltrationAnalysis, Timeline, UnimodalityVerdict};
use crate::toroidal::{Classification, Recovery, ToroidalVerdict};

pub const SCHEMA: &str = "perihom/1";

/// Hex SHA-256 of the input bytes.
pub fn digest(input: &[u8]) -> String {
    hex::encode(Sha256::digest(input))
}

/// A report under construction: named top-level sections.
#[derive(Clone, Debug)]
pub struct Report {
    sections: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, input: &[u8]) -> Self {
        let mut sections = Map::new();
        sections.insert("schema".into(), json!(SCHEMA));
        sections.insert("command".into(), json!(command));
        sections.insert("input".into(), json!({ "sha256": digest(input) }));
        Report { sections }
    }

    pub fn set(&mut self, key: &str, value: Value) -> &mut Self {
        self.sections.insert(key.to_string(), value);
        self
    }

    /// Adds fields to the `input` section.
    pub fn input_field(&mut self, key: &str, value: Value) -> &mut Self {
        if let Some(Value::Object(m)) = self.sections.get_mut("input") {
            m.insert(key.to_string(), value);
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.sections.get(key)
    }

    pub fn to_value(&self) -> Value {
        Value::Object(self.sections.clone())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        render_text(&self.to_value())
    }
}

/// Labels `name.H{k}[r]` of the homology classes in degree `k`.
pub fn class_labels<F: Field>(h: &HomologyBasis<F>, k: usize, name: &str) -> Vec<String> {
    (0..h.betti(k)).map(|r| format!("{name}.H{k}[{r}]")).collect()
}

fn homology_degree<F: Field>(c: &CellComplex<F>, h: &HomologyBasis<F>, k: usize, name: &str) -> Value {
    let classes: Vec<Value> = match h.degree(k) {
        Some(d) => class_labels(h, k, name)
            .into_iter()
            .zip(&d.representatives)
            .map(|(label, rep)| json!({ "label": label, "representative": c.chain_to_json(k, rep) }))
            .collect(),
        None => Vec::new(),
    };
    json!({ "degree": k, "betti": h.betti(k), "classes": classes })
}

/// Betti numbers, labeled classes and the complex itself in file form.
pub fn homology_json<F: Field>(c: &CellComplex<F>, h: &HomologyBasis<F>, name: &str) -> Value {
    let file = ComplexFile::from_finite(c, Some(name.to_string()));
    json!({
        "betti": h.betti_numbers(),
        "cells": (0..c.degrees()).map(|k| c.count(k)).collect::<Vec<_>>(),
        "degrees": (0..h.top()).map(|k| homology_degree(c, h, k, name)).collect::<Vec<_>>(),
        "complex": serde_json::to_value(file).expect("complex file serializes"),
    })
}

pub fn labeled_matrix<F: Field>(m: &Matrix<F>, rows: &[String], cols: &[String]) -> Value {
    json!({ "rows": rows, "cols": cols, "entries": m.to_json() })
}

pub fn vector_json<F: Field>(f: &F, v: &[F::Elem]) -> Value {
    Value::Array(v.iter().map(|x| f.to_json(x)).collect())
}

/// A subspace by its canonical basis, in coordinates over `labels`.
pub fn subspace_json<F: Field>(s: &Subspace<F>, labels: &[String]) -> Value {
    let f = s.field();
    json!({
        "dim": s.dim(),
        "coordinates": labels,
        "basis": s.vectors().iter().map(|v| vector_json(f, v)).collect::<Vec<_>>(),
    })
}

pub fn normalization_json<F: Field>(input: &PeriodicComplex<F>, norm: &Normalized<F>) -> Value {
    json!({
        "factor": norm.period_factor,
        "already_normalized": input.is_normalized() && norm.period_factor == 1,
        "orbit_cells": norm.complex.cells().len(),
    })
}

fn degree_monodromy_json<F: Field>(ms: &MonodromySet<F>, d: &DegreeMonodromy<F>, emit_matrices: bool) -> Value {
    let q = d.degree;
    let lv = class_labels(&ms.hv, q, "V");
    let lu = class_labels(&ms.hu, q, "U");
    let mut out = json!({
        "degree": q,
        "dim_hv": lv.len(),
        "dim_hu": lu.len(),
        "gim_v": subspace_json(&d.fit_v.gim, &lv),
        "gker_v": subspace_json(&d.fit_v.gker, &lv),
        "gim_u": subspace_json(&d.fit_u.gim, &lu),
        "gker_u": subspace_json(&d.fit_u.gker, &lu),
        "gim_v_tilde": subspace_json(&d.fit_v_tilde.gim, &lv),
        "gim_u_tilde": subspace_json(&d.fit_u_tilde.gim, &lu),
        "stabilization": {
            "v": d.fit_v.stabilization_exponent,
            "u": d.fit_u.stabilization_exponent,
        },
        "phi3_defined": d.phi3.is_some(),
        "phi4_defined": d.phi4.is_some(),
        "degenerate": {
            "forward": d.forward.degenerate,
            "reversed": d.reversed.degenerate,
        },
        "lift_adapted": {
            "forward": d.forward.lift_adapted,
            "reversed": d.reversed.lift_adapted,
        },
    });
    if emit_matrices {
        let m = out.as_object_mut().expect("object");
        m.insert("i".into(), labeled_matrix(&d.i, &lu, &lv));
        m.insert("j".into(), labeled_matrix(&d.j, &lu, &lv));
        m.insert("m_v".into(), labeled_matrix(&d.m_v, &lv, &lv));
        m.insert("m_u".into(), labeled_matrix(&d.m_u, &lu, &lu));
        m.insert("m_v_tilde".into(), labeled_matrix(&d.m_v_tilde, &lv, &lv));
        m.insert("m_u_tilde".into(), labeled_matrix(&d.m_u_tilde, &lu, &lu));
    }
    out
}

/// Monodromy in the selected degrees (all if `degree` is `None`).
pub fn monodromy_json<F: Field>(ms: &MonodromySet<F>, degree: Option<usize>, emit_matrices: bool) -> Value {
    let degrees: Vec<Value> = ms
        .degrees
        .iter()
        .filter(|d| degree.is_none_or(|q| q == d.degree))
        .map(|d| degree_monodromy_json(ms, d, emit_matrices))
        .collect();
    json!({
        "options": serde_json::to_value(ms.options).expect("options serialize"),
        "degrees": degrees,
    })
}

/// Homology of `U` and `V` with the classes the monodromy matrices refer to.
pub fn window_json<F: Field>(ms: &MonodromySet<F>) -> Value {
    json!({
        "u": homology_json(&ms.window.u, &ms.hu, "U"),
        "v": homology_json(&ms.window.v, &ms.hv, "V"),
    })
}

pub fn diagnostics_json<F: Field>(ms: &MonodromySet<F>) -> Value {
    let mut out: Vec<Value> = ms
        .diagnostics
        .iter()
        .map(|d| json!({ "kind": "incompatibility", "degree": d.degree, "check": d.check, "detail": d.detail }))
        .collect();
    for d in &ms.degrees {
        for (side, dec) in [("forward", &d.forward), ("reversed", &d.reversed)] {
            for name in &dec.degenerate {
                out.push(json!({ "kind": "degenerate_complement", "degree": d.degree, "side": side, "complement": name }));
            }
        }
    }
    Value::Array(out)
}

pub fn classification_json<F: Field>(c: &Classification<F>) -> Value {
    let degrees: Vec<Value> = c
        .degrees
        .iter()
        .map(|d| {
            json!({
                "degree": d.degree,
                "betti": d.betti,
                "nontoroidal_dim": d.image.space.dim(),
                "toroidal_dim": d.toroidal_dim,
                "gim_dim_v": d.gim_dim_v,
                "gim_dim_u": d.gim_dim_u,
                "phi1_iso": d.iso,
                "strip_length": d.image.strip_length,
                "strip_stable": d.image.stable,
                "winding": d.winding,
            })
        })
        .collect();
    json!({
        "n": c.n,
        "iso_everywhere": c.iso_everywhere(),
        "degrees": degrees,
    })
}

/// `G_n` homology with labeled classes, plus the complex in file form.
pub fn quotient_json<F: Field>(c: &Classification<F>) -> Value {
    homology_json(&c.quotient.complex, &c.homology, &format!("G{}", c.n))
}

pub fn recovery_json<F: Field>(p: &PeriodicComplex<F>, theta: &[F::Elem], r: &Recovery<F>) -> Value {
    let f = p.field();
    let cycle = ChainFile::from_vector(p, &r.quotient, r.q + 1, &r.chain);
    json!({
        "degree": r.q,
        "theta": vector_json(f, theta),
        "n_used": r.n_used,
        "period": r.period,
        "cycle": serde_json::to_value(cycle).expect("chain serializes"),
        "class": vector_json(f, &r.class),
    })
}

pub fn verdict_json<F: Field>(f: &F, v: &ToroidalVerdict<F>) -> Value {
    json!({
        "degree": v.degree,
        "toroidal": v.toroidal,
        "class": vector_json(f, &v.class),
        "certificate": {
            "psi0": vector_json(f, &v.psi0),
            "psi0_gim_component": vector_json(f, &v.psi0_gim_component),
            "psi0_agrees": v.psi0_agrees,
        },
    })
}

pub fn persistence_json<F: Field>(
    fa: &FiltrationAnalysis<F>,
    verdicts: &[UnimodalityVerdict],
    timeline: Option<&Timeline<F>>,
) -> Value {
    let steps: Vec<Value> = fa
        .steps
        .iter()
        .enumerate()
        .map(|(s, step)| {
            let ms = &step.monodromy;
            json!({
                "index": s,
                "value": step.value,
                "betti_u": ms.hu.betti_numbers(),
                "betti_v": ms.hv.betti_numbers(),
                "monodromy": monodromy_json(ms, None, true),
            })
        })
        .collect();
    let mut iota = Vec::new();
    for (side, maps) in [("v", &fa.iota_v), ("u", &fa.iota_u)] {
        for (&(q, k, l), m) in maps {
            if k == l {
                continue;
            }
            let (src, dst) = (&fa.steps[k].monodromy, &fa.steps[l].monodromy);
            let (name, hs, hd) = if side == "v" { ("V", &src.hv, &dst.hv) } else { ("U", &src.hu, &dst.hu) };
            let rows = class_labels(hd, q, &format!("{name}{l}"));
            let cols = class_labels(hs, q, &format!("{name}{k}"));
            iota.push(json!({ "side": side, "degree": q, "from": k, "to": l, "matrix": labeled_matrix(m, &rows, &cols) }));
        }
    }
    let timeline = timeline.map(|t| {
        json!({
            "n": t.n,
            "entries": serde_json::to_value(&t.entries).expect("timeline serializes"),
            "toroidal_dims": t.per_step.iter().map(|(v, c)| json!({
                "value": v,
                "dims": c.degrees.iter().map(|d| d.toroidal_dim).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    });
    json!({
        "steps": steps,
        "iota": iota,
        "commutation_log": serde_json::to_value(&fa.commutation_log).expect("log serializes"),
        "unimodality": serde_json::to_value(verdicts).expect("verdicts serialize"),
        "unimodal": verdicts.iter().all(|v| v.holds),
        "timeline": timeline,
    })
}

/// Renders a JSON value as indented `key: value` text. Arrays of scalars
/// print inline; arrays of such arrays print one row per line.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_array() && !x.is_object()) => {
            let parts: Vec<String> = a.iter().map(|x| scalar(x).expect("scalar")).collect();
            Some(format!("[{}]", parts.join(" ")))
        }
        _ => None,
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_value(out, x, indent + 1);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        write_value(out, x, indent + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).expect("scalar"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(digest(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn text_renders_matrices_by_row() {
        let v = json!({ "m": [[1, 0], [0, 1]], "name": "x" });
        assert_eq!(render_text(&v), "m:\n  [1 0]\n  [0 1]\nname: x\n");
    }
}
