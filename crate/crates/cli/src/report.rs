//! JSON renderings of results and the report envelope.

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use subtori_core::structure::{CensusExample, ClassificationReport, Signal};
use subtori_core::{Census, ClosureResult, CmVerdict, EndAlgebra, IMat, Isogeny, QuotientTorus};

use crate::format::{element_json, rational_json};

pub const VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub elapsed_us: u128,
}

/// What every successful command prints on standard output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub version: &'static str,
    pub command: Vec<String>,
    pub input_digest: String,
    pub result: Value,
    pub timing: Timing,
}

/// SHA-256 over the input files in argument order, each prefixed by its length.
pub fn digest(inputs: &[Vec<u8>]) -> String {
    let mut h = Sha256::new();
    for bytes in inputs {
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    hex::encode(h.finalize())
}

fn int(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

/// Columns of an integer matrix.
pub fn columns(m: &IMat) -> Value {
    Value::Array((0..m.cols()).map(|j| Value::Array(m.col(j).iter().map(int).collect())).collect())
}

pub fn rows(m: &IMat) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(int).collect())).collect())
}

fn form(f: &[i64]) -> Value {
    Value::Array(f.iter().map(|x| Value::String(x.to_string())).collect())
}

fn example(e: &CensusExample) -> Value {
    json!({"form": form(e.form.entries()), "real_dim": e.real_dim})
}

pub fn closure(r: &ClosureResult) -> Value {
    json!({
        "real_dim": r.real_dim,
        "is_complex": r.is_complex,
        "basis": columns(r.w.basis()),
        "codim_forms": rows(&r.codim_forms),
    })
}

fn signal(s: Signal) -> &'static str {
    match s {
        Signal::Agrees => "agrees",
        Signal::Disagrees => "disagrees",
        Signal::Undetermined => "undetermined",
    }
}

pub fn classification(r: &ClassificationReport) -> Value {
    json!({
        "condition_ii": r.condition_ii,
        "end_dim": r.end_dim,
        "height": r.height,
        "witness": r.witness.as_ref().map(example),
        "oracle": r.oracle,
        "diagnostics": {
            "witness_signal": signal(r.diagnostics.witness_signal),
            "oracle_agrees": r.diagnostics.oracle_agrees,
            "consistent": r.diagnostics.consistent,
        },
    })
}

pub fn census(c: &Census) -> Value {
    json!({
        "height": c.height,
        "total": c.total,
        "complex_count": c.complex_count,
        "non_complex_examples": c.non_complex_examples.iter().map(example).collect::<Vec<_>>(),
        "outcomes": c.outcomes.iter().map(|(&(d, cx), &k)| json!({"real_dim": d, "is_complex": cx, "count": k})).collect::<Vec<_>>(),
    })
}

pub fn witness(height: u32, w: Option<&(subtori_core::HyperplaneForm, ClosureResult)>) -> Value {
    match w {
        None => json!({"height": height, "found": false}),
        Some((f, r)) => json!({"height": height, "found": true, "form": form(f.entries()), "closure": closure(r)}),
    }
}

pub fn endo(e: &EndAlgebra, n: usize) -> Value {
    let basis: Vec<Value> = e
        .basis
        .iter()
        .map(|m| Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(rational_json).collect())).collect()))
        .collect();
    json!({"dim": e.dim, "max_dim": 2 * n * n, "basis": basis})
}

pub fn quotient(q: &QuotientTorus) -> Value {
    let gens: Vec<Value> = q.torus.generators().iter().map(|g| Value::Array(g.iter().map(element_json).collect())).collect();
    let cmap: Vec<Value> = (0..q.complex_map.rows())
        .map(|i| Value::Array(q.complex_map.row(i).iter().map(element_json).collect()))
        .collect();
    json!({
        "n": q.torus.n(),
        "generators": gens,
        "lattice_map": rows(&q.lattice_map),
        "complex_map": cmap,
    })
}

pub fn cm(tau: &subtori_core::AlgebraicNumber, v: &CmVerdict) -> Value {
    json!({
        "tau": element_json(tau),
        "has_cm": v.has_cm,
        "quadratic": v.quadratic.as_ref().map(|(a, b, c)| vec![int(a), int(b), int(c)]),
        "discriminant": v.discriminant.as_ref().map(int),
    })
}

pub fn isogeny(i: &Isogeny) -> Value {
    match i {
        Isogeny::No => json!({"isogenous": false}),
        Isogeny::Yes { witness } => json!({"isogenous": true, "witness": witness.iter().map(int).collect::<Vec<_>>()}),
    }
}
