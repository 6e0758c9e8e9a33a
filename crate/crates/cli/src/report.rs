//! Report values and their two renderings.

use abloc::arith::{format_rational, Rational};
use abloc::counterex::{BoundedFn, CosetObstruction, Laurent, PElem};
use abloc::GroupHom;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

/// Exit status of a finished command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    Negative,
    InputError,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Negative => 1,
            Status::InputError => 2,
        }
    }
}

/// A command result: human text plus the JSON body (without the envelope
/// fields, which [`Report::to_json`] adds).
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub status: Status,
    pub text: String,
    pub body: Value,
}

impl Report {
    pub fn new(command: &'static str, status: Status, text: String, body: Value) -> Self {
        Report {
            command,
            status,
            text,
            body,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut obj = match &self.body {
            Value::Object(m) => m.clone(),
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other.clone());
                m
            }
        };
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
        obj.insert("command".into(), json!(self.command));
        canonical(Value::Object(obj))
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            render_json(&self.to_json())
        } else if self.text.ends_with('\n') {
            self.text.clone()
        } else {
            format!("{}\n", self.text)
        }
    }
}

/// Rebuilds every object with sorted keys, whatever map type serde_json was
/// compiled with.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().map(|(k, v)| (k, canonical(v))).collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub fn render_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn rational(q: &Rational) -> Value {
    Value::String(format_rational(q))
}

pub fn matrix(m: &[Vec<Rational>]) -> Value {
    Value::Array(m.iter().map(|row| Value::Array(row.iter().map(rational).collect())).collect())
}

/// `a,b;c,d`, the same syntax `--matrix` accepts.
pub fn matrix_text(m: &[Vec<Rational>]) -> String {
    m.iter()
        .map(|row| row.iter().map(format_rational).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn hom(h: &GroupHom) -> Value {
    json!({
        "domain": h.domain().expr(),
        "codomain": h.codomain().expr(),
        "matrix": matrix(h.matrix()),
    })
}

pub fn hom_text(h: &GroupHom) -> String {
    format!("{} -> {} by [{}]", h.domain(), h.codomain(), matrix_text(h.matrix()))
}

pub fn bounded_fn(f: &BoundedFn) -> Value {
    Value::Object(f.support().map(|(x, v)| (format_rational(x), rational(v))).collect())
}

pub fn p_elem(a: &PElem) -> Value {
    json!({ "f": bounded_fn(&a.f), "r": rational(&a.r) })
}

pub fn laurent(l: &Laurent) -> Value {
    json!({
        "low": l.low,
        "coeffs": l.coeffs.iter().map(rational).collect::<Vec<_>>(),
        "text": l.to_string(),
    })
}

pub fn obstruction(o: &CosetObstruction) -> Value {
    json!({
        "representative": rational(&o.representative),
        "step": rational(&o.step),
        "target": laurent(&o.target),
        "divisor_degree": o.divisor_degree,
        "remainder": laurent(&o.remainder),
        "text": o.to_string(),
    })
}
