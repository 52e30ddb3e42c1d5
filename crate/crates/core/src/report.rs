//! JSON report plumbing shared by the command-line front end and tests.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::compactify::RadialPoint;
use crate::georgescu::GeorgescuPoint;

pub const SCHEMA: &str = "corner-blowup/1";

/// A float that serializes with 17 significant digits; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Decimal(pub f64);

impl Serialize for Decimal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let text = format!("{:.16e}", self.0);
        let number: serde_json::Number = text.parse().map_err(serde::ser::Error::custom)?;
        number.serialize(serializer)
    }
}

pub fn decimals(v: &[f64]) -> Vec<Decimal> {
    v.iter().copied().map(Decimal).collect()
}

pub fn radial(p: &RadialPoint) -> Value {
    let kind = if p.is_interior() { "interior" } else { "direction" };
    json!({ "kind": kind, "vec": decimals(p.vec()) })
}

pub fn tuple(p: &GeorgescuPoint) -> Value {
    Value::Array(p.components.iter().map(radial).collect())
}

/// `{"schema", "command", "config", ...body}` with keys in sorted order;
/// a non-object `body` is stored under `"result"`.
pub fn envelope(command: &str, config: Value, body: impl Serialize) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), Value::String(SCHEMA.into()));
    out.insert("command".into(), Value::String(command.into()));
    out.insert("config".into(), config);
    match serde_json::to_value(body).expect("report bodies are serializable") {
        Value::Object(fields) => out.extend(fields),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}

pub fn render(report: &Value) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("values are serializable");
    text.push('\n');
    text
}
