//! Structured reports rendered as indented text or JSON.

use serde_json::{Map, Value};

pub const FORMAT_VERSION: u64 = 1;

/// Floats keep 9 significant digits.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float parses");
    serde_json::Number::from_f64(rounded).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn strings<S: ToString>(xs: impl IntoIterator<Item = S>) -> Value {
    Value::Array(xs.into_iter().map(|s| Value::String(s.to_string())).collect())
}

/// Ordered key/value builder.
#[derive(Default)]
pub struct Doc(Map<String, Value>);

impl Doc {
    pub fn new(command: &str) -> Self {
        let mut d = Doc::default();
        d.set("format", FORMAT_VERSION);
        d.set("command", command);
        d
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn into_value(self) -> Value {
        Value::Object(self.0)
    }
}

impl From<Doc> for Value {
    fn from(d: Doc) -> Value {
        d.into_value()
    }
}

pub fn render(value: &Value, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(value).expect("report serializes");
        s.push('\n');
        s
    } else {
        let mut out = String::new();
        if let Value::Object(map) = value {
            write_object(&mut out, map, 0);
        } else {
            out.push_str(&inline(value));
            out.push('\n');
        }
        out
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::String(s) => !s.contains('\n'),
        Value::Array(xs) => xs.iter().all(|x| matches!(x, Value::Array(_)) && is_flat(x) || is_scalar(x)),
        _ => true,
    }
}

fn is_scalar(v: &Value) -> bool {
    match v {
        Value::String(s) => !s.contains('\n'),
        Value::Array(_) | Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        Value::Bool(b) => if *b { "yes" } else { "no" }.into(),
        Value::Array(xs) => format!("[{}]", xs.iter().map(inline).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

fn write_object(out: &mut String, map: &Map<String, Value>, depth: usize) {
    let pad = "  ".repeat(depth);
    for (k, v) in map {
        write_entry(out, &pad, k, v, depth);
    }
}

fn write_entry(out: &mut String, pad: &str, key: &str, v: &Value, depth: usize) {
    let name = key.replace('_', " ");
    match v {
        Value::Object(m) => {
            out.push_str(&format!("{pad}{name}:\n"));
            write_object(out, m, depth + 1);
        }
        Value::String(s) if s.contains('\n') => {
            out.push_str(&format!("{pad}{name}:\n"));
            for line in s.lines() {
                out.push_str(&format!("{pad}  {line}\n"));
            }
        }
        Value::Array(xs) if !is_flat(v) || (xs.iter().all(Value::is_string) && inline(v).len() > 100) => {
            out.push_str(&format!("{pad}{name}:\n"));
            for x in xs {
                match x {
                    Value::Object(m) => {
                        let mut first = true;
                        for (k, v) in m {
                            let lead = if first { format!("{pad}- ") } else { format!("{pad}  ") };
                            first = false;
                            let mut buf = String::new();
                            write_entry(&mut buf, "", k, v, depth + 2);
                            let mut lines = buf.lines();
                            if let Some(l) = lines.next() {
                                out.push_str(&format!("{lead}{l}\n"));
                            }
                            for l in lines {
                                out.push_str(&format!("{pad}  {l}\n"));
                            }
                        }
                    }
                    other => out.push_str(&format!("{pad}- {}\n", inline(other))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{name}: {}\n", inline(v))),
    }
}
