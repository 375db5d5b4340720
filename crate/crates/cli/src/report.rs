//! Structured run reports. The JSON tree is the source of truth; the text
//! rendering is derived from it.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Violated,
    UsageError,
    Indeterminate,
    Unsupported,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violated => 1,
            Status::UsageError => 2,
            Status::Indeterminate | Status::Unsupported => 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub args: Map<String, Value>,
    pub status: Status,
    pub exit_code: i32,
    pub result: Value,
    /// Preformatted text output (the `catalog` document); replaces the tree rendering.
    #[serde(skip)]
    pub verbatim: Option<String>,
}

impl Report {
    pub fn new(command: &str, args: Map<String, Value>, status: Status, result: Value) -> Report {
        Report { command: command.into(), args, status, exit_code: status.exit_code(), result, verbatim: None }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        if let Some(v) = &self.verbatim {
            return v.clone();
        }
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, status_word(self.status));
        render(&mut out, &self.result, 1);
        out
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Violated => "violated",
        Status::UsageError => "usage error",
        Status::Indeterminate => "indeterminate",
        Status::Unsupported => "unsupported",
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) && a.len() <= 8 => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        Value::Object(o) if is_window(o) => Some(format!("[{}, {}]", o["lo"], o["hi"])),
        Value::Object(o) if o.len() <= 4 && o.values().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = o.iter().map(|(k, x)| format!("{k}: {}", scalar(x).unwrap_or_default())).collect();
            Some(format!("{{{}}}", parts.join(", ")))
        }
        _ => None,
    }
}

fn is_window(o: &Map<String, Value>) -> bool {
    o.len() == 2 && o.get("lo").is_some_and(Value::is_number) && o.get("hi").is_some_and(Value::is_number)
}

fn render(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(o) => {
            for (k, x) in o {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}{k}: {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(out, x, depth + 1);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        render(out, x, depth + 1);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn text_rendering() {
        let mut args = Map::new();
        args.insert("stages".into(), json!(6));
        let r = Report::new("resolve", args, Status::Ok, json!({"certified": {"lo": -16, "hi": 15}, "counts": {"0": 6, "1": [1, 2], "2": {"a": [{"b": 1}]}}}));
        assert_eq!(r.to_text(), "resolve: ok\n  certified: [-16, 15]\n  counts:\n    0: 6\n    1: [1, 2]\n    2:\n      a:\n        - {b: 1}\n");
        assert_eq!(r.exit_code, 0);
        assert!(r.to_json().contains("\"exit_code\": 0"));
    }
}
