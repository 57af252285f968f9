//! Command reports with JSON and human renderings of the same value.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    /// The command line as given.
    pub command: Vec<String>,
    /// SHA-256 over the input files, each prefixed by its byte length.
    pub input_digest: String,
    pub verdict: String,
    pub exit_code: i32,
    pub details: Map<String, Value>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(command: Vec<String>) -> Self {
        Report {
            command,
            input_digest: digest(&[]),
            verdict: String::new(),
            exit_code: 0,
            details: Map::new(),
            elapsed_ms: 0,
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.details.insert(key.to_string(), v.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_human(&self) -> String {
        let v = serde_json::to_value(self).expect("reports serialize");
        let mut out = String::new();
        if let Value::Object(map) = v {
            for (k, v) in &map {
                render(&mut out, k, v, 0);
            }
        }
        out
    }
}

pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update((i.len() as u64).to_le_bytes());
        h.update(i);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(if *b { "yes" } else { "no" }.into()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = a.iter().filter_map(scalar).collect();
            Some(format!("[{}]", parts.join(", ")))
        }
        _ => None,
    }
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v) {
        out.push_str(&format!("{pad}{key}: {s}\n"));
        return;
    }
    out.push_str(&format!("{pad}{key}:\n"));
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                render(out, k, v, depth + 1);
            }
        }
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                render(out, &format!("[{i}]"), item, depth + 1);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renderings_carry_the_same_facts() {
        let mut r = Report::new(vec!["matchkit".into(), "balance".into()]);
        r.verdict = "unbalanced".into();
        r.exit_code = 1;
        r.set("witness", json!({"length": 3, "edges": ["{f2,w1}", "{f1,w1,w2}"]}));
        let human = r.to_human();
        for fact in ["unbalanced", "length: 3", "{f1,w1,w2}", "exit_code: 1"] {
            assert!(human.contains(fact), "{human}");
        }
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn digest_separates_inputs() {
        assert_ne!(digest(&[b"ab", b"c"]), digest(&[b"a", b"bc"]));
        assert_eq!(digest(&[b"x"]).len(), 64);
    }
}
