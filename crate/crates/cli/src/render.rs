use serde_json::{Map, Value};

use crate::args::OutputFormat;

/// A command result: the JSON document, plus an optional flat table used for
/// CSV output.
pub struct Outcome {
    pub value: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Outcome {
    pub fn new(value: Value) -> Self {
        Self { value, table: None }
    }
}

pub fn render(outcome: &Outcome, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&outcome.value).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => match &outcome.table {
            Some(t) => csv_table(t),
            None => {
                let mut pairs = Vec::new();
                flatten("", &outcome.value, &mut pairs);
                csv_table(&Table {
                    headers: vec!["key".into(), "value".into()],
                    rows: pairs.into_iter().map(|(k, v)| vec![Value::String(k), v]).collect(),
                })
            }
        },
        OutputFormat::Text => {
            let mut out = String::new();
            text(&outcome.value, 0, &mut out);
            out
        }
    }
}

fn csv_table(t: &Table) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&t.headers).expect("in-memory write");
    for row in &t.rows {
        w.write_record(row.iter().map(cell)).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_owned()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        leaf => out.push((prefix.to_owned(), leaf.clone())),
    }
}

/// Numbers above 10^6 in magnitude are shown through their base-10 log.
fn text_number(x: f64) -> String {
    if x.abs() > 1e6 {
        let sign = if x < 0.0 { "-" } else { "" };
        format!("{sign}10^{:.2}", x.abs().log10())
    } else if x != 0.0 && x.abs() < 1e-4 {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn text_scalar(v: &Value) -> String {
    match v {
        Value::Null => "n/a".into(),
        Value::Number(n) => n.as_f64().map(text_number).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn text(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => text_object(m, depth, out),
        Value::Array(a) => {
            for (i, item) in a.iter().enumerate() {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        text(item, depth + 1, out);
                    }
                    leaf => out.push_str(&format!("{pad}- {}\n", text_scalar(leaf))),
                }
            }
        }
        leaf => out.push_str(&format!("{pad}{}\n", text_scalar(leaf))),
    }
}

fn text_object(m: &Map<String, Value>, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    for (k, v) in m {
        // counts beyond u64 are null in JSON; show them through their log
        if let (Value::Null, Some(log)) = (v, m.get(&format!("log10_{k}")).and_then(Value::as_f64)) {
            out.push_str(&format!("{pad}{k}: 10^{log:.2}\n"));
            continue;
        }
        match v {
            Value::Object(_) | Value::Array(_) if !is_scalar_list(v) => {
                out.push_str(&format!("{pad}{k}:\n"));
                text(v, depth + 1, out);
            }
            Value::Array(a) => {
                let items: Vec<String> = a.iter().map(text_scalar).collect();
                out.push_str(&format!("{pad}{k}: [{}]\n", items.join(", ")));
            }
            leaf => out.push_str(&format!("{pad}{k}: {}\n", text_scalar(leaf))),
        }
    }
}

fn is_scalar_list(v: &Value) -> bool {
    matches!(v, Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn large_numbers_use_logs_in_text() {
        assert_eq!(text_number(999_999.0), "999999");
        assert_eq!(text_number(1e26), "10^26.00");
        let o = Outcome::new(json!({"bound": 2.5e8, "eps": [0.1, 0.2], "inner": {"x": null}}));
        let t = render(&o, OutputFormat::Text);
        assert_eq!(t, "bound: 10^8.40\neps: [0.1, 0.2]\ninner:\n  x: n/a\n");
        let o = Outcome::new(json!({"bound": null, "log10_bound": 43.826}));
        assert_eq!(render(&o, OutputFormat::Text), "bound: 10^43.83\nlog10_bound: 43.826\n");
    }

    #[test]
    fn csv_flattens_objects() {
        let o = Outcome::new(json!({"a": 1, "b": {"c": [true, null]}}));
        assert_eq!(render(&o, OutputFormat::Csv), "key,value\na,1\nb.c.0,true\nb.c.1,\n");
    }

    #[test]
    fn json_ends_with_newline() {
        let o = Outcome::new(json!({"k": 1.5}));
        assert_eq!(render(&o, OutputFormat::Json), "{\n  \"k\": 1.5\n}\n");
    }
}
