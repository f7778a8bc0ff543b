//! Plain-text rendering of a JSON report. Every number is printed exactly as
//! it appears in the JSON form.

use serde_json::Value;

pub fn render(title: &str, v: &Value) -> String {
    let mut out = String::new();
    out.push_str(title);
    out.push('\n');
    write_value(&mut out, v, 1);
    out
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(xs) => xs.iter().all(|x| !x.is_object() && is_flat(x)),
        Value::Object(_) => false,
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => {
            let parts: Vec<String> = xs.iter().map(inline).collect();
            format!("[{}]", parts.join(", "))
        }
        other => other.to_string(),
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if is_flat(x) {
                    out.push_str(&format!("{pad}{k}: {}\n", inline(x)));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    write_value(out, x, depth + 1);
                }
            }
        }
        Value::Array(xs) => {
            for (n, x) in xs.iter().enumerate() {
                if is_flat(x) {
                    out.push_str(&format!("{pad}- {}\n", inline(x)));
                } else {
                    out.push_str(&format!("{pad}- [{n}]\n"));
                    write_value(out, x, depth + 1);
                }
            }
        }
        scalar => out.push_str(&format!("{pad}{}\n", inline(scalar))),
    }
}
