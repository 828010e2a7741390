use crate::Report;

/// One-screen summary: header, verdict, then the top-level result fields
/// (nested values are shown as compact JSON).
pub fn render_text(r: &Report) -> String {
    let mut out = format!("{} {} {} (seed {})\n", r.tool, r.version, r.command, r.seed);
    out.push_str(&format!("verdict: {}\n", serde_json::to_value(r.verdict).expect("verdict").as_str().unwrap_or("?")));
    if let serde_json::Value::Object(fields) = &r.result {
        for (k, v) in fields {
            out.push_str(&format!("  {k}: {}\n", compact(v)));
        }
    }
    for c in &r.certificates {
        out.push_str(&format!("certificate {:?} (p = {})\n", c.kind, c.p));
        for line in &c.trace {
            out.push_str(&format!("  - {line}\n"));
        }
        if let Some(a) = &c.annotation {
            out.push_str(&format!("  note: {a}\n"));
        }
    }
    out
}

fn compact(v: &serde_json::Value) -> String {
    const MAX: usize = 160;
    let s = v.to_string();
    if s.chars().count() <= MAX {
        s
    } else {
        let cut: String = s.chars().take(MAX).collect();
        format!("{cut}…")
    }
}
