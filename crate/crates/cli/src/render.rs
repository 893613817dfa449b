//! Human-readable tables, derived from the same JSON documents that `--format json` prints.

use std::fmt::Write;

use serde_json::Value;

fn s(v: &Value) -> String {
    match v {
        Value::String(x) => x.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn header(out: &mut String, doc: &Value) {
    if let Some(a) = doc.get("algebra") {
        let _ = writeln!(out, "{} rank {} window {}", s(&a["type"]), s(&a["rank"]), s(&a["window"]));
    }
}

fn report_rows(out: &mut String, r: &Value) {
    let subject = match r["subject"].get("type") {
        Some(t) => format!("{} rank {}", s(t), s(&r["subject"]["rank"])),
        None => s(r["subject"].get("name").unwrap_or(&Value::Null)),
    };
    for c in r["checks"].as_array().into_iter().flatten() {
        let status = if c["passed"] == Value::Bool(true) { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status}  {:<18} {:<20} {}", s(&r["suite"]), s(&c["name"]), subject);
        if c["passed"] != Value::Bool(true) {
            let _ = writeln!(out, "      witness: {}", c["witness"]);
        }
    }
    if let Some(ms) = r.get("elapsed_ms") {
        let _ = writeln!(out, "      {} ms", ms);
    }
}

pub fn table(command: &str, doc: &Value) -> String {
    let mut out = String::new();
    match command {
        "build" => {
            header(&mut out, doc);
            let _ = writeln!(out, "{:>6} {:>6} {:>11} {:>8} {:>11} {:>6}", "degree", "core", "complement", "central", "derivation", "total");
            for r in doc["degrees"].as_array().into_iter().flatten() {
                let _ = writeln!(
                    out,
                    "{:>6} {:>6} {:>11} {:>8} {:>11} {:>6}",
                    s(&r["degree"]), s(&r["core"]), s(&r["complement"]), s(&r["central"]), s(&r["derivation"]), s(&r["total"])
                );
            }
            let _ = writeln!(out, "{:<12} degrees", "root");
            for r in doc["roots"].as_array().into_iter().flatten() {
                let ks: Vec<String> = r["degrees"].as_array().into_iter().flatten().map(s).collect();
                let _ = writeln!(out, "{:<12} {}", s(&r["root"]), ks.join(" "));
            }
            let _ = writeln!(out, "dim {}", s(&doc["dim"]));
        }
        "bracket" => {
            header(&mut out, doc);
            if let Some(obj) = doc["result"].as_object() {
                for (k, v) in obj {
                    let _ = writeln!(out, "{k:>3}: {v}");
                }
            }
            let _ = writeln!(out, "cocycle {}", s(&doc["cocycle"]));
        }
        "verify" => {
            for r in doc["reports"].as_array().into_iter().flatten() {
                report_rows(&mut out, r);
            }
            let _ = writeln!(out, "{}", if doc["passed"] == Value::Bool(true) { "all checks passed" } else { "FAILED" });
        }
        "derive" => {
            header(&mut out, doc);
            let r = &doc["report"];
            report_rows(&mut out, r);
            let d = &r["checks"][0]["detail"];
            let _ = writeln!(
                out,
                "degree {} margin {}: solved dim {}, predicted dim {}",
                s(&d["degree"]), s(&d["margin"]), s(&d["solved_dim"]), s(&d["predicted_dim"])
            );
            let gens: Vec<String> = d["predicted"].as_array().into_iter().flatten().map(s).collect();
            let _ = writeln!(out, "predicted span: {}", gens.join(", "));
            for e in doc.get("extensions").and_then(Value::as_array).into_iter().flatten() {
                report_rows(&mut out, e);
            }
            let _ = writeln!(out, "verdict: {}", s(&doc["solution"]["verdict"]));
        }
        "spectrum" => {
            for e in doc["eigenvalues"].as_array().into_iter().flatten() {
                let _ = writeln!(out, "{:<14} {}", s(&e["target"]), s(&e["eigenvalue"]));
            }
            if let Some(o) = doc.get("obstruction") {
                for row in o["scan"].as_array().into_iter().flatten() {
                    let w = match row.get("witness") {
                        Some(w) => format!("{} → {}", s(&w["target"]), s(&w["eigenvalue"])),
                        None => "integral".into(),
                    };
                    let _ = writeln!(out, "a = {:>3}: {w}", s(&row["a"]));
                }
                let _ = writeln!(out, "verdict: {} ({})", s(&o["verdict"]), s(&o["scope"]));
            }
        }
        _ => {
            let _ = writeln!(out, "{doc}");
        }
    }
    out
}
