//! Browser demo: parse a structure file, check that its fields square to
//! zero, and list the neighbor graph. Every entry point returns JSON.

use qdouble::doubles::neighbors::enumerate_neighbors;
use qdouble::dsl;
use qdouble::fields::homological_verdict;
use qdouble::report::Report;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Generators, reversals, field names and sign-bearing reorderings.
#[wasm_bindgen]
pub fn parse_check(src: &str) -> String {
    match dsl::parse_with_warnings(src) {
        Err(e) => error(&e.to_string()),
        Ok((f, warnings)) => {
            let gens: Vec<_> = f
                .chart
                .chart()
                .gens()
                .iter()
                .map(|g| json!({ "name": g.name, "parity": g.parity.to_string(), "weight": g.weight }))
                .collect();
            let fields: Vec<&str> = f.fields.iter().map(|nf| nf.name.as_str()).collect();
            let warnings: Vec<String> = warnings.iter().map(ToString::to_string).collect();
            json!({
                "generators": gens,
                "reversals": f.chart.reversals(),
                "fields": fields,
                "warnings": warnings,
            })
            .to_string()
        }
    }
}

/// `[Q,Q] = 0` for every field of the file.
#[wasm_bindgen]
pub fn check_q2(src: &str) -> String {
    match dsl::parse(src) {
        Err(e) => error(&e.to_string()),
        Ok(f) => {
            let mut r = Report::new("check-q2");
            for nf in &f.fields {
                r.check(nf.name.clone(), &homological_verdict(&nf.field));
            }
            r.to_json()
        }
    }
}

/// The neighbor graph of an n-fold vector bundle, `1 <= n <= 6`.
#[wasm_bindgen]
pub fn neighbors(n: usize) -> String {
    if !(1..=6).contains(&n) {
        return error("n must be between 1 and 6");
    }
    match enumerate_neighbors(n) {
        Ok(g) => serde_json::to_string(&g).expect("graph serializes"),
        Err(e) => error(&e.to_string()),
    }
}

fn error(msg: &str) -> String {
    json!({ "error": msg }).to_string()
}
