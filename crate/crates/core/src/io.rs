//! File formats: family JSON, search results and bound reports.
//!
//! The family writer is hand-rolled so output is byte-stable: fixed key
//! order, one set per line, sets in lexicographic order.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::BoundReport;
use crate::error::{domain, Error, Result};
use crate::family::Family;
use crate::lowint::SpreadFamily;
use crate::search::SearchResult;
use crate::setkit::Params;

pub const REPORT_CSV_HEADER: [&str; 9] =
    ["name", "n", "k", "params", "lhs", "rhs", "slack", "hypotheses_met", "assertable"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub n: usize,
    pub k: usize,
    pub sets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

impl FamilyFile {
    pub fn from_family(f: &Family, meta: Option<Value>) -> Self {
        let p = f.params();
        FamilyFile { n: p.n(), k: p.k(), sets: f.to_vecs(), meta }
    }

    pub fn to_family(&self) -> Result<Family> {
        let p = Params::new(self.n, self.k)?;
        Family::from_sets(p, &self.sets)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Domain(format!("invalid family file: {e}")))
    }

    pub fn render(&self) -> String {
        let mut out = format!("{{\n  \"n\": {},\n  \"k\": {},\n  \"sets\": [", self.n, self.k);
        for (i, s) in self.sets.iter().enumerate() {
            let items: Vec<String> = s.iter().map(|x| x.to_string()).collect();
            out.push_str(if i == 0 { "\n    [" } else { ",\n    [" });
            out.push_str(&items.join(", "));
            out.push(']');
        }
        out.push_str(if self.sets.is_empty() { "]" } else { "\n  ]" });
        if let Some(meta) = &self.meta {
            out.push_str(",\n  \"meta\": ");
            out.push_str(&serde_json::to_string(meta).expect("json value"));
        }
        out.push_str("\n}\n");
        out
    }
}

pub fn write_family(f: &Family, meta: Option<Value>) -> String {
    FamilyFile::from_family(f, meta).render()
}

pub fn read_family(text: &str) -> Result<(Family, Option<Value>)> {
    let file = FamilyFile::parse(text)?;
    let f = file.to_family()?;
    if f.len() != file.sets.len() {
        return domain("family file lists a set twice");
    }
    Ok((f, file.meta))
}

pub fn write_spread_family(s: &SpreadFamily) -> String {
    let meta = serde_json::to_value(&s.meta).expect("meta serializes");
    write_family(&s.family, Some(meta))
}

pub fn search_result_json(r: &SearchResult) -> Value {
    json!({
        "m": r.m,
        "n": r.params.n(),
        "k": r.params.k(),
        "objective": r.objective.as_str(),
        "optimum": r.optimum,
        "witness": r.witness.as_ref().map(|w| w.to_vecs()).unwrap_or_default(),
        "nodes": r.nodes_explored,
        "proven_optimal": r.proven_optimal,
    })
}

pub fn reports_csv(reports: &[BoundReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Resource(format!("csv: {e}"));
    w.write_record(REPORT_CSV_HEADER).map_err(io)?;
    for r in reports {
        w.write_record([
            r.name.clone(),
            r.n.to_string(),
            r.k.to_string(),
            r.params.clone(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.slack.to_string(),
            r.hypotheses_met.to_string(),
            r.assertable.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Resource(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Reports as a JSON array; rationals are `"p/q"` strings.
pub fn reports_json(reports: &[BoundReport]) -> Value {
    Value::Array(
        reports
            .iter()
            .map(|r| {
                json!({
                    "name": r.name,
                    "n": r.n,
                    "k": r.k,
                    "params": r.params,
                    "lhs": r.lhs.to_string(),
                    "rhs": r.rhs.to_string(),
                    "slack": r.slack.to_string(),
                    "strict": r.strict,
                    "holds": r.holds(),
                    "hypotheses_met": r.hypotheses_met,
                    "assertable": r.assertable,
                    "note": r.note,
                })
            })
            .collect(),
    )
}
