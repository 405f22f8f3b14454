//! Versioned JSON envelope for every command's output, and the CSV
//! projection of wall tables. Reports carry no timings so that identical
//! inputs give identical bytes.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::Result;
use crate::rat::fmt_rat;
use crate::walls::WallChamberDecomposition;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub result: serde_json::Value,
}

impl RunReport {
    pub fn new(command: &str, parameters: BTreeMap<String, String>, result: &impl Serialize) -> Result<Self> {
        Ok(RunReport {
            schema_version: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            parameters,
            result: serde_json::to_value(result)?,
        })
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// One row per candidate wall: t, surviving flag, prune rule.
pub fn walls_csv(w: &WallChamberDecomposition) -> String {
    let mut out = String::from("t,surviving,prune_rule\n");
    for c in &w.candidate_walls {
        let rule = match c.prune_rule {
            Some(r) => serde_json::to_value(r).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default(),
            None => String::new(),
        };
        out.push_str(&format!("{},{},{}\n", fmt_rat(&c.t), !c.pruned, rule));
    }
    out
}
