//! Machine-readable outputs: JSON report bundles, CSV tables and DOT graphs.
//!
//! Bundles are keyed by `BTreeMap`, so serialization is byte-for-byte
//! reproducible for a fixed configuration and seed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::tower::Tower;
use crate::visual::VisualMetricConfig;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub entries: BTreeMap<String, Value>,
}

impl Bundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert<T: Serialize>(&mut self, key: &str, value: &T) -> Result<()> {
        self.entries.insert(key.to_owned(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&self.entries)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

pub fn write_csv<S: Serialize>(path: &Path, rows: impl IntoIterator<Item = S>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRow {
    pub index: u32,
    pub address: String,
    pub dim: usize,
    pub parent: Option<usize>,
    pub image: Option<usize>,
}

pub fn cell_rows(tower: &Tower, m: u32) -> Result<Vec<CellRow>> {
    let l = tower.level(m)?;
    (0..l.len())
        .map(|i| {
            let c = crate::tower::LevelCell::new(m, i as u32);
            Ok(CellRow {
                index: i as u32,
                address: tower.address(c)?,
                dim: l.dim(i),
                parent: (m > 0).then(|| l.parent(i)),
                image: (m > 0).then(|| l.image(i)),
            })
        })
        .collect()
}

/// Chamber intersection graph of level `m` in DOT.
pub fn chamber_dot(tower: &Tower, m: u32) -> Result<String> {
    let (chambers, adj) = tower.chamber_graph(m)?;
    let mut s = format!("graph level{m} {{\n");
    for (i, c) in chambers.iter().enumerate() {
        writeln!(s, "  n{i} [label=\"{}\"];", tower.address(*c)?).expect("write to string");
    }
    for (i, nb) in adj.iter().enumerate() {
        for &j in nb.iter().filter(|&&j| j as usize > i) {
            writeln!(s, "  n{i} -- n{j};").expect("write to string");
        }
    }
    s.push_str("}\n");
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Qv,
    Bqs,
    Cxc,
    Qs,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "qv" => Suite::Qv,
            "bqs" => Suite::Bqs,
            "cxc" => Suite::Cxc,
            "qs" => Suite::Qs,
            "all" => Suite::All,
            other => return Err(Error::Config(format!("unknown suite `{other}`"))),
        })
    }
}

/// Runs one diagnostics suite (or all of them) up to level `max_m`.
pub fn diagnose(tower: &Tower, suite: Suite, max_m: u32, seed: u64) -> Result<Bundle> {
    let mut b = Bundle::new();
    b.insert("max_level", &max_m)?;
    let want = |s: Suite| suite == s || suite == Suite::All;
    if want(Suite::Qv) {
        b.insert("qv", &tower.qv_constants(max_m, max_m)?)?;
    }
    if want(Suite::Bqs) {
        b.insert("seed", &seed)?;
        b.insert("bqs", &tower.bqs_envelope(1..=max_m.max(1), seed)?)?;
    }
    if want(Suite::Cxc) {
        b.insert("cxc", &tower.cxc_report(max_m)?)?;
    }
    if want(Suite::Qs) {
        let cfg = VisualMetricConfig::vertices(tower, 2.0, 1.0, max_m.clamp(2, 5))?;
        let rep = tower.chain_metric(&cfg)?;
        b.insert("qs", &tower.qs_identity_modulus(&rep, &cfg, 64)?)?;
    }
    Ok(b)
}
