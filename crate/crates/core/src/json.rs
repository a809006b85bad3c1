//! JSON schemas for complexes and rules.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::builtin::Example;
use crate::complex::{CellComplex, CellId, CellSpec};
use crate::error::{Error, Result};
use crate::realization::{AffineBranch, Cuboid, Model, Realization};
use crate::rule::SubdivisionRule;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexFile {
    pub dim_top: usize,
    pub cells: Vec<CellSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxTables {
    pub base: BTreeMap<CellId, Cuboid>,
    pub refined: BTreeMap<CellId, Cuboid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationFile {
    pub model: String,
    pub side: f64,
    #[serde(default)]
    pub dim: Option<usize>,
    pub boxes: BoxTables,
    pub branch_inverses: BTreeMap<CellId, AffineBranch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleFile {
    pub base: ComplexFile,
    pub refined: ComplexFile,
    pub parent: BTreeMap<CellId, CellId>,
    pub image: BTreeMap<CellId, CellId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realization: Option<RealizationFile>,
}

impl From<&CellComplex> for ComplexFile {
    fn from(c: &CellComplex) -> Self {
        ComplexFile {
            dim_top: c.dim_top(),
            cells: c.to_specs(),
        }
    }
}

impl ComplexFile {
    pub fn build(self) -> Result<CellComplex> {
        CellComplex::new(self.dim_top, self.cells)
    }
}

fn schema(e: serde_json::Error) -> Error {
    Error::Schema {
        path: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

pub fn complex_from_str(s: &str) -> Result<CellComplex> {
    serde_json::from_str::<ComplexFile>(s).map_err(schema)?.build()
}

pub fn complex_to_string(c: &CellComplex) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ComplexFile::from(c))?)
}

pub fn rule_file(ex: &Example) -> RuleFile {
    let rule = &ex.rule;
    RuleFile {
        base: rule.base().into(),
        refined: rule.refined().into(),
        parent: rule.parent_map(),
        image: rule.image_map(),
        realization: ex.realization.as_ref().map(|r| realization_file(rule, r)),
    }
}

fn realization_file(rule: &SubdivisionRule, r: &Realization) -> RealizationFile {
    let (model, side, dim) = match &r.model {
        Model::FlatTorus { side, dim } => ("flat_torus", *side, Some(*dim)),
        Model::Pillowcase { side } => ("pillowcase", *side, Some(2)),
    };
    let table = |c: &CellComplex, boxes: &[Cuboid]| {
        (0..c.len()).map(|i| (c.id(i).clone(), boxes[i].clone())).collect()
    };
    RealizationFile {
        model: model.into(),
        side,
        dim,
        boxes: BoxTables {
            base: table(rule.base(), &r.base_boxes),
            refined: table(rule.refined(), &r.refined_boxes),
        },
        branch_inverses: r
            .branches
            .iter()
            .enumerate()
            .filter_map(|(i, b)| b.as_ref().map(|b| (rule.refined().id(i).clone(), b.clone())))
            .collect(),
    }
}

pub fn rule_to_string(ex: &Example) -> Result<String> {
    Ok(serde_json::to_string_pretty(&rule_file(ex))?)
}

pub fn rule_from_str(s: &str) -> Result<Example> {
    let file: RuleFile = serde_json::from_str(s).map_err(schema)?;
    let base = file.base.build()?;
    let refined = file.refined.build()?;
    let rule = SubdivisionRule::new(base, refined, &file.parent, &file.image)?;
    let realization = file.realization.map(|r| realization_from_file(&rule, r)).transpose()?;
    Ok(Example {
        name: "rule".into(),
        rule,
        realization,
    })
}

fn realization_from_file(rule: &SubdivisionRule, f: RealizationFile) -> Result<Realization> {
    let model = match f.model.as_str() {
        "flat_torus" => Model::FlatTorus {
            side: f.side,
            dim: f.dim.unwrap_or(rule.base().dim_top()),
        },
        "pillowcase" => Model::Pillowcase { side: f.side },
        other => {
            return Err(Error::Schema {
                path: "realization.model".into(),
                message: format!("unknown model `{other}`"),
            })
        }
    };
    let table = |c: &CellComplex, boxes: &BTreeMap<CellId, Cuboid>, what: &str| -> Result<Vec<Cuboid>> {
        (0..c.len())
            .map(|i| {
                boxes.get(c.id(i)).cloned().ok_or_else(|| Error::Schema {
                    path: format!("realization.boxes.{what}"),
                    message: format!("no box for `{}`", c.id(i)),
                })
            })
            .collect()
    };
    let base_boxes = table(rule.base(), &f.boxes.base, "base")?;
    let refined_boxes = table(rule.refined(), &f.boxes.refined, "refined")?;
    for id in f.branch_inverses.keys() {
        rule.refined().index_of(id)?;
    }
    let branches = rule
        .refined()
        .ids()
        .iter()
        .map(|id| f.branch_inverses.get(id).cloned())
        .collect();
    Ok(Realization {
        model,
        base_boxes,
        refined_boxes,
        branches,
    })
}
