//! Grids of experiments over `ell`, path count and corruption set.

use serde_json::Value;

use crate::analysis::{Metric, SecurityReport};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::experiment::config::{ExperimentConfig, Mode};
use crate::experiment::run::evaluate;
use crate::netsim::NodeId;

pub const CSV_HEADER: &str = "protocol,ell,n,corrupt,controller,honest_path,internally_disjoint,mode,\
epsilon_receiver,epsilon_sender,correctness_rate,attack_success,violations";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepSpec {
    pub ell: Option<Vec<usize>>,
    pub n: Option<Vec<usize>>,
    pub corrupt: Option<CorruptAxis>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CorruptAxis {
    /// Every subset of the non-endpoint nodes.
    All,
    Sets(Vec<Vec<String>>),
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::config("$", e.to_string()))?;
        let map = value.as_object().ok_or_else(|| Error::config("$", "expected an object"))?;
        let uints = |key: &str| -> Result<Option<Vec<usize>>> {
            let Some(v) = map.get(key) else { return Ok(None) };
            let items = v.as_array().ok_or_else(|| Error::config(key, "expected an array"))?;
            items
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    x.as_u64().map(|x| x as usize).ok_or_else(|| Error::config(format!("{key}[{i}]"), "expected a positive integer"))
                })
                .collect::<Result<Vec<_>>>()
                .map(Some)
        };
        let mut spec = SweepSpec { ell: uints("ell")?, n: uints("n")?, corrupt: None };
        if let Some(v) = map.get("corrupt") {
            spec.corrupt = Some(match v {
                Value::String(s) if s == "all" => CorruptAxis::All,
                Value::Array(sets) => CorruptAxis::Sets(
                    sets.iter()
                        .enumerate()
                        .map(|(i, set)| {
                            set.as_array()
                                .and_then(|xs| xs.iter().map(|x| x.as_str().map(str::to_string)).collect::<Option<Vec<_>>>())
                                .ok_or_else(|| Error::config(format!("corrupt[{i}]"), "expected an array of node names"))
                        })
                        .collect::<Result<_>>()?,
                ),
                _ => return Err(Error::config("corrupt", "expected \"all\" or an array of node sets")),
            });
        }
        if let Some(key) = map.keys().find(|k| !["ell", "n", "corrupt"].contains(&k.as_str())) {
            return Err(Error::config(key.clone(), "unknown sweep axis"));
        }
        Ok(spec)
    }

    pub fn is_empty(&self) -> bool {
        self.ell.is_none() && self.n.is_none() && self.corrupt.is_none()
    }
}

/// Subsets of `nodes`, by size and then lexicographically.
fn all_subsets(nodes: &[NodeId]) -> Vec<Vec<NodeId>> {
    let mut out: Vec<Vec<NodeId>> = (0..1u64 << nodes.len())
        .map(|mask| nodes.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, n)| n.clone()).collect())
        .collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Rows in spec order: `ell` outermost, corruption set innermost. Exact rows
/// that exceed the enumeration bound are sampled instead.
pub fn sweep(base: &ExperimentConfig, spec: &SweepSpec) -> Result<Vec<SecurityReport>> {
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let ells = spec.ell.clone().unwrap_or_else(|| vec![base.ell]);
    let ns = spec.n.clone().unwrap_or_else(|| vec![base.paths.len()]);
    let mut reports = Vec::new();
    for &ell in &ells {
        for &n in &ns {
            let paths = base.paths.truncated(n).map_err(|e| Error::config("n", e.to_string()))?;
            let sets = match &spec.corrupt {
                None => vec![base.corrupt.clone()],
                Some(CorruptAxis::All) => all_subsets(&base.topology.intermediaries()),
                Some(CorruptAxis::Sets(sets)) => sets.iter().map(|s| s.iter().map(NodeId::new).collect()).collect(),
            };
            for corrupt in sets {
                let mut cfg = base.clone();
                cfg.paths = paths.clone();
                cfg.corrupt = corrupt;
                if ell != base.ell {
                    cfg.ell = ell;
                    let ones = BitString::from_u64(u64::MAX >> (64 - ell), ell)?;
                    let zeros = BitString::zeros(ell)?;
                    cfg.inputs = (0..base.inputs.len()).map(|i| if i % 2 == 0 { zeros } else { ones }).collect();
                }
                cfg.bill_paths.retain(|&j| j < n);
                cfg.anne_paths.retain(|&j| j < n);
                cfg.flip_path = cfg.flip_path.min(n - 1);
                let report = match evaluate(&cfg, false) {
                    Err(Error::EnumerationBound { .. }) if cfg.mode == Mode::Exact => {
                        cfg.mode = Mode::MonteCarlo;
                        evaluate(&cfg, false)?
                    }
                    other => other?,
                };
                reports.push(report);
            }
        }
    }
    Ok(reports)
}

fn cell(m: &Option<Metric>) -> String {
    m.as_ref().map(Metric::cell).unwrap_or_default()
}

pub fn csv_row(r: &SecurityReport) -> String {
    let m = &r.meta;
    let corrupt = if m.corrupt.is_empty() { "-".to_string() } else { m.corrupt.join(";") };
    let controller = serde_json::to_value(m.controller).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
    [
        m.protocol.clone(),
        m.ell.to_string(),
        m.n.to_string(),
        corrupt,
        controller,
        m.honest_path.to_string(),
        m.internally_disjoint.to_string(),
        m.mode.clone(),
        cell(&r.epsilon_receiver),
        cell(&r.epsilon_sender),
        cell(&r.correctness_rate),
        cell(&r.details.get("success").cloned()),
        r.violations.len().to_string(),
    ]
    .join(",")
}

pub fn to_csv(reports: &[SecurityReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}
