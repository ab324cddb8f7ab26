use std::collections::BTreeMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::analysis::{to_f64, Estimate};
use crate::netsim::Controller;

/// One reported number: exact when enumerated, with a half-width when sampled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub half_width: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
}

impl Metric {
    pub fn exact(x: &BigRational) -> Self {
        Self { value: to_f64(x), exact: Some(x.to_string()), half_width: None, trials: None }
    }

    pub fn estimate(e: &Estimate) -> Self {
        Self { value: e.frequency, exact: None, half_width: Some(e.half_width), trials: Some(e.trials) }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Cell for CSV output.
    pub fn cell(&self) -> String {
        self.exact.clone().unwrap_or_else(|| format!("{:.6}", self.value))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportMeta {
    pub protocol: String,
    pub ell: usize,
    pub n: usize,
    pub corrupt: Vec<String>,
    pub controller: Controller,
    pub honest_path: bool,
    pub internally_disjoint: bool,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SecurityReport {
    #[serde(flatten)]
    pub meta: ReportMeta,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_receiver: Option<Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon_sender: Option<Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correctness_rate: Option<Metric>,
    pub details: BTreeMap<String, Metric>,
    pub violations: Vec<String>,
}

impl SecurityReport {
    pub fn new(meta: ReportMeta) -> Self {
        Self {
            meta,
            epsilon_receiver: None,
            epsilon_sender: None,
            correctness_rate: None,
            details: BTreeMap::new(),
            violations: Vec::new(),
        }
    }

    pub fn detail(&mut self, key: &str, metric: Metric) {
        self.details.insert(key.to_string(), metric);
    }

    /// Records a violation unless `holds`.
    pub fn require(&mut self, holds: bool, what: impl Into<String>) {
        if !holds {
            self.violations.push(what.into());
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::ratio;

    fn meta() -> ReportMeta {
        ReportMeta {
            protocol: "p1".into(),
            ell: 1,
            n: 2,
            corrupt: vec!["v2".into()],
            controller: Controller::Alice,
            honest_path: true,
            internally_disjoint: true,
            mode: "exact".into(),
            seed: None,
        }
    }

    #[test]
    fn json_shape() {
        let mut r = SecurityReport::new(meta());
        r.epsilon_receiver = Some(Metric::exact(&ratio(0, 1)));
        r.require(false, "distance is not zero");
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["protocol"], "p1");
        assert_eq!(v["epsilon_receiver"]["exact"], "0");
        assert_eq!(v["controller"], "alice");
        assert!(v.get("epsilon_sender").is_none());
        assert!(!r.is_clean());
    }

    #[test]
    fn cells() {
        assert_eq!(Metric::exact(&ratio(3, 4)).cell(), "3/4");
        let e = Estimate::from_counts(50, 100);
        assert_eq!(Metric::estimate(&e).cell(), "0.500000");
    }
}
