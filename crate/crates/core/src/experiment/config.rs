//! Experiment configuration, read from JSON with field-path diagnostics.

use serde_json::{Map, Value};

use crate::bits::{BitString, ChoiceBit};
use crate::classical_ot::CyclicGroup;
use crate::error::{Error, Result};
use crate::linkot::LinkOt;
use crate::netsim::{Controller, CorruptionSet, NodeId, PathSet, Topology};
use crate::protocols::{Network, Variant};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Protocol {
    Path(Variant),
    Combined,
    Weak,
    Tamper,
}

impl Protocol {
    pub fn name(self) -> &'static str {
        match self {
            Protocol::Path(v) => v.name(),
            Protocol::Combined => "combined",
            Protocol::Weak => "weak",
            Protocol::Tamper => "tamper",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "combined" => Protocol::Combined,
            "weak" => Protocol::Weak,
            "tamper" => Protocol::Tamper,
            _ => Protocol::Path(Variant::ALL.into_iter().find(|v| v.name() == s)?),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Attack {
    Claim2,
    Collude,
    Tamper,
    Reduction,
}

impl Attack {
    pub fn name(self) -> &'static str {
        match self {
            Attack::Claim2 => "claim2",
            Attack::Collude => "collude",
            Attack::Tamper => "tamper",
            Attack::Reduction => "reduction",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Attack::Claim2, Attack::Collude, Attack::Tamper, Attack::Reduction].into_iter().find(|a| a.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    MonteCarlo,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::MonteCarlo => "montecarlo",
        }
    }
}

pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub topology: Topology,
    pub paths: PathSet,
    pub corrupt: Vec<NodeId>,
    pub controller: Controller,
    pub protocol: Protocol,
    pub attack: Option<Attack>,
    pub ell: usize,
    /// `[s0, s1]`, or `[s00, s01, s10, s11]` for the weak protocol.
    pub inputs: Vec<BitString>,
    pub choice: ChoiceBit,
    pub choice2: ChoiceBit,
    pub mode: Mode,
    pub trials: u64,
    pub seed: u64,
    pub group: CyclicGroup,
    pub link_ot: LinkOt,
    pub k: usize,
    pub open_fraction: f64,
    pub flip_path: usize,
    pub anne_paths: Vec<usize>,
    pub bill_paths: Vec<usize>,
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::config("$", e.to_string()))?;
        Self::from_value(&value)
    }

    pub fn from_value(value: &Value) -> Result<Self> {
        let root = Obj::root(value)?;
        let nodes = root.req("nodes")?.strings()?;
        let edges: Vec<(String, String)> = root
            .req("edges")?
            .array()?
            .into_iter()
            .map(|e| {
                let pair = e.strings()?;
                match pair.as_slice() {
                    [a, b] => Ok((a.clone(), b.clone())),
                    _ => Err(e.error("an edge is a pair of node names")),
                }
            })
            .collect::<Result<_>>()?;
        let alice = root.req("alice")?.string()?;
        let bob = root.req("bob")?.string()?;
        let edges = edges.iter().map(|(a, b)| (NodeId::new(a), NodeId::new(b)));
        let topology = Topology::new(nodes.iter().map(NodeId::new), edges, NodeId::new(alice), NodeId::new(bob))
            .map_err(|e| Error::config("$", e.to_string()))?;

        let paths_field = root.req("paths")?;
        let mut paths = Vec::new();
        for p in paths_field.array()? {
            let hops = p.strings()?;
            for (i, h) in hops.iter().enumerate() {
                if !topology.contains(&NodeId::new(h)) {
                    return Err(Error::config(format!("{}[{i}]", p.path), format!("unknown node {h:?}")));
                }
            }
            paths.push(hops.into_iter().map(NodeId::new).collect());
        }
        let paths = PathSet::new(&topology, paths).map_err(|e| paths_field.error(e.to_string()))?;

        let corrupt = match root.opt("corrupt") {
            Some(f) => {
                let names = f.strings()?;
                for (i, n) in names.iter().enumerate() {
                    let id = NodeId::new(n);
                    if !topology.contains(&id) {
                        return Err(Error::config(format!("corrupt[{i}]"), format!("unknown node {n:?}")));
                    }
                    if id == *topology.alice() || id == *topology.bob() {
                        return Err(Error::config(format!("corrupt[{i}]"), "alice and bob are corrupted through \"controller\""));
                    }
                }
                names.into_iter().map(NodeId::new).collect()
            }
            None => Vec::new(),
        };
        let controller = match root.opt("controller") {
            Some(f) => match f.string()?.as_str() {
                "alice" => Controller::Alice,
                "bob" => Controller::Bob,
                "independent" | "none" => Controller::Independent,
                other => return Err(f.error(format!("unknown controller {other:?}"))),
            },
            None => Controller::Independent,
        };

        let protocol = match root.opt("protocol") {
            Some(f) => {
                let s = f.string()?;
                Protocol::parse(&s).ok_or_else(|| f.error(format!("unknown protocol {s:?}")))?
            }
            None => Protocol::Path(Variant::Protocol1),
        };
        let attack = match root.opt("attack") {
            Some(f) => {
                let s = f.string()?;
                Some(Attack::parse(&s).ok_or_else(|| f.error(format!("unknown attack {s:?}")))?)
            }
            None => None,
        };

        let mut inputs = Vec::new();
        if let Some(f) = root.opt("inputs") {
            for item in f.array()? {
                let s = item.string()?;
                inputs.push(s.parse::<BitString>().map_err(|e| item.error(e.to_string()))?);
            }
        }
        let ell = match root.opt("ell") {
            Some(f) => f.uint()? as usize,
            None => inputs.first().map_or(1, |s| s.len()),
        };
        if ell == 0 || ell > crate::bits::MAX_LEN {
            return Err(Error::config("ell", format!("must be between 1 and {}", crate::bits::MAX_LEN)));
        }
        let want = if protocol == Protocol::Weak { 4 } else { 2 };
        if inputs.is_empty() {
            let ones = BitString::from_u64(u64::MAX >> (64 - ell), ell)?;
            let zeros = BitString::zeros(ell)?;
            inputs = (0..want).map(|i| if i % 2 == 0 { zeros } else { ones }).collect();
        }
        if inputs.len() != want {
            return Err(Error::config("inputs", format!("{} needs {want} input strings", protocol.name())));
        }
        if let Some(i) = inputs.iter().position(|s| s.len() != ell) {
            return Err(Error::config(format!("inputs[{i}]"), format!("length differs from ell = {ell}")));
        }

        let choice = root.opt("choice").map(|f| f.bit()).transpose()?.unwrap_or(ChoiceBit::ZERO);
        let choice2 = root.opt("choice2").map(|f| f.bit()).transpose()?.unwrap_or(ChoiceBit::ZERO);
        let mode = match root.opt("mode") {
            Some(f) => match f.string()?.as_str() {
                "exact" => Mode::Exact,
                "montecarlo" => Mode::MonteCarlo,
                other => return Err(f.error(format!("unknown mode {other:?}"))),
            },
            None => Mode::Exact,
        };
        let trials = root.opt("trials").map(|f| f.uint()).transpose()?.unwrap_or(DEFAULT_TRIALS);
        let seed = root.opt("seed").map(|f| f.uint()).transpose()?.unwrap_or(0);
        let group = match root.opt("group") {
            Some(f) => {
                let g = f.object()?;
                let (p, q, gen) = (g.req("p")?.uint()?, g.req("q")?.uint()?, g.req("g")?.uint()?);
                CyclicGroup::new(p, q, gen).map_err(|e| f.error(e.to_string()))?
            }
            None => CyclicGroup::toy(),
        };
        let link_ot = match root.opt("link_ot") {
            Some(f) => match f.string()?.as_str() {
                "ideal" => LinkOt::Ideal,
                "ddh" => LinkOt::Ddh(group),
                other => return Err(f.error(format!("unknown link_ot {other:?}"))),
            },
            None => LinkOt::Ideal,
        };
        let k = root.opt("k").map(|f| f.uint()).transpose()?.unwrap_or(8) as usize;
        let open_fraction = root.opt("open_fraction").map(|f| f.float()).transpose()?.unwrap_or(0.5);
        let flip_path = root.opt("flip_path").map(|f| f.uint()).transpose()?.unwrap_or(0) as usize;
        if flip_path >= paths.len() {
            return Err(Error::config("flip_path", format!("only {} paths", paths.len())));
        }
        let indices = |key: &str| -> Result<Option<Vec<usize>>> {
            root.opt(key).map(|f| f.array()?.into_iter().map(|x| Ok(x.uint()? as usize)).collect()).transpose()
        };
        let anne_paths = indices("anne_paths")?.unwrap_or_else(|| vec![0]);
        let bill_paths = indices("bill_paths")?.unwrap_or_else(|| (1..paths.len()).collect());
        let out = root.opt("out").map(|f| f.string()).transpose()?;

        Ok(Self {
            topology,
            paths,
            corrupt,
            controller,
            protocol,
            attack,
            ell,
            inputs,
            choice,
            choice2,
            mode,
            trials,
            seed,
            group,
            link_ot,
            k,
            open_fraction,
            flip_path,
            anne_paths,
            bill_paths,
            out,
        })
    }

    pub fn network(&self) -> Network {
        Network::new(self.topology.clone(), self.paths.clone()).with_link_ot(self.link_ot)
    }

    pub fn corruption(&self) -> Result<CorruptionSet> {
        CorruptionSet::new(&self.topology, self.corrupt.iter().cloned(), self.controller)
    }
}

/// A JSON value together with where it sits in the document.
struct Field<'a> {
    path: String,
    value: &'a Value,
}

impl<'a> Field<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::config(self.path.clone(), message)
    }

    fn object(&self) -> Result<Obj<'a>> {
        match self.value {
            Value::Object(map) => Ok(Obj { path: self.path.clone(), map }),
            _ => Err(self.error("expected an object")),
        }
    }

    fn array(&self) -> Result<Vec<Field<'a>>> {
        match self.value {
            Value::Array(items) => {
                Ok(items.iter().enumerate().map(|(i, v)| Field { path: format!("{}[{i}]", self.path), value: v }).collect())
            }
            _ => Err(self.error("expected an array")),
        }
    }

    fn string(&self) -> Result<String> {
        self.value.as_str().map(str::to_string).ok_or_else(|| self.error("expected a string"))
    }

    fn strings(&self) -> Result<Vec<String>> {
        self.array()?.iter().map(|f| f.string()).collect()
    }

    fn uint(&self) -> Result<u64> {
        self.value.as_u64().ok_or_else(|| self.error("expected a non-negative integer"))
    }

    fn float(&self) -> Result<f64> {
        self.value.as_f64().ok_or_else(|| self.error("expected a number"))
    }

    fn bit(&self) -> Result<ChoiceBit> {
        match self.value.as_u64() {
            Some(0) => Ok(ChoiceBit::ZERO),
            Some(1) => Ok(ChoiceBit::ONE),
            _ => Err(self.error("expected 0 or 1")),
        }
    }
}

struct Obj<'a> {
    path: String,
    map: &'a Map<String, Value>,
}

impl<'a> Obj<'a> {
    fn root(value: &'a Value) -> Result<Self> {
        match value {
            Value::Object(map) => Ok(Self { path: String::new(), map }),
            _ => Err(Error::config("$", "expected an object")),
        }
    }

    fn key_path(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{key}", self.path)
        }
    }

    fn opt(&self, key: &str) -> Option<Field<'a>> {
        self.map.get(key).filter(|v| !v.is_null()).map(|value| Field { path: self.key_path(key), value })
    }

    fn req(&self, key: &str) -> Result<Field<'a>> {
        self.opt(key).ok_or_else(|| Error::config(self.key_path(key), "missing required field"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIAMOND: &str = r#"{"nodes":["a","v1","v2","b"],"edges":[["a","v1"],["v1","b"],["a","v2"],["v2","b"]],
        "alice":"a","bob":"b","corrupt":["v2"],"controller":"alice","paths":[["a","v1","b"],["a","v2","b"]]}"#;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_json(DIAMOND).unwrap();
        assert_eq!(c.protocol, Protocol::Path(Variant::Protocol1));
        assert_eq!(c.mode, Mode::Exact);
        assert_eq!(c.ell, 1);
        assert_eq!(c.inputs.len(), 2);
        assert_eq!(c.bill_paths, vec![1]);
    }

    #[test]
    fn missing_paths_is_named() {
        let mut v: Value = serde_json::from_str(DIAMOND).unwrap();
        v.as_object_mut().unwrap().remove("paths");
        let err = ExperimentConfig::from_value(&v).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "paths"), "{err}");
    }

    #[test]
    fn nested_paths_in_errors() {
        let mut v: Value = serde_json::from_str(DIAMOND).unwrap();
        v["paths"][1][1] = "zz".into();
        let err = ExperimentConfig::from_value(&v).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "paths[1][1]"), "{err}");
        v["paths"][1][1] = "v2".into();
        v["group"] = serde_json::json!({"p": 23, "q": 11});
        let err = ExperimentConfig::from_value(&v).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "group.g"), "{err}");
    }

    #[test]
    fn weak_needs_four_inputs() {
        let mut v: Value = serde_json::from_str(DIAMOND).unwrap();
        v["protocol"] = "weak".into();
        v["inputs"] = serde_json::json!(["01", "10"]);
        assert!(ExperimentConfig::from_value(&v).is_err());
        v["inputs"] = serde_json::json!(["01", "10", "11", "00"]);
        assert_eq!(ExperimentConfig::from_value(&v).unwrap().ell, 2);
    }
}
