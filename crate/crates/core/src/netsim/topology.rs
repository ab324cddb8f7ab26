use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Name of a network node.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(Arc<str>);

impl NodeId {
    pub fn new(name: impl AsRef<str>) -> Self {
        NodeId(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl Serialize for NodeId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(NodeId::new(String::deserialize(deserializer)?))
    }
}

/// Undirected network graph with two distinguished endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
    alice: NodeId,
    bob: NodeId,
}

impl Topology {
    pub fn new<N, E>(nodes: N, edges: E, alice: impl Into<NodeId>, bob: impl Into<NodeId>) -> Result<Self>
    where
        N: IntoIterator,
        N::Item: Into<NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let alice = alice.into();
        let bob = bob.into();
        let mut adjacency: BTreeMap<NodeId, BTreeSet<NodeId>> =
            nodes.into_iter().map(|n| (n.into(), BTreeSet::new())).collect();
        if alice == bob {
            return Err(Error::InvalidTopology("alice and bob must be distinct".into()));
        }
        for end in [&alice, &bob] {
            if !adjacency.contains_key(end) {
                return Err(Error::InvalidTopology(format!("endpoint {end} is not a node")));
            }
        }
        for (a, b) in edges {
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop on {a}")));
            }
            for n in [&a, &b] {
                if !adjacency.contains_key(n) {
                    return Err(Error::InvalidTopology(format!("edge references unknown node {n}")));
                }
            }
            adjacency.get_mut(&a).expect("checked").insert(b.clone());
            adjacency.get_mut(&b).expect("checked").insert(a);
        }
        Ok(Self { adjacency, alice, bob })
    }

    /// Convenience constructor from string slices.
    pub fn from_names(nodes: &[&str], edges: &[(&str, &str)], alice: &str, bob: &str) -> Result<Self> {
        Self::new(
            nodes.iter().copied(),
            edges.iter().map(|&(a, b)| (NodeId::new(a), NodeId::new(b))),
            alice,
            bob,
        )
    }

    pub fn alice(&self) -> &NodeId {
        &self.alice
    }

    pub fn bob(&self) -> &NodeId {
        &self.bob
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.adjacency.keys()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.adjacency.contains_key(node)
    }

    pub fn neighbors(&self, node: &NodeId) -> impl Iterator<Item = &NodeId> {
        self.adjacency.get(node).into_iter().flatten()
    }

    pub fn has_edge(&self, a: &NodeId, b: &NodeId) -> bool {
        self.adjacency.get(a).is_some_and(|n| n.contains(b))
    }

    /// Each edge once, with endpoints in sorted order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for (a, ns) in &self.adjacency {
            for b in ns {
                if a < b {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }

    /// Nodes other than alice and bob.
    pub fn intermediaries(&self) -> Vec<NodeId> {
        self.nodes().filter(|n| **n != self.alice && **n != self.bob).cloned().collect()
    }

    /// True when every alice-bob path in the graph passes through `removed`.
    pub fn separates(&self, removed: &BTreeSet<NodeId>) -> bool {
        if self.has_edge(&self.alice, &self.bob) {
            return false;
        }
        let mut seen = BTreeSet::from([self.alice.clone()]);
        let mut queue = VecDeque::from([self.alice.clone()]);
        while let Some(n) = queue.pop_front() {
            for m in self.neighbors(&n) {
                if *m == self.bob {
                    return false;
                }
                if !removed.contains(m) && seen.insert(m.clone()) {
                    queue.push_back(m.clone());
                }
            }
        }
        true
    }
}

/// The `N` alice-to-bob paths a protocol runs over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathSet {
    paths: Vec<Vec<NodeId>>,
}

impl PathSet {
    pub fn new(topology: &Topology, paths: Vec<Vec<NodeId>>) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::contract("a path set needs at least one path"));
        }
        for (j, path) in paths.iter().enumerate() {
            if path.len() < 2 || path[0] != *topology.alice() || path[path.len() - 1] != *topology.bob() {
                return Err(Error::contract(format!("path {j} must run from alice to bob")));
            }
            let distinct: BTreeSet<_> = path.iter().collect();
            if distinct.len() != path.len() {
                return Err(Error::contract(format!("path {j} repeats a node")));
            }
            for hop in path.windows(2) {
                if !topology.has_edge(&hop[0], &hop[1]) {
                    return Err(Error::NotALink { a: hop[0].to_string(), b: hop[1].to_string() });
                }
            }
        }
        Ok(Self { paths })
    }

    pub fn from_names(topology: &Topology, paths: &[&[&str]]) -> Result<Self> {
        Self::new(topology, paths.iter().map(|p| p.iter().map(|&n| NodeId::new(n)).collect()).collect())
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn path(&self, j: usize) -> &[NodeId] {
        &self.paths[j]
    }

    pub fn paths(&self) -> &[Vec<NodeId>] {
        &self.paths
    }

    /// Alice's neighbour on path `j`.
    pub fn first_hop(&self, j: usize) -> &NodeId {
        &self.paths[j][1]
    }

    /// Bob's neighbour on path `j`.
    pub fn last_hop(&self, j: usize) -> &NodeId {
        let p = &self.paths[j];
        &p[p.len() - 2]
    }

    pub fn internal(&self, j: usize) -> &[NodeId] {
        let p = &self.paths[j];
        &p[1..p.len() - 1]
    }

    /// All internal nodes across the set, sorted.
    pub fn internal_nodes(&self) -> BTreeSet<NodeId> {
        (0..self.len()).flat_map(|j| self.internal(j).iter().cloned()).collect()
    }

    pub fn is_internally_disjoint(&self) -> bool {
        let mut seen = BTreeSet::new();
        (0..self.len()).all(|j| self.internal(j).iter().all(|n| seen.insert(n.clone())))
    }

    /// The first `n` paths.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n == 0 || n > self.len() {
            return Err(Error::contract(format!("cannot take {n} of {} paths", self.len())));
        }
        Ok(Self { paths: self.paths[..n].to_vec() })
    }
}

/// Who the corrupted nodes work for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Controller {
    Alice,
    Bob,
    Independent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorruptionSet {
    corrupted: BTreeSet<NodeId>,
    controller: Controller,
}

impl CorruptionSet {
    pub fn new(topology: &Topology, corrupted: impl IntoIterator<Item = NodeId>, controller: Controller) -> Result<Self> {
        let corrupted: BTreeSet<NodeId> = corrupted.into_iter().collect();
        for n in &corrupted {
            if !topology.contains(n) {
                return Err(Error::InvalidTopology(format!("corrupted node {n} is not in the topology")));
            }
            if n == topology.alice() || n == topology.bob() {
                return Err(Error::contract("alice and bob are marked dishonest through the controller"));
            }
        }
        Ok(Self { corrupted, controller })
    }

    pub fn from_names(topology: &Topology, corrupted: &[&str], controller: Controller) -> Result<Self> {
        Self::new(topology, corrupted.iter().map(|&n| NodeId::new(n)), controller)
    }

    pub fn honest(topology: &Topology) -> Self {
        let _ = topology;
        Self { corrupted: BTreeSet::new(), controller: Controller::Independent }
    }

    pub fn corrupted(&self) -> &BTreeSet<NodeId> {
        &self.corrupted
    }

    pub fn controller(&self) -> Controller {
        self.controller
    }

    pub fn with_controller(&self, controller: Controller) -> Self {
        Self { corrupted: self.corrupted.clone(), controller }
    }

    /// Corrupted nodes plus the dishonest endpoint, if any.
    pub fn coalition(&self, topology: &Topology) -> BTreeSet<NodeId> {
        let mut out = self.corrupted.clone();
        match self.controller {
            Controller::Alice => {
                out.insert(topology.alice().clone());
            }
            Controller::Bob => {
                out.insert(topology.bob().clone());
            }
            Controller::Independent => {}
        }
        out
    }
}

fn simple_paths(topology: &Topology, limit: usize) -> Vec<Vec<NodeId>> {
    fn walk(
        topology: &Topology,
        path: &mut Vec<NodeId>,
        on_path: &mut BTreeSet<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let here = path.last().expect("nonempty").clone();
        if here == *topology.bob() {
            out.push(path.clone());
            return;
        }
        for next in topology.neighbors(&here) {
            if on_path.insert(next.clone()) {
                path.push(next.clone());
                walk(topology, path, on_path, out, limit);
                path.pop();
                on_path.remove(next);
            }
        }
    }
    let start = topology.alice().clone();
    let mut out = Vec::new();
    walk(topology, &mut vec![start.clone()], &mut BTreeSet::from([start]), &mut out, limit);
    out
}

const PATH_SEARCH_LIMIT: usize = 4096;

/// Largest set of internally disjoint paths, earliest in lexicographic order
/// among those of maximum size.
fn max_disjoint(paths: &[Vec<NodeId>]) -> Vec<usize> {
    fn search(
        paths: &[Vec<NodeId>],
        from: usize,
        used: &mut BTreeSet<NodeId>,
        chosen: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if chosen.len() > best.len() {
            *best = chosen.clone();
        }
        if chosen.len() + (paths.len() - from) <= best.len() {
            return;
        }
        for i in from..paths.len() {
            let inner = &paths[i][1..paths[i].len() - 1];
            if inner.iter().all(|n| !used.contains(n)) {
                used.extend(inner.iter().cloned());
                chosen.push(i);
                search(paths, i + 1, used, chosen, best);
                chosen.pop();
                for n in inner {
                    used.remove(n);
                }
            }
        }
    }
    let mut best = Vec::new();
    search(paths, 0, &mut BTreeSet::new(), &mut Vec::new(), &mut best);
    best
}

/// Up to `max_paths` simple alice-to-bob paths: a maximum internally
/// disjoint subset first, then the remaining paths, each group in
/// lexicographic order.
pub fn enumerate_paths(topology: &Topology, max_paths: usize) -> Result<PathSet> {
    if max_paths == 0 {
        return Err(Error::contract("max_paths must be positive"));
    }
    let mut all = simple_paths(topology, PATH_SEARCH_LIMIT);
    if all.is_empty() {
        return Err(Error::NoPath { from: topology.alice().to_string(), to: topology.bob().to_string() });
    }
    all.sort();
    let disjoint = max_disjoint(&all);
    let mut ordered: Vec<Vec<NodeId>> = disjoint.iter().map(|&i| all[i].clone()).collect();
    ordered.extend(all.iter().enumerate().filter(|(i, _)| !disjoint.contains(i)).map(|(_, p)| p.clone()));
    ordered.truncate(max_paths);
    PathSet::new(topology, ordered)
}

/// Some path in the set has no corrupted internal node.
pub fn exists_honest_path(topology: &Topology, paths: &PathSet, corruption: &CorruptionSet) -> bool {
    let _ = topology;
    (0..paths.len()).any(|j| paths.internal(j).iter().all(|n| !corruption.corrupted().contains(n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(p: &[NodeId]) -> Vec<&str> {
        p.iter().map(|n| n.as_str()).collect()
    }

    fn diamond() -> Topology {
        Topology::from_names(&["a", "v1", "v2", "b"], &[("a", "v1"), ("v1", "b"), ("a", "v2"), ("v2", "b")], "a", "b")
            .unwrap()
    }

    #[test]
    fn rejects_bad_topologies() {
        assert!(Topology::from_names(&["a"], &[], "a", "a").is_err());
        assert!(Topology::from_names(&["a", "b"], &[("a", "a")], "a", "b").is_err());
        assert!(Topology::from_names(&["a", "b"], &[("a", "x")], "a", "b").is_err());
        assert!(Topology::from_names(&["a"], &[], "a", "b").is_err());
    }

    #[test]
    fn line_has_one_path() {
        let t = Topology::from_names(&["a", "v", "b"], &[("a", "v"), ("v", "b")], "a", "b").unwrap();
        let ps = enumerate_paths(&t, 5).unwrap();
        assert_eq!(ps.len(), 1);
        assert_eq!(names(ps.path(0)), ["a", "v", "b"]);
    }

    #[test]
    fn diamond_has_two_disjoint_paths() {
        let ps = enumerate_paths(&diamond(), 5).unwrap();
        assert_eq!(names(ps.path(0)), ["a", "v1", "b"]);
        assert_eq!(names(ps.path(1)), ["a", "v2", "b"]);
        assert!(ps.is_internally_disjoint());
        assert_eq!(ps.first_hop(1).as_str(), "v2");
        assert_eq!(ps.last_hop(0).as_str(), "v1");
    }

    #[test]
    fn complete_graph_prefers_disjoint_paths() {
        let nodes = ["a", "v1", "v2", "b"];
        let mut edges = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                edges.push((nodes[i], nodes[j]));
            }
        }
        let t = Topology::from_names(&nodes, &edges, "a", "b").unwrap();
        // brute force: every simple path, checked by hand against the graph
        let all = simple_paths(&t, 100);
        assert_eq!(all.len(), 5);
        let ps = enumerate_paths(&t, 3).unwrap();
        assert_eq!(ps.len(), 3);
        assert!(ps.truncated(2).unwrap().is_internally_disjoint());
        assert!(ps.is_internally_disjoint());
        assert_eq!(names(ps.path(0)), ["a", "b"]);
    }

    #[test]
    fn disconnected_has_no_path() {
        let t = Topology::from_names(&["a", "v", "b"], &[("a", "v")], "a", "b").unwrap();
        assert!(matches!(enumerate_paths(&t, 1), Err(Error::NoPath { .. })));
    }

    #[test]
    fn honest_path_examples() {
        let t = diamond();
        let ps = enumerate_paths(&t, 2).unwrap();
        let c = |xs: &[&str]| CorruptionSet::from_names(&t, xs, Controller::Alice).unwrap();
        assert!(exists_honest_path(&t, &ps, &c(&["v2"])));
        assert!(!exists_honest_path(&t, &ps, &c(&["v1", "v2"])));
        let line = Topology::from_names(&["a", "v", "b"], &[("a", "v"), ("v", "b")], "a", "b").unwrap();
        let lp = enumerate_paths(&line, 1).unwrap();
        assert!(exists_honest_path(&line, &lp, &CorruptionSet::honest(&line)));
    }

    #[test]
    fn direct_link_counts_as_honest() {
        let t = Topology::from_names(&["a", "b"], &[("a", "b")], "a", "b").unwrap();
        let ps = enumerate_paths(&t, 1).unwrap();
        assert!(ps.internal(0).is_empty());
        assert!(exists_honest_path(&t, &ps, &CorruptionSet::honest(&t)));
        assert!(!t.separates(&BTreeSet::new()));
    }

    #[test]
    fn corruption_excludes_endpoints() {
        let t = diamond();
        assert!(CorruptionSet::from_names(&t, &["a"], Controller::Alice).is_err());
        assert!(CorruptionSet::from_names(&t, &["zz"], Controller::Alice).is_err());
        let c = CorruptionSet::from_names(&t, &["v1"], Controller::Bob).unwrap();
        let coalition: Vec<_> = c.coalition(&t).into_iter().collect();
        assert_eq!(coalition, vec![NodeId::new("b"), NodeId::new("v1")]);
    }

    #[test]
    fn separation() {
        let t = diamond();
        let set = |xs: &[&str]| xs.iter().map(|&x| NodeId::new(x)).collect::<BTreeSet<_>>();
        assert!(t.separates(&set(&["v1", "v2"])));
        assert!(!t.separates(&set(&["v1"])));
    }

    #[test]
    fn path_validation() {
        let t = diamond();
        assert!(PathSet::from_names(&t, &[&["a", "b"]]).is_err());
        assert!(PathSet::from_names(&t, &[&["a", "v1", "a", "v1", "b"]]).is_err());
        assert!(PathSet::from_names(&t, &[]).is_err());
        assert!(PathSet::from_names(&t, &[&["v1", "b"]]).is_err());
    }
}
