//! Small networks used throughout tests, examples and the acceptance suite.

use crate::error::Result;
use crate::netsim::{PathSet, Topology};

/// `a - v - b`.
pub fn line() -> Result<(Topology, PathSet)> {
    let t = Topology::from_names(&["a", "v", "b"], &[("a", "v"), ("v", "b")], "a", "b")?;
    let p = PathSet::from_names(&t, &[&["a", "v", "b"]])?;
    Ok((t, p))
}

/// `a - v1 - b` and `a - v2 - b`.
pub fn diamond() -> Result<(Topology, PathSet)> {
    let t = Topology::from_names(
        &["a", "v1", "v2", "b"],
        &[("a", "v1"), ("v1", "b"), ("a", "v2"), ("v2", "b")],
        "a",
        "b",
    )?;
    let p = PathSet::from_names(&t, &[&["a", "v1", "b"], &["a", "v2", "b"]])?;
    Ok((t, p))
}

/// Three disjoint paths, two of them with two intermediaries:
/// `a - v1 - b`, `a - v2 - u2 - b`, `a - v3 - u3 - b`.
pub fn three_path() -> Result<(Topology, PathSet)> {
    let t = Topology::from_names(
        &["a", "v1", "v2", "u2", "v3", "u3", "b"],
        &[("a", "v1"), ("v1", "b"), ("a", "v2"), ("v2", "u2"), ("u2", "b"), ("a", "v3"), ("v3", "u3"), ("u3", "b")],
        "a",
        "b",
    )?;
    let p = PathSet::from_names(&t, &[&["a", "v1", "b"], &["a", "v2", "u2", "b"], &["a", "v3", "u3", "b"]])?;
    Ok((t, p))
}

/// The standard network with `n` paths: line, diamond, or three-path.
pub fn with_paths(n: usize) -> Result<(Topology, PathSet)> {
    match n {
        1 => line(),
        2 => diamond(),
        3 => three_path(),
        _ => Err(crate::Error::contract(format!("no standard network with {n} paths"))),
    }
}
