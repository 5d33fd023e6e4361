//! Helpers shared by the integration tests.
#![allow(dead_code)]

use mcontract::OrientedGraph;
use spinnet::{build_lattice, LatticeKind, LoopSpec, SpinAssignment};
use surd::HalfInt;

/// The lattice as the oracle's graph type: same node order, edge order and orientation.
pub fn oriented(kind: LatticeKind) -> OrientedGraph {
    let g = build_lattice(kind);
    OrientedGraph {
        nodes: g.nodes.iter().map(|n| n.edges).collect(),
        edges: g.edges.iter().map(|e| (e.tail, e.head)).collect(),
    }
}

pub fn h(t: i32) -> HalfInt {
    HalfInt::from_twice(t)
}

/// All K reachable from J by the loop: k_e in |j_e - s| ..= j_e + s on changed edges.
pub fn loop_partners(lp: &LoopSpec, j: &SpinAssignment, s: HalfInt) -> Vec<SpinAssignment> {
    lp.neighbours(j, s, 0)
}

/// Twice-j tuple as a compact string for failure messages.
pub fn key(a: &SpinAssignment) -> String {
    a.to_string()
}
