//! The three lattices as oriented trivalent graphs, spin assignments and the
//! zero-field ground-state amplitudes.
//!
//! Every graph is stored as trivalent nodes with their edges in a fixed cyclic
//! order and every edge with a fixed tail and head. Amplitudes and matrix
//! elements depend on this orientation only through signs; the orientations
//! below are the ones under which the closed-form amplitudes
//! (`Pi x 6j` for the tetrahedron, `Pi x` 12j bracket for the cube and torus)
//! coincide with the direct m-sum of the vertex 3j tensors.
//!
//! The torus has four physical 4-valent vertices a, b, c, d. Each is split
//! into two trivalent nodes joined by an internal edge carrying the vertex
//! spin j^v: `(j1^v, j2^v, j^v)` and `(j3^v, j4^v, j^v)`, where the 3 and 4
//! legs are the neighbouring vertices' 1 and 2 legs
//! (j3^a = j1^b, j4^a = j2^d, j3^b = j1^a, j4^b = j2^c,
//!  j3^c = j1^d, j4^c = j2^b, j3^d = j1^c, j4^d = j2^a).

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use surd::{phase_twice, HalfInt, Scalar, SurdTerm};

use crate::error::{Result, SpinError};
use crate::second_kind::{second_kind, SecondKindBracket};
use crate::wigner::{pi_term, triangle, wigner_6j_term};

/// Which of the three lattices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Tetrahedron,
    Cube,
    Torus2,
}

impl LatticeKind {
    pub const ALL: [LatticeKind; 3] = [LatticeKind::Tetrahedron, LatticeKind::Cube, LatticeKind::Torus2];
}

impl fmt::Display for LatticeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LatticeKind::Tetrahedron => "tetra",
            LatticeKind::Cube => "cube",
            LatticeKind::Torus2 => "torus2",
        })
    }
}

impl FromStr for LatticeKind {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tetra" | "tetrahedron" => Ok(LatticeKind::Tetrahedron),
            "cube" => Ok(LatticeKind::Cube),
            "torus2" | "torus" => Ok(LatticeKind::Torus2),
            _ => Err(SpinError::Invalid(format!("unknown lattice `{s}` (tetra, cube, torus2)"))),
        }
    }
}

/// Torus link classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LinkClass {
    /// Links (ad) and (bc); the decorated one of each pair carries eta_p.
    Vertical,
    /// Links (ab) and (dc); the decorated one of each pair carries eta_q.
    Horizontal,
    /// The edge joining the two halves of a split vertex.
    Internal,
}

/// Which Z2 phase an edge carries in a topological sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SectorPhase {
    P,
    Q,
}

/// An oriented edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub label: &'static str,
    /// Node index of the tail.
    pub tail: usize,
    /// Node index of the head.
    pub head: usize,
    /// Physical vertices joined (equal for internal torus edges).
    pub ends: (&'static str, &'static str),
    pub class: Option<LinkClass>,
    pub sector_phase: Option<SectorPhase>,
}

/// A trivalent coupling node with its edges in cyclic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: &'static str,
    /// Physical vertex the node belongs to.
    pub vertex: &'static str,
    pub edges: [usize; 3],
}

/// One of the three lattices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeGraph {
    pub kind: LatticeKind,
    pub vertices: Vec<&'static str>,
    pub nodes: Vec<Node>,
    /// Spin labels in assignment order; on the torus the last four are the vertex spins.
    pub edges: Vec<Edge>,
}

impl LatticeGraph {
    pub fn edge_index(&self, label: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.label == label)
    }

    pub(crate) fn idx(&self, label: &str) -> usize {
        self.edge_index(label).unwrap_or_else(|| panic!("no edge {label} on {}", self.kind))
    }

    pub fn labels(&self) -> Vec<&'static str> {
        self.edges.iter().map(|e| e.label).collect()
    }

    pub fn num_spins(&self) -> usize {
        self.edges.iter().len()
    }

    /// Index of the node shared by two edges, if exactly one.
    pub fn common_node(&self, e1: usize, e2: usize) -> Option<usize> {
        let mut found = self
            .nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.edges.contains(&e1) && n.edges.contains(&e2))
            .map(|(i, _)| i);
        let first = found.next()?;
        if found.next().is_some() {
            None
        } else {
            Some(first)
        }
    }
}

struct Spec {
    kind: LatticeKind,
    vertices: &'static [&'static str],
    /// (name, vertex, cyclic edge labels)
    nodes: &'static [(&'static str, &'static str, [&'static str; 3])],
    /// (label, tail node, head node)
    edges: &'static [(&'static str, &'static str, &'static str)],
}

const TETRA: Spec = Spec {
    kind: LatticeKind::Tetrahedron,
    vertices: &["a", "b", "c", "d"],
    nodes: &[
        ("a", "a", ["j1", "j2", "j3"]),
        ("b", "b", ["j3", "j4", "j5"]),
        ("c", "c", ["j2", "j6", "j4"]),
        ("d", "d", ["j1", "j5", "j6"]),
    ],
    edges: &[
        ("j1", "a", "d"),
        ("j2", "c", "a"),
        ("j3", "a", "b"),
        ("j4", "b", "c"),
        ("j5", "b", "d"),
        ("j6", "c", "d"),
    ],
};

const CUBE: Spec = Spec {
    kind: LatticeKind::Cube,
    vertices: &["a", "b", "c", "d", "e", "f", "g", "h"],
    nodes: &[
        ("a", "a", ["j1", "j5", "j2"]),
        ("b", "b", ["j2", "j6", "j3"]),
        ("c", "c", ["j3", "j7", "j4"]),
        ("d", "d", ["j4", "j8", "j1"]),
        ("e", "e", ["j5", "j10", "j9"]),
        ("f", "f", ["j6", "j11", "j10"]),
        ("g", "g", ["j7", "j12", "j11"]),
        ("h", "h", ["j8", "j9", "j12"]),
    ],
    edges: &[
        ("j1", "d", "a"),
        ("j2", "a", "b"),
        ("j3", "b", "c"),
        ("j4", "c", "d"),
        ("j5", "a", "e"),
        ("j6", "b", "f"),
        ("j7", "c", "g"),
        ("j8", "d", "h"),
        ("j9", "h", "e"),
        ("j10", "e", "f"),
        ("j11", "f", "g"),
        ("j12", "g", "h"),
    ],
};

const TORUS: Spec = Spec {
    kind: LatticeKind::Torus2,
    vertices: &["a", "b", "c", "d"],
    nodes: &[
        ("a1", "a", ["j1a", "ja", "j2a"]),
        ("a2", "a", ["j1b", "ja", "j2d"]),
        ("b1", "b", ["j1b", "j2b", "jb"]),
        ("b2", "b", ["j1a", "j2c", "jb"]),
        ("c1", "c", ["j1c", "jc", "j2c"]),
        ("c2", "c", ["j1d", "jc", "j2b"]),
        ("d1", "d", ["j1d", "j2d", "jd"]),
        ("d2", "d", ["j1c", "j2a", "jd"]),
    ],
    edges: &[
        ("j1a", "b2", "a1"),
        ("j2a", "d2", "a1"),
        ("j1b", "a2", "b1"),
        ("j2b", "c2", "b1"),
        ("j1c", "d2", "c1"),
        ("j2c", "b2", "c1"),
        ("j1d", "c2", "d1"),
        ("j2d", "a2", "d1"),
        ("ja", "a1", "a2"),
        ("jb", "b1", "b2"),
        ("jc", "c1", "c2"),
        ("jd", "d1", "d2"),
    ],
};

fn build(spec: &Spec) -> LatticeGraph {
    let node_idx = |name: &str| spec.nodes.iter().position(|n| n.0 == name).expect("node");
    let edge_idx = |label: &str| spec.edges.iter().position(|e| e.0 == label).expect("edge");
    let nodes: Vec<Node> = spec
        .nodes
        .iter()
        .map(|(name, vertex, es)| Node { name, vertex, edges: es.map(edge_idx) })
        .collect();
    let edges = spec
        .edges
        .iter()
        .map(|&(label, tail, head)| {
            let (t, h) = (node_idx(tail), node_idx(head));
            let ends = (nodes[t].vertex, nodes[h].vertex);
            let (class, sector_phase) = if spec.kind == LatticeKind::Torus2 {
                torus_link_class(label)
            } else {
                (None, None)
            };
            Edge { label, tail: t, head: h, ends, class, sector_phase }
        })
        .collect();
    LatticeGraph { kind: spec.kind, vertices: spec.vertices.to_vec(), nodes, edges }
}

fn torus_link_class(label: &str) -> (Option<LinkClass>, Option<SectorPhase>) {
    match label {
        "j2a" | "j2b" => (Some(LinkClass::Vertical), Some(SectorPhase::P)),
        "j2c" | "j2d" => (Some(LinkClass::Vertical), None),
        "j1a" | "j1d" => (Some(LinkClass::Horizontal), Some(SectorPhase::Q)),
        "j1b" | "j1c" => (Some(LinkClass::Horizontal), None),
        _ => (Some(LinkClass::Internal), None),
    }
}

static GRAPHS: LazyLock<[LatticeGraph; 3]> = LazyLock::new(|| [build(&TETRA), build(&CUBE), build(&TORUS)]);

/// The lattice graph of the given kind (built once, shared).
pub fn build_lattice(kind: LatticeKind) -> &'static LatticeGraph {
    &GRAPHS[match kind {
        LatticeKind::Tetrahedron => 0,
        LatticeKind::Cube => 1,
        LatticeKind::Torus2 => 2,
    }]
}

/// Spins on every edge (and, on the torus, every vertex), in the graph's label order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinAssignment {
    kind: LatticeKind,
    spins: Vec<HalfInt>,
}

impl SpinAssignment {
    pub fn new(kind: LatticeKind, spins: Vec<HalfInt>) -> Result<Self> {
        let g = build_lattice(kind);
        if spins.len() != g.num_spins() {
            let missing = g.edges.get(spins.len()).map(|e| e.label).unwrap_or("?");
            return Err(if spins.len() < g.num_spins() {
                SpinError::MissingEdge(missing.to_string())
            } else {
                SpinError::Invalid(format!("{} spins given, {} has {}", spins.len(), kind, g.num_spins()))
            });
        }
        if let Some(&j) = spins.iter().find(|j| j.is_negative()) {
            return Err(SpinError::NegativeSpin(j));
        }
        Ok(SpinAssignment { kind, spins })
    }

    /// Build from twice-j integers in label order.
    pub fn from_twice(kind: LatticeKind, twice: &[i32]) -> Result<Self> {
        Self::new(kind, twice.iter().map(|&t| HalfInt::from_twice(t)).collect())
    }

    /// Every spin equal to zero.
    pub fn zero(kind: LatticeKind) -> Self {
        SpinAssignment { kind, spins: vec![HalfInt::ZERO; build_lattice(kind).num_spins()] }
    }

    /// Parse `label=twice_j` pairs separated by commas, e.g. `j1=1,j2=1,j3=2,...`.
    pub fn parse(kind: LatticeKind, text: &str) -> Result<Self> {
        let g = build_lattice(kind);
        let mut spins: Vec<Option<HalfInt>> = vec![None; g.num_spins()];
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (label, value) = part
                .split_once('=')
                .ok_or_else(|| SpinError::Invalid(format!("expected label=twice_j, got `{part}`")))?;
            let idx = g.edge_index(label.trim()).ok_or_else(|| SpinError::UnknownEdge(label.trim().to_string()))?;
            let t: i32 = value
                .trim()
                .parse()
                .map_err(|_| SpinError::Invalid(format!("bad twice-j integer in `{part}`")))?;
            if spins[idx].is_some() {
                return Err(SpinError::Invalid(format!("edge `{}` given twice", label.trim())));
            }
            spins[idx] = Some(HalfInt::from_twice(t));
        }
        let mut out = Vec::with_capacity(spins.len());
        for (i, s) in spins.into_iter().enumerate() {
            out.push(s.ok_or_else(|| SpinError::MissingEdge(g.edges[i].label.to_string()))?);
        }
        Self::new(kind, out)
    }

    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn spins(&self) -> &[HalfInt] {
        &self.spins
    }

    pub fn spin(&self, idx: usize) -> HalfInt {
        self.spins[idx]
    }

    pub fn get(&self, label: &str) -> Result<HalfInt> {
        let g = build_lattice(self.kind);
        g.edge_index(label)
            .map(|i| self.spins[i])
            .ok_or_else(|| SpinError::UnknownEdge(label.to_string()))
    }

    pub(crate) fn at(&self, label: &str) -> HalfInt {
        self.spins[build_lattice(self.kind).idx(label)]
    }

    pub fn set(&mut self, idx: usize, j: HalfInt) {
        self.spins[idx] = j;
    }

    /// Twice-j integers in label order.
    pub fn twice(&self) -> Vec<i32> {
        self.spins.iter().map(|j| j.twice()).collect()
    }
}

impl fmt::Display for SpinAssignment {
    /// `label=twice_j` pairs in label order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = build_lattice(self.kind);
        let parts: Vec<String> =
            g.edges.iter().zip(&self.spins).map(|(e, j)| format!("{}={}", e.label, j.twice())).collect();
        f.write_str(&parts.join(","))
    }
}

/// Topological sector (p, q) of the torus ground state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TopologicalSector {
    pub p: u8,
    pub q: u8,
}

impl TopologicalSector {
    pub const TRIVIAL: TopologicalSector = TopologicalSector { p: 0, q: 0 };
    pub const ALL: [TopologicalSector; 4] = [
        TopologicalSector { p: 0, q: 0 },
        TopologicalSector { p: 1, q: 0 },
        TopologicalSector { p: 0, q: 1 },
        TopologicalSector { p: 1, q: 1 },
    ];

    pub fn new(p: u8, q: u8) -> Result<Self> {
        if p > 1 || q > 1 {
            return Err(SpinError::Invalid(format!("sector ({p},{q}) must have p, q in {{0, 1}}")));
        }
        Ok(TopologicalSector { p, q })
    }

    pub fn is_trivial(&self) -> bool {
        self.p == 0 && self.q == 0
    }
}

impl fmt::Display for TopologicalSector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.p, self.q)
    }
}

impl FromStr for TopologicalSector {
    type Err = SpinError;

    /// `p,q`, e.g. `1,0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || SpinError::Invalid(format!("sector must be `p,q` with p, q in {{0, 1}}: `{s}`"));
        let (p, q) = s.split_once(',').ok_or_else(bad)?;
        let p: u8 = p.trim().parse().map_err(|_| bad())?;
        let q: u8 = q.trim().parse().map_err(|_| bad())?;
        TopologicalSector::new(p, q)
    }
}

fn check_kind(g: &LatticeGraph, a: &SpinAssignment) -> Result<()> {
    if a.kind != g.kind {
        return Err(SpinError::Invalid(format!("assignment is for {}, lattice is {}", a.kind, g.kind)));
    }
    Ok(())
}

/// True iff every node triad is a triangle.
pub fn admissible(lattice: &LatticeGraph, assignment: &SpinAssignment) -> Result<bool> {
    check_kind(lattice, assignment)?;
    Ok(is_admissible(lattice, &assignment.spins))
}

pub(crate) fn is_admissible(g: &LatticeGraph, spins: &[HalfInt]) -> bool {
    g.nodes.iter().all(|n| triangle(spins[n.edges[0]], spins[n.edges[1]], spins[n.edges[2]]))
}

/// Sign (-1)^(2p(j2a+j2b)) (-1)^(2q(j1a+j1d)) of a torus sector; 1 elsewhere.
pub fn sector_sign(lattice: &LatticeGraph, assignment: &SpinAssignment, sector: TopologicalSector) -> i32 {
    let mut twice_exp = 0i64;
    for (e, j) in lattice.edges.iter().zip(&assignment.spins) {
        let weight = match e.sector_phase {
            Some(SectorPhase::P) => sector.p as i64,
            Some(SectorPhase::Q) => sector.q as i64,
            None => 0,
        };
        twice_exp += 2 * weight * j.twice() as i64;
    }
    phase_twice(twice_exp)
}

/// The second-kind 12j bracket in the cube or torus amplitude.
pub fn amplitude_bracket(assignment: &SpinAssignment) -> Option<SecondKindBracket> {
    let a = |l: &str| assignment.at(l);
    let rows = match assignment.kind {
        LatticeKind::Tetrahedron => return None,
        LatticeKind::Cube => {
            let s = &assignment.spins;
            (s[0..4].to_vec(), s[4..8].to_vec(), s[8..12].to_vec())
        }
        LatticeKind::Torus2 => (
            vec![a("j2a"), a("j1a"), a("j2c"), a("j1c")],
            vec![a("ja"), a("jb"), a("jc"), a("jd")],
            vec![a("j2d"), a("j1b"), a("j2b"), a("j1d")],
        ),
    };
    Some(SecondKindBracket::new(rows.0, rows.1, rows.2).expect("rows of length 4"))
}

fn validate_sector(lattice: &LatticeGraph, sector: TopologicalSector) -> Result<()> {
    if !sector.is_trivial() && lattice.kind != LatticeKind::Torus2 {
        return Err(SpinError::Invalid(format!("sector {sector} is only meaningful on torus2")));
    }
    Ok(())
}

/// The amplitude divided by Pi(all spins): the 6j symbol or 12j bracket, with
/// the sector sign on the torus. Zero on inadmissible assignments.
pub fn amplitude_symbol<S: Scalar>(
    lattice: &LatticeGraph,
    assignment: &SpinAssignment,
    sector: TopologicalSector,
) -> Result<S> {
    check_kind(lattice, assignment)?;
    validate_sector(lattice, sector)?;
    if !is_admissible(lattice, &assignment.spins) {
        return Ok(S::zero());
    }
    let value = match lattice.kind {
        LatticeKind::Tetrahedron => {
            let s = &assignment.spins;
            S::from_term(&wigner_6j_term([s[0], s[1], s[2], s[3], s[4], s[5]]))
        }
        _ => second_kind(&amplitude_bracket(assignment).expect("cube or torus")),
    };
    Ok(value.signed(sector_sign(lattice, assignment, sector)))
}

/// Ground-state amplitude Phi(J) in the given sector. Zero on inadmissible assignments.
pub fn amplitude<S: Scalar>(
    lattice: &LatticeGraph,
    assignment: &SpinAssignment,
    sector: TopologicalSector,
) -> Result<S> {
    let sym: S = amplitude_symbol(lattice, assignment, sector)?;
    if sym.is_zero() {
        return Ok(sym);
    }
    Ok(S::from_term(&pi_term(&assignment.spins)) * sym)
}

/// Pi over every spin of the assignment.
pub fn pi_all(assignment: &SpinAssignment) -> SurdTerm {
    pi_term(&assignment.spins)
}

/// Order in which edges are fixed during enumeration, with the nodes that
/// become fully assigned after each step.
fn search_plan(g: &LatticeGraph) -> Vec<Vec<usize>> {
    let n = g.num_spins();
    (0..n)
        .map(|pos| {
            g.nodes
                .iter()
                .enumerate()
                .filter(|(_, node)| node.edges.iter().copied().max() == Some(pos))
                .map(|(i, _)| i)
                .collect()
        })
        .collect()
}

/// Iterator over all admissible assignments with every spin <= jmax.
///
/// Order: lexicographic in the twice-j values taken in label order.
pub struct AssignmentIter {
    graph: &'static LatticeGraph,
    plan: Vec<Vec<usize>>,
    top: i32,
    cur: Vec<i32>,
    depth: usize,
    done: bool,
}

impl AssignmentIter {
    fn node_ok(&self, node: usize) -> bool {
        let e = self.graph.nodes[node].edges;
        let h = |i: usize| HalfInt::from_twice(self.cur[i]);
        triangle(h(e[0]), h(e[1]), h(e[2]))
    }

    fn position_ok(&self, pos: usize) -> bool {
        self.plan[pos].iter().all(|&n| self.node_ok(n))
    }
}

impl Iterator for AssignmentIter {
    type Item = SpinAssignment;

    fn next(&mut self) -> Option<SpinAssignment> {
        let n = self.cur.len();
        if self.done || n == 0 {
            return None;
        }
        // Resume: advance from the deepest position (or descend from the root on first call).
        loop {
            if self.depth == n {
                // step back from a yielded leaf
                self.depth -= 1;
                self.cur[self.depth] += 1;
            }
            if self.cur[self.depth] > self.top {
                self.cur[self.depth] = -1;
                if self.depth == 0 {
                    self.done = true;
                    return None;
                }
                self.depth -= 1;
                self.cur[self.depth] += 1;
                continue;
            }
            if self.cur[self.depth] < 0 {
                self.cur[self.depth] = 0;
            }
            if !self.position_ok(self.depth) {
                self.cur[self.depth] += 1;
                continue;
            }
            self.depth += 1;
            if self.depth == n {
                let spins = self.cur.iter().map(|&t| HalfInt::from_twice(t)).collect();
                return Some(SpinAssignment { kind: self.graph.kind, spins });
            }
            self.cur[self.depth] = 0;
        }
    }
}

/// Every admissible assignment with all spins <= jmax, each exactly once.
pub fn enumerate_assignments(lattice: &LatticeGraph, jmax: HalfInt) -> AssignmentIter {
    let graph = build_lattice(lattice.kind);
    let n = graph.num_spins();
    let mut cur = vec![-1; n];
    if n > 0 {
        cur[0] = 0;
    }
    AssignmentIter { graph, plan: search_plan(graph), top: jmax.twice(), cur, depth: 0, done: jmax.is_negative() }
}

/// `n` distinct admissible assignments drawn uniformly (by rejection) from
/// those with every spin <= jmax, reproducible from `seed`, sorted.
///
/// Returns fewer than `n` when the admissible set is smaller or the attempt
/// budget runs out.
pub fn sample_assignments(lattice: &LatticeGraph, jmax: HalfInt, n: usize, seed: u64) -> Vec<SpinAssignment> {
    let graph = build_lattice(lattice.kind);
    let plan = search_plan(graph);
    let top = jmax.twice().max(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let budget: u64 = 200_000_000;
    let mut draws = 0u64;
    let mut spins = vec![HalfInt::ZERO; graph.num_spins()];
    'outer: while out.len() < n && draws < budget {
        draws += 1;
        for pos in 0..spins.len() {
            spins[pos] = HalfInt::from_twice(rng.gen_range(0..=top));
            let ok = plan[pos].iter().all(|&nd| {
                let e = graph.nodes[nd].edges;
                triangle(spins[e[0]], spins[e[1]], spins[e[2]])
            });
            if !ok {
                continue 'outer;
            }
        }
        let a = SpinAssignment { kind: graph.kind, spins: spins.clone() };
        if seen.insert(a.clone()) {
            out.push(a);
        }
    }
    out.sort();
    out
}
