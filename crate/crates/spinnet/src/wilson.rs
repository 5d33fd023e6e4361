//! Wilson loop and Wilson line matrix elements between spin-network states.
//!
//! A loop of spin s changes the spins on a closed cycle of edges
//! e_0, e_1, ..., e_(n-1) and leaves every other spin alone. Between states J
//! and K its matrix element is the chain
//!
//! ```text
//! M = Pi(j_e, k_e) / (2s+1) * (-1)^(R - n s) * sigma
//!     * prod_i {j_i k_i s; k_(i+1) j_(i+1) f_i}
//! ```
//!
//! where f_i is the unchanged spin at the node joining e_i and e_(i+1),
//! R = sum(j_i + k_i) + sum(f_i), and sigma collects the orientation signs of
//! the pinned lattice graphs: (-1)^(j_i + j_(i+1) + k_i + k_(i+1) + 2 f_i) at
//! every node whose stored cyclic order is (e_i, e_(i+1), f_i), and (-1)^(2s)
//! for every link traversed along its stored direction. Unchanged spins must
//! agree between J and K and every {j_i, k_i, s} must be a triangle.
//!
//! The x = s term of the second-kind bracket `[j_e / f / k_e]` equals
//! `(2s+1)^2 / Pi(j_e, k_e) * M / sigma`, which is how [`bracket_form`]
//! expresses the same number.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use surd::{phase_twice, BigInt, BigRational, HalfInt, Scalar, SurdTerm};

use crate::error::{Result, SpinError};
use crate::lattice::{build_lattice, is_admissible, LatticeGraph, LatticeKind, SpinAssignment};
use crate::second_kind::SecondKindBracket;
use crate::wigner::{pi_term, triangle, wigner_6j_term};

/// The named loops and lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LoopName {
    /// Triangle b-c-d of the tetrahedron.
    TetraBcd,
    /// Two-plaquette loop b-c-d-a of the tetrahedron.
    TetraBcda,
    /// Face a-b-c-d of the cube.
    CubeAbcd,
    /// Six-link loop a-b-f-g-c-d of the cube.
    CubeAbfgcda,
    /// Contractible torus plaquette a-b-c-d.
    TorusAbcd,
    /// Non-contractible vertical line a-d-a.
    TorusLineAda,
    /// Non-contractible horizontal line a-b-a.
    TorusLineAba,
}

impl LoopName {
    pub const ALL: [LoopName; 7] = [
        LoopName::TetraBcd,
        LoopName::TetraBcda,
        LoopName::CubeAbcd,
        LoopName::CubeAbfgcda,
        LoopName::TorusAbcd,
        LoopName::TorusLineAda,
        LoopName::TorusLineAba,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LoopName::TetraBcd => "tetra_bcd",
            LoopName::TetraBcda => "tetra_bcda",
            LoopName::CubeAbcd => "cube_abcd",
            LoopName::CubeAbfgcda => "cube_abfgcda",
            LoopName::TorusAbcd => "torus_abcd",
            LoopName::TorusLineAda => "torus_line_ada",
            LoopName::TorusLineAba => "torus_line_aba",
        }
    }

    pub fn lattice(&self) -> LatticeKind {
        match self {
            LoopName::TetraBcd | LoopName::TetraBcda => LatticeKind::Tetrahedron,
            LoopName::CubeAbcd | LoopName::CubeAbfgcda => LatticeKind::Cube,
            _ => LatticeKind::Torus2,
        }
    }

    /// Changed edges in traversal order.
    pub fn changed_edges(&self) -> &'static [&'static str] {
        match self {
            LoopName::TetraBcd => &["j4", "j5", "j6"],
            LoopName::TetraBcda => &["j1", "j3", "j4", "j6"],
            LoopName::CubeAbcd => &["j1", "j2", "j3", "j4"],
            LoopName::CubeAbfgcda => &["j1", "j2", "j6", "j11", "j7", "j4"],
            LoopName::TorusAbcd => &["j1a", "j2a", "jd", "j1d", "j2b", "jb"],
            LoopName::TorusLineAda => &["ja", "j2a", "jd", "j2d"],
            LoopName::TorusLineAba => &["j1a", "jb", "j1b", "ja"],
        }
    }

    /// True when the bracket is conventionally written with K on the top row.
    fn k_on_top(&self) -> bool {
        matches!(self, LoopName::TetraBcd)
    }
}

impl fmt::Display for LoopName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LoopName {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        LoopName::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = LoopName::ALL.iter().map(|l| l.as_str()).collect();
                SpinError::Invalid(format!("unknown loop `{s}` ({})", names.join(", ")))
            })
    }
}

/// A Wilson loop or line: an ordered cycle of changed edges on one lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpec {
    pub kind: LatticeKind,
    pub name: String,
    /// Edge indices of the changed edges, in traversal order.
    pub changed: Vec<usize>,
    /// `nodes[i]` is the node joining `changed[i-1]` and `changed[i]`.
    pub nodes: Vec<usize>,
    /// `spectators[i]` is the unchanged edge at the node joining `changed[i]` and `changed[i+1]`.
    pub spectators: Vec<usize>,
    /// Every edge not on the loop.
    pub unchanged: Vec<usize>,
    /// Whether `(changed[i], changed[i+1], spectators[i])` is the stored cyclic order of its node.
    cyclic: Vec<bool>,
    /// Whether `changed[i]` is traversed from its tail to its head.
    forward: Vec<bool>,
    k_on_top: bool,
}

impl LoopSpec {
    /// One of the catalogued loops.
    pub fn named(name: LoopName) -> LoopSpec {
        let mut spec = Self::custom(name.lattice(), name.as_str(), name.changed_edges())
            .expect("catalogued loops are closed cycles");
        spec.k_on_top = name.k_on_top();
        spec
    }

    /// A loop given by its changed edges in traversal order.
    ///
    /// Consecutive edges (cyclically) must share exactly one node and the
    /// cycle must have at least three edges.
    pub fn custom(kind: LatticeKind, name: &str, labels: &[&str]) -> Result<LoopSpec> {
        let g = build_lattice(kind);
        let n = labels.len();
        if n < 3 {
            return Err(SpinError::Invalid(format!("loop `{name}` needs at least three edges")));
        }
        let changed: Vec<usize> = labels
            .iter()
            .map(|l| g.edge_index(l).ok_or_else(|| SpinError::UnknownEdge(l.to_string())))
            .collect::<Result<_>>()?;
        let mut uniq = changed.clone();
        uniq.sort_unstable();
        uniq.dedup();
        if uniq.len() != n {
            return Err(SpinError::Invalid(format!("loop `{name}` repeats an edge")));
        }
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let prev = changed[(i + n - 1) % n];
            let node = g.common_node(prev, changed[i]).ok_or_else(|| {
                SpinError::Invalid(format!(
                    "loop `{name}`: edges {} and {} do not meet at one node",
                    g.edges[prev].label, g.edges[changed[i]].label
                ))
            })?;
            nodes.push(node);
        }
        let mut spectators = Vec::with_capacity(n);
        let mut cyclic = Vec::with_capacity(n);
        let mut forward = Vec::with_capacity(n);
        for i in 0..n {
            let (a, b) = (changed[i], changed[(i + 1) % n]);
            let node = &g.nodes[nodes[(i + 1) % n]];
            let f = *node.edges.iter().find(|&&e| e != a && e != b).expect("trivalent node");
            spectators.push(f);
            let pos = node.edges.iter().position(|&e| e == a).expect("edge at node");
            cyclic.push(node.edges[(pos + 1) % 3] == b);
            let e = &g.edges[a];
            let (from, to) = (nodes[i], nodes[(i + 1) % n]);
            if e.tail == from && e.head == to {
                forward.push(true);
            } else if e.head == from && e.tail == to {
                forward.push(false);
            } else {
                return Err(SpinError::Invalid(format!("loop `{name}` is not a closed walk")));
            }
        }
        let unchanged = (0..g.num_spins()).filter(|e| !changed.contains(e)).collect();
        Ok(LoopSpec {
            kind,
            name: name.to_string(),
            changed,
            nodes,
            spectators,
            unchanged,
            cyclic,
            forward,
            k_on_top: false,
        })
    }

    pub fn n(&self) -> usize {
        self.changed.len()
    }

    pub fn graph(&self) -> &'static LatticeGraph {
        build_lattice(self.kind)
    }

    pub fn changed_labels(&self) -> Vec<&'static str> {
        let g = self.graph();
        self.changed.iter().map(|&e| g.edges[e].label).collect()
    }

    pub fn spectator_labels(&self) -> Vec<&'static str> {
        let g = self.graph();
        self.spectators.iter().map(|&e| g.edges[e].label).collect()
    }

    fn check(&self, a: &SpinAssignment) -> Result<()> {
        if a.kind() != self.kind {
            return Err(SpinError::LatticeMismatch {
                loop_name: self.name.clone(),
                expected: self.kind.to_string(),
                got: a.kind().to_string(),
            });
        }
        Ok(())
    }

    /// Orientation sign sigma(J, K) of the pinned graph.
    pub fn orientation_sign(&self, j: &SpinAssignment, k: &SpinAssignment, s: HalfInt) -> i32 {
        let n = self.n();
        let mut twice_exp = 0i64;
        for i in 0..n {
            let (a, b) = (self.changed[i], self.changed[(i + 1) % n]);
            if self.cyclic[i] {
                twice_exp += [j.spin(a), j.spin(b), k.spin(a), k.spin(b)].iter().map(|x| x.twice() as i64).sum::<i64>()
                    + 2 * j.spin(self.spectators[i]).twice() as i64;
            }
            if self.forward[i] {
                twice_exp += 2 * s.twice() as i64;
            }
        }
        phase_twice(twice_exp)
    }

    /// Candidate K states: every combination of k_e in |j_e - s| - pad .. j_e + s + pad
    /// on the changed edges, other spins copied from J. Only admissible states are kept.
    pub fn neighbours(&self, j: &SpinAssignment, s: HalfInt, pad: u32) -> Vec<SpinAssignment> {
        let g = self.graph();
        let windows: Vec<Vec<HalfInt>> = self
            .changed
            .iter()
            .map(|&e| {
                let jt = j.spin(e).twice();
                let lo = ((jt - s.twice()).abs() - 2 * pad as i32).max(0);
                let lo = if (lo - jt - s.twice()) % 2 != 0 { lo + 1 } else { lo };
                let hi = jt + s.twice() + 2 * pad as i32;
                (lo..=hi).step_by(2).map(HalfInt::from_twice).collect()
            })
            .collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; windows.len()];
        if windows.iter().any(|w| w.is_empty()) {
            return out;
        }
        loop {
            let mut k = j.clone();
            for (pos, &e) in self.changed.iter().enumerate() {
                k.set(e, windows[pos][idx[pos]]);
            }
            if is_admissible(g, k.spins()) {
                out.push(k);
            }
            let mut p = windows.len();
            loop {
                if p == 0 {
                    return out;
                }
                p -= 1;
                idx[p] += 1;
                if idx[p] < windows[p].len() {
                    break;
                }
                idx[p] = 0;
            }
        }
    }
}

impl fmt::Display for LoopSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.name, self.changed_labels().join(" "))
    }
}

/// A matrix element with the checks that gate it.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixElementResult<S> {
    pub value: S,
    /// J and K agree on every unchanged edge.
    pub deltas_satisfied: bool,
    /// The {j_e, k_e, s} triads along the loop and whether each holds.
    pub triads: Vec<([HalfInt; 3], bool)>,
}

impl<S> MatrixElementResult<S> {
    pub fn triads_satisfied(&self) -> bool {
        self.triads.iter().all(|t| t.1)
    }
}

pub type MatrixElementExact = MatrixElementResult<surd::SurdSum>;
pub type MatrixElementF64 = MatrixElementResult<f64>;

fn check_s(s: HalfInt) -> Result<()> {
    if s.is_negative() {
        return Err(SpinError::NegativeSpin(s));
    }
    Ok(())
}

/// Each {j_e, k_e, s} triad on the loop with whether it closes.
type Triads = Vec<([HalfInt; 3], bool)>;

fn gate(lp: &LoopSpec, j: &SpinAssignment, k: &SpinAssignment, s: HalfInt) -> Result<(bool, Triads, bool)> {
    lp.check(j)?;
    lp.check(k)?;
    check_s(s)?;
    let deltas = lp.unchanged.iter().all(|&e| j.spin(e) == k.spin(e));
    let triads: Vec<_> = lp
        .changed
        .iter()
        .map(|&e| {
            let t = [j.spin(e), k.spin(e), s];
            (t, triangle(t[0], t[1], t[2]))
        })
        .collect();
    let g = lp.graph();
    let live = deltas && triads.iter().all(|t| t.1) && is_admissible(g, j.spins()) && is_admissible(g, k.spins());
    Ok((deltas, triads, live))
}

fn over_dim(t: SurdTerm, x: HalfInt) -> SurdTerm {
    t.scale(&BigRational::new(BigInt::from(1), BigInt::from(x.dim())))
}

/// Exact chain value of the matrix element (zero when gated off).
pub fn matrix_element_term(lp: &LoopSpec, j: &SpinAssignment, k: &SpinAssignment, s: HalfInt) -> Result<SurdTerm> {
    let (_, _, live) = gate(lp, j, k, s)?;
    if !live {
        return Ok(SurdTerm::zero());
    }
    Ok(chain_term(lp, j, k, s))
}

fn chain_term(lp: &LoopSpec, j: &SpinAssignment, k: &SpinAssignment, s: HalfInt) -> SurdTerm {
    let n = lp.n();
    let mut prod = SurdTerm::one();
    for i in 0..n {
        let (a, b, f) = (lp.changed[i], lp.changed[(i + 1) % n], lp.spectators[i]);
        let six = wigner_6j_term([j.spin(a), k.spin(a), s, k.spin(b), j.spin(b), j.spin(f)]);
        if six.is_zero() {
            return SurdTerm::zero();
        }
        prod = prod.mul(&six);
    }
    let spins: Vec<HalfInt> = lp.changed.iter().flat_map(|&e| [j.spin(e), k.spin(e)]).collect();
    let twice_r: i64 = spins.iter().map(|x| x.twice() as i64).sum::<i64>()
        + lp.spectators.iter().map(|&f| j.spin(f).twice() as i64).sum::<i64>();
    let sign = phase_twice(twice_r - n as i64 * s.twice() as i64) * lp.orientation_sign(j, k, s);
    over_dim(pi_term(&spins).mul(&prod), s).signed(sign)
}

/// Matrix element of the spin-s loop between J and K.
///
/// With s = 0 the loop is the identity operator and the result is the overlap
/// of two admissible states.
pub fn matrix_element<S: Scalar>(
    lp: &LoopSpec,
    j: &SpinAssignment,
    k: &SpinAssignment,
    s: HalfInt,
) -> Result<MatrixElementResult<S>> {
    let (deltas, triads, live) = gate(lp, j, k, s)?;
    let value = if live { S::from_term(&chain_term(lp, j, k, s)) } else { S::zero() };
    Ok(MatrixElementResult { value, deltas_satisfied: deltas, triads })
}

/// The matrix element written as `prefactor x` the x = s term of a second-kind bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketForm<S> {
    /// Rows `[J changed / spectators / K changed]`, or with K on top for `tetra_bcd`.
    pub bracket: SecondKindBracket,
    /// sigma Pi(j_e, k_e) / (2s+1)^2, zero when the element is gated off.
    pub prefactor: S,
    /// The orientation sign sigma(J, K).
    pub sign: i32,
}

/// Bracket and prefactor with `prefactor * single_x_reduction(bracket, s) == matrix_element`.
pub fn bracket_form<S: Scalar>(
    lp: &LoopSpec,
    j: &SpinAssignment,
    k: &SpinAssignment,
    s: HalfInt,
) -> Result<BracketForm<S>> {
    let (_, _, live) = gate(lp, j, k, s)?;
    let jrow: Vec<HalfInt> = lp.changed.iter().map(|&e| j.spin(e)).collect();
    let krow: Vec<HalfInt> = lp.changed.iter().map(|&e| k.spin(e)).collect();
    let mid: Vec<HalfInt> = lp.spectators.iter().map(|&e| j.spin(e)).collect();
    let bracket = if lp.k_on_top {
        SecondKindBracket::new(krow.clone(), mid, jrow.clone())?
    } else {
        SecondKindBracket::new(jrow.clone(), mid, krow.clone())?
    };
    let sign = lp.orientation_sign(j, k, s);
    let prefactor = if live {
        let spins: Vec<HalfInt> = jrow.into_iter().chain(krow).collect();
        S::from_term(&over_dim(over_dim(pi_term(&spins), s), s).signed(sign))
    } else {
        S::zero()
    };
    Ok(BracketForm { bracket, prefactor, sign })
}

/// <J|K> computed as the s = 0 loop (the identity operator) on the lattice's first loop.
pub fn identity_overlap<S: Scalar>(j: &SpinAssignment, k: &SpinAssignment) -> Result<S> {
    if j.kind() != k.kind() {
        return Err(SpinError::Invalid(format!("states live on {} and {}", j.kind(), k.kind())));
    }
    let name = LoopName::ALL.into_iter().find(|l| l.lattice() == j.kind()).expect("every lattice has a loop");
    Ok(matrix_element(&LoopSpec::named(name), j, k, HalfInt::ZERO)?.value)
}
