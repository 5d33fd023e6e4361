//! Spin-network states as explicit magnetic-index tensors.
//!
//! Every node of an oriented trivalent graph carries the 3j tensor of its
//! three edges in stored cyclic order. An edge leaving the node enters with
//! its projection m; an edge arriving enters with -m and the factor
//! (-1)^(j-m). Each link state |j, m_tail, m_head> has one index per end.
//!
//! A spin-s loop acts on each changed link through the operator block
//!
//! ```text
//! <j m+ m-| U_(alpha beta) |k n+ n-> = sqrt((2k+1)/(2j+1)) <s alpha k n+|j m+> <s beta k n-|j m->
//! ```
//!
//! with alpha attached at the tail and beta at the head. A link traversed
//! against its direction uses (U^dagger)_(x y) = (-1)^(y-x) U_(-y, -x). The
//! loop traces the product of blocks and divides by 2s+1.

use std::collections::{HashMap, HashSet};

use surd::{phase_twice, HalfInt, SurdSum};

use crate::cg::CgContext;
use crate::error::{OracleError, Result};

/// A trivalent graph with oriented edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedGraph {
    /// Edge indices of each node in cyclic order.
    pub nodes: Vec<[usize; 3]>,
    /// (tail node, head node) of each edge.
    pub edges: Vec<(usize, usize)>,
}

/// Bounds that keep a brute-force evaluation from running away.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    /// Largest twice-spin accepted on any edge or for s.
    pub max_twice_spin: i32,
    /// Largest number of nonzero entries in any intermediate tensor.
    pub max_entries: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_twice_spin: 6, max_entries: 4_000_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Var {
    /// Index shared by both ends of an edge (closed network).
    Edge(usize),
    /// End index of a ket or bra link; `tail` selects the end.
    Bra(usize, bool),
    Ket(usize, bool),
    /// Unchanged link, shared by bra and ket.
    Shared(usize, bool),
    /// Fundamental index between consecutive loop blocks.
    Loop(usize),
}

struct Tensor {
    vars: Vec<Var>,
    data: HashMap<Vec<i32>, SurdSum>,
}

fn contract_pair(a: &Tensor, b: &Tensor, keep: &HashSet<Var>) -> Tensor {
    let shared: Vec<Var> = a.vars.iter().copied().filter(|v| b.vars.contains(v)).collect();
    let ia: Vec<usize> = shared.iter().map(|v| a.vars.iter().position(|x| x == v).unwrap()).collect();
    let ib: Vec<usize> = shared.iter().map(|v| b.vars.iter().position(|x| x == v).unwrap()).collect();
    let b_rest: Vec<usize> = (0..b.vars.len()).filter(|i| !ib.contains(i)).collect();
    let mut index: HashMap<Vec<i32>, Vec<(Vec<i32>, &SurdSum)>> = HashMap::new();
    for (k, v) in &b.data {
        let key = ib.iter().map(|&i| k[i]).collect();
        index.entry(key).or_default().push((b_rest.iter().map(|&i| k[i]).collect(), v));
    }
    let all_vars: Vec<Var> = a.vars.iter().copied().chain(b_rest.iter().map(|&i| b.vars[i])).collect();
    let out_pos: Vec<usize> = (0..all_vars.len()).filter(|&i| keep.contains(&all_vars[i])).collect();
    let mut data: HashMap<Vec<i32>, SurdSum> = HashMap::new();
    for (ka, va) in &a.data {
        let key: Vec<i32> = ia.iter().map(|&i| ka[i]).collect();
        if let Some(rows) = index.get(&key) {
            for (rest, vb) in rows {
                let full: Vec<i32> = ka.iter().copied().chain(rest.iter().copied()).collect();
                let out_key = out_pos.iter().map(|&i| full[i]).collect();
                *data.entry(out_key).or_default() += &(va * *vb);
            }
        }
    }
    data.retain(|_, v| !v.is_zero());
    Tensor { vars: out_pos.iter().map(|&i| all_vars[i]).collect(), data }
}

/// Contract a closed network to a scalar, greedily merging the cheapest pair that shares an index.
fn contract_all(mut ts: Vec<Tensor>, limits: &OracleLimits) -> Result<SurdSum> {
    if ts.iter().any(|t| t.data.is_empty()) {
        return Ok(SurdSum::default());
    }
    while ts.len() > 1 {
        let mut best: Option<(usize, usize, usize)> = None;
        for i in 0..ts.len() {
            for j in i + 1..ts.len() {
                if !ts[i].vars.iter().any(|v| ts[j].vars.contains(v)) {
                    continue;
                }
                let cost = ts[i].data.len().saturating_mul(ts[j].data.len());
                if !best.is_some_and(|b| cost >= b.0) {
                    best = Some((cost, i, j));
                }
            }
        }
        let (i, j) = best.map(|b| (b.1, b.2)).unwrap_or((0, 1));
        let b = ts.remove(j);
        let a = ts.remove(i);
        let keep: HashSet<Var> = ts.iter().flat_map(|t| t.vars.iter().copied()).collect();
        let c = contract_pair(&a, &b, &keep);
        if c.data.len() > limits.max_entries {
            return Err(OracleError::Resource(format!("intermediate tensor with {} entries", c.data.len())));
        }
        if c.data.is_empty() {
            return Ok(SurdSum::default());
        }
        ts.push(c);
    }
    Ok(ts.pop().map(|t| t.data.into_values().fold(SurdSum::default(), |acc, v| &acc + &v)).unwrap_or_default())
}

fn projections(j: HalfInt) -> Vec<i32> {
    j.projections().map(|m| m.twice()).collect()
}

fn vertex_tensor(
    ctx: &mut CgContext,
    g: &OrientedGraph,
    node: usize,
    spins: &[HalfInt],
    var: impl Fn(usize, bool) -> Var,
) -> Tensor {
    let es = g.nodes[node];
    let vars = es.iter().map(|&e| var(e, g.edges[e].0 == node)).collect();
    let mut data = HashMap::new();
    let js = es.map(|e| spins[e]);
    for m0 in projections(js[0]) {
        for m1 in projections(js[1]) {
            for m2 in projections(js[2]) {
                let ms = [m0, m1, m2];
                let mut args = [HalfInt::ZERO; 3];
                let mut twice_phase = 0i64;
                for k in 0..3 {
                    let e = es[k];
                    if g.edges[e].0 == node {
                        args[k] = HalfInt::from_twice(ms[k]);
                    } else {
                        args[k] = HalfInt::from_twice(-ms[k]);
                        twice_phase += (js[k].twice() - ms[k]) as i64;
                    }
                }
                if args.iter().map(|a| a.twice()).sum::<i32>() != 0 {
                    continue;
                }
                let v = ctx.three_j(js[0], js[1], js[2], args[0], args[1], args[2]);
                if !v.is_zero() {
                    data.insert(ms.to_vec(), v.scale_int(phase_twice(twice_phase) as i64));
                }
            }
        }
    }
    Tensor { vars, data }
}

fn check_graph(g: &OrientedGraph, spins: &[HalfInt], limits: &OracleLimits) -> Result<()> {
    if spins.len() != g.edges.len() {
        return Err(OracleError::Invalid(format!("{} spins for {} edges", spins.len(), g.edges.len())));
    }
    for (i, node) in g.nodes.iter().enumerate() {
        for &e in node {
            let (t, h) = *g.edges.get(e).ok_or_else(|| OracleError::Invalid(format!("node {i} names edge {e}")))?;
            if t != i && h != i {
                return Err(OracleError::Invalid(format!("edge {e} does not end at node {i}")));
            }
        }
    }
    for &j in spins {
        if j.is_negative() {
            return Err(OracleError::Invalid(format!("negative spin {j}")));
        }
        if j.twice() > limits.max_twice_spin {
            return Err(OracleError::Resource(format!("spin {j} above the oracle bound")));
        }
    }
    Ok(())
}

fn sqrt_dims(spins: &[HalfInt]) -> SurdSum {
    let prod: u64 = spins.iter().map(|j| j.dim() as u64).product();
    SurdSum::sqrt_of(prod)
}

/// Amplitude of the closed network: prod sqrt(2j+1) times the full m-contraction.
pub fn oracle_amplitude(g: &OrientedGraph, spins: &[HalfInt]) -> Result<SurdSum> {
    oracle_amplitude_with(g, spins, &OracleLimits::default())
}

pub fn oracle_amplitude_with(g: &OrientedGraph, spins: &[HalfInt], limits: &OracleLimits) -> Result<SurdSum> {
    check_graph(g, spins, limits)?;
    let mut ctx = CgContext::new();
    let ts = (0..g.nodes.len()).map(|n| vertex_tensor(&mut ctx, g, n, spins, |e, _| Var::Edge(e))).collect();
    Ok(&contract_all(ts, limits)? * &sqrt_dims(spins))
}

/// <J|K> from the explicit link-state tensors (the identity operator).
pub fn oracle_overlap(g: &OrientedGraph, j: &[HalfInt], k: &[HalfInt]) -> Result<SurdSum> {
    let limits = OracleLimits::default();
    check_graph(g, j, &limits)?;
    check_graph(g, k, &limits)?;
    if j != k {
        // distinct link irreps are orthogonal
        return Ok(SurdSum::default());
    }
    let mut ctx = CgContext::new();
    let mut ts = Vec::new();
    for n in 0..g.nodes.len() {
        ts.push(vertex_tensor(&mut ctx, g, n, j, Var::Shared));
        ts.push(vertex_tensor(&mut ctx, g, n, k, Var::Shared));
    }
    contract_all(ts, &limits)
}

/// Node joining `loop_edges[i-1]` and `loop_edges[i]`, for every i.
fn loop_nodes(g: &OrientedGraph, loop_edges: &[usize]) -> Result<Vec<usize>> {
    let n = loop_edges.len();
    (0..n)
        .map(|i| {
            let (a, b) = (loop_edges[(i + n - 1) % n], loop_edges[i]);
            let mut hits = g.nodes.iter().enumerate().filter(|(_, nd)| nd.contains(&a) && nd.contains(&b));
            match (hits.next(), hits.next()) {
                (Some((idx, _)), None) => Ok(idx),
                _ => Err(OracleError::Invalid(format!("loop edges {a} and {b} do not meet at one node"))),
            }
        })
        .collect()
}

/// <J| W^(s) |K> for the loop through `loop_edges` (in traversal order), by full m-contraction.
pub fn oracle_loop_matrix_element(
    g: &OrientedGraph,
    loop_edges: &[usize],
    j: &[HalfInt],
    k: &[HalfInt],
    s: HalfInt,
) -> Result<SurdSum> {
    oracle_loop_matrix_element_with(g, loop_edges, j, k, s, &OracleLimits::default())
}

pub fn oracle_loop_matrix_element_with(
    g: &OrientedGraph,
    loop_edges: &[usize],
    j: &[HalfInt],
    k: &[HalfInt],
    s: HalfInt,
    limits: &OracleLimits,
) -> Result<SurdSum> {
    check_graph(g, j, limits)?;
    check_graph(g, k, limits)?;
    if s.is_negative() || s.twice() > limits.max_twice_spin {
        return Err(OracleError::Resource(format!("loop spin {s} outside the oracle bound")));
    }
    if loop_edges.len() < 2 {
        return Err(OracleError::Invalid("a loop needs at least two edges".into()));
    }
    let nodes = loop_nodes(g, loop_edges)?;
    let changed: HashSet<usize> = loop_edges.iter().copied().collect();
    for e in 0..g.edges.len() {
        if !changed.contains(&e) && j[e] != k[e] {
            return Ok(SurdSum::default());
        }
    }
    let mut ctx = CgContext::new();
    let mut ts = Vec::new();
    for nd in 0..g.nodes.len() {
        let bra = |e: usize, tail: bool| if changed.contains(&e) { Var::Bra(e, tail) } else { Var::Shared(e, tail) };
        let ket = |e: usize, tail: bool| if changed.contains(&e) { Var::Ket(e, tail) } else { Var::Shared(e, tail) };
        ts.push(vertex_tensor(&mut ctx, g, nd, j, bra));
        ts.push(vertex_tensor(&mut ctx, g, nd, k, ket));
    }
    let n = loop_edges.len();
    let st = s.twice();
    for (i, &e) in loop_edges.iter().enumerate() {
        let (tail, head) = g.edges[e];
        let (from, to) = (nodes[i], nodes[(i + 1) % n]);
        let forward = tail == from && head == to;
        if !forward && !(head == from && tail == to) {
            return Err(OracleError::Invalid(format!("loop edge {e} does not join its neighbours")));
        }
        let (jj, kk) = (j[e], k[e]);
        let ratio = surd::surd_from(
            surd::BigRational::from_integer(1.into()),
            surd::BigRational::new(kk.dim().into(), jj.dim().into()),
        )
        .expect("positive ratio");
        let mut data: HashMap<Vec<i32>, SurdSum> = HashMap::new();
        for mp in projections(jj) {
            for mm in projections(jj) {
                for np in projections(kk) {
                    for nm in projections(kk) {
                        let (al, be) = (mp - np, mm - nm);
                        if al.abs() > st || be.abs() > st || (al - st) % 2 != 0 {
                            continue;
                        }
                        let h = HalfInt::from_twice;
                        let c1 = ctx.cg(s, h(al), kk, h(np), jj, h(mp));
                        if c1.is_zero() {
                            continue;
                        }
                        let c2 = ctx.cg(s, h(be), kk, h(nm), jj, h(mm));
                        if c2.is_zero() {
                            continue;
                        }
                        let mut val = &(&c1 * &c2) * &ratio;
                        let (x, y) = if forward {
                            (al, be)
                        } else {
                            let (x, y) = (-be, -al);
                            val = val.scale_int(phase_twice((y - x) as i64) as i64);
                            (x, y)
                        };
                        *data.entry(vec![mp, mm, np, nm, x, y]).or_default() += &val;
                    }
                }
            }
        }
        data.retain(|_, v| !v.is_zero());
        ts.push(Tensor {
            vars: vec![Var::Bra(e, true), Var::Bra(e, false), Var::Ket(e, true), Var::Ket(e, false), Var::Loop(i), Var::Loop((i + 1) % n)],
            data,
        });
    }
    let total = contract_all(ts, limits)?;
    Ok(total.scale(&surd::BigRational::new(1.into(), s.dim().into())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(t: i32) -> HalfInt {
        HalfInt::from_twice(t)
    }

    /// Theta graph: two nodes joined by three edges, all pointing 0 -> 1.
    fn theta() -> OrientedGraph {
        OrientedGraph { nodes: vec![[0, 1, 2], [0, 1, 2]], edges: vec![(0, 1), (0, 1), (0, 1)] }
    }

    #[test]
    fn theta_amplitude_has_unit_magnitude() {
        for t in [[0, 0, 0], [1, 1, 0], [1, 1, 2], [2, 2, 2], [3, 2, 1]] {
            let spins = t.map(h);
            let a = oracle_amplitude(&theta(), &spins).unwrap();
            let sq = &a * &a;
            let norm: i64 = spins.iter().map(|j| j.dim()).product();
            assert_eq!(sq, SurdSum::from_integer(norm), "{t:?}");
        }
        assert!(oracle_amplitude(&theta(), &[h(1), h(1), h(1)]).unwrap().is_zero());
    }

    #[test]
    fn overlap_is_delta() {
        let g = theta();
        let a = [h(2), h(2), h(2)];
        let b = [h(2), h(2), h(0)];
        assert_eq!(oracle_overlap(&g, &a, &a).unwrap(), SurdSum::from_integer(1));
        assert!(oracle_overlap(&g, &a, &b).unwrap().is_zero());
    }

    #[test]
    fn spin_zero_loop_is_identity() {
        let g = OrientedGraph {
            nodes: vec![[0, 1, 2], [2, 3, 4], [1, 5, 3], [0, 4, 5]],
            edges: vec![(0, 3), (2, 0), (0, 1), (1, 2), (1, 3), (2, 3)],
        };
        let a = [2, 2, 2, 2, 2, 2].map(h);
        let m = oracle_loop_matrix_element(&g, &[3, 4, 5], &a, &a, HalfInt::ZERO).unwrap();
        assert_eq!(m, SurdSum::from_integer(1));
        let b = [2, 2, 2, 1, 1, 1].map(h);
        assert!(oracle_loop_matrix_element(&g, &[3, 4, 5], &a, &b, HalfInt::ZERO).unwrap().is_zero());
        assert!(oracle_loop_matrix_element(&g, &[3, 4], &a, &a, HalfInt::HALF).is_err());
    }

    #[test]
    fn bounds_are_enforced() {
        let g = theta();
        let big = [h(20), h(20), h(20)];
        assert!(matches!(oracle_amplitude(&g, &big), Err(OracleError::Resource(_))));
        assert!(matches!(oracle_amplitude(&g, &[h(1)]), Err(OracleError::Invalid(_))));
    }
}
