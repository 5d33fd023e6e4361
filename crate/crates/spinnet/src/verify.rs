//! Exact sweeps of the eigenvalue identities over admissible spin tuples.
//!
//! Every loop identity has the shape
//!
//! ```text
//! sum_K Pi^2(k_e) sigma(J,K) [J_e / f / K_e]_(x=s) A(K) = Pi^4(s) A(J)
//! ```
//!
//! where A is the amplitude with its Pi factor removed (a 6j symbol on the
//! tetrahedron, a 12j bracket on the cube and torus, including the sector
//! sign) and the sum runs over K differing from J only on the loop with
//! k_e in |j_e - s| ..= j_e + s. It is the eigen-equation
//! `sum_K M(J,K) Phi(K) = Phi(J)` divided through by Pi(J) / (2s+1)^2.
//! [`Mode::Printed`] drops the orientation sign sigma and, for `CUBE_12_18`,
//! uses Pi(k_e) instead of Pi^2(k_e).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use surd::{phase_twice, HalfInt, Scalar, SurdSum};

use crate::error::{Result, SpinError};
use crate::lattice::{
    amplitude, amplitude_symbol, build_lattice, enumerate_assignments, sample_assignments, sector_sign,
    LatticeKind, SpinAssignment, TopologicalSector,
};
use crate::second_kind::single_x_reduction;
use crate::wigner::{pi_squared, pi_term, triangle, wigner_6j_term};
use crate::wilson::{bracket_form, matrix_element, LoopName, LoopSpec};

/// The identities the verifier knows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdentityId {
    /// Tetrahedron triangle loop at s = 1/2: 9j x 6j = Pi^4(1/2) 6j.
    #[serde(rename = "FI6J")]
    Fi6j,
    /// The same at arbitrary s.
    #[serde(rename = "FI6J_S")]
    Fi6jS,
    /// Tetrahedron two-plaquette loop: 12j x 6j = 6j.
    #[serde(rename = "I6J12J")]
    I6j12j,
    /// Cube face loop: 12j x 12j = 12j.
    #[serde(rename = "CUBE_12_12")]
    Cube1212,
    /// Cube six-link loop: 18j x 12j = 12j.
    #[serde(rename = "CUBE_12_18")]
    Cube1218,
    /// Torus plaquette: 18j x 12j = 12j in every sector.
    #[serde(rename = "TORUS_18_18")]
    Torus1818,
    /// Torus vertical line: 12j x 12j = 12j.
    #[serde(rename = "TORUS_LINE_12_12")]
    TorusLine1212,
    /// Eigen-equation iterated q times through the matrix elements.
    #[serde(rename = "ITERATED")]
    Iterated,
    /// Sum rule for a product of four 6j symbols.
    #[serde(rename = "V2")]
    V2,
    /// sum_K M(J,K) Phi(K) - Phi(J) for any loop.
    #[serde(rename = "MEVE_GENERIC")]
    MeveGeneric,
}

impl IdentityId {
    pub const ALL: [IdentityId; 10] = [
        IdentityId::Fi6j,
        IdentityId::Fi6jS,
        IdentityId::I6j12j,
        IdentityId::Cube1212,
        IdentityId::Cube1218,
        IdentityId::Torus1818,
        IdentityId::TorusLine1212,
        IdentityId::Iterated,
        IdentityId::V2,
        IdentityId::MeveGeneric,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityId::Fi6j => "FI6J",
            IdentityId::Fi6jS => "FI6J_S",
            IdentityId::I6j12j => "I6J12J",
            IdentityId::Cube1212 => "CUBE_12_12",
            IdentityId::Cube1218 => "CUBE_12_18",
            IdentityId::Torus1818 => "TORUS_18_18",
            IdentityId::TorusLine1212 => "TORUS_LINE_12_12",
            IdentityId::Iterated => "ITERATED",
            IdentityId::V2 => "V2",
            IdentityId::MeveGeneric => "MEVE_GENERIC",
        }
    }

    /// The loop a bracket identity is built on.
    pub fn fixed_loop(&self) -> Option<LoopName> {
        Some(match self {
            IdentityId::Fi6j | IdentityId::Fi6jS => LoopName::TetraBcd,
            IdentityId::I6j12j => LoopName::TetraBcda,
            IdentityId::Cube1212 => LoopName::CubeAbcd,
            IdentityId::Cube1218 => LoopName::CubeAbfgcda,
            IdentityId::Torus1818 => LoopName::TorusAbcd,
            IdentityId::TorusLine1212 => LoopName::TorusLineAda,
            _ => return None,
        })
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentityId {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        IdentityId::ALL.into_iter().find(|i| i.as_str().eq_ignore_ascii_case(s)).ok_or_else(|| {
            let names: Vec<_> = IdentityId::ALL.iter().map(|i| i.as_str()).collect();
            SpinError::Invalid(format!("unknown identity `{s}` ({})", names.join(", ")))
        })
    }
}

/// How fixed-side tuples are chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sample {
    /// Every admissible tuple with entries <= jmax.
    Exhaustive,
    /// `n` distinct admissible tuples drawn uniformly with a seeded generator.
    Random { n: usize, seed: u64 },
}

impl fmt::Display for Sample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sample::Exhaustive => f.write_str("exhaustive"),
            Sample::Random { n, seed } => write!(f, "random(n={n}, seed={seed})"),
        }
    }
}

/// Which form of a loop identity to evaluate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Weights taken from the matrix elements, orientation signs included.
    #[default]
    Chain,
    /// The bracket identity with the orientation signs dropped.
    Printed,
}

impl FromStr for Mode {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chain" => Ok(Mode::Chain),
            "printed" => Ok(Mode::Printed),
            _ => Err(SpinError::Invalid(format!("unknown mode `{s}` (chain, printed)"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Chain => "chain",
            Mode::Printed => "printed",
        })
    }
}

/// Everything a sweep needs.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifyParams {
    pub identity: IdentityId,
    pub jmax: HalfInt,
    /// Loop spin; ignored by V2.
    pub s: HalfInt,
    pub sector: TopologicalSector,
    pub sample: Sample,
    pub mode: Mode,
    /// Loop for ITERATED and MEVE_GENERIC (default `tetra_bcd`).
    pub loop_name: Option<LoopName>,
    /// Iterations for ITERATED.
    pub q: u32,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Extra room on each side of every k window (terms there must vanish).
    pub window_pad: u32,
}

impl VerifyParams {
    pub fn new(identity: IdentityId, jmax: HalfInt, s: HalfInt) -> Self {
        VerifyParams {
            identity,
            jmax,
            s,
            sector: TopologicalSector::TRIVIAL,
            sample: Sample::Exhaustive,
            mode: Mode::Chain,
            loop_name: None,
            q: 3,
            threads: None,
            window_pad: 0,
        }
    }

    pub fn sector(mut self, sector: TopologicalSector) -> Self {
        self.sector = sector;
        self
    }

    pub fn sample(mut self, sample: Sample) -> Self {
        self.sample = sample;
        self
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn loop_name(mut self, name: LoopName) -> Self {
        self.loop_name = Some(name);
        self
    }

    pub fn q(mut self, q: u32) -> Self {
        self.q = q;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn window_pad(mut self, pad: u32) -> Self {
        self.window_pad = pad;
        self
    }

    /// The loop the sweep runs on, if any.
    pub fn effective_loop(&self) -> Option<LoopName> {
        match self.identity {
            IdentityId::Iterated | IdentityId::MeveGeneric => Some(self.loop_name.unwrap_or(LoopName::TetraBcd)),
            IdentityId::V2 => None,
            id => id.fixed_loop(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.jmax.is_negative() {
            return Err(SpinError::NegativeSpin(self.jmax));
        }
        let id = self.identity;
        if let (Some(l), Some(fixed)) = (self.loop_name, id.fixed_loop()) {
            if l != fixed {
                return Err(SpinError::Invalid(format!("{id} is defined on {fixed}, not {l}")));
            }
        }
        if id == IdentityId::V2 {
            if !self.sector.is_trivial() {
                return Err(SpinError::Invalid("V2 has no topological sector".into()));
            }
            return Ok(());
        }
        if self.s.twice() < 1 {
            return Err(SpinError::Invalid(format!("loop spin s must be >= 1/2, got {}", self.s)));
        }
        if id == IdentityId::Fi6j && self.s != HalfInt::HALF {
            return Err(SpinError::Invalid("FI6J is the s = 1/2 identity; use FI6J_S for other s".into()));
        }
        let on_torus = self.effective_loop().map(|l| l.lattice()) == Some(LatticeKind::Torus2);
        if !self.sector.is_trivial() && !on_torus {
            return Err(SpinError::Invalid(format!("sector {} is only meaningful for torus identities", self.sector)));
        }
        Ok(())
    }
}

/// Parameters as recorded in a report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportParams {
    pub jmax: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub s: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sector: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub q: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default, rename = "loop")]
    pub loop_name: Option<String>,
    pub mode: String,
    pub sample: String,
    pub window_pad: u32,
}

mod surd_text {
    use serde::{Deserialize, Deserializer, Serializer};
    use surd::SurdSum;

    pub fn serialize<S: Serializer>(v: &SurdSum, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SurdSum, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// One tuple whose residual is not exactly zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub tuple: String,
    #[serde(with = "surd_text")]
    pub lhs: SurdSum,
    #[serde(with = "surd_text")]
    pub rhs: SurdSum,
    #[serde(with = "surd_text")]
    pub residual: SurdSum,
}

/// Outcome of a sweep. `failures` is empty exactly when every residual is zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: ReportParams,
    pub tuples_checked: usize,
    pub failures: Vec<Failure>,
    pub elapsed_ms: u64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// lhs - rhs.
pub fn residual(lhs: &SurdSum, rhs: &SurdSum) -> SurdSum {
    lhs - rhs
}

/// A failure with its tuple sort key.
type KeyedFailure = (Vec<i32>, Failure);

/// A fixed-side tuple: its sort key, display form and payload.
struct Tuple<T> {
    key: Vec<i32>,
    label: String,
    item: T,
}

fn run_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| SpinError::Invalid(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

fn sweep<T: Sync>(
    tuples: Vec<Tuple<T>>,
    threads: Option<usize>,
    check: impl Fn(&T) -> Result<(SurdSum, SurdSum)> + Sync,
) -> Result<(usize, Vec<Failure>)> {
    let results: Vec<Result<Option<KeyedFailure>>> = run_pool(threads, || {
        tuples
            .par_iter()
            .map(|t| {
                let (lhs, rhs) = check(&t.item)?;
                let r = residual(&lhs, &rhs);
                Ok((!r.is_zero()).then(|| (t.key.clone(), Failure { tuple: t.label.clone(), lhs, rhs, residual: r })))
            })
            .collect()
    })?;
    let mut failures = Vec::new();
    for r in results {
        if let Some(f) = r? {
            failures.push(f);
        }
    }
    failures.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((tuples.len(), failures.into_iter().map(|f| f.1).collect()))
}

fn lattice_tuples(kind: LatticeKind, jmax: HalfInt, sample: Sample) -> Vec<Tuple<SpinAssignment>> {
    let g = build_lattice(kind);
    let states: Vec<SpinAssignment> = match sample {
        Sample::Exhaustive => enumerate_assignments(g, jmax).collect(),
        Sample::Random { n, seed } => {
            if kind == LatticeKind::Tetrahedron {
                pick(enumerate_assignments(g, jmax).collect(), n, seed)
            } else {
                sample_assignments(g, jmax, n, seed)
            }
        }
    };
    states.into_iter().map(|a| Tuple { key: a.twice(), label: a.to_string(), item: a }).collect()
}

/// `n` items chosen uniformly without replacement, kept in their original order.
fn pick<T>(all: Vec<T>, n: usize, seed: u64) -> Vec<T> {
    if n >= all.len() {
        return all;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx = sample_indices(&mut rng, all.len(), n).into_vec();
    idx.sort_unstable();
    let mut keep = vec![false; all.len()];
    for i in idx {
        keep[i] = true;
    }
    all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t).collect()
}

/// One side-by-side evaluation of a loop identity at a fixed J.
pub fn bracket_identity_sides(
    lp: &LoopSpec,
    j: &SpinAssignment,
    s: HalfInt,
    sector: TopologicalSector,
    mode: Mode,
    pi_power: u32,
    pad: u32,
) -> Result<(SurdSum, SurdSum)> {
    let g = lp.graph();
    let mut lhs = SurdSum::default();
    for k in lp.neighbours(j, s, pad) {
        let a: SurdSum = amplitude_symbol(g, &k, sector)?;
        if a.is_zero() {
            continue;
        }
        let bf = bracket_form::<SurdSum>(lp, j, &k, s)?;
        let sx: SurdSum = match single_x_reduction(&bf.bracket, s) {
            Ok(v) => v,
            // off-window columns: the x = s term is still well defined and vanishes
            Err(_) => SurdSum::from_term(&bf.bracket.x_term(s)),
        };
        if sx.is_zero() {
            continue;
        }
        let kch: Vec<HalfInt> = lp.changed.iter().map(|&e| k.spin(e)).collect();
        let weight = match pi_power {
            2 => SurdSum::from_integer(pi_squared(&kch)),
            _ => pi_term(&kch).to_surd(),
        };
        let sign = if mode == Mode::Chain { bf.sign } else { 1 };
        lhs += &(&(&weight * &sx) * &a).scale_int(sign as i64);
    }
    let a_j: SurdSum = amplitude_symbol(g, j, sector)?;
    let rhs = a_j.scale_int(s.dim() * s.dim());
    Ok((lhs, rhs))
}

/// sum_K M(J,K) Phi(K) and Phi(J) for one loop.
pub fn eigen_sides(
    lp: &LoopSpec,
    j: &SpinAssignment,
    s: HalfInt,
    sector: TopologicalSector,
    pad: u32,
) -> Result<(SurdSum, SurdSum)> {
    let g = lp.graph();
    let mut lhs = SurdSum::default();
    for k in lp.neighbours(j, s, pad) {
        let m = matrix_element::<SurdSum>(lp, j, &k, s)?.value;
        if m.is_zero() {
            continue;
        }
        let phi: SurdSum = amplitude(g, &k, sector)?;
        lhs += &(&m * &phi);
    }
    Ok((lhs, amplitude(g, j, sector)?))
}

/// sum over q-step paths of the product of matrix elements times Phi at the end, and Phi(J).
pub fn iterated_sides(
    lp: &LoopSpec,
    j: &SpinAssignment,
    s: HalfInt,
    sector: TopologicalSector,
    q: u32,
) -> Result<(SurdSum, SurdSum)> {
    let g = lp.graph();
    let mut dist: HashMap<SpinAssignment, SurdSum> = HashMap::new();
    dist.insert(j.clone(), SurdSum::from_integer(1));
    for _ in 0..q {
        let mut next: HashMap<SpinAssignment, SurdSum> = HashMap::new();
        for (from, w) in &dist {
            for k in lp.neighbours(from, s, 0) {
                let m = matrix_element::<SurdSum>(lp, from, &k, s)?.value;
                if m.is_zero() {
                    continue;
                }
                *next.entry(k).or_default() += &(w * &m);
            }
        }
        next.retain(|_, v| !v.is_zero());
        dist = next;
    }
    let mut lhs = SurdSum::default();
    for (k, w) in &dist {
        let phi: SurdSum = amplitude(g, k, sector)?;
        lhs += &(w * &phi);
    }
    Ok((lhs, amplitude(g, j, sector)?))
}

/// V2 tuple (j1, j2, j3, l1, l2, l3, x).
pub type V2Tuple = [HalfInt; 7];

/// Every (j, l, x) with entries <= jmax and {l1 l2 l3; j1 j2 j3} admissible.
pub fn v2_tuples(jmax: HalfInt) -> Vec<V2Tuple> {
    let top = jmax.twice().max(0);
    let h = HalfInt::from_twice;
    let mut out = Vec::new();
    for j1 in 0..=top {
        for j2 in 0..=top {
            for j3 in 0..=top {
                for l1 in 0..=top {
                    for l2 in 0..=top {
                        for l3 in 0..=top {
                            let ok = triangle(h(l1), h(l2), h(l3))
                                && triangle(h(l1), h(j2), h(j3))
                                && triangle(h(j1), h(l2), h(j3))
                                && triangle(h(j1), h(j2), h(l3));
                            if !ok {
                                continue;
                            }
                            for x in 0..=top {
                                out.push([j1, j2, j3, l1, l2, l3, x].map(h));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Both sides of V2:
///
/// ```text
/// sum_k Pi^2(k1,k2,k3) (-1)^(R+x) {j1 k1 x; k2 j2 l3} {j2 k2 x; k3 j3 l1} {j3 k3 x; k1 j1 l2} {l1 l2 l3; k1 k2 k3}
///   = (2x+1) {l1 l2 l3; j1 j2 j3}
/// ```
///
/// with R the sum of all nine j, l, k and k_i over |j_i - x| ..= j_i + x.
pub fn v2_sides(t: &V2Tuple, pad: u32) -> (SurdSum, SurdSum) {
    let [j1, j2, j3, l1, l2, l3, x] = *t;
    let window = |j: HalfInt| {
        let lo = ((j.twice() - x.twice()).abs() - 2 * pad as i32).max(0);
        let lo = if (lo + j.twice() + x.twice()) % 2 != 0 { lo + 1 } else { lo };
        (lo..=j.twice() + x.twice() + 2 * pad as i32).step_by(2).map(HalfInt::from_twice)
    };
    let mut lhs = SurdSum::default();
    for k1 in window(j1) {
        for k2 in window(j2) {
            for k3 in window(j3) {
                let a = wigner_6j_term([j1, k1, x, k2, j2, l3]);
                if a.is_zero() {
                    continue;
                }
                let b = wigner_6j_term([j2, k2, x, k3, j3, l1]);
                if b.is_zero() {
                    continue;
                }
                let c = wigner_6j_term([j3, k3, x, k1, j1, l2]);
                if c.is_zero() {
                    continue;
                }
                let d = wigner_6j_term([l1, l2, l3, k1, k2, k3]);
                if d.is_zero() {
                    continue;
                }
                let twice_r: i64 = [j1, j2, j3, l1, l2, l3, k1, k2, k3, x].iter().map(|v| v.twice() as i64).sum();
                let sign = phase_twice(twice_r);
                let w = pi_squared(&[k1, k2, k3]);
                let term = a.mul(&b).mul(&c).mul(&d).to_surd().scale_int(w * sign as i64);
                lhs += &term;
            }
        }
    }
    let rhs = wigner_6j_term([l1, l2, l3, j1, j2, j3]).to_surd().scale_int(x.dim());
    (lhs, rhs)
}

fn v2_label(t: &V2Tuple) -> String {
    let names = ["j1", "j2", "j3", "l1", "l2", "l3", "x"];
    names.iter().zip(t).map(|(n, v)| format!("{n}={}", v.twice())).collect::<Vec<_>>().join(",")
}

fn report_params(p: &VerifyParams) -> ReportParams {
    let id = p.identity;
    let uses_loop = id != IdentityId::V2;
    ReportParams {
        jmax: p.jmax.to_string(),
        s: uses_loop.then(|| p.s.to_string()),
        sector: p
            .effective_loop()
            .filter(|l| l.lattice() == LatticeKind::Torus2)
            .map(|_| p.sector.to_string()),
        q: (id == IdentityId::Iterated).then_some(p.q),
        loop_name: p.effective_loop().map(|l| l.to_string()),
        mode: p.mode.to_string(),
        sample: p.sample.to_string(),
        window_pad: p.window_pad,
    }
}

/// Run one identity sweep.
pub fn verify_with(p: &VerifyParams) -> Result<IdentityReport> {
    p.validate()?;
    let start = Instant::now();
    let (checked, failures) = match p.identity {
        IdentityId::V2 => {
            let all = v2_tuples(p.jmax);
            let chosen = match p.sample {
                Sample::Exhaustive => all,
                Sample::Random { n, seed } => pick(all, n, seed),
            };
            let tuples = chosen
                .into_iter()
                .map(|t| Tuple { key: t.map(|v| v.twice()).to_vec(), label: v2_label(&t), item: t })
                .collect();
            sweep(tuples, p.threads, |t| Ok(v2_sides(t, p.window_pad)))?
        }
        id => {
            let name = p.effective_loop().expect("loop identities have a loop");
            let lp = LoopSpec::named(name);
            let tuples = lattice_tuples(name.lattice(), p.jmax, p.sample);
            match id {
                IdentityId::MeveGeneric => {
                    sweep(tuples, p.threads, |j| eigen_sides(&lp, j, p.s, p.sector, p.window_pad))?
                }
                IdentityId::Iterated => sweep(tuples, p.threads, |j| iterated_sides(&lp, j, p.s, p.sector, p.q))?,
                _ => {
                    let pi_power = if id == IdentityId::Cube1218 && p.mode == Mode::Printed { 1 } else { 2 };
                    sweep(tuples, p.threads, |j| {
                        bracket_identity_sides(&lp, j, p.s, p.sector, p.mode, pi_power, p.window_pad)
                    })?
                }
            }
        }
    };
    Ok(IdentityReport {
        identity: p.identity.to_string(),
        params: report_params(p),
        tuples_checked: checked,
        failures,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

/// Run one identity sweep with default mode, loop and iteration count.
pub fn verify(
    id: IdentityId,
    jmax: HalfInt,
    s: HalfInt,
    sector: TopologicalSector,
    sample: Sample,
) -> Result<IdentityReport> {
    verify_with(&VerifyParams::new(id, jmax, s).sector(sector).sample(sample))
}

/// For the torus plaquette, check term by term that every nonzero matrix
/// element joins states with equal sector signs in all four sectors.
///
/// A failure records `J -> K (p,q)` with the two signs as lhs (K) and rhs (J).
pub fn phase_cancellation_check(
    jmax: HalfInt,
    s: HalfInt,
    sample: Sample,
    threads: Option<usize>,
) -> Result<IdentityReport> {
    if s.twice() < 1 {
        return Err(SpinError::Invalid(format!("loop spin s must be >= 1/2, got {s}")));
    }
    let start = Instant::now();
    let lp = LoopSpec::named(LoopName::TorusAbcd);
    let g = lp.graph();
    let tuples = lattice_tuples(LatticeKind::Torus2, jmax, sample);
    let checked = tuples.len();
    let per_j: Vec<Result<Vec<KeyedFailure>>> = run_pool(threads, || {
        tuples
            .par_iter()
            .map(|t| {
                let j = &t.item;
                let mut out = Vec::new();
                for k in lp.neighbours(j, s, 0) {
                    if matrix_element::<SurdSum>(&lp, j, &k, s)?.value.is_zero() {
                        continue;
                    }
                    for sector in TopologicalSector::ALL {
                        let (sk, sj) = (sector_sign(g, &k, sector), sector_sign(g, j, sector));
                        if sk != sj {
                            let (lhs, rhs) = (SurdSum::from_i64(sk as i64), SurdSum::from_i64(sj as i64));
                            let mut key = t.key.clone();
                            key.extend(k.twice());
                            out.push((
                                key,
                                Failure {
                                    tuple: format!("{j} -> {k} ({sector})"),
                                    residual: residual(&lhs, &rhs),
                                    lhs,
                                    rhs,
                                },
                            ));
                        }
                    }
                }
                Ok(out)
            })
            .collect()
    })?;
    let mut failures = Vec::new();
    for r in per_j {
        failures.extend(r?);
    }
    failures.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(IdentityReport {
        identity: "PHASE_CANCELLATION".into(),
        params: ReportParams {
            jmax: jmax.to_string(),
            s: Some(s.to_string()),
            sector: Some("all".into()),
            q: None,
            loop_name: Some(LoopName::TorusAbcd.to_string()),
            mode: Mode::Chain.to_string(),
            sample: sample.to_string(),
            window_pad: 0,
        },
        tuples_checked: checked,
        failures: failures.into_iter().map(|f| f.1).collect(),
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_examples() {
        let a: SurdSum = "1/2+1*sqrt(3)".parse().unwrap();
        assert!(residual(&a, &a).is_zero());
        assert_eq!(residual(&SurdSum::sqrt_of(2), &SurdSum::default()), SurdSum::sqrt_of(2));
        assert_eq!(residual(&a, &SurdSum::sqrt_of(3)), SurdSum::from_ratio(1, 2));
    }

    #[test]
    fn identity_names_round_trip() {
        for id in IdentityId::ALL {
            assert_eq!(id.as_str().parse::<IdentityId>().unwrap(), id);
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.as_str()));
        }
    }

    #[test]
    fn fi6j_smallest_sweep() {
        let r = verify(IdentityId::Fi6j, HalfInt::HALF, HalfInt::HALF, TopologicalSector::TRIVIAL, Sample::Exhaustive)
            .unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.tuples_checked > 0);
    }

    #[test]
    fn invalid_combinations() {
        let h = HalfInt::HALF;
        let one = HalfInt::ONE;
        assert!(verify(IdentityId::Fi6j, h, one, TopologicalSector::TRIVIAL, Sample::Exhaustive).is_err());
        let sector = TopologicalSector { p: 1, q: 0 };
        assert!(verify(IdentityId::Cube1212, h, h, sector, Sample::Exhaustive).is_err());
        assert!(verify(IdentityId::Fi6jS, h, HalfInt::ZERO, TopologicalSector::TRIVIAL, Sample::Exhaustive).is_err());
        let p = VerifyParams::new(IdentityId::Cube1212, h, h).loop_name(LoopName::TetraBcd);
        assert!(verify_with(&p).is_err());
    }

    #[test]
    fn pick_is_deterministic_subset() {
        let all: Vec<u32> = (0..100).collect();
        let a = pick(all.clone(), 10, 5);
        assert_eq!(a, pick(all.clone(), 10, 5));
        assert_eq!(a.len(), 10);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pick(all.clone(), 200, 5), all);
    }
}
