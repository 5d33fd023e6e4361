//! Acceptance suite: one PASS/FAIL line per criterion, exact arithmetic throughout.
//!
//! Tolerance for every comparison is exact equality of surd values.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{h, oriented};
use mcontract::{oracle_3j, oracle_6j, oracle_cg, oracle_loop_matrix_element, oracle_overlap};
use spinnet::lattice::amplitude_symbol;
use spinnet::verify::bracket_identity_sides;
use spinnet::wigner::{admissible_6j, clebsch_gordan_term, wigner_3j_term, wigner_6j_term, SixJKey};
use spinnet::{
    bracket_form, build_lattice, enumerate_assignments, identity_overlap, matrix_element, phase_cancellation_check,
    sample_assignments, second_kind, single_x_reduction, verify_with, IdentityId, IdentityReport, LatticeKind,
    LoopName, LoopSpec, Mode, Sample, SpinAssignment, TopologicalSector, VerifyParams,
};
use surd::{HalfInt, SurdSum};

const HALF: HalfInt = HalfInt::HALF;
const ONE: HalfInt = HalfInt::ONE;
const THREE_HALVES: HalfInt = HalfInt::from_twice(3);
const TWO: HalfInt = HalfInt::from_twice(4);

/// Number, name and check of one criterion.
type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn summary(r: &IdentityReport) -> String {
    let first = r.failures.first().map(|f| format!(", first failure {}", f.tuple)).unwrap_or_default();
    format!("{} tuples, {} failures{first}", r.tuples_checked, r.failures.len())
}

fn run(p: VerifyParams) -> IdentityReport {
    verify_with(&p).expect("valid parameters")
}

fn c1() -> Outcome {
    let r = run(VerifyParams::new(IdentityId::Fi6j, TWO, HALF));
    let secs = r.elapsed_ms as f64 / 1000.0;
    Outcome { pass: r.passed() && secs < 60.0, detail: format!("FI6J jmax=2 s=1/2 exhaustive: {} in {secs:.1}s", summary(&r)) }
}

fn c2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in [HALF, ONE, THREE_HALVES] {
        let r = run(VerifyParams::new(IdentityId::Fi6jS, THREE_HALVES, s));
        pass &= r.passed();
        parts.push(format!("s={s}: {}", summary(&r)));
    }
    Outcome { pass, detail: format!("FI6J_S jmax=3/2 exhaustive; {}", parts.join("; ")) }
}

fn c3() -> Outcome {
    let r = run(VerifyParams::new(IdentityId::I6j12j, THREE_HALVES, HALF));
    Outcome { pass: r.passed(), detail: format!("I6J12J jmax=3/2 s=1/2 exhaustive: {}", summary(&r)) }
}

fn c4() -> Outcome {
    let r = run(VerifyParams::new(IdentityId::Cube1212, THREE_HALVES, HALF).sample(Sample::Random { n: 500, seed: 1 }));
    let secs = r.elapsed_ms as f64 / 1000.0;
    Outcome {
        pass: r.passed() && r.tuples_checked == 500 && secs < 300.0,
        detail: format!("CUBE_12_12 jmax=3/2 s=1/2 500 seeded: {} in {secs:.1}s", summary(&r)),
    }
}

fn c5() -> Outcome {
    let sample = Sample::Random { n: 200, seed: 2 };
    let chain = run(VerifyParams::new(IdentityId::Cube1218, ONE, HALF).sample(sample));
    let printed = run(VerifyParams::new(IdentityId::Cube1218, ONE, HALF).sample(sample).mode(Mode::Printed));
    Outcome {
        pass: chain.passed() && chain.tuples_checked == 200,
        detail: format!(
            "CUBE_12_18 jmax=1 s=1/2 200 seeded: chain form {}; as-printed bracket {} (documented discrepancy)",
            summary(&chain),
            summary(&printed)
        ),
    }
}

fn c6() -> Outcome {
    let sample = Sample::Random { n: 200, seed: 3 };
    let mut pass = true;
    let mut parts = Vec::new();
    for sector in TopologicalSector::ALL {
        let r = run(VerifyParams::new(IdentityId::Torus1818, ONE, HALF).sample(sample).sector(sector));
        pass &= r.passed() && r.tuples_checked == 200;
        parts.push(format!("({sector}): {}", summary(&r)));
    }
    let pc = phase_cancellation_check(ONE, HALF, sample, None).expect("valid");
    pass &= pc.passed();
    Outcome {
        pass,
        detail: format!("TORUS_18_18 jmax=1 s=1/2 200 seeded; {}; phase cancellation: {}", parts.join("; "), summary(&pc)),
    }
}

fn c7() -> Outcome {
    let sample = Sample::Random { n: 200, seed: 4 };
    let lp = LoopSpec::named(LoopName::TorusLineAda);
    let g = build_lattice(LatticeKind::Torus2);
    let mut pass = true;
    let mut parts = Vec::new();
    for p in [0u8, 1] {
        let sector = TopologicalSector { p, q: 0 };
        let r = run(VerifyParams::new(IdentityId::TorusLine1212, THREE_HALVES, HALF).sample(sample).sector(sector));
        pass &= r.passed() && r.tuples_checked == 200;
        parts.push(format!("p={p}: {}", summary(&r)));
    }
    // a tuple with half-odd j2a whose right side flips sign between p=0 and p=1
    let flipped = sample_assignments(g, THREE_HALVES, 200, 4).into_iter().find(|j| {
        let j2a = j.get("j2a").unwrap();
        if !j2a.is_half_odd() {
            return false;
        }
        let a0: SurdSum = amplitude_symbol(g, j, TopologicalSector::TRIVIAL).unwrap();
        let a1: SurdSum = amplitude_symbol(g, j, TopologicalSector { p: 1, q: 0 }).unwrap();
        let (l0, _) =
            bracket_identity_sides(&lp, j, HALF, TopologicalSector::TRIVIAL, Mode::Chain, 2, 0).unwrap();
        let (l1, _) =
            bracket_identity_sides(&lp, j, HALF, TopologicalSector { p: 1, q: 0 }, Mode::Chain, 2, 0).unwrap();
        !a0.is_zero() && a1 == -a0.clone() && !l0.is_zero() && !l1.is_zero()
    });
    pass &= flipped.is_some();
    let witness = flipped.map(|j| j.to_string()).unwrap_or_else(|| "none".into());
    Outcome {
        pass,
        detail: format!(
            "TORUS_LINE_12_12 jmax=3/2 s=1/2 200 seeded; {}; half-odd j2a witness with -1 phase: {witness}",
            parts.join("; ")
        ),
    }
}

fn c8() -> Outcome {
    let r = run(VerifyParams::new(IdentityId::Iterated, ONE, HALF).q(3).loop_name(LoopName::TetraBcd));
    Outcome { pass: r.passed(), detail: format!("ITERATED q=3 on tetra_bcd jmax=1 s=1/2: {}", summary(&r)) }
}

fn oracle_loop_mismatches(name: LoopName, states: &[SpinAssignment]) -> (usize, usize) {
    let lp = LoopSpec::named(name);
    let og = oriented(name.lattice());
    let (mut pairs, mut bad) = (0, 0);
    for j in states {
        for k in lp.neighbours(j, HALF, 0) {
            pairs += 1;
            let m = matrix_element::<SurdSum>(&lp, j, &k, HALF).unwrap().value;
            let o = oracle_loop_matrix_element(&og, &lp.changed, j.spins(), k.spins(), HALF).unwrap();
            bad += usize::from(m != o);
        }
    }
    (pairs, bad)
}

fn c9() -> Outcome {
    let six = admissible_6j(TWO);
    let six_bad = six.iter().filter(|j| oracle_6j(**j) != wigner_6j_term(**j).to_surd()).count();

    let top = THREE_HALVES.twice();
    let (mut cg_count, mut cg_bad) = (0, 0);
    for a in 0..=top {
        for b in 0..=top {
            for c in 0..=top {
                for ma in (-a..=a).step_by(2) {
                    for mb in (-b..=b).step_by(2) {
                        for mc in (-c..=c).step_by(2) {
                            cg_count += 1;
                            let w = wigner_3j_term(h(a), h(b), h(c), h(ma), h(mb), h(mc)).unwrap().to_surd();
                            let g = clebsch_gordan_term(h(a), h(ma), h(b), h(mb), h(c), h(mc)).unwrap().to_surd();
                            let bad3 = w != oracle_3j(h(a), h(b), h(c), h(ma), h(mb), h(mc));
                            let badg = g != oracle_cg(h(a), h(ma), h(b), h(mb), h(c), h(mc));
                            cg_bad += usize::from(bad3 || badg);
                        }
                    }
                }
            }
        }
    }

    let tetra: Vec<_> = enumerate_assignments(build_lattice(LatticeKind::Tetrahedron), ONE).collect();
    let cube = sample_assignments(build_lattice(LatticeKind::Cube), ONE, 200, 9);
    let torus = sample_assignments(build_lattice(LatticeKind::Torus2), ONE, 200, 9);
    let (tp, tb) = oracle_loop_mismatches(LoopName::TetraBcd, &tetra);
    let (cp, cb) = oracle_loop_mismatches(LoopName::CubeAbcd, &cube);
    let (lp, lb) = oracle_loop_mismatches(LoopName::TorusLineAda, &torus);

    Outcome {
        pass: six_bad + cg_bad + tb + cb + lb == 0,
        detail: format!(
            "6j vs four-3j sum: {six_bad}/{} differ; 3j/CG vs construction: {cg_bad}/{cg_count} differ; \
             matrix elements vs contraction (s=1/2, spins<=1): tetra_bcd {tb}/{tp} (exhaustive), \
             cube_abcd {cb}/{cp} (200 seeded J), torus_line_ada {lb}/{lp} (200 seeded J)",
            six.len()
        ),
    }
}

fn states_for(kind: LatticeKind, jmax: HalfInt) -> Vec<SpinAssignment> {
    let g = build_lattice(kind);
    if kind == LatticeKind::Tetrahedron {
        enumerate_assignments(g, jmax).collect()
    } else {
        sample_assignments(g, jmax, 60, 10)
    }
}

fn c10() -> Outcome {
    let (mut pairs, mut full_bad, mut single_bad) = (0usize, 0usize, 0usize);
    let mut first = String::new();
    for name in LoopName::ALL {
        let lp = LoopSpec::named(name);
        for j in states_for(name.lattice(), THREE_HALVES) {
            for s in [HALF, ONE] {
                for k in lp.neighbours(&j, s, 0) {
                    let m = matrix_element::<SurdSum>(&lp, &j, &k, s).unwrap().value;
                    let bf = bracket_form::<SurdSum>(&lp, &j, &k, s).unwrap();
                    pairs += 1;
                    let full = &bf.prefactor * &second_kind::<SurdSum>(&bf.bracket);
                    if full != m {
                        full_bad += 1;
                        if first.is_empty() {
                            first = format!("{name} J={j} K={k} s={s}");
                        }
                    }
                    let single = &bf.prefactor * &single_x_reduction::<SurdSum>(&bf.bracket, s).unwrap();
                    single_bad += usize::from(single != m);
                }
            }
        }
    }
    let v2 = run(VerifyParams::new(IdentityId::V2, THREE_HALVES, HALF));
    Outcome {
        pass: full_bad == 0 && single_bad == 0 && v2.passed(),
        detail: format!(
            "chain == prefactor x full second_kind: {full_bad}/{pairs} differ (first {first}); \
             chain == prefactor x single_x_reduction: {single_bad}/{pairs} differ; V2 entries<=3/2 exhaustive: {}",
            summary(&v2)
        ),
    }
}

fn c11() -> Outcome {
    // 3j orthogonality
    let top = TWO.twice();
    let mut orth_bad = 0;
    let mut orth_count = 0;
    for a in 0..=top {
        for b in 0..=top {
            for c in 0..=top {
                for c2 in 0..=top {
                    for mc in (-c..=c).step_by(2) {
                        for mc2 in (-c2..=c2).step_by(2) {
                            let mut sum = SurdSum::default();
                            for ma in (-a..=a).step_by(2) {
                                for mb in (-b..=b).step_by(2) {
                                    let x = wigner_3j_term(h(a), h(b), h(c), h(ma), h(mb), h(mc)).unwrap();
                                    let y = wigner_3j_term(h(a), h(b), h(c2), h(ma), h(mb), h(mc2)).unwrap();
                                    if !x.is_zero() && !y.is_zero() {
                                        sum += &x.mul(&y).to_surd();
                                    }
                                }
                            }
                            let lhs = sum.scale_int(h(c).dim());
                            let coupled = spinnet::triangle(h(a), h(b), h(c));
                            let want = if coupled && c == c2 && mc == mc2 { 1 } else { 0 };
                            orth_count += 1;
                            orth_bad += usize::from(lhs != SurdSum::from_integer(want));
                        }
                    }
                }
            }
        }
    }
    // 24-fold 6j symmetry
    let mut sym_bad = 0;
    let six = admissible_6j(TWO);
    for j in &six {
        let v = wigner_6j_term(*j);
        let twice = j.map(|x| x.twice());
        for o in SixJKey::orbit(twice) {
            sym_bad += usize::from(spinnet::wigner::racah_6j(o.map(HalfInt::from_twice)).unwrap() != v);
        }
    }
    // identity operator normalization, production and contraction
    let mut id_bad = 0;
    let mut id_count = 0;
    for kind in LatticeKind::ALL {
        let states: Vec<_> = if kind == LatticeKind::Tetrahedron {
            enumerate_assignments(build_lattice(kind), HALF).collect()
        } else {
            sample_assignments(build_lattice(kind), HALF, 12, 5)
        };
        let og = oriented(kind);
        for a in &states {
            for b in &states {
                id_count += 1;
                let want = if a == b { SurdSum::from_integer(1) } else { SurdSum::default() };
                let prod: SurdSum = identity_overlap(a, b).unwrap();
                let orc = oracle_overlap(&og, a.spins(), b.spins()).unwrap();
                id_bad += usize::from(prod != want || orc != want);
            }
        }
    }
    Outcome {
        pass: orth_bad + sym_bad + id_bad == 0,
        detail: format!(
            "3j orthogonality j<=2: {orth_bad}/{orth_count} differ; 6j 24-fold symmetry j<=2: {sym_bad}/{} differ; \
             <J|K> = delta: {id_bad}/{id_count} differ",
            six.len() * 24
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "FI6J", c1),
        (2, "FI6J_S", c2),
        (3, "I6J12J", c3),
        (4, "CUBE_12_12", c4),
        (5, "CUBE_12_18", c5),
        (6, "TORUS_18_18", c6),
        (7, "TORUS_LINE_12_12", c7),
        (8, "ITERATED", c8),
        (9, "oracle equivalences", c9),
        (10, "convention pinning", c10),
        (11, "foundations", c11),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (n, name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == &n.to_string() || name.contains(x.as_str())) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {n:>2} {name}: {} ({:.1}s)", o.detail, t.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
