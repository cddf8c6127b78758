//! One line per acceptance criterion; exits nonzero if any criterion fails.

mod common;

use common::*;
use proptest::strategy::Strategy;
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use qdouble::algebroid::AlgebroidData;
use qdouble::doubles::equations::{coefficient_chart, match_residuals};
use qdouble::doubles::instances::{
    algebroid_catalog, perturb, random_automorphism, symbolic_even_coeffs, tangent_double, transport_pair,
};
use qdouble::doubles::neighbors::enumerate_neighbors;
use qdouble::doubles::{
    check_commutativity, check_condition_ii, check_condition_iii, check_conditions, DoubleCharts, DoubleShape,
    FourFields, StructurePair,
};
use qdouble::drinfeld::{build_cotangent_double, schouten_derivation_verdict, BialgebroidInstance};
use qdouble::multifold::{
    check_nfold_antialgebroid, product_structure, reverse_function, MultiStructure, MultiTransition,
};
use qdouble::algebra::Parity;
use qdouble::is_homological;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn law<S: Strategy>(name: &str, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    runner.run(&strategy, test).map_err(|e| format!("{name}: {e}"))
}

fn kernel_soundness() -> Outcome {
    let start = Instant::now();
    law("graded commutativity", (homogeneous(), homogeneous()), |(p, q)| graded_commutativity(p, q))?;
    law("odd squares", poly(), odd_square_vanishes)?;
    law("ring axioms", (poly(), poly(), poly()), |(p, q, r)| ring_axioms(p, q, r))?;
    law("homogeneous components", poly(), components_sum_back)?;
    law("partial Leibniz", (homogeneous(), poly(), 0usize..5), |(p, q, g)| partial_leibniz(p, q, g))?;
    law("partials commute", (poly(), 0usize..5, 0usize..5), |(p, g, h)| partials_supercommute(p, g, h))?;
    law("derivation Leibniz", (derivation(), homogeneous(), poly()), |(x, p, q)| derivation_leibniz(x, p, q))?;
    law("commutator antisymmetry", (derivation(), derivation()), |(x, y)| commutator_antisymmetry(x, y))?;
    law("commutator Jacobi", (derivation(), derivation(), derivation()), |(x, y, z)| commutator_jacobi(x, y, z))?;
    law("commutator action", (derivation(), derivation(), poly()), |(x, y, p)| commutator_action(x, y, p))?;
    law("odd square", (derivation_of(Parity::Odd), poly()), |(x, p)| odd_self_commutator(x, p))?;
    let secs = start.elapsed().as_secs_f64();
    check(secs < 30.0, format!("took {secs:.1} s"))?;
    Ok(format!("11 laws x 1000 cases in {secs:.1} s"))
}

fn derived_brackets() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut pass, mut fail) = (0, 0);
    for case in 0..60 {
        let d = random_data(&mut rng);
        let data = d.algebroid();
        let back = reconstruct(&data, d.base);
        check(back.rho == d.rho && back.c == d.c, format!("case {case}: reconstruction differs"))?;
        let hom = is_homological(&data.to_field().map_err(|e| e.to_string())?);
        let poisson = data.lie_poisson(None).and_then(|t| t.jacobi_verdict()).map_err(|e| e.to_string())?.passed();
        check(hom == back.jacobi() && hom == poisson, format!("case {case}: verdicts disagree"))?;
        if hom {
            pass += 1;
        } else {
            fail += 1;
        }
    }
    check(pass > 0 && fail > 0, "population lacks passing or failing instances")?;
    Ok(format!("60 instances agree ({pass} homological, {fail} not)"))
}

struct Population {
    passing: Vec<StructurePair>,
    perturbed: Vec<StructurePair>,
}

fn small_catalog() -> Vec<(&'static str, AlgebroidData)> {
    let dim = |d: &AlgebroidData| d.rank().max(d.base().len());
    algebroid_catalog().unwrap().into_iter().filter(|(_, d)| dim(d) <= 2).collect()
}

fn aff_cocycles() -> Vec<Consts> {
    let mut out = Vec::new();
    for a in -1..=1 {
        for b in -1..=1 {
            let d = consts(2, &[(0, 1, 0, a), (0, 1, 1, b)]);
            if cocycle_ok(&aff(), &d) {
                out.push(d);
            }
        }
    }
    out
}

fn population() -> &'static Population {
    static P: OnceLock<Population> = OnceLock::new();
    P.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let mut passing = Vec::new();
        for (_, e) in small_catalog() {
            let pair = tangent_double(&e).unwrap();
            for _ in 0..24 {
                let maps = random_automorphism(&pair.charts, &mut rng, 2).unwrap();
                passing.push(transport_pair(&pair, &maps, false).unwrap());
            }
        }
        for d in aff_cocycles() {
            let b = BialgebroidInstance::lie_bialgebra(&aff(), &d).unwrap();
            passing.push(build_cotangent_double(&b).unwrap().0);
        }
        let perturbed = passing.iter().flat_map(|p| [perturb(p, &mut rng).unwrap(), perturb(p, &mut rng).unwrap()]).collect();
        Population { passing, perturbed }
    })
}

fn main_theorem() -> Outcome {
    let pop = population();
    let verdicts = |p: &StructurePair| -> Result<(bool, bool), String> {
        let f = FourFields::from_pair(p).map_err(|e| e.to_string())?;
        let comm = check_commutativity(p).map_err(|e| e.to_string())?.passed();
        let cond = check_conditions(&f).map_err(|e| e.to_string())?.passed();
        Ok((comm, cond))
    };
    for (i, p) in pop.passing.iter().enumerate() {
        check(verdicts(p)? == (true, true), format!("constructed instance {i} does not pass"))?;
    }
    let mut failing = 0;
    for (i, p) in pop.perturbed.iter().enumerate() {
        let (comm, cond) = verdicts(p)?;
        check(comm == cond, format!("perturbed instance {i}: commutativity {comm}, conditions {cond}"))?;
        failing += usize::from(!comm);
    }
    check(pop.passing.len() >= 100 && failing >= 100, format!("{} passing, {failing} failing", pop.passing.len()))?;
    for base in [0, 1] {
        let (charts, c) = symbolic_even_coeffs(base, 1, 1, 1).map_err(|e| e.to_string())?;
        let pair = StructurePair::from_four(&c.to_fields(&charts).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let comm = check_commutativity(&pair).map_err(|e| e.to_string())?;
        let coef = coefficient_chart(&charts).map_err(|e| e.to_string())?;
        let m = match_residuals(&comm, "[Q1,Q2]", &c.bialg_equations(), &coef).map_err(|e| e.to_string())?;
        check(m.is_exact() && !m.matched.is_empty(), format!("symbolic matching over base {base} is not exact"))?;
    }
    Ok(format!(
        "{} passing and {failing} failing of {} perturbed agree; symbolic residuals match the bialgebroid equations exactly",
        pop.passing.len(),
        pop.perturbed.len()
    ))
}

fn iii_contains_ii() -> Outcome {
    let pop = population();
    let mut counter = 0;
    let mut iii_passes = 0;
    for p in pop.passing.iter().chain(&pop.perturbed) {
        let f = FourFields::from_pair(p).map_err(|e| e.to_string())?;
        let iii = check_condition_iii(&f).map_err(|e| e.to_string())?.passed();
        let ii = check_condition_ii(&f).map_err(|e| e.to_string())?.passed();
        iii_passes += usize::from(iii);
        counter += usize::from(iii && !ii);
    }
    check(counter == 0, format!("{counter} counterexamples"))?;
    Ok(format!("0 counterexamples over {} instances ({iii_passes} pass III)", pop.passing.len() + pop.perturbed.len()))
}

fn functor_laws() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let d3 = triple();
    for case in 0..60 {
        let r = 1 + case % 3;
        let p = random_function(&d3, r, &mut rng);
        let (once, m1) = d3.reversed(r).map_err(|e| e.to_string())?;
        let (twice, m2) = once.reversed(r).map_err(|e| e.to_string())?;
        let q = reverse_function(&p, &d3, r, &once, &m1).map_err(|e| e.to_string())?;
        let back = reverse_function(&q, &once, r, &twice, &m2).map_err(|e| e.to_string())?;
        check(twice == d3 && back == p, format!("double reversal {case} is not the identity"))?;
    }
    let d2 = DoubleCharts::from_shape(&DoubleShape {
        base: 1,
        a: vec![Parity::Even, Parity::Odd],
        b: vec![Parity::Even, Parity::Even],
        core: vec![Parity::Odd, Parity::Even],
        params: Vec::new(),
    })
    .map_err(|e| e.to_string())?
    .d;
    for case in 0..30 {
        let phi = MultiTransition::random(&d2, &mut rng, 3).to_substitution().map_err(|e| e.to_string())?;
        check(naturality_holds(&d2, &phi, &[], 1, 2), format!("double naturality {case}"))?;
    }
    for case in 0..30 {
        let phi = MultiTransition::random(&d3, &mut rng, 2).to_substitution().map_err(|e| e.to_string())?;
        let (prefix, r, s) = [(vec![], 1, 3), (vec![2], 1, 3), (vec![1], 3, 2)][case % 3].clone();
        check(naturality_holds(&d3, &phi, &prefix, r, s), format!("triple naturality {case}"))?;
    }
    Ok("60 double reversals are identities; 60 naturality squares commute".into())
}

fn tangent_prolongation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let mut checked = 0;
    while checked < 50 {
        let d = random_data(&mut rng);
        let q = d.algebroid().to_field().map_err(|e| e.to_string())?;
        if is_homological(&q) {
            check_prolongation(&d, &q).map_err(|e| format!("instance {checked}: {e}"))?;
            checked += 1;
        }
    }
    Ok("50 prolongations are homological with the expected frame relations".into())
}

fn bialgebra_verdicts(c: &Consts, d: &Consts) -> Result<[bool; 4], String> {
    let b = BialgebroidInstance::lie_bialgebra(c, d).map_err(|e| e.to_string())?;
    let (pair, v) = build_cotangent_double(&b).map_err(|e| e.to_string())?;
    let f = FourFields::from_pair(&pair).map_err(|e| e.to_string())?;
    Ok([
        v.passed(),
        check_commutativity(&pair).map_err(|e| e.to_string())?.passed(),
        check_condition_iii(&f).map_err(|e| e.to_string())?.passed(),
        schouten_derivation_verdict(&b).map_err(|e| e.to_string())?.passed(),
    ])
}

/// Every single-entry change of the bracket or the cobracket that keeps
/// both Jacobi identities.
fn neighbours(c: &Consts, d: &Consts) -> Vec<(Consts, Consts)> {
    let n = c.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                for s in [-1, 1] {
                    let delta = consts(n, &[(i, j, k, s)]);
                    let add = |x: &Consts| -> Consts {
                        let mut y = x.clone();
                        for a in 0..n {
                            for b in 0..n {
                                y[a][b][k] += delta[a][b][k];
                            }
                        }
                        y
                    };
                    for (c2, d2) in [(add(c), d.clone()), (c.clone(), add(d))] {
                        if jacobi_ok(&c2) && jacobi_ok(&d2) {
                            out.push((c2, d2));
                        }
                    }
                }
            }
        }
    }
    out
}

fn drinfeld_double() -> Outcome {
    let aff_d = aff_cocycles().into_iter().find(|d| d != &zeros(2)).ok_or("no nonzero cocycle on aff")?;
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let heis_d = loop {
        let d = random_cobracket(3, &mut rng);
        if d != zeros(3) && cocycle_ok(&heisenberg(), &d) {
            break d;
        }
    };
    let examples = [("abelian", zeros(2), zeros(2)), ("aff", aff(), aff_d), ("heisenberg", heisenberg(), heis_d)];
    let mut flips = Vec::new();
    for (name, c, d) in &examples {
        check(bialgebra_verdicts(c, d)? == [true; 4], format!("{name} does not pass"))?;
        let mut flipped = 0;
        for (c2, d2) in neighbours(c, d) {
            let expected = cocycle_ok(&c2, &d2);
            let got = bialgebra_verdicts(&c2, &d2)?;
            check(got == [expected; 4], format!("{name}: perturbation gives {got:?}, oracle {expected}"))?;
            flipped += usize::from(!expected);
        }
        // Every pair of brackets in dimension two is a bialgebra, so only the
        // three-dimensional example can flip.
        if c.len() == 3 {
            check(flipped > 0, format!("{name}: no perturbation flips the verdict"))?;
        }
        flips.push(format!("{name} {flipped}"));
    }
    Ok(format!("3 bialgebras pass; perturbations agree with the cocycle oracle, failing: {}", flips.join(", ")))
}

fn nfold() -> Outcome {
    let pop = population();
    for (i, p) in pop.passing.iter().chain(&pop.perturbed).enumerate() {
        let m = MultiStructure::new(&p.charts.pi2, vec![p.q1.clone(), p.q2.clone()]).map_err(|e| e.to_string())?;
        let a = check_nfold_antialgebroid(&m).map_err(|e| e.to_string())?.passed();
        let b = check_commutativity(p).map_err(|e| e.to_string())?.passed();
        check(a == b, format!("instance {i}: n-fold {a}, doubles {b}"))?;
    }
    let cat = algebroid_catalog().map_err(|e| e.to_string())?;
    let get = |n: &str| cat.iter().find(|(k, _)| *k == n).map(|(_, d)| d.clone()).ok_or("missing catalog entry");
    let m = product_structure(&[get("aff")?, get("heisenberg")?, get("aff")?]).map_err(|e| e.to_string())?;
    check(check_nfold_antialgebroid(&m).map_err(|e| e.to_string())?.passed(), "triple product fails")?;
    let g = enumerate_neighbors(2).map_err(|e| e.to_string())?;
    check(g.nodes.len() == 12 && g.nodes.iter().all(|v| g.valence(v.id) == 4), "neighbor graph shape")?;
    Ok(format!(
        "n=2 agrees on {} instances; triple product passes; 12 neighbors of valence 4",
        pop.passing.len() + pop.perturbed.len()
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("kernel soundness", kernel_soundness),
        ("derived-bracket dictionary", derived_brackets),
        ("main theorem", main_theorem),
        ("Condition III contains Condition II", iii_contains_ii),
        ("functor laws", functor_laws),
        ("tangent prolongation", tangent_prolongation),
        ("Drinfeld double", drinfeld_double),
        ("n-fold", nfold),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
