mod common;

use common::{lift, naturality_holds, random_function, triple};
use qdouble::algebra::{DirSet, GradedPoly, Parity, Substitution};
use qdouble::algebroid::AlgebroidData;
use qdouble::doubles::instances::{algebroid_catalog, perturb, random_even_coeffs, tangent_double};
use qdouble::doubles::{check_commutativity, DoubleCharts, DoubleShape};
use qdouble::multifold::{
    check_nfold_antialgebroid, product_structure, reverse_field, reverse_function,
    MultiStructure, MultiTransition,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn reversing_twice_is_the_identity_on_functions() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d = triple();
    for case in 0..60 {
        let r = 1 + case % 3;
        let p = random_function(&d, r, &mut rng);
        let (once, m1) = d.reversed(r).unwrap();
        let (twice, m2) = once.reversed(r).unwrap();
        assert_eq!(twice, d);
        let q = reverse_function(&p, &d, r, &once, &m1).unwrap();
        assert_eq!(reverse_function(&q, &once, r, &twice, &m2).unwrap(), p);
    }
}

#[test]
fn reversing_twice_is_the_identity_on_fields() {
    let charts = DoubleCharts::from_shape(&DoubleShape::even(1, 2, 1, 2)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let f = random_even_coeffs(&charts, &mut rng, 3, 0.6).unwrap().to_fields(&charts).unwrap();
        let (mc, x) = reverse_field(&f.qdb, &charts.pi_b, 2).unwrap();
        let (back, y) = reverse_field(&x, &mc, 2).unwrap();
        assert_eq!(back, charts.pi_b);
        assert_eq!(y, f.qdb);
    }
}

#[test]
fn swap_isomorphism_is_natural_for_doubles() {
    let d = DoubleCharts::from_shape(&DoubleShape {
        base: 1,
        a: vec![Parity::Even, Parity::Odd],
        b: vec![Parity::Even, Parity::Even],
        core: vec![Parity::Odd, Parity::Even],
        params: Vec::new(),
    })
    .unwrap()
    .d;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..60 {
        let phi = MultiTransition::random(&d, &mut rng, 3).to_substitution().unwrap();
        assert!(naturality_holds(&d, &phi, &[], 1, 2));
    }
}

#[test]
fn swap_isomorphism_is_natural_for_triples() {
    let d = triple();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..30 {
        let phi = MultiTransition::random(&d, &mut rng, 2).to_substitution().unwrap();
        let (prefix, r, s) = [(vec![], 1, 3), (vec![2], 1, 3), (vec![1], 3, 2)][case % 3].clone();
        assert!(naturality_holds(&d, &phi, &prefix, r, s), "case {case}");
    }
}

#[test]
fn swap_without_sign_is_not_natural() {
    let d = triple();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut broken = 0;
    for _ in 0..20 {
        let phi = MultiTransition::random(&d, &mut rng, 2).to_substitution().unwrap();
        let (ma, pa) = lift(&phi, &d, &[1, 2]);
        let (mb, pb) = lift(&phi, &d, &[2, 1]);
        let by_index: Vec<GradedPoly> = (0..ma.chart().len())
            .map(|i| {
                let j = (0..mb.chart().len())
                    .find(|&j| mb.origin(j) == ma.origin(i) && mb.chart().gen(j).role == ma.chart().gen(i).role)
                    .unwrap();
                GradedPoly::gen(mb.chart(), j)
            })
            .collect();
        let naive = Substitution::new(ma.chart(), mb.chart(), by_index).unwrap();
        if naive.then(&pb).unwrap() != pa.then(&naive).unwrap() {
            broken += 1;
        }
    }
    assert!(broken > 0);
}

fn lie(names: &[&str], c: &[Vec<Vec<i64>>]) -> AlgebroidData {
    AlgebroidData::lie_algebra(names, c).unwrap()
}

fn aff() -> AlgebroidData {
    lie(&["xi1", "xi2"], &[vec![vec![0, 0], vec![0, 1]], vec![vec![0, -1], vec![0, 0]]])
}

#[test]
fn product_of_three_algebras_is_a_triple_antialgebroid() {
    let heis = algebroid_catalog().unwrap().into_iter().find(|(n, _)| *n == "heisenberg").unwrap().1;
    let m = product_structure(&[aff(), heis, aff()]).unwrap();
    assert!(check_nfold_antialgebroid(&m).unwrap().passed());
    for dirs in [[1, 2], [1, 3], [2, 3]] {
        let face = m.face(DirSet::from_dirs(&dirs)).unwrap();
        assert!(check_nfold_antialgebroid(&face).unwrap().passed());
    }
}

#[test]
fn n2_specialization_matches_commutativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (name, e) in algebroid_catalog().unwrap() {
        let pair = tangent_double(&e).unwrap();
        for p in [pair.clone(), perturb(&pair, &mut rng).unwrap()] {
            let m = MultiStructure::new(&p.charts.pi2, vec![p.q1.clone(), p.q2.clone()]).unwrap();
            assert_eq!(
                check_nfold_antialgebroid(&m).unwrap().passed(),
                check_commutativity(&p).unwrap().passed(),
                "{name}"
            );
        }
    }
}

#[test]
fn neighbor_graph_of_a_double() {
    use qdouble::doubles::neighbors::enumerate_neighbors;
    let g = enumerate_neighbors(2).unwrap();
    assert_eq!(g.nodes.len(), 12);
    assert!(g.nodes.iter().all(|v| g.valence(v.id) == 4));
    let mut total = g.total_space_nodes();
    total.sort();
    let mut expected = vec!["Π²D", "Π_{K*}D^{*A}", "Π_{K*}D^{*B}", "Π²D^{*A}", "Π²D^{*B}"];
    expected.sort();
    assert_eq!(total, expected);
    for name in ["D", "Π_{A}D", "Π_{B}D", "D^{*A}", "Π_{A}D^{*A}", "D^{*B}", "Π_{B}D^{*B}"] {
        assert!(g.node(name).is_some_and(|v| !v.total_space), "{name}");
    }
}

#[test]
fn neighbor_valence_is_twice_the_dimension() {
    use qdouble::doubles::neighbors::enumerate_neighbors;
    for n in 1..=4 {
        let g = enumerate_neighbors(n).unwrap();
        assert_eq!(g.nodes.len(), (n + 1) << n);
        assert!(g.nodes.iter().all(|v| g.valence(v.id) == 2 * n), "n = {n}");
    }
}
