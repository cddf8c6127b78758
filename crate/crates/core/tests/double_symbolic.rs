use qdouble::doubles::equations::{coefficient_chart, match_residuals, ResidualMatching};
use qdouble::doubles::instances::symbolic_even_coeffs;
use qdouble::doubles::{check_commutativity, StructurePair};
use qdouble::Verdict;

fn matching(base: usize, a: usize, b: usize, core: usize) -> ResidualMatching {
    let (charts, c) = symbolic_even_coeffs(base, a, b, core).unwrap();
    let pair = StructurePair::from_four(&c.to_fields(&charts).unwrap()).unwrap();
    let comm = check_commutativity(&pair).unwrap();
    match_residuals(&comm, "[Q1,Q2]", &c.bialg_equations(), &coefficient_chart(&charts).unwrap()).unwrap()
}

#[test]
fn commutator_components_are_the_bialgebroid_equations() {
    for base in [0, 1] {
        let m = matching(base, 1, 1, 1);
        assert!(m.is_exact(), "base {base}: {m:#?}");
        assert!(!m.matched.is_empty());
    }
}

#[test]
fn larger_blocks_reach_every_equation_family() {
    let m = matching(1, 2, 2, 1);
    let families: std::collections::BTreeSet<&str> =
        m.matched.iter().map(|(_, e)| e.split('[').next().unwrap()).collect();
    assert!(m.is_exact(), "{m:#?}");
    assert_eq!(families.len(), 9, "{families:?}");
}

fn families(v: &Verdict) -> std::collections::BTreeMap<String, std::collections::BTreeSet<String>> {
    let mut out: std::collections::BTreeMap<String, std::collections::BTreeSet<String>> = Default::default();
    for r in &v.residuals {
        let fam = r.label.split('[').next().unwrap().to_string();
        out.entry(fam).or_default().insert(r.value.monic().to_string());
    }
    out
}

#[test]
fn exchanging_sides_permutes_the_equations() {
    let (_, c) = symbolic_even_coeffs(1, 2, 2, 1).unwrap();
    let before = families(&c.bialg_equations());
    let after = families(&c.swap_ab().bialg_equations());
    let partner = |f: &str| match f {
        "bialg4" => "bialg6",
        "bialg6" => "bialg4",
        "bialg7" => "bialg9",
        "bialg9" => "bialg7",
        other => other,
    }
    .to_string();
    for (fam, set) in &after {
        assert_eq!(Some(set), before.get(&partner(fam)), "{fam}");
    }
    let anchors = families(&c.anchor_equations());
    let anchors_after = families(&c.swap_ab().anchor_equations());
    let swap = |f: &str| match f {
        "anchor3" => "anchor5",
        "anchor5" => "anchor3",
        "anchor4" => "anchor6",
        "anchor6" => "anchor4",
        other => other,
    }
    .to_string();
    for (fam, set) in &anchors_after {
        assert_eq!(Some(set), anchors.get(&swap(fam)), "{fam}");
    }
}

#[test]
fn anchor_equations_reappear_among_bialg() {
    let (_, c) = symbolic_even_coeffs(1, 2, 2, 1).unwrap();
    let bialg = families(&c.bialg_equations());
    let anchor = families(&c.anchor_equations());
    for (b, a) in [
        ("bialg1", "anchor1"),
        ("bialg3", "anchor2"),
        ("bialg4", "anchor6"),
        ("bialg6", "anchor4"),
        ("bialg7", "anchor5"),
        ("bialg9", "anchor3"),
    ] {
        assert_eq!(bialg.get(b), anchor.get(a), "{b} vs {a}");
    }
}
