//! Generators of double structures: constructive passing families, random
//! symmetries, and controlled ways of breaking them.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{rat, GradedPoly, Monomial, Parity, Role, Substitution};
use crate::algebroid::AlgebroidData;
use crate::error::{Error, Result};
use crate::fields::Derivation;
use crate::multifold::{reverse_substitution, MultiTransition};

use super::equations::{coefficient_chart, DoubleCoeffs};
use super::{DoubleCharts, DoubleShape, StructurePair};

/// Both fields zero.
pub fn zero_pair(charts: &DoubleCharts) -> Result<StructurePair> {
    let c = charts.pi2.chart();
    StructurePair::new(charts, Derivation::zero(c, Parity::Odd), Derivation::zero(c, Parity::Odd))
}

/// `T[1]ΠE` for a Lie algebroid `E`: `Q1 = L_Q` (with `L_Q(dy) = −d(Q(y))`)
/// and `Q2 = d`. The side `A` is `E`, the side `B` is `TM`, the core is `E`.
pub fn tangent_double(e: &AlgebroidData) -> Result<StructurePair> {
    let ec = e.chart();
    let fiber_par: Vec<Parity> = e.fibers().iter().map(|&i| ec.parity(i)).collect();
    let base: Vec<usize> = e.base().iter().copied().filter(|&a| ec.gen(a).role != Role::Param).collect();
    let shape = DoubleShape {
        base: base.len(),
        a: fiber_par.iter().map(|p| p.flip()).collect(),
        b: vec![Parity::Even; base.len()],
        core: fiber_par.iter().map(|p| p.flip()).collect(),
        params: Vec::new(),
    };
    let charts = DoubleCharts::from_shape(&shape)?;
    let pc = charts.pi2.chart();
    let names = shape.base_names();
    let var = |n: String| GradedPoly::var(pc, &n);
    let mut map: Vec<Option<usize>> = vec![None; ec.len()];
    for (k, &a) in base.iter().enumerate() {
        map[a] = Some(pc.index_of(&names[k])?);
    }
    for (k, &i) in e.fibers().iter().enumerate() {
        map[i] = Some(pc.index_of(&format!("xi{}", k + 1))?);
    }
    let q = e.to_field()?;
    let mut d = vec![GradedPoly::zero(pc); pc.len()];
    for (k, n) in names.iter().enumerate() {
        d[pc.index_of(n)?] = var(format!("eta{}", k + 1))?;
    }
    for k in 0..e.fibers().len() {
        d[pc.index_of(&format!("xi{}", k + 1))?] = var(format!("t{}", k + 1))?;
    }
    let d = Derivation::with_parity(pc, d, Parity::Odd)?;
    let mut l = vec![GradedPoly::zero(pc); pc.len()];
    for (k, &a) in base.iter().enumerate() {
        let qa = q.coeff(a).rename(pc, &map)?;
        l[pc.index_of(&format!("eta{}", k + 1))?] = d.apply(&qa)?.neg();
        l[pc.index_of(&names[k])?] = qa;
    }
    for (k, &i) in e.fibers().iter().enumerate() {
        let qi = q.coeff(i).rename(pc, &map)?;
        l[pc.index_of(&format!("t{}", k + 1))?] = d.apply(&qi)?.neg();
        l[pc.index_of(&format!("xi{}", k + 1))?] = qi;
    }
    let l = Derivation::with_parity(pc, l, Parity::Odd)?;
    StructurePair::new(&charts, l, d)
}

/// A small catalogue of Lie algebroids and superalgebroids used to seed
/// passing double structures.
pub fn algebroid_catalog() -> Result<Vec<(&'static str, AlgebroidData)>> {
    use crate::algebra::Chart;
    let mut out = Vec::new();
    let heis = vec![
        vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 0]],
        vec![vec![0, 0, -1], vec![0, 0, 0], vec![0, 0, 0]],
        vec![vec![0, 0, 0], vec![0, 0, 0], vec![0, 0, 0]],
    ];
    out.push(("heisenberg", AlgebroidData::lie_algebra(&["xi1", "xi2", "xi3"], &heis)?));
    let aff = vec![vec![vec![0, 0], vec![0, 1]], vec![vec![0, -1], vec![0, 0]]];
    out.push(("aff", AlgebroidData::lie_algebra(&["xi1", "xi2"], &aff)?));
    // Tangent bundle of the line and the action algebroid of aff on it.
    let c = Chart::builder(1).base("x").fiber("xi1", Parity::Odd, 1).build()?;
    let q = Derivation::from_pairs(&c, &[("x", GradedPoly::var(&c, "xi1")?)])?;
    out.push(("tangent", AlgebroidData::from_odd_chart(&q)?));
    let c = Chart::builder(1)
        .base("x")
        .fiber("xi1", Parity::Odd, 1)
        .fiber("xi2", Parity::Odd, 1)
        .build()?;
    let v = |n: &str| GradedPoly::var(&c, n);
    let q = Derivation::from_pairs(
        &c,
        &[
            ("x", v("xi1")?.mul(&v("x")?)?.neg().add(&v("xi2")?)?),
            ("xi2", v("xi1")?.mul(&v("xi2")?)?.neg()),
        ],
    )?;
    out.push(("action", AlgebroidData::from_odd_chart(&q)?));
    // A (1|1) superalgebra: even h, odd f with [f,f] = h; ΠE has odd ξ^h, even ξ^f.
    let c = Chart::builder(1)
        .fiber("xi1", Parity::Odd, 1)
        .fiber("xi2", Parity::Even, 1)
        .build()?;
    let v = |n: &str| GradedPoly::var(&c, n);
    let q = Derivation::from_pairs(&c, &[("xi1", v("xi2")?.pow(2)?)])?;
    out.push(("super", AlgebroidData::from_odd_chart(&q)?));
    // Over the line with one odd and one even frame element; only the even one anchors.
    let c = Chart::builder(1)
        .base("x")
        .fiber("xi1", Parity::Even, 1)
        .fiber("xi2", Parity::Odd, 1)
        .build()?;
    let q = Derivation::from_pairs(&c, &[("x", GradedPoly::var(&c, "xi2")?)])?;
    out.push(("super-line", AlgebroidData::from_odd_chart(&q)?));
    Ok(out)
}

/// A random constant automorphism of `D` carried to `Π²D`: `(φ*, ψ*)` with `ψ = φ^{-1}`.
pub fn random_automorphism<R: Rng>(
    charts: &DoubleCharts,
    rng: &mut R,
    range: i64,
) -> Result<(Substitution, Substitution)> {
    let t = MultiTransition::random(&charts.d, rng, range);
    let lift = |s: &Substitution| -> Result<Substitution> {
        let (pa, _, s) = reverse_substitution(s, &charts.d, &charts.d, 2)?;
        let (_, _, s) = reverse_substitution(&s, &pa, &pa, 1)?;
        Ok(s)
    };
    Ok((lift(&t.to_substitution()?)?, lift(&t.inverse()?)?))
}

/// Transport both fields (or only `Q2`) along `(φ*, ψ*)`.
pub fn transport_pair(
    pair: &StructurePair,
    maps: &(Substitution, Substitution),
    only_second: bool,
) -> Result<StructurePair> {
    let (phi, psi) = maps;
    let q1 = if only_second { pair.q1.clone() } else { pair.q1.transport(phi, psi)? };
    let q2 = pair.q2.transport(phi, psi)?;
    StructurePair::new(&pair.charts, q1, q2)
}

/// Monomials in the block coordinates with the given weight and parity.
fn monomials_of(chart: &crate::algebra::Chart, weight: &[i32], parity: Parity) -> Vec<Monomial> {
    let blocks: Vec<usize> = chart.indices_where(|g| matches!(g.role, Role::Block(_)));
    let mut out = Vec::new();
    let mut exps = vec![0u16; chart.len()];
    fn go(
        chart: &crate::algebra::Chart,
        blocks: &[usize],
        k: usize,
        exps: &mut Vec<u16>,
        left: Vec<i32>,
        parity: Parity,
        out: &mut Vec<Monomial>,
    ) {
        if left.iter().any(|&w| w < 0) {
            return;
        }
        if k == blocks.len() {
            let m = Monomial::from_exponents(exps.clone());
            if left.iter().all(|&w| w == 0) && m.parity(chart) == parity {
                out.push(m);
            }
            return;
        }
        let g = chart.gen(blocks[k]);
        let max = if g.parity.is_odd() { 1 } else { 2 };
        for e in 0..=max {
            exps[blocks[k]] = e;
            let rest: Vec<i32> = left.iter().zip(&g.weight).map(|(l, w)| l - w * i32::from(e)).collect();
            go(chart, blocks, k + 1, exps, rest, parity, out);
        }
        exps[blocks[k]] = 0;
    }
    go(chart, &blocks, 0, &mut exps, weight.to_vec(), parity, &mut out);
    out
}

/// Add `±1` times a random admissible monomial to one coefficient of `Q1`
/// or `Q2`, keeping weights and parity.
pub fn perturb<R: Rng>(pair: &StructurePair, rng: &mut R) -> Result<StructurePair> {
    let chart = pair.charts.pi2.chart().clone();
    let second = rng.gen_bool(0.5);
    let shift = if second { [0, 1] } else { [1, 0] };
    let mut candidates = Vec::new();
    for (i, g) in chart.gens().iter().enumerate() {
        if g.role == Role::Param {
            continue;
        }
        let w: Vec<i32> = g.weight.iter().zip(shift).map(|(a, b)| a + b).collect();
        for m in monomials_of(&chart, &w, g.parity.flip()) {
            candidates.push((i, m));
        }
    }
    let (i, m) = candidates
        .choose(rng)
        .cloned()
        .ok_or_else(|| Error::Precondition("no admissible monomial to perturb".into()))?;
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    let target = if second { &pair.q2 } else { &pair.q1 };
    let mut coeffs = target.coeffs().to_vec();
    coeffs[i] = coeffs[i].add(&GradedPoly::from_terms(&chart, [(m, rat(sign))]))?;
    let q = Derivation::with_parity(&chart, coeffs, Parity::Odd)?;
    if second {
        StructurePair::new(&pair.charts, pair.q1.clone(), q)
    } else {
        StructurePair::new(&pair.charts, q, pair.q2.clone())
    }
}

/// Random coefficients for a purely even `D`, with the antisymmetries of the
/// quadratic terms imposed. Entries are affine in the base coordinates.
pub fn random_even_coeffs<R: Rng>(charts: &DoubleCharts, rng: &mut R, range: i64, density: f64) -> Result<DoubleCoeffs> {
    let coef = coefficient_chart(charts)?;
    let mut c = empty_coeffs(charts, &coef);
    let base = coef.base_indices();
    fill_even(&mut c, || {
        let mut p = GradedPoly::zero(&coef);
        if rng.gen_bool(density) {
            p = GradedPoly::int(&coef, rng.gen_range(-range..=range));
            for &x in &base {
                if rng.gen_bool(0.5) {
                    let t = GradedPoly::gen(&coef, x).scale_int(rng.gen_range(-range..=range));
                    p = p.add(&t).expect("same chart");
                }
            }
        }
        p
    });
    Ok(c)
}

/// A purely even double with the given block dimensions whose coefficients
/// are independent symbols: each free entry is `p + q·x` over a one-dimensional
/// base (or `p` over a point), with fresh parameters `p`, `q`.
pub fn symbolic_even_coeffs(base: usize, a: usize, b: usize, core: usize) -> Result<(DoubleCharts, DoubleCoeffs)> {
    if base > 1 {
        return Err(Error::Precondition("symbolic instances use a point or a line as base".into()));
    }
    let mut shape = DoubleShape::even(base, a, b, core);
    let probe = DoubleCharts::from_shape(&shape)?;
    let probe_chart = coefficient_chart(&probe)?;
    let mut count = 0;
    fill_even(&mut empty_coeffs(&probe, &probe_chart), || {
        count += 1;
        GradedPoly::zero(&probe_chart)
    });
    let per = 1 + base;
    shape.params = (1..=count * per).map(|k| format!("c{k}")).collect();
    let charts = DoubleCharts::from_shape(&shape)?;
    let coef = coefficient_chart(&charts)?;
    let mut c = empty_coeffs(&charts, &coef);
    let params = coef.indices_where(|g| g.role == Role::Param);
    let xs = coef.base_indices();
    let mut next = params.into_iter();
    fill_even(&mut c, || {
        let mut p = GradedPoly::gen(&coef, next.next().expect("enough parameters"));
        for &x in &xs {
            let q = GradedPoly::gen(&coef, next.next().expect("enough parameters"));
            p = p.add(&q.mul(&GradedPoly::gen(&coef, x)).expect("same chart")).expect("same chart");
        }
        p
    });
    Ok((charts, c))
}

fn empty_coeffs(charts: &DoubleCharts, coef: &crate::algebra::Chart) -> DoubleCoeffs {
    let d = charts.d.chart();
    let nk = d.block_indices(crate::algebra::DirSet::from_dirs(&[1, 2])).len();
    let na = d.block_indices(crate::algebra::DirSet::single(1)).len();
    let nb = d.block_indices(crate::algebra::DirSet::single(2)).len();
    DoubleCoeffs::zeros(coef, na, nb, nk)
}

/// Fill every free coefficient from `entry`, imposing antisymmetry in the
/// paired lower indices.
fn fill_even(c: &mut DoubleCoeffs, mut entry: impl FnMut() -> GradedPoly) {
    for v in [&mut c.qi_a, &mut c.qmu_b, &mut c.qa_a, &mut c.qmu_j] {
        v.iter_mut().flatten().for_each(|p| *p = entry());
    }
    for v in [&mut c.qai_b, &mut c.qmui_l, &mut c.qia_j, &mut c.qmua_l] {
        v.iter_mut().flatten().flatten().for_each(|p| *p = entry());
    }
    let antisym = |v: &mut Vec<Vec<Vec<GradedPoly>>>, entry: &mut dyn FnMut() -> GradedPoly| {
        let n = v.len();
        for j in 0..n {
            for i in 0..j {
                for k in 0..v[j][i].len() {
                    let p = entry();
                    v[i][j][k] = p.neg();
                    v[j][i][k] = p;
                }
            }
        }
    };
    for v in [&mut c.qji_k, &mut c.qba_g] {
        antisym(v, &mut entry);
    }
    for v in [&mut c.qaji_l, &mut c.qiba_l] {
        for outer in v.iter_mut() {
            antisym(outer, &mut entry);
        }
    }
}
