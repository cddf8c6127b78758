//! Double vector bundles `D` with sides `A` (direction 1), `B` (direction 2)
//! and core `K`, and the two descriptions of a double Lie algebroid:
//! four homological fields on `Π_B D, ΠA, Π_A D, ΠB`, or a commuting pair on `Π²D`.
//!
//! Coordinates on `D` are `x` (base), `u` (side `A`), `w` (side `B`) and `z`
//! (core). Reversing direction 1 gives `ξ, e`; direction 2 gives `η, θ`; both
//! give `t` when direction 2 went first and `s` otherwise, with `s = −t`.

pub mod equations;
pub mod instances;
pub mod neighbors;

use crate::algebra::{DirSet, GradedPoly, Parity, Role, Substitution};
use crate::algebroid::{tangent_chart, tangent_prolongation, AlgebroidData};
use crate::bracket::BracketTable;
use crate::error::{Error, Result};
use crate::fields::{check_weight, homological_verdict, related, Derivation};
use crate::multifold::{
    restrict_field, reverse_field, reverse_function, GenSpec, MultiChart, Naming, Origin,
};
use crate::verdict::Verdict;

/// Block dimensions and parities of a double vector bundle chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleShape {
    pub base: usize,
    pub a: Vec<Parity>,
    pub b: Vec<Parity>,
    pub core: Vec<Parity>,
    pub params: Vec<String>,
}

impl DoubleShape {
    pub fn even(base: usize, a: usize, b: usize, core: usize) -> Self {
        DoubleShape {
            base,
            a: vec![Parity::Even; a],
            b: vec![Parity::Even; b],
            core: vec![Parity::Even; core],
            params: Vec::new(),
        }
    }

    pub fn base_names(&self) -> Vec<String> {
        if self.base == 1 {
            vec!["x".to_string()]
        } else {
            (1..=self.base).map(|a| format!("x{a}")).collect()
        }
    }

    /// The chart of `D` itself.
    pub fn total(&self) -> Result<MultiChart> {
        let base = self.base_names();
        let base: Vec<&str> = base.iter().map(String::as_str).collect();
        let params: Vec<&str> = self.params.iter().map(String::as_str).collect();
        MultiChart::standard(
            2,
            &base,
            &params,
            &[
                (DirSet::single(1), "u", self.a.clone()),
                (DirSet::single(2), "w", self.b.clone()),
                (DirSet::from_dirs(&[1, 2]), "z", self.core.clone()),
            ],
            Naming::Letters,
        )
    }
}

/// All charts attached to a double vector bundle chart `D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCharts {
    pub d: MultiChart,
    /// `Π_B D`: direction 1 reversed.
    pub pi_b: MultiChart,
    /// `Π_A D`: direction 2 reversed.
    pub pi_a: MultiChart,
    /// `Π²D = Π_B Π_A D`.
    pub pi2: MultiChart,
    /// `ΠA` inside `Π_B D`.
    pub side_a: MultiChart,
    /// `ΠB` inside `Π_A D`.
    pub side_b: MultiChart,
    restrict_a: Substitution,
    restrict_b: Substitution,
}

impl DoubleCharts {
    pub fn new(d: &MultiChart) -> Result<Self> {
        if d.directions() != 2 || !d.reversals().is_empty() {
            return Err(Error::InvalidChart("expected an unreversed double vector bundle chart".into()));
        }
        let pi_b = d.reversed(1)?.0;
        let pi_a = d.reversed(2)?.0;
        let pi2 = pi_a.reversed(1)?.0;
        let (side_a, restrict_a) = pi_b.face(DirSet::single(1))?;
        let (side_b, restrict_b) = pi_a.face(DirSet::single(2))?;
        Ok(DoubleCharts { d: d.clone(), pi_b, pi_a, pi2, side_a, side_b, restrict_a, restrict_b })
    }

    pub fn from_shape(shape: &DoubleShape) -> Result<Self> {
        DoubleCharts::new(&shape.total()?)
    }

    /// Projection `Π_B D → ΠA` as a pullback.
    pub fn projection_a(&self) -> Result<Substitution> {
        Substitution::from_pairs(self.side_a.chart(), self.pi_b.chart(), &[])
    }

    /// Projection `Π_A D → ΠB` as a pullback.
    pub fn projection_b(&self) -> Result<Substitution> {
        Substitution::from_pairs(self.side_b.chart(), self.pi_a.chart(), &[])
    }
}

/// The four fields `Q_DB` (on `Π_B D`), `Q_AM` (on `ΠA`), `Q_DA` (on `Π_A D`),
/// `Q_BM` (on `ΠB`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourFields {
    pub charts: DoubleCharts,
    pub qdb: Derivation,
    pub qam: Derivation,
    pub qda: Derivation,
    pub qbm: Derivation,
}

/// A pair `Q1` (weight `(1,0)`), `Q2` (weight `(0,1)`) on `Π²D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructurePair {
    pub charts: DoubleCharts,
    pub q1: Derivation,
    pub q2: Derivation,
}

/// Re-express a field on a chart whose reversal sequence differs from the
/// field's by a swap of the last two entries.
pub fn carry(x: &Derivation, from: &MultiChart, to: &MultiChart) -> Result<Derivation> {
    if from == to {
        return Ok(x.clone());
    }
    let phi = from.iso_to(to)?;
    let psi = to.iso_to(from)?;
    x.transport(&phi, &psi)
}

fn expect_chart(x: &Derivation, mc: &MultiChart, what: &str) -> Result<()> {
    if x.chart() != mc.chart() {
        return Err(Error::Precondition(format!("{what} does not live on the expected chart")));
    }
    Ok(())
}

impl FourFields {
    /// `Q_AM` and `Q_BM` are taken as the restrictions to the zero sections.
    pub fn from_sides(charts: &DoubleCharts, qdb: Derivation, qda: Derivation) -> Result<Self> {
        expect_chart(&qdb, &charts.pi_b, "Q_DB")?;
        expect_chart(&qda, &charts.pi_a, "Q_DA")?;
        let qam = restrict_field(&qdb, &charts.side_a, &charts.restrict_a)?;
        let qbm = restrict_field(&qda, &charts.side_b, &charts.restrict_b)?;
        Ok(FourFields { charts: charts.clone(), qdb, qam, qda, qbm })
    }

    pub fn from_pair(pair: &StructurePair) -> Result<Self> {
        let c = &pair.charts;
        let (mb, qdb) = reverse_field(&pair.q1, &c.pi2, 2)?;
        let (ma, qda) = reverse_field(&pair.q2, &c.pi2, 1)?;
        debug_assert!(mb == c.pi_b && ma == c.pi_a);
        FourFields::from_sides(c, qdb, qda)
    }
}

impl StructurePair {
    pub fn new(charts: &DoubleCharts, q1: Derivation, q2: Derivation) -> Result<Self> {
        expect_chart(&q1, &charts.pi2, "Q1")?;
        expect_chart(&q2, &charts.pi2, "Q2")?;
        Ok(StructurePair { charts: charts.clone(), q1, q2 })
    }

    pub fn from_four(f: &FourFields) -> Result<Self> {
        let c = &f.charts;
        let (ms, q1) = reverse_field(&f.qdb, &c.pi_b, 2)?;
        let q1 = carry(&q1, &ms, &c.pi2)?;
        let (mt, q2) = reverse_field(&f.qda, &c.pi_a, 1)?;
        debug_assert!(mt == c.pi2);
        StructurePair::new(c, q1, q2)
    }
}

/// Pass iff `Q1, Q2` are homological of weights `(1,0), (0,1)` and commute.
pub fn check_commutativity(pair: &StructurePair) -> Result<Verdict> {
    let mut v = Verdict::pass();
    v.absorb("Q1", check_weight(&pair.q1, &[1, 0]));
    v.absorb("Q2", check_weight(&pair.q2, &[0, 1]));
    v.absorb("Q1", homological_verdict(&pair.q1));
    v.absorb("Q2", homological_verdict(&pair.q2));
    if pair.q1.parity().is_some() && pair.q2.parity().is_some() {
        let c = pair.q1.commutator(&pair.q2)?;
        let chart = pair.q1.chart();
        for i in 0..chart.len() {
            v.push(format!("[Q1,Q2]({})", chart.name(i)), c.coeff(i).clone());
        }
    }
    Ok(v)
}

/// Condition I: the four fields are homological of the right weights, and
/// the projections `Π_B D → ΠA`, `Π_A D → ΠB` and the zero sections relate them.
pub fn check_condition_i(f: &FourFields) -> Result<Verdict> {
    let c = &f.charts;
    let mut v = Verdict::pass();
    for (label, q, w) in [
        ("QDB", &f.qdb, [1, 0]),
        ("QAM", &f.qam, [1, 0]),
        ("QDA", &f.qda, [0, 1]),
        ("QBM", &f.qbm, [0, 1]),
    ] {
        v.absorb(label, check_weight(q, &w));
        v.absorb(label, homological_verdict(q));
    }
    v.absorb("proj A", related(&c.projection_a()?, &f.qdb, &f.qam)?);
    v.absorb("proj B", related(&c.projection_b()?, &f.qda, &f.qbm)?);
    v.absorb("zero A", related(&c.restrict_a, &f.qam, &f.qdb)?);
    v.absorb("zero B", related(&c.restrict_b, &f.qbm, &f.qda)?);
    Ok(v)
}

/// Pullback of the map `Π_{B'} D → T(Π A')` built from a field `q` on
/// `src = Π_{A'} D` (direction `r` reversed): the base and side coordinates
/// are kept and a dotted coordinate `ẏ` goes to `Π_{B'}(Π_r^{-1}(q(y)))`.
fn tangent_map(
    q: &Derivation,
    src: &MultiChart,
    r: usize,
    side: &MultiChart,
    dst: &MultiChart,
) -> Result<Substitution> {
    let other = 3 - r;
    let (d, m1) = src.reversed(r)?;
    let (out, m2) = d.reversed(other)?;
    if &out != dst {
        return Err(Error::ChartMismatch);
    }
    let tc = tangent_chart(side.chart())?;
    let mut images = Vec::with_capacity(tc.len());
    for g in tc.gens() {
        let (name, dotted) = match g.name.strip_suffix("_dot") {
            Some(stem) if side.chart().try_index_of(stem).is_some() && g.role != Role::Param => {
                (stem, true)
            }
            _ => (g.name.as_str(), false),
        };
        if !dotted {
            images.push(GradedPoly::var(dst.chart(), name)?);
            continue;
        }
        let si = side.chart().index_of(name)?;
        let role = side.chart().gen(si).role;
        let o = side.origin(si);
        let yi = (0..src.chart().len())
            .find(|&i| src.origin(i) == o && src.chart().gen(i).role == role)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let un = reverse_function(q.coeff(yi), src, r, &d, &m1)?;
        images.push(reverse_function(&un, &d, other, &out, &m2)?);
    }
    Substitution::new(&tc, dst.chart(), images)
}

/// Condition II: the maps `Π_A D → T(ΠB)` and `Π_B D → T(ΠA)` built from the
/// anchors relate `Q_DA` to the tangent prolongation of `Q_BM`, and `Q_DB`
/// to that of `Q_AM`.
pub fn check_condition_ii(f: &FourFields) -> Result<Verdict> {
    let c = &f.charts;
    let mut v = Verdict::pass();
    let fb = tangent_map(&f.qdb, &c.pi_b, 1, &c.side_b, &c.pi_a)?;
    v.absorb("D->TB", related(&fb, &f.qda, &tangent_prolongation(&f.qbm)?)?);
    let fa = tangent_map(&f.qda, &c.pi_a, 2, &c.side_a, &c.pi_b)?;
    v.absorb("D->TA", related(&fa, &f.qdb, &tangent_prolongation(&f.qam)?)?);
    Ok(v)
}

/// Dualize a field along direction `r` of a double chart, using the odd
/// pairing between the direction-`r` coordinates `y^I` and their duals `y_I`.
/// If `X(y^J) = Σ_I y^I M_I^J`, then `X*(y_I) = −(−1)^{ỹ^I} Σ_J M_I^J y_J`;
/// the remaining coordinates keep their images.
pub fn dualize(x: &Derivation, mc: &MultiChart, r: usize) -> Result<(MultiChart, Derivation)> {
    if mc.directions() != 2 || !(1..=2).contains(&r) {
        return Err(Error::Precondition("dualization is defined for double charts".into()));
    }
    if x.chart() != mc.chart() {
        return Err(Error::ChartMismatch);
    }
    let shift = x.weight().ok_or_else(|| Error::WeightMismatch("field is not weight-homogeneous".into()))?;
    if shift[r - 1] != 0 {
        return Err(Error::WeightMismatch(format!("field has weight {} in direction {r}", shift[r - 1])));
    }
    let parity = x.parity().ok_or(Error::InhomogeneousParity)?;
    let s = 3 - r;
    let flag = |d: usize| mc.reversals().contains(&d);
    let f_r = !(flag(1) ^ flag(2));
    let f_s = flag(s);
    if f_r && f_s {
        return Err(Error::Precondition(
            "the dual would need both directions reversed; reverse one direction first".into(),
        ));
    }
    let reversals = match (f_r, f_s) {
        (true, _) => vec![r],
        (_, true) => vec![s],
        _ => Vec::new(),
    };
    let chart = mc.chart();
    let specs: Vec<GenSpec> = mc
        .specs()
        .into_iter()
        .map(|(o, role, p)| match role {
            Role::Block(b) if b.contains(r) => {
                let nb = if b.contains(s) { DirSet::single(r) } else { DirSet::from_dirs(&[1, 2]) };
                (o.dual(), Role::Block(nb), p.flip())
            }
            _ => (o, role, p),
        })
        .collect();
    let out = MultiChart::from_parts(2, specs, reversals, mc.naming())?;
    let oc = out.chart();
    let find = |o: &Origin, dual: bool| {
        (0..oc.len())
            .find(|&j| {
                let in_r = matches!(oc.gen(j).role, Role::Block(b) if b.contains(r));
                out.origin(j) == o && in_r == dual
            })
            .expect("generator survives dualization")
    };
    let ys = chart.direction_indices(r);
    let plain: Vec<Option<usize>> = (0..chart.len())
        .map(|i| if ys.contains(&i) { None } else { Some(find(mc.origin(i), false)) })
        .collect();
    let mut coeffs = vec![GradedPoly::zero(oc); oc.len()];
    for i in 0..chart.len() {
        if plain[i].is_some() {
            coeffs[plain[i].unwrap()] = x.coeff(i).rename(oc, &plain)?;
        }
    }
    for &j in &ys {
        let yj = GradedPoly::gen(oc, find(&mc.origin(j).dual(), true));
        for (m, c) in x.coeff(j).split_left(&ys) {
            let Some(i) = m.exponents().iter().position(|&e| e > 0) else {
                return Err(Error::WeightMismatch("field does not preserve linearity".into()));
            };
            if m.degree() != 1 {
                return Err(Error::WeightMismatch("field does not preserve linearity".into()));
            }
            let sign = if chart.parity(i).is_odd() { 1 } else { -1 };
            let target = find(&mc.origin(i).dual(), true);
            let term = c.rename(oc, &plain)?.mul(&yj)?.scale_int(sign);
            coeffs[target] = coeffs[target].add(&term)?;
        }
    }
    Ok((out.clone(), Derivation::with_parity(oc, coeffs, parity)?))
}

/// The Schouten bracket on `Π_{K*} D^{*B}` induced by `Q_DB* ` through the
/// pairing of `D^{*A}` and `D^{*B}` over `K*`. The sign `pairing` (±1) fixes
/// the pairing convention and only rescales the bracket.
pub fn schouten_on_dual(
    qdb_star: &Derivation,
    dual_a: &MultiChart,
    dual_b: &MultiChart,
    pairing: i64,
) -> Result<BracketTable> {
    let ca = dual_a.chart();
    let base: Vec<usize> = (0..ca.len())
        .filter(|&i| match ca.gen(i).role {
            Role::Block(b) => !b.contains(1),
            _ => true,
        })
        .collect();
    let fibers = ca.direction_indices(1);
    let data = AlgebroidData::from_field(qdb_star, &base, &fibers)?;
    let cb = dual_b.chart();
    // The dual of a fiber coordinate of D^{*A} is the coordinate of D^{*B}
    // with the opposite index position.
    let partner = |i: usize| {
        let o = dual_a.origin(i).dual();
        (0..cb.len()).find(|&j| dual_b.origin(j) == &o).expect("paired coordinate")
    };
    let names: Vec<String> = fibers.iter().map(|&i| cb.name(partner(i)).to_string()).collect();
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let table = data.lie_schouten(Some(&name_refs))?;
    let tc = table.chart();
    let mut map = Vec::with_capacity(tc.len());
    let mut signs = Vec::with_capacity(tc.len());
    for g in tc.gens() {
        let j = cb.index_of(&g.name)?;
        map.push(j);
        let sign = match fibers.iter().position(|&i| cb.name(partner(i)) == g.name) {
            Some(k) if dual_a.origin(fibers[k]).lower => -pairing,
            Some(_) => pairing,
            None => 1,
        };
        signs.push(sign);
    }
    table.relabel(cb, &map, &signs)
}

/// Both dual fields of Condition III with their charts:
/// `(Π_{K*}D^{*B}, Q_DA*, Π_{K*}D^{*A}, Q_DB*)`.
pub fn dual_fields(f: &FourFields) -> Result<(MultiChart, Derivation, MultiChart, Derivation)> {
    let c = &f.charts;
    let (mb, qda_star) = dualize(&f.qda, &c.pi_a, 1)?;
    let (ma, qdb_star) = dualize(&f.qdb, &c.pi_b, 2)?;
    Ok((mb, qda_star, ma, qdb_star))
}

/// Condition III: the dual fields `Q_DA*` and `Q_DB*` project to `Q_BM` and
/// `Q_AM`, and `Q_DA*` is a derivation of the Schouten bracket on
/// `Π_{K*}D^{*B}` coming from `Q_DB*`.
pub fn check_condition_iii(f: &FourFields) -> Result<Verdict> {
    check_condition_iii_with(f, 1)
}

pub fn check_condition_iii_with(f: &FourFields, pairing: i64) -> Result<Verdict> {
    let c = &f.charts;
    let (mb, qda_star, ma, qdb_star) = dual_fields(f)?;
    let mut v = Verdict::pass();
    let pb = Substitution::from_pairs(c.side_b.chart(), mb.chart(), &[])?;
    v.absorb("proj B", related(&pb, &qda_star, &f.qbm)?);
    let pa = Substitution::from_pairs(c.side_a.chart(), ma.chart(), &[])?;
    v.absorb("proj A", related(&pa, &qdb_star, &f.qam)?);
    let table = schouten_on_dual(&qdb_star, &ma, &mb, pairing)?;
    v.absorb("schouten", table.derivation_verdict(&qda_star)?);
    Ok(v)
}

/// Conditions I–III together.
pub fn check_conditions(f: &FourFields) -> Result<Verdict> {
    let mut v = Verdict::pass();
    v.absorb("I", check_condition_i(f)?);
    v.absorb("II", check_condition_ii(f)?);
    v.absorb("III", check_condition_iii(f)?);
    Ok(v)
}
