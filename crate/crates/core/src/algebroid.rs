//! Lie algebroids as homological fields of weight one on the parity-reversed bundle.
//!
//! A field `Q = ξ^i Q_i^a ∂_a + ½ ξ^i ξ^j Q_{ji}^k ∂_k` is described by its anchor
//! coefficients `Q_i^a` and structure coefficients `Q_{ji}^k`, stored with the
//! symmetry `Q_{ji}^k = (−1)^{(ĩ+1)(j̃+1)} Q_{ij}^k` of the product `ξ^iξ^j`
//! (plain antisymmetry for an even frame).

use crate::algebra::{Chart, ChartBuilder, GradedPoly, Parity, Role};
use crate::bracket::BracketTable;
use crate::error::{Error, Result};
use crate::fields::Derivation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebroidData {
    chart: Chart,
    base: Vec<usize>,
    fibers: Vec<usize>,
    /// `anchor[i][a] = Q_i^a`.
    anchor: Vec<Vec<GradedPoly>>,
    /// `structure[j][i][k] = Q_{ji}^k`.
    structure: Vec<Vec<Vec<GradedPoly>>>,
}

/// A section `u = u^i(x) e_i` given by its components and parity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub parity: Parity,
    pub components: Vec<GradedPoly>,
}

impl Section {
    pub fn frame(chart: &Chart, data: &AlgebroidData, i: usize) -> Section {
        let mut components = vec![GradedPoly::zero(chart); data.rank()];
        components[i] = GradedPoly::one(chart);
        Section { parity: data.frame_parity(i), components }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(GradedPoly::is_zero)
    }
}

impl AlgebroidData {
    /// Read off `Q_i^a = ∂_{ξ^i} Q(x^a)` and `Q_{ji}^k = ∂_{ξ^j} ∂_{ξ^i} Q(ξ^k)`.
    /// Fails unless `Q` has exactly the weight-one shape in the given fibers.
    pub fn from_field(q: &Derivation, base: &[usize], fibers: &[usize]) -> Result<Self> {
        let chart = q.chart().clone();
        let anchor = fibers
            .iter()
            .map(|&i| base.iter().map(|&a| q.coeff(a).partial(i)).collect())
            .collect();
        let structure = fibers
            .iter()
            .map(|&j| {
                fibers
                    .iter()
                    .map(|&i| fibers.iter().map(|&k| q.coeff(k).partial(i).partial(j)).collect())
                    .collect()
            })
            .collect();
        let data = AlgebroidData {
            chart,
            base: base.to_vec(),
            fibers: fibers.to_vec(),
            anchor,
            structure,
        };
        let back = data.to_field()?;
        let touched: Vec<usize> = base.iter().chain(fibers).copied().collect();
        for g in 0..q.chart().len() {
            let expect = if touched.contains(&g) { back.coeff(g) } else { &GradedPoly::zero(q.chart()) };
            if q.coeff(g) != expect {
                return Err(Error::WeightMismatch(format!(
                    "field is not of algebroid shape on {}",
                    q.chart().name(g)
                )));
            }
        }
        Ok(data)
    }

    /// Base = `Role::Base` generators, fibers = direction-1 blocks.
    pub fn from_odd_chart(q: &Derivation) -> Result<Self> {
        let c = q.chart();
        AlgebroidData::from_field(q, &c.base_indices(), &c.direction_indices(1))
    }

    /// From an anchor `ρ(e_i) = Σ_a ρ[i][a] ∂_a` and a frame bracket
    /// `[e_i,e_j] = Σ_k c[i][j][k] e_k`.
    pub fn from_anchor_bracket(
        chart: &Chart,
        base: &[usize],
        fibers: &[usize],
        anchor: Vec<Vec<GradedPoly>>,
        bracket: &[Vec<Vec<GradedPoly>>],
    ) -> Result<Self> {
        let r = fibers.len();
        let frame = |i: usize| chart.parity(fibers[i]).flip();
        let mut structure = vec![vec![vec![GradedPoly::zero(chart); r]; r]; r];
        for j in 0..r {
            for i in 0..r {
                for k in 0..r {
                    // [e_j, e_i] = (−1)^{ĩ} Q_{ji}^k e_k
                    let sign = if frame(i).is_odd() { -1 } else { 1 };
                    structure[j][i][k] = bracket[j][i][k].scale_int(sign);
                }
            }
        }
        let data =
            AlgebroidData { chart: chart.clone(), base: base.to_vec(), fibers: fibers.to_vec(), anchor, structure };
        data.check_symmetry()?;
        Ok(data)
    }

    /// A Lie algebra over a point on a fresh chart with odd generators `names`.
    /// `c[i][j][k]` are the structure constants of `[e_i,e_j]`.
    pub fn lie_algebra(names: &[&str], c: &[Vec<Vec<i64>>]) -> Result<Self> {
        let mut b = Chart::builder(1);
        for n in names {
            b = b.fiber(n, Parity::Odd, 1);
        }
        let chart = b.build()?;
        let fibers: Vec<usize> = names.iter().map(|n| chart.index_of(n)).collect::<Result<_>>()?;
        let bracket: Vec<Vec<Vec<GradedPoly>>> = c
            .iter()
            .map(|row| row.iter().map(|v| v.iter().map(|&x| GradedPoly::int(&chart, x)).collect()).collect())
            .collect();
        AlgebroidData::from_anchor_bracket(&chart, &[], &fibers, vec![Vec::new(); names.len()], &bracket)
    }

    fn check_symmetry(&self) -> Result<()> {
        let r = self.rank();
        for i in 0..r {
            for j in 0..r {
                let s = self.xi_parity(i).koszul(self.xi_parity(j));
                for k in 0..r {
                    if self.structure[j][i][k] != self.structure[i][j][k].scale_int(i64::from(s)) {
                        return Err(Error::Precondition(format!(
                            "structure coefficients not graded-antisymmetric at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn rank(&self) -> usize {
        self.fibers.len()
    }

    pub fn base(&self) -> &[usize] {
        &self.base
    }

    pub fn fibers(&self) -> &[usize] {
        &self.fibers
    }

    fn xi_parity(&self, i: usize) -> Parity {
        self.chart.parity(self.fibers[i])
    }

    /// Parity of the frame element `e_i` (opposite to `ξ^i`).
    pub fn frame_parity(&self, i: usize) -> Parity {
        self.xi_parity(i).flip()
    }

    pub fn anchor_coeff(&self, i: usize, a: usize) -> &GradedPoly {
        &self.anchor[i][a]
    }

    /// `Q_{ji}^k`.
    pub fn structure_coeff(&self, j: usize, i: usize, k: usize) -> &GradedPoly {
        &self.structure[j][i][k]
    }

    pub fn to_field(&self) -> Result<Derivation> {
        let c = &self.chart;
        let mut coeffs = vec![GradedPoly::zero(c); c.len()];
        let xi: Vec<GradedPoly> = self.fibers.iter().map(|&i| GradedPoly::gen(c, i)).collect();
        for (a, &ga) in self.base.iter().enumerate() {
            for i in 0..self.rank() {
                coeffs[ga] = coeffs[ga].add(&xi[i].mul(&self.anchor[i][a])?)?;
            }
        }
        let half = crate::algebra::ratio(1, 2);
        for (k, &gk) in self.fibers.iter().enumerate() {
            for i in 0..self.rank() {
                for j in 0..self.rank() {
                    let term = xi[i].mul(&xi[j])?.mul(&self.structure[j][i][k])?.scale(&half);
                    coeffs[gk] = coeffs[gk].add(&term)?;
                }
            }
        }
        Derivation::with_parity(c, coeffs, Parity::Odd)
    }

    fn check_section(&self, u: &Section) -> Result<()> {
        if u.components.len() != self.rank() {
            return Err(Error::Precondition("section has the wrong number of components".into()));
        }
        for (i, comp) in u.components.iter().enumerate() {
            if comp.chart() != &self.chart {
                return Err(Error::ChartMismatch);
            }
            if let Some(p) = comp.parity() {
                if p != self.frame_parity(i) + u.parity {
                    return Err(Error::ParityMismatch(format!(
                        "component {i} of a {} section has parity {p}",
                        u.parity
                    )));
                }
            }
            if comp.support().iter().any(|g| self.fibers.contains(g)) {
                return Err(Error::Precondition("section components must be base functions".into()));
            }
        }
        Ok(())
    }

    /// `i(u) = (−1)^{ũ} u^i ∂/∂ξ^i`.
    pub fn section_to_field(&self, u: &Section) -> Result<Derivation> {
        self.check_section(u)?;
        let sign = if u.parity.is_odd() { -1 } else { 1 };
        let mut coeffs = vec![GradedPoly::zero(&self.chart); self.chart.len()];
        for (i, comp) in u.components.iter().enumerate() {
            coeffs[self.fibers[i]] = comp.scale_int(sign);
        }
        Derivation::with_parity(&self.chart, coeffs, u.parity.flip())
    }

    /// `a(u)f = [[Q,i(u)],f] = [Q,i(u)](f)`.
    pub fn derived_anchor(&self, u: &Section, f: &GradedPoly) -> Result<GradedPoly> {
        if f.support().iter().any(|g| self.fibers.contains(g)) {
            return Err(Error::Precondition("anchor acts on base functions".into()));
        }
        let q = self.to_field()?;
        q.commutator(&self.section_to_field(u)?)?.apply(f)
    }

    /// `i([u,v]) = (−1)^{ũ}[[Q,i(u)],i(v)]`.
    pub fn derived_bracket(&self, u: &Section, v: &Section) -> Result<Section> {
        let q = self.to_field()?;
        let iu = self.section_to_field(u)?;
        let iv = self.section_to_field(v)?;
        let w = q.commutator(&iu)?.commutator(&iv)?;
        let parity = u.parity + v.parity;
        // Coefficient of ∂/∂ξ^k in i(w) is (−1)^{w̃} w^k.
        let sign = if (u.parity + parity).is_odd() { -1 } else { 1 };
        let components = self.fibers.iter().map(|&k| w.coeff(k).scale_int(sign)).collect();
        Ok(Section { parity, components })
    }

    /// Frame bracket `[e_i,e_j]` components.
    pub fn frame_bracket(&self, i: usize, j: usize) -> Result<Vec<GradedPoly>> {
        let ei = Section::frame(&self.chart, self, i);
        let ej = Section::frame(&self.chart, self, j);
        Ok(self.derived_bracket(&ei, &ej)?.components)
    }

    /// Chart on the dual bundle: base generators plus dual fiber coordinates of the
    /// given parity shift (`Even` for `E*`, `Odd` for `ΠE*`).
    fn dual_chart(&self, names: &[String], shift: Parity) -> Result<Chart> {
        // Base coordinates keep their roles, so odd ones from a weighted source stay blocks.
        let mut b: ChartBuilder = Chart::builder(self.chart.directions().max(1));
        for &a in &self.base {
            let g = self.chart.gen(a);
            b = b.gen(&g.name, g.parity, g.role);
        }
        for (i, n) in names.iter().enumerate() {
            b = b.fiber(n, self.frame_parity(i) + shift, 1);
        }
        b.build()
    }

    fn dual_names(&self, names: Option<&[&str]>) -> Vec<String> {
        match names {
            Some(n) => n.iter().map(|s| s.to_string()).collect(),
            None => self.fibers.iter().map(|&i| format!("{}_", self.chart.name(i))).collect(),
        }
    }

    fn linear_table(&self, names: &[String], shift: Parity) -> Result<BracketTable> {
        let dual = self.dual_chart(names, shift)?;
        let base_map: Vec<Option<usize>> = (0..self.chart.len())
            .map(|g| if self.base.contains(&g) { dual.try_index_of(self.chart.name(g)) } else { None })
            .collect();
        let to_dual = |p: &GradedPoly| p.rename(&dual, &base_map);
        let y: Vec<usize> = names.iter().map(|n| dual.index_of(n)).collect::<Result<_>>()?;
        let mut t = BracketTable::new(&dual, shift);
        for i in 0..self.rank() {
            for (a, &ga) in self.base.iter().enumerate() {
                let xa = dual.index_of(self.chart.name(ga))?;
                t.set(y[i], xa, to_dual(&self.anchor[i][a])?)?;
            }
            for j in 0..self.rank() {
                // {y_i, y_j} = (−1)^{j̃} Q_{ij}^k y_k
                let sign = if self.frame_parity(j).is_odd() { -1 } else { 1 };
                let mut val = GradedPoly::zero(&dual);
                for k in 0..self.rank() {
                    let term = to_dual(&self.structure[i][j][k])?.mul(&GradedPoly::gen(&dual, y[k]))?;
                    val = val.add(&term)?;
                }
                t.set(y[i], y[j], val.scale_int(sign))?;
            }
        }
        Ok(t)
    }

    /// Even Lie–Poisson bracket on `E*` with dual coordinates `u_i` (parity `ĩ`).
    pub fn lie_poisson(&self, names: Option<&[&str]>) -> Result<BracketTable> {
        self.linear_table(&self.dual_names(names), Parity::Even)
    }

    /// Odd Lie–Schouten bracket on `ΠE*` with dual coordinates `ξ_i` (parity `ĩ+1`).
    pub fn lie_schouten(&self, names: Option<&[&str]>) -> Result<BracketTable> {
        self.linear_table(&self.dual_names(names), Parity::Odd)
    }
}

/// Name of the dotted copy of a generator in the tangent prolongation.
pub fn dotted(name: &str) -> String {
    format!("{name}_dot")
}

/// The tangent chart: every non-parameter generator `y` gets a copy `ẏ` of the same
/// parity whose weight gains a new last direction.
pub fn tangent_chart(chart: &Chart) -> Result<Chart> {
    let n = chart.directions();
    let mut b = Chart::builder(n + 1);
    for g in chart.gens() {
        b = b.gen(&g.name, g.parity, g.role);
    }
    for g in chart.gens() {
        let role = match g.role {
            Role::Param => continue,
            Role::Base => Role::fiber(n + 1),
            Role::Block(s) => Role::Block(crate::algebra::DirSet(s.0 | (1 << n))),
        };
        b = b.gen(&dotted(&g.name), g.parity, role);
    }
    b.build()
}

/// `Q̂(y) = Q(y)`, `Q̂(ẏ) = d(Q(y))` with `d = Σ ẏ ∂_y`.
pub fn tangent_prolongation(q: &Derivation) -> Result<Derivation> {
    let src = q.chart();
    let tc = tangent_chart(src)?;
    let embed: Vec<Option<usize>> = src.gens().iter().map(|g| tc.try_index_of(&g.name)).collect();
    let mut d_coeffs = vec![GradedPoly::zero(&tc); tc.len()];
    for g in src.gens() {
        if g.role != Role::Param {
            d_coeffs[tc.index_of(&g.name)?] = GradedPoly::var(&tc, &dotted(&g.name))?;
        }
    }
    let d = Derivation::with_parity(&tc, d_coeffs, Parity::Even)?;
    let mut coeffs = vec![GradedPoly::zero(&tc); tc.len()];
    for (i, g) in src.gens().iter().enumerate() {
        let image = q.coeff(i).rename(&tc, &embed)?;
        if g.role != Role::Param {
            coeffs[tc.index_of(&dotted(&g.name))?] = d.apply(&image)?;
        }
        coeffs[tc.index_of(&g.name)?] = image;
    }
    match q.parity() {
        Some(p) => Derivation::with_parity(&tc, coeffs, p),
        None => Derivation::new(&tc, coeffs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::is_homological;

    fn heisenberg() -> AlgebroidData {
        let chart = Chart::builder(1)
            .fiber("xi1", Parity::Odd, 1)
            .fiber("xi2", Parity::Odd, 1)
            .fiber("xi3", Parity::Odd, 1)
            .build()
            .unwrap();
        let v = |n: &str| GradedPoly::var(&chart, n).unwrap();
        let q = Derivation::from_pairs(&chart, &[("xi3", v("xi1").mul(&v("xi2")).unwrap())]).unwrap();
        AlgebroidData::from_odd_chart(&q).unwrap()
    }

    #[test]
    fn section_to_field_signs() {
        let c = Chart::builder(1)
            .base("x")
            .fiber("xi1", Parity::Odd, 1)
            .fiber("eta", Parity::Even, 1)
            .build()
            .unwrap();
        let q = Derivation::zero(&c, Parity::Odd);
        let data = AlgebroidData::from_odd_chart(&q).unwrap();
        let e1 = Section::frame(&c, &data, 0);
        assert_eq!(data.section_to_field(&e1).unwrap(), Derivation::partial(&c, 1));
        let odd = Section::frame(&c, &data, 1);
        assert_eq!(odd.parity, Parity::Odd);
        assert_eq!(data.section_to_field(&odd).unwrap(), Derivation::partial(&c, 2).neg());
        let zero = Section { parity: Parity::Even, components: vec![GradedPoly::zero(&c); 2] };
        assert!(data.section_to_field(&zero).unwrap().is_zero());
        let bad = Section { parity: Parity::Odd, components: vec![GradedPoly::one(&c), GradedPoly::zero(&c)] };
        assert!(matches!(data.section_to_field(&bad), Err(Error::ParityMismatch(_))));
    }

    #[test]
    fn heisenberg_bracket_sign() {
        let h = heisenberg();
        let c = h.chart().clone();
        assert!(is_homological(&h.to_field().unwrap()));
        let e12 = h.frame_bracket(0, 1).unwrap();
        assert_eq!(e12, vec![GradedPoly::zero(&c), GradedPoly::zero(&c), GradedPoly::int(&c, -1)]);
        assert!(h.frame_bracket(0, 2).unwrap().iter().all(GradedPoly::is_zero));
        assert!(h.frame_bracket(1, 1).unwrap().iter().all(GradedPoly::is_zero));
        let t = h.lie_poisson(Some(&["u1", "u2", "u3"])).unwrap();
        let d = t.chart().clone();
        let u = |n: &str| GradedPoly::var(&d, n).unwrap();
        assert_eq!(t.bracket(&u("u1"), &u("u2")).unwrap(), u("u3").neg());
        assert!(t.bracket(&u("u1"), &u("u3")).unwrap().is_zero());
        assert!(t.jacobi_verdict().unwrap().passed());
    }

    #[test]
    fn anchor_and_schouten_tables() {
        // Action algebroid on the line: ρ(e1) = −x∂x, ρ(e2) = ∂x, [e1,e2] = e2.
        let c = Chart::builder(1)
            .base("x")
            .fiber("xi1", Parity::Odd, 1)
            .fiber("xi2", Parity::Odd, 1)
            .build()
            .unwrap();
        let x = GradedPoly::var(&c, "x").unwrap();
        let z = GradedPoly::zero(&c);
        let one = GradedPoly::one(&c);
        let mut br = vec![vec![vec![z.clone(); 2]; 2]; 2];
        br[0][1][1] = one.clone();
        br[1][0][1] = one.neg();
        let data = AlgebroidData::from_anchor_bracket(
            &c,
            &[0],
            &[1, 2],
            vec![vec![x.neg()], vec![one.clone()]],
            &br,
        )
        .unwrap();
        assert!(is_homological(&data.to_field().unwrap()));
        assert_eq!(data.frame_bracket(0, 1).unwrap(), vec![z.clone(), one.clone()]);
        let e1 = Section::frame(&c, &data, 0);
        assert_eq!(data.derived_anchor(&e1, &x).unwrap(), x.neg());
        assert!(data.derived_anchor(&e1, &one).unwrap().is_zero());

        let s = data.lie_schouten(Some(&["p1", "p2"])).unwrap();
        let d = s.chart().clone();
        let g = |n: &str| GradedPoly::var(&d, n).unwrap();
        assert!(s.bracket(&g("x"), &g("x")).unwrap().is_zero());
        assert_eq!(s.bracket(&g("p1"), &g("x")).unwrap(), g("x").neg());
        assert_eq!(s.bracket(&g("p1"), &g("p2")).unwrap(), g("p2"));
        assert!(s.jacobi_verdict().unwrap().passed());
    }

    #[test]
    fn round_trip_field_data_field() {
        let h = heisenberg();
        let q = h.to_field().unwrap();
        assert_eq!(AlgebroidData::from_odd_chart(&q).unwrap().to_field().unwrap(), q);
    }

    #[test]
    fn prolongation_of_one_dim_anchor() {
        let c = Chart::builder(1).base("x").fiber("xi", Parity::Odd, 1).build().unwrap();
        let x = GradedPoly::var(&c, "x").unwrap();
        let xi = GradedPoly::var(&c, "xi").unwrap();
        let a = x.pow(2).unwrap();
        let q = Derivation::from_pairs(&c, &[("x", xi.mul(&a).unwrap())]).unwrap();
        let qh = tangent_prolongation(&q).unwrap();
        let t = qh.chart().clone();
        let g = |n: &str| GradedPoly::var(&t, n).unwrap();
        let a_t = g("x").pow(2).unwrap();
        assert_eq!(qh.coeff_by_name("x").unwrap(), &g("xi").mul(&a_t).unwrap());
        let expect = g("xi_dot")
            .mul(&a_t)
            .unwrap()
            .add(&g("xi").mul(&g("x_dot")).unwrap().mul(&g("x")).unwrap().scale_int(2))
            .unwrap();
        assert_eq!(qh.coeff_by_name("x_dot").unwrap(), &expect);
        assert_eq!(t.gen(t.index_of("x_dot").unwrap()).weight, vec![0, 1]);
        assert_eq!(t.gen(t.index_of("xi_dot").unwrap()).weight, vec![1, 1]);
        assert!(tangent_prolongation(&Derivation::zero(&c, Parity::Odd)).unwrap().is_zero());
    }

    #[test]
    fn prolonged_lie_algebra_frame() {
        let h = heisenberg();
        let qh = tangent_prolongation(&h.to_field().unwrap()).unwrap();
        assert!(is_homological(&qh));
        let t = qh.chart();
        let fib: Vec<usize> = ["xi1", "xi2", "xi3", "xi1_dot", "xi2_dot", "xi3_dot"]
            .iter()
            .map(|n| t.index_of(n).unwrap())
            .collect();
        let data = AlgebroidData::from_field(&qh, &[], &fib).unwrap();
        // [ē_1, ē_2] = −ē_3, [ē_1, e̊_2] = −e̊_3, [e̊_1, e̊_2] = 0.
        let b = data.frame_bracket(0, 1).unwrap();
        assert_eq!(b[2], GradedPoly::int(t, -1));
        assert!(b[5].is_zero());
        let b = data.frame_bracket(0, 4).unwrap();
        assert_eq!(b[5], GradedPoly::int(t, -1));
        assert!(b[2].is_zero());
        assert!(data.frame_bracket(3, 4).unwrap().iter().all(GradedPoly::is_zero));
    }
}
