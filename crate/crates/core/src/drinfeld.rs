//! Cotangent doubles of Lie bialgebroids.
//!
//! `T*ΠE` is charted as `Π²` of the double `T*E` with sides `E`, `E*` and core
//! `T*M`: the fibre coordinates `ξ^i` of `ΠE` are `xi{i}` (weight `(1,0)`),
//! their momenta `ξ_i` are `eta{i}` (weight `(0,1)`), and the momenta `p_a` of
//! the base coordinates are `t{a}` (weight `(1,1)`). The canonical bracket is
//! even with `{p_a, x^b} = δ_a^b` and `{ξ_i, ξ^j} = δ_i^j`.

use crate::algebra::{Chart, GradedPoly, Parity, Role};
use crate::algebroid::AlgebroidData;
use crate::bracket::BracketTable;
use crate::doubles::{DoubleCharts, DoubleShape, StructurePair};
use crate::error::{Error, Result};
use crate::fields::{check_weight, homological_verdict, Derivation};
use crate::verdict::Verdict;

/// A pair of algebroid fields: `Q_E` on `ΠE` and `Q_{E*}` on `ΠE*`, over the
/// same base. Each chart lists the base first and the fibre coordinates in
/// direction 1; `ξ_i` has the parity of `ξ^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BialgebroidInstance {
    pub e: Derivation,
    pub e_star: Derivation,
}

impl BialgebroidInstance {
    pub fn new(e: Derivation, e_star: Derivation) -> Result<Self> {
        let (ce, cs) = (e.chart(), e_star.chart());
        let base_names = |c: &Chart| -> Vec<String> { c.base_indices().iter().map(|&i| c.name(i).to_string()).collect() };
        if base_names(ce) != base_names(cs) {
            return Err(Error::Precondition("E and E* must share their base coordinates".into()));
        }
        let fe: Vec<Parity> = ce.direction_indices(1).iter().map(|&i| ce.parity(i)).collect();
        let fs: Vec<Parity> = cs.direction_indices(1).iter().map(|&i| cs.parity(i)).collect();
        if fe != fs {
            return Err(Error::Precondition("fibre coordinates of ΠE and ΠE* must pair up".into()));
        }
        for (label, q) in [("Q_E", &e), ("Q_E*", &e_star)] {
            if !homological_verdict(q).passed() {
                return Err(Error::Precondition(format!("{label} is not homological")));
            }
            if !check_weight(q, &[1]).passed() {
                return Err(Error::WeightMismatch(format!("{label} must have weight 1 in the fibres")));
            }
        }
        Ok(BialgebroidInstance { e, e_star })
    }

    /// A Lie bialgebra: `[e_i,e_j] = Σ_k bracket[i][j][k] e_k` and the dual
    /// bracket `[ε^i,ε^j] = Σ_k cobracket[i][j][k] ε^k`.
    pub fn lie_bialgebra(bracket: &[Vec<Vec<i64>>], cobracket: &[Vec<Vec<i64>>]) -> Result<Self> {
        let n = bracket.len();
        let names = |stem: &str| -> Vec<String> { (1..=n).map(|i| format!("{stem}{i}")).collect() };
        let field = |stem: &str, c: &[Vec<Vec<i64>>]| -> Result<Derivation> {
            let ns = names(stem);
            let refs: Vec<&str> = ns.iter().map(String::as_str).collect();
            AlgebroidData::lie_algebra(&refs, c)?.to_field()
        };
        BialgebroidInstance::new(field("xi", bracket)?, field("eta", cobracket)?)
    }

    /// Split a pair of fields on `ΠE ×_M ΠE*`, charted with the base, the
    /// `ΠE` fibres in direction 1 and the `ΠE*` fibres in direction 2.
    /// `Q_E` must only involve the base and direction 1, `Q_{E*}` the base and
    /// direction 2.
    pub fn from_fibre_product(qe: &Derivation, qs: &Derivation) -> Result<Self> {
        let c = qe.chart();
        if qs.chart() != c || c.directions() != 2 {
            return Err(Error::Precondition("expected both fields on one chart with two directions".into()));
        }
        let side = |r: usize| -> Result<Chart> {
            let mut b = Chart::builder(1);
            for g in c.gens() {
                match g.role {
                    Role::Block(s) if s.len() > 1 => {
                        return Err(Error::InvalidChart(format!("core coordinate {} in a fibre product", g.name)))
                    }
                    Role::Block(s) if s.contains(r) => b = b.fiber(&g.name, g.parity, 1),
                    Role::Block(_) => {}
                    role => b = b.gen(&g.name, g.parity, role),
                }
            }
            b.build()
        };
        let restrict = |q: &Derivation, r: usize, label: &str| -> Result<Derivation> {
            let target = side(r)?;
            let mut coeffs = vec![GradedPoly::zero(&target); target.len()];
            for i in 0..c.len() {
                let coeff = q.coeff(i);
                match target.try_index_of(c.name(i)) {
                    Some(j) => {
                        coeffs[j] = coeff.rename_by_name(&target).map_err(|_| {
                            Error::Precondition(format!("{label} involves coordinates of direction {}", 3 - r))
                        })?
                    }
                    None if coeff.is_zero() => {}
                    None => {
                        return Err(Error::Precondition(format!(
                            "{label} moves the direction-{} coordinate {}",
                            3 - r,
                            c.name(i)
                        )))
                    }
                }
            }
            Derivation::with_parity(&target, coeffs, q.parity().ok_or(Error::InhomogeneousParity)?)
        };
        BialgebroidInstance::new(restrict(qe, 1, "Q_E")?, restrict(qs, 2, "Q_E*")?)
    }

    pub fn rank(&self) -> usize {
        self.e.chart().direction_indices(1).len()
    }
}

/// The cotangent chart with its canonical bracket and the embeddings of `ΠE`
/// and `ΠE*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CotangentDouble {
    pub charts: DoubleCharts,
    pub poisson: BracketTable,
    e_map: Vec<Option<usize>>,
    e_star_map: Vec<Option<usize>>,
    /// `momentum[g]` is the conjugate of generator `g` of the cotangent chart.
    momentum: Vec<usize>,
}

impl CotangentDouble {
    pub fn new(b: &BialgebroidInstance) -> Result<Self> {
        let ce = b.e.chart();
        let fibre_par: Vec<Parity> = ce.direction_indices(1).iter().map(|&i| ce.parity(i)).collect();
        let base = ce.base_indices();
        let shape = DoubleShape {
            base: base.len(),
            a: fibre_par.iter().map(|p| p.flip()).collect(),
            b: fibre_par.iter().map(|p| p.flip()).collect(),
            core: vec![Parity::Even; base.len()],
            params: ce.indices_where(|g| g.role == Role::Param).iter().map(|&i| ce.name(i).to_string()).collect(),
        };
        let charts = DoubleCharts::from_shape(&shape)?;
        let pc = charts.pi2.chart().clone();
        let base_names = shape.base_names();
        let embed = |c: &Chart, stem: &str| -> Result<Vec<Option<usize>>> {
            let mut map = vec![None; c.len()];
            for (k, &a) in c.base_indices().iter().enumerate() {
                map[a] = Some(pc.index_of(&base_names[k])?);
            }
            for (k, &i) in c.direction_indices(1).iter().enumerate() {
                map[i] = Some(pc.index_of(&format!("{stem}{}", k + 1))?);
            }
            for i in c.indices_where(|g| g.role == Role::Param) {
                map[i] = Some(pc.index_of(c.name(i))?);
            }
            Ok(map)
        };
        let e_map = embed(ce, "xi")?;
        let e_star_map = embed(b.e_star.chart(), "eta")?;
        let mut poisson = BracketTable::new(&pc, Parity::Even);
        let mut momentum: Vec<usize> = (0..pc.len()).collect();
        let mut pair = |p: usize, q: usize| -> Result<()> {
            poisson.set(p, q, GradedPoly::one(&pc))?;
            momentum[q] = p;
            momentum[p] = q;
            Ok(())
        };
        for (k, n) in base_names.iter().enumerate() {
            pair(pc.index_of(&format!("t{}", k + 1))?, pc.index_of(n)?)?;
        }
        for k in 1..=fibre_par.len() {
            pair(pc.index_of(&format!("eta{k}"))?, pc.index_of(&format!("xi{k}"))?)?;
        }
        Ok(CotangentDouble { charts, poisson, e_map, e_star_map, momentum })
    }

    /// `H = Σ_y Q(y) p_y`, with `p_y` normalized so that `{p_y, y} = 1`; then
    /// `X_H = {H, ·}` restricts to `Q` on the coordinates `y`.
    fn lift(&self, q: &Derivation, map: &[Option<usize>]) -> Result<GradedPoly> {
        let pc = self.poisson.chart();
        let mut h = GradedPoly::zero(pc);
        for (g, target) in map.iter().enumerate() {
            let Some(y) = *target else { continue };
            if q.chart().gen(g).role == Role::Param {
                continue;
            }
            let p = self.momentum[y];
            let norm = self.poisson.on_generators(p, y).constant_term();
            let mom = GradedPoly::gen(pc, p).scale(&norm.recip());
            h = h.add(&q.coeff(g).rename(pc, map)?.mul(&mom)?)?;
        }
        Ok(h)
    }

    /// Hamiltonian lift of a field on `ΠE`.
    pub fn lift_e(&self, q: &Derivation) -> Result<GradedPoly> {
        self.lift(q, &self.e_map)
    }

    /// Hamiltonian lift of a field on `ΠE*`.
    pub fn lift_e_star(&self, q: &Derivation) -> Result<GradedPoly> {
        self.lift(q, &self.e_star_map)
    }
}

/// The canonical even bracket on the cotangent chart of `b`.
pub fn canonical_poisson(b: &BialgebroidInstance) -> Result<BracketTable> {
    Ok(CotangentDouble::new(b)?.poisson)
}

/// The cotangent double `Q1 = X_{H_E}`, `Q2 = X_{H_{E*}}` of a bialgebroid
/// candidate, with the verdict of `{H_E, H_{E*}} = 0`.
pub fn build_cotangent_double(b: &BialgebroidInstance) -> Result<(StructurePair, Verdict)> {
    let cd = CotangentDouble::new(b)?;
    let he = cd.lift_e(&b.e)?;
    let hs = cd.lift_e_star(&b.e_star)?;
    // The lifts are odd even when they vanish.
    let odd = |h: &GradedPoly| -> Result<Derivation> {
        let x = cd.poisson.hamiltonian(h)?;
        Derivation::with_parity(x.chart(), x.coeffs().to_vec(), Parity::Odd)
    };
    let (q1, q2) = (odd(&he)?, odd(&hs)?);
    for (label, q, w) in [("Q1", &q1, [1, 0]), ("Q2", &q2, [0, 1])] {
        let v = check_weight(q, &w);
        if !v.passed() {
            return Err(Error::WeightMismatch(format!("{label}: {}", v.labels().join(", "))));
        }
    }
    let mut v = Verdict::pass();
    v.push("{H_E,H_E*}", cd.poisson.bracket(&he, &hs)?);
    Ok((StructurePair::new(&cd.charts, q1, q2)?, v))
}

/// The derivation property of `Q_E` for the Schouten bracket on `ΠE` induced
/// by `Q_{E*}`: the usual definition of a Lie bialgebroid.
pub fn schouten_derivation_verdict(b: &BialgebroidInstance) -> Result<Verdict> {
    let ce = b.e.chart();
    let data = AlgebroidData::from_odd_chart(&b.e_star)?;
    let names: Vec<String> = ce.direction_indices(1).iter().map(|&i| ce.name(i).to_string()).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let table = data.lie_schouten(Some(&refs))?;
    let q = b.e.rename_by_name(table.chart())?;
    table.derivation_verdict(&q)
}
