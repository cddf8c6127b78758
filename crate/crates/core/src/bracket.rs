//! Even (Poisson) and odd (Schouten) brackets given by their values on generators.

use std::collections::BTreeMap;

use crate::algebra::{rat, Chart, GradedPoly, Monomial, Parity, Substitution};
use crate::error::{Error, Result};
use crate::fields::Derivation;
use crate::verdict::Verdict;

/// A bracket of parity `ε`, determined by a table on generator pairs and extended
/// to polynomials by the Leibniz rules
/// `{ab,c} = a{b,c} + (−1)^{b̃(c̃+ε)}{a,c}b` and `{a,bc} = {a,b}c + (−1)^{(ã+ε)b̃} b{a,c}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketTable {
    chart: Chart,
    parity: Parity,
    table: BTreeMap<(usize, usize), GradedPoly>,
}

impl BracketTable {
    pub fn new(chart: &Chart, parity: Parity) -> Self {
        BracketTable { chart: chart.clone(), parity, table: BTreeMap::new() }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Symmetry sign `s` with `{q,p} = s{p,q}` for generators `p,q`.
    fn swap_sign(&self, p: usize, q: usize) -> i64 {
        let a = self.chart.parity(p) + self.parity;
        let b = self.chart.parity(q) + self.parity;
        -i64::from(a.koszul(b))
    }

    /// Set `{p,q}` and, by graded symmetry, `{q,p}`.
    pub fn set(&mut self, p: usize, q: usize, value: GradedPoly) -> Result<()> {
        if value.chart() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let mirrored = value.scale_int(self.swap_sign(p, q));
        if p == q && value != mirrored {
            return Err(Error::Precondition(format!(
                "{{{0},{0}}} must vanish by symmetry",
                self.chart.name(p)
            )));
        }
        for ((a, b), v) in [((p, q), value), ((q, p), mirrored)] {
            if let Some(old) = self.table.get(&(a, b)) {
                if *old != v {
                    return Err(Error::Precondition(format!(
                        "conflicting entries for {{{},{}}}",
                        self.chart.name(a),
                        self.chart.name(b)
                    )));
                }
            }
            if v.is_zero() {
                self.table.remove(&(a, b));
            } else {
                self.table.insert((a, b), v);
            }
        }
        Ok(())
    }

    pub fn set_by_name(&mut self, p: &str, q: &str, value: GradedPoly) -> Result<()> {
        let (p, q) = (self.chart.index_of(p)?, self.chart.index_of(q)?);
        self.set(p, q, value)
    }

    pub fn on_generators(&self, p: usize, q: usize) -> GradedPoly {
        self.table.get(&(p, q)).cloned().unwrap_or_else(|| GradedPoly::zero(&self.chart))
    }

    /// `{p, q}` for arbitrary polynomials.
    pub fn bracket(&self, p: &GradedPoly, q: &GradedPoly) -> Result<GradedPoly> {
        if p.chart() != &self.chart || q.chart() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let (even, odd) = p.parity_components();
        let mut out = GradedPoly::zero(&self.chart);
        for (m, c) in q.terms() {
            for part in [&even, &odd] {
                if !part.is_zero() {
                    out = out.add(&self.bracket_poly_monomial(part, m)?.scale(c))?;
                }
            }
        }
        Ok(out)
    }

    /// `{p, m}` for parity-homogeneous `p` and a monomial `m`.
    fn bracket_poly_monomial(&self, p: &GradedPoly, m: &Monomial) -> Result<GradedPoly> {
        let Some(h) = m.exponents().iter().position(|&e| e > 0) else {
            return Ok(GradedPoly::zero(&self.chart));
        };
        // m = g_h · rest with g_h leftmost, so no reordering sign.
        let mut rest_exps = m.exponents().to_vec();
        rest_exps[h] -= 1;
        let rest_m = Monomial::from_exponents(rest_exps);
        let rest = GradedPoly::from_terms(&self.chart, [(rest_m.clone(), rat(1))]);
        let pe = p.parity().unwrap_or(Parity::Even);
        let first = self.bracket_poly_gen(p, h)?.mul(&rest)?;
        let sign = i64::from((pe + self.parity).koszul(self.chart.parity(h)));
        let second = GradedPoly::gen(&self.chart, h)
            .mul(&self.bracket_poly_monomial(p, &rest_m)?)?
            .scale_int(sign);
        first.add(&second)
    }

    /// `{p, g}` for a generator `g`, by Leibniz in the first slot.
    fn bracket_poly_gen(&self, p: &GradedPoly, g: usize) -> Result<GradedPoly> {
        let gp = self.chart.parity(g);
        let mut out = GradedPoly::zero(&self.chart);
        for (m, c) in p.terms() {
            out = out.add(&self.bracket_monomial_gen(m, g, gp)?.scale(c))?;
        }
        Ok(out)
    }

    fn bracket_monomial_gen(&self, m: &Monomial, g: usize, gp: Parity) -> Result<GradedPoly> {
        let Some(h) = m.exponents().iter().position(|&e| e > 0) else {
            return Ok(GradedPoly::zero(&self.chart));
        };
        let head = GradedPoly::gen(&self.chart, h);
        let mut rest_exps = m.exponents().to_vec();
        rest_exps[h] -= 1;
        let rest_m = Monomial::from_exponents(rest_exps);
        let rest = GradedPoly::from_terms(&self.chart, [(rest_m.clone(), rat(1))]);
        let rest_parity = rest_m.parity(&self.chart);
        // {head·rest, g} = head{rest,g} + (−1)^{rest~(g~+ε)} {head,g} rest
        let first = head.mul(&self.bracket_monomial_gen(&rest_m, g, gp)?)?;
        let sign = i64::from(rest_parity.koszul(gp + self.parity));
        let second = self.on_generators(h, g).mul(&rest)?.scale_int(sign);
        first.add(&second)
    }

    /// Hamiltonian field `X_H = {H, ·}`.
    pub fn hamiltonian(&self, h: &GradedPoly) -> Result<Derivation> {
        let coeffs = (0..self.chart.len())
            .map(|g| self.bracket(h, &GradedPoly::gen(&self.chart, g)))
            .collect::<Result<Vec<_>>>()?;
        match h.parity() {
            Some(p) => Derivation::with_parity(&self.chart, coeffs, p + self.parity),
            None => Derivation::new(&self.chart, coeffs),
        }
    }

    /// Graded Jacobi `{a,{b,c}} = {{a,b},c} + (−1)^{(ã+ε)(b̃+ε)}{b,{a,c}}` on all generator triples.
    pub fn jacobi_verdict(&self) -> Result<Verdict> {
        let n = self.chart.len();
        let gens: Vec<GradedPoly> = (0..n).map(|i| GradedPoly::gen(&self.chart, i)).collect();
        let mut v = Verdict::pass();
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    let (ga, gb, gc) = (&gens[a], &gens[b], &gens[c]);
                    let lhs = self.bracket(ga, &self.bracket(gb, gc)?)?;
                    let t1 = self.bracket(&self.bracket(ga, gb)?, gc)?;
                    let pa = self.chart.parity(a) + self.parity;
                    let pb = self.chart.parity(b) + self.parity;
                    let t2 = self.bracket(gb, &self.bracket(ga, gc)?)?.scale_int(i64::from(pa.koszul(pb)));
                    v.push(
                        format!(
                            "jacobi({},{},{})",
                            self.chart.name(a),
                            self.chart.name(b),
                            self.chart.name(c)
                        ),
                        lhs.sub(&t1)?.sub(&t2)?,
                    );
                }
            }
        }
        Ok(v)
    }

    /// `Q{p,q} = {Qp,q} + (−1)^{Q̃(p̃+ε)}{p,Qq}` on all generator pairs.
    pub fn derivation_verdict(&self, q: &Derivation) -> Result<Verdict> {
        if q.chart() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let qp = q.parity().ok_or(Error::InhomogeneousParity)?;
        let n = self.chart.len();
        let mut v = Verdict::pass();
        for a in 0..n {
            for b in a..n {
                let (ga, gb) = (GradedPoly::gen(&self.chart, a), GradedPoly::gen(&self.chart, b));
                let lhs = q.apply(&self.bracket(&ga, &gb)?)?;
                let t1 = self.bracket(&q.apply(&ga)?, &gb)?;
                let sign = qp.koszul(self.chart.parity(a) + self.parity);
                let t2 = self.bracket(&ga, &q.apply(&gb)?)?.scale_int(i64::from(sign));
                v.push(
                    format!("{{{},{}}}", self.chart.name(a), self.chart.name(b)),
                    lhs.sub(&t1)?.sub(&t2)?,
                );
            }
        }
        Ok(v)
    }

    /// Nonzero table entries `(p, q, {p,q})` with `p <= q`.
    pub fn entries(&self) -> Vec<(usize, usize, &GradedPoly)> {
        self.table.iter().filter(|((p, q), _)| p <= q).map(|((p, q), v)| (*p, *q, v)).collect()
    }

    /// Carry the bracket along the linear change `g_i = signs[i]·h_{map[i]}`
    /// onto `target`, which must list the same number of generators.
    pub fn relabel(&self, target: &Chart, map: &[usize], signs: &[i64]) -> Result<BracketTable> {
        if map.len() != self.chart.len() || signs.len() != map.len() {
            return Err(Error::Precondition("relabel needs one target and sign per generator".into()));
        }
        let rename: Vec<Option<usize>> = map.iter().map(|&j| Some(j)).collect();
        let mut diag: Vec<GradedPoly> = (0..target.len()).map(|j| GradedPoly::gen(target, j)).collect();
        for (i, &j) in map.iter().enumerate() {
            diag[j] = diag[j].scale_int(signs[i]);
        }
        let flip = Substitution::new(target, target, diag)?;
        let mut out = BracketTable::new(target, self.parity);
        for ((a, b), v) in &self.table {
            if a <= b {
                let w = flip.apply(&v.rename(target, &rename)?)?;
                out.set(map[*a], map[*b], w.scale_int(signs[*a] * signs[*b]))?;
            }
        }
        Ok(out)
    }

    /// Scale every entry by `c`.
    pub fn scaled(&self, c: i64) -> BracketTable {
        let table = self.table.iter().map(|(k, v)| (*k, v.scale_int(c))).collect();
        BracketTable { chart: self.chart.clone(), parity: self.parity, table }
    }
}
