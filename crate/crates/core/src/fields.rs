//! Super vector fields as derivations of a graded polynomial algebra.

use std::fmt;

use crate::algebra::{Chart, GradedPoly, Parity, Rational, Substitution, Weight};
use crate::error::{Error, Result};
use crate::verdict::Verdict;

/// A derivation `X = Σ_g c_g ∂_g`, stored by its values `c_g = X(g)` on generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    chart: Chart,
    coeffs: Vec<GradedPoly>,
    parity: Option<Parity>,
}

impl Derivation {
    /// Parity is inferred; `None` when the coefficients mix parities. A zero field
    /// is recorded as even until [`Derivation::with_parity`] says otherwise.
    pub fn new(chart: &Chart, coeffs: Vec<GradedPoly>) -> Result<Self> {
        if coeffs.len() != chart.len() {
            return Err(Error::Precondition(format!(
                "field has {} coefficients for {} generators",
                coeffs.len(),
                chart.len()
            )));
        }
        if coeffs.iter().any(|c| c.chart() != chart) {
            return Err(Error::ChartMismatch);
        }
        let parity = infer_parity(chart, &coeffs);
        Ok(Derivation { chart: chart.clone(), coeffs, parity })
    }

    /// Like [`Derivation::new`] but insists on the given parity.
    pub fn with_parity(chart: &Chart, coeffs: Vec<GradedPoly>, parity: Parity) -> Result<Self> {
        let mut d = Derivation::new(chart, coeffs)?;
        if d.is_zero() {
            d.parity = Some(parity);
        }
        if d.parity != Some(parity) {
            return Err(Error::InhomogeneousParity);
        }
        Ok(d)
    }

    pub fn zero(chart: &Chart, parity: Parity) -> Self {
        Derivation {
            chart: chart.clone(),
            coeffs: vec![GradedPoly::zero(chart); chart.len()],
            parity: Some(parity),
        }
    }

    /// Build from `(generator name, coefficient)` pairs; the rest are zero.
    pub fn from_pairs(chart: &Chart, pairs: &[(&str, GradedPoly)]) -> Result<Self> {
        let mut coeffs = vec![GradedPoly::zero(chart); chart.len()];
        for (name, c) in pairs {
            let i = chart.index_of(name)?;
            coeffs[i] = coeffs[i].add(c)?;
        }
        Derivation::new(chart, coeffs)
    }

    /// `∂_g` for a single generator.
    pub fn partial(chart: &Chart, idx: usize) -> Self {
        let mut coeffs = vec![GradedPoly::zero(chart); chart.len()];
        coeffs[idx] = GradedPoly::one(chart);
        Derivation { chart: chart.clone(), coeffs, parity: Some(chart.parity(idx)) }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coeff(&self, idx: usize) -> &GradedPoly {
        &self.coeffs[idx]
    }

    pub fn coeff_by_name(&self, name: &str) -> Result<&GradedPoly> {
        Ok(&self.coeffs[self.chart.index_of(name)?])
    }

    pub fn coeffs(&self) -> &[GradedPoly] {
        &self.coeffs
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    fn homogeneous_parity(&self) -> Result<Parity> {
        self.parity.ok_or(Error::InhomogeneousParity)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(GradedPoly::is_zero)
    }

    /// Weight if every nonzero coefficient shifts its generator's weight by the same amount.
    pub fn weight(&self) -> Option<Weight> {
        let mut found: Option<Weight> = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            for w in c.weight_components().keys() {
                let shift: Weight =
                    w.iter().zip(&self.chart.gen(i).weight).map(|(a, b)| a - b).collect();
                match &found {
                    None => found = Some(shift),
                    Some(f) if *f == shift => {}
                    Some(_) => return None,
                }
            }
        }
        Some(found.unwrap_or_else(|| self.chart.zero_weight()))
    }

    /// `X(p) = Σ_g c_g ∂_g p`.
    pub fn apply(&self, p: &GradedPoly) -> Result<GradedPoly> {
        if p.chart() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let mut out = GradedPoly::zero(&self.chart);
        for idx in p.support() {
            let c = &self.coeffs[idx];
            if c.is_zero() {
                continue;
            }
            out = out.add(&c.mul(&p.partial(idx))?)?;
        }
        Ok(out)
    }

    /// `[X,Y] = X∘Y − (−1)^{X̃Ỹ} Y∘X`.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        let (px, py) = (self.homogeneous_parity()?, other.homogeneous_parity()?);
        let sign = px.koszul(py);
        let mut coeffs = Vec::with_capacity(self.chart.len());
        for i in 0..self.chart.len() {
            let xy = self.apply(&other.coeffs[i])?;
            let yx = other.apply(&self.coeffs[i])?;
            coeffs.push(if sign > 0 { xy.sub(&yx)? } else { xy.add(&yx)? });
        }
        Derivation::with_parity(&self.chart, coeffs, px + py)
    }

    pub fn add(&self, other: &Derivation) -> Result<Derivation> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        let mut d = Derivation::new(&self.chart, coeffs)?;
        if d.is_zero() && self.parity == other.parity {
            d.parity = self.parity;
        }
        Ok(d)
    }

    pub fn sub(&self, other: &Derivation) -> Result<Derivation> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Derivation {
        self.scale(&-Rational::from_integer(1.into()))
    }

    pub fn scale(&self, c: &Rational) -> Derivation {
        Derivation {
            chart: self.chart.clone(),
            coeffs: self.coeffs.iter().map(|p| p.scale(c)).collect(),
            parity: self.parity,
        }
    }

    /// Left multiplication by a function: `(fX)(g) = f·X(g)`.
    pub fn left_mul(&self, f: &GradedPoly) -> Result<Derivation> {
        let coeffs = self.coeffs.iter().map(|c| f.mul(c)).collect::<Result<_>>()?;
        let mut d = Derivation::new(&self.chart, coeffs)?;
        if d.is_zero() {
            if let (Some(pf), Some(px)) = (f.parity(), self.parity) {
                d.parity = Some(pf + px);
            }
        }
        Ok(d)
    }

    /// Per-generator residuals of `Q∘Q`; these vanish iff `[Q,Q] = 0` for odd `Q`.
    pub fn square_residuals(&self) -> Result<Verdict> {
        let mut v = Verdict::pass();
        for (i, c) in self.coeffs.iter().enumerate() {
            v.push(self.chart.name(i), self.apply(c)?);
        }
        Ok(v)
    }

    /// Re-express the field on another chart related by an invertible change of
    /// coordinates. `phi` pulls functions from `self.chart` back to `target`,
    /// `psi` is its inverse. Then `Y(g) = φ*(X(ψ*(g)))`.
    pub fn transport(&self, phi: &Substitution, psi: &Substitution) -> Result<Derivation> {
        if phi.source() != &self.chart || psi.target() != &self.chart {
            return Err(Error::ChartMismatch);
        }
        let target = phi.target();
        let coeffs = (0..target.len())
            .map(|i| phi.apply(&self.apply(psi.image(i))?))
            .collect::<Result<_>>()?;
        let mut d = Derivation::new(target, coeffs)?;
        if d.is_zero() {
            d.parity = self.parity;
        }
        Ok(d)
    }

    /// Copy onto a chart with the same generator names, dropping nothing.
    pub fn rename_by_name(&self, target: &Chart) -> Result<Derivation> {
        let mut coeffs = vec![GradedPoly::zero(target); target.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = target.index_of(self.chart.name(i))?;
            coeffs[j] = c.rename_by_name(target)?;
        }
        let mut d = Derivation::new(target, coeffs)?;
        if d.is_zero() {
            d.parity = self.parity;
        }
        Ok(d)
    }
}

fn infer_parity(chart: &Chart, coeffs: &[GradedPoly]) -> Option<Parity> {
    let mut found: Option<Parity> = None;
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let p = c.parity()? + chart.parity(i);
        match found {
            None => found = Some(p),
            Some(f) if f == p => {}
            Some(_) => return None,
        }
    }
    Some(found.unwrap_or(Parity::Even))
}

/// True iff `q` is odd and `[Q,Q] = 0`.
pub fn is_homological(q: &Derivation) -> bool {
    q.parity() == Some(Parity::Odd) && q.square_residuals().map(|v| v.passed()).unwrap_or(false)
}

/// Odd-and-squares-to-zero as a verdict; a parity failure is reported on label `parity`.
pub fn homological_verdict(q: &Derivation) -> Verdict {
    let mut v = match q.square_residuals() {
        Ok(v) => v,
        Err(_) => Verdict::pass(),
    };
    if q.parity() != Some(Parity::Odd) {
        let witness = q.coeffs().iter().find(|c| !c.is_zero()).cloned();
        v.push("parity", witness.unwrap_or_else(|| GradedPoly::one(q.chart())));
    }
    v
}

/// Pass iff every coefficient `c_g` is weight-homogeneous of weight `weight(g) + expected`.
pub fn check_weight(x: &Derivation, expected: &[i32]) -> Verdict {
    let mut v = Verdict::pass();
    for (i, c) in x.coeffs().iter().enumerate() {
        let g = x.chart().gen(i);
        let want: Weight = g.weight.iter().zip(expected).map(|(a, b)| a + b).collect();
        for (w, comp) in c.weight_components() {
            if w != want {
                v.push(format!("weight {}", g.name), comp);
            }
        }
    }
    v
}

/// `X` (on `F.target`) and `Y` (on `F.source`) are `F`-related iff
/// `F*(Y(g)) = X(F*(g))` for every generator `g` of `Y`'s chart.
pub fn related(f: &Substitution, x: &Derivation, y: &Derivation) -> Result<Verdict> {
    if f.source() != y.chart() || f.target() != x.chart() {
        return Err(Error::ChartMismatch);
    }
    let mut v = Verdict::pass();
    for i in 0..y.chart().len() {
        let lhs = f.apply(y.coeff(i))?;
        let rhs = x.apply(f.image(i))?;
        v.push(y.chart().name(i), lhs.sub(&rhs)?);
    }
    Ok(v)
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*d/d{}", self.chart.name(i))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
