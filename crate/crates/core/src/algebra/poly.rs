//! Polynomials in a free graded-commutative algebra over the rationals.
//!
//! A monomial is stored as a dense exponent vector indexed by the chart's
//! generator order; odd generators have exponent 0 or 1. The written product is
//! always `g_0^{e_0} g_1^{e_1} ...` in chart order, so every reordering that
//! happens during arithmetic is paid for with a Koszul sign.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::chart::{Chart, Parity, Weight};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector in chart order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Box<[u16]>);

impl Monomial {
    pub fn one(len: usize) -> Self {
        Monomial(vec![0; len].into_boxed_slice())
    }

    pub fn from_exponents(exps: Vec<u16>) -> Self {
        Monomial(exps.into_boxed_slice())
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| u32::from(e)).sum()
    }

    pub fn parity(&self, chart: &Chart) -> Parity {
        let odd: u32 = self
            .0
            .iter()
            .enumerate()
            .filter(|(i, _)| chart.parity(*i).is_odd())
            .map(|(_, &e)| u32::from(e))
            .sum();
        Parity::from_bit(odd)
    }

    pub fn weight(&self, chart: &Chart) -> Weight {
        let mut w = chart.zero_weight();
        for (i, &e) in self.0.iter().enumerate() {
            if e > 0 {
                for (acc, gw) in w.iter_mut().zip(&chart.gen(i).weight) {
                    *acc += i32::from(e) * gw;
                }
            }
        }
        w
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Product `self * other` in canonical order; `None` if an odd generator repeats.
    /// The returned sign counts transpositions of odd factors.
    pub fn mul(&self, other: &Monomial, chart: &Chart) -> Option<(Monomial, i32)> {
        let mut exps = self.0.to_vec();
        let mut sign = 1;
        // Odd generators of `self` strictly after position j must hop over `other`'s j.
        let mut odd_after = 0u32;
        for j in (0..exps.len()).rev() {
            let odd = chart.parity(j).is_odd();
            if odd && other.0[j] > 0 {
                if self.0[j] > 0 {
                    return None;
                }
                if odd_after % 2 == 1 {
                    sign = -sign;
                }
            }
            if odd && self.0[j] > 0 {
                odd_after += 1;
            }
            exps[j] += other.0[j];
        }
        Some((Monomial(exps.into_boxed_slice()), sign))
    }

    fn with_exponent(&self, idx: usize, e: u16) -> Monomial {
        let mut exps = self.0.to_vec();
        exps[idx] = e;
        Monomial(exps.into_boxed_slice())
    }
}

/// A polynomial on a chart, in canonical form: distinct monomials, nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoly {
    chart: Chart,
    terms: BTreeMap<Monomial, Rational>,
}

impl GradedPoly {
    pub fn zero(chart: &Chart) -> Self {
        GradedPoly { chart: chart.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(chart: &Chart, c: Rational) -> Self {
        let mut p = GradedPoly::zero(chart);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(chart.len()), c);
        }
        p
    }

    pub fn one(chart: &Chart) -> Self {
        GradedPoly::constant(chart, Rational::one())
    }

    pub fn int(chart: &Chart, n: i64) -> Self {
        GradedPoly::constant(chart, rat(n))
    }

    pub fn gen(chart: &Chart, idx: usize) -> Self {
        let mut m = vec![0u16; chart.len()];
        m[idx] = 1;
        let mut p = GradedPoly::zero(chart);
        p.terms.insert(Monomial(m.into_boxed_slice()), Rational::one());
        p
    }

    pub fn var(chart: &Chart, name: &str) -> Result<Self> {
        Ok(GradedPoly::gen(chart, chart.index_of(name)?))
    }

    pub fn from_terms(chart: &Chart, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = GradedPoly::zero(chart);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Ordered product of generator factors with a coefficient, normalized with Koszul signs.
    pub fn normalize(chart: &Chart, factors: &[&str], coeff: Rational) -> Result<Self> {
        let idx: Vec<usize> = factors.iter().map(|n| chart.index_of(n)).collect::<Result<_>>()?;
        Ok(GradedPoly::product_of_indices(chart, &idx, coeff))
    }

    pub fn product_of_indices(chart: &Chart, factors: &[usize], coeff: Rational) -> Self {
        let mut acc = Monomial::one(chart.len());
        let mut sign = 1;
        for &f in factors {
            let mut m = vec![0u16; chart.len()];
            m[f] = 1;
            match acc.mul(&Monomial(m.into_boxed_slice()), chart) {
                Some((next, s)) => {
                    acc = next;
                    sign *= s;
                }
                None => return GradedPoly::zero(chart),
            }
        }
        GradedPoly::from_terms(chart, [(acc, coeff * rat(i64::from(sign)))])
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one(self.chart.len())).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of an exact monomial.
    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn same_chart(&self, other: &GradedPoly) -> Result<()> {
        if self.chart == other.chart {
            Ok(())
        } else {
            Err(Error::ChartMismatch)
        }
    }

    pub fn add(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.same_chart(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedPoly {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero(&self.chart);
        }
        GradedPoly {
            chart: self.chart.clone(),
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> GradedPoly {
        self.scale(&rat(n))
    }

    pub fn mul(&self, other: &GradedPoly) -> Result<GradedPoly> {
        self.same_chart(other)?;
        let mut out = GradedPoly::zero(&self.chart);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, s)) = m1.mul(m2, &self.chart) {
                    let c = c1 * c2;
                    out.add_term(m, if s < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<GradedPoly> {
        let mut acc = GradedPoly::one(&self.chart);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Parity if homogeneous; `None` for zero or mixed polynomials.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity(&self.chart));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    pub fn is_parity_homogeneous(&self) -> bool {
        self.is_zero() || self.parity().is_some()
    }

    pub fn parity_components(&self) -> (GradedPoly, GradedPoly) {
        let mut even = GradedPoly::zero(&self.chart);
        let mut odd = GradedPoly::zero(&self.chart);
        for (m, c) in &self.terms {
            let target = if m.parity(&self.chart).is_odd() { &mut odd } else { &mut even };
            target.terms.insert(m.clone(), c.clone());
        }
        (even, odd)
    }

    /// Weight if homogeneous; `None` for zero or mixed polynomials.
    pub fn weight(&self) -> Option<Weight> {
        let mut it = self.terms.keys().map(|m| m.weight(&self.chart));
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn weight_components(&self) -> BTreeMap<Weight, GradedPoly> {
        let mut out: BTreeMap<Weight, GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.weight(&self.chart))
                .or_insert_with(|| GradedPoly::zero(&self.chart))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Left derivative with respect to generator `idx`.
    pub fn partial(&self, idx: usize) -> GradedPoly {
        let chart = &self.chart;
        let odd = chart.parity(idx).is_odd();
        let mut out = GradedPoly::zero(chart);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut coeff = c * rat(i64::from(e));
            if odd {
                let passed: u32 = (0..idx)
                    .filter(|&j| chart.parity(j).is_odd())
                    .map(|j| u32::from(m.0[j]))
                    .sum();
                if passed % 2 == 1 {
                    coeff = -coeff;
                }
            }
            out.add_term(m.with_exponent(idx, e - 1), coeff);
        }
        out
    }

    pub fn partial_by_name(&self, name: &str) -> Result<GradedPoly> {
        Ok(self.partial(self.chart.index_of(name)?))
    }

    /// Generators occurring in some monomial.
    pub fn support(&self) -> Vec<usize> {
        (0..self.chart.len()).filter(|&i| self.terms.keys().any(|m| m.0[i] > 0)).collect()
    }

    pub fn depends_on(&self, idx: usize) -> bool {
        self.terms.keys().any(|m| m.0[idx] > 0)
    }

    /// Re-express on another chart by a generator index map (`map[i]` = target index of `i`).
    /// Parities along the map must agree on the support.
    pub fn rename(&self, target: &Chart, map: &[Option<usize>]) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero(target);
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| {
                    Error::Precondition(format!("generator {} has no image", self.chart.name(i)))
                })?;
                if self.chart.parity(i) != target.parity(j) {
                    return Err(Error::ParityMismatch(format!(
                        "{} -> {}",
                        self.chart.name(i),
                        target.name(j)
                    )));
                }
                factors.extend(std::iter::repeat_n(j, usize::from(e)));
            }
            let p = GradedPoly::product_of_indices(target, &factors, c.clone());
            for (m2, c2) in p.terms {
                out.add_term(m2, c2);
            }
        }
        Ok(out)
    }

    /// Rename by generator name; every generator in the support must exist in `target`.
    pub fn rename_by_name(&self, target: &Chart) -> Result<GradedPoly> {
        let map: Vec<Option<usize>> =
            self.chart.gens().iter().map(|g| target.try_index_of(&g.name)).collect();
        self.rename(target, &map)
    }

    /// Largest absolute numerator/denominator, for keeping random instances small.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs().max(c.denom().abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Scale so that the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> GradedPoly {
        match self.terms.iter().next_back() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Write as `Σ_m m · c_m` where `m` ranges over monomials in the `selected`
    /// generators (moved to the left) and `c_m` is free of them.
    pub fn split_left(&self, selected: &[usize]) -> BTreeMap<Monomial, GradedPoly> {
        let chart = &self.chart;
        let mut out: BTreeMap<Monomial, GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut left = Monomial::one(chart.len()).0.to_vec();
            let mut right = m.0.to_vec();
            for &s in selected {
                left[s] = m.0[s];
                right[s] = 0;
            }
            let left = Monomial(left.into_boxed_slice());
            let right = Monomial(right.into_boxed_slice());
            let (_, sign) = left.mul(&right, chart).expect("disjoint supports");
            let coeff = if sign < 0 { -c.clone() } else { c.clone() };
            out.entry(left)
                .or_insert_with(|| GradedPoly::zero(chart))
                .add_term(right, coeff);
        }
        out
    }

    pub fn to_string_with_names(&self) -> String {
        self.to_string()
    }

    /// Evaluate the given generators at rational values (must be even).
    pub fn evaluate(&self, values: &HashMap<usize, Rational>) -> GradedPoly {
        let mut out = GradedPoly::zero(&self.chart);
        for (m, c) in &self.terms {
            let mut exps = m.0.to_vec();
            let mut coeff = c.clone();
            for (&i, v) in values {
                let e = exps[i];
                if e > 0 {
                    coeff *= num_traits::pow(v.clone(), usize::from(e));
                    exps[i] = 0;
                }
            }
            out.add_term(Monomial(exps.into_boxed_slice()), coeff);
        }
        out
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Higher total degree first, then reverse lexicographic for readability.
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| b.0.cmp(a.0)));
        for (k, (m, c)) in terms.into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if negative { "-" } else { "+" })?;
            }
            let mut factors = Vec::new();
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(self.chart.name(i).to_string()),
                    _ => factors.push(format!("{}^{}", self.chart.name(i), e)),
                }
            }
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}
