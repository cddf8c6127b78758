//! Multiple vector bundles in coordinates: blocks indexed by direction sets,
//! partial parity reversion of functions, maps and fields, multilinear
//! transition laws, faces, and n-fold anti-algebroids.

use std::collections::BTreeMap;

use rand::Rng;

use crate::algebra::linalg;
use crate::algebroid::AlgebroidData;
use crate::algebra::{rat, Chart, DirSet, GradedPoly, Parity, Rational, Role, Substitution};
use crate::error::{Error, Result};
use crate::fields::{check_weight, Derivation};
use crate::verdict::Verdict;

/// Where a block coordinate comes from: its stem letter, its index within the
/// block, and whether it is a dual (lower-index) coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Origin {
    pub stem: String,
    pub index: Option<usize>,
    pub lower: bool,
}

impl Origin {
    pub fn named(name: &str) -> Self {
        Origin { stem: name.to_string(), index: None, lower: false }
    }

    pub fn indexed(stem: &str, index: usize) -> Self {
        Origin { stem: stem.to_string(), index: Some(index), lower: false }
    }

    pub fn dual(&self) -> Self {
        Origin { lower: !self.lower, ..self.clone() }
    }
}

/// How reversed coordinates are named.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Naming {
    /// `{stem}{index}` with `_d` for duals and `_p{dirs}` listing the reversals.
    Generic,
    /// Letters for double bundles: `u,w,z` with reversals `xi, eta, e, th, t, s`.
    Letters,
}

fn letter(stem: &str, lower: bool, flips: &[usize]) -> Option<&'static str> {
    Some(match (stem, lower, flips) {
        ("u", false, []) => "u",
        ("u", false, [_]) => "xi",
        ("u", true, []) => "u_",
        ("u", true, [_]) => "xi_",
        ("w", false, []) => "w",
        ("w", false, [_]) => "eta",
        ("w", true, []) => "w_",
        ("w", true, [_]) => "eta_",
        ("z", false, []) => "z",
        ("z", false, [1]) => "e",
        ("z", false, [2]) => "th",
        ("z", false, [2, 1]) => "t",
        ("z", false, [1, 2]) => "s",
        ("z", true, []) => "z_",
        ("z", true, [_]) => "zeta_",
        _ => return None,
    })
}

fn block_name(naming: Naming, o: &Origin, flips: &[usize]) -> String {
    let idx = o.index.map(|i| i.to_string()).unwrap_or_default();
    if naming == Naming::Letters {
        if let (Some(l), true) = (letter(&o.stem, o.lower, flips), o.index.is_some()) {
            return format!("{l}{idx}");
        }
    }
    let mut s = format!("{}{idx}", o.stem);
    if o.lower {
        s.push_str("_d");
    }
    if !flips.is_empty() {
        s.push_str("_p");
        s.extend(flips.iter().map(|r| r.to_string()));
    }
    s
}

/// A chart of an n-fold vector bundle together with the record of which
/// directions have been parity-reversed, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiChart {
    chart: Chart,
    origins: Vec<Origin>,
    reversals: Vec<usize>,
    naming: Naming,
}

/// One generator before naming: origin, role and parity.
pub type GenSpec = (Origin, Role, Parity);

impl MultiChart {
    /// Assemble from generator specs; block names are derived from the origins
    /// and `reversals`, base and parameter names are the stems.
    pub fn from_parts(
        n: usize,
        specs: Vec<GenSpec>,
        reversals: Vec<usize>,
        naming: Naming,
    ) -> Result<Self> {
        let mut builder = Chart::builder(n);
        let mut by_name = BTreeMap::new();
        for (o, role, parity) in specs {
            let name = match role {
                Role::Block(s) => {
                    let flips: Vec<usize> =
                        reversals.iter().copied().filter(|&r| s.contains(r)).collect();
                    block_name(naming, &o, &flips)
                }
                _ => o.stem.clone(),
            };
            builder = builder.gen(&name, parity, role);
            by_name.insert(name, o);
        }
        let chart = builder.build()?;
        let origins = chart.gens().iter().map(|g| by_name[&g.name].clone()).collect();
        Ok(MultiChart { chart, origins, reversals, naming })
    }

    /// Standard chart: base, parameters, and blocks `(S, stem, parities)` whose
    /// coordinates are named `{stem}{1..}`.
    pub fn standard(
        n: usize,
        base: &[&str],
        params: &[&str],
        blocks: &[(DirSet, &str, Vec<Parity>)],
        naming: Naming,
    ) -> Result<Self> {
        let mut specs: Vec<GenSpec> = Vec::new();
        for b in base {
            specs.push((Origin::named(b), Role::Base, Parity::Even));
        }
        for (s, stem, parities) in blocks {
            for (i, p) in parities.iter().enumerate() {
                specs.push((Origin::indexed(stem, i + 1), Role::Block(*s), *p));
            }
        }
        for p in params {
            specs.push((Origin::named(p), Role::Param, Parity::Even));
        }
        MultiChart::from_parts(n, specs, Vec::new(), naming)
    }

    /// Treat an arbitrary weighted chart as unreversed, keeping its names.
    pub fn from_chart(chart: &Chart) -> Self {
        let origins = chart.gens().iter().map(|g| Origin::named(&g.name)).collect();
        MultiChart { chart: chart.clone(), origins, reversals: Vec::new(), naming: Naming::Generic }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn directions(&self) -> usize {
        self.chart.directions()
    }

    pub fn reversals(&self) -> &[usize] {
        &self.reversals
    }

    pub fn naming(&self) -> Naming {
        self.naming
    }

    pub fn origin(&self, idx: usize) -> &Origin {
        &self.origins[idx]
    }

    pub fn specs(&self) -> Vec<GenSpec> {
        self.chart
            .gens()
            .iter()
            .zip(&self.origins)
            .map(|(g, o)| (o.clone(), g.role, g.parity))
            .collect()
    }

    fn check_direction(&self, r: usize) -> Result<()> {
        if r == 0 || r > self.directions() {
            return Err(Error::Precondition(format!(
                "direction {r} outside 1..={}",
                self.directions()
            )));
        }
        Ok(())
    }

    /// Reverse direction `r` without any swap: either `r` has not been
    /// reversed yet, or it was the last reversal. Returns the new chart and
    /// the index map old → new.
    pub fn reversed(&self, r: usize) -> Result<(MultiChart, Vec<usize>)> {
        self.check_direction(r)?;
        let mut reversals = self.reversals.clone();
        match reversals.iter().position(|&d| d == r) {
            None => reversals.push(r),
            Some(p) if p + 1 == reversals.len() => {
                reversals.pop();
            }
            Some(_) => {
                return Err(Error::Precondition(format!(
                    "direction {r} was not the last one reversed"
                )))
            }
        }
        let specs = self
            .specs()
            .into_iter()
            .map(|(o, role, p)| match role {
                Role::Block(s) if s.contains(r) => (o, role, p.flip()),
                _ => (o, role, p),
            })
            .collect();
        let out = MultiChart::from_parts(self.directions(), specs, reversals, self.naming)?;
        let map = self.index_map(&out);
        Ok((out, map))
    }

    /// Generators matched by origin and role.
    fn index_map(&self, other: &MultiChart) -> Vec<usize> {
        (0..self.chart.len())
            .map(|i| {
                let role = self.chart.gen(i).role;
                (0..other.chart.len())
                    .find(|&j| other.origins[j] == self.origins[i] && other.chart.gen(j).role == role)
                    .expect("charts share generators")
            })
            .collect()
    }

    /// Exchange the last two reversals. Returns the new chart and the
    /// natural isomorphism as a pullback from functions on the new chart to
    /// functions on `self`: `−1` on blocks containing both directions.
    pub fn swapped(&self) -> Result<(MultiChart, Substitution)> {
        let k = self.reversals.len();
        if k < 2 {
            return Err(Error::Precondition("fewer than two reversals to swap".into()));
        }
        let (r, s) = (self.reversals[k - 2], self.reversals[k - 1]);
        let mut reversals = self.reversals.clone();
        reversals.swap(k - 2, k - 1);
        let out = MultiChart::from_parts(self.directions(), self.specs(), reversals, self.naming)?;
        let iso = out.sign_map(self, r, s)?;
        Ok((out, iso))
    }

    fn sign_map(&self, other: &MultiChart, r: usize, s: usize) -> Result<Substitution> {
        let map = self.index_map(other);
        let images = (0..self.chart.len())
            .map(|i| {
                let g = GradedPoly::gen(&other.chart, map[i]);
                match self.chart.gen(i).role {
                    Role::Block(b) if b.contains(r) && b.contains(s) => g.neg(),
                    _ => g,
                }
            })
            .collect();
        Substitution::new(&self.chart, &other.chart, images)
    }

    /// Natural isomorphism between the current chart and the one with the
    /// last two reversals exchanged, as a pullback from `self` to `other`.
    pub fn iso_to(&self, other: &MultiChart) -> Result<Substitution> {
        let k = self.reversals.len();
        if k < 2 || other.reversals.len() != k {
            return Err(Error::Precondition("charts are not related by a swap".into()));
        }
        self.sign_map(other, self.reversals[k - 2], self.reversals[k - 1])
    }

    /// Restrict to the face spanned by `dirs`: blocks not contained in `dirs`
    /// are set to zero. Returns the face chart and the restriction pullback
    /// from functions on `self` to functions on the face.
    pub fn face(&self, dirs: DirSet) -> Result<(MultiChart, Substitution)> {
        let specs: Vec<GenSpec> = self
            .specs()
            .into_iter()
            .filter(|(_, role, _)| match role {
                Role::Block(s) => s.is_subset(dirs),
                _ => true,
            })
            .collect();
        let reversals = self.reversals.iter().copied().filter(|&r| dirs.contains(r)).collect();
        let face = MultiChart::from_parts(self.directions(), specs, reversals, self.naming)?;
        let images = (0..self.chart.len())
            .map(|i| {
                let (o, role) = (&self.origins[i], self.chart.gen(i).role);
                match (0..face.chart.len())
                    .find(|&j| &face.origins[j] == o && face.chart.gen(j).role == role)
                {
                    Some(j) => GradedPoly::gen(&face.chart, j),
                    None => GradedPoly::zero(&face.chart),
                }
            })
            .collect();
        let incl = Substitution::new(&self.chart, &face.chart, images)?;
        Ok((face, incl))
    }
}

/// Rewrite a function from `src` on `dst = Π_r src`: in every term move the
/// direction-`r` coordinate to the left and replace it by its reversed copy.
/// Terms must be at most linear in direction `r`.
pub fn reverse_function(
    p: &GradedPoly,
    src: &MultiChart,
    r: usize,
    dst: &MultiChart,
    map: &[usize],
) -> Result<GradedPoly> {
    let chart = src.chart();
    if p.chart() != chart {
        return Err(Error::ChartMismatch);
    }
    let rename: Vec<Option<usize>> = map.iter().map(|&j| Some(j)).collect();
    let mut out = GradedPoly::zero(dst.chart());
    for (m, c) in p.split_left(&chart.direction_indices(r)) {
        let rest = c.rename(dst.chart(), &rename)?;
        if m.is_one() {
            out = out.add(&rest)?;
            continue;
        }
        if m.degree() != 1 {
            return Err(Error::WeightMismatch(format!(
                "{p} is not linear in direction {r}"
            )));
        }
        let g = m.exponents().iter().position(|&e| e > 0).expect("degree one");
        out = out.add(&GradedPoly::gen(dst.chart(), map[g]).mul(&rest)?)?;
    }
    Ok(out)
}

/// Reverse direction `r` of a field of weight zero in direction `r`. If `r`
/// was reversed earlier but not last, the field is first carried across the
/// natural isomorphisms that bring `r` to the end.
pub fn reverse_field(x: &Derivation, mc: &MultiChart, r: usize) -> Result<(MultiChart, Derivation)> {
    if x.chart() != mc.chart() {
        return Err(Error::ChartMismatch);
    }
    mc.check_direction(r)?;
    let (mc, x) = bring_last(mc, x, r)?;
    let shift = x.weight().ok_or_else(|| Error::WeightMismatch("field is not weight-homogeneous".into()))?;
    if shift[r - 1] != 0 {
        return Err(Error::WeightMismatch(format!(
            "field has weight {} in direction {r}",
            shift[r - 1]
        )));
    }
    let parity = x.parity().ok_or(Error::InhomogeneousParity)?;
    let (out, map) = mc.reversed(r)?;
    let mut coeffs = vec![GradedPoly::zero(out.chart()); out.chart().len()];
    for i in 0..mc.chart().len() {
        let c = x.coeff(i);
        let in_r = matches!(mc.chart().gen(i).role, Role::Block(s) if s.contains(r));
        coeffs[map[i]] = if in_r {
            reverse_function(c, &mc, r, &out, &map)?.scale_int(parity_sign(parity))
        } else {
            c.rename(out.chart(), &map.iter().map(|&j| Some(j)).collect::<Vec<_>>())?
        };
    }
    let y = Derivation::with_parity(out.chart(), coeffs, parity)?;
    Ok((out, y))
}

fn parity_sign(p: Parity) -> i64 {
    if p.is_odd() {
        -1
    } else {
        1
    }
}

/// Move reversal `r` (if present) to the end of the sequence, transporting `x`.
fn bring_last(mc: &MultiChart, x: &Derivation, r: usize) -> Result<(MultiChart, Derivation)> {
    let mut mc = mc.clone();
    let mut x = x.clone();
    while let Some(p) = mc.reversals.iter().position(|&d| d == r) {
        if p + 1 == mc.reversals.len() {
            break;
        }
        let (next, iso) = swap_at(&mc, p)?;
        let inv = mc.sign_map(&next, mc.reversals[p], mc.reversals[p + 1])?;
        x = x.transport(&inv, &iso)?;
        mc = next;
    }
    Ok((mc, x))
}

/// Exchange reversals at positions `p, p+1`.
fn swap_at(mc: &MultiChart, p: usize) -> Result<(MultiChart, Substitution)> {
    let (r, s) = (mc.reversals[p], mc.reversals[p + 1]);
    let mut reversals = mc.reversals.clone();
    reversals.swap(p, p + 1);
    let out = MultiChart::from_parts(mc.directions(), mc.specs(), reversals, mc.naming)?;
    let iso = out.sign_map(mc, r, s)?;
    Ok((out, iso))
}

/// Reverse direction `r` of a bundle map given by its pullback `phi`
/// (functions on `dst_mc` to functions on `src_mc`). No swaps are performed.
pub fn reverse_substitution(
    phi: &Substitution,
    src_mc: &MultiChart,
    dst_mc: &MultiChart,
    r: usize,
) -> Result<(MultiChart, MultiChart, Substitution)> {
    if phi.target() != src_mc.chart() || phi.source() != dst_mc.chart() {
        return Err(Error::ChartMismatch);
    }
    let (src2, smap) = src_mc.reversed(r)?;
    let (dst2, dmap) = dst_mc.reversed(r)?;
    let rename: Vec<Option<usize>> = smap.iter().map(|&j| Some(j)).collect();
    let mut images = vec![GradedPoly::zero(src2.chart()); dst2.chart().len()];
    for i in 0..dst_mc.chart().len() {
        let img = phi.image(i);
        let in_r = matches!(dst_mc.chart().gen(i).role, Role::Block(s) if s.contains(r));
        images[dmap[i]] = if in_r {
            reverse_function(img, src_mc, r, &src2, &smap)?
        } else {
            img.rename(src2.chart(), &rename)?
        };
    }
    let out = Substitution::new(dst2.chart(), src2.chart(), images)?;
    Ok((src2, dst2, out))
}

/// Restrict a field to a face via the restriction pullback `incl`.
pub fn restrict_field(x: &Derivation, face: &MultiChart, incl: &Substitution) -> Result<Derivation> {
    if incl.source() != x.chart() || incl.target() != face.chart() {
        return Err(Error::ChartMismatch);
    }
    let full = x.chart();
    let coeffs = (0..face.chart().len())
        .map(|j| incl.apply(x.coeff(full.index_of(face.chart().name(j))?)))
        .collect::<Result<Vec<_>>>()?;
    Derivation::with_parity(face.chart(), coeffs, x.parity().ok_or(Error::InhomogeneousParity)?)
}

/// All set partitions of `s`, each listed in block order (size, then lexicographic).
pub fn set_partitions(s: DirSet) -> Vec<Vec<DirSet>> {
    fn go(rest: &[usize]) -> Vec<Vec<DirSet>> {
        let Some((&first, others)) = rest.split_first() else {
            return vec![Vec::new()];
        };
        let mut out = Vec::new();
        let k = others.len();
        for mask in 0..(1u32 << k) {
            let mut part = vec![first];
            let mut remaining = Vec::new();
            for (b, &d) in others.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    part.push(d);
                } else {
                    remaining.push(d);
                }
            }
            for mut tail in go(&remaining) {
                tail.push(DirSet::from_dirs(&part));
                out.push(tail);
            }
        }
        out
    }
    go(&s.dirs())
        .into_iter()
        .map(|mut p| {
            p.sort_by_key(|d| d.order_key());
            p
        })
        .collect()
}

/// Index tuple (one local index per part) and target index, with a coefficient.
pub type TensorEntries = BTreeMap<(Vec<usize>, usize), Rational>;

/// A transition function of an n-fold vector bundle with identity base map:
/// `v_S = Σ_P Π_{T ∈ P} v'_T · C_P`, summed over set partitions `P` of `S`.
/// The one-part partition carries the invertible linear block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiTransition {
    chart: MultiChart,
    terms: BTreeMap<Vec<DirSet>, TensorEntries>,
}

impl MultiTransition {
    pub fn identity(chart: &MultiChart) -> Self {
        let mut terms = BTreeMap::new();
        for s in blocks_of(chart.chart()) {
            let dim = chart.chart().block_indices(s).len();
            let entries = (0..dim).map(|i| ((vec![i], i), rat(1))).collect();
            terms.insert(vec![s], entries);
        }
        MultiTransition { chart: chart.clone(), terms }
    }

    pub fn chart(&self) -> &MultiChart {
        &self.chart
    }

    pub fn terms(&self) -> &BTreeMap<Vec<DirSet>, TensorEntries> {
        &self.terms
    }

    /// Set the coefficient of `Π v'_{P_k}^{idx_k}` in `v_S^{target}`.
    pub fn set(&mut self, partition: &[DirSet], idx: &[usize], target: usize, c: Rational) -> Result<()> {
        let chart = self.chart.chart();
        let mut union = 0u32;
        for p in partition {
            if p.0 & union != 0 || p.is_empty() {
                return Err(Error::MalformedTransition("parts must be disjoint and nonempty".into()));
            }
            union |= p.0;
        }
        let mut sorted = partition.to_vec();
        sorted.sort_by_key(|d| d.order_key());
        if sorted != partition || idx.len() != partition.len() {
            return Err(Error::MalformedTransition("parts must be listed in block order".into()));
        }
        let s = DirSet(union);
        let tdim = chart.block_indices(s).len();
        for (p, &i) in partition.iter().zip(idx) {
            if i >= chart.block_indices(*p).len() {
                return Err(Error::MalformedTransition(format!("index {i} outside block {{{p}}}")));
            }
        }
        if target >= tdim {
            return Err(Error::MalformedTransition(format!("index {target} outside block {{{s}}}")));
        }
        let key = (idx.to_vec(), target);
        if c != rat(0) {
            self.terms.entry(partition.to_vec()).or_default().insert(key, c);
        } else if let Some(entries) = self.terms.get_mut(partition) {
            entries.remove(&key);
            if entries.is_empty() {
                self.terms.remove(partition);
            }
        }
        Ok(())
    }

    /// Read a transition back from its pullback. Base and parameter
    /// coordinates must map to themselves; every term of a block image must be
    /// a product of coordinates from disjoint blocks covering that block.
    pub fn from_substitution(chart: &MultiChart, phi: &Substitution) -> Result<Self> {
        let c = chart.chart();
        if phi.source() != c || phi.target() != c {
            return Err(Error::ChartMismatch);
        }
        let mut t = MultiTransition { chart: chart.clone(), terms: BTreeMap::new() };
        for i in 0..c.len() {
            let img = phi.image(i);
            let s = match c.gen(i).role {
                Role::Block(s) => s,
                _ if *img == GradedPoly::gen(c, i) => continue,
                _ => {
                    return Err(Error::MalformedTransition(format!("{} must map to itself", c.name(i))))
                }
            };
            let k = c.block_indices(s).iter().position(|&g| g == i).expect("generator in its block");
            for (m, coeff) in img.terms() {
                let mut factors: Vec<(DirSet, usize, usize)> = Vec::new();
                for (g, &e) in m.exponents().iter().enumerate() {
                    let Role::Block(p) = c.gen(g).role else {
                        if e > 0 {
                            return Err(Error::MalformedTransition(format!(
                                "image of {} involves {}",
                                c.name(i),
                                c.name(g)
                            )));
                        }
                        continue;
                    };
                    let local = c.block_indices(p).iter().position(|&h| h == g).expect("in block");
                    factors.extend(std::iter::repeat_n((p, local, g), usize::from(e)));
                }
                factors.sort_by_key(|f| f.0.order_key());
                let partition: Vec<DirSet> = factors.iter().map(|f| f.0).collect();
                if partition.iter().fold(0, |a, p| a | p.0) != s.0 || factors.is_empty() {
                    return Err(Error::MalformedTransition(format!(
                        "image of {} has a term outside block {{{s}}}",
                        c.name(i)
                    )));
                }
                let idx: Vec<usize> = factors.iter().map(|f| f.1).collect();
                let gens: Vec<usize> = factors.iter().map(|f| f.2).collect();
                let sign = ordered_product(c, &gens)?.coeff(m);
                t.set(&partition, &idx, k, coeff * sign)?;
            }
        }
        Ok(t)
    }

    /// Pullback `φ*` expressing unprimed coordinates through primed ones
    /// (both on the same chart).
    pub fn to_substitution(&self) -> Result<Substitution> {
        let chart = self.chart.chart();
        let mut images: Vec<GradedPoly> = (0..chart.len()).map(|i| GradedPoly::gen(chart, i)).collect();
        for s in blocks_of(chart) {
            for &g in &chart.block_indices(s) {
                images[g] = GradedPoly::zero(chart);
            }
        }
        for (partition, entries) in &self.terms {
            let s = DirSet(partition.iter().fold(0, |a, p| a | p.0));
            let targets = chart.block_indices(s);
            for ((idx, t), c) in entries {
                let factors: Vec<usize> =
                    partition.iter().zip(idx).map(|(p, &i)| chart.block_indices(*p)[i]).collect();
                let term = ordered_product(chart, &factors)?.scale(c);
                images[targets[*t]] = images[targets[*t]].add(&term)?;
            }
        }
        Substitution::new(chart, chart, images)
    }

    /// Pullback of the inverse transition, computed block by block.
    pub fn inverse(&self) -> Result<Substitution> {
        let chart = self.chart.chart();
        let mut images: Vec<GradedPoly> = (0..chart.len()).map(|i| GradedPoly::gen(chart, i)).collect();
        let mut blocks = blocks_of(chart);
        blocks.sort_by_key(|s| s.order_key());
        let psi_partial = |images: &Vec<GradedPoly>| Substitution::new(chart, chart, images.clone());
        for s in blocks {
            let targets = chart.block_indices(s);
            let dim = targets.len();
            let mut lin = vec![vec![rat(0); dim]; dim];
            if let Some(entries) = self.terms.get(&vec![s]) {
                for ((idx, t), c) in entries {
                    lin[idx[0]][*t] = c.clone();
                }
            }
            let inv = linalg::inverse(&lin)?;
            // Nonlinear part expressed in unprimed coordinates via lower blocks.
            let psi = psi_partial(&images)?;
            let mut residual: Vec<GradedPoly> = targets.iter().map(|&g| GradedPoly::gen(chart, g)).collect();
            for (partition, entries) in &self.terms {
                if partition.len() < 2 || partition.iter().fold(0, |a, p| a | p.0) != s.0 {
                    continue;
                }
                for ((idx, t), c) in entries {
                    let factors: Vec<usize> =
                        partition.iter().zip(idx).map(|(p, &i)| chart.block_indices(*p)[i]).collect();
                    let term = psi.apply(&ordered_product(chart, &factors)?)?.scale(c);
                    residual[*t] = residual[*t].sub(&term)?;
                }
            }
            for (k, &g) in targets.iter().enumerate() {
                let mut img = GradedPoly::zero(chart);
                for (j, r) in residual.iter().enumerate() {
                    img = img.add(&r.scale(&inv[j][k]))?;
                }
                images[g] = img;
            }
        }
        Substitution::new(chart, chart, images)
    }

    /// Pass iff the law is well formed and composes with its inverse to the identity.
    pub fn validate(&self) -> Result<Verdict> {
        let phi = self.to_substitution()?;
        let psi = self.inverse()?;
        let both = phi.then(&psi)?;
        let mut v = Verdict::pass();
        let chart = self.chart.chart();
        for i in 0..chart.len() {
            v.push(chart.name(i), both.image(i).sub(&GradedPoly::gen(chart, i))?);
        }
        Ok(v)
    }

    /// Random transition with small integer entries; linear blocks are
    /// unitriangular so that they are always invertible.
    pub fn random<R: Rng>(chart: &MultiChart, rng: &mut R, range: i64) -> Self {
        let mut t = MultiTransition::identity(chart);
        let c = chart.chart();
        for s in blocks_of(c) {
            let dims = c.block_indices(s);
            for partition in set_partitions(s) {
                let sizes: Vec<Vec<usize>> = partition.iter().map(|p| c.block_indices(*p)).collect();
                for idx in index_tuples(&sizes.iter().map(Vec::len).collect::<Vec<_>>()) {
                    let par = partition
                        .iter()
                        .zip(&idx)
                        .fold(Parity::Even, |a, (p, &i)| a + c.parity(c.block_indices(*p)[i]));
                    for (k, &g) in dims.iter().enumerate() {
                        if par != c.parity(g) {
                            continue;
                        }
                        let value = if partition.len() == 1 {
                            match idx[0].cmp(&k) {
                                std::cmp::Ordering::Equal => rat(if rng.gen_bool(0.5) { 1 } else { -1 }),
                                std::cmp::Ordering::Less => rat(rng.gen_range(-range..=range)),
                                std::cmp::Ordering::Greater => rat(0),
                            }
                        } else {
                            rat(rng.gen_range(-range..=range))
                        };
                        t.set(&partition, &idx, k, value).expect("valid entry");
                    }
                }
            }
        }
        t
    }
}

fn blocks_of(chart: &Chart) -> Vec<DirSet> {
    let mut out: Vec<DirSet> = Vec::new();
    for g in chart.gens() {
        if let Role::Block(s) = g.role {
            if !out.contains(&s) {
                out.push(s);
            }
        }
    }
    out
}

fn index_tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    sizes.iter().fold(vec![Vec::new()], |acc, &n| {
        acc.into_iter()
            .flat_map(|prefix| {
                (0..n).map(move |i| {
                    let mut p = prefix.clone();
                    p.push(i);
                    p
                })
            })
            .collect()
    })
}

/// Product of generators in the listed order (signs from reordering included).
fn ordered_product(chart: &Chart, factors: &[usize]) -> Result<GradedPoly> {
    factors
        .iter()
        .try_fold(GradedPoly::one(chart), |acc, &g| acc.mul(&GradedPoly::gen(chart, g)))
}

/// Total space `Π_1…Π_n E` of an n-fold vector bundle with commuting
/// homological fields `Q_r` of weight `e_r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiStructure {
    chart: MultiChart,
    fields: BTreeMap<usize, Derivation>,
}

impl MultiStructure {
    /// `fields[r-1]` is `Q_r`; each must be odd of weight `e_r`.
    pub fn new(chart: &MultiChart, fields: Vec<Derivation>) -> Result<Self> {
        let n = chart.directions();
        if fields.len() != n {
            return Err(Error::Precondition(format!("expected {n} fields, got {}", fields.len())));
        }
        MultiStructure::on_directions(chart, fields.into_iter().enumerate().map(|(i, q)| (i + 1, q)).collect())
    }

    fn on_directions(chart: &MultiChart, fields: BTreeMap<usize, Derivation>) -> Result<Self> {
        let n = chart.directions();
        for (&r, q) in &fields {
            if q.chart() != chart.chart() {
                return Err(Error::ChartMismatch);
            }
            if q.parity() != Some(Parity::Odd) && !q.is_zero() {
                return Err(Error::ParityMismatch(format!("Q{r} must be odd")));
            }
            let expected: Vec<i32> = (1..=n).map(|d| i32::from(d == r)).collect();
            let v = check_weight(q, &expected);
            if !v.passed() {
                return Err(Error::WeightMismatch(format!("Q{r}: {}", v.labels().join(", "))));
            }
        }
        Ok(MultiStructure { chart: chart.clone(), fields })
    }

    pub fn chart(&self) -> &MultiChart {
        &self.chart
    }

    pub fn field(&self, r: usize) -> Option<&Derivation> {
        self.fields.get(&r)
    }

    /// Restriction to the face spanned by `dirs`, keeping `Q_r` for `r ∈ dirs`.
    pub fn face(&self, dirs: DirSet) -> Result<MultiStructure> {
        let (face, incl) = self.chart.face(dirs)?;
        let fields = self
            .fields
            .iter()
            .filter(|(r, _)| dirs.contains(**r))
            .map(|(&r, q)| Ok((r, restrict_field(q, &face, &incl)?)))
            .collect::<Result<_>>()?;
        MultiStructure::on_directions(&face, fields)
    }
}

/// Pass iff `[Q_r, Q_s] = 0` for all `r ≤ s`.
pub fn check_nfold_antialgebroid(m: &MultiStructure) -> Result<Verdict> {
    let mut v = Verdict::pass();
    let chart = m.chart.chart();
    for (&r, qr) in &m.fields {
        for (&s, qs) in m.fields.range(r..) {
            let c = qr.commutator(qs)?;
            for i in 0..chart.len() {
                v.push(format!("[Q{r},Q{s}]({})", chart.name(i)), c.coeff(i).clone());
            }
        }
    }
    Ok(v)
}

/// The n-fold anti-algebroid `Π_n···Π_1(g_1 × ··· × g_n)` of Lie
/// (super)algebras over a point: direction `r` carries `g_r` and `Q_r` is its
/// Chevalley–Eilenberg field.
pub fn product_structure(factors: &[AlgebroidData]) -> Result<MultiStructure> {
    let n = factors.len();
    if !(1..=26).contains(&n) {
        return Err(Error::Precondition("between 1 and 26 factors".into()));
    }
    if factors.iter().any(|f| !f.base().is_empty()) {
        return Err(Error::Precondition("product factors must live over a point".into()));
    }
    let stems: Vec<String> = (0..n).map(|r| char::from(b'a' + r as u8).to_string()).collect();
    let blocks: Vec<(DirSet, &str, Vec<Parity>)> = factors
        .iter()
        .enumerate()
        .map(|(r, f)| {
            let par = f.fibers().iter().map(|&i| f.chart().parity(i).flip()).collect();
            (DirSet::single(r + 1), stems[r].as_str(), par)
        })
        .collect();
    let mut mc = MultiChart::standard(n, &[], &[], &blocks, Naming::Generic)?;
    for r in 1..=n {
        mc = mc.reversed(r)?.0;
    }
    let target = mc.chart().clone();
    let mut fields = Vec::with_capacity(n);
    for (r, f) in factors.iter().enumerate() {
        let q = f.to_field()?;
        let mut map = vec![None; f.chart().len()];
        for (k, &i) in f.fibers().iter().enumerate() {
            let o = Origin::indexed(&stems[r], k + 1);
            map[i] = (0..target.len()).find(|&j| mc.origin(j) == &o);
        }
        let coeffs = (0..target.len())
            .map(|j| match map.iter().position(|&m| m == Some(j)) {
                Some(i) => q.coeff(i).rename(&target, &map),
                None => Ok(GradedPoly::zero(&target)),
            })
            .collect::<Result<_>>()?;
        fields.push(Derivation::with_parity(&target, coeffs, Parity::Odd)?);
    }
    MultiStructure::new(&mc, fields)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Parity::{Even, Odd};
    use rand::SeedableRng;

    fn double(naming: Naming) -> MultiChart {
        MultiChart::standard(
            2,
            &["x"],
            &[],
            &[
                (DirSet::single(1), "u", vec![Even]),
                (DirSet::single(2), "w", vec![Even]),
                (DirSet::from_dirs(&[1, 2]), "z", vec![Even]),
            ],
            naming,
        )
        .unwrap()
    }

    #[test]
    fn letters_follow_reversal_order() {
        let d = double(Naming::Letters);
        let (pb, _) = d.reversed(1).unwrap();
        let names: Vec<&str> = pb.chart().gens().iter().map(|g| g.name.as_str()).collect();
        assert_eq!(names, ["x", "xi1", "w1", "e1"]);
        let (t, _) = d.reversed(2).unwrap().0.reversed(1).unwrap();
        assert!(t.chart().try_index_of("t1").is_some());
        let (s, iso) = t.swapped().unwrap();
        assert!(s.chart().try_index_of("s1").is_some());
        let t1 = t.chart().index_of("t1").unwrap();
        assert_eq!(iso.image(s.chart().index_of("s1").unwrap()), &GradedPoly::gen(t.chart(), t1).neg());
        let g = MultiChart::standard(3, &[], &[], &[(DirSet::from_dirs(&[1, 3]), "v", vec![Odd])], Naming::Generic)
            .unwrap();
        let (g3, _) = g.reversed(3).unwrap();
        assert_eq!(g3.chart().name(0), "v1_p3");
        assert_eq!(g3.chart().parity(0), Even);
    }

    #[test]
    fn set_partitions_of_three() {
        let p = set_partitions(DirSet::from_dirs(&[1, 2, 3]));
        assert_eq!(p.len(), 5);
        assert!(p.contains(&vec![DirSet::single(3), DirSet::from_dirs(&[1, 2])]));
    }

    #[test]
    fn random_transitions_invert() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mc = MultiChart::standard(
            3,
            &["x"],
            &[],
            &[
                (DirSet::single(1), "a", vec![Even, Odd]),
                (DirSet::single(2), "b", vec![Odd]),
                (DirSet::single(3), "c", vec![Even]),
                (DirSet::from_dirs(&[1, 2]), "d", vec![Odd, Even]),
                (DirSet::from_dirs(&[1, 2, 3]), "f", vec![Even]),
            ],
            Naming::Generic,
        )
        .unwrap();
        for _ in 0..5 {
            let t = MultiTransition::random(&mc, &mut rng, 3);
            assert!(t.validate().unwrap().passed());
        }
    }

    #[test]
    fn singular_linear_block_is_rejected() {
        let mc = double(Naming::Generic);
        let mut t = MultiTransition::identity(&mc);
        t.set(&[DirSet::single(1)], &[0], 0, rat(0)).unwrap();
        assert!(matches!(t.validate(), Err(Error::NotInvertible(_))));
        assert!(t.set(&[DirSet::single(2), DirSet::single(1)], &[0, 0], 0, rat(1)).is_err());
    }
}
