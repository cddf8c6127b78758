//! Algebra homomorphisms between free graded-commutative algebras, given by
//! the images of generators.

use super::chart::Chart;
use super::poly::GradedPoly;
use crate::error::{Error, Result};

/// Pullback `F*`: each generator of `source` is sent to a polynomial on `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    source: Chart,
    target: Chart,
    images: Vec<GradedPoly>,
}

impl Substitution {
    /// Images must be parity-consistent; on weighted source and target charts with
    /// the same number of directions, weights must agree too.
    pub fn new(source: &Chart, target: &Chart, images: Vec<GradedPoly>) -> Result<Self> {
        if images.len() != source.len() {
            return Err(Error::Precondition(format!(
                "substitution has {} images for {} generators",
                images.len(),
                source.len()
            )));
        }
        for (i, img) in images.iter().enumerate() {
            if img.chart() != target {
                return Err(Error::ChartMismatch);
            }
            if img.is_zero() {
                continue;
            }
            let g = source.gen(i);
            match img.parity() {
                Some(p) if p == g.parity => {}
                _ => {
                    return Err(Error::ParityMismatch(format!("image of {} is {}", g.name, img)));
                }
            }
            if source.directions() > 0 && source.directions() == target.directions() {
                let comps = img.weight_components();
                if comps.keys().any(|w| *w != g.weight) {
                    return Err(Error::WeightMismatch(format!("image of {} is {}", g.name, img)));
                }
            }
        }
        Ok(Substitution { source: source.clone(), target: target.clone(), images })
    }

    /// Build from named assignments; unnamed generators map to their namesake in `target`.
    pub fn from_pairs(source: &Chart, target: &Chart, pairs: &[(&str, GradedPoly)]) -> Result<Self> {
        let mut images: Vec<Option<GradedPoly>> = vec![None; source.len()];
        for (name, img) in pairs {
            images[source.index_of(name)?] = Some(img.clone());
        }
        let images = images
            .into_iter()
            .enumerate()
            .map(|(i, img)| match img {
                Some(p) => Ok(p),
                None => GradedPoly::var(target, source.name(i)),
            })
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(source, target, images)
    }

    pub fn identity(chart: &Chart) -> Self {
        let images = (0..chart.len()).map(|i| GradedPoly::gen(chart, i)).collect();
        Substitution { source: chart.clone(), target: chart.clone(), images }
    }

    /// Rename generators by name, sending those absent from `target` to zero.
    pub fn by_name_or_zero(source: &Chart, target: &Chart) -> Self {
        let images = source
            .gens()
            .iter()
            .map(|g| match target.try_index_of(&g.name) {
                Some(j) => GradedPoly::gen(target, j),
                None => GradedPoly::zero(target),
            })
            .collect();
        Substitution { source: source.clone(), target: target.clone(), images }
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn image(&self, idx: usize) -> &GradedPoly {
        &self.images[idx]
    }

    pub fn images(&self) -> &[GradedPoly] {
        &self.images
    }

    pub fn apply(&self, p: &GradedPoly) -> Result<GradedPoly> {
        if p.chart() != &self.source {
            return Err(Error::ChartMismatch);
        }
        let mut out = GradedPoly::zero(&self.target);
        for (m, c) in p.terms() {
            // Monomials are written in chart order, so multiplying images in that
            // order reproduces every Koszul sign.
            let mut term = GradedPoly::constant(&self.target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&self.images[i])?;
                }
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// `self ∘ other` as pullbacks: first `self`, then `other` (`(G∘F)* = F*∘G*`).
    /// Requires `self.target == other.source`.
    pub fn then(&self, other: &Substitution) -> Result<Substitution> {
        if self.target != other.source {
            return Err(Error::ChartMismatch);
        }
        let images = self.images.iter().map(|p| other.apply(p)).collect::<Result<_>>()?;
        Ok(Substitution { source: self.source.clone(), target: other.target.clone(), images })
    }
}
