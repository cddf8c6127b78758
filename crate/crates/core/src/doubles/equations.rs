//! Component form of a double Lie algebroid with purely even `D`.
//!
//! `Q_DB` on `Π_B D` and `Q_DA` on `Π_A D` are
//!
//! ```text
//! Q_DB = ξ^i Q_i^a ∂_a + (ξ^i w^α Q_{αi}^β + e^μ Q_μ^β) ∂_{w^β} + ½ ξ^i ξ^j Q_{ji}^k ∂_{ξ^k}
//!        + (½ ξ^i ξ^j w^α Q_{αji}^λ + ξ^i e^μ Q_{μi}^λ) ∂_{e^λ}
//! Q_DA = η^α Q_α^a ∂_a + (η^α u^i Q_{iα}^j + θ^μ Q_μ^j) ∂_{u^j} + ½ η^α η^β Q_{βα}^γ ∂_{η^γ}
//!        + (½ η^α η^β u^i Q_{iβα}^λ + η^α θ^μ Q_{μα}^λ) ∂_{θ^λ}
//! ```
//!
//! and the compatibility conditions are the bilinear systems `anchor1..6`
//! (the anchor maps are algebroid morphisms) and `bialg1..9` (the dual
//! bundles over the core dual form a Lie bialgebroid).

use std::collections::BTreeMap;

use crate::algebra::{ratio, Chart, GradedPoly, Parity, Role};
use crate::error::{Error, Result};
use crate::fields::{check_weight, Derivation};
use crate::verdict::Verdict;

use super::{DoubleCharts, FourFields};

type P = GradedPoly;
type V2 = Vec<Vec<P>>;
type V3 = Vec<Vec<Vec<P>>>;
type V4 = Vec<Vec<Vec<Vec<P>>>>;

/// Coefficients of `Q_DB` and `Q_DA` as functions of the base coordinates
/// (and parameters). Index letters: `a,b` base, `i,j,k,l` side `A`,
/// `α,β,γ,δ,ε` side `B`, `μ,ν,λ` core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleCoeffs {
    pub chart: Chart,
    pub base: Vec<usize>,
    pub na: usize,
    pub nb: usize,
    pub nk: usize,
    /// `Q_i^a`
    pub qi_a: V2,
    /// `Q_{αi}^β`
    pub qai_b: V3,
    /// `Q_μ^β`
    pub qmu_b: V2,
    /// `Q_{ji}^k`
    pub qji_k: V3,
    /// `Q_{αji}^λ`
    pub qaji_l: V4,
    /// `Q_{μi}^λ`
    pub qmui_l: V3,
    /// `Q_α^a`
    pub qa_a: V2,
    /// `Q_{iα}^j`
    pub qia_j: V3,
    /// `Q_μ^j`
    pub qmu_j: V2,
    /// `Q_{βα}^γ`
    pub qba_g: V3,
    /// `Q_{iβα}^λ`
    pub qiba_l: V4,
    /// `Q_{μα}^λ`
    pub qmua_l: V3,
}

fn z2(c: &Chart, a: usize, b: usize) -> V2 {
    vec![vec![P::zero(c); b]; a]
}

fn z3(c: &Chart, a: usize, b: usize, d: usize) -> V3 {
    vec![z2(c, b, d); a]
}

fn z4(c: &Chart, a: usize, b: usize, d: usize, e: usize) -> V4 {
    vec![z3(c, b, d, e); a]
}

/// Chart of the coefficient functions: the base coordinates and parameters of `D`.
pub fn coefficient_chart(charts: &DoubleCharts) -> Result<Chart> {
    let mut b = Chart::builder(2);
    for g in charts.d.chart().gens() {
        if matches!(g.role, Role::Base | Role::Param) {
            b = b.gen(&g.name, g.parity, g.role);
        }
    }
    b.build()
}

impl DoubleCoeffs {
    pub fn zeros(chart: &Chart, na: usize, nb: usize, nk: usize) -> Self {
        let c = chart;
        let nx = chart.base_indices().len();
        DoubleCoeffs {
            chart: chart.clone(),
            base: chart.base_indices(),
            na,
            nb,
            nk,
            qi_a: z2(c, na, nx),
            qai_b: z3(c, nb, na, nb),
            qmu_b: z2(c, nk, nb),
            qji_k: z3(c, na, na, na),
            qaji_l: z4(c, nb, na, na, nk),
            qmui_l: z3(c, nk, na, nk),
            qa_a: z2(c, nb, nx),
            qia_j: z3(c, na, nb, na),
            qmu_j: z2(c, nk, na),
            qba_g: z3(c, nb, nb, nb),
            qiba_l: z4(c, na, nb, nb, nk),
            qmua_l: z3(c, nk, nb, nk),
        }
    }

    /// The same structure with the roles of `A` and `B` exchanged.
    pub fn swap_ab(&self) -> Self {
        DoubleCoeffs {
            chart: self.chart.clone(),
            base: self.base.clone(),
            na: self.nb,
            nb: self.na,
            nk: self.nk,
            qi_a: self.qa_a.clone(),
            qai_b: self.qia_j.clone(),
            qmu_b: self.qmu_j.clone(),
            qji_k: self.qba_g.clone(),
            qaji_l: self.qiba_l.clone(),
            qmui_l: self.qmua_l.clone(),
            qa_a: self.qi_a.clone(),
            qia_j: self.qai_b.clone(),
            qmu_j: self.qmu_b.clone(),
            qba_g: self.qji_k.clone(),
            qiba_l: self.qaji_l.clone(),
            qmua_l: self.qmui_l.clone(),
        }
    }

    /// Read the coefficients off `Q_DB` and `Q_DA` of a purely even `D`.
    pub fn from_fields(f: &FourFields) -> Result<Self> {
        let c = &f.charts;
        if c.d.chart().gens().iter().any(|g| g.parity.is_odd()) {
            return Err(Error::Precondition("component equations need a purely even D".into()));
        }
        for (q, w, name) in [(&f.qdb, [1, 0], "Q_DB"), (&f.qda, [0, 1], "Q_DA")] {
            if !check_weight(q, &w).passed() {
                return Err(Error::WeightMismatch(format!("{name} has the wrong weight")));
            }
        }
        let coef = coefficient_chart(c)?;
        let mut out = DoubleCoeffs::zeros(
            &coef,
            c.d.chart().direction_indices(1).len() - core_len(c),
            c.d.chart().direction_indices(2).len() - core_len(c),
            core_len(c),
        );
        let (pb, pa) = (c.pi_b.chart(), c.pi_a.chart());
        let down = |p: &P| -> Result<P> {
            let map: Vec<Option<usize>> = p.chart().gens().iter().map(|g| coef.try_index_of(&g.name)).collect();
            p.rename(&coef, &map)
        };
        let side = |ch: &Chart, r: usize| ch.block_indices(crate::algebra::DirSet::single(r));
        let core = |ch: &Chart| ch.block_indices(crate::algebra::DirSet::from_dirs(&[1, 2]));
        let base = pb.base_indices();
        // Q_DB on (x, ξ, w, e)
        let (xi, w, e) = (side(pb, 1), side(pb, 2), core(pb));
        let q = &f.qdb;
        for (i, &g) in xi.iter().enumerate() {
            for (a, &x) in base.iter().enumerate() {
                out.qi_a[i][a] = down(&q.coeff(x).partial(g))?;
            }
            for (al, &wa) in w.iter().enumerate() {
                for (be, &wb) in w.iter().enumerate() {
                    out.qai_b[al][i][be] = down(&q.coeff(wb).partial(g).partial(wa))?;
                }
            }
            for (j, &gj) in xi.iter().enumerate() {
                for (k, &gk) in xi.iter().enumerate() {
                    out.qji_k[j][i][k] = down(&q.coeff(gk).partial(g).partial(gj))?;
                }
                for (al, &wa) in w.iter().enumerate() {
                    for (l, &el) in e.iter().enumerate() {
                        out.qaji_l[al][j][i][l] = down(&q.coeff(el).partial(g).partial(gj).partial(wa))?;
                    }
                }
            }
            for (m, &em) in e.iter().enumerate() {
                for (l, &el) in e.iter().enumerate() {
                    out.qmui_l[m][i][l] = down(&q.coeff(el).partial(g).partial(em))?;
                }
            }
        }
        for (m, &em) in e.iter().enumerate() {
            for (be, &wb) in w.iter().enumerate() {
                out.qmu_b[m][be] = down(&q.coeff(wb).partial(em))?;
            }
        }
        // Q_DA on (x, u, η, θ)
        let base = pa.base_indices();
        let (u, eta, th) = (side(pa, 1), side(pa, 2), core(pa));
        let q = &f.qda;
        for (al, &g) in eta.iter().enumerate() {
            for (a, &x) in base.iter().enumerate() {
                out.qa_a[al][a] = down(&q.coeff(x).partial(g))?;
            }
            for (i, &ui) in u.iter().enumerate() {
                for (j, &uj) in u.iter().enumerate() {
                    out.qia_j[i][al][j] = down(&q.coeff(uj).partial(g).partial(ui))?;
                }
            }
            for (be, &gb) in eta.iter().enumerate() {
                for (ga, &gg) in eta.iter().enumerate() {
                    out.qba_g[be][al][ga] = down(&q.coeff(gg).partial(g).partial(gb))?;
                }
                for (i, &ui) in u.iter().enumerate() {
                    for (l, &tl) in th.iter().enumerate() {
                        out.qiba_l[i][be][al][l] = down(&q.coeff(tl).partial(g).partial(gb).partial(ui))?;
                    }
                }
            }
            for (m, &tm) in th.iter().enumerate() {
                for (l, &tl) in th.iter().enumerate() {
                    out.qmua_l[m][al][l] = down(&q.coeff(tl).partial(g).partial(tm))?;
                }
            }
        }
        for (m, &tm) in th.iter().enumerate() {
            for (j, &uj) in u.iter().enumerate() {
                out.qmu_j[m][j] = down(&q.coeff(uj).partial(tm))?;
            }
        }
        Ok(out)
    }

    /// Assemble `Q_DB` and `Q_DA` on the given charts (which must be purely
    /// even with matching block sizes and the same base and parameters).
    pub fn to_fields(&self, charts: &DoubleCharts) -> Result<FourFields> {
        let qdb = self.build(charts.pi_b.chart(), true)?;
        let qda = self.build(charts.pi_a.chart(), false)?;
        FourFields::from_sides(charts, qdb, qda)
    }

    fn build(&self, ch: &Chart, horizontal: bool) -> Result<Derivation> {
        let side = |r: usize| ch.block_indices(crate::algebra::DirSet::single(r));
        let core = ch.block_indices(crate::algebra::DirSet::from_dirs(&[1, 2]));
        // `f` is the reversed side, `v` the other side.
        let (f, v) = if horizontal { (side(1), side(2)) } else { (side(2), side(1)) };
        let (nf, nv) = if horizontal { (self.na, self.nb) } else { (self.nb, self.na) };
        if f.len() != nf || v.len() != nv || core.len() != self.nk {
            return Err(Error::Precondition("block sizes do not match the coefficients".into()));
        }
        let map: Vec<Option<usize>> = self.chart.gens().iter().map(|g| ch.try_index_of(&g.name)).collect();
        let up = |p: &P| p.rename(ch, &map);
        let g = |i: usize| P::gen(ch, i);
        let half = ratio(1, 2);
        let base = ch.base_indices();
        let mut coeffs = vec![P::zero(ch); ch.len()];
        let (anchor, mixed, core_to_v, own, top, core_mix) = if horizontal {
            (&self.qi_a, &self.qai_b, &self.qmu_b, &self.qji_k, &self.qaji_l, &self.qmui_l)
        } else {
            (&self.qa_a, &self.qia_j, &self.qmu_j, &self.qba_g, &self.qiba_l, &self.qmua_l)
        };
        for (i, &fi) in f.iter().enumerate() {
            for (a, &x) in base.iter().enumerate() {
                coeffs[x] = coeffs[x].add(&g(fi).mul(&up(&anchor[i][a])?)?)?;
            }
            for (al, &va) in v.iter().enumerate() {
                for (be, &vb) in v.iter().enumerate() {
                    let t = g(fi).mul(&g(va))?.mul(&up(&mixed[al][i][be])?)?;
                    coeffs[vb] = coeffs[vb].add(&t)?;
                }
            }
            for (j, &fj) in f.iter().enumerate() {
                for (k, &fk) in f.iter().enumerate() {
                    let t = g(fi).mul(&g(fj))?.mul(&up(&own[j][i][k])?)?.scale(&half);
                    coeffs[fk] = coeffs[fk].add(&t)?;
                }
                for (al, &va) in v.iter().enumerate() {
                    for (l, &cl) in core.iter().enumerate() {
                        let t = g(fi).mul(&g(fj))?.mul(&g(va))?.mul(&up(&top[al][j][i][l])?)?.scale(&half);
                        coeffs[cl] = coeffs[cl].add(&t)?;
                    }
                }
            }
            for (m, &cm) in core.iter().enumerate() {
                for (l, &cl) in core.iter().enumerate() {
                    let t = g(fi).mul(&g(cm))?.mul(&up(&core_mix[m][i][l])?)?;
                    coeffs[cl] = coeffs[cl].add(&t)?;
                }
            }
        }
        for (m, &cm) in core.iter().enumerate() {
            for (be, &vb) in v.iter().enumerate() {
                coeffs[vb] = coeffs[vb].add(&g(cm).mul(&up(&core_to_v[m][be])?)?)?;
            }
        }
        Derivation::with_parity(ch, coeffs, Parity::Odd)
    }

    fn d(&self, a: usize, p: &P) -> P {
        p.partial(self.base[a])
    }

    /// The six equations expressing that the anchors are algebroid morphisms.
    pub fn anchor_equations(&self) -> Verdict {
        let mut e = Eqs::new(&self.chart);
        let (na, nb, nk, nx) = (self.na, self.nb, self.nk, self.base.len());
        let (qi_a, qai_b, qmu_b, qji_k) = (&self.qi_a, &self.qai_b, &self.qmu_b, &self.qji_k);
        let (qaji_l, qmui_l, qa_a, qia_j) = (&self.qaji_l, &self.qmui_l, &self.qa_a, &self.qia_j);
        let (qmu_j, qba_g, qiba_l, qmua_l) = (&self.qmu_j, &self.qba_g, &self.qiba_l, &self.qmua_l);
        for mu in 0..nk {
            for a in 0..nx {
                let mut r = e.zero();
                for be in 0..nb {
                    r = e.plus(r, &qmu_b[mu][be], &qa_a[be][a]);
                }
                for j in 0..na {
                    r = e.minus(r, &qmu_j[mu][j], &qi_a[j][a]);
                }
                e.push("anchor1", &[mu, a], r);
            }
        }
        for al in 0..nb {
            for i in 0..na {
                for a in 0..nx {
                    let mut r = e.zero();
                    for be in 0..nb {
                        r = e.plus(r, &qai_b[al][i][be], &qa_a[be][a]);
                    }
                    for b in 0..nx {
                        r = e.plus(r, &qi_a[i][b], &self.d(b, &qa_a[al][a]));
                        r = e.minus(r, &qa_a[al][b], &self.d(b, &qi_a[i][a]));
                    }
                    for j in 0..na {
                        r = e.minus(r, &qia_j[i][al][j], &qi_a[j][a]);
                    }
                    e.push("anchor2", &[al, i, a], r);
                }
            }
        }
        for al in 0..nb {
            for be in 0..nb {
                for i in 0..na {
                    for ga in 0..nb {
                        let mut r = e.zero();
                        for de in 0..nb {
                            r = e.plus(r, &qai_b[al][i][de], &qba_g[be][de][ga]);
                            r = e.minus(r, &qai_b[be][i][de], &qba_g[al][de][ga]);
                            r = e.minus(r, &qba_g[be][al][de], &qai_b[de][i][ga]);
                        }
                        for b in 0..nx {
                            r = e.plus(r, &qi_a[i][b], &self.d(b, &qba_g[be][al][ga]));
                            r = e.minus(r, &qa_a[al][b], &self.d(b, &qai_b[be][i][ga]));
                            r = e.plus(r, &qa_a[be][b], &self.d(b, &qai_b[al][i][ga]));
                        }
                        for j in 0..na {
                            r = e.minus(r, &qia_j[i][al][j], &qai_b[be][j][ga]);
                            r = e.plus(r, &qia_j[i][be][j], &qai_b[al][j][ga]);
                        }
                        for la in 0..nk {
                            r = e.minus(r, &qiba_l[i][be][al][la], &qmu_b[la][ga]);
                        }
                        e.push("anchor3", &[al, be, i, ga], r);
                    }
                }
            }
        }
        for mu in 0..nk {
            for be in 0..nb {
                for ga in 0..nb {
                    let mut r = e.zero();
                    for al in 0..nb {
                        r = e.plus(r, &qmu_b[mu][al], &qba_g[be][al][ga]);
                    }
                    for a in 0..nx {
                        r = e.plus(r, &qa_a[be][a], &self.d(a, &qmu_b[mu][ga]));
                    }
                    for j in 0..na {
                        r = e.minus(r, &qmu_j[mu][j], &qai_b[be][j][ga]);
                    }
                    for la in 0..nk {
                        r = e.plus(r, &qmua_l[mu][be][la], &qmu_b[la][ga]);
                    }
                    e.push("anchor4", &[mu, be, ga], r);
                }
            }
        }
        for al in 0..nb {
            for i in 0..na {
                for j in 0..na {
                    for k in 0..na {
                        let mut r = e.zero();
                        for l in 0..na {
                            r = e.plus(r, &qia_j[i][al][l], &qji_k[j][l][k]);
                            r = e.minus(r, &qia_j[j][al][l], &qji_k[i][l][k]);
                            r = e.minus(r, &qji_k[j][i][l], &qia_j[l][al][k]);
                        }
                        for b in 0..nx {
                            r = e.plus(r, &qa_a[al][b], &self.d(b, &qji_k[j][i][k]));
                            r = e.minus(r, &qi_a[i][b], &self.d(b, &qia_j[j][al][k]));
                            r = e.plus(r, &qi_a[j][b], &self.d(b, &qia_j[i][al][k]));
                        }
                        for be in 0..nb {
                            r = e.minus(r, &qai_b[al][i][be], &qia_j[j][be][k]);
                            r = e.plus(r, &qai_b[al][j][be], &qia_j[i][be][k]);
                        }
                        for la in 0..nk {
                            r = e.minus(r, &qaji_l[al][j][i][la], &qmu_j[la][k]);
                        }
                        e.push("anchor5", &[al, i, j, k], r);
                    }
                }
            }
        }
        for mu in 0..nk {
            for j in 0..na {
                for k in 0..na {
                    let mut r = e.zero();
                    for i in 0..na {
                        r = e.plus(r, &qmu_j[mu][i], &qji_k[j][i][k]);
                    }
                    for a in 0..nx {
                        r = e.plus(r, &qi_a[j][a], &self.d(a, &qmu_j[mu][k]));
                    }
                    for be in 0..nb {
                        r = e.minus(r, &qmu_b[mu][be], &qia_j[j][be][k]);
                    }
                    for la in 0..nk {
                        r = e.plus(r, &qmui_l[mu][j][la], &qmu_j[la][k]);
                    }
                    e.push("anchor6", &[mu, j, k], r);
                }
            }
        }
        e.verdict
    }

    /// The nine equations expressing that `Q_DA*` is a derivation of the
    /// Schouten bracket on `Π_{K*} D^{*B}`.
    pub fn bialg_equations(&self) -> Verdict {
        let mut e = Eqs::new(&self.chart);
        let (na, nb, nk, nx) = (self.na, self.nb, self.nk, self.base.len());
        let (qi_a, qai_b, qmu_b, qji_k) = (&self.qi_a, &self.qai_b, &self.qmu_b, &self.qji_k);
        let (qaji_l, qmui_l, qa_a, qia_j) = (&self.qaji_l, &self.qmui_l, &self.qa_a, &self.qia_j);
        let (qmu_j, qba_g, qiba_l, qmua_l) = (&self.qmu_j, &self.qba_g, &self.qiba_l, &self.qmua_l);
        for mu in 0..nk {
            for a in 0..nx {
                let mut r = e.zero();
                for al in 0..nb {
                    r = e.plus(r, &qa_a[al][a], &qmu_b[mu][al]);
                }
                for i in 0..na {
                    r = e.minus(r, &qmu_j[mu][i], &qi_a[i][a]);
                }
                e.push("bialg1", &[mu, a], r);
            }
        }
        for mu in 0..nk {
            for nu in 0..nk {
                for la in 0..nk {
                    let mut r = e.zero();
                    for i in 0..na {
                        r = e.minus(r, &qmu_j[mu][i], &qmui_l[nu][i][la]);
                        r = e.minus(r, &qmu_j[nu][i], &qmui_l[mu][i][la]);
                    }
                    for al in 0..nb {
                        r = e.plus(r, &qmu_b[mu][al], &qmua_l[nu][al][la]);
                        r = e.plus(r, &qmu_b[nu][al], &qmua_l[mu][al][la]);
                    }
                    e.push("bialg2", &[mu, nu, la], r);
                }
            }
        }
        for al in 0..nb {
            for j in 0..na {
                for a in 0..nx {
                    let mut r = e.zero();
                    for be in 0..nb {
                        r = e.plus(r, &qai_b[al][j][be], &qa_a[be][a]);
                    }
                    for b in 0..nx {
                        r = e.plus(r, &qi_a[j][b], &self.d(b, &qa_a[al][a]));
                        r = e.minus(r, &qa_a[al][b], &self.d(b, &qi_a[j][a]));
                    }
                    for i in 0..na {
                        r = e.minus(r, &qia_j[j][al][i], &qi_a[i][a]);
                    }
                    e.push("bialg3", &[al, j, a], r);
                }
            }
        }
        for mu in 0..nk {
            for j in 0..na {
                for i in 0..na {
                    let mut r = e.zero();
                    for a in 0..nx {
                        r = e.plus(r, &qi_a[j][a], &self.d(a, &qmu_j[mu][i]));
                    }
                    for k in 0..na {
                        r = e.plus(r, &qmu_j[mu][k], &qji_k[j][k][i]);
                    }
                    for al in 0..nb {
                        r = e.minus(r, &qmu_b[mu][al], &qia_j[j][al][i]);
                    }
                    for la in 0..nk {
                        r = e.plus(r, &qmui_l[mu][j][la], &qmu_j[la][i]);
                    }
                    e.push("bialg4", &[mu, j, i], r);
                }
            }
        }
        for mu in 0..nk {
            for be in 0..nb {
                for j in 0..na {
                    for la in 0..nk {
                        let mut r = e.zero();
                        for i in 0..na {
                            r = e.plus(r, &qmu_j[mu][i], &qaji_l[be][j][i][la]);
                            r = e.plus(r, &qmui_l[mu][i][la], &qia_j[j][be][i]);
                        }
                        for al in 0..nb {
                            r = e.minus(r, &qai_b[be][j][al], &qmua_l[mu][al][la]);
                            r = e.minus(r, &qmu_b[mu][al], &qiba_l[j][be][al][la]);
                        }
                        for nu in 0..nk {
                            r = e.plus(r, &qmui_l[nu][j][la], &qmua_l[mu][be][nu]);
                            r = e.minus(r, &qmui_l[mu][j][nu], &qmua_l[nu][be][la]);
                        }
                        for a in 0..nx {
                            r = e.minus(r, &qi_a[j][a], &self.d(a, &qmua_l[mu][be][la]));
                            r = e.plus(r, &qa_a[be][a], &self.d(a, &qmui_l[mu][j][la]));
                        }
                        e.push("bialg5", &[mu, be, j, la], r);
                    }
                }
            }
        }
        for mu in 0..nk {
            for al in 0..nb {
                for ga in 0..nb {
                    let mut r = e.zero();
                    for i in 0..na {
                        r = e.minus(r, &qmu_j[mu][i], &qai_b[al][i][ga]);
                    }
                    for la in 0..nk {
                        r = e.plus(r, &qmu_b[la][ga], &qmua_l[mu][al][la]);
                    }
                    for be in 0..nb {
                        r = e.minus(r, &qmu_b[mu][be], &qba_g[be][al][ga]);
                    }
                    for a in 0..nx {
                        r = e.plus(r, &qa_a[al][a], &self.d(a, &qmu_b[mu][ga]));
                    }
                    e.push("bialg6", &[mu, al, ga], r);
                }
            }
        }
        for i in 0..na {
            for j in 0..na {
                for al in 0..nb {
                    for k in 0..na {
                        let mut r = e.zero();
                        for be in 0..nb {
                            r = e.plus(r, &qai_b[al][j][be], &qia_j[i][be][k]);
                            r = e.minus(r, &qai_b[al][i][be], &qia_j[j][be][k]);
                        }
                        for l in 0..na {
                            r = e.plus(r, &qji_k[j][l][k], &qia_j[i][al][l]);
                            r = e.minus(r, &qji_k[i][l][k], &qia_j[j][al][l]);
                            r = e.plus(r, &qji_k[i][j][l], &qia_j[l][al][k]);
                        }
                        for a in 0..nx {
                            r = e.plus(r, &qi_a[j][a], &self.d(a, &qia_j[i][al][k]));
                            r = e.minus(r, &qi_a[i][a], &self.d(a, &qia_j[j][al][k]));
                            r = e.minus(r, &qa_a[al][a], &self.d(a, &qji_k[i][j][k]));
                        }
                        for mu in 0..nk {
                            r = e.plus(r, &qaji_l[al][i][j][mu], &qmu_j[mu][k]);
                        }
                        e.push("bialg7", &[i, j, al, k], r);
                    }
                }
            }
        }
        for i in 0..na {
            for j in 0..na {
                for al in 0..nb {
                    for be in 0..nb {
                        for la in 0..nk {
                            let mut r = e.zero();
                            for k in 0..na {
                                r = e.plus(r, &qaji_l[al][i][k][la], &qia_j[j][be][k]);
                                r = e.minus(r, &qaji_l[be][i][k][la], &qia_j[j][al][k]);
                                r = e.minus(r, &qaji_l[al][j][k][la], &qia_j[i][be][k]);
                                r = e.plus(r, &qaji_l[be][j][k][la], &qia_j[i][al][k]);
                                r = e.plus(r, &qji_k[i][j][k], &qiba_l[k][be][al][la]);
                            }
                            for ga in 0..nb {
                                r = e.minus(r, &qai_b[al][i][ga], &qiba_l[j][be][ga][la]);
                                r = e.plus(r, &qai_b[be][i][ga], &qiba_l[j][al][ga][la]);
                                r = e.plus(r, &qai_b[al][j][ga], &qiba_l[i][be][ga][la]);
                                r = e.minus(r, &qai_b[be][j][ga], &qiba_l[i][al][ga][la]);
                                r = e.minus(r, &qaji_l[ga][i][j][la], &qba_g[be][al][ga]);
                            }
                            for mu in 0..nk {
                                r = e.plus(r, &qmui_l[mu][i][la], &qiba_l[j][be][al][mu]);
                                r = e.minus(r, &qmui_l[mu][j][la], &qiba_l[i][be][al][mu]);
                                r = e.plus(r, &qmua_l[mu][al][la], &qaji_l[be][i][j][mu]);
                                r = e.minus(r, &qmua_l[mu][be][la], &qaji_l[al][i][j][mu]);
                            }
                            for a in 0..nx {
                                r = e.minus(r, &qi_a[i][a], &self.d(a, &qiba_l[j][be][al][la]));
                                r = e.plus(r, &qi_a[j][a], &self.d(a, &qiba_l[i][be][al][la]));
                                r = e.minus(r, &qa_a[al][a], &self.d(a, &qaji_l[be][i][j][la]));
                                r = e.plus(r, &qa_a[be][a], &self.d(a, &qaji_l[al][i][j][la]));
                            }
                            e.push("bialg8", &[i, j, al, be, la], r);
                        }
                    }
                }
            }
        }
        for al in 0..nb {
            for be in 0..nb {
                for j in 0..na {
                    for ga in 0..nb {
                        let mut r = e.zero();
                        for k in 0..na {
                            r = e.plus(r, &qai_b[be][k][ga], &qia_j[j][al][k]);
                            r = e.minus(r, &qai_b[al][k][ga], &qia_j[j][be][k]);
                        }
                        for la in 0..nk {
                            r = e.plus(r, &qiba_l[j][be][al][la], &qmu_b[la][ga]);
                        }
                        for ep in 0..nb {
                            r = e.minus(r, &qai_b[al][j][ep], &qba_g[be][ep][ga]);
                            r = e.plus(r, &qai_b[be][j][ep], &qba_g[al][ep][ga]);
                            r = e.plus(r, &qba_g[be][al][ep], &qai_b[ep][j][ga]);
                        }
                        for a in 0..nx {
                            r = e.minus(r, &qi_a[j][a], &self.d(a, &qba_g[be][al][ga]));
                            r = e.plus(r, &qa_a[al][a], &self.d(a, &qai_b[be][j][ga]));
                            r = e.minus(r, &qa_a[be][a], &self.d(a, &qai_b[al][j][ga]));
                        }
                        e.push("bialg9", &[al, be, j, ga], r);
                    }
                }
            }
        }
        e.verdict
    }
}

fn core_len(c: &DoubleCharts) -> usize {
    c.d.chart().block_indices(crate::algebra::DirSet::from_dirs(&[1, 2])).len()
}

/// Accumulator for residuals `lhs − rhs` built from products of coefficients.
struct Eqs {
    chart: Chart,
    verdict: Verdict,
}

impl Eqs {
    fn new(chart: &Chart) -> Self {
        Eqs { chart: chart.clone(), verdict: Verdict::pass() }
    }

    fn zero(&self) -> P {
        P::zero(&self.chart)
    }

    fn prod(a: &P, b: &P) -> P {
        a.mul(b).expect("coefficients share one even chart")
    }

    fn plus(&self, r: P, a: &P, b: &P) -> P {
        r.add(&Eqs::prod(a, b)).expect("coefficients share one even chart")
    }

    fn minus(&self, r: P, a: &P, b: &P) -> P {
        r.sub(&Eqs::prod(a, b)).expect("coefficients share one even chart")
    }

    fn push(&mut self, name: &str, idx: &[usize], r: P) {
        let idx: Vec<String> = idx.iter().map(|i| (i + 1).to_string()).collect();
        self.verdict.push(format!("{name}[{}]", idx.join(",")), r);
    }
}

/// Coefficient residuals of a field verdict paired with equation residuals
/// that agree up to a nonzero scalar.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ResidualMatching {
    /// `(component label, equation label)`.
    pub matched: Vec<(String, String)>,
    pub unmatched_components: Vec<String>,
    pub unmatched_equations: Vec<String>,
}

impl ResidualMatching {
    /// Both residual sets coincide up to scalars.
    pub fn is_exact(&self) -> bool {
        self.unmatched_components.is_empty() && self.unmatched_equations.is_empty()
    }
}

/// Split every residual of `fields` (whose labels start with `prefix`) into
/// coefficients of monomials in block coordinates, carry them to the
/// coefficient chart `coef` and match them against the residuals of `equations`.
pub fn match_residuals(fields: &Verdict, prefix: &str, equations: &Verdict, coef: &Chart) -> Result<ResidualMatching> {
    let key = |p: &P| p.monic().to_string();
    let mut eq_keys: BTreeMap<String, Vec<&str>> = BTreeMap::new();
    for r in &equations.residuals {
        if r.value.chart() != coef {
            return Err(Error::ChartMismatch);
        }
        eq_keys.entry(key(&r.value)).or_default().push(&r.label);
    }
    let mut out = ResidualMatching::default();
    let mut hit: BTreeMap<String, bool> = eq_keys.keys().map(|k| (k.clone(), false)).collect();
    for r in fields.residuals.iter().filter(|r| r.label.starts_with(prefix)) {
        let chart = r.value.chart();
        let blocks = chart.indices_where(|g| matches!(g.role, Role::Block(_)));
        for (m, c) in r.value.split_left(&blocks) {
            let mono = P::from_terms(chart, [(m, ratio(1, 1))]);
            let label = format!("{} @ {}", r.label, mono);
            let k = key(&c.rename_by_name(coef)?);
            match eq_keys.get(&k) {
                Some(labels) => {
                    hit.insert(k, true);
                    out.matched.push((label, labels[0].to_string()));
                }
                None => out.unmatched_components.push(label),
            }
        }
    }
    for (k, labels) in &eq_keys {
        if !hit[k] {
            out.unmatched_equations.extend(labels.iter().map(|l| l.to_string()));
        }
    }
    Ok(out)
}
