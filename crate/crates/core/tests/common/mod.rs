//! Oracles and generators shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use qdouble::algebra::{rat, Chart, DirSet, GradedPoly, Monomial, Parity, Substitution};
use qdouble::algebroid::{dotted, tangent_prolongation, AlgebroidData, Section};
use qdouble::is_homological;
use qdouble::multifold::{reverse_substitution, MultiChart, Naming};
use qdouble::Derivation;
use rand::Rng;
use std::sync::OnceLock;

// Kernel laws.

pub fn chart() -> &'static Chart {
    static C: OnceLock<Chart> = OnceLock::new();
    C.get_or_init(|| {
        Chart::plain(&[
            ("x", Parity::Even),
            ("y", Parity::Even),
            ("a", Parity::Odd),
            ("b", Parity::Odd),
            ("c", Parity::Odd),
        ])
        .unwrap()
    })
}

fn term() -> impl Strategy<Value = (Monomial, i64)> {
    (0u16..=2, 0u16..=1, 0u16..=1, 0u16..=1, 0u16..=1, -4i64..=4)
        .prop_map(|(x, y, a, b, c, k)| (Monomial::from_exponents(vec![x, y, a, b, c]), k))
}

pub fn poly() -> impl Strategy<Value = GradedPoly> {
    prop::collection::vec(term(), 0..5)
        .prop_map(|ts| GradedPoly::from_terms(chart(), ts.into_iter().map(|(m, k)| (m, rat(k)))))
}

pub fn part(p: &GradedPoly, parity: Parity) -> GradedPoly {
    let (even, odd) = p.parity_components();
    if parity.is_odd() {
        odd
    } else {
        even
    }
}

pub fn parity() -> impl Strategy<Value = Parity> {
    any::<bool>().prop_map(|b| if b { Parity::Odd } else { Parity::Even })
}

pub fn homogeneous() -> impl Strategy<Value = (GradedPoly, Parity)> {
    (poly(), parity()).prop_map(|(p, s)| (part(&p, s), s))
}

pub fn derivation_of(s: Parity) -> impl Strategy<Value = Derivation> {
    prop::collection::vec(poly(), 5).prop_map(move |cs| {
        let c = chart();
        let coeffs = cs.iter().enumerate().map(|(g, p)| part(p, s + c.parity(g))).collect();
        Derivation::with_parity(c, coeffs, s).unwrap()
    })
}

pub fn derivation() -> impl Strategy<Value = Derivation> {
    parity().prop_flat_map(derivation_of)
}

fn sign(p: Parity, q: Parity) -> i64 {
    i64::from(p.koszul(q))
}

pub type Law = Result<(), TestCaseError>;

pub fn graded_commutativity((p, sp): (GradedPoly, Parity), (q, sq): (GradedPoly, Parity)) -> Law {
    prop_assert_eq!(p.mul(&q).unwrap(), q.mul(&p).unwrap().scale_int(sign(sp, sq)));
    Ok(())
}

pub fn odd_square_vanishes(p: GradedPoly) -> Law {
    let odd = part(&p, Parity::Odd);
    prop_assert!(odd.mul(&odd).unwrap().is_zero());
    Ok(())
}

pub fn ring_axioms(p: GradedPoly, q: GradedPoly, r: GradedPoly) -> Law {
    let pq = p.mul(&q).unwrap();
    prop_assert_eq!(pq.mul(&r).unwrap(), p.mul(&q.mul(&r).unwrap()).unwrap());
    let lhs = p.mul(&q.add(&r).unwrap()).unwrap();
    prop_assert_eq!(lhs, pq.add(&p.mul(&r).unwrap()).unwrap());
    prop_assert!(p.add(&p.neg()).unwrap().is_zero());
    Ok(())
}

pub fn components_sum_back(p: GradedPoly) -> Law {
    let (even, odd) = p.parity_components();
    prop_assert_eq!(even.add(&odd).unwrap(), p.clone());
    let mut total = GradedPoly::zero(chart());
    for c in p.weight_components().values() {
        total = total.add(c).unwrap();
    }
    prop_assert_eq!(total, p);
    Ok(())
}

pub fn partial_leibniz((p, sp): (GradedPoly, Parity), q: GradedPoly, g: usize) -> Law {
    let sg = chart().parity(g);
    let lhs = p.mul(&q).unwrap().partial(g);
    let rhs = p.partial(g).mul(&q).unwrap().add(&p.mul(&q.partial(g)).unwrap().scale_int(sign(sg, sp))).unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn partials_supercommute(p: GradedPoly, g: usize, h: usize) -> Law {
    let s = sign(chart().parity(g), chart().parity(h));
    prop_assert_eq!(p.partial(h).partial(g), p.partial(g).partial(h).scale_int(s));
    Ok(())
}

pub fn derivation_leibniz(x: Derivation, (p, sp): (GradedPoly, Parity), q: GradedPoly) -> Law {
    let sx = x.parity().unwrap();
    let lhs = x.apply(&p.mul(&q).unwrap()).unwrap();
    let rhs = x
        .apply(&p)
        .unwrap()
        .mul(&q)
        .unwrap()
        .add(&p.mul(&x.apply(&q).unwrap()).unwrap().scale_int(sign(sx, sp)))
        .unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn commutator_antisymmetry(x: Derivation, y: Derivation) -> Law {
    let s = sign(x.parity().unwrap(), y.parity().unwrap());
    prop_assert_eq!(x.commutator(&y).unwrap(), y.commutator(&x).unwrap().scale(&rat(-s)));
    Ok(())
}

pub fn commutator_jacobi(x: Derivation, y: Derivation, z: Derivation) -> Law {
    let s = sign(x.parity().unwrap(), y.parity().unwrap());
    let lhs = x.commutator(&y.commutator(&z).unwrap()).unwrap();
    let rhs = x
        .commutator(&y)
        .unwrap()
        .commutator(&z)
        .unwrap()
        .add(&y.commutator(&x.commutator(&z).unwrap()).unwrap().scale(&rat(s)))
        .unwrap();
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn commutator_action(x: Derivation, y: Derivation, p: GradedPoly) -> Law {
    let s = sign(x.parity().unwrap(), y.parity().unwrap());
    let lhs = x.commutator(&y).unwrap().apply(&p).unwrap();
    let xy = x.apply(&y.apply(&p).unwrap()).unwrap();
    let yx = y.apply(&x.apply(&p).unwrap()).unwrap();
    prop_assert_eq!(lhs, xy.sub(&yx.scale_int(s)).unwrap());
    Ok(())
}

pub fn odd_self_commutator(x: Derivation, p: GradedPoly) -> Law {
    let sq = x.commutator(&x).unwrap().apply(&p).unwrap();
    prop_assert_eq!(sq, x.apply(&x.apply(&p).unwrap()).unwrap().scale_int(2));
    Ok(())
}

// Lie algebroids given by anchor and bracket.

/// Anchor `ρ_i = rho[i] ∂_x` and bracket `[e_i,e_j] = Σ_k c[i][j][k] e_k`, all
/// coefficients polynomials in the base coordinate.
pub struct Data {
    pub chart: Chart,
    pub base: bool,
    pub rho: Vec<GradedPoly>,
    pub c: Vec<Vec<Vec<GradedPoly>>>,
}

fn small_linear<R: Rng>(chart: &Chart, base: bool, rng: &mut R) -> GradedPoly {
    if rng.gen_bool(0.55) {
        return GradedPoly::zero(chart);
    }
    let p = GradedPoly::int(chart, rng.gen_range(-2..=2));
    if base && rng.gen_bool(0.5) {
        let x = GradedPoly::var(chart, "x").unwrap();
        p.add(&x.scale_int(rng.gen_range(-1..=1))).unwrap()
    } else {
        p
    }
}

/// Fibre dimension at most 3, base a point or a line, coefficients of degree at most 1.
pub fn random_data<R: Rng>(rng: &mut R) -> Data {
    let base = rng.gen_bool(0.5);
    let rank = rng.gen_range(1..=3);
    let mut b = Chart::builder(1);
    if base {
        b = b.base("x");
    }
    for i in 1..=rank {
        b = b.fiber(&format!("xi{i}"), Parity::Odd, 1);
    }
    let chart = b.build().unwrap();
    let rho = (0..rank)
        .map(|_| if base { small_linear(&chart, base, rng) } else { GradedPoly::zero(&chart) })
        .collect();
    let mut c = vec![vec![vec![GradedPoly::zero(&chart); rank]; rank]; rank];
    for i in 0..rank {
        for j in i + 1..rank {
            for k in 0..rank {
                let v = small_linear(&chart, base, rng);
                c[j][i][k] = v.neg();
                c[i][j][k] = v;
            }
        }
    }
    Data { chart, base, rho, c }
}

impl Data {
    pub fn rank(&self) -> usize {
        self.rho.len()
    }

    pub fn algebroid(&self) -> AlgebroidData {
        let base: Vec<usize> = if self.base { vec![self.chart.index_of("x").unwrap()] } else { Vec::new() };
        let fibers: Vec<usize> = (1..=self.rank()).map(|i| self.chart.index_of(&format!("xi{i}")).unwrap()).collect();
        let anchor = self.rho.iter().map(|r| if self.base { vec![r.clone()] } else { Vec::new() }).collect();
        AlgebroidData::from_anchor_bracket(&self.chart, &base, &fibers, anchor, &self.c).unwrap()
    }

    fn apply_anchor(&self, i: usize, f: &GradedPoly) -> GradedPoly {
        if self.base {
            self.rho[i].mul(&f.partial_by_name("x").unwrap()).unwrap()
        } else {
            GradedPoly::zero(&self.chart)
        }
    }

    /// `[u,v]^k = u^i v^j c_ij^k + u^i ρ_i(v^k) − v^j ρ_j(u^k)` for even sections.
    pub fn bracket(&self, u: &[GradedPoly], v: &[GradedPoly]) -> Vec<GradedPoly> {
        let r = self.rank();
        (0..r)
            .map(|k| {
                let mut out = GradedPoly::zero(&self.chart);
                for i in 0..r {
                    for j in 0..r {
                        out = out.add(&u[i].mul(&v[j]).unwrap().mul(&self.c[i][j][k]).unwrap()).unwrap();
                    }
                    out = out.add(&u[i].mul(&self.apply_anchor(i, &v[k])).unwrap()).unwrap();
                    out = out.sub(&v[i].mul(&self.apply_anchor(i, &u[k])).unwrap()).unwrap();
                }
                out
            })
            .collect()
    }

    /// Jacobi on all triples `(f e_i, e_j, e_k)` with `f ∈ {1, x}`.
    pub fn jacobi(&self) -> bool {
        let r = self.rank();
        let frame = |i: usize, f: &GradedPoly| -> Vec<GradedPoly> {
            (0..r).map(|k| if k == i { f.clone() } else { GradedPoly::zero(&self.chart) }).collect()
        };
        let mut factors = vec![GradedPoly::one(&self.chart)];
        if self.base {
            factors.push(GradedPoly::var(&self.chart, "x").unwrap());
        }
        let one = GradedPoly::one(&self.chart);
        for f in &factors {
            for i in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        let (u, v, w) = (frame(i, f), frame(j, &one), frame(k, &one));
                        let t1 = self.bracket(&u, &self.bracket(&v, &w));
                        let t2 = self.bracket(&v, &self.bracket(&w, &u));
                        let t3 = self.bracket(&w, &self.bracket(&u, &v));
                        if (0..r).any(|m| !t1[m].add(&t2[m]).unwrap().add(&t3[m]).unwrap().is_zero()) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// The anchor and bracket read back from `Q` through derived brackets.
pub fn reconstruct(data: &AlgebroidData, base: bool) -> Data {
    let chart = data.chart().clone();
    let r = data.rank();
    let frame = |i: usize| Section::frame(&chart, data, i);
    let rho = (0..r)
        .map(|i| {
            if base {
                data.derived_anchor(&frame(i), &GradedPoly::var(&chart, "x").unwrap()).unwrap()
            } else {
                GradedPoly::zero(&chart)
            }
        })
        .collect();
    let c = (0..r).map(|i| (0..r).map(|j| data.frame_bracket(i, j).unwrap()).collect()).collect();
    Data { chart, base, rho, c }
}

fn ensure(ok: bool, what: &str) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

/// The prolongation of the field `q` of `d` is homological and its frame
/// `ē_i`, `e̊_i` has the brackets and anchors of the tangent algebroid.
pub fn check_prolongation(d: &Data, q: &Derivation) -> Result<(), String> {
    let qh = tangent_prolongation(q).unwrap();
    ensure(is_homological(&qh), "prolonged field is not homological")?;
    let t = qh.chart().clone();
    let r = d.rank();
    let names: Vec<String> = (1..=r).map(|i| format!("xi{i}")).collect();
    let fibers: Vec<usize> = names
        .iter()
        .map(|n| t.index_of(n).unwrap())
        .chain(names.iter().map(|n| t.index_of(&dotted(n)).unwrap()))
        .collect();
    let base: Vec<usize> = if d.base { vec![t.index_of("x").unwrap(), t.index_of("x_dot").unwrap()] } else { Vec::new() };
    let hat = AlgebroidData::from_field(&qh, &base, &fibers).unwrap();
    let lift = |p: &GradedPoly| p.rename_by_name(&t).unwrap();
    // The dot of a base function: ẋ ∂_x.
    let dot = |p: &GradedPoly| -> GradedPoly {
        if d.base {
            GradedPoly::var(&t, "x_dot").unwrap().mul(&lift(&p.partial_by_name("x").unwrap())).unwrap()
        } else {
            GradedPoly::zero(&t)
        }
    };
    let zero = GradedPoly::zero(&t);
    for i in 0..r {
        for j in 0..r {
            // [ē_i, ē_j] = c_ij^k ē_k + ċ_ij^k e̊_k
            let b = hat.frame_bracket(i, j).unwrap();
            for k in 0..r {
                ensure(b[k] == lift(&d.c[i][j][k]), "frame relation")?;
                ensure(b[r + k] == dot(&d.c[i][j][k]), "frame relation")?;
            }
            // [ē_i, e̊_j] = c_ij^k e̊_k, [e̊_i, e̊_j] = 0
            let b = hat.frame_bracket(i, r + j).unwrap();
            for k in 0..r {
                ensure(b[k] == zero, "frame relation")?;
                ensure(b[r + k] == lift(&d.c[i][j][k]), "frame relation")?;
            }
            ensure(hat.frame_bracket(r + i, r + j).unwrap().iter().all(GradedPoly::is_zero), "frame relation")?;
        }
        if d.base {
            let x = GradedPoly::var(&t, "x").unwrap();
            let xd = GradedPoly::var(&t, "x_dot").unwrap();
            let bar = Section::frame(&t, &hat, i);
            let ring = Section::frame(&t, &hat, r + i);
            ensure(hat.derived_anchor(&bar, &x).unwrap() == lift(&d.rho[i]), "frame relation")?;
            ensure(hat.derived_anchor(&bar, &xd).unwrap() == dot(&d.rho[i]), "frame relation")?;
            ensure(hat.derived_anchor(&ring, &x).unwrap() == zero, "frame relation")?;
            ensure(hat.derived_anchor(&ring, &xd).unwrap() == lift(&d.rho[i]), "frame relation")?;
        }
    }
    Ok(())
}

// Lie bialgebras by structure constants.

pub type Consts = Vec<Vec<Vec<i64>>>;

pub fn zeros(n: usize) -> Consts {
    vec![vec![vec![0; n]; n]; n]
}

/// Structure constants from `[e_i,e_j] = Σ c e_k` entries with `i < j`.
pub fn consts(n: usize, entries: &[(usize, usize, usize, i64)]) -> Consts {
    let mut c = zeros(n);
    for &(i, j, k, v) in entries {
        c[i][j][k] += v;
        c[j][i][k] -= v;
    }
    c
}

pub fn jacobi_ok(c: &Consts) -> bool {
    let n = c.len();
    (0..n).all(|a| {
        (0..n).all(|b| {
            (0..n).all(|d| {
                // [e_a,[e_b,e_d]] + cyclic, coordinate k
                (0..n).all(|k| {
                    let cyc = |x: usize, y: usize, z: usize| -> i64 { (0..n).map(|m| c[y][z][m] * c[x][m][k]).sum() };
                    cyc(a, b, d) + cyc(b, d, a) + cyc(d, a, b) == 0
                })
            })
        })
    })
}

/// `δ([e_i,e_j]) = ad_{e_i} δ(e_j) − ad_{e_j} δ(e_i)` with `δ(e_k)^{ab} = d[a][b][k]`.
pub fn cocycle_ok(c: &Consts, d: &Consts) -> bool {
    let n = c.len();
    for i in 0..n {
        for j in 0..n {
            for a in 0..n {
                for b in 0..n {
                    let lhs: i64 = (0..n).map(|k| c[i][j][k] * d[a][b][k]).sum();
                    let ad = |x: usize, y: usize| -> i64 {
                        (0..n).map(|m| c[x][m][a] * d[m][b][y] + c[x][m][b] * d[a][m][y]).sum()
                    };
                    if lhs != ad(i, j) - ad(j, i) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

pub fn aff() -> Consts {
    consts(2, &[(0, 1, 1, 1)])
}

pub fn heisenberg() -> Consts {
    consts(3, &[(0, 1, 2, 1)])
}

/// Cobrackets on the Heisenberg algebra drawn with entries in `{-1,0,1}`
/// that satisfy co-Jacobi.
pub fn random_cobracket<R: Rng>(n: usize, rng: &mut R) -> Consts {
    loop {
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if rng.gen_bool(0.3) {
                        entries.push((i, j, k, rng.gen_range(-1..=1)));
                    }
                }
            }
        }
        let d = consts(n, &entries);
        if jacobi_ok(&d) {
            return d;
        }
    }
}

// Multiple vector bundles.

pub fn triple() -> MultiChart {
    use Parity::{Even, Odd};
    MultiChart::standard(
        3,
        &["x"],
        &[],
        &[
            (DirSet::single(1), "u", vec![Even, Odd]),
            (DirSet::single(2), "w", vec![Even]),
            (DirSet::single(3), "v", vec![Even]),
            (DirSet::from_dirs(&[1, 2]), "z", vec![Even]),
            (DirSet::from_dirs(&[1, 3]), "y", vec![Odd]),
            (DirSet::from_dirs(&[2, 3]), "k", vec![Even]),
            (DirSet::from_dirs(&[1, 2, 3]), "c", vec![Even]),
        ],
        Naming::Generic,
    )
    .unwrap()
}

/// A random polynomial at most linear in the direction-`r` coordinates.
pub fn random_function<R: Rng>(mc: &MultiChart, r: usize, rng: &mut R) -> GradedPoly {
    let chart = mc.chart();
    let mut p = GradedPoly::zero(chart);
    for _ in 0..6 {
        let mut exps = vec![0u16; chart.len()];
        for _ in 0..rng.gen_range(0..=3) {
            let g = rng.gen_range(0..chart.len());
            if chart.gen(g).parity == Parity::Even || exps[g] == 0 {
                exps[g] += 1;
            }
        }
        let m = Monomial::from_exponents(exps);
        if m.weight(chart)[r - 1] <= 1 {
            p = p.add(&GradedPoly::from_terms(chart, [(m, rat(rng.gen_range(-3..=3)))])).unwrap();
        }
    }
    p
}

/// Reverse the map `phi` of `d` along `order`, starting from `d` itself.
pub fn lift(phi: &Substitution, d: &MultiChart, order: &[usize]) -> (MultiChart, Substitution) {
    let (mut mc, mut s) = (d.clone(), phi.clone());
    for &r in order {
        let (src, _, t) = reverse_substitution(&s, &mc, &mc, r).unwrap();
        mc = src;
        s = t;
    }
    (mc, s)
}

pub fn naturality_holds(d: &MultiChart, phi: &Substitution, prefix: &[usize], r: usize, s: usize) -> bool {
    let order_a: Vec<usize> = prefix.iter().copied().chain([r, s]).collect();
    let order_b: Vec<usize> = prefix.iter().copied().chain([s, r]).collect();
    let (ma, pa) = lift(phi, d, &order_a);
    let (mb, pb) = lift(phi, d, &order_b);
    let iso = ma.iso_to(&mb).unwrap();
    iso.then(&pb).unwrap() == pa.then(&iso).unwrap()
}
