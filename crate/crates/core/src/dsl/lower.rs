//! Syntax tree to model.

use std::collections::BTreeSet;

use num_rational::BigRational;

use super::ast::*;
use super::{parity_word, NamedField, ParseError, ParseErrorKind, Pos, StructureFile, Task, Warning};
use crate::algebra::{Chart, DirSet, GradedPoly, Parity, Role, Substitution};
use crate::fields::Derivation;
use crate::multifold::{GenSpec, MultiChart, MultiTransition, Naming, Origin};

pub fn lower(doc: &Document, warnings: &mut Vec<Warning>) -> Result<StructureFile, ParseError> {
    let decl = doc.chart.as_ref().expect("parser requires a chart");
    let d = chart(decl)?;
    let mut mc = d.clone();
    if let Some((_, dirs)) = &doc.reversals {
        let mut seen = BTreeSet::new();
        for &(pos, r) in dirs {
            if r == 0 || r > decl.directions || !seen.insert(r) {
                return Err(ParseError::invalid(pos, format!("cannot reverse direction {r}")));
            }
            mc = mc.reversed(r).map_err(|e| ParseError::invalid(pos, e))?.0;
        }
    }
    let transition = match &doc.transition {
        Some((pos, rows)) => Some(transition(&d, *pos, rows, warnings)?),
        None => None,
    };
    let mut fields: Vec<NamedField> = Vec::new();
    for f in &doc.fields {
        if fields.iter().any(|g| g.name == f.name) {
            return Err(ParseError::invalid(f.pos, format!("duplicate field `{}`", f.name)));
        }
        fields.push(NamedField { name: f.name.clone(), field: field(mc.chart(), f, warnings)? });
    }
    let tasks = doc.tasks.iter().map(|t| Task { name: t.name.clone(), bindings: t.bindings.clone() }).collect();
    Ok(StructureFile { chart: mc, transition, fields, tasks })
}

fn origin(name: &str, letters: bool, block: bool) -> Origin {
    if letters && block {
        for stem in ["u_", "w_", "z_", "u", "w", "z"] {
            if let Some(Ok(i)) = name.strip_prefix(stem).map(str::parse::<usize>) {
                let o = Origin::indexed(&stem[..1], i);
                return if stem.len() == 2 { o.dual() } else { o };
            }
        }
    }
    match name.strip_suffix("_d").filter(|s| block && !s.is_empty()) {
        Some(stem) => Origin::named(stem).dual(),
        None => Origin::named(name),
    }
}

fn chart(decl: &ChartDecl) -> Result<MultiChart, ParseError> {
    let n = decl.directions;
    let mut specs: Vec<GenSpec> = Vec::new();
    let mut names = BTreeSet::new();
    for g in &decl.gens {
        if !names.insert(g.name.clone()) {
            return Err(ParseError::invalid(g.pos, format!("duplicate generator `{}`", g.name)));
        }
        let role = match &g.kind {
            GenKind::Base => Role::Base,
            GenKind::Param => Role::Param,
            GenKind::Block(dirs) => {
                let set: BTreeSet<usize> = dirs.iter().copied().collect();
                if set.len() != dirs.len() || dirs.iter().any(|&r| r == 0 || r > n) {
                    return Err(ParseError::invalid(g.pos, format!("directions of `{}` must be distinct and in 1..={n}", g.name)));
                }
                Role::Block(DirSet::from_dirs(dirs))
            }
        };
        let block = matches!(role, Role::Block(_));
        specs.push((origin(&g.name, decl.letters, block), role, g.parity));
    }
    let naming = if decl.letters { Naming::Letters } else { Naming::Generic };
    let mc = MultiChart::from_parts(n, specs, Vec::new(), naming).map_err(|e| ParseError::invalid(decl.pos, e))?;
    for g in &decl.gens {
        if mc.chart().try_index_of(&g.name).is_none() {
            return Err(ParseError::invalid(g.pos, format!("`{}` does not follow the chart's naming scheme", g.name)));
        }
    }
    Ok(mc)
}

fn transition(
    d: &MultiChart,
    pos: Pos,
    rows: &[Assign],
    warnings: &mut Vec<Warning>,
) -> Result<MultiTransition, ParseError> {
    let c = d.chart();
    let mut images: Vec<GradedPoly> = (0..c.len()).map(|i| GradedPoly::gen(c, i)).collect();
    let mut seen = BTreeSet::new();
    for row in rows {
        let i = target(c, row, &mut seen)?;
        let img = eval(&row.expr, c, warnings)?;
        let want = c.parity(i);
        if img.terms().any(|(m, _)| m.parity(c) != want) {
            return Err(ParseError {
                pos: row.expr.pos,
                kind: ParseErrorKind::ParityInconsistent(format!(
                    "image of {} must be {}",
                    row.target,
                    parity_word(want)
                )),
            });
        }
        images[i] = img;
    }
    let phi = Substitution::new(c, c, images).map_err(|e| ParseError::invalid(pos, e))?;
    MultiTransition::from_substitution(d, &phi).map_err(|e| ParseError::invalid(pos, e))
}

fn target(c: &Chart, row: &Assign, seen: &mut BTreeSet<usize>) -> Result<usize, ParseError> {
    let i = c.try_index_of(&row.target).ok_or_else(|| ParseError {
        pos: row.pos,
        kind: ParseErrorKind::UndeclaredGenerator(row.target.clone()),
    })?;
    if !seen.insert(i) {
        return Err(ParseError::invalid(row.pos, format!("`{}` is assigned twice", row.target)));
    }
    Ok(i)
}

fn field(c: &Chart, f: &FieldDecl, warnings: &mut Vec<Warning>) -> Result<Derivation, ParseError> {
    let mut coeffs = vec![GradedPoly::zero(c); c.len()];
    let mut parity = f.parity;
    let mut seen = BTreeSet::new();
    for row in &f.rows {
        let i = target(c, row, &mut seen)?;
        let p = eval(&row.expr, c, warnings)?;
        for (m, _) in p.terms() {
            let implied = m.parity(c) + c.parity(i);
            match parity {
                None => parity = Some(implied),
                Some(q) if q != implied => {
                    return Err(ParseError {
                        pos: row.expr.pos,
                        kind: ParseErrorKind::ParityInconsistent(format!(
                            "a term of the {} coefficient makes field {} {}, expected {}",
                            row.target,
                            f.name,
                            parity_word(implied),
                            parity_word(q)
                        )),
                    })
                }
                Some(_) => {}
            }
        }
        coeffs[i] = p;
    }
    let parity = parity.unwrap_or(Parity::Odd);
    Derivation::with_parity(c, coeffs, parity).map_err(|e| ParseError::invalid(f.pos, e))
}

fn eval(e: &Expr, c: &Chart, warnings: &mut Vec<Warning>) -> Result<GradedPoly, ParseError> {
    let lift = |r: crate::error::Result<GradedPoly>| r.map_err(|err| ParseError::invalid(e.pos, err));
    match &e.kind {
        ExprKind::Num(n, d) => Ok(GradedPoly::constant(c, BigRational::new(n.clone(), d.clone()))),
        ExprKind::Var(name) => GradedPoly::var(c, name).map_err(|_| ParseError {
            pos: e.pos,
            kind: ParseErrorKind::UndeclaredGenerator(name.clone()),
        }),
        ExprKind::Neg(x) => Ok(eval(x, c, warnings)?.neg()),
        ExprKind::Add(a, b) => lift(eval(a, c, warnings)?.add(&eval(b, c, warnings)?)),
        ExprKind::Sub(a, b) => lift(eval(a, c, warnings)?.sub(&eval(b, c, warnings)?)),
        ExprKind::Pow(a, k) => lift(eval(a, c, warnings)?.pow(*k)),
        ExprKind::Mul(..) => {
            let mut leaves = Vec::new();
            flatten(e, &mut leaves);
            check_order(e.pos, &leaves, c, warnings);
            let mut out = GradedPoly::one(c);
            for leaf in leaves {
                out = lift(out.mul(&eval(leaf, c, warnings)?))?;
            }
            Ok(out)
        }
    }
}

fn flatten<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match &e.kind {
        ExprKind::Mul(a, b) => {
            flatten(a, out);
            flatten(b, out);
        }
        _ => out.push(e),
    }
}

/// Warn when the odd generators of a product are listed out of chart order
/// by an odd permutation.
fn check_order(pos: Pos, leaves: &[&Expr], c: &Chart, warnings: &mut Vec<Warning>) {
    let odd: Vec<usize> = leaves
        .iter()
        .filter_map(|l| match &l.kind {
            ExprKind::Var(name) => c.try_index_of(name).filter(|&i| c.parity(i).is_odd()),
            _ => None,
        })
        .collect();
    let inversions = (0..odd.len()).flat_map(|i| (i + 1..odd.len()).map(move |j| (i, j))).filter(|&(i, j)| odd[i] > odd[j]).count();
    if inversions % 2 == 1 {
        let listed: Vec<&str> = odd.iter().map(|&i| c.name(i)).collect();
        let mut sorted = odd.clone();
        sorted.sort_unstable();
        let normal: Vec<&str> = sorted.iter().map(|&i| c.name(i)).collect();
        warnings.push(Warning {
            pos,
            message: format!(
                "odd factors {} reorder to {} with a sign change",
                listed.join("*"),
                normal.join("*")
            ),
        });
    }
}
