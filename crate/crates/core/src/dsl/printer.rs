//! Model to text. Parsing the output gives back an equal model.

use std::fmt::Write;

use super::{parity_word, unreversed, StructureFile};
use crate::algebra::Role;
use crate::multifold::Naming;

pub fn print(file: &StructureFile) -> String {
    let mut out = String::new();
    let d = unreversed(&file.chart);
    let c = d.chart();
    let letters = if d.naming() == Naming::Letters { " letters" } else { "" };
    writeln!(out, "chart {}{letters}", d.directions()).unwrap();
    for g in c.gens() {
        let p = parity_word(g.parity);
        match g.role {
            Role::Base if g.parity.is_odd() => writeln!(out, "  base {} odd", g.name),
            Role::Base => writeln!(out, "  base {}", g.name),
            Role::Param => writeln!(out, "  param {}", g.name),
            Role::Block(s) if s.len() == 1 => writeln!(out, "  fiber {} {p} {s}", g.name),
            Role::Block(s) => {
                let dirs: Vec<String> = s.dirs().iter().map(usize::to_string).collect();
                writeln!(out, "  core {} {p} {}", g.name, dirs.join(" "))
            }
        }
        .unwrap();
    }
    if !file.chart.reversals().is_empty() {
        let dirs: Vec<String> = file.chart.reversals().iter().map(usize::to_string).collect();
        writeln!(out, "reverse {}", dirs.join(" ")).unwrap();
    }
    if let Some(t) = &file.transition {
        let phi = t.to_substitution().expect("transition was validated on construction");
        writeln!(out, "\ntransition").unwrap();
        for (i, g) in c.gens().iter().enumerate() {
            if matches!(g.role, Role::Block(_)) {
                writeln!(out, "  {} -> {}", g.name, phi.image(i)).unwrap();
            }
        }
    }
    for f in &file.fields {
        let x = &f.field;
        let parity = x.parity().map_or("", parity_word);
        writeln!(out, "\nfield {} {parity}", f.name).unwrap();
        for (i, coeff) in x.coeffs().iter().enumerate() {
            if !coeff.is_zero() {
                writeln!(out, "  {} <- {}", x.chart().name(i), coeff).unwrap();
            }
        }
    }
    if !file.tasks.is_empty() {
        out.push('\n');
    }
    for t in &file.tasks {
        write!(out, "task {}", t.name).unwrap();
        for (k, v) in &t.bindings {
            write!(out, " {k}={v}").unwrap();
        }
        out.push('\n');
    }
    out
}
