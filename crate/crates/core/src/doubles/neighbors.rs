//! The neighbors of an n-fold vector bundle: everything reachable by partial
//! parity reversions and duals, up to natural isomorphism.
//!
//! Label the sides of `D` by `1..=n` and its ultimate core by `0`. A neighbor
//! is determined by which label currently sits in the core and which of the
//! remaining `n` labels are parity-reversed. Dualizing along the side `s`
//! exchanges `s` with the core label; the new side is the dual of the old
//! ultimate core and inherits its parity, the sum of all reversal flags.

use serde::Serialize;

use crate::error::{Error, Result};

/// How one side structure of `D` shows up on a neighbor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Manifestation {
    /// A homological field on the total space.
    HomologicalField,
    /// A linear Poisson bracket on the total space.
    Poisson,
    /// A linear Schouten bracket on the total space.
    Schouten,
    /// A Lie algebroid on sections only.
    Sections,
}

impl Manifestation {
    pub fn on_total_space(self) -> bool {
        self != Manifestation::Sections
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborNode {
    pub id: usize,
    pub name: String,
    /// The label in the core: `0` for `D` itself, `s` for the dual along side `s`.
    pub core: usize,
    /// Side labels (all of `0..=n` except `core`) that are parity-reversed.
    pub reversed: Vec<usize>,
    /// For each side structure `1..=n` of `D`, how it appears here.
    pub structures: Vec<(usize, Manifestation)>,
    pub total_space: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "side", rename_all = "kebab-case")]
pub enum EdgeKind {
    Reverse(usize),
    Dual(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborEdge {
    pub from: usize,
    pub to: usize,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NeighborGraph {
    pub n: usize,
    pub nodes: Vec<NeighborNode>,
    /// Every edge once, with `from < to`.
    pub edges: Vec<NeighborEdge>,
}

impl NeighborGraph {
    pub fn valence(&self, id: usize) -> usize {
        self.edges.iter().filter(|e| e.from == id || e.to == id).count()
    }

    pub fn total_space_nodes(&self) -> Vec<&str> {
        self.nodes.iter().filter(|v| v.total_space).map(|v| v.name.as_str()).collect()
    }

    pub fn node(&self, name: &str) -> Option<&NeighborNode> {
        self.nodes.iter().find(|v| v.name == name)
    }
}

/// `(core, flags)` with `flags` indexed by label `0..=n`; `flags[core]` is unused.
type State = (usize, Vec<bool>);

fn neighbors_of(n: usize, (core, flags): &State) -> Vec<(EdgeKind, State)> {
    let mut out = Vec::with_capacity(2 * n);
    for s in (0..=n).filter(|&s| s != *core) {
        let mut f = flags.clone();
        f[s] = !f[s];
        out.push((EdgeKind::Reverse(s), (*core, f)));
    }
    let parity = (0..=n).filter(|&s| s != *core).fold(false, |acc, s| acc ^ flags[s]);
    for s in (0..=n).filter(|&s| s != *core) {
        let mut f = flags.clone();
        f[*core] = parity;
        f[s] = false;
        out.push((EdgeKind::Dual(s), (s, f)));
    }
    out
}

fn manifestations(n: usize, (core, flags): &State) -> Vec<(usize, Manifestation)> {
    let parity = (0..=n).filter(|&s| s != *core).fold(false, |acc, s| acc ^ flags[s]);
    (1..=n)
        .map(|l| {
            let m = if l == *core {
                if parity {
                    Manifestation::Schouten
                } else {
                    Manifestation::Poisson
                }
            } else if flags[l] {
                Manifestation::HomologicalField
            } else {
                Manifestation::Sections
            };
            (l, m)
        })
        .collect()
}

fn side_name(n: usize, l: usize) -> String {
    match (n, l) {
        (_, 0) => "K*".into(),
        (2, 1) => "A".into(),
        (2, 2) => "B".into(),
        _ => format!("A{l}"),
    }
}

fn node_name(n: usize, (core, flags): &State) -> String {
    let sides: Vec<usize> = (0..=n).filter(|&s| s != *core).collect();
    let rev: Vec<usize> = sides.iter().copied().filter(|&s| flags[s]).collect();
    let bundle = match (n, core) {
        (_, 0) => "D".to_string(),
        // Dualizing along side 2 keeps side 1: the dual over A, and vice versa.
        (2, 2) => "D^{*A}".to_string(),
        (2, 1) => "D^{*B}".to_string(),
        (_, c) => format!("D^{{*{c}}}"),
    };
    let prefix = if rev.is_empty() {
        String::new()
    } else if rev.len() == sides.len() {
        match n {
            1 => "Π".to_string(),
            2 => "Π²".to_string(),
            _ => format!("Π^{n}"),
        }
    } else if n == 2 {
        // Reversing the fibres over `X` flips the other side.
        let kept = sides.iter().copied().find(|s| !flags[*s]).expect("one side unreversed");
        format!("Π_{{{}}}", side_name(n, kept))
    } else {
        let names: Vec<String> = rev.iter().map(|&s| side_name(n, s)).collect();
        format!("Π[{}]", names.join(","))
    };
    format!("{prefix}{bundle}")
}

/// Enumerate the neighbors of an n-fold vector bundle, `1 <= n <= 6`.
pub fn enumerate_neighbors(n: usize) -> Result<NeighborGraph> {
    if !(1..=6).contains(&n) {
        return Err(Error::Precondition(format!("neighbor enumeration supports 1..=6 directions, got {n}")));
    }
    let start: State = (0, vec![false; n + 1]);
    let mut states = vec![start];
    let mut edges = Vec::new();
    let mut i = 0;
    while i < states.len() {
        for (kind, next) in neighbors_of(n, &states[i]) {
            let j = match states.iter().position(|s| *s == next) {
                Some(j) => j,
                None => {
                    states.push(next);
                    states.len() - 1
                }
            };
            if i < j {
                edges.push(NeighborEdge { from: i, to: j, kind });
            }
        }
        i += 1;
    }
    let nodes = states
        .iter()
        .enumerate()
        .map(|(id, st)| {
            let structures = manifestations(n, st);
            NeighborNode {
                id,
                name: node_name(n, st),
                core: st.0,
                reversed: (0..=n).filter(|&s| s != st.0 && st.1[s]).collect(),
                total_space: structures.iter().all(|(_, m)| m.on_total_space()),
                structures,
            }
        })
        .collect();
    Ok(NeighborGraph { n, nodes, edges })
}
