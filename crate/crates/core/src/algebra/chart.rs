//! Generator declarations: names, parities, weight roles.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Z₂ grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_bit(bit: u32) -> Self {
        if bit.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn bit(self) -> u32 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn is_odd(self) -> bool {
        self == Parity::Odd
    }

    pub fn flip(self) -> Self {
        self + Parity::Odd
    }

    /// `(-1)^{self * other}` as ±1.
    pub fn koszul(self, other: Parity) -> i32 {
        if self.is_odd() && other.is_odd() {
            -1
        } else {
            1
        }
    }
}

impl Add for Parity {
    type Output = Parity;
    fn add(self, rhs: Parity) -> Parity {
        Parity::from_bit(self.bit() + rhs.bit())
    }
}

impl AddAssign for Parity {
    fn add_assign(&mut self, rhs: Parity) {
        *self = *self + rhs;
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => write!(f, "even"),
            Parity::Odd => write!(f, "odd"),
        }
    }
}

/// Integer weight vector, one entry per bundle direction.
pub type Weight = Vec<i32>;

/// A set of directions `{1..=n}` stored as a bitmask (bit `r-1` for direction `r`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DirSet(pub u32);

impl DirSet {
    pub fn single(r: usize) -> Self {
        DirSet(1 << (r - 1))
    }

    pub fn from_dirs(dirs: &[usize]) -> Self {
        DirSet(dirs.iter().fold(0, |acc, &r| acc | (1 << (r - 1))))
    }

    pub fn contains(self, r: usize) -> bool {
        self.0 & (1 << (r - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: DirSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Directions in increasing order, 1-based.
    pub fn dirs(self) -> Vec<usize> {
        (1..=32).filter(|&r| self.contains(r)).collect()
    }

    pub fn weight(self, n: usize) -> Weight {
        (1..=n).map(|r| i32::from(self.contains(r))).collect()
    }

    /// Block ordering key: by size, then lexicographically by direction list.
    pub fn order_key(self) -> (usize, Vec<usize>) {
        (self.len(), self.dirs())
    }
}

impl fmt::Display for DirSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dirs().iter().map(|r| r.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// The role of a generator in a (multiple) vector bundle chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Even coordinate on the base, weight zero.
    Base,
    /// Linear coordinate of the block labelled by a nonempty direction set.
    /// A singleton set is a side fiber, a larger one a core block.
    Block(DirSet),
    /// Symbolic parameter: even, weight zero, never touched by bundle maps.
    Param,
}

impl Role {
    pub fn fiber(r: usize) -> Self {
        Role::Block(DirSet::single(r))
    }

    pub fn core(dirs: &[usize]) -> Self {
        Role::Block(DirSet::from_dirs(dirs))
    }

    fn order_key(&self) -> (u8, usize, Vec<usize>) {
        match self {
            Role::Base => (0, 0, Vec::new()),
            Role::Block(s) => {
                let (len, dirs) = s.order_key();
                (1, len, dirs)
            }
            Role::Param => (2, 0, Vec::new()),
        }
    }

    pub fn weight(&self, n: usize) -> Weight {
        match self {
            Role::Base | Role::Param => vec![0; n],
            Role::Block(s) => s.weight(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub parity: Parity,
    pub role: Role,
    pub weight: Weight,
}

#[derive(Debug, PartialEq, Eq)]
struct ChartData {
    directions: usize,
    gens: Vec<Generator>,
    index: HashMap<String, usize>,
}

/// An ordered list of generators of a free graded-commutative algebra.
///
/// Cheap to clone; equality is structural.
#[derive(Clone, Debug)]
pub struct Chart(Arc<ChartData>);

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Chart {}

impl Chart {
    pub fn builder(directions: usize) -> ChartBuilder {
        ChartBuilder { directions, gens: Vec::new() }
    }

    /// A chart with no bundle directions (every generator is a base or parameter).
    pub fn plain(gens: &[(&str, Parity)]) -> Result<Self> {
        let mut b = Chart::builder(0);
        for (name, parity) in gens {
            b = b.free(name, *parity);
        }
        b.build()
    }

    pub fn directions(&self) -> usize {
        self.0.directions
    }

    pub fn len(&self) -> usize {
        self.0.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.gens.is_empty()
    }

    pub fn gens(&self) -> &[Generator] {
        &self.0.gens
    }

    pub fn gen(&self, idx: usize) -> &Generator {
        &self.0.gens[idx]
    }

    pub fn parity(&self, idx: usize) -> Parity {
        self.0.gens[idx].parity
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0
            .index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn try_index_of(&self, name: &str) -> Option<usize> {
        self.0.index.get(name).copied()
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.0.gens[idx].name
    }

    /// Indices of generators whose role is `Block(s)` with `s` containing `r`.
    pub fn direction_indices(&self, r: usize) -> Vec<usize> {
        self.indices_where(|g| matches!(g.role, Role::Block(s) if s.contains(r)))
    }

    pub fn block_indices(&self, block: DirSet) -> Vec<usize> {
        self.indices_where(|g| g.role == Role::Block(block))
    }

    pub fn base_indices(&self) -> Vec<usize> {
        self.indices_where(|g| g.role == Role::Base)
    }

    pub fn indices_where(&self, pred: impl Fn(&Generator) -> bool) -> Vec<usize> {
        self.0
            .gens
            .iter()
            .enumerate()
            .filter(|(_, g)| pred(g))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn zero_weight(&self) -> Weight {
        vec![0; self.directions()]
    }
}

pub struct ChartBuilder {
    directions: usize,
    gens: Vec<Generator>,
}

impl ChartBuilder {
    pub fn gen(mut self, name: &str, parity: Parity, role: Role) -> Self {
        let weight = role.weight(self.directions);
        self.gens.push(Generator { name: name.to_string(), parity, role, weight });
        self
    }

    pub fn base(self, name: &str) -> Self {
        self.gen(name, Parity::Even, Role::Base)
    }

    pub fn param(self, name: &str) -> Self {
        self.gen(name, Parity::Even, Role::Param)
    }

    /// A weightless generator of either parity (only valid in charts with no directions,
    /// where it is recorded as a base or, when odd, as a pseudo-block-free generator).
    pub fn free(mut self, name: &str, parity: Parity) -> Self {
        self.gens.push(Generator {
            name: name.to_string(),
            parity,
            role: Role::Base,
            weight: vec![0; self.directions],
        });
        self
    }

    pub fn fiber(self, name: &str, parity: Parity, r: usize) -> Self {
        self.gen(name, parity, Role::fiber(r))
    }

    pub fn core(self, name: &str, parity: Parity, dirs: &[usize]) -> Self {
        self.gen(name, parity, Role::core(dirs))
    }

    pub fn build(self) -> Result<Chart> {
        let n = self.directions;
        let mut index = HashMap::new();
        for g in &self.gens {
            if let Role::Block(s) = g.role {
                if s.is_empty() || s.dirs().iter().any(|&r| r == 0 || r > n) {
                    return Err(Error::InvalidChart(format!(
                        "generator {} lies in block {{{}}} outside directions 1..={n}",
                        g.name, s
                    )));
                }
            }
            if g.role == Role::Param && g.parity.is_odd() {
                return Err(Error::InvalidChart(format!("parameter {} must be even", g.name)));
            }
            if g.name.is_empty() {
                return Err(Error::InvalidChart("empty generator name".into()));
            }
            if index.insert(g.name.clone(), 0).is_some() {
                return Err(Error::InvalidChart(format!("duplicate generator {}", g.name)));
            }
        }
        // Base generators of a weighted chart are even; the invariant is relaxed
        // only for direction-free charts used as plain Grassmann algebras.
        if n > 0 {
            if let Some(g) = self.gens.iter().find(|g| g.role == Role::Base && g.parity.is_odd()) {
                return Err(Error::InvalidChart(format!("base generator {} must be even", g.name)));
            }
        }
        let mut gens = self.gens;
        gens.sort_by_key(|g| g.role.order_key());
        let index = gens.iter().enumerate().map(|(i, g)| (g.name.clone(), i)).collect();
        Ok(Chart(Arc::new(ChartData { directions: n, gens, index })))
    }
}
