//! Text format for charts, transitions, fields and tasks.
//!
//! ```text
//! chart 2 letters
//!   base x
//!   fiber u1 even 1
//!   fiber w1 even 2
//!   core z1 even 1 2
//! reverse 2 1
//! transition
//!   z1 -> z1 + u1*w1
//! field Q1 odd
//!   x <- xi1
//! task check-double q1=Q1 q2=Q2
//! ```
//!
//! Generators are declared on the unreversed chart; `reverse` lists the
//! reversed directions in order and fields are written in the resulting
//! coordinates. Transition images are written in the unreversed coordinates.

pub mod ast;
pub mod lexer;
mod lower;
pub mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

use crate::algebra::Parity;
use crate::doubles::StructurePair;
use crate::error::{Error as CoreError, Result as CoreResult};
use crate::fields::Derivation;
use crate::multifold::{MultiChart, MultiTransition};

pub use printer::print;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared generator `{0}`")]
    UndeclaredGenerator(String),
    #[error("parity-inconsistent coefficient: {0}")]
    ParityInconsistent(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: Pos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        ParseError { pos, kind: ParseErrorKind::Syntax(msg.into()) }
    }

    pub fn invalid(pos: Pos, msg: impl fmt::Display) -> Self {
        ParseError { pos, kind: ParseErrorKind::Invalid(msg.to_string()) }
    }
}

impl From<ParseError> for CoreError {
    fn from(e: ParseError) -> Self {
        CoreError::Syntax { line: e.pos.line, col: e.pos.col, msg: e.kind.to_string() }
    }
}

/// A non-fatal remark about the input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub pos: Pos,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: warning: {}", self.pos, self.message)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedField {
    pub name: String,
    pub field: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub name: String,
    pub bindings: Vec<(String, String)>,
}

impl Task {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.bindings.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

/// One chart (with its reversal record), an optional transition law on the
/// unreversed chart, named fields on the reversed chart, and tasks.
#[derive(Clone, Debug)]
pub struct StructureFile {
    pub chart: MultiChart,
    pub transition: Option<MultiTransition>,
    pub fields: Vec<NamedField>,
    pub tasks: Vec<Task>,
}

impl PartialEq for StructureFile {
    fn eq(&self, other: &Self) -> bool {
        self.chart.chart() == other.chart.chart()
            && self.chart.reversals() == other.chart.reversals()
            && self.chart.naming() == other.chart.naming()
            && self.transition.as_ref().map(MultiTransition::terms) == other.transition.as_ref().map(MultiTransition::terms)
            && self.fields == other.fields
            && self.tasks == other.tasks
    }
}

impl StructureFile {
    pub fn new(chart: MultiChart) -> Self {
        StructureFile { chart, transition: None, fields: Vec::new(), tasks: Vec::new() }
    }

    /// The pair on `Π²D` with a task checking it.
    pub fn from_pair(pair: &StructurePair) -> Self {
        let mut f = StructureFile::new(pair.charts.pi2.clone());
        f.push_field("Q1", pair.q1.clone());
        f.push_field("Q2", pair.q2.clone());
        f.tasks.push(Task {
            name: "check-double".into(),
            bindings: vec![("q1".into(), "Q1".into()), ("q2".into(), "Q2".into())],
        });
        f
    }

    pub fn push_field(&mut self, name: &str, field: Derivation) {
        self.fields.push(NamedField { name: name.to_string(), field });
    }

    pub fn field(&self, name: &str) -> CoreResult<&Derivation> {
        self.fields
            .iter()
            .find(|f| f.name == name)
            .map(|f| &f.field)
            .ok_or_else(|| CoreError::Binding(format!("no field named `{name}`")))
    }

    pub fn task(&self, name: &str) -> Option<&Task> {
        self.tasks.iter().find(|t| t.name == name)
    }
}

/// The chart with every reversal undone.
pub fn unreversed(mc: &MultiChart) -> MultiChart {
    let mut mc = mc.clone();
    while let Some(&r) = mc.reversals().last() {
        mc = mc.reversed(r).expect("last reversal can be undone").0;
    }
    mc
}

pub fn parse(src: &str) -> Result<StructureFile, ParseError> {
    parse_with_warnings(src).map(|(f, _)| f)
}

/// Parse, also returning reorderings of odd factors that change a sign.
pub fn parse_with_warnings(src: &str) -> Result<(StructureFile, Vec<Warning>), ParseError> {
    let doc = parser::parse_document(src)?;
    let mut warnings = Vec::new();
    let file = lower::lower(&doc, &mut warnings)?;
    Ok((file, warnings))
}

fn parity_word(p: Parity) -> &'static str {
    if p.is_odd() {
        "odd"
    } else {
        "even"
    }
}
