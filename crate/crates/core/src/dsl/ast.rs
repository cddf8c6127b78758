//! Syntax tree with source positions.

use num_bigint::BigInt;

use super::Pos;
use crate::algebra::Parity;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub pos: Pos,
    pub kind: ExprKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Num(BigInt, BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenKind {
    Base,
    Param,
    Block(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenDecl {
    pub pos: Pos,
    pub name: String,
    pub parity: Parity,
    pub kind: GenKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartDecl {
    pub pos: Pos,
    pub directions: usize,
    pub letters: bool,
    pub gens: Vec<GenDecl>,
}

/// `target -> expr` in a transition, `target <- expr` in a field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assign {
    pub pos: Pos,
    pub target: String,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDecl {
    pub pos: Pos,
    pub name: String,
    pub parity: Option<Parity>,
    pub rows: Vec<Assign>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaskDecl {
    pub pos: Pos,
    pub name: String,
    pub bindings: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    pub chart: Option<ChartDecl>,
    pub reversals: Option<(Pos, Vec<(Pos, usize)>)>,
    pub transition: Option<(Pos, Vec<Assign>)>,
    pub fields: Vec<FieldDecl>,
    pub tasks: Vec<TaskDecl>,
}
