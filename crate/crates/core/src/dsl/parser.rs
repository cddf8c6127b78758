//! Text to syntax tree.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use super::ast::*;
use super::lexer::{tokenize_line, Tok, Token};
use super::{ParseError, Pos};
use crate::algebra::Parity;

pub const KEYWORDS: &[&str] =
    &["chart", "letters", "base", "param", "fiber", "core", "reverse", "transition", "field", "task"];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Top,
    Chart,
    Transition,
    Field,
}

pub fn parse_document(src: &str) -> Result<Document, ParseError> {
    let mut doc = Document::default();
    let mut section = Section::Top;
    for (k, line) in src.lines().enumerate() {
        let lineno = k + 1;
        let toks = tokenize_line(line, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let end = Pos { line: lineno, col: line.chars().count() + 1 };
        let mut c = Cursor { toks: &toks, at: 0, end };
        let head = match &toks[0].tok {
            Tok::Ident(s) => s.as_str(),
            _ => "",
        };
        let pos = toks[0].pos;
        if head != "chart" && doc.chart.is_none() {
            return Err(ParseError::syntax(pos, "expected `chart` before anything else"));
        }
        match head {
            "chart" => {
                if doc.chart.is_some() {
                    return Err(ParseError::syntax(pos, "a file declares exactly one chart"));
                }
                c.bump();
                let directions = c.small_int("number of directions")?;
                let letters = c.eat_ident("letters");
                c.finish()?;
                doc.chart = Some(ChartDecl { pos, directions, letters, gens: Vec::new() });
                section = Section::Chart;
            }
            "base" | "param" | "fiber" | "core" => {
                if section != Section::Chart {
                    return Err(ParseError::syntax(pos, "generator declarations belong to the chart"));
                }
                let g = gen_decl(&mut c, head)?;
                doc.chart.as_mut().expect("chart").gens.push(g);
            }
            "reverse" => {
                if doc.reversals.is_some() {
                    return Err(ParseError::syntax(pos, "duplicate `reverse` line"));
                }
                c.bump();
                let mut dirs = Vec::new();
                while !c.at_end() {
                    let p = c.pos();
                    dirs.push((p, c.small_int("direction")?));
                }
                doc.reversals = Some((pos, dirs));
                section = Section::Top;
            }
            "transition" => {
                if doc.transition.is_some() {
                    return Err(ParseError::syntax(pos, "duplicate transition"));
                }
                c.bump();
                c.finish()?;
                doc.transition = Some((pos, Vec::new()));
                section = Section::Transition;
            }
            "field" => {
                c.bump();
                let name = c.name("field name")?;
                let parity = if c.at_end() { None } else { Some(c.parity()?) };
                c.finish()?;
                doc.fields.push(FieldDecl { pos, name, parity, rows: Vec::new() });
                section = Section::Field;
            }
            "task" => {
                c.bump();
                let name = c.word("task name")?;
                let mut bindings = Vec::new();
                while !c.at_end() {
                    let key = c.word("binding name")?;
                    c.expect(&Tok::Eq, "`=`")?;
                    let mut values = vec![c.word("binding value")?];
                    while c.eat(&Tok::Comma) {
                        values.push(c.word("binding value")?);
                    }
                    bindings.push((key, values.join(",")));
                }
                doc.tasks.push(TaskDecl { pos, name, bindings });
                section = Section::Top;
            }
            _ => match section {
                Section::Transition => {
                    let a = assign(&mut c, &Tok::Arrow, false)?;
                    doc.transition.as_mut().expect("transition").1.push(a);
                }
                Section::Field => {
                    let a = assign(&mut c, &Tok::LArrow, true)?;
                    doc.fields.last_mut().expect("field").rows.push(a);
                }
                _ => return Err(ParseError::syntax(pos, format!("unexpected {}", toks[0].tok.describe()))),
            },
        }
    }
    if doc.chart.is_none() {
        return Err(ParseError::syntax(Pos { line: 1, col: 1 }, "missing `chart` declaration"));
    }
    Ok(doc)
}

fn gen_decl(c: &mut Cursor, head: &str) -> Result<GenDecl, ParseError> {
    let pos = c.pos();
    c.bump();
    let name = c.name("generator name")?;
    let (parity, kind) = match head {
        "base" => {
            let parity = if c.at_end() { Parity::Even } else { c.parity()? };
            (parity, GenKind::Base)
        }
        "param" => (Parity::Even, GenKind::Param),
        "fiber" => {
            let parity = c.parity()?;
            (parity, GenKind::Block(vec![c.small_int("direction")?]))
        }
        _ => {
            let parity = c.parity()?;
            let mut dirs = vec![c.small_int("direction")?];
            while !c.at_end() {
                dirs.push(c.small_int("direction")?);
            }
            (parity, GenKind::Block(dirs))
        }
    };
    c.finish()?;
    Ok(GenDecl { pos, name, parity, kind })
}

fn assign(c: &mut Cursor, arrow: &Tok, allow_partial: bool) -> Result<Assign, ParseError> {
    let pos = c.pos();
    let target = match (c.peek(), c.peek_at(1), c.peek_at(2)) {
        (Some(Tok::Ident(d)), Some(Tok::Slash), Some(Tok::Ident(g)))
            if allow_partial && d == "d" && g.len() > 1 && g.starts_with('d') =>
        {
            let g = g[1..].to_string();
            c.bump();
            c.bump();
            c.bump();
            g
        }
        _ => c.name("generator")?,
    };
    c.expect(arrow, &arrow.describe())?;
    let expr = expr(c)?;
    c.finish()?;
    Ok(Assign { pos, target, expr })
}

fn expr(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut lhs = term(c)?;
    loop {
        let make: fn(Box<Expr>, Box<Expr>) -> ExprKind = if c.eat(&Tok::Plus) {
            ExprKind::Add
        } else if c.eat(&Tok::Minus) {
            ExprKind::Sub
        } else {
            return Ok(lhs);
        };
        let rhs = term(c)?;
        lhs = Expr { pos: lhs.pos, kind: make(Box::new(lhs), Box::new(rhs)) };
    }
}

fn term(c: &mut Cursor) -> Result<Expr, ParseError> {
    let mut lhs = unary(c)?;
    while c.eat(&Tok::Star) {
        let rhs = unary(c)?;
        lhs = Expr { pos: lhs.pos, kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)) };
    }
    Ok(lhs)
}

fn unary(c: &mut Cursor) -> Result<Expr, ParseError> {
    let pos = c.pos();
    if c.eat(&Tok::Minus) {
        let inner = unary(c)?;
        return Ok(Expr { pos, kind: ExprKind::Neg(Box::new(inner)) });
    }
    let base = atom(c)?;
    if !c.eat(&Tok::Caret) {
        return Ok(base);
    }
    let epos = c.pos();
    match c.next() {
        Some(Tok::Int(n)) => match n.to_u32() {
            Some(e) => Ok(Expr { pos, kind: ExprKind::Pow(Box::new(base), e) }),
            None => Err(ParseError::syntax(epos, "exponent is too large")),
        },
        _ => Err(ParseError::syntax(epos, "exponent must be a non-negative integer")),
    }
}

fn atom(c: &mut Cursor) -> Result<Expr, ParseError> {
    let pos = c.pos();
    match c.next() {
        Some(Tok::Int(n)) => {
            let n = n.clone();
            if c.eat(&Tok::Slash) {
                let dpos = c.pos();
                match c.next() {
                    Some(Tok::Int(d)) if *d != BigInt::from(0) => {
                        Ok(Expr { pos, kind: ExprKind::Num(n, d.clone()) })
                    }
                    _ => Err(ParseError::syntax(dpos, "expected a nonzero integer denominator")),
                }
            } else {
                Ok(Expr { pos, kind: ExprKind::Num(n, BigInt::one()) })
            }
        }
        Some(Tok::Ident(s)) => Ok(Expr { pos, kind: ExprKind::Var(s.clone()) }),
        Some(Tok::LParen) => {
            let inner = expr(c)?;
            c.expect(&Tok::RParen, "`)`")?;
            Ok(inner)
        }
        Some(t) => Err(ParseError::syntax(pos, format!("expected a term, found {}", t.describe()))),
        None => Err(ParseError::syntax(pos, "expected a term")),
    }
}

struct Cursor<'a> {
    toks: &'a [Token],
    at: usize,
    end: Pos,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.peek_at(0)
    }

    fn peek_at(&self, k: usize) -> Option<&'a Tok> {
        self.toks.get(self.at + k).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map_or(self.end, |t| t.pos)
    }

    fn at_end(&self) -> bool {
        self.at >= self.toks.len()
    }

    fn bump(&mut self) {
        self.at += 1;
    }

    fn next(&mut self) -> Option<&'a Tok> {
        let t = self.peek();
        self.at += usize::from(t.is_some());
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.bump();
            return true;
        }
        false
    }

    fn eat_ident(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == word) {
            self.bump();
            return true;
        }
        false
    }

    fn found(&self) -> String {
        self.peek().map_or("end of line".into(), Tok::describe)
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            return Ok(());
        }
        Err(ParseError::syntax(self.pos(), format!("expected {what}, found {}", self.found())))
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            return Ok(());
        }
        Err(ParseError::syntax(self.pos(), format!("unexpected {}", self.found())))
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.bump();
                Ok(s.clone())
            }
            _ => Err(ParseError::syntax(self.pos(), format!("expected {what}, found {}", self.found()))),
        }
    }

    /// An identifier that is not a keyword.
    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        let pos = self.pos();
        let s = self.ident(what)?;
        if KEYWORDS.contains(&s.as_str()) {
            return Err(ParseError::syntax(pos, format!("`{s}` is reserved")));
        }
        Ok(s)
    }

    /// Identifiers and integers joined by hyphens, as in `check-double`.
    fn word(&mut self, what: &str) -> Result<String, ParseError> {
        let mut out = String::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(s)) => out.push_str(s),
                Some(Tok::Int(n)) => out.push_str(&n.to_string()),
                _ => {
                    return Err(ParseError::syntax(self.pos(), format!("expected {what}, found {}", self.found())))
                }
            }
            self.bump();
            if !self.eat(&Tok::Minus) {
                return Ok(out);
            }
            out.push('-');
        }
    }

    fn parity(&mut self) -> Result<Parity, ParseError> {
        let pos = self.pos();
        match self.ident("parity")?.as_str() {
            "even" => Ok(Parity::Even),
            "odd" => Ok(Parity::Odd),
            s => Err(ParseError::syntax(pos, format!("expected `even` or `odd`, found `{s}`"))),
        }
    }

    fn small_int(&mut self, what: &str) -> Result<usize, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some(Tok::Int(n)) => n.to_usize().filter(|&k| k <= 16).ok_or_else(|| {
                ParseError::syntax(pos, format!("{what} must be at most 16"))
            }),
            _ => Err(ParseError::syntax(pos, format!("expected {what}"))),
        }
    }
}
