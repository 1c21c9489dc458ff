//! Textual `.ssm` documents: algebras, charts, maps, overlaps and task
//! directives. Hand-rolled lexer and recursive-descent parser with positional
//! diagnostics, plus a canonical serializer with a round-trip guarantee.

use std::collections::BTreeSet;
use std::fmt;

use num::{BigInt, BigRational, Zero};

use crate::atlas::{AtlasError, SemiAtlas};
use crate::grassmann::GrassmannElement;
use crate::homotopy::{HomotopyError, ParameterKind, SemiHomotopy};
use crate::poly::{PolyError, SuperPolynomial};
use crate::supermap::{SuperDomainSignature, SuperMap, SuperMapError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("{line}:{col}: syntax error: expected {expected}, found {found}")]
    Syntax {
        line: u32,
        col: u32,
        expected: String,
        found: String,
    },
    #[error("{line}:{col}: {message}")]
    Semantic { line: u32, col: u32, message: String },
    #[error("document error: {0}")]
    Shape(String),
    #[error(transparent)]
    Map(#[from] SuperMapError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Homotopy(#[from] HomotopyError),
}

/// A named map with the chart labels it was declared under: one label is a
/// coordinate map for that chart, two labels a transition between charts.
#[derive(Debug, Clone)]
pub struct MapDecl {
    pub name: String,
    pub labels: Vec<String>,
    pub map: SuperMap,
}

impl PartialEq for MapDecl {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.labels == other.labels
            && self.map.n_generators() == other.map.n_generators()
            && self.map.source() == other.map.source()
            && self.map.target() == other.map.target()
            && self.map.components() == other.map.components()
    }
}

impl Eq for MapDecl {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskSpec {
    Check {
        n_max: Option<u32>,
    },
    Solve {
        lhs: GrassmannElement,
        rhs: GrassmannElement,
    },
    Berezinian {
        map: String,
    },
    Semigroup {
        chart_a: String,
        chart_b: String,
        n_max: u32,
    },
    Homotopy {
        kind: ParameterKind,
        gamma: String,
        f: String,
        g: String,
        start: GrassmannElement,
        end: GrassmannElement,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub algebra: u32,
    pub spaces: Vec<(String, u32, u32)>,
    /// `(name, semi)` in declaration order.
    pub charts: Vec<(String, bool)>,
    pub overlaps: Vec<Vec<String>>,
    pub maps: Vec<MapDecl>,
    pub tasks: Vec<TaskSpec>,
}

impl Document {
    pub fn map_decl(&self, name: &str) -> Option<&MapDecl> {
        self.maps.iter().find(|m| m.name == name)
    }

    /// Ambient chart signature: the single declared space when there is
    /// exactly one, otherwise the componentwise maximum over all maps.
    pub fn chart_signature(&self) -> SuperDomainSignature {
        if self.spaces.len() == 1 {
            return SuperDomainSignature::new(self.spaces[0].1, self.spaces[0].2);
        }
        let mut ne = 0;
        let mut no = 0;
        for decl in &self.maps {
            for sig in [decl.map.source(), decl.map.target()] {
                ne = ne.max(sig.n_even);
                no = no.max(sig.n_odd);
            }
        }
        SuperDomainSignature::new(ne, no)
    }

    /// Assembles the semi-atlas: declared charts plus charts implied by map
    /// labels; one-label maps become coordinate maps, two-label maps
    /// transitions. Map sources are padded up to the chart signature.
    pub fn to_atlas(&self) -> Result<SemiAtlas, FormatError> {
        let sig = self.chart_signature();
        let mut atlas = SemiAtlas::new(self.algebra, sig);
        for (name, _) in &self.charts {
            atlas.add_chart(name.clone());
        }
        for decl in &self.maps {
            for label in &decl.labels {
                atlas.add_chart(label.clone());
            }
        }
        for set in &self.overlaps {
            atlas.add_overlap(set)?;
        }
        for decl in &self.maps {
            match decl.labels.len() {
                1 => {
                    let padded = pad_map_source(&decl.map, sig)?;
                    atlas.set_coordinate_map(decl.labels[0].clone(), padded)?;
                }
                2 => {
                    if decl.map.target() != sig {
                        return Err(FormatError::Shape(format!(
                            "transition map `{}` has target ({}|{}), chart signature is ({}|{})",
                            decl.name,
                            decl.map.target().n_even,
                            decl.map.target().n_odd,
                            sig.n_even,
                            sig.n_odd
                        )));
                    }
                    let padded = pad_map_source(&decl.map, sig)?;
                    atlas.set_transition(decl.labels[0].clone(), decl.labels[1].clone(), padded)?;
                }
                k => {
                    return Err(FormatError::Shape(format!(
                        "map `{}` declared with {} chart labels; expected 1 or 2",
                        decl.name, k
                    )))
                }
            }
        }
        Ok(atlas)
    }

    /// Assembles a homotopy task: the family, and the two endpoint maps with
    /// sources padded to the stage signature.
    pub fn homotopy_instance(
        &self,
        task: &TaskSpec,
    ) -> Result<(SemiHomotopy, SuperMap, SuperMap), FormatError> {
        let TaskSpec::Homotopy {
            kind,
            gamma,
            f,
            g,
            start,
            end,
        } = task
        else {
            return Err(FormatError::Shape("not a homotopy task".to_string()));
        };
        let lookup = |name: &str| {
            self.map_decl(name)
                .map(|d| d.map.clone())
                .ok_or_else(|| FormatError::Shape(format!("unknown map `{}`", name)))
        };
        let gamma = lookup(gamma)?;
        let h = SemiHomotopy::new(gamma, *kind, (start.clone(), end.clone()))?;
        let stage_sig = h.stage_signature();
        let f = pad_map_source(&lookup(f)?, stage_sig)?;
        let g = pad_map_source(&lookup(g)?, stage_sig)?;
        Ok((h, f, g))
    }
}

/// Reinterprets a map over a larger source signature (extra variables are
/// simply unused). Errors when the requested signature is smaller.
pub fn pad_map_source(
    map: &SuperMap,
    sig: SuperDomainSignature,
) -> Result<SuperMap, FormatError> {
    if map.source() == sig {
        return Ok(map.clone());
    }
    let comps = map
        .components()
        .iter()
        .map(|c| c.pad_context(sig.n_even, sig.n_odd))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuperMap::new(map.n_generators(), sig, map.target(), comps)?)
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(String),
    Newline,
    Apostrophe,
    Eq,
    Semi,
    Colon,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Int(s) => write!(f, "`{}`", s),
            Tok::Newline => write!(f, "end of line"),
            Tok::Eof => write!(f, "end of input"),
            Tok::Apostrophe => write!(f, "`'`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Colon => write!(f, "`:`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Spanned>, FormatError> {
    let mut toks = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok| toks.push(Spanned { tok, line: tl, col: tc });
        match c {
            '\n' => {
                chars.next();
                push(Tok::Newline);
                line += 1;
                col = 1;
                continue;
            }
            '\r' => {
                // Tolerated on input; the following LF (if any) ends the line.
                chars.next();
                col += 1;
                continue;
            }
            ' ' | '\t' => {
                chars.next();
                col += 1;
                continue;
            }
            '#' => {
                while let Some(&d) = chars.peek() {
                    if d == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
                continue;
            }
            _ => {}
        }
        let simple = match c {
            '\'' => Some(Tok::Apostrophe),
            '=' => Some(Tok::Eq),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            push(tok);
            col += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_digit() {
                    s.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            push(Tok::Int(s));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if d.is_ascii_alphanumeric() || d == '_' {
                    s.push(d);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            push(Tok::Ident(s));
            continue;
        }
        return Err(FormatError::Syntax {
            line,
            col,
            expected: "a token".to_string(),
            found: format!("`{}`", c),
        });
    }
    toks.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(toks)
}

// ---------------------------------------------------------------------------
// Expression AST
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
enum Expr {
    Rat(BigRational),
    X { index: u32, power: u32 },
    T(u32),
    G(u32),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn var_bounds(&self, max_x: &mut u32, max_t: &mut u32) {
        match self {
            Expr::X { index, .. } => *max_x = (*max_x).max(*index),
            Expr::T(index) => *max_t = (*max_t).max(*index),
            Expr::Rat(_) | Expr::G(_) => {}
            Expr::Neg(a) => a.var_bounds(max_x, max_t),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => {
                a.var_bounds(max_x, max_t);
                b.var_bounds(max_x, max_t);
            }
        }
    }

    fn eval(&self, n: u32, ne: u32, no: u32) -> Result<SuperPolynomial, FormatError> {
        Ok(match self {
            Expr::Rat(q) => SuperPolynomial::constant(
                ne,
                no,
                GrassmannElement::from_rational(n, q.clone()),
            ),
            Expr::X { index, power } => {
                SuperPolynomial::even_var(n, ne, no, *index)?.pow(*power)?
            }
            Expr::T(index) => SuperPolynomial::odd_var(n, ne, no, *index)?,
            Expr::G(index) => SuperPolynomial::constant(
                ne,
                no,
                GrassmannElement::generator(n, *index)
                    .map_err(PolyError::from)?,
            ),
            Expr::Neg(a) => a.eval(n, ne, no)?.neg(),
            Expr::Add(a, b) => a.eval(n, ne, no)?.add(&b.eval(n, ne, no)?)?,
            Expr::Sub(a, b) => a.eval(n, ne, no)?.sub(&b.eval(n, ne, no)?)?,
            Expr::Mul(a, b) => a.eval(n, ne, no)?.mul(&b.eval(n, ne, no)?)?,
        })
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    algebra: Option<u32>,
}

pub fn parse(text: &str) -> Result<Document, FormatError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        algebra: None,
    };
    p.document()
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn peek2(&self) -> &Spanned {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax(&self, expected: impl Into<String>) -> FormatError {
        let at = self.peek();
        FormatError::Syntax {
            line: at.line,
            col: at.col,
            expected: expected.into(),
            found: at.tok.to_string(),
        }
    }

    fn semantic(&self, at: &Spanned, message: impl Into<String>) -> FormatError {
        FormatError::Semantic {
            line: at.line,
            col: at.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Spanned, FormatError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.syntax(tok.to_string()))
        }
    }

    fn expect_int(&mut self, what: &str) -> Result<(u32, Spanned), FormatError> {
        let at = self.peek().clone();
        let Tok::Int(digits) = &at.tok else {
            return Err(self.syntax(what));
        };
        let digits = digits.clone();
        self.bump();
        digits
            .parse::<u32>()
            .map(|v| (v, at.clone()))
            .map_err(|_| self.semantic(&at, format!("{} out of range: {}", what, digits)))
    }

    fn expect_name(&mut self, what: &str) -> Result<(String, Spanned), FormatError> {
        let at = self.peek().clone();
        let Tok::Ident(name) = &at.tok else {
            return Err(self.syntax(what));
        };
        let name = name.clone();
        self.bump();
        Ok((name, at))
    }

    fn end_statement(&mut self) -> Result<(), FormatError> {
        match self.peek().tok {
            Tok::Newline => {
                self.bump();
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.syntax("end of line")),
        }
    }

    fn require_algebra(&self, at: &Spanned) -> Result<u32, FormatError> {
        self.algebra
            .ok_or_else(|| self.semantic(at, "algebra must be declared first".to_string()))
    }

    fn document(&mut self) -> Result<Document, FormatError> {
        let mut doc = Document::default();
        let mut chart_names: BTreeSet<String> = BTreeSet::new();
        let mut map_names: BTreeSet<String> = BTreeSet::new();
        let mut space_names: BTreeSet<String> = BTreeSet::new();
        loop {
            match &self.peek().tok {
                Tok::Eof => break,
                Tok::Newline => {
                    self.bump();
                    continue;
                }
                _ => {}
            }
            let (keyword, at) = self.expect_name("a statement keyword")?;
            match keyword.as_str() {
                "algebra" => {
                    if self.algebra.is_some() {
                        return Err(self.semantic(&at, "duplicate algebra declaration"));
                    }
                    let (n, n_at) = self.expect_int("generator count")?;
                    if n > 16 {
                        return Err(
                            self.semantic(&n_at, format!("at most 16 generators, got {}", n))
                        );
                    }
                    self.algebra = Some(n);
                    doc.algebra = n;
                }
                "space" => {
                    let (name, name_at) = self.expect_name("a space name")?;
                    if !space_names.insert(name.clone()) {
                        return Err(self.semantic(&name_at, format!("duplicate space `{}`", name)));
                    }
                    let (ne, _) = self.expect_int("even dimension")?;
                    let (no, _) = self.expect_int("odd dimension")?;
                    doc.spaces.push((name, ne, no));
                }
                "chart" => {
                    let (name, name_at) = self.expect_name("a chart name")?;
                    let semi = if self.peek().tok == Tok::Ident("semi".to_string()) {
                        self.bump();
                        true
                    } else {
                        false
                    };
                    if !chart_names.insert(name.clone()) {
                        return Err(self.semantic(&name_at, format!("duplicate chart `{}`", name)));
                    }
                    doc.charts.push((name, semi));
                }
                "overlap" => {
                    let mut members = Vec::new();
                    loop {
                        let (name, name_at) = self.expect_name("a chart name")?;
                        if !chart_names.contains(&name) {
                            return Err(
                                self.semantic(&name_at, format!("undeclared chart `{}`", name))
                            );
                        }
                        members.push(name);
                        if matches!(self.peek().tok, Tok::Newline | Tok::Eof) {
                            break;
                        }
                    }
                    if members.len() < 2 {
                        return Err(self.semantic(&at, "overlap needs at least two charts"));
                    }
                    doc.overlaps.push(members);
                }
                "map" => {
                    let n = self.require_algebra(&at)?;
                    let decl = self.map_stmt(n, &mut chart_names, &mut map_names)?;
                    doc.maps.push(decl);
                }
                "task" => {
                    let n = self.require_algebra(&at)?;
                    let task = self.task_stmt(n, &chart_names, &map_names)?;
                    doc.tasks.push(task);
                }
                other => {
                    return Err(self.semantic(&at, format!("unknown statement `{}`", other)));
                }
            }
            self.end_statement()?;
        }
        if self.algebra.is_none() {
            return Err(FormatError::Semantic {
                line: 1,
                col: 1,
                message: "missing algebra declaration".to_string(),
            });
        }
        Ok(doc)
    }

    fn map_stmt(
        &mut self,
        n: u32,
        chart_names: &mut BTreeSet<String>,
        map_names: &mut BTreeSet<String>,
    ) -> Result<MapDecl, FormatError> {
        let (name, name_at) = self.expect_name("a map name")?;
        if !map_names.insert(name.clone()) {
            return Err(self.semantic(&name_at, format!("duplicate map `{}`", name)));
        }
        self.expect(Tok::LBracket)?;
        let mut labels = Vec::new();
        loop {
            let (label, _) = self.expect_name("a chart label")?;
            chart_names.insert(label.clone());
            labels.push(label);
            if self.peek().tok == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RBracket)?;
        self.expect(Tok::Colon)?;

        // (kind, index, expr); kind true = odd.
        let mut assigns: Vec<(bool, u32, Expr, Spanned)> = Vec::new();
        loop {
            let (var, var_at) = self.expect_name("a primed variable")?;
            let (odd, index) = parse_var_name(&var)
                .ok_or_else(|| self.semantic(&var_at, format!("invalid variable `{}`", var)))?;
            self.expect(Tok::Apostrophe)?;
            self.expect(Tok::Eq)?;
            let expr = self.expr(n, false)?;
            if assigns.iter().any(|(o, i, _, _)| *o == odd && *i == index) {
                return Err(self.semantic(&var_at, format!("variable `{}` assigned twice", var)));
            }
            assigns.push((odd, index, expr, var_at));
            if self.peek().tok == Tok::Semi {
                self.bump();
            } else {
                break;
            }
        }

        let tgt_even = assigns.iter().filter(|(o, ..)| !o).count() as u32;
        let tgt_odd = assigns.iter().filter(|(o, ..)| *o).count() as u32;
        for (odd, index, _, at) in &assigns {
            let bound = if *odd { tgt_odd } else { tgt_even };
            if *index > bound {
                return Err(self.semantic(
                    at,
                    format!("non-contiguous component indices (gap below index {})", index),
                ));
            }
        }
        let mut src_even = 0;
        let mut src_odd = 0;
        for (_, _, expr, _) in &assigns {
            expr.var_bounds(&mut src_even, &mut src_odd);
        }
        let src = SuperDomainSignature::new(src_even, src_odd);
        let tgt = SuperDomainSignature::new(tgt_even, tgt_odd);
        let mut comps = Vec::with_capacity(assigns.len());
        for want_odd in [false, true] {
            let upper = if want_odd { tgt_odd } else { tgt_even };
            for i in 1..=upper {
                let (_, _, expr, at) = assigns
                    .iter()
                    .find(|(o, idx, _, _)| *o == want_odd && *idx == i)
                    .expect("contiguity checked");
                let poly = expr.eval(n, src_even, src_odd)?;
                // Surface parity problems with the offending assign position.
                let _ = at;
                comps.push(poly);
            }
        }
        let map = SuperMap::new(n, src, tgt, comps).map_err(|e| {
            self.semantic(&name_at, format!("map `{}` is not parity-valid: {}", name, e))
        })?;
        Ok(MapDecl { name, labels, map })
    }

    fn task_stmt(
        &mut self,
        n: u32,
        chart_names: &BTreeSet<String>,
        map_names: &BTreeSet<String>,
    ) -> Result<TaskSpec, FormatError> {
        let (kind, at) = self.expect_name("a task kind")?;
        match kind.as_str() {
            "check" => {
                let n_max = if self.peek().tok == Tok::Ident("n_max".to_string()) {
                    self.bump();
                    Some(self.expect_int("n_max")?.0)
                } else {
                    None
                };
                Ok(TaskSpec::Check { n_max })
            }
            "solve" => {
                let lhs = self.expr(n, true)?;
                self.expect(Tok::Star)?;
                let (x, x_at) = self.expect_name("`X`")?;
                if x != "X" {
                    return Err(self.semantic(&x_at, format!("expected `X`, found `{}`", x)));
                }
                self.expect(Tok::Eq)?;
                let rhs = self.expr(n, false)?;
                Ok(TaskSpec::Solve {
                    lhs: self.constant_value(n, &lhs, &at)?,
                    rhs: self.constant_value(n, &rhs, &at)?,
                })
            }
            "berezinian" => {
                let (name, name_at) = self.expect_name("a map name")?;
                if !map_names.contains(&name) {
                    return Err(self.semantic(&name_at, format!("undeclared map `{}`", name)));
                }
                Ok(TaskSpec::Berezinian { map: name })
            }
            "semigroup" => {
                let mut charts = Vec::new();
                for _ in 0..2 {
                    let (name, name_at) = self.expect_name("a chart name")?;
                    if !chart_names.contains(&name) {
                        return Err(self.semantic(&name_at, format!("undeclared chart `{}`", name)));
                    }
                    charts.push(name);
                }
                let (n_max, _) = self.expect_int("n_max")?;
                let chart_b = charts.pop().unwrap();
                let chart_a = charts.pop().unwrap();
                Ok(TaskSpec::Semigroup {
                    chart_a,
                    chart_b,
                    n_max,
                })
            }
            "homotopy" => {
                let (kind_word, kind_at) = self.expect_name("`even` or `odd`")?;
                let kind = match kind_word.as_str() {
                    "even" => ParameterKind::Even,
                    "odd" => ParameterKind::Odd,
                    other => {
                        return Err(self.semantic(
                            &kind_at,
                            format!("expected `even` or `odd`, found `{}`", other),
                        ))
                    }
                };
                let mut names = Vec::new();
                for what in ["family map", "start map", "end map"] {
                    let (name, name_at) = self.expect_name(what)?;
                    if !map_names.contains(&name) {
                        return Err(self.semantic(&name_at, format!("undeclared map `{}`", name)));
                    }
                    names.push(name);
                }
                let mut endpoints = Vec::new();
                for _ in 0..2 {
                    self.expect(Tok::LParen)?;
                    let e = self.expr(n, false)?;
                    self.expect(Tok::RParen)?;
                    endpoints.push(self.constant_value(n, &e, &at)?);
                }
                let end = endpoints.pop().unwrap();
                let start = endpoints.pop().unwrap();
                let g = names.pop().unwrap();
                let f = names.pop().unwrap();
                let gamma = names.pop().unwrap();
                Ok(TaskSpec::Homotopy {
                    kind,
                    gamma,
                    f,
                    g,
                    start,
                    end,
                })
            }
            other => Err(self.semantic(&at, format!("unknown task `{}`", other))),
        }
    }

    fn constant_value(
        &self,
        n: u32,
        expr: &Expr,
        at: &Spanned,
    ) -> Result<GrassmannElement, FormatError> {
        let mut max_x = 0;
        let mut max_t = 0;
        expr.var_bounds(&mut max_x, &mut max_t);
        if max_x > 0 || max_t > 0 {
            return Err(self.semantic(at, "expected a constant expression (no x/t variables)"));
        }
        Ok(expr.eval(n, 0, 0)?.constant_term())
    }

    /// `expr := ["-"] term { ("+"|"-") term }`. With `stop_before_x` the
    /// parse ends before a `* X` continuation (the solve-task unknown).
    fn expr(&mut self, n: u32, stop_before_x: bool) -> Result<Expr, FormatError> {
        let mut acc = if self.peek().tok == Tok::Minus {
            self.bump();
            Expr::Neg(Box::new(self.term(n, stop_before_x)?))
        } else {
            self.term(n, stop_before_x)?
        };
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term(n, stop_before_x)?));
                }
                Tok::Minus => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term(n, stop_before_x)?));
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    /// `term := [rat] { "*" factor }`; a factor may directly follow the
    /// leading rational without `*` (as in `2 g1*g2`). Repeated plain odd
    /// factors within one product are rejected rather than silently zeroed.
    fn term(&mut self, n: u32, stop_before_x: bool) -> Result<Expr, FormatError> {
        let mut seen_g: BTreeSet<u32> = BTreeSet::new();
        let mut seen_t: BTreeSet<u32> = BTreeSet::new();
        let mut acc = self.factor(n, &mut seen_g, &mut seen_t)?;
        if matches!(acc, Expr::Rat(_)) && self.starts_factor() {
            let next = self.factor(n, &mut seen_g, &mut seen_t)?;
            acc = Expr::Mul(Box::new(acc), Box::new(next));
        }
        while self.peek().tok == Tok::Star {
            if stop_before_x && self.peek2().tok == Tok::Ident("X".to_string()) {
                break;
            }
            self.bump();
            let next = self.factor(n, &mut seen_g, &mut seen_t)?;
            acc = Expr::Mul(Box::new(acc), Box::new(next));
        }
        Ok(acc)
    }

    fn starts_factor(&self) -> bool {
        match &self.peek().tok {
            Tok::LParen => true,
            Tok::Ident(s) => parse_var_or_gen(s).is_some(),
            _ => false,
        }
    }

    fn factor(
        &mut self,
        n: u32,
        seen_g: &mut BTreeSet<u32>,
        seen_t: &mut BTreeSet<u32>,
    ) -> Result<Expr, FormatError> {
        let at = self.peek().clone();
        match &at.tok {
            Tok::LParen => {
                self.bump();
                let inner = self.expr(n, false)?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Int(digits) => {
                let digits = digits.clone();
                self.bump();
                let numer: BigInt = digits.parse().expect("digit string");
                if self.peek().tok == Tok::Slash {
                    self.bump();
                    let (den_digits, den_at) = match self.peek().tok.clone() {
                        Tok::Int(d) => {
                            let at = self.bump();
                            (d, at)
                        }
                        _ => return Err(self.syntax("a denominator")),
                    };
                    let denom: BigInt = den_digits.parse().expect("digit string");
                    if denom.is_zero() {
                        return Err(self.semantic(&den_at, "zero denominator"));
                    }
                    Ok(Expr::Rat(BigRational::new(numer, denom)))
                } else {
                    Ok(Expr::Rat(BigRational::from(numer)))
                }
            }
            Tok::Ident(name) => {
                let name = name.clone();
                let Some((kind, index)) = parse_var_or_gen(&name) else {
                    return Err(self.syntax("a factor"));
                };
                self.bump();
                match kind {
                    'x' => {
                        let power = if self.peek().tok == Tok::Caret {
                            self.bump();
                            self.expect_int("an exponent")?.0
                        } else {
                            1
                        };
                        Ok(Expr::X { index, power })
                    }
                    't' => {
                        if !seen_t.insert(index) {
                            return Err(
                                self.semantic(&at, format!("repeated odd variable t{}", index))
                            );
                        }
                        Ok(Expr::T(index))
                    }
                    'g' => {
                        if index == 0 || index > n {
                            return Err(self.semantic(
                                &at,
                                format!("generator g{} outside algebra of {} generators", index, n),
                            ));
                        }
                        if !seen_g.insert(index) {
                            return Err(
                                self.semantic(&at, format!("repeated odd generator g{}", index))
                            );
                        }
                        Ok(Expr::G(index))
                    }
                    _ => unreachable!(),
                }
            }
            _ => Err(self.syntax("a factor")),
        }
    }
}

/// `x3` → (false, 3); `t2` → (true, 2).
fn parse_var_name(name: &str) -> Option<(bool, u32)> {
    let (kind, index) = parse_var_or_gen(name)?;
    match kind {
        'x' => Some((false, index)),
        't' => Some((true, index)),
        _ => None,
    }
}

fn parse_var_or_gen(name: &str) -> Option<(char, u32)> {
    let mut chars = name.chars();
    let head = chars.next()?;
    if !matches!(head, 'x' | 't' | 'g') {
        return None;
    }
    let rest = chars.as_str();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let index: u32 = rest.parse().ok()?;
    if index == 0 {
        return None;
    }
    Some((head, index))
}

// ---------------------------------------------------------------------------
// Serializer
// ---------------------------------------------------------------------------

fn render_grassmann(e: &GrassmannElement) -> String {
    e.to_string()
}

fn render_map(decl: &MapDecl, out: &mut String) {
    out.push_str("map ");
    out.push_str(&decl.name);
    out.push('[');
    out.push_str(&decl.labels.join(","));
    out.push_str("]: ");
    let tgt = decl.map.target();
    let mut parts = Vec::new();
    for i in 1..=tgt.n_even {
        parts.push(format!(
            "x{}' = {}",
            i,
            decl.map.components()[(i - 1) as usize]
        ));
    }
    for j in 1..=tgt.n_odd {
        parts.push(format!(
            "t{}' = {}",
            j,
            decl.map.components()[(tgt.n_even + j - 1) as usize]
        ));
    }
    out.push_str(&parts.join("; "));
    out.push('\n');
}

fn render_task(task: &TaskSpec, out: &mut String) {
    match task {
        TaskSpec::Check { n_max } => {
            out.push_str("task check");
            if let Some(k) = n_max {
                out.push_str(&format!(" n_max {}", k));
            }
            out.push('\n');
        }
        TaskSpec::Solve { lhs, rhs } => {
            out.push_str(&format!(
                "task solve {} * X = {}\n",
                render_grassmann(lhs),
                render_grassmann(rhs)
            ));
        }
        TaskSpec::Berezinian { map } => {
            out.push_str(&format!("task berezinian {}\n", map));
        }
        TaskSpec::Semigroup {
            chart_a,
            chart_b,
            n_max,
        } => {
            out.push_str(&format!("task semigroup {} {} {}\n", chart_a, chart_b, n_max));
        }
        TaskSpec::Homotopy {
            kind,
            gamma,
            f,
            g,
            start,
            end,
        } => {
            let word = match kind {
                ParameterKind::Even => "even",
                ParameterKind::Odd => "odd",
            };
            out.push_str(&format!(
                "task homotopy {} {} {} {} ({}) ({})\n",
                word,
                gamma,
                f,
                g,
                render_grassmann(start),
                render_grassmann(end)
            ));
        }
    }
}

/// Canonical rendering: statements grouped by kind, LF line endings, one
/// statement per line. `parse(serialize(d))` equals `d` structurally for any
/// parsed document.
pub fn serialize(doc: &Document) -> String {
    let mut out = String::new();
    out.push_str(&format!("algebra {}\n", doc.algebra));
    for (name, ne, no) in &doc.spaces {
        out.push_str(&format!("space {} {} {}\n", name, ne, no));
    }
    for (name, semi) in &doc.charts {
        if *semi {
            out.push_str(&format!("chart {} semi\n", name));
        } else {
            out.push_str(&format!("chart {}\n", name));
        }
    }
    for set in &doc.overlaps {
        out.push_str(&format!("overlap {}\n", set.join(" ")));
    }
    for decl in &doc.maps {
        render_map(decl, &mut out);
    }
    for task in &doc.tasks {
        render_task(task, &mut out);
    }
    out
}
