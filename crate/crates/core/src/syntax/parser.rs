//! Lexer and recursive-descent parser for `.htc` programs.

use std::fmt;

use thiserror::Error;

use super::{
    AggForm, AggOp, Atom, EvalMode, Formula, Head, Literal, MultisetElem, Program, Rel, Rule,
    Summand, SumVariant, Term,
};
use crate::model::{DomainDecl, ModelError, Value, Var};

/// Defaults applied where the source text leaves a choice open.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Mode of set-like aggregate elements written without brackets.
    pub default_mode: EvalMode,
    /// Variant of the bare `sum` keyword when no `#sum_variant` directive is given.
    pub default_sum: SumVariant,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            default_mode: EvalMode::Vc,
            default_sum: SumVariant::Strict,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("conditional term opened with `{open}` but closed with `{close}`")]
    ModeBracketMismatch { open: char, close: char },
    #[error("{0}")]
    Nesting(String),
    #[error(transparent)]
    Domain(#[from] ModelError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Str(String),
    Hash(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Comma,
    Semi,
    Colon,
    ColonDash,
    ColonEq,
    Pipe,
    Plus,
    Minus,
    Star,
    Dot,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Str(s) => return write!(f, "string {}", Value::str(s.as_str())),
            Tok::Hash(s) => return write!(f, "`#{s}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::ColonDash => ":-",
            Tok::ColonEq => ":=",
            Tok::Pipe => "|",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

const KEYWORDS: &[&str] = &[
    "not", "and", "or", "df", "is_int", "sum", "sum_strict", "sum_cl", "sum_gz", "sum_typed",
    "concat", "count",
];

fn syntax_err(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        column: pos.column,
        kind: ParseErrorKind::Syntax(msg.into()),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let two = |a: Tok, b: Tok, want: char| if next == Some(want) { (a, 2) } else { (b, 1) };
        let simple = match c {
            '(' => Some((Tok::LParen, 1)),
            ')' => Some((Tok::RParen, 1)),
            '[' => Some((Tok::LBrack, 1)),
            ']' => Some((Tok::RBrack, 1)),
            '{' => Some((Tok::LBrace, 1)),
            '}' => Some((Tok::RBrace, 1)),
            '<' => Some(two(Tok::Le, Tok::Lt, '=')),
            '>' => Some(two(Tok::Ge, Tok::Gt, '=')),
            '=' => Some((Tok::Eq, 1)),
            ',' => Some((Tok::Comma, 1)),
            ';' => Some((Tok::Semi, 1)),
            '|' => Some((Tok::Pipe, 1)),
            '+' => Some((Tok::Plus, 1)),
            '*' => Some((Tok::Star, 1)),
            '.' => Some((Tok::Dot, 1)),
            '-' => Some(two(Tok::Arrow, Tok::Minus, '>')),
            ':' => Some(match next {
                Some('-') => (Tok::ColonDash, 2),
                Some('=') => (Tok::ColonEq, 2),
                _ => (Tok::Colon, 1),
            }),
            '!' if next == Some('=') => Some((Tok::Ne, 2)),
            _ => None,
        };
        if let Some((tok, n)) = simple {
            for _ in 0..n {
                bump!();
            }
            out.push((tok, pos));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let s: String = chars[start..i].iter().collect();
            let n: u64 = s
                .parse()
                .map_err(|_| syntax_err(pos, format!("integer literal {s} is out of range")))?;
            out.push((Tok::Int(n), pos));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' || c == '#' {
            let hash = c == '#';
            if hash {
                bump!();
            }
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let s: String = chars[start..i].iter().collect();
            if hash {
                if s.is_empty() {
                    return Err(syntax_err(pos, "expected a directive name after `#`"));
                }
                out.push((Tok::Hash(s), pos));
            } else {
                out.push((Tok::Ident(s), pos));
            }
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                match chars.get(i).copied() {
                    None => return Err(syntax_err(pos, "unterminated string literal")),
                    Some('"') => {
                        bump!();
                        break;
                    }
                    Some('\\') => {
                        bump!();
                        let esc = match chars.get(i).copied() {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => {
                                return Err(syntax_err(
                                    Pos { line, column: col },
                                    "unknown escape sequence in string literal",
                                ))
                            }
                        };
                        bump!();
                        s.push(esc);
                    }
                    Some(ch) => {
                        bump!();
                        s.push(ch);
                    }
                }
            }
            out.push((Tok::Str(s), pos));
            continue;
        }
        return Err(syntax_err(pos, format!("unexpected character `{c}`")));
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

/// Where a term is being parsed, which limits what may occur in it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AggCtx {
    /// Any aggregate.
    Any,
    /// Only sequence aggregates over basic terms.
    BasicOnly,
    /// No aggregate at all.
    Forbidden,
}

#[derive(Clone, Copy, Debug)]
struct Ctx {
    cond_ok: bool,
    agg: AggCtx,
    /// Human-readable place, used in nesting errors.
    place: &'static str,
}

const TOP: Ctx = Ctx {
    cond_ok: true,
    agg: AggCtx::Any,
    place: "a rule",
};
const CONDITION: Ctx = Ctx {
    cond_ok: false,
    agg: AggCtx::BasicOnly,
    place: "a condition",
};
const BRANCH: Ctx = Ctx {
    cond_ok: false,
    agg: AggCtx::Forbidden,
    place: "a conditional branch",
};

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    opts: ParseOptions,
    default_sum: SumVariant,
    uses: Vec<(Var, Pos)>,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn advance(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.advance();
            true
        } else {
            false
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect(&mut self, t: &Tok) -> PResult<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("{t}")))
        }
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        syntax_err(self.pos(), format!("expected {wanted}, found {}", self.peek()))
    }

    fn nesting(&self, msg: String) -> ParseError {
        ParseError {
            line: self.pos().line,
            column: self.pos().column,
            kind: ParseErrorKind::Nesting(msg),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut domain = DomainDecl::new();
        let mut rules = Vec::new();
        let mut sum_directive = false;
        while *self.peek() != Tok::Eof {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Hash(d) if d == "domain" => {
                    self.advance();
                    self.domain_directive(&mut domain)?;
                }
                Tok::Hash(d) if d == "sum_variant" => {
                    self.advance();
                    if sum_directive {
                        return Err(syntax_err(pos, "duplicate #sum_variant directive"));
                    }
                    // the variant was already applied by the pre-scan
                    self.sum_variant_name()?;
                    self.expect(&Tok::Dot)?;
                    sum_directive = true;
                }
                _ => rules.push(self.rule()?),
            }
        }
        for (v, pos) in &self.uses {
            if !domain.contains(v.name()) {
                return Err(ParseError {
                    line: pos.line,
                    column: pos.column,
                    kind: ParseErrorKind::UndeclaredVariable(v.name().to_owned()),
                });
            }
        }
        Ok(Program {
            rules,
            domain,
            default_mode: self.opts.default_mode,
            default_sum: self.default_sum,
            sum_directive,
        })
    }

    fn sum_variant_name(&mut self) -> PResult<SumVariant> {
        let pos = self.pos();
        let Tok::Ident(mut name) = self.advance() else {
            return Err(syntax_err(pos, "expected a sum variant name"));
        };
        if *self.peek() == Tok::Minus && matches!(self.peek_at(1), Tok::Ident(s) if s == "typed") {
            self.advance();
            self.advance();
            name.push_str("-typed");
        }
        SumVariant::from_keyword(&name).ok_or_else(|| {
            syntax_err(
                pos,
                format!("unknown sum variant `{name}` (expected strict, cl, gz or strict-typed)"),
            )
        })
    }

    fn domain_directive(&mut self, domain: &mut DomainDecl) -> PResult<()> {
        let mut vars = Vec::new();
        loop {
            let pos = self.pos();
            match self.advance() {
                Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => vars.push((Var::new(s), pos)),
                _ => return Err(syntax_err(pos, "expected a variable name in #domain")),
            }
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(&Tok::Eq)?;
        self.expect(&Tok::LBrace)?;
        let mut values = Vec::new();
        if *self.peek() != Tok::RBrace {
            loop {
                values.push(self.constant()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(&Tok::RBrace)?;
        self.expect(&Tok::Dot)?;
        for (v, pos) in vars {
            domain.declare(v, values.clone()).map_err(|e| ParseError {
                line: pos.line,
                column: pos.column,
                kind: ParseErrorKind::Domain(e),
            })?;
        }
        Ok(())
    }

    fn constant(&mut self) -> PResult<Value> {
        let pos = self.pos();
        let neg = self.eat(&Tok::Minus);
        match self.advance() {
            Tok::Int(n) => Ok(Value::Int(signed(n, neg, pos)?)),
            Tok::Str(s) if !neg => Ok(Value::Str(s)),
            _ => Err(syntax_err(pos, "expected an integer or string constant")),
        }
    }

    fn rule(&mut self) -> PResult<Rule> {
        let head = if *self.peek() == Tok::ColonDash {
            Head::Disjunction(Vec::new())
        } else if matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(1) == Tok::ColonEq {
            let pos = self.pos();
            let Tok::Ident(name) = self.advance() else {
                unreachable!()
            };
            if KEYWORDS.contains(&name.as_str()) {
                return Err(syntax_err(pos, format!("`{name}` is a keyword")));
            }
            let var = Var::new(name);
            self.uses.push((var.clone(), pos));
            self.advance();
            let term = self.term(TOP)?;
            Head::Assign { var, term }
        } else {
            let mut lits = vec![self.literal()?];
            while self.eat(&Tok::Semi) {
                lits.push(self.literal()?);
            }
            Head::Disjunction(lits)
        };
        let mut body = Vec::new();
        if self.eat(&Tok::ColonDash) {
            body.push(self.literal()?);
            while self.eat(&Tok::Comma) {
                body.push(self.literal()?);
            }
        }
        self.expect(&Tok::Dot)?;
        Ok(Rule { head, body })
    }

    fn literal(&mut self) -> PResult<Literal> {
        let negated = if self.is_kw("not") {
            self.advance();
            true
        } else {
            false
        };
        Ok(Literal {
            negated,
            atom: self.atom(TOP)?,
        })
    }

    fn atom(&mut self, ctx: Ctx) -> PResult<Atom> {
        for (kw, is_df) in [("df", true), ("is_int", false)] {
            if self.is_kw(kw) {
                self.advance();
                self.expect(&Tok::LParen)?;
                let t = self.term(ctx)?;
                self.expect(&Tok::RParen)?;
                return Ok(if is_df { Atom::Df(t) } else { Atom::IsInt(t) });
            }
        }
        let lhs = self.term(ctx)?;
        let rel = match self.peek() {
            Tok::Le => Rel::Le,
            Tok::Lt => Rel::Lt,
            Tok::Eq => Rel::Eq,
            Tok::Ne => Rel::Ne,
            Tok::Ge => Rel::Ge,
            Tok::Gt => Rel::Gt,
            _ => return Err(self.unexpected("a comparison operator")),
        };
        self.advance();
        let rhs = self.term(ctx)?;
        Ok(Atom::Cmp { lhs, rel, rhs })
    }

    fn formula(&mut self, ctx: Ctx) -> PResult<Formula> {
        let lhs = self.disjunction(ctx)?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula(ctx)?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self, ctx: Ctx) -> PResult<Formula> {
        let mut f = self.conjunction(ctx)?;
        while self.is_kw("or") {
            self.advance();
            f = Formula::or(f, self.conjunction(ctx)?);
        }
        Ok(f)
    }

    fn conjunction(&mut self, ctx: Ctx) -> PResult<Formula> {
        let mut f = self.unary(ctx)?;
        while self.is_kw("and") {
            self.advance();
            f = Formula::and(f, self.unary(ctx)?);
        }
        Ok(f)
    }

    fn unary(&mut self, ctx: Ctx) -> PResult<Formula> {
        if self.is_kw("not") {
            self.advance();
            return Ok(Formula::not(self.unary(ctx)?));
        }
        match self.peek() {
            Tok::Hash(h) if h == "true" => {
                self.advance();
                Ok(Formula::top())
            }
            Tok::Hash(h) if h == "false" => {
                self.advance();
                Ok(Formula::Bot)
            }
            Tok::LParen if !self.paren_opens_cond() => {
                self.advance();
                let f = self.formula(ctx)?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            _ => Ok(Formula::Atom(self.atom(ctx)?)),
        }
    }

    /// Decides whether the `(` under the cursor starts a conditional term
    /// rather than a parenthesised formula: a conditional term has a `|`
    /// at its own nesting depth.
    fn paren_opens_cond(&self) -> bool {
        let mut depth = 0usize;
        for (t, _) in &self.toks[self.i..] {
            match t {
                Tok::LParen | Tok::LBrack | Tok::LBrace => depth += 1,
                Tok::RParen | Tok::RBrack | Tok::RBrace => {
                    depth -= 1;
                    if depth == 0 {
                        return false;
                    }
                }
                Tok::Pipe if depth == 1 => return true,
                Tok::Dot | Tok::Eof => return false,
                _ => {}
            }
        }
        false
    }

    fn term(&mut self, ctx: Ctx) -> PResult<Term> {
        let start = self.pos();
        let mut summands: Vec<Summand> = Vec::new();
        let mut first = true;
        loop {
            let neg = if first {
                self.eat(&Tok::Minus)
            } else if self.eat(&Tok::Plus) {
                false
            } else if self.eat(&Tok::Minus) {
                true
            } else {
                break;
            };
            let mut neg = neg;
            while !first && self.eat(&Tok::Minus) {
                neg = !neg;
            }
            first = false;
            let pos = self.pos();
            if let Tok::Int(n) = *self.peek() {
                self.advance();
                let k = signed(n, neg, pos)?;
                if self.eat(&Tok::Star) {
                    let t = self.primary(ctx)?;
                    summands.push(Summand { coef: k, term: t });
                } else {
                    summands.push(Summand {
                        coef: 1,
                        term: Term::int(k),
                    });
                }
            } else {
                let t = self.primary(ctx)?;
                summands.push(Summand {
                    coef: if neg { -1 } else { 1 },
                    term: t,
                });
            }
        }
        if summands.len() == 1 && summands[0].coef == 1 {
            return Ok(summands.pop().unwrap().term);
        }
        for s in &summands {
            let ok = match &s.term {
                Term::Var(_) | Term::Undef | Term::Cond(_) => true,
                Term::Const(Value::Int(_)) => s.coef == 1,
                _ => false,
            };
            if !ok {
                return Err(syntax_err(
                    start,
                    "linear terms may only combine variables, integers, #u and conditional terms",
                ));
            }
        }
        Ok(Term::Linear(summands))
    }

    fn primary(&mut self, ctx: Ctx) -> PResult<Term> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.advance();
                let v = Var::new(s);
                self.uses.push((v.clone(), pos));
                Ok(Term::Var(v))
            }
            Tok::Ident(s) => {
                let op = match s.as_str() {
                    "sum" => AggOp::Sum(self.default_sum),
                    "sum_strict" => AggOp::Sum(SumVariant::Strict),
                    "sum_cl" => AggOp::Sum(SumVariant::Cl),
                    "sum_gz" => AggOp::Sum(SumVariant::Gz),
                    "sum_typed" => AggOp::Sum(SumVariant::StrictTyped),
                    "concat" => AggOp::Concat,
                    "count" => AggOp::Count,
                    _ => return Err(self.unexpected("a term")),
                };
                self.advance();
                self.aggregate(op, ctx)
            }
            Tok::Int(n) => {
                self.advance();
                Ok(Term::int(signed(n, false, pos)?))
            }
            Tok::Str(s) => {
                self.advance();
                Ok(Term::Const(Value::Str(s)))
            }
            Tok::Hash(h) if h == "u" => {
                self.advance();
                Ok(Term::Undef)
            }
            Tok::LParen | Tok::LBrack => {
                if !ctx.cond_ok {
                    return Err(self.nesting(format!(
                        "conditional terms may not occur inside {}",
                        ctx.place
                    )));
                }
                let (open, mode) = if self.advance() == Tok::LParen {
                    ('(', EvalMode::Vc)
                } else {
                    ('[', EvalMode::Df)
                };
                let then = self.term(BRANCH)?;
                self.expect(&Tok::Pipe)?;
                let else_ = self.term(BRANCH)?;
                self.expect(&Tok::Colon)?;
                let cond = self.formula(CONDITION)?;
                self.close_bracket(open)?;
                Ok(Term::cond(then, else_, cond, mode))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn close_bracket(&mut self, open: char) -> PResult<()> {
        let want = if open == '(' { Tok::RParen } else { Tok::RBrack };
        let other = if open == '(' { Tok::RBrack } else { Tok::RParen };
        if self.eat(&want) {
            return Ok(());
        }
        if *self.peek() == other {
            let close = if open == '(' { ']' } else { ')' };
            return Err(ParseError {
                line: self.pos().line,
                column: self.pos().column,
                kind: ParseErrorKind::ModeBracketMismatch { open, close },
            });
        }
        Err(self.unexpected(&format!("{want}")))
    }

    fn aggregate(&mut self, op: AggOp, ctx: Ctx) -> PResult<Term> {
        if ctx.agg == AggCtx::Forbidden {
            return Err(self.nesting(format!("aggregates may not occur inside {}", ctx.place)));
        }
        let inner = Ctx {
            cond_ok: ctx.cond_ok,
            agg: AggCtx::Forbidden,
            place: "an aggregate element",
        };
        match self.peek() {
            Tok::Lt => {
                if op == AggOp::Count {
                    return Err(syntax_err(self.pos(), "count takes a set of elements `count{...}`"));
                }
                self.advance();
                let mut elems = Vec::new();
                if *self.peek() != Tok::Gt {
                    loop {
                        elems.push(self.term(inner)?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&Tok::Gt)?;
                Ok(Term::seq(op, elems))
            }
            Tok::LBrace => {
                if ctx.agg != AggCtx::Any {
                    return Err(self.nesting(format!(
                        "set-like aggregates may not occur inside {}",
                        ctx.place
                    )));
                }
                self.advance();
                let mut elems = Vec::new();
                if *self.peek() != Tok::RBrace {
                    loop {
                        elems.push(self.multiset_elem()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(&Tok::RBrace)?;
                Ok(Term::agg(op, AggForm::Multiset(elems)))
            }
            _ => Err(self.unexpected("`<` or `{` after the aggregate name")),
        }
    }

    fn multiset_elem(&mut self) -> PResult<MultisetElem> {
        let elem_ctx = Ctx {
            cond_ok: false,
            agg: AggCtx::Forbidden,
            place: "a set-like aggregate element",
        };
        let cond_ctx = Ctx {
            cond_ok: false,
            agg: AggCtx::Forbidden,
            place: "a set-like aggregate element",
        };
        let bracket = match self.peek() {
            Tok::LParen => Some(('(', EvalMode::Vc)),
            Tok::LBrack => Some(('[', EvalMode::Df)),
            _ => None,
        };
        if let Some((open, mode)) = bracket {
            self.advance();
            let term = self.term(elem_ctx)?;
            let cond = if self.eat(&Tok::Colon) {
                Some(self.formula(cond_ctx)?)
            } else {
                None
            };
            self.close_bracket(open)?;
            return Ok(MultisetElem { term, cond, mode });
        }
        let term = self.term(elem_ctx)?;
        let cond = if self.eat(&Tok::Colon) {
            Some(self.formula(cond_ctx)?)
        } else {
            None
        };
        Ok(MultisetElem {
            term,
            cond,
            mode: self.opts.default_mode,
        })
    }
}

fn signed(n: u64, neg: bool, pos: Pos) -> PResult<i64> {
    let v = if neg { -(n as i128) } else { n as i128 };
    i64::try_from(v).map_err(|_| syntax_err(pos, format!("integer literal {v} is out of range")))
}

/// Finds a `#sum_variant` directive so that bare `sum` keywords anywhere in
/// the file resolve to it.
fn prescan_sum_variant(toks: &[(Tok, Pos)]) -> PResult<Option<SumVariant>> {
    for (k, (t, _)) in toks.iter().enumerate() {
        if matches!(t, Tok::Hash(h) if h == "sum_variant") {
            let mut p = Parser {
                toks: toks[k + 1..].to_vec(),
                i: 0,
                opts: ParseOptions::default(),
                default_sum: SumVariant::Strict,
                uses: Vec::new(),
            };
            return p.sum_variant_name().map(Some);
        }
    }
    Ok(None)
}

/// Parses with default options: unbracketed aggregate elements are VC and
/// `sum` is strict unless a directive says otherwise.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse_program_with(text, ParseOptions::default())
}

pub fn parse_program_with(text: &str, opts: ParseOptions) -> Result<Program, ParseError> {
    let toks = lex(text)?;
    let default_sum = prescan_sum_variant(&toks)?.unwrap_or(opts.default_sum);
    let mut p = Parser {
        toks,
        i: 0,
        opts,
        default_sum,
        uses: Vec::new(),
    };
    p.program()
}
