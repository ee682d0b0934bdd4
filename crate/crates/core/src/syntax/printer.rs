//! Pretty-printer producing text the parser reads back to the same AST.

use std::fmt::{self, Write};

use super::{
    AggForm, AggOp, AggTerm, Atom, CondTerm, EvalMode, Formula, Head, Literal, MultisetElem,
    Program, Rule, Summand, SumVariant, Term,
};
use crate::model::Value;

/// Printing context: the defaults that let sugar be written without
/// explicit annotations.
#[derive(Clone, Copy, Debug)]
pub struct Printer {
    /// Set-like aggregate elements in this mode are printed bare.
    /// `None` brackets every element.
    pub default_mode: Option<EvalMode>,
    /// Variant printed as the bare `sum` keyword.
    pub default_sum: SumVariant,
}

impl Default for Printer {
    fn default() -> Self {
        Printer {
            default_mode: None,
            default_sum: SumVariant::Strict,
        }
    }
}

const PREC_IMPL: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_UNARY: u8 = 4;

impl Printer {
    pub fn for_program(p: &Program) -> Printer {
        Printer {
            default_mode: Some(p.default_mode),
            default_sum: p.default_sum,
        }
    }

    pub fn term(&self, t: &Term) -> String {
        let mut s = String::new();
        self.write_term(&mut s, t).unwrap();
        s
    }

    pub fn atom(&self, a: &Atom) -> String {
        let mut s = String::new();
        self.write_atom(&mut s, a).unwrap();
        s
    }

    pub fn formula(&self, f: &Formula) -> String {
        let mut s = String::new();
        self.write_formula(&mut s, f, PREC_IMPL).unwrap();
        s
    }

    pub fn rule(&self, r: &Rule) -> String {
        let mut s = String::new();
        self.write_rule(&mut s, r).unwrap();
        s
    }

    pub fn program(&self, p: &Program) -> String {
        let mut s = String::new();
        if p.sum_directive {
            writeln!(s, "#sum_variant {}.", p.default_sum.keyword()).unwrap();
        }
        for (var, cands) in p.domain.iter() {
            let list: Vec<String> = cands.iter().map(Value::to_string).collect();
            writeln!(s, "#domain {var} = {{{}}}.", list.join(", ")).unwrap();
        }
        for r in &p.rules {
            self.write_rule(&mut s, r).unwrap();
            s.push('\n');
        }
        s
    }

    fn write_term(&self, out: &mut impl Write, t: &Term) -> fmt::Result {
        match t {
            Term::Var(v) => write!(out, "{v}"),
            Term::Const(c) => write!(out, "{c}"),
            Term::Undef => out.write_str("#u"),
            Term::Linear(ss) => self.write_linear(out, ss),
            Term::Cond(c) => self.write_cond(out, c),
            Term::Agg(a) => self.write_agg(out, a),
        }
    }

    fn write_linear(&self, out: &mut impl Write, ss: &[Summand]) -> fmt::Result {
        for (i, s) in ss.iter().enumerate() {
            if let (1, Term::Const(Value::Int(k))) = (s.coef, &s.term) {
                let k = *k as i128;
                match (i, k < 0) {
                    (0, _) => write!(out, "{k}")?,
                    (_, true) => write!(out, " - {}", -k)?,
                    (_, false) => write!(out, " + {k}")?,
                }
                continue;
            }
            let c = s.coef as i128;
            let mag = c.abs();
            match (i, c < 0) {
                (0, true) => out.write_str("-")?,
                (0, false) => {}
                (_, true) => out.write_str(" - ")?,
                (_, false) => out.write_str(" + ")?,
            }
            if mag != 1 {
                write!(out, "{mag}*")?;
            }
            self.write_term(out, &s.term)?;
        }
        Ok(())
    }

    fn write_cond(&self, out: &mut impl Write, c: &CondTerm) -> fmt::Result {
        let (open, close) = match c.mode {
            EvalMode::Vc => ('(', ')'),
            EvalMode::Df => ('[', ']'),
        };
        out.write_char(open)?;
        self.write_term(out, &c.then)?;
        out.write_str(" | ")?;
        self.write_term(out, &c.else_)?;
        out.write_str(" : ")?;
        self.write_formula(out, &c.cond, PREC_IMPL)?;
        out.write_char(close)
    }

    fn write_agg(&self, out: &mut impl Write, a: &AggTerm) -> fmt::Result {
        match a.op {
            AggOp::Sum(v) if v == self.default_sum => out.write_str("sum")?,
            AggOp::Sum(v) => out.write_str(v.aggregate_keyword())?,
            AggOp::Concat => out.write_str("concat")?,
            AggOp::Count => out.write_str("count")?,
        }
        match &a.form {
            AggForm::Seq(ts) => {
                out.write_char('<')?;
                for (i, t) in ts.iter().enumerate() {
                    if i > 0 {
                        out.write_str(", ")?;
                    }
                    self.write_term(out, t)?;
                }
                out.write_char('>')
            }
            AggForm::Multiset(es) => {
                out.write_char('{')?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        out.write_str(", ")?;
                    }
                    self.write_elem(out, e)?;
                }
                out.write_char('}')
            }
        }
    }

    fn write_elem(&self, out: &mut impl Write, e: &MultisetElem) -> fmt::Result {
        let brackets = match (self.default_mode, e.mode) {
            (Some(d), m) if d == m => None,
            (_, EvalMode::Vc) => Some(('(', ')')),
            (_, EvalMode::Df) => Some(('[', ']')),
        };
        if let Some((o, _)) = brackets {
            out.write_char(o)?;
        }
        self.write_term(out, &e.term)?;
        if let Some(c) = &e.cond {
            out.write_str(" : ")?;
            self.write_formula(out, c, PREC_IMPL)?;
        }
        if let Some((_, c)) = brackets {
            out.write_char(c)?;
        }
        Ok(())
    }

    fn write_atom(&self, out: &mut impl Write, a: &Atom) -> fmt::Result {
        match a {
            Atom::Cmp { lhs, rel, rhs } => {
                self.write_term(out, lhs)?;
                write!(out, " {} ", rel.symbol())?;
                self.write_term(out, rhs)
            }
            Atom::Df(t) => {
                out.write_str("df(")?;
                self.write_term(out, t)?;
                out.write_char(')')
            }
            Atom::IsInt(t) => {
                out.write_str("is_int(")?;
                self.write_term(out, t)?;
                out.write_char(')')
            }
        }
    }

    fn write_formula(&self, out: &mut impl Write, f: &Formula, ctx: u8) -> fmt::Result {
        if f.is_top() {
            return out.write_str("#true");
        }
        if let Some(inner) = f.as_negation() {
            out.write_str("not ")?;
            return self.write_formula(out, inner, PREC_UNARY);
        }
        let (prec, op, lhs, rhs, lp, rp) = match f {
            Formula::Bot => return out.write_str("#false"),
            Formula::Atom(a) => return self.write_atom(out, a),
            Formula::And(a, b) => (PREC_AND, "and", a, b, PREC_AND, PREC_UNARY),
            Formula::Or(a, b) => (PREC_OR, "or", a, b, PREC_OR, PREC_AND),
            Formula::Impl(a, b) => (PREC_IMPL, "->", a, b, PREC_OR, PREC_IMPL),
        };
        let paren = prec < ctx;
        if paren {
            out.write_char('(')?;
        }
        self.write_formula(out, lhs, lp)?;
        write!(out, " {op} ")?;
        self.write_formula(out, rhs, rp)?;
        if paren {
            out.write_char(')')?;
        }
        Ok(())
    }

    fn write_literal(&self, out: &mut impl Write, l: &Literal) -> fmt::Result {
        if l.negated {
            out.write_str("not ")?;
        }
        self.write_atom(out, &l.atom)
    }

    fn write_rule(&self, out: &mut impl Write, r: &Rule) -> fmt::Result {
        match &r.head {
            Head::Disjunction(ls) => {
                for (i, l) in ls.iter().enumerate() {
                    if i > 0 {
                        out.write_str("; ")?;
                    }
                    self.write_literal(out, l)?;
                }
            }
            Head::Assign { var, term } => {
                write!(out, "{var} := ")?;
                self.write_term(out, term)?;
            }
        }
        if !r.body.is_empty() {
            if matches!(&r.head, Head::Disjunction(ls) if ls.is_empty()) {
                out.write_str(":- ")?;
            } else {
                out.write_str(" :- ")?;
            }
            for (i, l) in r.body.iter().enumerate() {
                if i > 0 {
                    out.write_str(", ")?;
                }
                self.write_literal(out, l)?;
            }
        }
        out.write_char('.')
    }
}

macro_rules! display_via_printer {
    ($ty:ty, $method:ident) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&Printer::default().$method(self))
            }
        }
    };
}

display_via_printer!(Term, term);
display_via_printer!(Atom, atom);
display_via_printer!(Formula, formula);
display_via_printer!(Rule, rule);

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Printer::for_program(self).program(self))
    }
}
