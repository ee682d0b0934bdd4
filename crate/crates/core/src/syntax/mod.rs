//! Abstract syntax of programs, its textual form, and syntactic rewrites.
//!
//! Programs are ground: every variable is a constraint variable with a
//! finite candidate set declared by a `#domain` directive.

mod desugar;
mod occurrence;
mod parser;
mod printer;

use std::collections::BTreeSet;

pub use desugar::{
    desugar_count, desugar_multiset, desugar_program, ground_assignment, pad_finite_aggregate,
};
pub use occurrence::{occurrences, retag_all, retag_occurrence, Occurrence, OccurrenceKind};
pub use parser::{parse_program, parse_program_with, ParseError, ParseErrorKind, ParseOptions};
pub use printer::Printer;

use crate::model::{DomainDecl, Value, Var};

/// How a conditional term treats a condition whose truth differs between worlds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EvalMode {
    /// Vicious-circle: undefined when the condition is not settled.
    Vc,
    /// Definedness: always picks a branch in each world.
    Df,
}

impl EvalMode {
    pub fn keyword(self) -> &'static str {
        match self {
            EvalMode::Vc => "vc",
            EvalMode::Df => "df",
        }
    }
}

/// How `sum` treats elements that are not integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SumVariant {
    /// Undefined if any element is undefined; strings are skipped.
    Strict,
    /// Every non-integer element, undefined included, counts as 0.
    Cl,
    /// Strings count as 0; undefined elements make the sum undefined.
    Gz,
    /// Any non-integer element, undefined included, makes the sum undefined.
    StrictTyped,
}

impl SumVariant {
    pub const ALL: [SumVariant; 4] = [
        SumVariant::Strict,
        SumVariant::Cl,
        SumVariant::Gz,
        SumVariant::StrictTyped,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            SumVariant::Strict => "strict",
            SumVariant::Cl => "cl",
            SumVariant::Gz => "gz",
            SumVariant::StrictTyped => "strict-typed",
        }
    }

    /// Aggregate keyword naming this variant explicitly.
    pub fn aggregate_keyword(self) -> &'static str {
        match self {
            SumVariant::Strict => "sum_strict",
            SumVariant::Cl => "sum_cl",
            SumVariant::Gz => "sum_gz",
            SumVariant::StrictTyped => "sum_typed",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        SumVariant::ALL.into_iter().find(|v| v.keyword() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AggOp {
    Sum(SumVariant),
    Concat,
    /// Sugar for a sum of conditional ones.
    Count,
}

impl AggOp {
    /// The neutral element of the operation.
    pub fn neutral(self) -> Value {
        match self {
            AggOp::Sum(_) | AggOp::Count => Value::Int(0),
            AggOp::Concat => Value::Str(String::new()),
        }
    }
}

/// Element of a set-like aggregate: `term` or `term : cond`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultisetElem {
    pub term: Term,
    pub cond: Option<Formula>,
    /// Mode of the conditional term this element abbreviates.
    pub mode: EvalMode,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AggForm {
    /// `op<s1, s2, ...>` with the neutral tail left implicit.
    Seq(Vec<Term>),
    /// `op{e1, e2, ...}`, sugar for a sequence of conditional terms.
    Multiset(Vec<MultisetElem>),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AggTerm {
    pub op: AggOp,
    pub form: AggForm,
}

/// `(then | else_ : cond)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CondTerm {
    pub then: Term,
    pub else_: Term,
    pub cond: Formula,
    pub mode: EvalMode,
}

/// `coef * term` inside a linear term. A constant summand always has
/// coefficient 1 with the sign folded into the constant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Summand {
    pub coef: i64,
    pub term: Term,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Var),
    Const(Value),
    Undef,
    Linear(Vec<Summand>),
    Cond(Box<CondTerm>),
    Agg(Box<AggTerm>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::from(name))
    }

    pub fn int(n: i64) -> Term {
        Term::Const(Value::Int(n))
    }

    pub fn str(s: &str) -> Term {
        Term::Const(Value::str(s))
    }

    pub fn cond(then: Term, else_: Term, cond: Formula, mode: EvalMode) -> Term {
        Term::Cond(Box::new(CondTerm {
            then,
            else_,
            cond,
            mode,
        }))
    }

    pub fn agg(op: AggOp, form: AggForm) -> Term {
        Term::Agg(Box::new(AggTerm { op, form }))
    }

    pub fn seq(op: AggOp, elems: Vec<Term>) -> Term {
        Term::agg(op, AggForm::Seq(elems))
    }

    /// Builds a linear term, unwrapping a single summand with coefficient 1
    /// and turning the empty sum into 0.
    pub fn linear(summands: Vec<Summand>) -> Term {
        match summands.len() {
            0 => Term::int(0),
            1 if summands[0].coef == 1 => summands.into_iter().next().unwrap().term,
            _ => Term::Linear(summands),
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Const(_) | Term::Undef => {}
            Term::Linear(ss) => ss.iter().for_each(|s| s.term.collect_vars(out)),
            Term::Cond(c) => {
                c.then.collect_vars(out);
                c.else_.collect_vars(out);
                c.cond.collect_vars(out);
            }
            Term::Agg(a) => match &a.form {
                AggForm::Seq(ts) => ts.iter().for_each(|t| t.collect_vars(out)),
                AggForm::Multiset(es) => es.iter().for_each(|e| {
                    e.term.collect_vars(out);
                    if let Some(c) = &e.cond {
                        c.collect_vars(out);
                    }
                }),
            },
        }
    }

    /// True when the term contains no conditional term, explicit or
    /// abbreviated by a set-like aggregate.
    pub fn is_basic(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) | Term::Undef => true,
            Term::Linear(ss) => ss.iter().all(|s| s.term.is_basic()),
            Term::Cond(_) => false,
            Term::Agg(a) => match &a.form {
                AggForm::Seq(ts) => ts.iter().all(Term::is_basic),
                AggForm::Multiset(_) => false,
            },
        }
    }

    pub fn has_aggregate(&self) -> bool {
        match self {
            Term::Agg(_) => true,
            Term::Linear(ss) => ss.iter().any(|s| s.term.has_aggregate()),
            Term::Cond(c) => c.then.has_aggregate() || c.else_.has_aggregate(),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Le,
    Lt,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Le => "<=",
            Rel::Lt => "<",
            Rel::Eq => "=",
            Rel::Ne => "!=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    /// The relation obtained by swapping the operands.
    pub fn flipped(self) -> Rel {
        match self {
            Rel::Le => Rel::Ge,
            Rel::Lt => Rel::Gt,
            Rel::Ge => Rel::Le,
            Rel::Gt => Rel::Lt,
            r => r,
        }
    }
}

/// A constraint atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Cmp { lhs: Term, rel: Rel, rhs: Term },
    /// `df(s)`, the atom `s = s`.
    Df(Term),
    IsInt(Term),
}

impl Atom {
    pub fn cmp(lhs: Term, rel: Rel, rhs: Term) -> Atom {
        Atom::Cmp { lhs, rel, rhs }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Atom {
        Atom::cmp(lhs, Rel::Eq, rhs)
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Cmp { lhs, rhs, .. } => vec![lhs, rhs],
            Atom::Df(t) | Atom::IsInt(t) => vec![t],
        }
    }

    pub fn terms_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Atom::Cmp { lhs, rhs, .. } => vec![lhs, rhs],
            Atom::Df(t) | Atom::IsInt(t) => vec![t],
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        self.terms().into_iter().for_each(|t| t.collect_vars(out));
    }

    pub fn is_basic(&self) -> bool {
        self.terms().into_iter().all(Term::is_basic)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    Atom(Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Impl(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Formula {
        Formula::Atom(a)
    }

    pub fn top() -> Formula {
        Formula::implies(Formula::Bot, Formula::Bot)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Impl(Box::new(a), Box::new(b))
    }

    pub fn not(a: Formula) -> Formula {
        Formula::implies(a, Formula::Bot)
    }

    /// Left-nested conjunction; the empty conjunction is the top formula.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or_else(Formula::top)
    }

    /// Left-nested disjunction; the empty disjunction is bottom.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::or).unwrap_or(Formula::Bot)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::Impl(a, b) if **a == Formula::Bot && **b == Formula::Bot)
    }

    /// The operand of a negation `a -> #false`, if this is one.
    pub fn as_negation(&self) -> Option<&Formula> {
        match self {
            Formula::Impl(a, b) if **b == Formula::Bot && !self.is_top() => Some(a),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Formula::Bot => {}
            Formula::Atom(a) => a.collect_vars(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn is_basic(&self) -> bool {
        match self {
            Formula::Bot => true,
            Formula::Atom(a) => a.is_basic(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
                a.is_basic() && b.is_basic()
            }
        }
    }

    /// Top-level conjuncts of a conjunction tree.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            f => vec![f],
        }
    }
}

/// An atom or a negated atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Literal {
    pub negated: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn pos(atom: Atom) -> Literal {
        Literal {
            negated: false,
            atom,
        }
    }

    pub fn neg(atom: Atom) -> Literal {
        Literal {
            negated: true,
            atom,
        }
    }

    pub fn to_formula(&self) -> Formula {
        let a = Formula::Atom(self.atom.clone());
        if self.negated {
            Formula::not(a)
        } else {
            a
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Head {
    /// A possibly empty disjunction; empty means the rule is a constraint.
    Disjunction(Vec<Literal>),
    /// `var := term`.
    Assign { var: Var, term: Term },
}

/// A positive head element: an atom or an assignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadAtom<'a> {
    Atom(&'a Atom),
    Assign(&'a Var, &'a Term),
}

impl HeadAtom<'_> {
    /// Variables defined by this head element: only the assigned variable
    /// for an assignment, every variable for an atom.
    pub fn vars_plus(&self) -> BTreeSet<Var> {
        match self {
            HeadAtom::Atom(a) => a.vars(),
            HeadAtom::Assign(x, _) => [(*x).clone()].into(),
        }
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            HeadAtom::Atom(a) => Formula::Atom((*a).clone()),
            HeadAtom::Assign(x, s) => {
                Formula::Atom(Atom::eq(Term::Var((*x).clone()), (*s).clone()))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub head: Head,
    pub body: Vec<Literal>,
}

impl Rule {
    pub fn new(head: Vec<Literal>, body: Vec<Literal>) -> Rule {
        Rule {
            head: Head::Disjunction(head),
            body,
        }
    }

    pub fn assign(var: &str, term: Term, body: Vec<Literal>) -> Rule {
        Rule {
            head: Head::Assign {
                var: Var::from(var),
                term,
            },
            body,
        }
    }

    /// Positive head elements.
    pub fn head_plus(&self) -> Vec<HeadAtom<'_>> {
        match &self.head {
            Head::Disjunction(ls) => ls
                .iter()
                .filter(|l| !l.negated)
                .map(|l| HeadAtom::Atom(&l.atom))
                .collect(),
            Head::Assign { var, term } => vec![HeadAtom::Assign(var, term)],
        }
    }

    /// Atoms occurring negated in the head.
    pub fn head_minus(&self) -> Vec<&Atom> {
        match &self.head {
            Head::Disjunction(ls) => ls.iter().filter(|l| l.negated).map(|l| &l.atom).collect(),
            Head::Assign { .. } => Vec::new(),
        }
    }

    /// The body plus `df(s)` when the head assigns `s`.
    pub fn effective_body(&self) -> Vec<Literal> {
        let mut body = self.body.clone();
        if let Head::Assign { term, .. } = &self.head {
            body.push(Literal::pos(Atom::Df(term.clone())));
        }
        body
    }

    /// The rule as the implication `body -> head`.
    pub fn to_formula(&self) -> Formula {
        let body = self.effective_body();
        let head = match &self.head {
            Head::Disjunction(ls) => Formula::disj(ls.iter().map(Literal::to_formula)),
            Head::Assign { var, term } => HeadAtom::Assign(var, term).to_formula(),
        };
        if body.is_empty() {
            head
        } else {
            Formula::implies(Formula::conj(body.iter().map(Literal::to_formula)), head)
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        match &self.head {
            Head::Disjunction(ls) => ls.iter().for_each(|l| l.atom.collect_vars(&mut out)),
            Head::Assign { var, term } => {
                out.insert(var.clone());
                term.collect_vars(&mut out);
            }
        }
        self.body.iter().for_each(|l| l.atom.collect_vars(&mut out));
        out
    }

    /// Variables of the positive head, in the defining sense.
    pub fn head_plus_vars(&self) -> BTreeSet<Var> {
        self.head_plus()
            .iter()
            .flat_map(HeadAtom::vars_plus)
            .collect()
    }

    /// Variables of the negative head and of the effective body.
    pub fn head_minus_body_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.head_minus()
            .into_iter()
            .for_each(|a| a.collect_vars(&mut out));
        self.effective_body()
            .iter()
            .for_each(|l| l.atom.collect_vars(&mut out));
        out
    }

    /// Atoms of the head disjunction and the written body.
    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out: Vec<&Atom> = Vec::new();
        if let Head::Disjunction(ls) = &self.head {
            out.extend(ls.iter().map(|l| &l.atom));
        }
        out.extend(self.body.iter().map(|l| &l.atom));
        out
    }

    pub fn atoms_mut(&mut self) -> Vec<&mut Atom> {
        let mut out: Vec<&mut Atom> = Vec::new();
        if let Head::Disjunction(ls) = &mut self.head {
            out.extend(ls.iter_mut().map(|l| &mut l.atom));
        }
        out.extend(self.body.iter_mut().map(|l| &mut l.atom));
        out
    }
}

/// A ground program over declared variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
    pub domain: DomainDecl,
    /// Mode given to set-like aggregate elements written without brackets.
    pub default_mode: EvalMode,
    /// Variant denoted by the bare `sum` keyword.
    pub default_sum: SumVariant,
    /// Whether the source fixed `default_sum` with a `#sum_variant` directive.
    pub sum_directive: bool,
}

impl Program {
    pub fn new(domain: DomainDecl) -> Program {
        Program {
            rules: Vec::new(),
            domain,
            default_mode: EvalMode::Vc,
            default_sum: SumVariant::Strict,
            sum_directive: false,
        }
    }

    pub fn with_rules(domain: DomainDecl, rules: Vec<Rule>) -> Program {
        Program {
            rules,
            ..Program::new(domain)
        }
    }

    /// One implication per rule.
    pub fn formulas(&self) -> Vec<Formula> {
        self.rules.iter().map(Rule::to_formula).collect()
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.rules.iter().flat_map(Rule::vars).collect()
    }

    pub fn has_aggregates(&self) -> bool {
        self.rules.iter().any(|r| {
            let in_assign = matches!(&r.head, Head::Assign { term, .. } if term.has_aggregate());
            in_assign
                || r.atoms()
                    .iter()
                    .any(|a| a.terms().iter().any(|t| t.has_aggregate()))
        })
    }
}
