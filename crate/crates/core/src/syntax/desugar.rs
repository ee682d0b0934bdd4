//! Syntactic rewrites: set-like aggregates, `count`, padding, and grounding
//! of assignments.

use std::collections::BTreeSet;

use super::{
    AggForm, AggOp, AggTerm, Atom, Formula, Head, Literal, MultisetElem, Program, Rule, Summand,
    SumVariant, Term,
};
use crate::model::{enumerate_interpretations, DomainDecl, Value, DEFAULT_CAP};
use crate::semantics::{term_value_at, World};
use crate::{Error, Result};

fn elem_to_cond(op: AggOp, e: &MultisetElem) -> Result<Term> {
    if !e.term.is_basic() {
        return Err(Error::Nesting(format!(
            "aggregate element `{}` contains a conditional term",
            e.term
        )));
    }
    if let Some(c) = &e.cond {
        if !c.is_basic() {
            return Err(Error::Nesting(format!(
                "condition `{c}` of an aggregate element is not basic"
            )));
        }
    }
    let defined = Formula::Atom(Atom::Df(e.term.clone()));
    let cond = match &e.cond {
        Some(c) => Formula::and(defined, c.clone()),
        None => defined,
    };
    let then = match op {
        AggOp::Count => Term::int(1),
        _ => e.term.clone(),
    };
    Ok(Term::cond(then, Term::Const(op.neutral()), cond, e.mode))
}

/// Rewrites a set-like aggregate into a sequence of conditional terms and
/// `count` into a strict sum of conditional ones. Sequence aggregates other
/// than `count` are returned unchanged, so the rewrite is idempotent.
pub fn desugar_multiset(agg: &AggTerm) -> Result<AggTerm> {
    match (&agg.form, agg.op) {
        (AggForm::Seq(_), AggOp::Count) => Err(Error::Nesting(
            "count takes a set of elements, not a sequence".into(),
        )),
        (AggForm::Seq(_), _) => Ok(agg.clone()),
        (AggForm::Multiset(es), op) => {
            let elems = es
                .iter()
                .map(|e| elem_to_cond(op, e))
                .collect::<Result<Vec<_>>>()?;
            let op = match op {
                AggOp::Count => AggOp::Sum(SumVariant::Strict),
                other => other,
            };
            Ok(AggTerm {
                op,
                form: AggForm::Seq(elems),
            })
        }
    }
}

/// `count{...}` as a strict sum of conditional ones.
pub fn desugar_count(agg: &AggTerm) -> Result<AggTerm> {
    if agg.op != AggOp::Count {
        return Err(Error::Precondition("not a count aggregate".into()));
    }
    desugar_multiset(agg)
}

/// The aggregate as a finite sequence together with the neutral element
/// that implicitly fills its infinite tail.
pub fn pad_finite_aggregate(agg: &AggTerm) -> Result<(AggTerm, Value)> {
    let seq = desugar_multiset(agg)?;
    let tail = seq.op.neutral();
    Ok((seq, tail))
}

pub(crate) fn desugar_term(t: &Term) -> Result<Term> {
    Ok(match t {
        Term::Agg(a) => Term::Agg(Box::new(desugar_multiset(a)?)),
        Term::Linear(ss) => Term::Linear(
            ss.iter()
                .map(|s| {
                    Ok(Summand {
                        coef: s.coef,
                        term: desugar_term(&s.term)?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
        other => other.clone(),
    })
}

pub(crate) fn desugar_atom(a: &Atom) -> Result<Atom> {
    Ok(match a {
        Atom::Cmp { lhs, rel, rhs } => Atom::Cmp {
            lhs: desugar_term(lhs)?,
            rel: *rel,
            rhs: desugar_term(rhs)?,
        },
        Atom::Df(t) => Atom::Df(desugar_term(t)?),
        Atom::IsInt(t) => Atom::IsInt(desugar_term(t)?),
    })
}

fn desugar_literal(l: &Literal) -> Result<Literal> {
    Ok(Literal {
        negated: l.negated,
        atom: desugar_atom(&l.atom)?,
    })
}

/// Desugars every set-like and `count` aggregate of the program.
pub fn desugar_program(p: &Program) -> Result<Program> {
    let mut out = p.clone();
    for r in &mut out.rules {
        r.head = match &r.head {
            Head::Disjunction(ls) => {
                Head::Disjunction(ls.iter().map(desugar_literal).collect::<Result<_>>()?)
            }
            Head::Assign { var, term } => Head::Assign {
                var: var.clone(),
                term: desugar_term(term)?,
            },
        };
        r.body = r.body.iter().map(desugar_literal).collect::<Result<_>>()?;
    }
    Ok(out)
}

/// Replaces `x := s <- body` by the rules `x = d <- body, s = d` for every
/// candidate `d` of `x` and every value `s` takes in some world of some
/// interpretation over `decl`.
pub fn ground_assignment(rule: &Rule, decl: &DomainDecl) -> Result<Vec<Rule>> {
    let Head::Assign { var, term } = &rule.head else {
        return Err(Error::Precondition("rule head is not an assignment".into()));
    };
    let Some(cands) = decl.candidates(var.name()) else {
        return Err(Error::Precondition(format!("variable `{var}` is not declared")));
    };
    let mut values: BTreeSet<Value> = cands.iter().cloned().collect();
    for interp in enumerate_interpretations(decl, DEFAULT_CAP)? {
        for world in [World::Here, World::There] {
            if let Some(v) = term_value_at(&interp, world, term)? {
                values.insert(v);
            }
        }
    }
    // keep the declared candidates first, in declaration order
    let mut ordered: Vec<Value> = cands.to_vec();
    ordered.extend(values.into_iter().filter(|v| !cands.contains(v)));
    Ok(ordered
        .into_iter()
        .map(|d| {
            let mut body = rule.body.clone();
            body.push(Literal::pos(Atom::eq(term.clone(), Term::Const(d.clone()))));
            Rule::new(
                vec![Literal::pos(Atom::eq(Term::Var(var.clone()), Term::Const(d)))],
                body,
            )
        })
        .collect())
}
