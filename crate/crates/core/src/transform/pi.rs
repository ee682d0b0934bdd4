//! Translation of sum aggregates into linear terms over conditional terms.
//!
//! Each element `s : phi` of a set-like sum becomes `(s | 0 : is_int(s) and phi)`
//! and the aggregate becomes the sum of these conditional terms. Elements of
//! a sequence are accepted when they are constants or already have the
//! shape `(s | 0 : df(s) and ...)`, whose `df(s)` guard is replaced by
//! `is_int(s)`. Other sequence elements would lose the rule that an
//! undefined element makes the whole sum undefined.

use crate::syntax::{
    AggForm, AggOp, AggTerm, Atom, EvalMode, Formula, Head, Literal, Program, Summand, SumVariant,
    Term,
};
use crate::{Error, Result};

fn is_int_and(s: &Term, rest: Option<Formula>) -> Formula {
    let guard = Formula::Atom(Atom::IsInt(s.clone()));
    match rest {
        Some(r) => Formula::and(guard, r),
        None => guard,
    }
}

fn guarded(s: Term, cond: Formula, mode: EvalMode) -> Summand {
    Summand {
        coef: 1,
        term: Term::cond(s, Term::int(0), cond, mode),
    }
}

/// Translates one sequence element.
fn seq_element(e: &Term, default_mode: EvalMode) -> Result<Summand> {
    match e {
        Term::Const(_) => Ok(guarded(e.clone(), is_int_and(e, None), default_mode)),
        Term::Cond(c) if c.else_ == Term::int(0) => {
            let conjuncts = c.cond.conjuncts();
            let df = Formula::Atom(Atom::Df(c.then.clone()));
            let Some(pos) = conjuncts.iter().position(|f| **f == df) else {
                return Err(unsupported_element(e));
            };
            let rest = conjuncts
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != pos)
                .map(|(_, f)| (*f).clone())
                .reduce(Formula::and);
            Ok(guarded(c.then.clone(), is_int_and(&c.then, rest), c.mode))
        }
        _ => Err(unsupported_element(e)),
    }
}

fn unsupported_element(e: &Term) -> Error {
    Error::Unsupported(format!(
        "sequence element `{e}` is neither a constant nor of the form (s | 0 : df(s) and ...)"
    ))
}

fn translate_agg(a: &AggTerm, default_mode: EvalMode) -> Result<Term> {
    match a.op {
        AggOp::Concat => {
            return Err(Error::Unsupported(
                "concat aggregates have no linear-term translation".into(),
            ))
        }
        AggOp::Sum(v @ (SumVariant::Cl | SumVariant::StrictTyped)) => {
            return Err(Error::Unsupported(format!(
                "the {} sum variant has no linear-term translation",
                v.keyword()
            )))
        }
        _ => {}
    }
    let summands = match &a.form {
        AggForm::Multiset(es) => es
            .iter()
            .map(|e| {
                if !e.term.is_basic() {
                    return Err(Error::Nesting(format!(
                        "aggregate element `{}` contains a conditional term",
                        e.term
                    )));
                }
                Ok(match a.op {
                    AggOp::Count => {
                        let df = Formula::Atom(Atom::Df(e.term.clone()));
                        let cond = match &e.cond {
                            Some(c) => Formula::and(df, c.clone()),
                            None => df,
                        };
                        let one = Term::int(1);
                        guarded(one.clone(), is_int_and(&one, Some(cond)), e.mode)
                    }
                    _ => guarded(e.term.clone(), is_int_and(&e.term, e.cond.clone()), e.mode),
                })
            })
            .collect::<Result<Vec<_>>>()?,
        AggForm::Seq(ts) => ts
            .iter()
            .map(|t| seq_element(t, default_mode))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(Term::linear(summands))
}

fn translate_term(t: &Term, default_mode: EvalMode) -> Result<Term> {
    match t {
        Term::Agg(a) => translate_agg(a, default_mode),
        _ => Ok(t.clone()),
    }
}

fn has_agg_formula(f: &Formula) -> bool {
    match f {
        Formula::Bot => false,
        Formula::Atom(a) => a.terms().iter().any(|t| t.has_aggregate()),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Impl(a, b) => {
            has_agg_formula(a) || has_agg_formula(b)
        }
    }
}

fn check_conditions(t: &Term) -> Result<()> {
    match t {
        Term::Cond(c) if has_agg_formula(&c.cond) => Err(Error::Unsupported(format!(
            "aggregate inside the condition of `{t}`"
        ))),
        Term::Linear(ss) => ss.iter().try_for_each(|s| check_conditions(&s.term)),
        Term::Agg(a) => match &a.form {
            AggForm::Seq(ts) => ts.iter().try_for_each(check_conditions),
            AggForm::Multiset(_) => Ok(()),
        },
        _ => Ok(()),
    }
}

fn translate_atom(a: &Atom, default_mode: EvalMode) -> Result<Atom> {
    for t in a.terms() {
        check_conditions(t)?;
    }
    Ok(match a {
        Atom::Cmp { lhs, rel, rhs } => Atom::Cmp {
            lhs: translate_term(lhs, default_mode)?,
            rel: *rel,
            rhs: translate_term(rhs, default_mode)?,
        },
        Atom::Df(t) => Atom::Df(translate_term(t, default_mode)?),
        Atom::IsInt(t) => Atom::IsInt(translate_term(t, default_mode)?),
    })
}

fn translate_literal(l: &Literal, default_mode: EvalMode) -> Result<Literal> {
    Ok(Literal {
        negated: l.negated,
        atom: translate_atom(&l.atom, default_mode)?,
    })
}

/// Replaces every sum and count aggregate by a linear term of conditional
/// terms guarded by `is_int`. Each new conditional term keeps the mode of
/// the element it comes from. Everything else is left untouched.
pub fn pi_translate(prog: &Program) -> Result<Program> {
    let m = prog.default_mode;
    let mut out = prog.clone();
    for r in &mut out.rules {
        r.head = match &r.head {
            Head::Disjunction(ls) => Head::Disjunction(
                ls.iter()
                    .map(|l| translate_literal(l, m))
                    .collect::<Result<_>>()?,
            ),
            Head::Assign { var, term } => {
                check_conditions(term)?;
                Head::Assign {
                    var: var.clone(),
                    term: translate_term(term, m)?,
                }
            }
        };
        r.body = r
            .body
            .iter()
            .map(|l| translate_literal(l, m))
            .collect::<Result<_>>()?;
    }
    Ok(out)
}
