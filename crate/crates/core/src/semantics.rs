//! Satisfaction in here-and-there interpretations.
//!
//! A conditional term `(s | s' : phi)` is evaluated with respect to a pair
//! `<w, t>`. In vc mode it yields `s` if `<w, t>` satisfies `phi`, `s'` if
//! the total `<t, t>` does not, and `#u` otherwise. In df mode it yields `s`
//! if `<w, t>` satisfies `phi` and `s'` otherwise. An atom holds in `<h, t>`
//! when `h` is in the denotation of the atom evaluated at `<h, t>` and `t`
//! is in the denotation of the atom evaluated at `<t, t>`.

use crate::denote::{denote_atom, eval_basic_term, BasicAtom};
use crate::model::{Interpretation, Valuation, Value};
use crate::syntax::{AggForm, Atom, CondTerm, EvalMode, Formula, Summand, Term};
use crate::Result;

/// Which component of an interpretation a term or atom is evaluated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum World {
    Here,
    There,
}

/// An interpretation together with the world an evaluation takes place in.
/// The there-world evaluates as the total pair `<t, t>`.
#[derive(Clone, Copy, Debug)]
pub struct EvalContext<'a> {
    pub interp: &'a Interpretation,
    pub world: World,
}

impl<'a> EvalContext<'a> {
    pub fn new(interp: &'a Interpretation, world: World) -> Self {
        EvalContext { interp, world }
    }

    fn pair(&self) -> (&'a Valuation, &'a Valuation) {
        let t = self.interp.there();
        match self.world {
            World::Here => (self.interp.here(), t),
            World::There => (t, t),
        }
    }
}

/// `h` is contained in `t`, so equal sizes mean equal valuations.
fn is_total(h: &Valuation, t: &Valuation) -> bool {
    h.len() == t.len()
}

fn cond_pair(c: &CondTerm, h: &Valuation, t: &Valuation) -> Result<Term> {
    if sat(h, t, &c.cond)? {
        return Ok(c.then.clone());
    }
    match c.mode {
        EvalMode::Df => Ok(c.else_.clone()),
        EvalMode::Vc => {
            if is_total(h, t) || !sat(t, t, &c.cond)? {
                Ok(c.else_.clone())
            } else {
                Ok(Term::Undef)
            }
        }
    }
}

/// The basic term a conditional term stands for in `interp`.
pub fn eval_cond(c: &CondTerm, interp: &Interpretation) -> Result<Term> {
    cond_pair(c, interp.here(), interp.there())
}

/// Replaces every conditional term by its value at the pair `<w, t>`,
/// expanding set-like aggregates first.
fn eval_term_pair(s: &Term, w: &Valuation, t: &Valuation) -> Result<Term> {
    Ok(match s {
        Term::Var(_) | Term::Const(_) | Term::Undef => s.clone(),
        Term::Linear(ss) => Term::Linear(
            ss.iter()
                .map(|sm| {
                    Ok(Summand {
                        coef: sm.coef,
                        term: eval_term_pair(&sm.term, w, t)?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
        Term::Cond(c) => cond_pair(c, w, t)?,
        Term::Agg(a) => {
            let seq = match &a.form {
                AggForm::Seq(_) => (**a).clone(),
                AggForm::Multiset(_) => crate::syntax::desugar_multiset(a)?,
            };
            let AggForm::Seq(elems) = &seq.form else {
                unreachable!()
            };
            let elems = elems
                .iter()
                .map(|e| eval_term_pair(e, w, t))
                .collect::<Result<_>>()?;
            Term::seq(seq.op, elems)
        }
    })
}

fn eval_atom_pair(a: &Atom, w: &Valuation, t: &Valuation) -> Result<Atom> {
    Ok(match a {
        Atom::Cmp { lhs, rel, rhs } => Atom::Cmp {
            lhs: eval_term_pair(lhs, w, t)?,
            rel: *rel,
            rhs: eval_term_pair(rhs, w, t)?,
        },
        Atom::Df(s) => Atom::Df(eval_term_pair(s, w, t)?),
        Atom::IsInt(s) => Atom::IsInt(eval_term_pair(s, w, t)?),
    })
}

/// The basic atom obtained by evaluating every conditional term of `atom`
/// in the given world.
pub fn eval_atom(atom: &Atom, ctx: EvalContext<'_>) -> Result<BasicAtom> {
    let (w, t) = ctx.pair();
    Ok(BasicAtom::new_unchecked(eval_atom_pair(atom, w, t)?))
}

fn atom_holds_in(a: &Atom, w: &Valuation, t: &Valuation) -> Result<bool> {
    if a.is_basic() {
        return Ok(denote_atom(a, w)?);
    }
    Ok(denote_atom(&eval_atom_pair(a, w, t)?, w)?)
}

fn sat(h: &Valuation, t: &Valuation, f: &Formula) -> Result<bool> {
    let total = is_total(h, t);
    Ok(match f {
        Formula::Bot => false,
        Formula::Atom(a) => {
            atom_holds_in(a, h, t)? && (total || atom_holds_in(a, t, t)?)
        }
        Formula::And(a, b) => sat(h, t, a)? && sat(h, t, b)?,
        Formula::Or(a, b) => sat(h, t, a)? || sat(h, t, b)?,
        Formula::Impl(a, b) => {
            (!sat(h, t, a)? || sat(h, t, b)?) && (total || !sat(t, t, a)? || sat(t, t, b)?)
        }
    })
}

/// Here-and-there satisfaction.
pub fn satisfies(interp: &Interpretation, f: &Formula) -> Result<bool> {
    sat(interp.here(), interp.there(), f)
}

/// Satisfaction of every formula of a theory.
pub fn satisfies_all(interp: &Interpretation, fs: &[Formula]) -> Result<bool> {
    for f in fs {
        if !satisfies(interp, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn classical_term(s: &Term, t: &Valuation) -> Result<Term> {
    Ok(match s {
        Term::Var(_) | Term::Const(_) | Term::Undef => s.clone(),
        Term::Linear(ss) => Term::Linear(
            ss.iter()
                .map(|sm| {
                    Ok(Summand {
                        coef: sm.coef,
                        term: classical_term(&sm.term, t)?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
        Term::Cond(c) => {
            if satisfies_classical(t, &c.cond)? {
                c.then.clone()
            } else {
                c.else_.clone()
            }
        }
        Term::Agg(a) => {
            let seq = crate::syntax::desugar_multiset(a)?;
            let AggForm::Seq(elems) = &seq.form else {
                unreachable!()
            };
            Term::seq(
                seq.op,
                elems
                    .iter()
                    .map(|e| classical_term(e, t))
                    .collect::<Result<_>>()?,
            )
        }
    })
}

/// Classical satisfaction by a single valuation; conditions are decided
/// classically in the same valuation.
pub fn satisfies_classical(t: &Valuation, f: &Formula) -> Result<bool> {
    Ok(match f {
        Formula::Bot => false,
        Formula::Atom(a) => {
            let basic = match a {
                Atom::Cmp { lhs, rel, rhs } => Atom::Cmp {
                    lhs: classical_term(lhs, t)?,
                    rel: *rel,
                    rhs: classical_term(rhs, t)?,
                },
                Atom::Df(s) => Atom::Df(classical_term(s, t)?),
                Atom::IsInt(s) => Atom::IsInt(classical_term(s, t)?),
            };
            denote_atom(&basic, t)?
        }
        Formula::And(a, b) => satisfies_classical(t, a)? && satisfies_classical(t, b)?,
        Formula::Or(a, b) => satisfies_classical(t, a)? || satisfies_classical(t, b)?,
        Formula::Impl(a, b) => !satisfies_classical(t, a)? || satisfies_classical(t, b)?,
    })
}

/// Value of `s` in valuation `v`, with conditional terms evaluated at the
/// pair `<v, t>` where `t` is the there-world of `interp`. Passing the
/// here-world gives the here-value, passing `t` gives the there-value.
pub fn term_value(v: &Valuation, interp: &Interpretation, s: &Term) -> Result<Option<Value>> {
    debug_assert!(v.is_subset_unchecked(interp.there()));
    let basic = eval_term_pair(s, v, interp.there())?;
    Ok(eval_basic_term(v, &basic)?)
}

/// Value of `s` in one world of `interp`.
pub fn term_value_at(interp: &Interpretation, world: World, s: &Term) -> Result<Option<Value>> {
    let (w, _) = EvalContext::new(interp, world).pair();
    term_value(w, interp, s)
}

fn reduct_term(s: &Term, t: &Valuation) -> Result<Term> {
    Ok(match s {
        Term::Var(_) | Term::Const(_) | Term::Undef => s.clone(),
        Term::Linear(ss) => Term::Linear(
            ss.iter()
                .map(|sm| {
                    Ok(Summand {
                        coef: sm.coef,
                        term: reduct_term(&sm.term, t)?,
                    })
                })
                .collect::<Result<_>>()?,
        ),
        Term::Cond(c) => Term::Cond(Box::new(CondTerm {
            then: c.then.clone(),
            else_: c.else_.clone(),
            cond: reduct(&c.cond, t)?,
            mode: c.mode,
        })),
        Term::Agg(a) => {
            let seq = crate::syntax::desugar_multiset(a)?;
            let AggForm::Seq(elems) = &seq.form else {
                unreachable!()
            };
            Term::seq(
                seq.op,
                elems
                    .iter()
                    .map(|e| reduct_term(e, t))
                    .collect::<Result<_>>()?,
            )
        }
    })
}

/// The reduct of `f` with respect to `t`: subformulas `t` falsifies become
/// bottom, and the conditions inside atoms are reduced in turn.
pub fn reduct(f: &Formula, t: &Valuation) -> Result<Formula> {
    if !satisfies_classical(t, f)? {
        return Ok(Formula::Bot);
    }
    Ok(match f {
        Formula::Bot => Formula::Bot,
        Formula::Atom(a) => Formula::Atom(match a {
            Atom::Cmp { lhs, rel, rhs } => Atom::Cmp {
                lhs: reduct_term(lhs, t)?,
                rel: *rel,
                rhs: reduct_term(rhs, t)?,
            },
            Atom::Df(s) => Atom::Df(reduct_term(s, t)?),
            Atom::IsInt(s) => Atom::IsInt(reduct_term(s, t)?),
        }),
        Formula::And(a, b) => Formula::and(reduct(a, t)?, reduct(b, t)?),
        Formula::Or(a, b) => Formula::or(reduct(a, t)?, reduct(b, t)?),
        Formula::Impl(a, b) => Formula::implies(reduct(a, t)?, reduct(b, t)?),
    })
}
