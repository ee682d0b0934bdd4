use std::collections::{BTreeMap, BTreeSet};

use super::{enumerate_stable, Provenance, SolverConfig, StableModelSet};
use crate::model::{Valuation, Value, Var};
use crate::syntax::{
    AggForm, AggTerm, Atom, CondTerm, Formula, Head, Literal, MultisetElem, Program, Rule, Summand,
    Term,
};
use crate::{Error, Result};

fn bottom_rule(r: &Rule, u: &BTreeSet<Var>) -> bool {
    r.vars().is_subset(u)
}

fn top_rule(r: &Rule, u: &BTreeSet<Var>) -> bool {
    r.head_plus_vars().is_disjoint(u)
}

/// Whether every rule either mentions only variables of `u` or defines no
/// variable of `u`.
pub fn is_splitting_set(u: &BTreeSet<Var>, prog: &Program) -> bool {
    prog.rules
        .iter()
        .all(|r| bottom_rule(r, u) || top_rule(r, u))
}

/// Splits the program into the rules over `u` and the rest. Rules meeting
/// both conditions go to the bottom part.
pub fn split(prog: &Program, u: &BTreeSet<Var>) -> Result<(Vec<Rule>, Vec<Rule>)> {
    if !is_splitting_set(u, prog) {
        return Err(not_splitting(u));
    }
    let (bottom, top) = prog.rules.iter().cloned().partition(|r| bottom_rule(r, u));
    Ok((bottom, top))
}

fn not_splitting(u: &BTreeSet<Var>) -> Error {
    let names: Vec<&str> = u.iter().map(Var::name).collect();
    Error::Precondition(format!("{{{}}} is not a splitting set", names.join(", ")))
}

type Subst = BTreeMap<Var, Option<Value>>;

fn subst_term(t: &Term, s: &Subst) -> Term {
    match t {
        Term::Var(x) => match s.get(x) {
            Some(Some(v)) => Term::Const(v.clone()),
            Some(None) => Term::Undef,
            None => t.clone(),
        },
        Term::Const(_) | Term::Undef => t.clone(),
        Term::Linear(ss) => Term::Linear(
            ss.iter()
                .map(|sm| Summand {
                    coef: sm.coef,
                    term: subst_term(&sm.term, s),
                })
                .collect(),
        ),
        Term::Cond(c) => Term::Cond(Box::new(CondTerm {
            then: subst_term(&c.then, s),
            else_: subst_term(&c.else_, s),
            cond: subst_formula(&c.cond, s),
            mode: c.mode,
        })),
        Term::Agg(a) => Term::Agg(Box::new(AggTerm {
            op: a.op,
            form: match &a.form {
                AggForm::Seq(ts) => AggForm::Seq(ts.iter().map(|t| subst_term(t, s)).collect()),
                AggForm::Multiset(es) => AggForm::Multiset(
                    es.iter()
                        .map(|e| MultisetElem {
                            term: subst_term(&e.term, s),
                            cond: e.cond.as_ref().map(|c| subst_formula(c, s)),
                            mode: e.mode,
                        })
                        .collect(),
                ),
            },
        })),
    }
}

fn subst_atom(a: &Atom, s: &Subst) -> Atom {
    match a {
        Atom::Cmp { lhs, rel, rhs } => Atom::Cmp {
            lhs: subst_term(lhs, s),
            rel: *rel,
            rhs: subst_term(rhs, s),
        },
        Atom::Df(t) => Atom::Df(subst_term(t, s)),
        Atom::IsInt(t) => Atom::IsInt(subst_term(t, s)),
    }
}

fn subst_formula(f: &Formula, s: &Subst) -> Formula {
    match f {
        Formula::Bot => Formula::Bot,
        Formula::Atom(a) => Formula::Atom(subst_atom(a, s)),
        Formula::And(a, b) => Formula::and(subst_formula(a, s), subst_formula(b, s)),
        Formula::Or(a, b) => Formula::or(subst_formula(a, s), subst_formula(b, s)),
        Formula::Impl(a, b) => Formula::implies(subst_formula(a, s), subst_formula(b, s)),
    }
}

fn subst_literal(l: &Literal, s: &Subst) -> Literal {
    Literal {
        negated: l.negated,
        atom: subst_atom(&l.atom, s),
    }
}

/// Replaces every variable of `vars` in the rules by its value in `v`, or
/// by `#u` where `v` leaves it undefined. Assigned variables are not
/// replaced.
pub fn substitute_program(rules: &[Rule], vars: &BTreeSet<Var>, v: &Valuation) -> Vec<Rule> {
    let s: Subst = vars
        .iter()
        .map(|x| (x.clone(), v.get(x.name()).cloned()))
        .collect();
    rules
        .iter()
        .map(|r| Rule {
            head: match &r.head {
                Head::Disjunction(ls) => {
                    Head::Disjunction(ls.iter().map(|l| subst_literal(l, &s)).collect())
                }
                Head::Assign { var, term } => Head::Assign {
                    var: var.clone(),
                    term: subst_term(term, &s),
                },
            },
            body: r.body.iter().map(|l| subst_literal(l, &s)).collect(),
        })
        .collect()
}

/// Stable models obtained by solving the bottom part over `u`, then the
/// top part with the bottom values substituted, and combining the results.
pub fn solve_by_splitting(
    prog: &Program,
    u: &BTreeSet<Var>,
    cfg: &SolverConfig,
) -> Result<StableModelSet> {
    let (bottom_rules, top_rules) = split(prog, u)?;
    let declared: BTreeSet<Var> = prog.domain.scope().iter().cloned().collect();
    let u: BTreeSet<Var> = u.intersection(&declared).cloned().collect();
    let rest: BTreeSet<Var> = declared.difference(&u).cloned().collect();

    let bottom = Program {
        rules: bottom_rules,
        domain: prog.domain.restrict(&u),
        ..prog.clone()
    };
    let mut models = Vec::new();
    for b in enumerate_stable(&bottom, cfg)?.models {
        let top = Program {
            rules: substitute_program(&top_rules, &u, &b),
            domain: prog.domain.restrict(&rest),
            ..prog.clone()
        };
        for t in enumerate_stable(&top, cfg)?.models {
            let mut full = prog.domain.empty_valuation();
            for (k, v) in b.bindings().iter().chain(t.bindings()) {
                full.bind(k.clone(), v.clone())?;
            }
            models.push(full);
        }
    }
    Ok(StableModelSet::new(models, Provenance::Split))
}
