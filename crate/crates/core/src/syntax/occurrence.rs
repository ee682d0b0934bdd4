//! Numbering of conditional-term occurrences.
//!
//! Occurrences are numbered in pre-order: rules in order, the head before
//! the body, literals left to right, the left operand before the right one.
//! Both explicit conditional terms and elements of set-like aggregates (each
//! of which abbreviates a conditional term) are occurrences. Ids are not
//! stored in the AST; the single mutable walker below defines them, so
//! listing and retagging can never disagree.

use std::collections::BTreeSet;

use super::{AggForm, EvalMode, Head, Program, Term};
use crate::model::Var;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OccurrenceKind {
    /// An explicit `(s | s' : phi)` or `[s | s' : phi]`.
    Conditional,
    /// An element of a set-like aggregate.
    AggregateElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub id: usize,
    /// Index of the rule containing the occurrence.
    pub rule: usize,
    pub kind: OccurrenceKind,
    pub mode: EvalMode,
    /// Whether the occurrence lies inside a negated literal.
    pub negated: bool,
    /// Variables of the condition; for an aggregate element this includes
    /// the element term, which the implicit `df` guard mentions.
    pub condition_vars: BTreeSet<Var>,
}

struct Site {
    rule: usize,
    negated: bool,
}

fn walk_term(
    t: &mut Term,
    site: &Site,
    next: &mut usize,
    f: &mut dyn FnMut(Occurrence, &mut EvalMode),
) {
    match t {
        Term::Var(_) | Term::Const(_) | Term::Undef => {}
        Term::Linear(ss) => ss
            .iter_mut()
            .for_each(|s| walk_term(&mut s.term, site, next, f)),
        Term::Cond(c) => {
            let occ = Occurrence {
                id: *next,
                rule: site.rule,
                kind: OccurrenceKind::Conditional,
                mode: c.mode,
                negated: site.negated,
                condition_vars: c.cond.vars(),
            };
            *next += 1;
            f(occ, &mut c.mode);
            walk_term(&mut c.then, site, next, f);
            walk_term(&mut c.else_, site, next, f);
        }
        Term::Agg(a) => match &mut a.form {
            AggForm::Seq(ts) => ts.iter_mut().for_each(|t| walk_term(t, site, next, f)),
            AggForm::Multiset(es) => {
                for e in es {
                    let mut vars = e.term.vars();
                    if let Some(c) = &e.cond {
                        c.collect_vars(&mut vars);
                    }
                    let occ = Occurrence {
                        id: *next,
                        rule: site.rule,
                        kind: OccurrenceKind::AggregateElement,
                        mode: e.mode,
                        negated: site.negated,
                        condition_vars: vars,
                    };
                    *next += 1;
                    f(occ, &mut e.mode);
                }
            }
        },
    }
}

fn walk_program(p: &mut Program, f: &mut dyn FnMut(Occurrence, &mut EvalMode)) {
    let mut next = 0;
    for (ri, r) in p.rules.iter_mut().enumerate() {
        match &mut r.head {
            Head::Disjunction(ls) => {
                for l in ls {
                    let site = Site {
                        rule: ri,
                        negated: l.negated,
                    };
                    for t in l.atom.terms_mut() {
                        walk_term(t, &site, &mut next, f);
                    }
                }
            }
            Head::Assign { term, .. } => {
                let site = Site {
                    rule: ri,
                    negated: false,
                };
                walk_term(term, &site, &mut next, f);
            }
        }
        for l in &mut r.body {
            let site = Site {
                rule: ri,
                negated: l.negated,
            };
            for t in l.atom.terms_mut() {
                walk_term(t, &site, &mut next, f);
            }
        }
    }
}

/// All conditional-term occurrences of the program in id order.
pub fn occurrences(p: &Program) -> Vec<Occurrence> {
    let mut scratch = p.clone();
    let mut out = Vec::new();
    walk_program(&mut scratch, &mut |occ, _| out.push(occ));
    out
}

/// The program with occurrence `id` evaluated in `mode`.
pub fn retag_occurrence(p: &Program, id: usize, mode: EvalMode) -> Result<Program> {
    let mut out = p.clone();
    let mut found = false;
    walk_program(&mut out, &mut |occ, m| {
        if occ.id == id {
            *m = mode;
            found = true;
        }
    });
    if found {
        Ok(out)
    } else {
        Err(Error::UnknownOccurrence(id))
    }
}

/// The program with every occurrence evaluated in `mode`.
pub fn retag_all(p: &Program, mode: EvalMode) -> Program {
    let mut out = p.clone();
    walk_program(&mut out, &mut |_, m| *m = mode);
    out
}
