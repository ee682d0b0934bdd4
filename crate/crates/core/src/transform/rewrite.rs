use crate::syntax::{
    retag_occurrence, AggForm, AggOp, Atom, EvalMode, Head, Program, SumVariant, Term,
};
use crate::{Error, Result};

/// The program with one conditional-term occurrence evaluated in `mode`.
pub fn swap_semantics(prog: &Program, occ: usize, mode: EvalMode) -> Result<Program> {
    retag_occurrence(prog, occ, mode)
}

/// Whether replacing `from` by `to` is licensed by the identity
/// `from = to . rem` on element sequences (or is a no-op).
pub fn is_legal_rewrite(from: SumVariant, to: SumVariant) -> bool {
    from == to || (from == SumVariant::Cl && matches!(to, SumVariant::Gz | SumVariant::Strict))
}

fn rewrite_term(t: &mut Term, from: SumVariant, to: SumVariant) {
    match t {
        Term::Agg(a) => {
            if a.op == AggOp::Sum(from) {
                a.op = AggOp::Sum(to);
            }
            if let AggForm::Seq(ts) = &mut a.form {
                ts.iter_mut().for_each(|t| rewrite_term(t, from, to));
            }
        }
        Term::Linear(ss) => ss
            .iter_mut()
            .for_each(|s| rewrite_term(&mut s.term, from, to)),
        _ => {}
    }
}

fn rewrite_atom(a: &mut Atom, from: SumVariant, to: SumVariant) {
    for t in a.terms_mut() {
        rewrite_term(t, from, to);
    }
}

/// Replaces the sum variant `from` by `to` in every aggregate of the program.
pub fn rewrite_agg_function(prog: &Program, from: SumVariant, to: SumVariant) -> Result<Program> {
    if !is_legal_rewrite(from, to) {
        return Err(Error::Precondition(format!(
            "rewriting {} sums into {} sums does not preserve the aggregate function",
            from.keyword(),
            to.keyword()
        )));
    }
    let mut out = prog.clone();
    for r in &mut out.rules {
        if let Head::Assign { term, .. } = &mut r.head {
            rewrite_term(term, from, to);
        }
        for a in r.atoms_mut() {
            rewrite_atom(a, from, to);
        }
    }
    Ok(out)
}
