use std::collections::BTreeMap;

use crate::model::{Interpretation, Valuation, Var};
use crate::semantics::satisfies;
use crate::syntax::{desugar_program, Formula, Literal, Program};
use crate::Result;

/// Outcome of a supportedness check: for every bound variable, the index
/// of the first rule supporting it, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Support {
    pub supported: bool,
    pub witnesses: BTreeMap<Var, Option<usize>>,
}

/// Checks that every variable bound in `v` is supported by some rule.
/// Satisfaction is taken in the total interpretation `<v, v>`.
pub fn is_supported(v: &Valuation, prog: &Program) -> Result<Support> {
    let prog = desugar_program(prog)?;
    let vv = Interpretation::total(v.clone());
    let holds = |f: &Formula| satisfies(&vv, f);

    // rules whose body holds and whose negative head fails, with their H+
    let mut applicable = Vec::new();
    for (i, r) in prog.rules.iter().enumerate() {
        let body = Formula::conj(r.effective_body().iter().map(Literal::to_formula));
        let neg_head = Formula::disj(
            r.head_minus()
                .into_iter()
                .map(|a| Literal::neg(a.clone()).to_formula()),
        );
        if holds(&body)? && !holds(&neg_head)? {
            let heads: Vec<_> = r
                .head_plus()
                .iter()
                .map(|c| Ok((c.vars_plus(), holds(&c.to_formula())?)))
                .collect::<Result<_>>()?;
            applicable.push((i, heads));
        }
    }

    let mut witnesses = BTreeMap::new();
    for x in v.bindings().keys() {
        let w = applicable.iter().find_map(|(i, heads)| {
            let defines = heads.iter().any(|(vars, _)| vars.contains(x));
            let others_false = heads
                .iter()
                .filter(|(vars, _)| !vars.contains(x))
                .all(|(_, sat)| !sat);
            (defines && others_false).then_some(*i)
        });
        witnesses.insert(x.clone(), w);
    }
    Ok(Support {
        supported: witnesses.values().all(Option::is_some),
        witnesses,
    })
}
