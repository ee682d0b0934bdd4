//! One function per acceptance criterion. Each returns the number of
//! instances it checked or a description of the discrepancies it found.

use std::collections::BTreeSet;

use htc_core::denote::apply_sum;
use htc_core::model::enumerate_interpretations;
use htc_core::semantics::{satisfies, satisfies_all};
use htc_core::solver::{
    enumerate_stable, ferraris_stable, is_splitting_set, is_supported, solve_by_splitting,
    StableModelSet,
};
use htc_core::syntax::{
    ground_assignment, occurrences, parse_program, parse_program_with, retag_all,
    retag_occurrence, Formula, ParseOptions, Rule,
};
use htc_core::transform::{
    check_level_mapping, pi_translate, rewrite_agg_function, stratification_check, LevelMapping,
    OccSelector, Stratification,
};
use htc_core::{EvalMode, Interpretation, Program, SumVariant, Value, Var};

use super::corpus;
use super::gen::{Aggs, Gen, GenConfig};
use super::{cfg, laws, props, Sweep};

/// Collects discrepancies and turns them into a [`Sweep`].
#[derive(Default)]
pub struct Tally {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl Tally {
    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn finish(self) -> Sweep {
        if self.failures.is_empty() {
            return Ok(self.checked);
        }
        let shown: Vec<&str> = self.failures.iter().take(5).map(String::as_str).collect();
        Err(format!(
            "{} of {} checks failed; first: {}",
            self.failures.len(),
            self.checked,
            shown.join(" | ")
        ))
    }
}

pub fn stable(p: &Program) -> StableModelSet {
    enumerate_stable(p, &cfg()).unwrap_or_else(|e| panic!("{e}\n{p}"))
}

fn flip(mode: EvalMode) -> EvalMode {
    match mode {
        EvalMode::Vc => EvalMode::Df,
        EvalMode::Df => EvalMode::Vc,
    }
}

fn df_options() -> ParseOptions {
    ParseOptions {
        default_mode: EvalMode::Df,
        ..ParseOptions::default()
    }
}

/// The self-referential conditional term: no model in vc mode, `{x=1}` in df mode.
pub fn criterion_1() -> Sweep {
    let vc = parse_program("#domain x = {1}. x = 1 :- (1 | 0 : x = 1) >= 0.").unwrap();
    let df = parse_program("#domain x = {1}. x = 1 :- [1 | 0 : x = 1] >= 0.").unwrap();
    let expected = vec![df.domain.valuation([("x", 1i64)]).unwrap()];
    let mut t = Tally::default();
    let (a, b) = (stable(&vc), stable(&df));
    t.check(a.is_empty(), || format!("vc gave {a}"));
    t.check(b.models == expected, || format!("df gave {b}"));
    t.finish()
}

/// `x = 1 :- sum{x} >= 0.`: `{x=1}` with a df element, nothing with a vc one.
pub fn criterion_2() -> Sweep {
    let src = "#domain x = {1}. x = 1 :- sum{x} >= 0.";
    let df = parse_program_with(src, df_options()).unwrap();
    let vc = parse_program(src).unwrap();
    let expected = vec![df.domain.valuation([("x", 1i64)]).unwrap()];
    let mut t = Tally::default();
    let (a, b) = (stable(&df), stable(&vc));
    t.check(a.models == expected, || format!("df gave {a}"));
    t.check(b.is_empty(), || format!("vc gave {b}"));
    t.finish()
}

/// The two clingo-style sums.
pub fn criterion_3() -> Sweep {
    let mut t = Tally::default();
    let cl = apply_sum(SumVariant::Cl, &[Some(Value::Int(1000)), Some(Value::str("error"))]).unwrap();
    t.check(cl == Some(Value::Int(1000)), || format!("cl sum gave {cl:?}"));
    let seq = [
        Some(Value::Int(2)),
        Some(Value::Int(5)),
        Some(Value::str("hello world")),
        Some(Value::Int(7)),
    ];
    let strict = apply_sum(SumVariant::Strict, &seq).unwrap();
    t.check(strict == Some(Value::Int(14)), || format!("strict sum gave {strict:?}"));
    t.finish()
}

/// `sum{1 : p, 1 : q, 2 : r} >= 2` holds exactly when `r or (p and q)`.
pub fn criterion_4() -> Sweep {
    let p = parse_program(
        "#domain p, q, r = {1}. :- sum{1 : p = 1, 1 : q = 1, 2 : r = 1} >= 2.",
    )
    .unwrap();
    let atom = Formula::Atom(p.rules[0].body[0].atom.clone());
    let mut t = Tally::default();
    for bits in 0..8u8 {
        let on = |i: u8| bits & (1 << i) != 0;
        let names = ["p", "q", "r"];
        let pairs: Vec<(&str, i64)> = (0..3).filter(|i| on(*i)).map(|i| (names[i as usize], 1)).collect();
        let v = p.domain.valuation(pairs).unwrap();
        let holds = satisfies(&Interpretation::total(v.clone()), &atom).unwrap();
        let expected = on(2) || (on(0) && on(1));
        t.check(holds == expected, || format!("at {v} the atom gives {holds}"));
    }
    t.finish()
}

/// Direct enumeration against the reduct characterisation, in df mode.
pub fn criterion_5(random: usize) -> Sweep {
    let mut t = Tally::default();
    let mut compare = |name: &str, p: &Program| {
        let p = retag_all(p, EvalMode::Df);
        let direct = stable(&p);
        let reduct = ferraris_stable(&p, &cfg()).unwrap();
        t.check(direct.same_models(&reduct), || {
            format!("{name}: direct {direct}, reduct {reduct}")
        });
    };
    for e in corpus::load() {
        compare(&e.name, &e.program);
    }
    let mut g = Gen::new(5, GenConfig::default());
    for i in 0..random {
        let (_, p) = g.program();
        compare(&format!("random #{i}\n{p}"), &p);
    }
    t.finish()
}

/// Translating sums into linear terms preserves the stable models.
/// Programs the translation rejects are counted separately.
pub fn criterion_6(random: usize) -> (Sweep, usize) {
    let mut t = Tally::default();
    let mut skipped = 0;
    let mut compare = |name: &str, p: &Program| {
        for mode in [EvalMode::Vc, EvalMode::Df] {
            let p = retag_all(p, mode);
            match pi_translate(&p) {
                Ok(q) => {
                    let (a, b) = (stable(&p), stable(&q));
                    t.check(a.same_models(&b), || {
                        format!("{name} ({}): before {a}, after {b}", mode.keyword())
                    });
                }
                Err(_) => skipped += 1,
            }
        }
    };
    for e in corpus::load() {
        compare(&e.name, &e.program);
    }
    let mut g = Gen::new(
        6,
        GenConfig {
            strings: false,
            aggregates: Aggs::Translatable,
            require_aggregate: true,
            ..GenConfig::default()
        },
    );
    for i in 0..random {
        let (_, p) = g.program();
        compare(&format!("random #{i}\n{p}"), &p);
    }
    (t.finish(), skipped)
}

/// Occurrences a certified program may have retagged: with the one
/// selected, or every positive one at once.
pub fn certified_retaggings(p: &Program) -> Vec<(String, Program)> {
    let mut out = Vec::new();
    for o in occurrences(p) {
        if stratification_check(p, OccSelector::One(o.id)).unwrap().is_stratified() {
            out.push((
                format!("occurrence {} to {}", o.id, flip(o.mode).keyword()),
                retag_occurrence(p, o.id, flip(o.mode)).unwrap(),
            ));
        }
    }
    if stratification_check(p, OccSelector::AllPositive).unwrap().is_stratified() {
        for mode in [EvalMode::Vc, EvalMode::Df] {
            let mut q = p.clone();
            for o in occurrences(p).iter().filter(|o| !o.negated) {
                q = retag_occurrence(&q, o.id, mode).unwrap();
            }
            out.push((format!("all positive occurrences to {}", mode.keyword()), q));
        }
    }
    out
}

/// Certified retaggings keep the stable models, and the self-referential
/// program is refused and does change.
pub fn criterion_7() -> Sweep {
    let mut t = Tally::default();
    for e in corpus::load() {
        let before = stable(&e.program);
        for (what, q) in certified_retaggings(&e.program) {
            let after = stable(&q);
            t.check(before.same_models(&after), || {
                format!("{}: {what} changes {before} into {after}", e.name)
            });
        }
    }
    let eq3 = corpus::get("eq3");
    let s = stratification_check(&eq3, OccSelector::One(0)).unwrap();
    t.check(
        s == Stratification::NotStratified {
            cycle: [Var::from("x")].into(),
        },
        || format!("eq3 reported as {s:?}"),
    );
    let (vc, df) = (stable(&eq3), stable(&retag_all(&eq3, EvalMode::Df)));
    t.check(!vc.same_models(&df), || format!("eq3 keeps {vc} in both modes"));
    t.finish()
}

/// The denotation-law suite on two candidate sets of size three.
pub fn criterion_8() -> Sweep {
    let mut total = laws::sum_variants()?;
    for cands in ["1, 2, \"a\"", "-1, 0, 1"] {
        let f = laws::family(cands);
        total += laws::denotation_conditions(&f)?;
        total += laws::term_equality(&f)?;
        total += laws::df_observations(&f)?;
    }
    Ok(total)
}

/// The semantic-property suite.
pub fn criterion_9() -> Sweep {
    let f = props::family();
    let corpus_programs: Vec<(String, Program)> =
        corpus::load().into_iter().map(|e| (e.name, e.program)).collect();
    let mut n = 0;
    n += props::persistence(&f)?;
    n += props::double_negation(&f)?;
    n += props::negation_law(&f)?;
    n += props::vc_shortcut(&f)?;
    n += props::term_persistence(&f)?;
    n += props::reduct_bridge(&f)?;
    n += props::decomposition(&f)?;
    n += props::df_counterexamples()?;
    n += props::lifting_on(&corpus_programs, 1 << 14)?;
    Ok(n)
}

/// Every stable model of the corpus is supported, and splitting along any
/// splitting set reproduces the models.
pub fn criterion_10() -> Sweep {
    let mut t = Tally::default();
    for e in corpus::load() {
        let p = &e.program;
        let models = stable(p);
        for m in &models.models {
            let s = is_supported(m, p).unwrap();
            t.check(s.supported, || format!("{}: {m} is not supported ({:?})", e.name, s.witnesses));
        }
        let vars: Vec<Var> = p.domain.scope().iter().cloned().collect();
        for mask in 0..(1u32 << vars.len()) {
            let u: BTreeSet<Var> = vars
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, v)| v.clone())
                .collect();
            if !is_splitting_set(&u, p) {
                continue;
            }
            let split = solve_by_splitting(p, &u, &cfg()).unwrap();
            t.check(split.same_models(&models), || {
                format!("{}: splitting on {u:?} gives {split}, direct {models}", e.name)
            });
        }
    }
    t.finish()
}

/// Assignment rules of the two-variable family, written with `‹`/`›` for
/// the brackets of the mode under test.
pub const ASSIGNMENTS: &[&str] = &[
    "x := y.",
    "x := y + 1.",
    "x := #u.",
    "x := 2 :- not y = 1.",
    "x := ‹1 | 2 : y = 1›.",
    "x := ‹y | 1 : y = 2› :- y = 1.",
    "x := ‹y | #u : df(y)›.",
    "y := ‹x | 2 : x = 1› + 0.",
    "x := sum{y : y = 1, 1}.",
    "x := count{y}.",
    "x := sum<‹y | 0 : df(y)›, 1>.",
    "x := ‹1 | 2 : not y = 2› :- not x = 2.",
];

/// Models of an assignment rule versus models of its grounding, over every
/// interpretation with `x, y` in `{1, 2}`.
pub fn criterion_11() -> Sweep {
    let vc = assignment_agreement(EvalMode::Vc);
    let df = assignment_agreement(EvalMode::Df);
    match (vc, df) {
        (Ok(a), Ok(b)) => Ok(a + b),
        (Err(e), Ok(_)) => Err(format!("vc: {e}")),
        (Ok(_), Err(e)) => Err(format!("df: {e}")),
        (Err(a), Err(b)) => Err(format!("vc: {a}; df: {b}")),
    }
}

/// The assignment family in one mode.
pub fn assignment_agreement(mode: EvalMode) -> Sweep {
    let mut t = Tally::default();
    {
        let opts = ParseOptions {
            default_mode: mode,
            ..ParseOptions::default()
        };
        for src in ASSIGNMENTS {
            let (o, c) = match mode {
                EvalMode::Vc => ("(", ")"),
                EvalMode::Df => ("[", "]"),
            };
            let fixed = src.replace('‹', o).replace('›', c);
            let text = format!("#domain x, y = {{1, 2}}. {fixed}");
            let p = parse_program_with(&text, opts).unwrap_or_else(|e| panic!("{text}: {e}"));
            let rule: &Rule = &p.rules[0];
            let ground: Vec<Formula> = ground_assignment(rule, &p.domain)
                .unwrap()
                .iter()
                .map(Rule::to_formula)
                .collect();
            let f = rule.to_formula();
            for i in enumerate_interpretations(&p.domain, 1 << 10).unwrap() {
                let a = satisfies(&i, &f).unwrap();
                let b = satisfies_all(&i, &ground).unwrap();
                t.check(a == b, || {
                    format!(
                        "`{fixed}` ({}) at {i}: rule {a}, grounding {b}",
                        mode.keyword()
                    )
                });
            }
        }
    }
    t.finish()
}

/// Clipped sums rewritten into gz sums on stratified corpus programs, and
/// the identity behind the rewrite.
pub fn criterion_12() -> Sweep {
    let mut t = Tally::default();
    for e in corpus::load() {
        let p = &e.program;
        if !stratification_check(p, OccSelector::AllPositive).unwrap().is_stratified() {
            continue;
        }
        let q = rewrite_agg_function(p, SumVariant::Cl, SumVariant::Gz).unwrap();
        let (a, b) = (stable(p), stable(&q));
        t.check(a.same_models(&b), || format!("{}: before {a}, after {b}", e.name));
    }
    let n = t.checked;
    t.finish()?;
    Ok(n + laws::clip_identity()?)
}

/// Brute-force search for a level mapping with levels below the number of
/// variables, compared with the checker's verdict and witness.
pub fn stratification_oracle(programs: usize) -> Sweep {
    let mut t = Tally::default();
    let mut g = Gen::new(
        13,
        GenConfig {
            max_vars: 4,
            ..GenConfig::default()
        },
    );
    for _ in 0..programs {
        let (_, p) = g.program();
        let vars: Vec<Var> = p.domain.scope().iter().cloned().collect();
        let n = vars.len() as u32;
        let mut selectors = vec![OccSelector::AllPositive];
        selectors.extend(occurrences(&p).iter().map(|o| OccSelector::One(o.id)));
        for sel in selectors {
            let verdict = stratification_check(&p, sel).unwrap();
            let mut exists = false;
            for code in 0..n.pow(n) {
                let l = LevelMapping(
                    vars.iter()
                        .enumerate()
                        .map(|(i, v)| (v.clone(), code / n.pow(i as u32) % n))
                        .collect(),
                );
                if check_level_mapping(&p, sel, &l).unwrap() {
                    exists = true;
                    break;
                }
            }
            t.check(exists == verdict.is_stratified(), || {
                format!("{sel:?} on\n{p}\nchecker {verdict:?}, brute force {exists}")
            });
            if let Stratification::Stratified(l) = &verdict {
                t.check(check_level_mapping(&p, sel, l).unwrap(), || {
                    format!("{sel:?} on\n{p}\nwitness {l} is invalid")
                });
            }
        }
    }
    t.finish()
}
