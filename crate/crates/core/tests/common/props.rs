//! Exhaustive checks of here-and-there properties over every interpretation
//! of three variables ranging over `{1, 2}`.

use htc_core::denote::denote;
use htc_core::model::enumerate_interpretations;
use htc_core::semantics::{
    eval_atom, reduct, satisfies, satisfies_classical, term_value_at, EvalContext, World,
};
use htc_core::syntax::{parse_program, parse_program_with, Atom, EvalMode, Formula, ParseOptions, Rel, Term};
use htc_core::{DomainDecl, Interpretation, Program};

use super::Sweep;

const DECL: &str = "#domain x, y, z = {1, 2}.";

/// Atoms written with `{` and `}` standing for the brackets of the mode.
const ATOMS: &[&str] = &[
    "x = 1",
    "df(y)",
    "{1 | 2 : y = 1} = x",
    "{x | 0 : y = 1} >= 1",
    "x + {y | z : z = 2} <= 3",
    "{1 | 0 : not x = 1} = 1",
    "{x | y : z = 1} != 2",
    "df({x | #u : y = 1})",
    "is_int({x | \"a\" : z = 1})",
    "{x | 1 : y = 1 or z = 2} > {2 | y : x = 2}",
    "sum<{x | 0 : df(x) and y = 1}, 1> > 1",
    "sum_gz<{x | #u : z = 1}, y> = 3",
];

/// Atoms whose conditional terms are implicit, as aggregate elements.
const AGG_ATOMS: &[&str] = &["sum{x : y = 1, z} >= 2", "count{x : y = 2, z : x = 1} = 1"];

/// Linear terms over integers for the decomposition laws.
const LINEAR: &[&str] = &[
    "x",
    "1",
    "x + y",
    "{0 | 1 : x = 1}",
    "{x | 2 : y = 1}",
    "x - {y | 1 : z = 2}",
    "2*{1 | 0 : not y = 1}",
    "{1 | #u : z = 1}",
];

fn with_mode(src: &str, mode: EvalMode) -> String {
    let (o, c) = match mode {
        EvalMode::Vc => ("(", ")"),
        EvalMode::Df => ("[", "]"),
    };
    src.replace('{', o).replace('}', c)
}

fn parse_atom_in(decl: &str, src: &str, mode: EvalMode) -> (Program, Atom) {
    let text = format!("{decl} :- {src}.");
    let opts = ParseOptions {
        default_mode: mode,
        ..ParseOptions::default()
    };
    let p = parse_program_with(&text, opts).unwrap_or_else(|e| panic!("{text}: {e}"));
    let a = p.rules[0].body[0].atom.clone();
    (p, a)
}

pub struct Family {
    pub decl: DomainDecl,
    pub interps: Vec<Interpretation>,
    /// Atoms of the family with the mode they are written in.
    pub atoms: Vec<(EvalMode, Atom)>,
    pub formulas: Vec<(EvalMode, Formula)>,
    /// Linear terms paired with the same term in the other mode.
    pub linear: Vec<(EvalMode, Term, Term)>,
}

fn atom_of(src: &str, mode: EvalMode) -> Atom {
    parse_atom_in(DECL, &with_mode(src, mode), mode).1
}

fn term_of(src: &str, mode: EvalMode) -> Term {
    match atom_of(&format!("{src} = 0"), mode) {
        Atom::Cmp { lhs, .. } => lhs,
        _ => unreachable!(),
    }
}

pub fn family() -> Family {
    let decl = parse_program(DECL).unwrap().domain;
    let interps: Vec<Interpretation> = enumerate_interpretations(&decl, 1 << 10).unwrap().collect();
    let mut atoms = Vec::new();
    let mut linear = Vec::new();
    for mode in [EvalMode::Vc, EvalMode::Df] {
        let other = match mode {
            EvalMode::Vc => EvalMode::Df,
            EvalMode::Df => EvalMode::Vc,
        };
        for src in ATOMS {
            atoms.push((mode, atom_of(src, mode)));
        }
        for src in AGG_ATOMS {
            atoms.push((mode, parse_atom_in(DECL, src, mode).1));
        }
        for src in LINEAR {
            linear.push((mode, term_of(src, mode), term_of(src, other)));
        }
    }
    let mut formulas = Vec::new();
    for mode in [EvalMode::Vc, EvalMode::Df] {
        let mine: Vec<Formula> = atoms
            .iter()
            .filter(|(m, _)| *m == mode)
            .map(|(_, a)| Formula::Atom(a.clone()))
            .collect();
        for a in &mine {
            formulas.push((mode, a.clone()));
            formulas.push((mode, Formula::not(a.clone())));
            formulas.push((mode, Formula::not(Formula::not(a.clone()))));
        }
        for (i, a) in mine.iter().enumerate() {
            // a sparse selection of pairs keeps the sweep small
            for b in mine.iter().skip(i % 3).step_by(3) {
                formulas.push((mode, Formula::and(a.clone(), b.clone())));
                formulas.push((mode, Formula::or(a.clone(), b.clone())));
                formulas.push((mode, Formula::implies(a.clone(), b.clone())));
                formulas.push((mode, Formula::implies(Formula::not(a.clone()), b.clone())));
            }
        }
    }
    Family {
        decl,
        interps,
        atoms,
        formulas,
        linear,
    }
}

fn sat(i: &Interpretation, f: &Formula) -> bool {
    satisfies(i, f).unwrap()
}

fn total(i: &Interpretation) -> Interpretation {
    Interpretation::total(i.there().clone())
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// A formula satisfied by `<h, t>` is satisfied by `<t, t>`.
pub fn persistence(f: &Family) -> Sweep {
    let mut n = 0;
    for (_, phi) in &f.formulas {
        for i in &f.interps {
            if sat(i, phi) {
                ensure!(sat(&total(i), phi), "persistence fails for `{phi}` at {i}");
            }
            n += 1;
        }
    }
    Ok(n)
}

/// An atom holds iff its here-evaluation holds and its there-evaluation
/// is not refuted.
pub fn double_negation(f: &Family) -> Sweep {
    let mut n = 0;
    for (_, c) in &f.atoms {
        for i in &f.interps {
            let eh = eval_atom(c, EvalContext::new(i, World::Here)).unwrap().into_atom();
            let et = eval_atom(c, EvalContext::new(i, World::There)).unwrap().into_atom();
            let rhs = Formula::and(
                Formula::Atom(eh),
                Formula::not(Formula::not(Formula::Atom(et))),
            );
            ensure!(
                sat(i, &Formula::Atom(c.clone())) == sat(i, &rhs),
                "double-negation characterisation fails for `{c}` at {i}"
            );
            n += 1;
        }
    }
    Ok(n)
}

/// `phi -> bot` holds iff `<t, t>` does not satisfy `phi`.
pub fn negation_law(f: &Family) -> Sweep {
    let mut n = 0;
    for (_, phi) in &f.formulas {
        let neg = Formula::not(phi.clone());
        for i in &f.interps {
            ensure!(
                sat(i, &neg) == !sat(&total(i), phi),
                "negation law fails for `{phi}` at {i}"
            );
            n += 1;
        }
    }
    Ok(n)
}

/// In vc mode an atom holds iff `h` is in the denotation of its
/// here-evaluation.
pub fn vc_shortcut(f: &Family) -> Sweep {
    let mut n = 0;
    for (_, c) in f.atoms.iter().filter(|(m, _)| *m == EvalMode::Vc) {
        for i in &f.interps {
            let eh = eval_atom(c, EvalContext::new(i, World::Here)).unwrap();
            ensure!(
                sat(i, &Formula::Atom(c.clone())) == denote(&eh, i.here()).unwrap(),
                "vc shortcut fails for `{c}` at {i}"
            );
            n += 1;
        }
    }
    Ok(n)
}

/// A vc term defined in the here-world keeps its value in df mode and in
/// the there-world.
pub fn term_persistence(f: &Family) -> Sweep {
    let mut n = 0;
    for (_, vc, df) in f.linear.iter().filter(|(m, _, _)| *m == EvalMode::Vc) {
        for i in &f.interps {
            if let Some(d) = term_value_at(i, World::Here, vc).unwrap() {
                let dfh = term_value_at(i, World::Here, df).unwrap();
                let t = term_value_at(i, World::There, vc).unwrap();
                ensure!(
                    dfh.as_ref() == Some(&d) && t.as_ref() == Some(&d),
                    "term persistence fails for `{vc}` at {i}: here {d}, df {dfh:?}, there {t:?}"
                );
            }
            n += 1;
        }
    }
    Ok(n)
}

/// `<h, t>` satisfies a df formula iff `h` classically satisfies its reduct
/// with respect to `t`.
pub fn reduct_bridge(f: &Family) -> Sweep {
    let mut n = 0;
    for (_, phi) in f.formulas.iter().filter(|(m, _)| *m == EvalMode::Df) {
        for i in &f.interps {
            let r = reduct(phi, i.there()).unwrap();
            ensure!(
                sat(i, phi) == satisfies_classical(i.here(), &r).unwrap(),
                "reduct bridge fails for `{phi}` at {i}"
            );
            n += 1;
        }
    }
    Ok(n)
}

fn cmp(a: &Term, rel: Rel, b: &Term) -> Formula {
    Formula::Atom(Atom::cmp(a.clone(), rel, b.clone()))
}

/// The decomposition laws: 1 and 2 in both modes, 3 and 4 in vc mode.
pub fn decomposition(f: &Family) -> Sweep {
    let mut n = 0;
    for (mode, a, _) in &f.linear {
        for (m2, b, _) in &f.linear {
            if m2 != mode {
                continue;
            }
            let mut laws = vec![
                ("=", cmp(a, Rel::Eq, b), Formula::and(cmp(a, Rel::Le, b), cmp(a, Rel::Ge, b))),
                ("<", cmp(a, Rel::Lt, b), Formula::and(cmp(a, Rel::Le, b), cmp(a, Rel::Ne, b))),
            ];
            if *mode == EvalMode::Vc {
                laws.push((
                    "< via not",
                    cmp(a, Rel::Lt, b),
                    Formula::and(cmp(a, Rel::Le, b), Formula::not(cmp(a, Rel::Ge, b))),
                ));
                laws.push((
                    "!=",
                    cmp(a, Rel::Ne, b),
                    Formula::or(cmp(a, Rel::Lt, b), cmp(a, Rel::Gt, b)),
                ));
            }
            for (name, lhs, rhs) in &laws {
                for i in &f.interps {
                    ensure!(
                        sat(i, lhs) == sat(i, rhs),
                        "decomposition `{name}` fails in {} for `{a}`, `{b}` at {i}",
                        mode.keyword()
                    );
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}

/// The two df counterexamples to laws 3 and 4, at `h` with `x` undefined
/// and `t` with `x = 1`. Returns an error unless both separate the sides.
pub fn df_counterexamples() -> Sweep {
    let decl = "#domain x = {1}.";
    let p = parse_program(decl).unwrap();
    let t = p.domain.valuation([("x", 1i64)]).unwrap();
    let i = Interpretation::new(p.domain.empty_valuation(), t).unwrap();
    let term = |src: &str| match parse_atom_in(decl, &format!("{src} = 0"), EvalMode::Df).1 {
        Atom::Cmp { lhs, .. } => lhs,
        _ => unreachable!(),
    };
    let alpha = term("[0 | 1 : x = 1]");
    let beta = term("[1 | 0 : x = 1]");
    let one = Term::int(1);

    let lt = cmp(&alpha, Rel::Lt, &one);
    let le_not_ge = Formula::and(cmp(&alpha, Rel::Le, &one), Formula::not(cmp(&alpha, Rel::Ge, &one)));
    ensure!(
        !sat(&i, &lt) && sat(&i, &le_not_ge),
        "`{lt}` is not separated from `{le_not_ge}` in df mode"
    );
    let ne = cmp(&alpha, Rel::Ne, &beta);
    let lt_or_gt = Formula::or(cmp(&alpha, Rel::Lt, &beta), cmp(&alpha, Rel::Gt, &beta));
    ensure!(
        sat(&i, &ne) && !sat(&i, &lt_or_gt),
        "`{ne}` is not separated from `{lt_or_gt}` in df mode"
    );
    Ok(2)
}

/// `c -> not not c` for every atom of the given programs, over all their
/// interpretations. Programs with more than `max` interpretations are skipped.
pub fn lifting_on(programs: &[(String, Program)], max: u64) -> Sweep {
    let mut n = 0;
    for (name, p) in programs {
        let Ok(interps) = enumerate_interpretations(&p.domain, max) else {
            continue;
        };
        let interps: Vec<Interpretation> = interps.collect();
        if interps.len() as u64 > max {
            continue;
        }
        for r in &p.rules {
            for c in r.atoms() {
                let a = Formula::Atom(c.clone());
                let f = Formula::implies(a.clone(), Formula::not(Formula::not(a)));
                for i in &interps {
                    ensure!(sat(i, &f), "{name}: `{f}` fails at {i}");
                    n += 1;
                }
            }
        }
    }
    Ok(n)
}
