//! Exhaustive checks of the laws every denotation of basic atoms obeys,
//! over a fixed family of basic terms in the variables `x` and `y`.

use std::collections::BTreeSet;

use htc_core::denote::{apply_sum, denote, eval_basic_term, rem_sum, BasicAtom};
use htc_core::model::enumerate_valuations;
use htc_core::syntax::{parse_program, AggForm, Atom, Rel, Summand, Term};
use htc_core::{DomainDecl, SumVariant, Valuation, Value};

use super::Sweep;

const RELS: [Rel; 6] = [Rel::Le, Rel::Lt, Rel::Eq, Rel::Ne, Rel::Ge, Rel::Gt];

/// Basic terms whose atoms make up the family. Clipped sums are left out:
/// they turn an undefined element into 0, which no denotation satisfying
/// the monotonicity conditions may do.
const TERMS: &[&str] = &[
    "x",
    "y",
    "1",
    "2",
    "\"a\"",
    "#u",
    "x + 1",
    "x - y",
    "2*x",
    "sum<x, y>",
    "sum<x, 1, \"a\">",
    "sum_gz<x, #u>",
    "sum_typed<x, y>",
    "concat<x, \"a\">",
    "sum<>",
    "-x + 3",
];

/// Right-hand sides paired with every left-hand side.
const RHS: &[&str] = &["x", "y", "1", "\"a\"", "#u", "x + 1", "sum<x, y>"];

pub struct Family {
    pub decl: DomainDecl,
    pub terms: Vec<Term>,
    pub atoms: Vec<Atom>,
    pub valuations: Vec<Valuation>,
    /// Every value a family term takes somewhere, plus the candidates.
    pub values: Vec<Value>,
}

pub fn parse_term(decl_src: &str, src: &str) -> Term {
    let p = parse_program(&format!("{decl_src} :- {src} = 0.")).unwrap_or_else(|e| panic!("{src}: {e}"));
    match &p.rules[0].body[0].atom {
        Atom::Cmp { lhs, .. } => lhs.clone(),
        _ => unreachable!(),
    }
}

pub fn family(candidates: &str) -> Family {
    let decl_src = format!("#domain x, y = {{{candidates}}}.");
    let decl = parse_program(&decl_src).unwrap().domain;
    let terms: Vec<Term> = TERMS.iter().map(|s| parse_term(&decl_src, s)).collect();
    let rhs: Vec<Term> = RHS.iter().map(|s| parse_term(&decl_src, s)).collect();
    let mut atoms = Vec::new();
    for l in &terms {
        for rel in RELS {
            for r in &rhs {
                atoms.push(Atom::cmp(l.clone(), rel, r.clone()));
            }
        }
        atoms.push(Atom::Df(l.clone()));
        atoms.push(Atom::IsInt(l.clone()));
    }
    let valuations: Vec<Valuation> = enumerate_valuations(&decl, 1 << 10).unwrap().collect();
    let mut values: BTreeSet<Value> = decl.iter().flat_map(|(_, c)| c.iter().cloned()).collect();
    for t in &terms {
        for v in &valuations {
            if let Some(d) = eval_basic_term(v, t).unwrap() {
                values.insert(d);
            }
        }
    }
    Family {
        decl,
        terms,
        atoms,
        valuations,
        values: values.into_iter().collect(),
    }
}

fn holds(a: &Atom, v: &Valuation) -> bool {
    denote(&BasicAtom::new(a.clone()).unwrap(), v).unwrap()
}

fn eq(s: &Term, t: &Term) -> Atom {
    Atom::eq(s.clone(), t.clone())
}

fn cst(d: &Value) -> Term {
    Term::Const(d.clone())
}

/// Every subterm position of `t`: the subterm found there and `t` with
/// that subterm replaced by `r`.
fn term_positions(t: &Term, r: &Term) -> Vec<(Term, Term)> {
    let mut out = vec![(t.clone(), r.clone())];
    match t {
        Term::Linear(ss) => {
            for (i, sm) in ss.iter().enumerate() {
                for (sub, rep) in term_positions(&sm.term, r) {
                    let mut ss2 = ss.clone();
                    ss2[i] = Summand { coef: sm.coef, term: rep };
                    out.push((sub, Term::Linear(ss2)));
                }
            }
        }
        Term::Agg(a) => {
            if let AggForm::Seq(es) = &a.form {
                for (i, e) in es.iter().enumerate() {
                    for (sub, rep) in term_positions(e, r) {
                        let mut es2 = es.clone();
                        es2[i] = rep;
                        out.push((sub, Term::seq(a.op, es2)));
                    }
                }
            }
        }
        _ => {}
    }
    out
}

/// Every subterm position of an atom, as in [`term_positions`].
pub fn atom_positions(a: &Atom, r: &Term) -> Vec<(Term, Atom)> {
    match a {
        Atom::Cmp { lhs, rel, rhs } => {
            let mut out: Vec<(Term, Atom)> = term_positions(lhs, r)
                .into_iter()
                .map(|(s, l)| (s, Atom::cmp(l, *rel, rhs.clone())))
                .collect();
            out.extend(
                term_positions(rhs, r)
                    .into_iter()
                    .map(|(s, rr)| (s, Atom::cmp(lhs.clone(), *rel, rr))),
            );
            out
        }
        Atom::Df(t) => term_positions(t, r)
            .into_iter()
            .map(|(s, t)| (s, Atom::Df(t)))
            .collect(),
        Atom::IsInt(t) => term_positions(t, r)
            .into_iter()
            .map(|(s, t)| (s, Atom::IsInt(t)))
            .collect(),
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// Conditions 5 to 13 for every atom of the family and every valuation.
pub fn denotation_conditions(f: &Family) -> Sweep {
    let mut checks = 0;
    let undef = Term::Undef;
    for a in &f.atoms {
        let vars = a.vars();
        for v in &f.valuations {
            let here = holds(a, v);
            for w in &f.valuations {
                // 5: only the variables of the atom matter
                if v.restrict(&vars) == w.restrict(&vars) {
                    ensure!(here == holds(a, w), "condition 5 fails for `{a}` at {v} / {w}");
                }
                // 6: monotonic in the valuation
                if here && v.is_subset(w).unwrap() {
                    ensure!(holds(a, w), "condition 6 fails for `{a}` at {v} <= {w}");
                }
                checks += 2;
            }
            for (s, with_u) in atom_positions(a, &undef) {
                // 7: an undefined subterm can only make the atom false
                if holds(&with_u, v) {
                    ensure!(here, "condition 7 fails for `{a}` at `{s}` in {v}");
                }
                // 12: a subterm may be replaced by its value
                for d in &f.values {
                    if holds(&eq(&s, &cst(d)), v) {
                        let (_, with_d) = atom_positions(a, &cst(d))
                            .into_iter()
                            .find(|(s2, _)| *s2 == s)
                            .unwrap();
                        ensure!(
                            here == holds(&with_d, v),
                            "condition 12 fails for `{a}` with `{s}` = {d} in {v}"
                        );
                    }
                }
                // 13: a subterm without value may be replaced by #u
                if !holds(&eq(&s, &s), v) && here {
                    ensure!(holds(&with_u, v), "condition 13 fails for `{a}` at `{s}` in {v}");
                }
                checks += 3;
            }
        }
    }
    for v in &f.valuations {
        for d in &f.values {
            // 8
            ensure!(holds(&eq(&cst(d), &cst(d)), v), "condition 8 fails for {d}");
            // 9
            for (x, _) in f.decl.iter() {
                let xd = eq(&Term::Var(x.clone()), &cst(d));
                ensure!(
                    holds(&xd, v) == (v.get(x.name()) == Some(d)),
                    "condition 9 fails for {x} = {d} in {v}"
                );
            }
            checks += 2;
        }
        for s in &f.terms {
            // 10: at most one value
            let hits = f.values.iter().filter(|d| holds(&eq(s, &cst(d)), v)).count();
            ensure!(hits <= 1, "condition 10 fails for `{s}` in {v}");
            // 11: equal terms share a witness value
            for s2 in &f.terms {
                if holds(&eq(s, s2), v) {
                    ensure!(
                        f.values
                            .iter()
                            .any(|d| holds(&eq(s, &cst(d)), v) && holds(&eq(s2, &cst(d)), v)),
                        "condition 11 fails for `{s}` = `{s2}` in {v}"
                    );
                }
                checks += 1;
            }
            checks += 1;
        }
    }
    Ok(checks)
}

/// Transitivity, symmetry and the emptiness of equalities with `#u`.
pub fn term_equality(f: &Family) -> Sweep {
    let mut checks = 0;
    for v in &f.valuations {
        for s in &f.terms {
            ensure!(
                !holds(&eq(&Term::Undef, s), v) && !holds(&eq(s, &Term::Undef), v),
                "`#u = {s}` holds in {v}"
            );
            for s2 in &f.terms {
                let e12 = holds(&eq(s, s2), v);
                if e12 {
                    ensure!(holds(&eq(s2, s), v), "symmetry fails for `{s}`, `{s2}` in {v}");
                }
                for s3 in &f.terms {
                    if e12 && holds(&eq(s2, s3), v) {
                        ensure!(
                            holds(&eq(s, s3), v),
                            "transitivity fails for `{s}`, `{s2}`, `{s3}` in {v}"
                        );
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(checks)
}

/// The characterisations of `df`.
pub fn df_observations(f: &Family) -> Sweep {
    let mut checks = 0;
    for v in &f.valuations {
        for s in &f.terms {
            let df = holds(&Atom::Df(s.clone()), v);
            let some = f.values.iter().any(|d| holds(&eq(s, &cst(d)), v));
            ensure!(df == some, "df(`{s}`) is not the union of `{s}` = d in {v}");
            ensure!(df == holds(&eq(s, s), v), "df(`{s}`) differs from `{s}` = `{s}` in {v}");
            checks += 2;
        }
        for d in &f.values {
            ensure!(holds(&Atom::Df(cst(d)), v), "df({d}) fails in {v}");
        }
        for (x, _) in f.decl.iter() {
            ensure!(
                holds(&Atom::Df(Term::Var(x.clone())), v) == v.get(x.name()).is_some(),
                "df({x}) is wrong in {v}"
            );
        }
        ensure!(!holds(&Atom::Df(Term::Undef), v), "df(#u) holds in {v}");
        checks += 2 + f.values.len();
    }
    Ok(checks)
}

/// Every sequence of length at most `max_len` over `alphabet`.
pub fn sequences(alphabet: &[Option<Value>], max_len: usize) -> Vec<Vec<Option<Value>>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &layer {
            for a in alphabet {
                let mut s2: Vec<Option<Value>> = s.clone();
                s2.push(a.clone());
                next.push(s2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Straightforward reference for each sum variant.
pub fn reference_sum(variant: SumVariant, seq: &[Option<Value>]) -> Option<Value> {
    let mut total = 0i64;
    for e in seq {
        match (variant, e) {
            (_, Some(Value::Int(n))) => total += n,
            (SumVariant::Cl, _) => {}
            (SumVariant::StrictTyped, _) => return None,
            (_, None) => return None,
            (_, Some(Value::Str(_))) => {}
        }
    }
    Some(Value::Int(total))
}

/// Every sum variant against the reference on short sequences.
pub fn sum_variants() -> Sweep {
    let alphabet = [
        Some(Value::Int(-1)),
        Some(Value::Int(0)),
        Some(Value::Int(1)),
        Some(Value::str("a")),
        None,
    ];
    let mut checks = 0;
    for seq in sequences(&alphabet, 4) {
        for variant in [SumVariant::Strict, SumVariant::Cl, SumVariant::Gz, SumVariant::StrictTyped] {
            let got = apply_sum(variant, &seq).unwrap();
            ensure!(
                got == reference_sum(variant, &seq),
                "{} of {seq:?} gave {got:?}",
                variant.keyword()
            );
            checks += 1;
        }
    }
    Ok(checks)
}

/// `cl = gz . rem` on every sequence of length at most 3 over `{1, "e", #u}`.
pub fn clip_identity() -> Sweep {
    let alphabet = [Some(Value::Int(1)), Some(Value::str("e")), None];
    let mut checks = 0;
    for seq in sequences(&alphabet, 3) {
        let cl = apply_sum(SumVariant::Cl, &seq).unwrap();
        let gz = apply_sum(SumVariant::Gz, &rem_sum(&seq)).unwrap();
        ensure!(cl == gz, "cl and gz . rem differ on {seq:?}: {cl:?} vs {gz:?}");
        checks += 1;
    }
    Ok(checks)
}
