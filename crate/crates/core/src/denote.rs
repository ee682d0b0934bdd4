//! Evaluation of conditional-free terms and the truth of basic atoms in a
//! single valuation.
//!
//! Terms evaluate to `Option<Value>`, `None` being undefined. Integer
//! overflow is reported as an error rather than folded into undefinedness.

use thiserror::Error;

use crate::model::{Valuation, Value};
use crate::syntax::{AggForm, AggOp, Atom, Rel, SumVariant, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("integer overflow while evaluating `{0}`")]
    Overflow(String),
    #[error("`{0}` contains a conditional term and cannot be evaluated in a single valuation")]
    NotBasic(String),
}

/// A constraint atom with no conditional term left in it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasicAtom(Atom);

impl BasicAtom {
    pub fn new(atom: Atom) -> Result<Self, EvalError> {
        if atom.is_basic() {
            Ok(BasicAtom(atom))
        } else {
            Err(EvalError::NotBasic(atom.to_string()))
        }
    }

    pub(crate) fn new_unchecked(atom: Atom) -> Self {
        debug_assert!(atom.is_basic());
        BasicAtom(atom)
    }

    pub fn atom(&self) -> &Atom {
        &self.0
    }

    pub fn into_atom(self) -> Atom {
        self.0
    }
}

impl std::fmt::Display for BasicAtom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

fn checked_sum(ints: impl IntoIterator<Item = i64>, what: impl Fn() -> String) -> Result<i64, EvalError> {
    ints.into_iter()
        .try_fold(0i64, |acc, n| acc.checked_add(n))
        .ok_or_else(|| EvalError::Overflow(what()))
}

/// Value of a conditional-free term.
pub fn eval_basic_term(v: &Valuation, s: &Term) -> Result<Option<Value>, EvalError> {
    match s {
        Term::Var(x) => Ok(v.get(x.name()).cloned()),
        Term::Const(c) => Ok(Some(c.clone())),
        Term::Undef => Ok(None),
        Term::Cond(_) => Err(EvalError::NotBasic(s.to_string())),
        Term::Linear(summands) => {
            let mut products = Vec::with_capacity(summands.len());
            let mut defined = true;
            for sm in summands {
                match eval_basic_term(v, &sm.term)? {
                    Some(Value::Int(n)) => products.push((sm.coef, n)),
                    _ => defined = false,
                }
            }
            if !defined {
                return Ok(None);
            }
            let mut terms = Vec::with_capacity(products.len());
            for (c, n) in products {
                terms.push(c.checked_mul(n).ok_or_else(|| EvalError::Overflow(s.to_string()))?);
            }
            checked_sum(terms, || s.to_string()).map(|n| Some(Value::Int(n)))
        }
        Term::Agg(a) => {
            let AggForm::Seq(elems) = &a.form else {
                return Err(EvalError::NotBasic(s.to_string()));
            };
            let vals = elems
                .iter()
                .map(|e| eval_basic_term(v, e))
                .collect::<Result<Vec<_>, _>>()?;
            match a.op {
                AggOp::Sum(variant) => apply_sum(variant, &vals)
                    .map_err(|_| EvalError::Overflow(s.to_string())),
                AggOp::Concat => Ok(apply_concat(&vals)),
                AggOp::Count => Err(EvalError::NotBasic(s.to_string())),
            }
        }
    }
}

/// Replaces undefined elements by the neutral element of sum.
pub fn rem_sum(seq: &[Option<Value>]) -> Vec<Option<Value>> {
    seq.iter()
        .map(|e| e.clone().or(Some(Value::Int(0))))
        .collect()
}

/// The sum of a finite element sequence under the given treatment of
/// non-integer elements.
pub fn apply_sum(variant: SumVariant, seq: &[Option<Value>]) -> Result<Option<Value>, EvalError> {
    let show = || {
        let parts: Vec<String> = seq.iter().map(crate::model::show_opt).collect();
        format!("sum<{}>", parts.join(", "))
    };
    let ints = |seq: &[Option<Value>]| -> Option<Vec<i64>> {
        if seq.iter().any(Option::is_none) {
            return None;
        }
        Some(seq.iter().filter_map(|e| e.as_ref().and_then(Value::as_int)).collect())
    };
    let prepared: Vec<Option<Value>> = match variant {
        SumVariant::Strict => seq.to_vec(),
        SumVariant::Cl => seq
            .iter()
            .map(|e| match e {
                Some(Value::Int(n)) => Some(Value::Int(*n)),
                _ => Some(Value::Int(0)),
            })
            .collect(),
        SumVariant::Gz => seq
            .iter()
            .map(|e| match e {
                Some(Value::Str(_)) => Some(Value::Int(0)),
                other => other.clone(),
            })
            .collect(),
        SumVariant::StrictTyped => {
            if seq.iter().any(|e| !matches!(e, Some(Value::Int(_)))) {
                return Ok(None);
            }
            seq.to_vec()
        }
    };
    match ints(&prepared) {
        None => Ok(None),
        Some(ns) => checked_sum(ns, show).map(|n| Some(Value::Int(n))),
    }
}

/// Space-separated concatenation of the non-empty strings of the sequence.
pub fn apply_concat(seq: &[Option<Value>]) -> Option<Value> {
    let mut parts = Vec::new();
    for e in seq {
        match e {
            Some(Value::Str(s)) => {
                if !s.is_empty() {
                    parts.push(s.as_str());
                }
            }
            _ => return None,
        }
    }
    Some(Value::Str(parts.join(" ")))
}

/// Whether `v` belongs to the denotation of the atom.
pub fn denote(atom: &BasicAtom, v: &Valuation) -> Result<bool, EvalError> {
    denote_atom(atom.atom(), v)
}

pub(crate) fn denote_atom(atom: &Atom, v: &Valuation) -> Result<bool, EvalError> {
    Ok(match atom {
        Atom::Df(t) => eval_basic_term(v, t)?.is_some(),
        Atom::IsInt(t) => matches!(eval_basic_term(v, t)?, Some(Value::Int(_))),
        Atom::Cmp { lhs, rel, rhs } => {
            let l = eval_basic_term(v, lhs)?;
            let r = eval_basic_term(v, rhs)?;
            match (l, r) {
                (Some(a), Some(b)) => match rel {
                    Rel::Eq => a == b,
                    Rel::Ne => a != b,
                    _ => match (a, b) {
                        (Value::Int(a), Value::Int(b)) => match rel {
                            Rel::Le => a <= b,
                            Rel::Lt => a < b,
                            Rel::Ge => b <= a,
                            Rel::Gt => b < a,
                            Rel::Eq | Rel::Ne => unreachable!(),
                        },
                        _ => false,
                    },
                },
                _ => false,
            }
        }
    })
}
