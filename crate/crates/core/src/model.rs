//! Domain values, valuations and here-and-there interpretations.
//!
//! A [`Valuation`] is a finite set of `(variable, value)` pairs. A variable
//! that has no pair is undefined, so inclusion between valuations is plain
//! set inclusion. Every valuation remembers the set of declared variables it
//! ranges over; comparing valuations over different declarations is an error.

use std::borrow::Borrow;
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Default bound on the number of valuations an enumeration may visit.
pub const DEFAULT_CAP: u64 = 1 << 22;

/// A constant of the domain: a 64-bit integer or a string.
///
/// Integers order before strings, so sorted output is stable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
}

impl Value {
    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            Value::Str(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Str(s) => Some(s),
            Value::Int(_) => None,
        }
    }
}

impl From<i64> for Value {
    fn from(n: i64) -> Self {
        Value::Int(n)
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Str(s.to_owned())
    }
}

/// Writes a string literal with the escapes understood by the parser.
pub fn write_string_literal(f: &mut impl fmt::Write, s: &str) -> fmt::Result {
    f.write_char('"')?;
    for ch in s.chars() {
        match ch {
            '"' => f.write_str("\\\"")?,
            '\\' => f.write_str("\\\\")?,
            '\n' => f.write_str("\\n")?,
            '\t' => f.write_str("\\t")?,
            c => f.write_char(c)?,
        }
    }
    f.write_char('"')
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Str(s) => write_string_literal(f, s),
        }
    }
}

/// Shows an optional value, rendering the undefined case as `#u`.
pub fn show_opt(v: &Option<Value>) -> String {
    match v {
        Some(v) => v.to_string(),
        None => "#u".to_owned(),
    }
}

/// A constraint variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Self {
        Var(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for Var {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var(s.to_owned())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("valuations range over different variable declarations")]
    ScopeMismatch,
    #[error("variable `{0}` is not declared")]
    UndeclaredVariable(Var),
    #[error("variable `{0}` is declared twice")]
    Redeclared(Var),
    #[error("variable `{0}` has an empty candidate set")]
    EmptyCandidates(Var),
    #[error("variable `{0}` lists candidate {1} more than once")]
    DuplicateCandidate(Var, Value),
    #[error("here-valuation {here} is not contained in there-valuation {there}")]
    NotSubset { here: String, there: String },
    #[error("enumeration needs {required} candidates but the cap is {cap}")]
    EnumerationTooLarge { required: u128, cap: u64 },
}

/// The set of variables a valuation ranges over.
pub type Scope = Arc<BTreeSet<Var>>;

/// A partial map from declared variables to values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Valuation {
    scope: Scope,
    bindings: BTreeMap<Var, Value>,
}

impl Valuation {
    /// The valuation leaving every variable of `scope` undefined.
    pub fn empty(scope: Scope) -> Self {
        Valuation {
            scope,
            bindings: BTreeMap::new(),
        }
    }

    /// Builds a valuation from `(name, value)` pairs.
    pub fn from_pairs<I, K, V>(scope: Scope, pairs: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<Var>,
        V: Into<Value>,
    {
        let mut v = Valuation::empty(scope);
        for (k, val) in pairs {
            v.bind(k.into(), val.into())?;
        }
        Ok(v)
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn bind(&mut self, var: Var, value: Value) -> Result<(), ModelError> {
        if !self.scope.contains(&var) {
            return Err(ModelError::UndeclaredVariable(var));
        }
        self.bindings.insert(var, value);
        Ok(())
    }

    pub fn unbind(&mut self, var: &str) {
        self.bindings.remove(var);
    }

    pub fn get(&self, var: &str) -> Option<&Value> {
        self.bindings.get(var)
    }

    pub fn bindings(&self) -> &BTreeMap<Var, Value> {
        &self.bindings
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Set inclusion of the underlying sets of pairs.
    pub fn is_subset(&self, other: &Valuation) -> Result<bool, ModelError> {
        if self.scope != other.scope {
            return Err(ModelError::ScopeMismatch);
        }
        Ok(self.is_subset_unchecked(other))
    }

    pub(crate) fn is_subset_unchecked(&self, other: &Valuation) -> bool {
        self.bindings.len() <= other.bindings.len()
            && self
                .bindings
                .iter()
                .all(|(k, v)| other.bindings.get(k) == Some(v))
    }

    /// Keeps only the bindings of variables in `vars`; the scope is unchanged.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Valuation {
        Valuation {
            scope: self.scope.clone(),
            bindings: self
                .bindings
                .iter()
                .filter(|(k, _)| vars.contains(*k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        }
    }

    /// Moves the valuation to a new scope, dropping bindings outside it.
    pub fn project(&self, scope: Scope) -> Valuation {
        let bindings = self
            .bindings
            .iter()
            .filter(|(k, _)| scope.contains(*k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Valuation { scope, bindings }
    }

    /// Every valuation obtained by unbinding a subset of the bound
    /// variables, the valuation itself first and the empty one last.
    pub fn sub_valuations(&self) -> impl Iterator<Item = Valuation> + '_ {
        let entries: Vec<(&Var, &Value)> = self.bindings.iter().collect();
        let n = entries.len();
        assert!(n < 64, "too many bound variables to enumerate sub-valuations");
        let full: u64 = if n == 0 { 0 } else { (1u64 << n) - 1 };
        (0..=full).rev().map(move |mask| Valuation {
            scope: self.scope.clone(),
            bindings: entries
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, (k, v))| ((*k).clone(), (*v).clone()))
                .collect(),
        })
    }

    /// The strict sub-valuations, largest first.
    pub fn proper_sub_valuations(&self) -> impl Iterator<Item = Valuation> + '_ {
        self.sub_valuations().skip(1)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic by sorted bindings, then by scope.
impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bindings
            .iter()
            .cmp(other.bindings.iter())
            .then_with(|| self.scope.iter().cmp(other.scope.iter()))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

/// A pair `<here, there>` of valuations with `here` contained in `there`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interpretation {
    here: Valuation,
    there: Valuation,
}

impl Interpretation {
    pub fn new(here: Valuation, there: Valuation) -> Result<Self, ModelError> {
        if !here.is_subset(&there)? {
            return Err(ModelError::NotSubset {
                here: here.to_string(),
                there: there.to_string(),
            });
        }
        Ok(Interpretation { here, there })
    }

    pub fn total(there: Valuation) -> Self {
        Interpretation {
            here: there.clone(),
            there,
        }
    }

    pub fn here(&self) -> &Valuation {
        &self.here
    }

    pub fn there(&self) -> &Valuation {
        &self.there
    }

    pub fn is_total(&self) -> bool {
        self.here == self.there
    }
}

impl fmt::Display for Interpretation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.here, self.there)
    }
}

/// Finite candidate sets for each declared variable.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DomainDecl {
    candidates: BTreeMap<Var, Vec<Value>>,
    scope: Scope,
}

impl DomainDecl {
    pub fn new() -> Self {
        Self::default()
    }

    /// Convenience constructor used heavily by tests.
    pub fn from_entries<I, K, C, V>(entries: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (K, C)>,
        K: Into<Var>,
        C: IntoIterator<Item = V>,
        V: Into<Value>,
    {
        let mut d = DomainDecl::new();
        for (k, c) in entries {
            d.declare(k.into(), c.into_iter().map(Into::into).collect())?;
        }
        Ok(d)
    }

    pub fn declare(&mut self, var: Var, candidates: Vec<Value>) -> Result<(), ModelError> {
        if self.candidates.contains_key(&var) {
            return Err(ModelError::Redeclared(var));
        }
        if candidates.is_empty() {
            return Err(ModelError::EmptyCandidates(var));
        }
        let mut seen = BTreeSet::new();
        for c in &candidates {
            if !seen.insert(c) {
                return Err(ModelError::DuplicateCandidate(var, c.clone()));
            }
        }
        self.candidates.insert(var, candidates);
        self.scope = Arc::new(self.candidates.keys().cloned().collect());
        Ok(())
    }

    pub fn scope(&self) -> &Scope {
        &self.scope
    }

    pub fn contains(&self, var: &str) -> bool {
        self.candidates.contains_key(var)
    }

    pub fn candidates(&self, var: &str) -> Option<&[Value]> {
        self.candidates.get(var).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &[Value])> {
        self.candidates.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// The declaration restricted to `vars`.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> DomainDecl {
        let candidates: BTreeMap<Var, Vec<Value>> = self
            .candidates
            .iter()
            .filter(|(k, _)| vars.contains(*k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let scope = Arc::new(candidates.keys().cloned().collect());
        DomainDecl { candidates, scope }
    }

    /// Number of valuations, that is the product of `|candidates| + 1`.
    pub fn valuation_count(&self) -> u128 {
        self.candidates
            .values()
            .map(|c| c.len() as u128 + 1)
            .fold(1u128, |acc, n| acc.saturating_mul(n))
    }

    pub fn empty_valuation(&self) -> Valuation {
        Valuation::empty(self.scope.clone())
    }

    pub fn valuation<I, K, V>(&self, pairs: I) -> Result<Valuation, ModelError>
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<Var>,
        V: Into<Value>,
    {
        Valuation::from_pairs(self.scope.clone(), pairs)
    }
}

/// Odometer over all valuations of a declaration.
///
/// Variables are visited in sorted order with the last one moving fastest;
/// each position runs through "undefined" and then the candidates in
/// declaration order.
pub struct ValuationIter<'a> {
    decl: &'a DomainDecl,
    vars: Vec<(&'a Var, &'a [Value])>,
    digits: Vec<usize>,
    done: bool,
}

impl Iterator for ValuationIter<'_> {
    type Item = Valuation;

    fn next(&mut self) -> Option<Valuation> {
        if self.done {
            return None;
        }
        let mut bindings = BTreeMap::new();
        for ((var, cands), &d) in self.vars.iter().zip(&self.digits) {
            if d > 0 {
                bindings.insert((*var).clone(), cands[d - 1].clone());
            }
        }
        let out = Valuation {
            scope: self.decl.scope.clone(),
            bindings,
        };
        // advance
        let mut i = self.vars.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] <= self.vars[i].1.len() {
                break;
            }
            self.digits[i] = 0;
        }
        Some(out)
    }
}

/// Enumerates every valuation of `decl`, refusing when the count exceeds `cap`.
pub fn enumerate_valuations(decl: &DomainDecl, cap: u64) -> Result<ValuationIter<'_>, ModelError> {
    let required = decl.valuation_count();
    if required > cap as u128 {
        return Err(ModelError::EnumerationTooLarge { required, cap });
    }
    let vars: Vec<_> = decl.iter().collect();
    let digits = vec![0; vars.len()];
    Ok(ValuationIter {
        decl,
        vars,
        digits,
        done: false,
    })
}

/// Every interpretation `<h, t>` over `decl`, grouped by `t` in enumeration order.
pub fn enumerate_interpretations(
    decl: &DomainDecl,
    cap: u64,
) -> Result<impl Iterator<Item = Interpretation> + '_, ModelError> {
    Ok(enumerate_valuations(decl, cap)?.flat_map(|t| {
        let subs: Vec<Valuation> = t.sub_valuations().collect();
        subs.into_iter().map(move |h| Interpretation {
            here: h,
            there: t.clone(),
        })
    }))
}
