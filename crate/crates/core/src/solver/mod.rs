//! Stable-model computation.
//!
//! [`enumerate_stable`] follows the definition directly: a total candidate
//! `t` is stable when `<t, t>` is a model and no `<h, t>` with `h` a strict
//! sub-valuation of `t` is. [`ferraris_stable`] is an independent route via
//! minimal classical models of the reduct, valid when every occurrence is
//! evaluated in df mode. [`solve_by_splitting`] solves a bottom part first.

mod split;
mod support;

use rayon::prelude::*;

pub use split::{is_splitting_set, solve_by_splitting, split, substitute_program};
pub use support::{is_supported, Support};

use crate::model::{enumerate_valuations, Interpretation, Valuation, DEFAULT_CAP};
use crate::semantics::{reduct, satisfies_all, satisfies_classical};
use crate::syntax::{desugar_program, occurrences, EvalMode, Formula, Program};
use crate::{Error, Result};

/// Number of candidates handed to the thread pool at once.
const CHUNK: usize = 1 << 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest number of total candidates the solver may enumerate.
    pub cap: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { cap: DEFAULT_CAP }
    }
}

/// How a model set was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Direct,
    ReductOracle,
    Split,
}

/// Sorted, duplicate-free stable models.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StableModelSet {
    pub models: Vec<Valuation>,
    pub provenance: Provenance,
}

impl StableModelSet {
    pub(crate) fn new(mut models: Vec<Valuation>, provenance: Provenance) -> Self {
        models.sort();
        models.dedup();
        StableModelSet { models, provenance }
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Equality of the model lists, ignoring provenance.
    pub fn same_models(&self, other: &StableModelSet) -> bool {
        self.models == other.models
    }
}

impl std::fmt::Display for StableModelSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("{")?;
        for (i, m) in self.models.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

/// Runs `check` over every valuation of the program's domain in parallel
/// chunks, keeping the accepted ones. The first error in enumeration
/// order wins, so failures are reproducible.
fn search<F>(prog: &Program, cfg: &SolverConfig, check: F) -> Result<Vec<Valuation>>
where
    F: Fn(&Valuation) -> Result<bool> + Sync,
{
    let mut iter = enumerate_valuations(&prog.domain, cfg.cap)?;
    let mut found = Vec::new();
    loop {
        let chunk: Vec<Valuation> = iter.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let verdicts: Vec<Result<bool>> = chunk.par_iter().map(&check).collect();
        for (t, verdict) in chunk.into_iter().zip(verdicts) {
            if verdict? {
                found.push(t);
            }
        }
    }
    Ok(found)
}

/// Whether `t` is a stable model of the theory `fs`.
pub fn is_stable(fs: &[Formula], t: &Valuation) -> Result<bool> {
    if !satisfies_all(&Interpretation::total(t.clone()), fs)? {
        return Ok(false);
    }
    for h in t.proper_sub_valuations() {
        let i = Interpretation::new(h, t.clone())?;
        if satisfies_all(&i, fs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Stable models by direct enumeration of total candidates and
/// sub-valuations.
pub fn enumerate_stable(prog: &Program, cfg: &SolverConfig) -> Result<StableModelSet> {
    let fs = desugar_program(prog)?.formulas();
    let models = search(prog, cfg, |t| is_stable(&fs, t))?;
    Ok(StableModelSet::new(models, Provenance::Direct))
}

fn classical_all(v: &Valuation, fs: &[Formula]) -> Result<bool> {
    for f in fs {
        if !satisfies_classical(v, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Stable models as the valuations `t` that are subset-minimal classical
/// models of the reduct of the program with respect to `t`. Requires every
/// conditional-term occurrence to be in df mode.
pub fn ferraris_stable(prog: &Program, cfg: &SolverConfig) -> Result<StableModelSet> {
    if let Some(o) = occurrences(prog).iter().find(|o| o.mode != EvalMode::Df) {
        return Err(Error::Precondition(format!(
            "occurrence {} is in vc mode; the reduct characterisation needs df everywhere",
            o.id
        )));
    }
    let fs = desugar_program(prog)?.formulas();
    let models = search(prog, cfg, |t| {
        let reduced = fs
            .iter()
            .map(|f| reduct(f, t))
            .collect::<Result<Vec<_>>>()?;
        if !classical_all(t, &reduced)? {
            return Ok(false);
        }
        for v in t.proper_sub_valuations() {
            if classical_all(&v, &reduced)? {
                return Ok(false);
            }
        }
        Ok(true)
    })?;
    Ok(StableModelSet::new(models, Provenance::ReductOracle))
}
