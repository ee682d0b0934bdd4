//! Source-to-source transformations and the stratification analysis.

mod pi;
mod rewrite;
mod stratify;

pub use pi::pi_translate;
pub use rewrite::{is_legal_rewrite, rewrite_agg_function, swap_semantics};
pub use stratify::{
    check_level_mapping, strat_graph, stratification_check, EdgeKind, LevelMapping, OccSelector,
    StratGraph, Stratification,
};
