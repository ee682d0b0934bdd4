//! Level mappings that separate the condition of a conditional term from
//! the variables its rule defines.
//!
//! Every rule `r` contributes the constraints
//! `level(x) >= level(y)` for `x` defined by `r` and `y` in its negative
//! head or body, `level(x) = level(y)` for `x`, `y` both defined by `r`,
//! and, for the rule containing a selected occurrence,
//! `level(x) > level(y)` for `y` in the occurrence's condition.
//! A mapping exists iff no strict edge lies inside a strongly connected
//! component of the constraint graph; levels are then longest paths in
//! the condensation with strict edges weighing 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::model::Var;
use crate::syntax::{occurrences, Occurrence, Program};
use crate::{Error, Result};

/// Which occurrences the stratification must respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OccSelector {
    One(usize),
    /// Every occurrence outside the scope of negation, with a single
    /// mapping for all of them.
    AllPositive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeKind {
    Geq,
    Eq,
    Gt,
}

/// Edges `from -> to` meaning `level(from) >= level(to)` (`Geq`, and both
/// directions of an `Eq`) or `level(from) > level(to)` (`Gt`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StratGraph {
    pub vars: BTreeSet<Var>,
    pub edges: BTreeSet<(Var, Var, EdgeKind)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LevelMapping(pub BTreeMap<Var, u32>);

impl LevelMapping {
    pub fn level(&self, v: &str) -> u32 {
        self.0.get(v).copied().unwrap_or(0)
    }
}

impl fmt::Display for LevelMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stratification {
    Stratified(LevelMapping),
    /// Variables forced to share a level while one must exceed another.
    NotStratified { cycle: BTreeSet<Var> },
}

impl Stratification {
    pub fn is_stratified(&self) -> bool {
        matches!(self, Stratification::Stratified(_))
    }
}

fn selected(prog: &Program, sel: OccSelector) -> Result<Vec<Occurrence>> {
    let all = occurrences(prog);
    match sel {
        OccSelector::One(id) => all
            .into_iter()
            .find(|o| o.id == id)
            .map(|o| vec![o])
            .ok_or(Error::UnknownOccurrence(id)),
        OccSelector::AllPositive => Ok(all.into_iter().filter(|o| !o.negated).collect()),
    }
}

/// Builds the constraint graph for the given occurrences.
pub fn strat_graph(prog: &Program, occs: &[Occurrence]) -> StratGraph {
    let mut g = StratGraph {
        vars: prog.domain.scope().iter().cloned().collect(),
        ..StratGraph::default()
    };
    g.vars.extend(prog.vars());
    for (ri, r) in prog.rules.iter().enumerate() {
        let plus = r.head_plus_vars();
        let lower = r.head_minus_body_vars();
        for x in &plus {
            for y in &lower {
                g.edges.insert((x.clone(), y.clone(), EdgeKind::Geq));
            }
            for y in &plus {
                if x != y {
                    g.edges.insert((x.clone(), y.clone(), EdgeKind::Eq));
                }
            }
            for o in occs.iter().filter(|o| o.rule == ri) {
                for y in &o.condition_vars {
                    g.edges.insert((x.clone(), y.clone(), EdgeKind::Gt));
                }
            }
        }
    }
    g
}

/// Decides whether a level mapping exists and returns one if so.
pub fn stratification_check(prog: &Program, sel: OccSelector) -> Result<Stratification> {
    let occs = selected(prog, sel)?;
    let g = strat_graph(prog, &occs);

    let mut graph: DiGraph<Var, EdgeKind> = DiGraph::new();
    let index: BTreeMap<Var, NodeIndex> = g
        .vars
        .iter()
        .map(|v| (v.clone(), graph.add_node(v.clone())))
        .collect();
    for (a, b, k) in &g.edges {
        graph.add_edge(index[a], index[b], *k);
    }

    // tarjan_scc yields components in reverse topological order: every edge
    // leaves a component towards one listed earlier.
    let sccs = tarjan_scc(&graph);
    let mut comp = vec![0usize; graph.node_count()];
    for (ci, nodes) in sccs.iter().enumerate() {
        for n in nodes {
            comp[n.index()] = ci;
        }
    }
    for e in graph.edge_indices() {
        let (a, b) = graph.edge_endpoints(e).unwrap();
        if graph[e] == EdgeKind::Gt && comp[a.index()] == comp[b.index()] {
            let cycle = sccs[comp[a.index()]]
                .iter()
                .map(|n| graph[*n].clone())
                .collect();
            return Ok(Stratification::NotStratified { cycle });
        }
    }

    let mut comp_level = vec![0u32; sccs.len()];
    for (ci, nodes) in sccs.iter().enumerate() {
        let mut lvl = 0;
        for n in nodes {
            for e in graph.edges(*n) {
                use petgraph::visit::EdgeRef;
                let target = comp[e.target().index()];
                if target == ci {
                    continue;
                }
                let w = u32::from(*e.weight() == EdgeKind::Gt);
                lvl = lvl.max(comp_level[target] + w);
            }
        }
        comp_level[ci] = lvl;
    }
    let levels = g
        .vars
        .iter()
        .map(|v| (v.clone(), comp_level[comp[index[v].index()]]))
        .collect();
    Ok(Stratification::Stratified(LevelMapping(levels)))
}

/// Checks a proposed mapping against the three conditions directly.
pub fn check_level_mapping(prog: &Program, sel: OccSelector, l: &LevelMapping) -> Result<bool> {
    let occs = selected(prog, sel)?;
    for (ri, r) in prog.rules.iter().enumerate() {
        let plus = r.head_plus_vars();
        let lower = r.head_minus_body_vars();
        for x in &plus {
            let lx = l.level(x.name());
            if lower.iter().any(|y| lx < l.level(y.name())) {
                return Ok(false);
            }
            if plus.iter().any(|y| lx != l.level(y.name())) {
                return Ok(false);
            }
            for o in occs.iter().filter(|o| o.rule == ri) {
                if o.condition_vars.iter().any(|y| lx <= l.level(y.name())) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
