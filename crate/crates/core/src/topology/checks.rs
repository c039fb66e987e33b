use std::collections::BTreeSet;
use std::time::Instant;

use serde::Serialize;

use crate::elaboration::{compose, Closure, ElabError, Elaboration};
use crate::equivalence::{weak_bisimilar, Verdict};
use crate::kernel::{hide, resolve_semisync, HideMode, Lts};

use super::graph::build_flow_graph;
use super::TopologyError;

/// The two systems a check compares, with semi-synchronous transitions
/// resolved.
#[derive(Debug, Clone)]
pub struct Sides {
    pub lhs: Lts,
    pub rhs: Lts,
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub sides: Sides,
    pub verdict: Verdict,
    pub millis: u64,
}

impl CheckOutcome {
    pub fn holds(&self) -> bool {
        self.verdict.is_equivalent()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Compatibility,
    Interoperability,
}

/// The instance's partially closed semantics without buffers, in the
/// context of the whole architecture.
pub fn local_semantics(elab: &Elaboration, aei: usize) -> Result<Lts, ElabError> {
    let sem = elab.aei_semantics(aei, &elab.all_aeis(), Closure::Partial, &BTreeSet::new())?;
    Ok(resolve_semisync(&sem.lts))
}

/// Builds both sides of the compatibility check of `k` with its neighbor
/// `cj`: `k` with the buffers towards `cj`, in parallel with `cj` totally
/// closed in the star of `k`, queue and exception names between the two
/// hidden; against `k` alone without buffers.
pub fn compatibility_sides(elab: &Elaboration, k: &str, cj: &str) -> Result<Sides, TopologyError> {
    let (ki, ci) = (elab.aei(k)?, elab.aei(cj)?);
    let graph = build_flow_graph(elab.architecture());
    let neighbors = graph.neighbors(ki);
    if !neighbors.contains(&ci) {
        return Err(TopologyError::NotAttached { k: k.to_string(), cj: cj.to_string() });
    }
    let all = elab.all_aeis();
    let star: BTreeSet<usize> = neighbors.iter().copied().chain([ki]).collect();
    let left = elab.aei_semantics(ki, &all, Closure::Partial, &[ci].into())?;
    let right = elab.aei_semantics(ci, &star, Closure::Total, &[ki].into())?;
    let both = compose(&left, &right, elab.state_limit())?;
    let mut hidden = elab.queue_names(ki, &[ci].into());
    hidden.extend(elab.exception_names(ki, &[ci].into()));
    let lhs = resolve_semisync(&hide(&both.lts, &HideMode::Hide(hidden)));
    Ok(Sides { lhs, rhs: local_semantics(elab, ki)? })
}

/// Builds both sides of the interoperability check of `cj` with the rest
/// of `y`: the members of `y` composed in declaration order, all totally
/// closed except `cj`, restricted to what `cj` can observe and with the
/// queue and exception names between `cj` and `y` hidden; against `cj`
/// alone without buffers.
pub fn interoperability_sides(elab: &Elaboration, y: &[String], cj: &str) -> Result<Sides, TopologyError> {
    let ci = elab.aei(cj)?;
    let set = elab.aei_set(y)?;
    if !set.contains(&ci) {
        return Err(TopologyError::NotMember { cj: cj.to_string() });
    }
    if set.len() < 3 {
        return Err(TopologyError::CycleTooSmall(set.len()));
    }
    let members: Vec<usize> = set.iter().copied().collect();
    let composite = elab.composite_semantics(&members, &elab.all_aeis(), Closure::Total, &set, &[ci].into())?;
    let visible = elab.name_sets(ci, &elab.all_aeis()).visible;
    let mut hidden = elab.queue_names(ci, &set);
    hidden.extend(elab.exception_names(ci, &set));
    let restricted = hide(&composite.lts, &HideMode::KeepOnly(visible));
    let lhs = resolve_semisync(&hide(&restricted, &HideMode::Hide(hidden)));
    Ok(Sides { lhs, rhs: local_semantics(elab, ci)? })
}

fn timed(build: impl FnOnce() -> Result<Sides, TopologyError>) -> Result<CheckOutcome, TopologyError> {
    let start = Instant::now();
    let sides = build()?;
    let verdict = weak_bisimilar(&sides.lhs, &sides.rhs);
    Ok(CheckOutcome { sides, verdict, millis: start.elapsed().as_millis() as u64 })
}

/// Whether `k` is compatible with `cj`; on failure the verdict carries a
/// formula telling the composite apart from `k` alone.
pub fn check_compatibility(elab: &Elaboration, k: &str, cj: &str) -> Result<CheckOutcome, TopologyError> {
    timed(|| compatibility_sides(elab, k, cj))
}

/// Whether `cj` interoperates with the other members of `y`.
pub fn check_interoperability(elab: &Elaboration, y: &[String], cj: &str) -> Result<CheckOutcome, TopologyError> {
    timed(|| interoperability_sides(elab, y, cj))
}
