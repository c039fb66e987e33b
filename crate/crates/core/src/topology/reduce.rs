use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::elaboration::{Closure, ElabError, Elaboration};
use crate::kernel::{find_deadlocks, hide, resolve_semisync, shortest_trace, DeadlockNotion, HideMode, Lts, EXCEPTION_SUFFIX};

use super::checks::{check_compatibility, check_interoperability, local_semantics, CheckKind, CheckOutcome};
use super::graph::{build_flow_graph, decompose, Decomposition, FlowGraph};
use super::TopologyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
    /// The condition's premise does not apply.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckRecord {
    pub condition: String,
    pub kind: CheckKind,
    pub subject: String,
    pub against: Vec<String>,
    pub status: Status,
    pub formula: Option<String>,
    pub lhs_states: Option<usize>,
    pub rhs_states: Option<usize>,
    pub note: Option<String>,
    pub millis: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionRecord {
    pub id: String,
    pub scope: Vec<String>,
    pub status: Status,
}

/// Deadlock freedom of one instance's partially closed semantics without
/// buffers; `None` when the state space could not be built.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalRecord {
    pub aei: String,
    pub states: Option<usize>,
    pub deadlock_free: Option<bool>,
    pub trace: Option<Vec<String>>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Conclusion {
    DeadlockFree { witnesses: Vec<String> },
    DeadlockFound { aei: String, trace: Vec<String> },
    ConditionsFailed { failed: Vec<String> },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnionView {
    pub members: Vec<String>,
    pub frontier: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarView {
    pub center: String,
    pub border: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionView {
    pub edges: Vec<(String, String)>,
    pub cyclic_unions: Vec<UnionView>,
    pub stars: Vec<StarView>,
    pub acyclic: Vec<String>,
}

impl DecompositionView {
    pub fn new(g: &FlowGraph, d: &Decomposition) -> Self {
        let names = |vs: &[usize]| vs.iter().map(|&v| g.names[v].clone()).collect::<Vec<_>>();
        DecompositionView {
            edges: g.edges.iter().map(|&(a, b)| (g.names[a].clone(), g.names[b].clone())).collect(),
            cyclic_unions: d
                .cyclic_unions
                .iter()
                .map(|u| UnionView { members: names(&u.members), frontier: names(&u.frontier) })
                .collect(),
            stars: d.stars.iter().map(|s| StarView { center: g.names[s.center].clone(), border: names(&s.border) }).collect(),
            acyclic: names(&d.acyclic),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub decomposition: DecompositionView,
    pub local: Vec<LocalRecord>,
    pub checks: Vec<CheckRecord>,
    pub conditions: Vec<ConditionRecord>,
    pub conclusion: Conclusion,
}

impl ReductionReport {
    pub fn strip_timings(&mut self) {
        for c in &mut self.checks {
            c.millis = None;
        }
    }
}

fn record(
    condition: &str,
    kind: CheckKind,
    subject: &str,
    against: Vec<String>,
    result: Result<CheckOutcome, TopologyError>,
) -> Result<CheckRecord, TopologyError> {
    let mut rec = CheckRecord {
        condition: condition.to_string(),
        kind,
        subject: subject.to_string(),
        against,
        status: Status::Inconclusive,
        formula: None,
        lhs_states: None,
        rhs_states: None,
        note: None,
        millis: None,
    };
    match result {
        Ok(out) => {
            rec.status = if out.holds() { Status::Holds } else { Status::Fails };
            rec.formula = out.verdict.formula().map(ToString::to_string);
            rec.lhs_states = Some(out.sides.lhs.num_states());
            rec.rhs_states = Some(out.sides.rhs.num_states());
            rec.millis = Some(out.millis);
        }
        Err(e) if e.is_state_limit() => rec.note = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(rec)
}

/// Holds if all hold, fails if any fails, inconclusive otherwise.
fn all_of(records: &[CheckRecord]) -> Status {
    if records.iter().any(|r| r.status == Status::Fails) {
        Status::Fails
    } else if records.iter().all(|r| r.status == Status::Holds) {
        Status::Holds
    } else {
        Status::Inconclusive
    }
}

/// Holds if one holds, fails if all fail, inconclusive otherwise.
fn any_of(records: &[CheckRecord]) -> Status {
    if records.iter().any(|r| r.status == Status::Holds) {
        Status::Holds
    } else if records.iter().all(|r| r.status == Status::Fails) {
        Status::Fails
    } else {
        Status::Inconclusive
    }
}

fn local_record(elab: &Elaboration, aei: usize, notion: DeadlockNotion) -> Result<LocalRecord, TopologyError> {
    let name = elab.aeis()[aei].name.clone();
    match local_semantics(elab, aei) {
        Ok(lts) => {
            let dead = find_deadlocks(&lts, notion);
            Ok(LocalRecord {
                aei: name,
                states: Some(lts.num_states()),
                deadlock_free: Some(dead.is_empty()),
                trace: dead.first().map(|&s| visible_trace(&lts, s)),
                note: None,
            })
        }
        Err(e) if e.is_state_limit() => {
            Ok(LocalRecord { aei: name, states: None, deadlock_free: None, trace: None, note: Some(e.to_string()) })
        }
        Err(e) => Err(e.into()),
    }
}

/// Visible labels along a shortest path to `target`.
fn visible_trace(lts: &Lts, target: u32) -> Vec<String> {
    shortest_trace(lts, target).unwrap_or_default().into_iter().filter(|l| l != "tau").collect()
}

/// Interoperability checks tried one at a time until one holds.
fn first_success(
    elab: &Elaboration,
    id: &str,
    y: &[String],
    candidates: &[String],
) -> Result<Vec<CheckRecord>, TopologyError> {
    let mut out = Vec::new();
    for c in candidates {
        let rec = record(id, CheckKind::Interoperability, c, y.to_vec(), check_interoperability(elab, y, c))?;
        let done = rec.status == Status::Holds;
        out.push(rec);
        if done {
            break;
        }
    }
    Ok(out)
}

/// Deadlock verification through the decomposition of the flow graph:
/// compatibility inside stars, interoperability inside cyclic unions, and
/// the deadlock freedom of single instances.
pub fn verify_deadlock_by_reduction(elab: &Elaboration, notion: DeadlockNotion) -> Result<ReductionReport, TopologyError> {
    let g = build_flow_graph(elab.architecture());
    let d = decompose(&g);
    let name = |v: usize| g.names[v].clone();

    let local: Vec<LocalRecord> =
        (0..g.len()).into_par_iter().map(|v| local_record(elab, v, notion)).collect::<Result<_, _>>()?;

    let mut checks = Vec::new();
    let mut conditions = Vec::new();

    let pairs: Vec<(usize, usize)> = d
        .stars
        .iter()
        .flat_map(|s| {
            let cu: BTreeSet<usize> = d.union_of(s.center).map(|u| u.members.iter().copied().collect()).unwrap_or_default();
            s.border.iter().filter(move |b| !cu.contains(b)).map(move |&b| (s.center, b))
        })
        .collect();
    let cond1: Vec<CheckRecord> = pairs
        .par_iter()
        .map(|&(k, c)| {
            record("1", CheckKind::Compatibility, &name(k), vec![name(c)], check_compatibility(elab, &name(k), &name(c)))
        })
        .collect::<Result<_, _>>()?;
    for s in &d.stars {
        let mine: Vec<CheckRecord> = cond1.iter().filter(|r| r.subject == name(s.center)).cloned().collect();
        let mut scope = vec![name(s.center)];
        scope.extend(s.border.iter().map(|&b| name(b)));
        let status = if mine.is_empty() { Status::Vacuous } else { all_of(&mine) };
        conditions.push(ConditionRecord { id: "1".into(), scope, status });
    }
    checks.extend(cond1);

    for u in &d.cyclic_unions {
        let y: Vec<String> = u.members.iter().map(|&m| name(m)).collect();
        if u.frontier.is_empty() {
            let recs = first_success(elab, "2a", &y, &y)?;
            conditions.push(ConditionRecord { id: "2a".into(), scope: y.clone(), status: any_of(&recs) });
            checks.extend(recs);
            continue;
        }
        let recs: Vec<CheckRecord> = u
            .frontier
            .par_iter()
            .map(|&f| record("2b", CheckKind::Interoperability, &name(f), y.clone(), check_interoperability(elab, &y, &name(f))))
            .collect::<Result<_, _>>()?;
        conditions.push(ConditionRecord { id: "2b".into(), scope: y.clone(), status: all_of(&recs) });
        checks.extend(recs);

        let free = |v: usize| local[v].deadlock_free;
        let frontier_free: Vec<Option<bool>> = u.frontier.iter().map(|&f| free(f)).collect();
        let inner: Vec<usize> = u.members.iter().copied().filter(|m| !u.frontier.contains(m)).collect();
        let status = if frontier_free.contains(&Some(true)) {
            Status::Vacuous
        } else if frontier_free.contains(&None) || inner.iter().any(|&m| free(m).is_none()) {
            Status::Inconclusive
        } else {
            let candidates: Vec<String> = inner.iter().filter(|&&m| free(m) == Some(true)).map(|&m| name(m)).collect();
            if candidates.is_empty() {
                Status::Vacuous
            } else {
                let recs = first_success(elab, "2c", &y, &candidates)?;
                let st = any_of(&recs);
                checks.extend(recs);
                st
            }
        };
        conditions.push(ConditionRecord { id: "2c".into(), scope: y, status });
    }

    let conclusion = if conditions.iter().any(|c| c.status == Status::Fails) {
        let failed = checks
            .iter()
            .filter(|r| r.status == Status::Fails)
            .map(|r| format!("{}: {} against {}", r.condition, r.subject, r.against.join(", ")))
            .collect();
        Conclusion::ConditionsFailed { failed }
    } else if conditions.iter().any(|c| c.status == Status::Inconclusive) {
        Conclusion::Inconclusive { reason: "a check exceeded the state limit".into() }
    } else if local.iter().any(|l| l.deadlock_free == Some(true)) {
        let witnesses = local.iter().filter(|l| l.deadlock_free == Some(true)).map(|l| l.aei.clone()).collect();
        Conclusion::DeadlockFree { witnesses }
    } else if let Some(l) = local.iter().find(|l| l.deadlock_free.is_none()) {
        Conclusion::Inconclusive { reason: format!("the semantics of {} exceeded the state limit", l.aei) }
    } else {
        let first = &local[0];
        Conclusion::DeadlockFound { aei: first.aei.clone(), trace: first.trace.clone().unwrap_or_default() }
    };

    Ok(ReductionReport { decomposition: DecompositionView::new(&g, &d), local, checks, conditions, conclusion })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DirectVerdict {
    DeadlockFree,
    /// `queue_full` tells whether some queue is full in the deadlocked state.
    Deadlock { trace: Vec<String>, queue_full: bool },
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectReport {
    pub verdict: DirectVerdict,
    pub states: Option<usize>,
    pub transitions: Option<usize>,
    pub millis: Option<u64>,
}

impl DirectReport {
    pub fn is_deadlock_free(&self) -> bool {
        self.verdict == DirectVerdict::DeadlockFree
    }
}

/// All instances with all their queues, partially closed in the whole
/// architecture, exceptions hidden.
pub fn direct_system(elab: &Elaboration) -> Result<Lts, ElabError> {
    let all = elab.all_aeis();
    let members: Vec<usize> = all.iter().copied().collect();
    let sem = elab.composite_semantics(&members, &all, Closure::Partial, &all, &BTreeSet::new())?;
    let exceptions: BTreeSet<String> =
        sem.lts.alphabet().into_iter().filter(|l| l.ends_with(EXCEPTION_SUFFIX)).collect();
    Ok(resolve_semisync(&hide(&sem.lts, &HideMode::Hide(exceptions))))
}

/// Deadlock search on the full composition of the architecture.
pub fn verify_deadlock_direct(elab: &Elaboration, notion: DeadlockNotion) -> Result<DirectReport, TopologyError> {
    let start = Instant::now();
    let lts = match direct_system(elab) {
        Ok(l) => l,
        Err(e) if e.is_state_limit() => {
            return Ok(DirectReport {
                verdict: DirectVerdict::Inconclusive { reason: e.to_string() },
                states: None,
                transitions: None,
                millis: Some(start.elapsed().as_millis() as u64),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let verdict = match find_deadlocks(&lts, notion).first() {
        None => DirectVerdict::DeadlockFree,
        Some(&s) => DirectVerdict::Deadlock {
            trace: visible_trace(&lts, s),
            queue_full: lts.is_marked(s),
        },
    };
    Ok(DirectReport {
        verdict,
        states: Some(lts.num_states()),
        transitions: Some(lts.num_transitions()),
        millis: Some(start.elapsed().as_millis() as u64),
    })
}
