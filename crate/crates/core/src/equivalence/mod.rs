//! Weak and strong bisimilarity by partition refinement, with a
//! distinguishing formula whenever two systems differ.

mod formula;
mod graph;
mod refine;

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::kernel::{relabel, KernelError, Lts, StateId};

pub use formula::Formula;
use graph::Graph;
use refine::{refine, Distinguisher};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Weak,
    Strong,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// Pairs of related states (left, right), covering both initial states.
    Equivalent { relation: Vec<(StateId, StateId)> },
    /// Holds at the left initial state and fails at the right one.
    Distinct { formula: Formula },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }

    pub fn formula(&self) -> Option<&Formula> {
        match self {
            Verdict::Distinct { formula } => Some(formula),
            Verdict::Equivalent { .. } => None,
        }
    }
}

/// Decides whether the initial states of `left` and `right` are bisimilar.
/// Semi-synchronous transitions are taken as their successful outcome.
pub fn check(left: &Lts, right: &Lts, mode: Mode) -> Verdict {
    let mut g = Graph::new();
    let mut index = HashMap::new();
    g.append(left, &mut index);
    let offset = g.append(right, &mut index);
    let g = match mode {
        Mode::Weak => g.saturate(),
        Mode::Strong => g,
    };
    let history = refine(&g);
    let block = history.finest();
    let (l0, r0) = (left.initial(), right.initial() + offset);
    if block[l0 as usize] == block[r0 as usize] {
        let mut by_block: HashMap<u32, Vec<StateId>> = HashMap::new();
        for t in offset..g.len() as u32 {
            by_block.entry(block[t as usize]).or_default().push(t - offset);
        }
        let mut relation = Vec::new();
        for s in 0..offset {
            if let Some(ts) = by_block.get(&block[s as usize]) {
                relation.extend(ts.iter().map(|&t| (s, t)));
            }
        }
        Verdict::Equivalent { relation }
    } else {
        let mut d = Distinguisher::new(&g, &history, mode == Mode::Weak);
        Verdict::Distinct { formula: d.distinguish(l0, r0) }
    }
}

pub fn weak_bisimilar(left: &Lts, right: &Lts) -> Verdict {
    check(left, right, Mode::Weak)
}

pub fn strong_bisimilar(left: &Lts, right: &Lts) -> Verdict {
    check(left, right, Mode::Strong)
}

/// Weak bisimilarity after renaming the visible labels of `left` by `map`.
pub fn weak_bisim_upto_relabeling(
    left: &Lts,
    right: &Lts,
    map: &BTreeMap<String, String>,
) -> Result<Verdict, KernelError> {
    Ok(weak_bisimilar(&relabel(left, map)?, right))
}

/// Block number of every state under the given equivalence.
pub fn partition(lts: &Lts, mode: Mode) -> Vec<u32> {
    let g = Graph::from_lts(lts);
    let g = if mode == Mode::Weak { g.saturate() } else { g };
    refine(&g).finest().to_vec()
}

/// Weak transition system: `s -tau-> t` for every τ* path (including the
/// empty one) and `s -a-> t` for every τ*·a·τ* path.
pub fn saturate(lts: &Lts) -> Lts {
    Graph::from_lts(lts).saturate().to_lts(lts.initial())
}

/// Quotient by the given equivalence, restricted to reachable states.
/// In weak mode τ steps inside a block are dropped.
pub fn minimize(lts: &Lts, mode: Mode) -> Lts {
    let g = Graph::from_lts(lts);
    let block = partition(lts, mode);
    let blocks = block.iter().copied().max().map_or(1, |m| m as usize + 1);
    let mut out = Lts::with_states(blocks);
    out.set_initial(block[lts.initial() as usize]);
    let mut edges = Vec::new();
    for (s, succ) in g.succ.iter().enumerate() {
        for &(a, t) in succ {
            let (bs, bt) = (block[s], block[t as usize]);
            if mode == Mode::Weak && a == 0 && bs == bt {
                continue;
            }
            edges.push((bs, a, bt));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    for (bs, a, bt) in edges {
        out.add(bs, &g.labels[a as usize], bt);
    }
    out.trim()
}
