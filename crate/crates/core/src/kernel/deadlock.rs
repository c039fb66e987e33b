use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{Lts, StateId, Transition, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DeadlockNotion {
    /// No outgoing transition at all.
    Strict,
    /// No visible action reachable through τ steps.
    #[default]
    Weak,
}

/// Reachable deadlock states, in increasing order.
pub fn find_deadlocks(lts: &Lts, notion: DeadlockNotion) -> Vec<StateId> {
    let reach = lts.reachable();
    let mut out: Vec<StateId> = match notion {
        DeadlockNotion::Strict => reach.into_iter().filter(|&s| lts.transitions(s).is_empty()).collect(),
        DeadlockNotion::Weak => {
            let live = can_reach_visible(lts);
            reach.into_iter().filter(|&s| !live[s as usize]).collect()
        }
    };
    out.sort_unstable();
    out
}

/// For every state, whether some visible action is reachable via τ steps.
fn can_reach_visible(lts: &Lts) -> Vec<bool> {
    let n = lts.num_states();
    let mut tau_pred: Vec<Vec<StateId>> = vec![Vec::new(); n];
    let mut live = vec![false; n];
    let mut queue = VecDeque::new();
    for s in lts.states() {
        for t in lts.transitions(s) {
            match *t {
                Transition::Normal { label: TAU, target } => tau_pred[target as usize].push(s),
                _ => {
                    if !live[s as usize] {
                        live[s as usize] = true;
                        queue.push_back(s);
                    }
                }
            }
        }
    }
    while let Some(s) = queue.pop_front() {
        for &p in &tau_pred[s as usize] {
            if !live[p as usize] {
                live[p as usize] = true;
                queue.push_back(p);
            }
        }
    }
    live
}

/// Labels along a shortest path from the initial state to `target`, with
/// τ steps written as `tau`. `None` if `target` is unreachable.
pub fn shortest_trace(lts: &Lts, target: StateId) -> Option<Vec<String>> {
    let n = lts.num_states();
    let mut prev: Vec<Option<(StateId, u32)>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([lts.initial()]);
    seen[lts.initial() as usize] = true;
    while let Some(s) = queue.pop_front() {
        if s == target {
            let mut labels = Vec::new();
            let mut cur = s;
            while let Some((p, label)) = prev[cur as usize] {
                labels.push(lts.label_name(label).to_string());
                cur = p;
            }
            labels.reverse();
            return Some(labels);
        }
        for t in lts.transitions(s) {
            let steps = match *t {
                Transition::Normal { label, target } => vec![(label, target)],
                Transition::SemiSync { label, ok, exc, exception } => vec![(label, ok), (exception, exc)],
            };
            for (label, x) in steps {
                if !seen[x as usize] {
                    seen[x as usize] = true;
                    prev[x as usize] = Some((s, label));
                    queue.push_back(x);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_state_is_dead_both_ways() {
        let l = Lts::new();
        assert_eq!(find_deadlocks(&l, DeadlockNotion::Strict), vec![0]);
        assert_eq!(find_deadlocks(&l, DeadlockNotion::Weak), vec![0]);
    }

    #[test]
    fn tau_loop_is_weak_but_not_strict() {
        let mut l = Lts::new();
        l.add(0, "tau", 0);
        assert!(find_deadlocks(&l, DeadlockNotion::Strict).is_empty());
        assert_eq!(find_deadlocks(&l, DeadlockNotion::Weak), vec![0]);
    }

    #[test]
    fn trace_follows_shortest_path() {
        let mut l = Lts::with_states(4);
        l.add(0, "a", 1);
        l.add(1, "b", 3);
        l.add(0, "c", 2);
        l.add(2, "tau", 3);
        assert_eq!(shortest_trace(&l, 3).unwrap(), vec!["a", "b"]);
        assert_eq!(shortest_trace(&l, 0).unwrap(), Vec::<String>::new());
    }
}
