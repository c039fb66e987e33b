//! Labeled transition systems and the static process-algebra operators.

mod aut;
mod deadlock;
mod generate;
mod ops;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use aut::{parse_aut, write_aut, write_dot, AutError};
pub use deadlock::{find_deadlocks, shortest_trace, DeadlockNotion};
pub use generate::{generate_lts, Invocation, InteractionTable};
pub use ops::{hide, parallel, relabel, resolve_semisync, HideMode};

pub type StateId = u32;
pub type LabelId = u32;

/// Label id of the invisible action in every label table.
pub const TAU: LabelId = 0;

/// Suffix distinguishing exception labels from ordinary actions.
pub const EXCEPTION_SUFFIX: &str = "_exception";

/// Default bound on the number of states any construction may produce.
pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Tau,
    Visible(String),
}

impl Label {
    pub fn name(&self) -> &str {
        match self {
            Label::Tau => "tau",
            Label::Visible(s) => s,
        }
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    pub fn is_exception(&self) -> bool {
        matches!(self, Label::Visible(s) if s.ends_with(EXCEPTION_SUFFIX))
    }

    /// Whether the name joins several original names with `#`.
    pub fn is_composite(&self) -> bool {
        matches!(self, Label::Visible(s) if s.contains('#'))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The exception label raised by a semi-synchronous action `name`.
pub fn exception_label(name: &str) -> String {
    format!("{name}{EXCEPTION_SUFFIX}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transition {
    Normal {
        label: LabelId,
        target: StateId,
    },
    /// A semi-synchronous action: `ok` is reached when the communication
    /// happens, `exc` when it fails and `exception` is raised instead.
    SemiSync {
        label: LabelId,
        ok: StateId,
        exc: StateId,
        exception: LabelId,
    },
}

impl Transition {
    pub fn label(&self) -> LabelId {
        match *self {
            Transition::Normal { label, .. } | Transition::SemiSync { label, .. } => label,
        }
    }

    /// Target when the action succeeds.
    pub fn target(&self) -> StateId {
        match *self {
            Transition::Normal { target, .. } => target,
            Transition::SemiSync { ok, .. } => ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("state limit of {limit} exceeded ({states} states and {transitions} transitions explored)")]
    StateLimit { limit: usize, states: usize, transitions: usize },
    #[error("relabeling is not injective: `{0}` and `{1}` both map to `{2}`")]
    NonInjective(String, String, String),
    #[error("invalid relabeling: {0}")]
    BadRelabeling(String),
    #[error("invalid synchronization set: {0}")]
    BadSyncSet(String),
    #[error("unknown equation `{0}`")]
    UnknownEquation(String),
    #[error("unguarded recursion through `{0}`")]
    UnguardedRecursion(String),
    #[error("value {value} out of range for parameter `{param}` of `{equation}`")]
    Range { equation: String, param: String, value: String },
    #[error("evaluation error in `{equation}`: {message}")]
    Eval { equation: String, message: String },
    #[error("too many semi-synchronous interactions read in `{0}` (at most 64)")]
    TooManyFlags(String),
}

/// A finite labeled transition system. Label id 0 is always τ.
#[derive(Debug, Clone)]
pub struct Lts {
    labels: Vec<Label>,
    index: HashMap<String, LabelId>,
    initial: StateId,
    trans: Vec<Vec<Transition>>,
    marked: Vec<bool>,
}

impl Default for Lts {
    fn default() -> Self {
        Self::new()
    }
}

impl Lts {
    /// An LTS with a single state and no transitions.
    pub fn new() -> Self {
        Lts {
            labels: vec![Label::Tau],
            index: HashMap::new(),
            initial: 0,
            trans: vec![Vec::new()],
            marked: vec![false],
        }
    }

    /// An LTS with `n` states and no transitions (at least one state).
    pub fn with_states(n: usize) -> Self {
        let n = n.max(1);
        Lts { trans: vec![Vec::new(); n], marked: vec![false; n], ..Lts::new() }
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    /// Number of transitions, counting each semi-synchronous one once.
    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(Vec::len).sum()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn set_initial(&mut self, s: StateId) {
        assert!((s as usize) < self.trans.len(), "initial state out of range");
        self.initial = s;
    }

    pub fn transitions(&self, s: StateId) -> &[Transition] {
        &self.trans[s as usize]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        0..self.trans.len() as StateId
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, id: LabelId) -> &Label {
        &self.labels[id as usize]
    }

    pub fn label_name(&self, id: LabelId) -> &str {
        self.labels[id as usize].name()
    }

    pub fn lookup(&self, name: &str) -> Option<LabelId> {
        if name == "tau" {
            return Some(TAU);
        }
        self.index.get(name).copied()
    }

    /// Returns the id of `name`, adding it to the table if needed. The name
    /// `tau` denotes the invisible action.
    pub fn intern(&mut self, name: &str) -> LabelId {
        if let Some(id) = self.lookup(name) {
            return id;
        }
        let id = self.labels.len() as LabelId;
        self.labels.push(Label::Visible(name.to_string()));
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn add_state(&mut self) -> StateId {
        self.trans.push(Vec::new());
        self.marked.push(false);
        (self.trans.len() - 1) as StateId
    }

    pub fn add_transition(&mut self, from: StateId, t: Transition) {
        let n = self.trans.len() as StateId;
        match t {
            Transition::Normal { target, .. } => assert!(target < n, "target out of range"),
            Transition::SemiSync { ok, exc, .. } => assert!(ok < n && exc < n, "target out of range"),
        }
        self.trans[from as usize].push(t);
    }

    /// Convenience for a normal transition given by label name.
    pub fn add(&mut self, from: StateId, label: &str, to: StateId) {
        let label = self.intern(label);
        self.add_transition(from, Transition::Normal { label, target: to });
    }

    /// Marks a state, e.g. one where some queue is full.
    pub fn mark(&mut self, s: StateId) {
        self.marked[s as usize] = true;
    }

    pub fn is_marked(&self, s: StateId) -> bool {
        self.marked[s as usize]
    }

    /// Names of the labels occurring as actions on transitions.
    pub fn action_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for ts in &self.trans {
            for t in ts {
                if t.label() != TAU {
                    out.insert(self.label_name(t.label()).to_string());
                }
            }
        }
        out
    }

    /// Names of all visible labels that may occur when the LTS is run in any
    /// context, including exceptions that semi-synchronous transitions can raise.
    pub fn alphabet(&self) -> BTreeSet<String> {
        let mut out = self.action_names();
        for ts in &self.trans {
            for t in ts {
                if let Transition::SemiSync { exception, .. } = *t {
                    if exception != TAU {
                        out.insert(self.label_name(exception).to_string());
                    }
                }
            }
        }
        out
    }

    pub fn has_semisync(&self) -> bool {
        self.trans.iter().flatten().any(|t| matches!(t, Transition::SemiSync { .. }))
    }

    /// States reachable from the initial state, in breadth-first order.
    pub fn reachable(&self) -> Vec<StateId> {
        let mut seen = vec![false; self.num_states()];
        let mut order = vec![self.initial];
        seen[self.initial as usize] = true;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            i += 1;
            for t in self.transitions(s) {
                let targets = match *t {
                    Transition::Normal { target, .. } => [target, target],
                    Transition::SemiSync { ok, exc, .. } => [ok, exc],
                };
                for x in targets {
                    if !seen[x as usize] {
                        seen[x as usize] = true;
                        order.push(x);
                    }
                }
            }
        }
        order
    }

    /// Renumbers states in breadth-first order from the initial state and
    /// drops unreachable ones.
    pub fn trim(&self) -> Lts {
        let order = self.reachable();
        let mut map = vec![u32::MAX; self.num_states()];
        for (i, s) in order.iter().enumerate() {
            map[*s as usize] = i as StateId;
        }
        let mut out = Lts::with_states(order.len());
        out.labels = self.labels.clone();
        out.index = self.index.clone();
        for (i, s) in order.iter().enumerate() {
            out.marked[i] = self.marked[*s as usize];
            out.trans[i] = self.trans[*s as usize]
                .iter()
                .map(|t| match *t {
                    Transition::Normal { label, target } => Transition::Normal { label, target: map[target as usize] },
                    Transition::SemiSync { label, ok, exc, exception } => Transition::SemiSync {
                        label,
                        ok: map[ok as usize],
                        exc: map[exc as usize],
                        exception,
                    },
                })
                .collect();
        }
        out
    }

    /// Equality of structure: same initial state, same numbering and the same
    /// transitions with equal label names, in the same order.
    pub fn same_structure(&self, other: &Lts) -> bool {
        if self.initial != other.initial || self.num_states() != other.num_states() {
            return false;
        }
        self.trans.iter().zip(&other.trans).all(|(a, b)| {
            a.len() == b.len()
                && a.iter().zip(b).all(|(x, y)| match (*x, *y) {
                    (Transition::Normal { label: l1, target: t1 }, Transition::Normal { label: l2, target: t2 }) => {
                        t1 == t2 && self.label_name(l1) == other.label_name(l2)
                    }
                    (
                        Transition::SemiSync { label: l1, ok: o1, exc: e1, exception: x1 },
                        Transition::SemiSync { label: l2, ok: o2, exc: e2, exception: x2 },
                    ) => {
                        o1 == o2
                            && e1 == e2
                            && self.label_name(l1) == other.label_name(l2)
                            && self.label_name(x1) == other.label_name(x2)
                    }
                    _ => false,
                })
        })
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Vec<Label>, &mut HashMap<String, LabelId>, &mut Vec<Vec<Transition>>) {
        (&mut self.labels, &mut self.index, &mut self.trans)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_is_label_zero() {
        let mut l = Lts::new();
        assert_eq!(l.intern("tau"), TAU);
        assert_eq!(l.intern("a"), 1);
        assert_eq!(l.intern("a"), 1);
        assert!(l.label(TAU).is_tau());
    }

    #[test]
    fn exception_labels_are_recognised() {
        assert!(Label::Visible(exception_label("C.s")).is_exception());
        assert!(!Label::Visible("C.s".into()).is_exception());
        assert!(Label::Visible("A.o#B.i".into()).is_composite());
    }

    #[test]
    fn trim_drops_unreachable() {
        let mut l = Lts::with_states(3);
        l.add(0, "a", 2);
        l.add(1, "b", 0);
        let t = l.trim();
        assert_eq!(t.num_states(), 2);
        assert_eq!(t.num_transitions(), 1);
    }
}
