//! Plain edge-list view of an LTS and its weak saturation.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::kernel::Lts;

/// Edge lists over a shared label table; label 0 is τ. Semi-synchronous
/// transitions are taken towards their success continuation.
#[derive(Debug, Clone, Default)]
pub(crate) struct Graph {
    pub labels: Vec<String>,
    pub succ: Vec<Vec<(u32, u32)>>,
}

impl Graph {
    pub fn new() -> Self {
        Graph { labels: vec!["tau".to_string()], succ: Vec::new() }
    }

    fn label_id(&mut self, index: &mut HashMap<String, u32>, name: &str) -> u32 {
        if name == "tau" {
            return 0;
        }
        *index.entry(name.to_string()).or_insert_with(|| {
            self.labels.push(name.to_string());
            (self.labels.len() - 1) as u32
        })
    }

    /// Appends the states of `lts`, returning the offset of its state 0.
    pub fn append(&mut self, lts: &Lts, index: &mut HashMap<String, u32>) -> u32 {
        let offset = self.succ.len() as u32;
        for s in lts.states() {
            let mut out = Vec::with_capacity(lts.transitions(s).len());
            for t in lts.transitions(s) {
                let l = self.label_id(index, lts.label_name(t.label()));
                out.push((l, t.target() + offset));
            }
            out.sort_unstable();
            out.dedup();
            self.succ.push(out);
        }
        offset
    }

    pub fn from_lts(lts: &Lts) -> Graph {
        let mut g = Graph::new();
        g.append(lts, &mut HashMap::new());
        g
    }

    pub fn len(&self) -> usize {
        self.succ.len()
    }

    /// Weak transition relation: `s =τ=> t` for every `t` reachable by τ
    /// steps (including `s`), and `s =a=> t` for every τ*·a·τ* path.
    pub fn saturate(&self) -> Graph {
        let n = self.len();
        let mut tau = DiGraph::<(), ()>::with_capacity(n, 0);
        for _ in 0..n {
            tau.add_node(());
        }
        for (s, out) in self.succ.iter().enumerate() {
            for &(l, t) in out {
                if l == 0 && t as usize != s {
                    tau.add_edge(NodeIndex::new(s), NodeIndex::new(t as usize), ());
                }
            }
        }
        // Components come successors first, so closures can be built in order.
        let sccs = tarjan_scc(&tau);
        let mut comp = vec![0usize; n];
        for (c, members) in sccs.iter().enumerate() {
            for v in members {
                comp[v.index()] = c;
            }
        }
        let mut comp_succ: Vec<Vec<usize>> = vec![Vec::new(); sccs.len()];
        for (s, out) in self.succ.iter().enumerate() {
            for &(l, t) in out {
                let (a, b) = (comp[s], comp[t as usize]);
                if l == 0 && a != b {
                    comp_succ[a].push(b);
                }
            }
        }
        for cs in &mut comp_succ {
            cs.sort_unstable();
            cs.dedup();
        }
        let mut closure: Vec<FixedBitSet> = Vec::with_capacity(sccs.len());
        for (c, members) in sccs.iter().enumerate() {
            let mut set = FixedBitSet::with_capacity(n);
            for v in members {
                set.insert(v.index());
            }
            for &d in &comp_succ[c] {
                set.union_with(&closure[d]);
            }
            closure.push(set);
        }

        let mut out: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
        for s in 0..n {
            out[s].extend(closure[comp[s]].ones().map(|t| (0, t as u32)));
        }
        for a in 1..self.labels.len() as u32 {
            // Targets of one a-step followed by τ*, per state.
            let mut after: Vec<Option<FixedBitSet>> = vec![None; n];
            let mut any = false;
            for (s, edges) in self.succ.iter().enumerate() {
                for &(l, t) in edges {
                    if l == a {
                        after[s].get_or_insert_with(|| FixedBitSet::with_capacity(n)).union_with(&closure[comp[t as usize]]);
                        any = true;
                    }
                }
            }
            if !any {
                continue;
            }
            let mut weak: Vec<FixedBitSet> = Vec::with_capacity(sccs.len());
            for (c, members) in sccs.iter().enumerate() {
                let mut set = FixedBitSet::with_capacity(n);
                for v in members {
                    if let Some(x) = &after[v.index()] {
                        set.union_with(x);
                    }
                }
                for &d in &comp_succ[c] {
                    set.union_with(&weak[d]);
                }
                weak.push(set);
            }
            for s in 0..n {
                out[s].extend(weak[comp[s]].ones().map(|t| (a, t as u32)));
            }
        }
        for o in &mut out {
            o.sort_unstable();
        }
        Graph { labels: self.labels.clone(), succ: out }
    }

    pub fn to_lts(&self, initial: u32) -> Lts {
        let mut lts = Lts::with_states(self.len().max(1));
        lts.set_initial(initial);
        for (s, out) in self.succ.iter().enumerate() {
            for &(l, t) in out {
                lts.add(s as u32, &self.labels[l as usize], t);
            }
        }
        lts
    }
}
