use std::collections::HashMap;

use super::formula::Formula;
use super::graph::Graph;

/// Block numbers of every state after each refinement round. Round 0 puts
/// all states together; the last round is stable.
#[derive(Debug, Clone)]
pub(crate) struct History {
    pub rounds: Vec<Vec<u32>>,
}

impl History {
    pub fn finest(&self) -> &[u32] {
        self.rounds.last().expect("at least one round")
    }
}

/// Signature refinement: states stay together while they reach the same
/// blocks with the same labels.
pub(crate) fn refine(g: &Graph) -> History {
    let n = g.len();
    let mut rounds = vec![vec![0u32; n]];
    let mut count = usize::from(n > 0);
    loop {
        let prev = rounds.last().unwrap();
        let mut ids: HashMap<(u32, Vec<(u32, u32)>), u32> = HashMap::new();
        let mut next = Vec::with_capacity(n);
        for s in 0..n {
            let mut sig: Vec<(u32, u32)> = g.succ[s].iter().map(|&(a, t)| (a, prev[t as usize])).collect();
            sig.sort_unstable();
            sig.dedup();
            let fresh = ids.len() as u32;
            next.push(*ids.entry((prev[s], sig)).or_insert(fresh));
        }
        let new_count = ids.len();
        rounds.push(next);
        if new_count == count {
            break;
        }
        count = new_count;
    }
    History { rounds }
}

fn signature(g: &Graph, block: &[u32], s: u32) -> Vec<(u32, u32)> {
    let mut sig: Vec<(u32, u32)> = g.succ[s as usize].iter().map(|&(a, t)| (a, block[t as usize])).collect();
    sig.sort_unstable();
    sig.dedup();
    sig
}

/// Builds formulas true at one state and false at another from the rounds
/// in which they were separated.
pub(crate) struct Distinguisher<'a> {
    pub graph: &'a Graph,
    pub history: &'a History,
    pub weak: bool,
    memo: HashMap<(u32, u32), Formula>,
}

impl<'a> Distinguisher<'a> {
    pub fn new(graph: &'a Graph, history: &'a History, weak: bool) -> Self {
        Distinguisher { graph, history, weak, memo: HashMap::new() }
    }

    fn diamond(&self, a: u32, f: Formula) -> Formula {
        let name = self.graph.labels[a as usize].clone();
        if self.weak {
            Formula::Weak(name, Box::new(f))
        } else {
            Formula::Strong(name, Box::new(f))
        }
    }

    /// A formula holding at `s` and failing at `t`. Panics if the two
    /// states were never separated.
    pub fn distinguish(&mut self, s: u32, t: u32) -> Formula {
        if let Some(f) = self.memo.get(&(s, t)) {
            return f.clone();
        }
        let rounds = &self.history.rounds;
        let r = (1..rounds.len())
            .find(|&r| rounds[r][s as usize] != rounds[r][t as usize])
            .expect("states are not separated");
        let prev = &rounds[r - 1];
        let sig_s = signature(self.graph, prev, s);
        let sig_t = signature(self.graph, prev, t);
        let f = if let Some(&(a, b)) = sig_s.iter().find(|x| sig_t.binary_search(x).is_err()) {
            let s2 = self.graph.succ[s as usize]
                .iter()
                .find(|&&(l, y)| l == a && prev[y as usize] == b)
                .map(|&(_, y)| y)
                .unwrap();
            // One successor per block suffices: formulas built from round
            // r-1 cannot tell apart states sharing a block there.
            let mut seen = Vec::new();
            let mut conj = Vec::new();
            for &(l, y) in &self.graph.succ[t as usize] {
                if l == a && !seen.contains(&prev[y as usize]) {
                    seen.push(prev[y as usize]);
                    conj.push(self.distinguish(s2, y));
                }
            }
            self.diamond(a, Formula::and(conj))
        } else {
            Formula::negate(self.distinguish(t, s))
        };
        self.memo.insert((s, t), f.clone());
        f
    }
}
