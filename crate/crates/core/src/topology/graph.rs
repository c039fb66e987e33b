use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use petgraph::algo::bridges;
use petgraph::graph::{NodeIndex, UnGraph};
use petgraph::visit::EdgeRef;
use serde::Serialize;

use crate::frontend::ValidatedArchitecture;

/// Instances as vertices, one undirected edge per attached pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowGraph {
    pub names: Vec<String>,
    /// Edges `(u, v)` with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
}

impl FlowGraph {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> BTreeSet<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

pub fn build_flow_graph(arch: &ValidatedArchitecture) -> FlowGraph {
    let names: Vec<String> = arch.instances().iter().map(|i| i.name.clone()).collect();
    let mut edges = BTreeSet::new();
    for att in arch.attachments() {
        let (Some(a), Some(b)) = (arch.aei_index(&att.from.aei), arch.aei_index(&att.to.aei)) else { continue };
        if a != b {
            edges.insert((a.min(b), a.max(b)));
        }
    }
    FlowGraph { names, edges: edges.into_iter().collect() }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicUnion {
    /// In declaration order.
    pub members: Vec<usize>,
    /// Members attached to some instance outside the union.
    pub frontier: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Star {
    pub center: usize,
    pub border: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub cyclic_unions: Vec<CyclicUnion>,
    pub stars: Vec<Star>,
    /// Instances outside every cyclic union or touching an edge outside them.
    pub acyclic: Vec<usize>,
}

impl Decomposition {
    pub fn union_of(&self, v: usize) -> Option<&CyclicUnion> {
        self.cyclic_unions.iter().find(|u| u.members.contains(&v))
    }
}

/// Splits the graph into cyclic unions (vertices joined by edges lying on
/// cycles) and stars covering the remaining edges, built from the leaves
/// inwards.
pub fn decompose(g: &FlowGraph) -> Decomposition {
    let mut ug = UnGraph::<(), ()>::with_capacity(g.len(), g.edges.len());
    for _ in 0..g.len() {
        ug.add_node(());
    }
    for &(a, b) in &g.edges {
        ug.add_edge(NodeIndex::new(a), NodeIndex::new(b), ());
    }
    let bridge_set: BTreeSet<(usize, usize)> = bridges(&ug)
        .map(|e| {
            let (a, b) = (e.source().index(), e.target().index());
            (a.min(b), a.max(b))
        })
        .collect();

    // Components of the graph without its bridges.
    let mut parent: Vec<usize> = (0..g.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut cyclic = vec![false; g.len()];
    for &e in g.edges.iter().filter(|e| !bridge_set.contains(e)) {
        let (ra, rb) = (find(&mut parent, e.0), find(&mut parent, e.1));
        parent[ra.max(rb)] = ra.min(rb);
        cyclic[e.0] = true;
        cyclic[e.1] = true;
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in (0..g.len()).filter(|&v| cyclic[v]) {
        by_root.entry(find(&mut parent, v)).or_default().push(v);
    }
    let mut cyclic_unions: Vec<CyclicUnion> = by_root
        .into_values()
        .map(|members| {
            let set: BTreeSet<usize> = members.iter().copied().collect();
            let frontier = members.iter().copied().filter(|&m| g.neighbors(m).iter().any(|n| !set.contains(n))).collect();
            CyclicUnion { members, frontier }
        })
        .collect();
    cyclic_unions.sort_by_key(|u| u.members[0]);

    let mut remaining = bridge_set;
    let mut stars = Vec::new();
    while !remaining.is_empty() {
        let adj = |v: usize, rem: &BTreeSet<(usize, usize)>| -> Vec<usize> {
            rem.iter().filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None }).collect()
        };
        let leaves: BTreeSet<usize> = (0..g.len()).filter(|&v| adj(v, &remaining).len() == 1).collect();
        let candidates: BTreeSet<usize> = leaves.iter().flat_map(|&l| adj(l, &remaining)).collect();
        let center = *candidates
            .iter()
            .min_by_key(|&&c| (!cyclic[c], std::cmp::Reverse(g.degree(c)), c))
            .expect("a forest with edges has leaves");
        let border: Vec<usize> = adj(center, &remaining).into_iter().filter(|n| leaves.contains(n)).collect();
        for &b in &border {
            remaining.remove(&(center.min(b), center.max(b)));
        }
        stars.push(Star { center, border });
    }

    let acyclic: Vec<usize> = (0..g.len())
        .filter(|&v| !cyclic[v] || stars.iter().any(|s| s.center == v || s.border.contains(&v)))
        .collect();
    Decomposition { cyclic_unions, stars, acyclic }
}

/// Graphviz rendering: cyclic unions as clusters, frontier members drawn
/// with a double outline and star centers filled.
pub fn to_dot(g: &FlowGraph, d: &Decomposition) -> String {
    let mut out = String::from("graph flow {\n  node [shape=ellipse];\n");
    let frontier: BTreeSet<usize> = d.cyclic_unions.iter().flat_map(|u| u.frontier.iter().copied()).collect();
    let centers: BTreeSet<usize> = d.stars.iter().map(|s| s.center).collect();
    let node = |v: usize| {
        let mut attrs = Vec::new();
        if frontier.contains(&v) {
            attrs.push("peripheries=2");
        }
        if centers.contains(&v) {
            attrs.push("style=filled, fillcolor=lightgrey");
        }
        if attrs.is_empty() {
            format!("\"{}\";", g.names[v])
        } else {
            format!("\"{}\" [{}];", g.names[v], attrs.join(", "))
        }
    };
    let mut clustered = BTreeSet::new();
    for (i, u) in d.cyclic_unions.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{i} {{\n    label=\"cyclic union {}\";", i + 1);
        for &m in &u.members {
            let _ = writeln!(out, "    {}", node(m));
            clustered.insert(m);
        }
        out.push_str("  }\n");
    }
    for v in (0..g.len()).filter(|v| !clustered.contains(v)) {
        let _ = writeln!(out, "  {}", node(v));
    }
    for &(a, b) in &g.edges {
        let _ = writeln!(out, "  \"{}\" -- \"{}\";", g.names[a], g.names[b]);
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> FlowGraph {
        FlowGraph { names: (0..n).map(|i| format!("V{i}")).collect(), edges: edges.to_vec() }
    }

    #[test]
    fn chain_is_covered_by_stars() {
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        let d = decompose(&g);
        assert!(d.cyclic_unions.is_empty());
        assert_eq!(d.stars, vec![Star { center: 1, border: vec![0] }, Star { center: 2, border: vec![1, 3] }]);
    }

    #[test]
    fn bowtie_is_one_union() {
        let g = graph(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (2, 4), (3, 4), (4, 5)]);
        let d = decompose(&g);
        assert_eq!(d.cyclic_unions.len(), 1);
        assert_eq!(d.cyclic_unions[0].members, vec![0, 1, 2, 3, 4]);
        assert_eq!(d.cyclic_unions[0].frontier, vec![4]);
        assert_eq!(d.stars, vec![Star { center: 4, border: vec![5] }]);
    }
}
