//! Random transition systems and a naive bisimilarity oracle shared by the
//! property suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use padl_core::equivalence::Formula;
use padl_core::kernel::Lts;
use rand::seq::SliceRandom;
use rand::Rng;

pub mod props;

pub const VISIBLE: [&str; 3] = ["a", "b", "c"];

/// At most `max_states` states, labels among τ and three visible ones.
pub fn random_lts<R: Rng>(rng: &mut R, max_states: usize) -> Lts {
    let n = rng.gen_range(1..=max_states);
    let mut l = Lts::with_states(n);
    for s in 0..n as u32 {
        for _ in 0..rng.gen_range(0..=3) {
            let label = if rng.gen_bool(0.3) { "tau" } else { VISIBLE[rng.gen_range(0..3)] };
            l.add(s, label, rng.gen_range(0..n as u32));
        }
    }
    l
}

pub fn edges(l: &Lts) -> Vec<(u32, String, u32)> {
    l.states()
        .flat_map(|s| l.transitions(s).iter().map(move |t| (s, l.label_name(t.label()).to_string(), t.target())))
        .collect()
}

pub fn from_edges(n: usize, initial: u32, es: &[(u32, String, u32)]) -> Lts {
    let mut l = Lts::with_states(n);
    l.set_initial(initial);
    for (s, a, t) in es {
        l.add(*s, a, *t);
    }
    l
}

/// Splits a random transition with a fresh intermediate τ step.
pub fn insert_tau<R: Rng>(rng: &mut R, l: &Lts) -> Lts {
    let mut es = edges(l);
    if es.is_empty() {
        return l.clone();
    }
    let n = l.num_states();
    let i = rng.gen_range(0..es.len());
    let (s, a, t) = es[i].clone();
    es[i] = (s, a, n as u32);
    es.push((n as u32, "tau".into(), t));
    from_edges(n + 1, l.initial(), &es)
}

/// Copies a random state and redirects some of its incoming transitions
/// to the copy.
pub fn unfold<R: Rng>(rng: &mut R, l: &Lts) -> Lts {
    let n = l.num_states();
    let v = rng.gen_range(0..n as u32);
    let copy = n as u32;
    let mut es = edges(l);
    let outgoing: Vec<_> = es.iter().filter(|e| e.0 == v).map(|e| (copy, e.1.clone(), e.2)).collect();
    for e in es.iter_mut() {
        if e.2 == v && rng.gen_bool(0.5) {
            e.2 = copy;
        }
    }
    es.extend(outgoing);
    let initial = if l.initial() == v && rng.gen_bool(0.5) { copy } else { l.initial() };
    from_edges(n + 1, initial, &es)
}

/// A weakly bisimilar variant built from random τ insertions and unfoldings.
pub fn perturb<R: Rng>(rng: &mut R, l: &Lts) -> Lts {
    let mut out = l.clone();
    for _ in 0..rng.gen_range(1..=3) {
        out = if rng.gen_bool(0.5) { insert_tau(rng, &out) } else { unfold(rng, &out) };
    }
    out
}

/// `prefix.mid.P` where `mid` is τ or nothing.
pub fn prefixed(p: &Lts, prefix: &str, tau: bool) -> Lts {
    let n = p.num_states() as u32;
    let mut es: Vec<_> = edges(p);
    let start = n;
    if tau {
        let mid = n + 1;
        es.push((start, prefix.into(), mid));
        es.push((mid, "tau".into(), p.initial()));
        from_edges(n as usize + 2, start, &es)
    } else {
        es.push((start, prefix.into(), p.initial()));
        from_edges(n as usize + 1, start, &es)
    }
}

/// States reachable by τ steps, including the state itself.
fn tau_reach(es: &[(u32, String, u32)], n: usize) -> Vec<BTreeSet<u32>> {
    (0..n as u32)
        .map(|s| {
            let mut seen = BTreeSet::from([s]);
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for (x, a, y) in es {
                    if *x == u && a == "tau" && seen.insert(*y) {
                        stack.push(*y);
                    }
                }
            }
            seen
        })
        .collect()
}

/// Greatest fixed point over all state pairs of the disjoint union. A step
/// `p -a-> p'` must be answered by `q =a=> q'` (τ*·a·τ*, or τ* for τ) in
/// weak mode and by `q -a-> q'` in strong mode.
pub fn oracle_bisimilar(l: &Lts, r: &Lts, weak: bool) -> bool {
    let off = l.num_states() as u32;
    let n = l.num_states() + r.num_states();
    let mut es = edges(l);
    es.extend(edges(r).into_iter().map(|(s, a, t)| (s + off, a, t + off)));
    let single: Vec<Vec<(String, u32)>> =
        (0..n as u32).map(|s| es.iter().filter(|e| e.0 == s).map(|e| (e.1.clone(), e.2)).collect()).collect();
    let answers: Vec<BTreeMap<String, BTreeSet<u32>>> = if weak {
        let reach = tau_reach(&es, n);
        (0..n)
            .map(|s| {
                let mut m: BTreeMap<String, BTreeSet<u32>> = BTreeMap::new();
                m.entry("tau".into()).or_default().extend(reach[s].iter().copied());
                for &u in &reach[s] {
                    for (a, v) in &single[u as usize] {
                        if a != "tau" {
                            m.entry(a.clone()).or_default().extend(reach[*v as usize].iter().copied());
                        }
                    }
                }
                m
            })
            .collect()
    } else {
        (0..n)
            .map(|s| {
                let mut m: BTreeMap<String, BTreeSet<u32>> = BTreeMap::new();
                for (a, v) in &single[s] {
                    m.entry(a.clone()).or_default().insert(*v);
                }
                m
            })
            .collect()
    };
    let mut rel = vec![vec![true; n]; n];
    let empty = BTreeSet::new();
    loop {
        let mut changed = false;
        for p in 0..n {
            for q in 0..n {
                if !rel[p][q] {
                    continue;
                }
                let simulates = |x: usize, y: usize, rel: &Vec<Vec<bool>>, flip: bool| {
                    single[x].iter().all(|(a, x2)| {
                        answers[y].get(a).unwrap_or(&empty).iter().any(|&y2| {
                            if flip { rel[y2 as usize][*x2 as usize] } else { rel[*x2 as usize][y2 as usize] }
                        })
                    })
                };
                if !simulates(p, q, &rel, false) || !simulates(q, p, &rel, true) {
                    rel[p][q] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    rel[l.initial() as usize][(r.initial() + off) as usize]
}

/// A random injective renaming of the visible labels onto fresh names.
pub fn random_renaming<R: Rng>(rng: &mut R) -> BTreeMap<String, String> {
    let mut targets = vec!["x", "y", "z"];
    targets.shuffle(rng);
    VISIBLE.iter().zip(targets).map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

pub fn random_subset<R: Rng>(rng: &mut R) -> BTreeSet<String> {
    VISIBLE.iter().filter(|_| rng.gen_bool(0.5)).map(|s| s.to_string()).collect()
}

/// Truth of `f` at `s`, computed directly from the transitions.
pub fn oracle_holds(f: &Formula, l: &Lts, s: u32) -> bool {
    let es = edges(l);
    let reach = tau_reach(&es, l.num_states());
    eval(f, &es, &reach, s)
}

fn eval(f: &Formula, es: &[(u32, String, u32)], reach: &[BTreeSet<u32>], s: u32) -> bool {
    match f {
        Formula::True => true,
        Formula::Not(g) => !eval(g, es, reach, s),
        Formula::And(gs) => gs.iter().all(|g| eval(g, es, reach, s)),
        Formula::Strong(a, g) => es.iter().any(|(x, b, y)| *x == s && b == a && eval(g, es, reach, *y)),
        Formula::Weak(a, g) => {
            let after: BTreeSet<u32> = if a == "tau" {
                reach[s as usize].clone()
            } else {
                reach[s as usize]
                    .iter()
                    .flat_map(|&u| es.iter().filter(move |(x, b, _)| *x == u && b == a))
                    .flat_map(|(_, _, y)| reach[*y as usize].iter().copied())
                    .collect()
            };
            after.into_iter().any(|t| eval(g, es, reach, t))
        }
    }
}
