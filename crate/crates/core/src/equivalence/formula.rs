use std::collections::VecDeque;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::kernel::{Lts, Transition, TAU};

/// Hennessy-Milner formulas with weak and strong diamonds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    Not(Box<Formula>),
    And(Vec<Formula>),
    /// `<<a>>f`: some τ*·a·τ* path reaches a state satisfying `f`;
    /// `<<tau>>f` means τ*, possibly empty.
    Weak(String, Box<Formula>),
    /// `<a>f`: some single `a` step reaches a state satisfying `f`.
    Strong(String, Box<Formula>),
}

impl Formula {
    pub fn negate(f: Formula) -> Formula {
        match f {
            Formula::Not(g) => *g,
            g => Formula::Not(Box::new(g)),
        }
    }

    pub fn and(mut fs: Vec<Formula>) -> Formula {
        fs.dedup();
        match fs.len() {
            0 => Formula::True,
            1 => fs.pop().unwrap(),
            _ => Formula::And(fs),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True => 0,
            Formula::Not(f) => f.depth(),
            Formula::And(fs) => fs.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::Weak(_, f) | Formula::Strong(_, f) => 1 + f.depth(),
        }
    }

    /// Truth value at every state. Semi-synchronous transitions count as
    /// steps to their success continuation.
    pub fn evaluate(&self, lts: &Lts) -> Vec<bool> {
        let closure = tau_closures(lts);
        self.eval(lts, &closure)
    }

    pub fn holds(&self, lts: &Lts, state: u32) -> bool {
        self.evaluate(lts)[state as usize]
    }

    fn eval(&self, lts: &Lts, closure: &[Vec<u32>]) -> Vec<bool> {
        let n = lts.num_states();
        match self {
            Formula::True => vec![true; n],
            Formula::Not(f) => f.eval(lts, closure).into_iter().map(|b| !b).collect(),
            Formula::And(fs) => {
                let mut acc = vec![true; n];
                for f in fs {
                    for (a, b) in acc.iter_mut().zip(f.eval(lts, closure)) {
                        *a &= b;
                    }
                }
                acc
            }
            Formula::Strong(a, f) => {
                let sat = f.eval(lts, closure);
                (0..n as u32).map(|s| steps(lts, s, a).any(|t| sat[t as usize])).collect()
            }
            Formula::Weak(a, f) => {
                let sat = f.eval(lts, closure);
                (0..n)
                    .map(|s| {
                        closure[s].iter().any(|&u| {
                            if a == "tau" {
                                sat[u as usize]
                            } else {
                                steps(lts, u, a).any(|v| closure[v as usize].iter().any(|&w| sat[w as usize]))
                            }
                        })
                    })
                    .collect()
            }
        }
    }
}

fn steps<'a>(lts: &'a Lts, s: u32, label: &'a str) -> impl Iterator<Item = u32> + 'a {
    lts.transitions(s).iter().filter(move |t| lts.label_name(t.label()) == label).map(Transition::target)
}

/// States reachable through τ steps only, including the state itself.
fn tau_closures(lts: &Lts) -> Vec<Vec<u32>> {
    lts.states()
        .map(|s| {
            let mut seen = vec![false; lts.num_states()];
            let mut out = vec![s];
            seen[s as usize] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for t in lts.transitions(u) {
                    let target = t.target();
                    if t.label() == TAU && !seen[target as usize] {
                        seen[target as usize] = true;
                        out.push(target);
                        queue.push_back(target);
                    }
                }
            }
            out
        })
        .collect()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "tt"),
            Formula::Not(g) => write!(f, "!{}", Paren(g)),
            Formula::And(gs) => {
                for (i, g) in gs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " & ")?;
                    }
                    write!(f, "{}", Paren(g))?;
                }
                Ok(())
            }
            Formula::Weak(a, g) => write!(f, "<<{a}>>{}", Paren(g)),
            Formula::Strong(a, g) => write!(f, "<{a}>{}", Paren(g)),
        }
    }
}

/// Parenthesizes conjunctions when nested.
struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::And(_) => write!(f, "({})", self.0),
            g => write!(f, "{g}"),
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_diamond_skips_tau() {
        let mut l = Lts::with_states(3);
        l.add(0, "tau", 1);
        l.add(1, "a", 2);
        let f = Formula::Weak("a".into(), Box::new(Formula::True));
        assert_eq!(f.evaluate(&l), vec![true, true, false]);
        let g = Formula::Strong("a".into(), Box::new(Formula::True));
        assert_eq!(g.evaluate(&l), vec![false, true, false]);
        let h = Formula::Weak("tau".into(), Box::new(Formula::negate(f.clone())));
        assert_eq!(h.evaluate(&l), vec![false, false, true]);
    }

    #[test]
    fn display() {
        let f = Formula::Weak(
            "a".into(),
            Box::new(Formula::and(vec![Formula::True, Formula::negate(Formula::Weak("b".into(), Box::new(Formula::True)))])),
        );
        assert_eq!(f.to_string(), "<<a>>(tt & !<<b>>tt)");
    }
}
