//! Replacement of or-interactions by indexed uni-interactions.

use std::collections::{BTreeMap, BTreeSet};

use crate::frontend::ast::{Branch, Equation, Expr, Process};

use super::ElabError;

/// What to rewrite in one element type.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrPlan {
    /// Number of attachments of each or-interaction. Entries below 2 are ignored.
    pub copies: BTreeMap<String, usize>,
    /// Dependent output or-interaction to the input it depends on.
    pub deps: BTreeMap<String, String>,
}

impl OrPlan {
    fn count(&self, action: &str) -> usize {
        self.copies.get(action).copied().unwrap_or(0)
    }

    fn rewritten(&self, action: &str) -> bool {
        self.count(action) >= 2
    }
}

/// Name of the `j`-th fresh copy of `action`, counting from 1.
pub fn copy_name(action: &str, j: usize) -> String {
    format!("{action}_{j}")
}

/// Rewrites every equation body. The set of fresh inputs in force is
/// tracked along each body and is empty when an equation is entered.
pub fn or_rewrite(equations: &[Equation], plan: &OrPlan) -> Result<Vec<Equation>, ElabError> {
    let mut actions = BTreeSet::new();
    for eq in equations {
        eq.body.visit_actions(&mut |a| {
            actions.insert(a.to_string());
        });
    }
    for (a, &l) in &plan.copies {
        if l < 2 {
            continue;
        }
        for j in 1..=l {
            let fresh = copy_name(a, j);
            if actions.contains(&fresh) {
                return Err(ElabError::NameClash(fresh));
            }
        }
    }
    for (o, i) in &plan.deps {
        if plan.rewritten(o) && plan.count(o) != plan.count(i) {
            return Err(ElabError::DependencyCount { output: o.clone(), input: i.clone() });
        }
    }
    let tracked: BTreeSet<&str> =
        plan.deps.iter().filter(|(o, _)| plan.rewritten(o)).map(|(_, i)| i.as_str()).collect();
    let rw = Rewriter { plan, tracked };
    equations
        .iter()
        .map(|eq| {
            let body = rw.process(&eq.body, &BTreeMap::new(), &BTreeMap::new(), &eq.name)?;
            Ok(Equation { body, ..eq.clone() })
        })
        .collect()
}

struct Rewriter<'a> {
    plan: &'a OrPlan,
    /// Inputs some rewritten output depends on.
    tracked: BTreeSet<&'a str>,
}

type Fi = BTreeMap<String, usize>;
type Renaming = BTreeMap<String, String>;

impl Rewriter<'_> {
    fn process(&self, p: &Process, fi: &Fi, succ: &Renaming, eq: &str) -> Result<Process, ElabError> {
        Ok(match p {
            Process::Stop => Process::Stop,
            Process::Invoke { equation, args, span } => Process::Invoke {
                equation: equation.clone(),
                args: args.iter().map(|a| rename_success(a, succ)).collect(),
                span: *span,
            },
            Process::Choice(branches) => Process::Choice(
                branches
                    .iter()
                    .map(|b| {
                        Ok(Branch {
                            guard: b.guard.as_ref().map(|g| rename_success(g, succ)),
                            body: self.process(&b.body, fi, succ, eq)?,
                        })
                    })
                    .collect::<Result<_, ElabError>>()?,
            ),
            Process::Prefix { action, then, span } => {
                if let Some(input) = self.plan.deps.get(action).filter(|_| self.plan.rewritten(action)) {
                    let j = *fi.get(input).ok_or_else(|| ElabError::UnresolvedDependency {
                        equation: eq.to_string(),
                        output: action.clone(),
                    })?;
                    let fresh = copy_name(action, j);
                    let succ = with(succ, action, &fresh);
                    return Ok(Process::Prefix {
                        action: fresh,
                        then: Box::new(self.process(then, fi, &succ, eq)?),
                        span: *span,
                    });
                }
                if self.plan.rewritten(action) {
                    let mut branches = Vec::new();
                    for j in 1..=self.plan.count(action) {
                        let fresh = copy_name(action, j);
                        let mut fi = fi.clone();
                        if self.tracked.contains(action.as_str()) {
                            fi.insert(action.clone(), j);
                        }
                        let succ = with(succ, action, &fresh);
                        branches.push(Branch {
                            guard: None,
                            body: Process::Prefix {
                                action: fresh,
                                then: Box::new(self.process(then, &fi, &succ, eq)?),
                                span: *span,
                            },
                        });
                    }
                    return Ok(Process::Choice(branches));
                }
                let mut succ = succ.clone();
                succ.remove(action);
                Process::Prefix { action: action.clone(), then: Box::new(self.process(then, fi, &succ, eq)?), span: *span }
            }
        })
    }
}

fn with(map: &Renaming, from: &str, to: &str) -> Renaming {
    let mut m = map.clone();
    m.insert(from.to_string(), to.to_string());
    m
}

fn rename_success(e: &Expr, succ: &Renaming) -> Expr {
    match e {
        Expr::Success(x) => Expr::Success(succ.get(x).cloned().unwrap_or_else(|| x.clone())),
        Expr::Unary(op, a) => Expr::Unary(*op, Box::new(rename_success(a, succ))),
        Expr::Binary(op, l, r) => Expr::binary(*op, rename_success(l, succ), rename_success(r, succ)),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_equations;

    fn plan(copies: &[(&str, usize)], deps: &[(&str, &str)]) -> OrPlan {
        OrPlan {
            copies: copies.iter().map(|(a, n)| (a.to_string(), *n)).collect(),
            deps: deps.iter().map(|(o, i)| (o.to_string(), i.to_string())).collect(),
        }
    }

    #[test]
    fn single_attachment_is_untouched() {
        let eqs = parse_equations("S(void; void) = a . b . S()").unwrap();
        let out = or_rewrite(&eqs, &plan(&[("a", 1)], &[])).unwrap();
        assert_eq!(out, eqs);
    }

    #[test]
    fn independent_three_way() {
        let eqs = parse_equations("S(void; void) = a . b . S()").unwrap();
        let out = or_rewrite(&eqs, &plan(&[("a", 3)], &[])).unwrap();
        let want = parse_equations("S(void; void) = choice { a_1 . b . S(), a_2 . b . S(), a_3 . b . S() }").unwrap();
        assert_eq!(out, want);
    }

    #[test]
    fn output_without_recorded_input_fails() {
        let eqs = parse_equations("S(void; void) = o . i . S()").unwrap();
        let err = or_rewrite(&eqs, &plan(&[("i", 2), ("o", 2)], &[("o", "i")])).unwrap_err();
        assert!(matches!(err, ElabError::UnresolvedDependency { .. }));
    }

    #[test]
    fn success_follows_the_copy() {
        let eqs = parse_equations("S(void; void) = a . choice { cond(a.success) -> b . S(), cond(not a.success) -> S() }")
            .unwrap();
        let out = or_rewrite(&eqs, &plan(&[("a", 2)], &[])).unwrap();
        let mut reads = Vec::new();
        out[0].body.visit_exprs(&mut |e| e.visit_success(&mut |x| reads.push(x.to_string())));
        assert_eq!(reads, vec!["a_1", "a_1", "a_2", "a_2"]);
    }
}
