//! Aldebaran (`.aut`) text format.
//!
//! A semi-synchronous transition is written as two lines, one for its action
//! towards the success continuation and one for its exception towards the
//! failure continuation. Reading such a file back yields two ordinary
//! transitions, so the dual nature is not preserved.

use std::fmt::Write;

use thiserror::Error;

use super::{Lts, StateId, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("header declares {declared} transitions but {found} were found")]
    TransitionCount { declared: usize, found: usize },
}

pub fn write_aut(lts: &Lts) -> String {
    let mut body = String::new();
    let mut count = 0usize;
    for s in lts.states() {
        for t in lts.transitions(s) {
            match *t {
                Transition::Normal { label, target } => {
                    let _ = writeln!(body, "({s}, \"{}\", {target})", lts.label_name(label));
                    count += 1;
                }
                Transition::SemiSync { label, ok, exc, exception } => {
                    let _ = writeln!(body, "({s}, \"{}\", {ok})", lts.label_name(label));
                    let _ = writeln!(body, "({s}, \"{}\", {exc})", lts.label_name(exception));
                    count += 2;
                }
            }
        }
    }
    format!("des ({}, {count}, {})\n{body}", lts.initial(), lts.num_states())
}

/// Graphviz rendering; exception branches are dashed and full-queue states
/// drawn as boxes.
pub fn write_dot(lts: &Lts) -> String {
    let mut out = String::from("digraph lts {\n  node [shape=circle];\n");
    let _ = writeln!(out, "  start [shape=point];\n  start -> {};", lts.initial());
    for s in lts.states().filter(|&s| lts.is_marked(s)) {
        let _ = writeln!(out, "  {s} [shape=box];");
    }
    for s in lts.states() {
        for t in lts.transitions(s) {
            match *t {
                Transition::Normal { label, target } => {
                    let _ = writeln!(out, "  {s} -> {target} [label=\"{}\"];", lts.label_name(label));
                }
                Transition::SemiSync { label, ok, exc, exception } => {
                    let _ = writeln!(out, "  {s} -> {ok} [label=\"{}\"];", lts.label_name(label));
                    let _ = writeln!(out, "  {s} -> {exc} [label=\"{}\", style=dashed];", lts.label_name(exception));
                }
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Reads an Aldebaran file. Both `tau` and `i` denote the invisible action.
pub fn parse_aut(src: &str) -> Result<Lts, AutError> {
    let mut lines = src.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(AutError::Syntax { line: 1, message: "missing header".into() })?;
    let err = |line: usize, message: &str| AutError::Syntax { line: line + 1, message: message.to_string() };

    let h = header.trim();
    let inner = h
        .strip_prefix("des")
        .map(str::trim)
        .and_then(|r| r.strip_prefix('('))
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| err(hline, "expected `des (initial, transitions, states)`"))?;
    let nums: Vec<&str> = inner.split(',').map(str::trim).collect();
    if nums.len() != 3 {
        return Err(err(hline, "header needs three numbers"));
    }
    let parse_num = |s: &str| s.parse::<usize>().map_err(|_| err(hline, "invalid number in header"));
    let (init, ntrans, nstates) = (parse_num(nums[0])?, parse_num(nums[1])?, parse_num(nums[2])?);
    if nstates == 0 || init >= nstates {
        return Err(err(hline, "initial state out of range"));
    }

    let mut lts = Lts::with_states(nstates);
    lts.set_initial(init as StateId);
    let mut found = 0;
    for (ln, line) in lines {
        let l = line.trim();
        let inner = l
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| err(ln, "expected `(from, \"label\", to)`"))?;
        let first = inner.find(',').ok_or_else(|| err(ln, "missing label"))?;
        let last = inner.rfind(',').ok_or_else(|| err(ln, "missing target"))?;
        if first == last {
            return Err(err(ln, "expected three fields"));
        }
        let from: usize = inner[..first].trim().parse().map_err(|_| err(ln, "invalid source state"))?;
        let to: usize = inner[last + 1..].trim().parse().map_err(|_| err(ln, "invalid target state"))?;
        let raw = inner[first + 1..last].trim();
        let label = match raw.strip_prefix('"').and_then(|r| r.strip_suffix('"')) {
            Some(q) if !q.contains('"') => q,
            Some(_) => return Err(err(ln, "quotes inside labels are not supported")),
            None if !raw.is_empty() && !raw.contains('"') => raw,
            None => return Err(err(ln, "malformed label")),
        };
        if from >= nstates || to >= nstates {
            return Err(err(ln, "state out of range"));
        }
        let label = if label == "i" { "tau" } else { label };
        lts.add(from as StateId, label, to as StateId);
        found += 1;
    }
    if found != ntrans {
        return Err(AutError::TransitionCount { declared: ntrans, found });
    }
    Ok(lts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::TAU;

    #[test]
    fn round_trip_small() {
        let mut l = Lts::with_states(3);
        l.add(0, "a", 1);
        l.add(1, "tau", 2);
        l.add(2, "A.o#B.i", 0);
        let text = write_aut(&l);
        assert_eq!(text, "des (0, 3, 3)\n(0, \"a\", 1)\n(1, \"tau\", 2)\n(2, \"A.o#B.i\", 0)\n");
        let back = parse_aut(&text).unwrap();
        assert_eq!(write_aut(&back), text);
    }

    #[test]
    fn accepts_i_and_unquoted_labels() {
        let l = parse_aut("des (0, 2, 2)\n(0, i, 1)\n(1, a, 0)\n").unwrap();
        assert_eq!(l.transitions(0)[0].label(), TAU);
        assert_eq!(l.label_name(l.transitions(1)[0].label()), "a");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_aut("").is_err());
        assert!(parse_aut("des (0, 1, 1)\n(0, \"a\", 3)\n").is_err());
        assert!(matches!(parse_aut("des (0, 2, 1)\n(0, \"a\", 0)\n"), Err(AutError::TransitionCount { .. })));
    }
}
