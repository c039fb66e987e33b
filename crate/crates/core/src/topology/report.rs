use std::fmt::Write;

use serde::Serialize;

use crate::kernel::DeadlockNotion;

use super::reduce::{CheckRecord, Conclusion, DirectReport, DirectVerdict, ReductionReport, Status};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    DeadlockFree,
    Deadlock,
    ConditionsFailed,
    Inconclusive,
}

impl Verdict {
    /// 0 deadlock free, 1 deadlock or failed check, 3 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::DeadlockFree => 0,
            Verdict::Deadlock | Verdict::ConditionsFailed => 1,
            Verdict::Inconclusive => 3,
        }
    }
}

/// Result of a deadlock check on one architecture.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub architecture: String,
    pub queue_capacity: u32,
    pub state_limit: usize,
    pub deadlock: DeadlockNotion,
    pub reduction: Option<ReductionReport>,
    pub direct: Option<DirectReport>,
    /// Present when both methods reached a verdict.
    pub agreement: Option<bool>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(
        architecture: String,
        queue_capacity: u32,
        state_limit: usize,
        deadlock: DeadlockNotion,
        reduction: Option<ReductionReport>,
        direct: Option<DirectReport>,
    ) -> Self {
        let from_reduction = reduction.as_ref().map(|r| match r.conclusion {
            Conclusion::DeadlockFree { .. } => Verdict::DeadlockFree,
            Conclusion::DeadlockFound { .. } => Verdict::Deadlock,
            Conclusion::ConditionsFailed { .. } => Verdict::ConditionsFailed,
            Conclusion::Inconclusive { .. } => Verdict::Inconclusive,
        });
        let from_direct = direct.as_ref().map(|d| match d.verdict {
            DirectVerdict::DeadlockFree => Verdict::DeadlockFree,
            DirectVerdict::Deadlock { .. } => Verdict::Deadlock,
            DirectVerdict::Inconclusive { .. } => Verdict::Inconclusive,
        });
        let conclusive = |v: &Option<Verdict>| matches!(v, Some(Verdict::DeadlockFree | Verdict::Deadlock));
        let agreement = (conclusive(&from_reduction) && conclusive(&from_direct)).then(|| from_reduction == from_direct);
        let all: Vec<Verdict> = from_reduction.into_iter().chain(from_direct).collect();
        let verdict = [Verdict::Deadlock, Verdict::ConditionsFailed, Verdict::Inconclusive]
            .into_iter()
            .find(|v| all.contains(v))
            .unwrap_or(Verdict::DeadlockFree);
        Report {
            schema_version: SCHEMA_VERSION,
            architecture,
            queue_capacity,
            state_limit,
            deadlock,
            reduction,
            direct,
            agreement,
            verdict,
        }
    }

    pub fn strip_timings(&mut self) {
        if let Some(r) = &mut self.reduction {
            r.strip_timings();
        }
        if let Some(d) = &mut self.direct {
            d.millis = None;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "architecture {}", self.architecture);
        let _ = writeln!(
            out,
            "queue capacity {}, state limit {}, {} deadlocks",
            self.queue_capacity,
            self.state_limit,
            match self.deadlock {
                DeadlockNotion::Weak => "weak",
                DeadlockNotion::Strict => "strict",
            }
        );
        if let Some(r) = &self.reduction {
            out.push_str("\nreduction\n");
            let d = &r.decomposition;
            for u in &d.cyclic_unions {
                let _ = writeln!(out, "  cyclic union {{{}}} frontier {{{}}}", u.members.join(", "), u.frontier.join(", "));
            }
            for s in &d.stars {
                let _ = writeln!(out, "  star {} border {{{}}}", s.center, s.border.join(", "));
            }
            for l in &r.local {
                let state = match l.deadlock_free {
                    Some(true) => "deadlock free".to_string(),
                    Some(false) => format!("deadlocks after [{}]", l.trace.clone().unwrap_or_default().join(" ")),
                    None => "unknown".to_string(),
                };
                let _ = writeln!(out, "  {} alone: {state}", l.aei);
            }
            for c in &r.checks {
                out.push_str(&check_line(c));
            }
            for c in &r.conditions {
                let _ = writeln!(out, "  condition {} on {{{}}}: {}", c.id, c.scope.join(", "), status(c.status));
            }
            let conclusion = match &r.conclusion {
                Conclusion::DeadlockFree { witnesses } => {
                    format!("deadlock free, witnessed by {} alone", witnesses.join(", "))
                }
                Conclusion::DeadlockFound { aei, trace } => {
                    format!("deadlock, as no instance is deadlock free alone ({aei} after [{}])", trace.join(" "))
                }
                Conclusion::ConditionsFailed { failed } => format!("no verdict, failed: {}", failed.join("; ")),
                Conclusion::Inconclusive { reason } => format!("inconclusive: {reason}"),
            };
            let _ = writeln!(out, "  conclusion: {conclusion}");
        }
        if let Some(d) = &self.direct {
            out.push_str("\ndirect\n");
            if let (Some(s), Some(t)) = (d.states, d.transitions) {
                let _ = writeln!(out, "  {s} states, {t} transitions");
            }
            let v = match &d.verdict {
                DirectVerdict::DeadlockFree => "deadlock free".to_string(),
                DirectVerdict::Deadlock { trace, queue_full } => format!(
                    "deadlock after [{}]{}",
                    trace.join(" "),
                    if *queue_full { " with a full queue" } else { "" }
                ),
                DirectVerdict::Inconclusive { reason } => format!("inconclusive: {reason}"),
            };
            let _ = writeln!(out, "  verdict: {v}");
            if let Some(ms) = d.millis {
                let _ = writeln!(out, "  {ms} ms");
            }
        }
        if let Some(a) = self.agreement {
            let _ = writeln!(out, "\nreduction and direct {}", if a { "agree" } else { "DISAGREE" });
        }
        let _ = writeln!(
            out,
            "\nverdict: {}",
            match self.verdict {
                Verdict::DeadlockFree => "deadlock free",
                Verdict::Deadlock => "deadlock",
                Verdict::ConditionsFailed => "conditions failed",
                Verdict::Inconclusive => "inconclusive",
            }
        );
        out
    }
}

fn status(s: Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Fails => "fails",
        Status::Inconclusive => "inconclusive",
        Status::Vacuous => "vacuous",
    }
}

fn check_line(c: &CheckRecord) -> String {
    let kind = match c.kind {
        super::CheckKind::Compatibility => "compatible with",
        super::CheckKind::Interoperability => "interoperates with",
    };
    let mut line = format!("  [{}] {} {kind} {{{}}}: {}", c.condition, c.subject, c.against.join(", "), status(c.status));
    if let (Some(l), Some(r)) = (c.lhs_states, c.rhs_states) {
        let _ = write!(line, " ({l} vs {r} states");
        if let Some(ms) = c.millis {
            let _ = write!(line, ", {ms} ms");
        }
        line.push(')');
    }
    if let Some(n) = &c.note {
        let _ = write!(line, " {n}");
    }
    line.push('\n');
    if let Some(f) = &c.formula {
        let _ = writeln!(line, "      distinguishing formula: {f}");
    }
    line
}
