use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::elaboration::{Closure, Elaboration};
use crate::equivalence::weak_bisim_upto_relabeling;
use crate::kernel::{DeadlockNotion, Lts, EXCEPTION_SUFFIX};

use super::reduce::{verify_deadlock_by_reduction, Conclusion};
use super::TopologyError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConformityReport {
    pub conformant: bool,
    /// Holds for the renamed refined architecture and fails for the original.
    pub formula: Option<String>,
    pub refined_states: usize,
    pub original_states: usize,
    /// Verdict of the original carried over to the refined architecture.
    pub inherited: Option<Conclusion>,
}

/// The whole architecture with all queues, partially closed, exceptions
/// kept observable.
pub fn system_semantics(elab: &Elaboration) -> Result<Lts, TopologyError> {
    let all = elab.all_aeis();
    let members: Vec<usize> = all.iter().copied().collect();
    Ok(elab.composite_semantics(&members, &all, Closure::Partial, &all, &BTreeSet::new())?.lts)
}

fn rename_part(part: &str, rename: &BTreeMap<String, String>) -> String {
    if let Some(r) = rename.get(part) {
        return r.clone();
    }
    if let Some(stem) = part.strip_suffix(EXCEPTION_SUFFIX) {
        if rename.contains_key(stem) {
            return format!("{}{EXCEPTION_SUFFIX}", rename[stem]);
        }
    }
    match part.split_once('.') {
        Some((inst, rest)) if rename.contains_key(inst) => format!("{}.{rest}", rename[inst]),
        _ => part.to_string(),
    }
}

/// Extends a map over instance names and dotted endpoints to every label
/// of `labels`, renaming each `#` component separately.
pub fn label_map(labels: &BTreeSet<String>, rename: &BTreeMap<String, String>) -> BTreeMap<String, String> {
    labels
        .iter()
        .filter_map(|l| {
            let image: Vec<String> = l.split('#').map(|p| rename_part(p, rename)).collect();
            let image = image.join("#");
            (image != *l).then(|| (l.clone(), image))
        })
        .collect()
}

/// Whether `refined`, renamed through `rename`, is weakly bisimilar to
/// `original`. When it is and the reduction settles the original, its
/// verdict is reported as inherited.
pub fn check_behavioral_conformity(
    refined: &Elaboration,
    original: &Elaboration,
    rename: &BTreeMap<String, String>,
    notion: DeadlockNotion,
) -> Result<ConformityReport, TopologyError> {
    let a2 = system_semantics(refined)?;
    let a = system_semantics(original)?;
    let map = label_map(&a2.alphabet(), rename);
    let verdict = weak_bisim_upto_relabeling(&a2, &a, &map)?;
    let inherited = if verdict.is_equivalent() {
        match verify_deadlock_by_reduction(original, notion)?.conclusion {
            c @ (Conclusion::DeadlockFree { .. } | Conclusion::DeadlockFound { .. }) => Some(c),
            _ => None,
        }
    } else {
        None
    };
    Ok(ConformityReport {
        conformant: verdict.is_equivalent(),
        formula: verdict.formula().map(ToString::to_string),
        refined_states: a2.num_states(),
        original_states: a.num_states(),
        inherited,
    })
}
