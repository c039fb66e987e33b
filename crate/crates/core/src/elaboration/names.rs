use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::frontend::ast::Direction;

use super::model::{Elaboration, Party};

/// Bookkeeping for one instance with respect to a context of instances.
/// All names are dotted; images of the relabelings are fresh `#` names.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct NameSets {
    pub aei: String,
    pub context: Vec<String>,
    /// Local interactions: non-asynchronous ones plus the external
    /// endpoints of the instance's queues.
    pub local: BTreeSet<String>,
    /// The subset of `local` attached to the context.
    pub attached: BTreeSet<String>,
    /// Originally asynchronous interactions, the queue endpoints attached to
    /// them and the exceptions of inputs converted to semi-synchronous.
    pub originally_async: BTreeSet<String>,
    pub phi_async: BTreeMap<String, String>,
    pub phi_context: BTreeMap<String, String>,
    /// Labels left observable by the partially closed semantics.
    pub visible: BTreeSet<String>,
    /// Fresh names through which the instance synchronizes with the context.
    pub sync: BTreeSet<String>,
}

impl Elaboration {
    /// Name sets of `aei` with respect to `context` (instance indices).
    pub fn name_sets(&self, aei: usize, context: &BTreeSet<usize>) -> NameSets {
        let me = Party::Aei(aei);
        let model = &self.aeis[aei];
        let mut ns = NameSets {
            aei: model.name.clone(),
            context: context.iter().map(|&c| self.aeis[c].name.clone()).collect(),
            ..NameSets::default()
        };

        // Endpoints on this instance's side, tagged with whether they are
        // internal to the instance and its queues.
        let mut endpoints: Vec<(Party, String, bool)> = Vec::new();
        for li in &model.interactions {
            if li.originally_async {
                ns.originally_async.insert(self.qualified(me, &li.name));
            } else {
                ns.local.insert(self.qualified(me, &li.name));
                endpoints.push((me, li.name.clone(), false));
            }
        }
        for (qi, q) in self.queues.iter().enumerate().filter(|(_, q)| q.owner == aei) {
            let p = Party::Queue(qi);
            let (inner, outer) = match q.direction {
                Direction::Output => ("arrive", "depart"),
                Direction::Input => ("depart", "arrive"),
            };
            ns.originally_async.insert(self.qualified(p, inner));
            ns.local.insert(self.qualified(p, outer));
            endpoints.push((p, outer.to_string(), false));
            if q.direction == Direction::Input {
                ns.originally_async.insert(self.exception_of(me, &q.interaction));
            }
        }
        for li in model.interactions.iter().filter(|i| i.originally_async) {
            endpoints.push((me, li.name.clone(), true));
        }
        for (qi, q) in self.queues.iter().enumerate().filter(|(_, q)| q.owner == aei) {
            let inner = if q.direction == Direction::Output { "arrive" } else { "depart" };
            endpoints.push((Party::Queue(qi), inner.to_string(), true));
        }

        for (p, a, internal) in endpoints {
            let Some(g) = self.group_of(p, &a) else { continue };
            let raw = self.qualified(p, &a);
            if internal {
                if self.is_internal(g) {
                    ns.phi_async.insert(raw, g.name.clone());
                }
                continue;
            }
            if self.is_internal(g) {
                continue;
            }
            if self.group_owners(g).iter().any(|&o| o != aei && context.contains(&o)) {
                ns.attached.insert(raw.clone());
                ns.phi_context.insert(raw, g.name.clone());
            }
        }
        ns.sync = ns.phi_context.values().cloned().collect();
        ns.visible = ns.sync.clone();
        for x in &ns.originally_async {
            ns.visible.insert(ns.phi_async.get(x).cloned().unwrap_or_else(|| x.clone()));
        }
        ns
    }

    /// Images of `originally_async` under `phi_async`: the labels hidden by
    /// the totally closed semantics on top of the partially closed one.
    pub(super) fn async_images(&self, ns: &NameSets) -> BTreeSet<String> {
        ns.originally_async.iter().map(|x| ns.phi_async.get(x).cloned().unwrap_or_else(|| x.clone())).collect()
    }

    /// Fresh names of the external endpoints of `k`'s queues whose partner
    /// is in `targets` (the set H of the checks).
    pub fn queue_names(&self, k: usize, targets: &BTreeSet<usize>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for (qi, q) in self.queues.iter().enumerate() {
            if q.owner != k || !targets.contains(&q.partner) {
                continue;
            }
            let outer = if q.direction == Direction::Output { "depart" } else { "arrive" };
            if let Some(g) = self.group_of(Party::Queue(qi), outer) {
                out.insert(g.name.clone());
            }
        }
        out
    }

    /// Exceptions raisable by semi-synchronous interactions in attachments
    /// between `k` and `targets`, including those of `k`'s inputs fed by
    /// queues from `targets` (the set E of the checks).
    pub fn exception_names(&self, k: usize, targets: &BTreeSet<usize>) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for g in &self.groups {
            let owners = self.group_owners(g);
            if !owners.contains(&k) || !owners.iter().any(|o| *o != k && targets.contains(o)) {
                continue;
            }
            for (p, a) in &g.members {
                if self.is_semisync(*p, a) {
                    out.insert(self.exception_of(*p, a));
                }
            }
        }
        for q in &self.queues {
            if q.owner == k && q.direction == Direction::Input && targets.contains(&q.partner) {
                out.insert(self.exception_of(Party::Aei(k), &q.interaction));
            }
        }
        out
    }

    /// Fresh names shared by the two sets of instances.
    pub fn sync_names(&self, left: &BTreeSet<usize>, right: &BTreeSet<usize>) -> BTreeSet<String> {
        self.groups
            .iter()
            .filter(|g| {
                let owners = self.group_owners(g);
                owners.iter().any(|o| left.contains(o)) && owners.iter().any(|o| right.contains(o))
            })
            .filter(|g| !self.is_internal(g))
            .map(|g| g.name.clone())
            .collect()
    }
}
