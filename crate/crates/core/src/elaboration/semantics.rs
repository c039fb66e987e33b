use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::frontend::ast::{Direction, Multiplicity, Value};
use crate::kernel::{generate_lts, hide, parallel, relabel, HideMode, Invocation, InteractionTable, Lts};

use super::model::{Elaboration, Party};
use super::ElabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    /// Interacting semantics, nothing hidden.
    Open,
    /// Everything outside the visibility set hidden.
    Partial,
    /// As `Partial`, and the originally asynchronous interactions hidden too.
    Total,
}

/// A semantics variant for one instance or a set of them, by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticsRequest {
    pub subject: Vec<String>,
    pub context: Vec<String>,
    pub closure: Closure,
    /// Instances whose attachments keep their queues; empty means without buffers.
    pub buffers_for: Vec<String>,
    /// Members taking the partially closed semantics inside a totally closed set.
    pub partial_members: Vec<String>,
}

/// An LTS together with the visible labels it may synchronize on.
#[derive(Debug, Clone)]
pub struct Semantics {
    pub lts: Lts,
    /// Every non-exception visible label the behavior could perform.
    pub sort: BTreeSet<String>,
}

pub(crate) type CacheKey = (usize, Vec<usize>, Closure, Vec<usize>);

impl Elaboration {
    pub fn all_aeis(&self) -> BTreeSet<usize> {
        (0..self.aeis.len()).collect()
    }

    pub fn aei_set(&self, names: &[String]) -> Result<BTreeSet<usize>, ElabError> {
        names.iter().map(|n| self.aei(n)).collect()
    }

    /// Reachable states of an instance's own behavior, labels qualified by
    /// the instance name.
    pub fn behavior(&self, aei: usize) -> Result<Arc<Lts>, ElabError> {
        self.behaviors[aei]
            .get_or_init(|| {
                let m = &self.aeis[aei];
                generate_lts(&m.equations, &m.initial, &m.table, self.limit).map(Arc::new).map_err(Into::into)
            })
            .clone()
    }

    /// Behavior of an implicit queue; states where it is full are marked.
    pub fn queue_behavior(&self, q: usize) -> Result<Lts, ElabError> {
        let name = &self.queues[q].name;
        let table = InteractionTable { owner: name.clone(), ..InteractionTable::default() };
        let start = Invocation { equation: "Queue".into(), args: vec![Value::Int(0)] };
        let mut lts = generate_lts(&self.queue_equations, &start, &table, self.limit)?;
        let arrive = lts.lookup(&format!("{name}.arrive"));
        let full: Vec<_> =
            lts.states().filter(|&s| !lts.transitions(s).iter().any(|t| Some(t.label()) == arrive)).collect();
        for s in full {
            lts.mark(s);
        }
        Ok(lts)
    }

    /// Semantics of a single instance: its behavior composed with the
    /// queues serving attachments towards `buffers`, relabeled with fresh
    /// names with respect to `context`, then closed.
    pub fn aei_semantics(
        &self,
        aei: usize,
        context: &BTreeSet<usize>,
        closure: Closure,
        buffers: &BTreeSet<usize>,
    ) -> Result<Arc<Semantics>, ElabError> {
        let key: CacheKey = (aei, context.iter().copied().collect(), closure, buffers.iter().copied().collect());
        if let Some(hit) = self.cache.read().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let sem = Arc::new(self.build_aei(aei, context, closure, buffers)?);
        self.cache.write().unwrap().insert(key, sem.clone());
        Ok(sem)
    }

    fn build_aei(
        &self,
        aei: usize,
        context: &BTreeSet<usize>,
        closure: Closure,
        buffers: &BTreeSet<usize>,
    ) -> Result<Semantics, ElabError> {
        let ns = self.name_sets(aei, context);
        let phi: BTreeMap<String, String> =
            ns.phi_async.iter().chain(&ns.phi_context).map(|(k, v)| (k.clone(), v.clone())).collect();
        let model = &self.aeis[aei];

        let mut included: Vec<usize> = (0..self.queues.len())
            .filter(|&q| self.queues[q].owner == aei && buffers.contains(&self.queues[q].partner))
            .collect();
        let category = |q: usize| {
            let queue = &self.queues[q];
            let and = model.interaction(&queue.interaction).map(|i| i.multiplicity) == Some(Multiplicity::And);
            match (queue.direction, and) {
                (Direction::Input, false) => 0,
                (Direction::Input, true) => 1,
                (Direction::Output, false) => 2,
                (Direction::Output, true) => 3,
            }
        };
        included.sort_by_key(|&q| (category(q), q));

        let mut lts = relabel(&*self.behavior(aei)?, &phi)?;
        for &q in &included {
            let queue = &self.queues[q];
            let inner = if queue.direction == Direction::Output { "arrive" } else { "depart" };
            let sync: BTreeSet<String> =
                self.group_of(Party::Queue(q), inner).map(|g| g.name.clone()).into_iter().collect();
            let ql = relabel(&self.queue_behavior(q)?, &phi)?;
            lts = match queue.direction {
                Direction::Input => parallel(&ql, &lts, &sync, self.limit)?,
                Direction::Output => parallel(&lts, &ql, &sync, self.limit)?,
            };
        }

        let mut raw: BTreeSet<String> = model.actions.iter().map(|a| self.qualified(Party::Aei(aei), a)).collect();
        for &q in &included {
            for a in ["arrive", "depart"] {
                raw.insert(self.qualified(Party::Queue(q), a));
            }
        }
        let async_images = self.async_images(&ns);
        let keep = |l: &String| match closure {
            Closure::Open => true,
            Closure::Partial => ns.visible.contains(l),
            Closure::Total => ns.visible.contains(l) && !async_images.contains(l),
        };
        let sort: BTreeSet<String> =
            raw.iter().map(|x| phi.get(x).cloned().unwrap_or_else(|| x.clone())).filter(keep).collect();

        if closure != Closure::Open {
            let mut visible = ns.visible.clone();
            visible.extend(lts.alphabet().into_iter().filter(|l| l.ends_with(crate::kernel::EXCEPTION_SUFFIX)));
            lts = hide(&lts, &HideMode::KeepOnly(visible));
            if closure == Closure::Total {
                lts = hide(&lts, &HideMode::Hide(async_images));
            }
        }
        Ok(Semantics { lts, sort })
    }

    /// Left-associated parallel composition of `members`, each synchronizing
    /// with the previous ones on the fresh names they share. Members in
    /// `partial` take the partially closed semantics.
    pub fn composite_semantics(
        &self,
        members: &[usize],
        context: &BTreeSet<usize>,
        closure: Closure,
        buffers: &BTreeSet<usize>,
        partial: &BTreeSet<usize>,
    ) -> Result<Semantics, ElabError> {
        let mut acc: Option<Semantics> = None;
        for &m in members {
            let c = if partial.contains(&m) { Closure::Partial } else { closure };
            let next = self.aei_semantics(m, context, c, buffers)?;
            acc = Some(match acc {
                None => (*next).clone(),
                Some(prev) => compose(&prev, &next, self.limit)?,
            });
        }
        acc.ok_or_else(|| ElabError::Request("empty set of instances".into()))
    }

    /// Resolves a request given by instance names.
    pub fn semantics(&self, req: &SemanticsRequest) -> Result<Semantics, ElabError> {
        let subject: Vec<usize> = req.subject.iter().map(|n| self.aei(n)).collect::<Result<_, _>>()?;
        let context = self.aei_set(&req.context)?;
        let buffers = self.aei_set(&req.buffers_for)?;
        let partial = self.aei_set(&req.partial_members)?;
        if !partial.iter().all(|p| subject.contains(p)) {
            return Err(ElabError::Request("partially closed members must belong to the subject".into()));
        }
        if !subject.iter().all(|s| context.contains(s)) {
            return Err(ElabError::Request("the context must contain the subject".into()));
        }
        self.composite_semantics(&subject, &context, req.closure, &buffers, &partial)
    }
}

/// Parallel composition of two semantics on their shared labels.
pub fn compose(left: &Semantics, right: &Semantics, limit: usize) -> Result<Semantics, ElabError> {
    let sync: BTreeSet<String> = left.sort.intersection(&right.sort).cloned().collect();
    let lts = parallel(&left.lts, &right.lts, &sync, limit)?;
    Ok(Semantics { lts, sort: left.sort.union(&right.sort).cloned().collect() })
}
