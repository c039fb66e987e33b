//! Parallel composition, hiding, relabeling and semi-synchronous resolution.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{KernelError, LabelId, Lts, StateId, Transition, TAU};

/// Product of two LTSs synchronizing on `sync`.
///
/// Labels outside `sync` interleave. A label in `sync` fires only jointly.
/// When one side offers a semi-synchronous transition on a label of `sync`
/// and the other side has no transition on that label, the first side may
/// instead move to its failure continuation while raising its exception.
/// A joint move involving a semi-synchronous side remains semi-synchronous so
/// that a party composed later can still make it fail.
pub fn parallel(left: &Lts, right: &Lts, sync: &BTreeSet<String>, limit: usize) -> Result<Lts, KernelError> {
    for a in sync {
        if a == "tau" {
            return Err(KernelError::BadSyncSet("tau cannot be synchronized".into()));
        }
        if a.ends_with(super::EXCEPTION_SUFFIX) {
            return Err(KernelError::BadSyncSet(format!("exception label `{a}` cannot be synchronized")));
        }
    }

    let mut out = Lts::new();
    let lmap: Vec<LabelId> = left.labels().iter().map(|l| out.intern(l.name())).collect();
    let rmap: Vec<LabelId> = right.labels().iter().map(|l| out.intern(l.name())).collect();
    let mut in_sync = vec![false; out.labels().len()];
    for (id, l) in out.labels().iter().enumerate() {
        in_sync[id] = !l.is_tau() && sync.contains(l.name());
    }

    let mut ids: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue: Vec<(StateId, StateId)> = Vec::new();
    let mut trans: Vec<Vec<Transition>> = Vec::new();
    let mut marked: Vec<bool> = Vec::new();
    let mut ntrans = 0usize;

    let start = (left.initial(), right.initial());
    ids.insert(start, 0);
    queue.push(start);

    let mut head = 0;
    while head < queue.len() {
        let (s1, s2) = queue[head];
        head += 1;
        let mut local: Vec<(Transition, [(StateId, StateId); 2])> = Vec::new();
        let lt = left.transitions(s1);
        let rt = right.transitions(s2);
        let r_has = |a: LabelId| rt.iter().any(|t| rmap[t.label() as usize] == a);
        let l_has = |a: LabelId| lt.iter().any(|t| lmap[t.label() as usize] == a);

        for t in lt {
            let a = lmap[t.label() as usize];
            if !in_sync[a as usize] {
                match *t {
                    Transition::Normal { target, .. } => local.push((normal(a), [(target, s2); 2])),
                    Transition::SemiSync { ok, exc, exception, .. } => {
                        local.push((semi(a, lmap[exception as usize]), [(ok, s2), (exc, s2)]))
                    }
                }
                continue;
            }
            let mut matched = false;
            for u in rt.iter().filter(|u| rmap[u.label() as usize] == a) {
                matched = true;
                match (*t, *u) {
                    (Transition::Normal { target: t1, .. }, Transition::Normal { target: t2, .. }) => {
                        local.push((normal(a), [(t1, t2); 2]))
                    }
                    (Transition::SemiSync { ok, exc, exception, .. }, Transition::Normal { target: t2, .. })
                    | (Transition::SemiSync { ok, exc, exception, .. }, Transition::SemiSync { ok: t2, .. }) => {
                        local.push((semi(a, lmap[exception as usize]), [(ok, t2), (exc, s2)]))
                    }
                    (Transition::Normal { target: t1, .. }, Transition::SemiSync { ok, exc, exception, .. }) => {
                        local.push((semi(a, rmap[exception as usize]), [(t1, ok), (s1, exc)]))
                    }
                }
            }
            if !matched {
                if let Transition::SemiSync { exc, exception, .. } = *t {
                    local.push((normal(lmap[exception as usize]), [(exc, s2); 2]));
                }
            }
        }
        for u in rt {
            let a = rmap[u.label() as usize];
            if !in_sync[a as usize] {
                match *u {
                    Transition::Normal { target, .. } => local.push((normal(a), [(s1, target); 2])),
                    Transition::SemiSync { ok, exc, exception, .. } => {
                        local.push((semi(a, rmap[exception as usize]), [(s1, ok), (s1, exc)]))
                    }
                }
            } else if !l_has(a) {
                if let Transition::SemiSync { exc, exception, .. } = *u {
                    local.push((normal(rmap[exception as usize]), [(s1, exc); 2]));
                }
            }
        }
        debug_assert!(local.iter().all(|(t, _)| !in_sync[t.label() as usize] || l_has(t.label()) && r_has(t.label())));

        let mut resolved = Vec::with_capacity(local.len());
        for (t, pairs) in local {
            let mut get = |p: (StateId, StateId)| -> Result<StateId, KernelError> {
                if let Some(&id) = ids.get(&p) {
                    return Ok(id);
                }
                if ids.len() >= limit {
                    return Err(KernelError::StateLimit { limit, states: ids.len(), transitions: ntrans });
                }
                let id = ids.len() as StateId;
                ids.insert(p, id);
                queue.push(p);
                Ok(id)
            };
            resolved.push(match t {
                Transition::Normal { label, .. } => Transition::Normal { label, target: get(pairs[0])? },
                Transition::SemiSync { label, exception, .. } => {
                    let ok = get(pairs[0])?;
                    let exc = get(pairs[1])?;
                    Transition::SemiSync { label, ok, exc, exception }
                }
            });
        }
        ntrans += resolved.len();
        trans.push(resolved);
        marked.push(left.is_marked(s1) || right.is_marked(s2));
    }

    let mut result = Lts::with_states(trans.len());
    {
        let (labels, index, tr) = result.parts_mut();
        let (l2, i2, _) = out.parts_mut();
        *labels = std::mem::take(l2);
        *index = std::mem::take(i2);
        *tr = trans;
    }
    for (s, m) in marked.into_iter().enumerate() {
        if m {
            result.mark(s as StateId);
        }
    }
    Ok(result)
}

fn normal(label: LabelId) -> Transition {
    Transition::Normal { label, target: 0 }
}

fn semi(label: LabelId, exception: LabelId) -> Transition {
    Transition::SemiSync { label, ok: 0, exc: 0, exception }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HideMode {
    /// Hide exactly the given labels.
    Hide(BTreeSet<String>),
    /// Hide every label except the given ones.
    KeepOnly(BTreeSet<String>),
}

impl HideMode {
    fn hides(&self, name: &str) -> bool {
        match self {
            HideMode::Hide(h) => h.contains(name),
            HideMode::KeepOnly(v) => !v.contains(name),
        }
    }
}

/// Replaces matching labels with τ. A semi-synchronous transition whose
/// action is hidden becomes a τ transition to its success continuation; a
/// hidden exception label is raised as τ.
pub fn hide(lts: &Lts, mode: &HideMode) -> Lts {
    let mut out = lts.clone();
    let hidden: Vec<bool> =
        lts.labels().iter().map(|l| !l.is_tau() && mode.hides(l.name())).collect();
    let map = |id: LabelId| if hidden[id as usize] { TAU } else { id };
    let (_, _, trans) = out.parts_mut();
    for ts in trans.iter_mut() {
        for t in ts.iter_mut() {
            *t = match *t {
                Transition::Normal { label, target } => Transition::Normal { label: map(label), target },
                Transition::SemiSync { label, ok, exc, exception } => {
                    if hidden[label as usize] {
                        Transition::Normal { label: TAU, target: ok }
                    } else {
                        Transition::SemiSync { label, ok, exc, exception: map(exception) }
                    }
                }
            };
        }
    }
    out
}

/// Renames labels through `map`; labels outside its domain are unchanged.
/// The map must be injective on the labels of `lts` and may not rename τ.
pub fn relabel(lts: &Lts, map: &BTreeMap<String, String>) -> Result<Lts, KernelError> {
    if map.contains_key("tau") {
        return Err(KernelError::BadRelabeling("tau cannot be renamed".into()));
    }
    if map.values().any(|v| v == "tau") {
        return Err(KernelError::BadRelabeling("a label cannot be renamed to tau".into()));
    }
    let mut present = vec![false; lts.labels().len()];
    for s in lts.states() {
        for t in lts.transitions(s) {
            present[t.label() as usize] = true;
            if let Transition::SemiSync { exception, .. } = *t {
                present[exception as usize] = true;
            }
        }
    }
    let mut images: BTreeMap<&str, &str> = BTreeMap::new();
    let mut out = Lts::new();
    let mut remap = Vec::with_capacity(lts.labels().len());
    for (id, l) in lts.labels().iter().enumerate() {
        if l.is_tau() || !present[id] {
            remap.push(TAU);
            continue;
        }
        let name = l.name();
        let image = map.get(name).map(String::as_str).unwrap_or(name);
        if let Some(prev) = images.insert(image, name) {
            return Err(KernelError::NonInjective(prev.to_string(), name.to_string(), image.to_string()));
        }
        remap.push(out.intern(image));
    }
    let mut result = lts.clone();
    {
        let (labels, index, trans) = result.parts_mut();
        let (l2, i2, _) = out.parts_mut();
        *labels = std::mem::take(l2);
        *index = std::mem::take(i2);
        for ts in trans.iter_mut() {
            for t in ts.iter_mut() {
                *t = match *t {
                    Transition::Normal { label, target } => {
                        Transition::Normal { label: remap[label as usize], target }
                    }
                    Transition::SemiSync { label, ok, exc, exception } => Transition::SemiSync {
                        label: remap[label as usize],
                        ok,
                        exc,
                        exception: remap[exception as usize],
                    },
                };
            }
        }
    }
    Ok(result)
}

/// Turns every semi-synchronous transition into a normal one towards its
/// success continuation, as happens when no context can make it fail.
pub fn resolve_semisync(lts: &Lts) -> Lts {
    let mut out = lts.clone();
    let (_, _, trans) = out.parts_mut();
    for ts in trans.iter_mut() {
        for t in ts.iter_mut() {
            if let Transition::SemiSync { label, ok, .. } = *t {
                *t = Transition::Normal { label, target: ok };
            }
        }
    }
    out.trim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{exception_label, DEFAULT_STATE_LIMIT};

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    fn prefix_stop(a: &str) -> Lts {
        let mut l = Lts::with_states(2);
        l.add(0, a, 1);
        l
    }

    fn semi_prefix(a: &str) -> Lts {
        let mut l = Lts::with_states(3);
        let label = l.intern(a);
        let exception = l.intern(&exception_label(a));
        l.add_transition(0, Transition::SemiSync { label, ok: 1, exc: 2, exception });
        l
    }

    #[test]
    fn synchronized_prefixes_fire_once() {
        let p = parallel(&prefix_stop("a"), &prefix_stop("a"), &set(&["a"]), DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(p.num_states(), 2);
        assert_eq!(p.num_transitions(), 1);
        assert!(p.transitions(1).is_empty());
    }

    #[test]
    fn interleaving_forms_a_diamond() {
        let p = parallel(&prefix_stop("a"), &prefix_stop("b"), &BTreeSet::new(), DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(p.num_states(), 4);
        assert_eq!(p.num_transitions(), 4);
    }

    #[test]
    fn unmatched_sync_blocks() {
        let p = parallel(&prefix_stop("a"), &prefix_stop("b"), &set(&["a", "b"]), DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(p.num_states(), 1);
        assert!(p.transitions(0).is_empty());
    }

    #[test]
    fn semisync_without_partner_raises_exception() {
        let p = parallel(&semi_prefix("o"), &prefix_stop("x"), &set(&["o"]), DEFAULT_STATE_LIMIT).unwrap();
        let names: Vec<&str> = p.transitions(0).iter().map(|t| p.label_name(t.label())).collect();
        assert_eq!(names, vec!["o_exception", "x"]);
        let q = parallel(&prefix_stop("x"), &semi_prefix("o"), &set(&["o"]), DEFAULT_STATE_LIMIT).unwrap();
        let names: Vec<&str> = q.transitions(0).iter().map(|t| q.label_name(t.label())).collect();
        assert_eq!(names, vec!["x", "o_exception"]);
    }

    #[test]
    fn semisync_with_partner_synchronizes() {
        let p = parallel(&semi_prefix("o"), &prefix_stop("o"), &set(&["o"]), DEFAULT_STATE_LIMIT).unwrap();
        assert_eq!(p.transitions(0).len(), 1);
        assert!(matches!(p.transitions(0)[0], Transition::SemiSync { .. }));
        let r = resolve_semisync(&p);
        assert_eq!(r.num_states(), 2);
    }

    #[test]
    fn hiding_semisync_takes_success_branch() {
        let h = hide(&semi_prefix("o"), &HideMode::Hide(set(&["o"])));
        assert_eq!(h.transitions(0), &[Transition::Normal { label: TAU, target: 1 }]);
    }

    #[test]
    fn keep_only_is_idempotent() {
        let mut l = Lts::with_states(3);
        l.add(0, "a", 1);
        l.add(1, "b", 2);
        let v = HideMode::KeepOnly(set(&["a"]));
        let once = hide(&l, &v);
        assert!(hide(&once, &v).same_structure(&once));
        assert!(hide(&l, &HideMode::Hide(BTreeSet::new())).same_structure(&l));
    }

    #[test]
    fn relabel_rejects_collisions() {
        let mut l = Lts::with_states(3);
        l.add(0, "a", 1);
        l.add(1, "b", 2);
        let m: BTreeMap<String, String> = [("a".to_string(), "b".to_string())].into();
        assert!(matches!(relabel(&l, &m), Err(KernelError::NonInjective(..))));
        let ok: BTreeMap<String, String> = [("a".to_string(), "c".to_string())].into();
        let r = relabel(&l, &ok).unwrap();
        assert_eq!(r.action_names(), set(&["b", "c"]));
    }

    #[test]
    fn exceptions_cannot_be_synchronized() {
        let err = parallel(&Lts::new(), &Lts::new(), &set(&["o_exception"]), 10).unwrap_err();
        assert!(matches!(err, KernelError::BadSyncSet(_)));
    }

    #[test]
    fn state_limit_is_enforced() {
        let err = parallel(&prefix_stop("a"), &prefix_stop("b"), &BTreeSet::new(), 3).unwrap_err();
        assert!(matches!(err, KernelError::StateLimit { limit: 3, .. }));
    }
}
