use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, OnceLock, RwLock};

use crate::frontend::ast::{Direction, Equation, Multiplicity, Synchronicity, Value};
use crate::frontend::{parse_equations, ValidatedArchitecture};
use crate::kernel::{exception_label, Invocation, InteractionTable, Lts, DEFAULT_STATE_LIMIT};

use super::rewrite::{copy_name, or_rewrite, OrPlan};
use super::semantics::{CacheKey, Semantics};
use super::ElabError;

/// Something that can take part in an attachment: a declared instance or
/// an implicit queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Aei(usize),
    Queue(usize),
}

/// An interaction after or-rewriting and queue conversion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalInteraction {
    pub name: String,
    /// Name in the element type; differs from `name` for or-copies.
    pub declared: String,
    pub direction: Direction,
    pub multiplicity: Multiplicity,
    /// Synchronicity after conversion: asynchronous outputs become
    /// synchronous and asynchronous inputs semi-synchronous.
    pub synchronicity: Synchronicity,
    pub originally_async: bool,
    pub architectural: bool,
}

#[derive(Debug, Clone)]
pub struct AeiModel {
    pub name: String,
    /// Or-rewritten behavior with unqualified action names.
    pub equations: Vec<Equation>,
    pub table: InteractionTable,
    pub initial: Invocation,
    pub interactions: Vec<LocalInteraction>,
    /// Every action occurring in the behavior.
    pub actions: BTreeSet<String>,
}

impl AeiModel {
    pub fn interaction(&self, name: &str) -> Option<&LocalInteraction> {
        self.interactions.iter().find(|i| i.name == name)
    }
}

/// An implicit bounded queue decoupling one asynchronous attachment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueueInstance {
    /// `OAQ_k` or `IAQ_k`.
    pub name: String,
    /// `Output` for an output queue, `Input` for an input queue.
    pub direction: Direction,
    pub owner: usize,
    /// The owner's interaction the queue serves.
    pub interaction: String,
    /// The instance on the far side of the attachment.
    pub partner: usize,
}

/// A maximal set of attached interactions, sharing one fresh name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub name: String,
    /// Senders first, then receivers, each in attachment order.
    pub members: Vec<(Party, String)>,
}

/// A validated architecture together with everything needed to build its
/// semantics. Semantics are computed on demand and cached.
pub struct Elaboration {
    pub(super) arch: ValidatedArchitecture,
    pub(super) capacity: u32,
    pub(super) limit: usize,
    pub(super) aeis: Vec<AeiModel>,
    pub(super) queues: Vec<QueueInstance>,
    pub(super) queue_equations: Vec<Equation>,
    pub(super) groups: Vec<Group>,
    pub(super) group_of: HashMap<(Party, String), usize>,
    pub(super) behaviors: Vec<OnceLock<Result<Arc<Lts>, ElabError>>>,
    pub(super) cache: RwLock<HashMap<CacheKey, Arc<Semantics>>>,
}

impl std::fmt::Debug for Elaboration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Elaboration")
            .field("name", &self.arch.name())
            .field("capacity", &self.capacity)
            .field("queues", &self.queues)
            .field("groups", &self.groups)
            .finish()
    }
}

impl Elaboration {
    pub fn architecture(&self) -> &ValidatedArchitecture {
        &self.arch
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn state_limit(&self) -> usize {
        self.limit
    }

    pub fn set_state_limit(&mut self, limit: usize) {
        self.limit = limit;
        self.cache.write().unwrap().clear();
        self.behaviors = (0..self.aeis.len()).map(|_| OnceLock::new()).collect();
    }

    pub fn aeis(&self) -> &[AeiModel] {
        &self.aeis
    }

    pub fn aei(&self, name: &str) -> Result<usize, ElabError> {
        self.aeis.iter().position(|a| a.name == name).ok_or_else(|| ElabError::UnknownAei(name.to_string()))
    }

    pub fn aei_names(&self) -> Vec<String> {
        self.aeis.iter().map(|a| a.name.clone()).collect()
    }

    pub fn queues(&self) -> &[QueueInstance] {
        &self.queues
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Dotted name of a party's action, e.g. `OAQ_1.arrive`.
    pub fn qualified(&self, party: Party, action: &str) -> String {
        format!("{}.{action}", self.party_name(party))
    }

    pub fn party_name(&self, party: Party) -> &str {
        match party {
            Party::Aei(i) => &self.aeis[i].name,
            Party::Queue(q) => &self.queues[q].name,
        }
    }

    /// The declared instance a party belongs to.
    pub fn owner(&self, party: Party) -> usize {
        match party {
            Party::Aei(i) => i,
            Party::Queue(q) => self.queues[q].owner,
        }
    }

    pub fn group_of(&self, party: Party, action: &str) -> Option<&Group> {
        self.group_of.get(&(party, action.to_string())).map(|&g| &self.groups[g])
    }

    /// Whether every member of the group belongs to the same instance,
    /// i.e. it links an instance to one of its own queues.
    pub fn is_internal(&self, group: &Group) -> bool {
        let owners: BTreeSet<usize> = group.members.iter().map(|(p, _)| self.owner(*p)).collect();
        owners.len() == 1
    }

    /// Instances (other than through queues) taking part in the group.
    pub fn group_owners(&self, group: &Group) -> BTreeSet<usize> {
        group.members.iter().map(|(p, _)| self.owner(*p)).collect()
    }

    pub(super) fn is_semisync(&self, party: Party, action: &str) -> bool {
        match party {
            Party::Aei(i) => self.aeis[i].table.semisync.contains(action),
            Party::Queue(_) => false,
        }
    }

    /// Exception label raised when the semi-synchronous `action` of `party` fails.
    pub fn exception_of(&self, party: Party, action: &str) -> String {
        exception_label(&self.qualified(party, action))
    }
}

/// Applies the or-rewrite to every instance and inserts one bounded queue
/// per attachment of each asynchronous interaction.
pub fn insert_async_queues(arch: &ValidatedArchitecture, capacity: u32) -> Result<Elaboration, ElabError> {
    if capacity < 1 {
        return Err(ElabError::Capacity);
    }
    let desc = arch.description();
    let n = desc.instances.len();
    let index: HashMap<&str, usize> = desc.instances.iter().enumerate().map(|(i, x)| (x.name.as_str(), i)).collect();

    // Attachment indices per declared endpoint, in attachment order.
    let mut uses: HashMap<(usize, &str), Vec<usize>> = HashMap::new();
    for (k, a) in desc.attachments.iter().enumerate() {
        uses.entry((index[a.from.aei.as_str()], a.from.interaction.as_str())).or_default().push(k);
        uses.entry((index[a.to.aei.as_str()], a.to.interaction.as_str())).or_default().push(k);
    }
    let partner_of = |k: usize, me: usize| -> usize {
        let a = &desc.attachments[k];
        let from = index[a.from.aei.as_str()];
        if from == me {
            index[a.to.aei.as_str()]
        } else {
            from
        }
    };

    // Post-rewrite interaction name for each (attachment, side).
    let mut renamed: HashMap<(usize, usize), String> = HashMap::new();
    let mut aeis = Vec::with_capacity(n);
    for (ai, inst) in desc.instances.iter().enumerate() {
        let aet = arch.aet_of(ai);
        let mut plan = OrPlan::default();
        for d in &aet.interactions {
            let list = uses.get(&(ai, d.name.as_str())).cloned().unwrap_or_default();
            if d.multiplicity == Multiplicity::Or {
                plan.copies.insert(d.name.clone(), list.len());
                if let Some(i) = &d.dep_on {
                    plan.deps.insert(d.name.clone(), i.clone());
                }
            }
        }
        for d in &aet.interactions {
            let list = uses.get(&(ai, d.name.as_str())).cloned().unwrap_or_default();
            if d.multiplicity != Multiplicity::Or || list.len() < 2 {
                for &k in &list {
                    renamed.insert((k, ai), d.name.clone());
                }
                continue;
            }
            let order = match d.dep_on.as_ref().and_then(|i| uses.get(&(ai, i.as_str()))) {
                Some(inputs) if inputs.len() == list.len() => align(&list, inputs, |k| partner_of(k, ai)),
                _ => list.clone(),
            };
            for (j, k) in order.into_iter().enumerate() {
                renamed.insert((k, ai), copy_name(&d.name, j + 1));
            }
        }

        let equations = or_rewrite(&aet.equations, &plan)?;
        let mut interactions = Vec::new();
        for d in &aet.interactions {
            let copies = plan.copies.get(&d.name).copied().filter(|&l| l >= 2);
            let names: Vec<(String, Multiplicity)> = match copies {
                Some(l) => (1..=l).map(|j| (copy_name(&d.name, j), Multiplicity::Uni)).collect(),
                None => vec![(d.name.clone(), d.multiplicity)],
            };
            let architectural = arch.is_architectural(&crate::frontend::Endpoint::new(&inst.name, &d.name));
            for (name, multiplicity) in names {
                let synchronicity = match (d.synchronicity, d.direction) {
                    (Synchronicity::Async, Direction::Input) => Synchronicity::Ssync,
                    (Synchronicity::Async, Direction::Output) => Synchronicity::Sync,
                    (s, _) => s,
                };
                interactions.push(LocalInteraction {
                    name,
                    declared: d.name.clone(),
                    direction: d.direction,
                    multiplicity,
                    synchronicity,
                    originally_async: d.synchronicity == Synchronicity::Async,
                    architectural,
                });
            }
        }
        let constants: Vec<(String, Value)> =
            aet.params.iter().map(|p| p.name.clone()).zip(arch.args_of(ai).iter().copied()).collect();
        let semisync =
            interactions.iter().filter(|i| i.synchronicity == Synchronicity::Ssync).map(|i| i.name.clone()).collect();
        let table = InteractionTable { owner: inst.name.clone(), constants: constants.clone(), semisync };
        let initial = Invocation::initial(&equations, &constants)?;
        let mut actions = BTreeSet::new();
        for eq in &equations {
            eq.body.visit_actions(&mut |a| {
                actions.insert(a.to_string());
            });
        }
        aeis.push(AeiModel { name: inst.name.clone(), equations, table, initial, interactions, actions });
    }

    // Links between post-rewrite endpoints, in attachment order.
    let links: Vec<((usize, String), (usize, String))> = desc
        .attachments
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let (f, t) = (index[a.from.aei.as_str()], index[a.to.aei.as_str()]);
            ((f, renamed[&(k, f)].clone()), (t, renamed[&(k, t)].clone()))
        })
        .collect();

    // One queue per attachment of each asynchronous interaction, numbered
    // by instance, then interaction, then attachment.
    let mut queues = Vec::new();
    let mut queue_at: HashMap<(usize, usize), usize> = HashMap::new();
    let (mut n_in, mut n_out) = (0, 0);
    for (ai, model) in aeis.iter().enumerate() {
        for li in model.interactions.iter().filter(|i| i.originally_async) {
            for (k, (from, to)) in links.iter().enumerate() {
                let (me, other) = match li.direction {
                    Direction::Output => (from, to),
                    Direction::Input => (to, from),
                };
                if me.0 != ai || me.1 != li.name {
                    continue;
                }
                let name = match li.direction {
                    Direction::Output => {
                        n_out += 1;
                        format!("OAQ_{n_out}")
                    }
                    Direction::Input => {
                        n_in += 1;
                        format!("IAQ_{n_in}")
                    }
                };
                queue_at.insert((k, ai), queues.len());
                queues.push(QueueInstance {
                    name,
                    direction: li.direction,
                    owner: ai,
                    interaction: li.name.clone(),
                    partner: other.0,
                });
            }
        }
    }

    let mut final_links: Vec<((Party, String), (Party, String))> = Vec::new();
    for (k, (from, to)) in links.iter().enumerate() {
        let mut src = (Party::Aei(from.0), from.1.clone());
        let mut dst = (Party::Aei(to.0), to.1.clone());
        if let Some(&q) = queue_at.get(&(k, from.0)) {
            final_links.push((src, (Party::Queue(q), "arrive".into())));
            src = (Party::Queue(q), "depart".into());
        }
        let mut tail = None;
        if let Some(&q) = queue_at.get(&(k, to.0)) {
            tail = Some(((Party::Queue(q), "depart".to_string()), dst));
            dst = (Party::Queue(q), "arrive".into());
        }
        final_links.push((src, dst));
        final_links.extend(tail);
    }

    let mut elab = Elaboration {
        arch: arch.clone(),
        capacity,
        limit: DEFAULT_STATE_LIMIT,
        behaviors: (0..aeis.len()).map(|_| OnceLock::new()).collect(),
        aeis,
        queues,
        queue_equations: queue_equations(capacity),
        groups: Vec::new(),
        group_of: HashMap::new(),
        cache: RwLock::new(HashMap::new()),
    };
    build_groups(&mut elab, &final_links);
    Ok(elab)
}

/// Orders the attachments of a dependent output so that the `j`-th one
/// reaches the same instance as the `j`-th attachment of its input.
fn align(outputs: &[usize], inputs: &[usize], partner: impl Fn(usize) -> usize) -> Vec<usize> {
    let mut free: Vec<usize> = outputs.to_vec();
    let mut order = Vec::with_capacity(outputs.len());
    for &i in inputs {
        let want = partner(i);
        let pos = free.iter().position(|&o| partner(o) == want).unwrap_or(0);
        order.push(free.remove(pos));
    }
    order
}

fn queue_equations(capacity: u32) -> Vec<Equation> {
    let src = format!(
        "Queue(int(0..{capacity}) n := 0; void) =
           choice {{
             cond(n < {capacity}) -> arrive . Queue(n + 1),
             cond(n > 0) -> depart . Queue(n - 1)
           }}"
    );
    parse_equations(&src).expect("queue behavior parses")
}

type Link = ((Party, String), (Party, String));

fn build_groups(elab: &mut Elaboration, links: &[Link]) {
    // Union-find over endpoints; uni endpoints occur in one link at most,
    // so components are exactly the maximal attached sets.
    let mut ids: BTreeMap<(Party, String), usize> = BTreeMap::new();
    let mut order: Vec<(Party, String)> = Vec::new();
    let mut parent: Vec<usize> = Vec::new();
    let mut id = |e: &(Party, String), parent: &mut Vec<usize>, order: &mut Vec<(Party, String)>| -> usize {
        *ids.entry(e.clone()).or_insert_with(|| {
            parent.push(parent.len());
            order.push(e.clone());
            parent.len() - 1
        })
    };
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut pairs = Vec::new();
    for (s, r) in links {
        let a = id(s, &mut parent, &mut order);
        let b = id(r, &mut parent, &mut order);
        pairs.push((a, b));
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[rb] = ra;
        }
    }
    let mut comp_index: HashMap<usize, usize> = HashMap::new();
    let mut senders: Vec<Vec<usize>> = Vec::new();
    let mut receivers: Vec<Vec<usize>> = Vec::new();
    for &(a, b) in &pairs {
        let root = find(&mut parent, a);
        let c = *comp_index.entry(root).or_insert_with(|| {
            senders.push(Vec::new());
            receivers.push(Vec::new());
            senders.len() - 1
        });
        if !senders[c].contains(&a) {
            senders[c].push(a);
        }
        if !receivers[c].contains(&b) {
            receivers[c].push(b);
        }
    }
    for (s, r) in senders.into_iter().zip(receivers) {
        let members: Vec<(Party, String)> = s.iter().chain(&r).map(|&e| order[e].clone()).collect();
        let name = members.iter().map(|(p, a)| elab.qualified(*p, a)).collect::<Vec<_>>().join("#");
        let g = elab.groups.len();
        for m in &members {
            elab.group_of.insert(m.clone(), g);
        }
        elab.groups.push(Group { name, members });
    }
}
