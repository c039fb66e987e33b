//! Static checks turning a parsed description into a validated architecture.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use super::ast::*;
use super::diagnostic::Diagnostic;
use super::expr::{self, Kind, KindError};

/// An architecture that passed every static check, with actual
/// parameters already evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedArchitecture {
    arch: ArchiDescription,
    aet_index: Vec<usize>,
    args: Vec<Vec<Value>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EndpointError {
    #[error("unknown instance `{0}`")]
    UnknownAei(String),
    #[error("instance `{0}` has no interaction `{1}`")]
    UnknownInteraction(String, String),
}

impl ValidatedArchitecture {
    pub fn description(&self) -> &ArchiDescription {
        &self.arch
    }

    pub fn name(&self) -> &str {
        &self.arch.name
    }

    pub fn instances(&self) -> &[Instance] {
        &self.arch.instances
    }

    pub fn attachments(&self) -> &[Attachment] {
        &self.arch.attachments
    }

    pub fn aei_index(&self, name: &str) -> Option<usize> {
        self.arch.instances.iter().position(|i| i.name == name)
    }

    pub fn aet_of(&self, aei: usize) -> &AetDef {
        &self.arch.aets[self.aet_index[aei]]
    }

    pub fn aet_of_name(&self, aei: &str) -> Option<&AetDef> {
        self.aei_index(aei).map(|i| self.aet_of(i))
    }

    /// Evaluated actual parameters of an instance, in declaration order.
    pub fn args_of(&self, aei: usize) -> &[Value] {
        &self.args[aei]
    }

    pub fn interaction(&self, ep: &Endpoint) -> Result<&InteractionDecl, EndpointError> {
        let aet = self.aet_of_name(&ep.aei).ok_or_else(|| EndpointError::UnknownAei(ep.aei.clone()))?;
        aet.interaction(&ep.interaction)
            .ok_or_else(|| EndpointError::UnknownInteraction(ep.aei.clone(), ep.interaction.clone()))
    }

    /// Number of attachments involving `ep`.
    pub fn attach_no(&self, ep: &Endpoint) -> Result<usize, EndpointError> {
        self.interaction(ep)?;
        Ok(self.arch.attachments.iter().filter(|a| a.from == *ep || a.to == *ep).count())
    }

    pub fn is_architectural(&self, ep: &Endpoint) -> bool {
        self.arch.archi_interactions.iter().any(|a| a.endpoint == *ep)
    }
}

pub fn validate(arch: &ArchiDescription) -> Result<ValidatedArchitecture, Vec<Diagnostic>> {
    let mut v = Validator { diags: Vec::new() };
    let archi_env = v.archi_params(arch);
    for aet in &arch.aets {
        v.aet(aet);
    }
    v.duplicates(arch.aets.iter().map(|a| (a.name.as_str(), a.span)), "E_DUP_AET", "element type");

    let mut aet_index = Vec::new();
    let mut args = Vec::new();
    v.duplicates(arch.instances.iter().map(|i| (i.name.as_str(), i.span)), "E_DUP_AEI", "instance");
    for inst in &arch.instances {
        if inst.name.starts_with("IAQ_") || inst.name.starts_with("OAQ_") {
            v.err("E_RESERVED_NAME", inst.span, format!("instance name `{}` is reserved for implicit queues", inst.name));
        }
        match arch.aets.iter().position(|a| a.name == inst.aet) {
            None => {
                v.err("E_UNKNOWN_AET", inst.span, format!("unknown element type `{}`", inst.aet));
                aet_index.push(usize::MAX);
                args.push(Vec::new());
            }
            Some(idx) => {
                aet_index.push(idx);
                args.push(v.actuals(&arch.aets[idx], inst, &archi_env));
            }
        }
    }
    v.topology(arch);

    if v.diags.is_empty() {
        Ok(ValidatedArchitecture { arch: arch.clone(), aet_index, args })
    } else {
        Err(v.diags)
    }
}

struct Validator {
    diags: Vec<Diagnostic>,
}

impl Validator {
    fn err(&mut self, code: &'static str, span: Span, msg: String) {
        self.diags.push(Diagnostic::error(code, span, msg));
    }

    fn duplicates<'a>(&mut self, items: impl Iterator<Item = (&'a str, Span)>, code: &'static str, what: &str) {
        let mut seen = HashSet::new();
        for (name, span) in items {
            if !seen.insert(name) {
                self.err(code, span, format!("duplicate {what} `{name}`"));
            }
        }
    }

    /// Checks architecture-level parameters and returns their values.
    fn archi_params(&mut self, arch: &ArchiDescription) -> HashMap<String, Value> {
        self.duplicates(arch.params.iter().map(|p| (p.name.as_str(), p.span)), "E_DUP_PARAM", "parameter");
        let mut env = HashMap::new();
        for p in &arch.params {
            self.check_type(&p.ty, p.span);
            let Some(d) = &p.default else {
                self.err("E_MISSING_DEFAULT", p.span, format!("architectural parameter `{}` needs an initial value", p.name));
                continue;
            };
            let scope = |n: &str| env.get(n).copied();
            match expr::eval(d, &scope) {
                Ok(val) => {
                    if self.check_value(&p.ty, val, p.span, &p.name) {
                        env.insert(p.name.clone(), val);
                    }
                }
                Err(e) => self.err("E_TYPE", p.span, format!("initial value of `{}`: {e}", p.name)),
            }
        }
        env
    }

    fn check_type(&mut self, ty: &Type, span: Span) {
        if let Type::Int { lo, hi } = ty {
            if lo > hi {
                self.err("E_RANGE", span, format!("empty integer range {lo}..{hi}"));
            }
        }
    }

    fn check_value(&mut self, ty: &Type, val: Value, span: Span, what: &str) -> bool {
        if ty.admits(&val) {
            return true;
        }
        let code = match (ty, val) {
            (Type::Int { .. }, Value::Int(_)) => "E_RANGE",
            _ => "E_TYPE",
        };
        self.err(code, span, format!("value {val} does not fit type {ty} of `{what}`"));
        false
    }

    fn actuals(&mut self, aet: &AetDef, inst: &Instance, env: &HashMap<String, Value>) -> Vec<Value> {
        if inst.args.len() != aet.params.len() {
            self.err(
                "E_ARITY",
                inst.span,
                format!(
                    "`{}` expects {} parameter(s), got {}",
                    aet.name,
                    aet.params.len(),
                    inst.args.len()
                ),
            );
            return Vec::new();
        }
        let scope = |n: &str| env.get(n).copied();
        let mut out = Vec::new();
        for (p, a) in aet.params.iter().zip(&inst.args) {
            match expr::eval(a, &scope) {
                Ok(val) => {
                    self.check_value(&p.ty, val, inst.span, &p.name);
                    out.push(val);
                }
                Err(expr::EvalError::Unbound(n)) => {
                    self.err("E_UNKNOWN_VAR", inst.span, format!("unknown variable `{n}`"))
                }
                Err(e) => self.err("E_TYPE", inst.span, format!("actual parameter `{}`: {e}", p.name)),
            }
        }
        out
    }

    fn aet(&mut self, aet: &AetDef) {
        self.duplicates(aet.params.iter().map(|p| (p.name.as_str(), p.span)), "E_DUP_PARAM", "parameter");
        for p in &aet.params {
            self.check_type(&p.ty, p.span);
        }
        self.duplicates(aet.equations.iter().map(|e| (e.name.as_str(), e.span)), "E_DUP_EQUATION", "equation");
        self.duplicates(aet.interactions.iter().map(|i| (i.name.as_str(), i.span)), "E_DUP_INTERACTION", "interaction");

        let eq_arity: HashMap<&str, &Equation> = aet.equations.iter().map(|e| (e.name.as_str(), e)).collect();
        let aet_kinds: HashMap<&str, Kind> = aet.params.iter().map(|p| (p.name.as_str(), kind(&p.ty))).collect();

        let mut used_actions = HashSet::new();
        for (idx, eq) in aet.equations.iter().enumerate() {
            self.duplicates(eq.params.iter().map(|p| (p.name.as_str(), p.span)), "E_DUP_PARAM", "parameter");
            let mut scope = aet_kinds.clone();
            for p in &eq.params {
                self.check_type(&p.ty, p.span);
                scope.insert(p.name.as_str(), kind(&p.ty));
            }
            for p in &eq.params {
                match &p.default {
                    Some(d) => {
                        let k = kind_of_default(d, &aet_kinds);
                        match k {
                            Ok(k) if k == kind(&p.ty) => {}
                            Ok(_) => self.err("E_TYPE", p.span, format!("initial value of `{}` has the wrong type", p.name)),
                            Err(e) => self.kind_error(e, p.span),
                        }
                    }
                    None if idx == 0 => self.err(
                        "E_MISSING_DEFAULT",
                        p.span,
                        format!("parameter `{}` of initial equation `{}` needs an initial value", p.name, eq.name),
                    ),
                    None => {}
                }
            }
            eq.body.visit_actions(&mut |a| {
                used_actions.insert(a.to_string());
            });
            self.body(aet, &eq.body, &scope, &eq_arity, &mut Vec::new());
        }

        for i in &aet.interactions {
            if i.name.ends_with("_exception") {
                self.err("E_RESERVED_NAME", i.span, format!("interaction name `{}` clashes with exception labels", i.name));
            }
            if !used_actions.contains(&i.name) {
                self.err("E_UNUSED_INTERACTION", i.span, format!("interaction `{}` does not occur in the behavior", i.name));
            }
            if let Some(dep) = &i.dep_on {
                let target = aet.interaction(dep);
                let ok = i.direction == Direction::Output
                    && i.multiplicity == Multiplicity::Or
                    && matches!(target, Some(t) if t.direction == Direction::Input && t.multiplicity == Multiplicity::Or);
                if !ok {
                    self.err(
                        "E_DEP_INVALID",
                        i.span,
                        format!("`{} DEP {dep}` must pair an output or-interaction with an input or-interaction", i.name),
                    );
                }
            }
        }
    }

    /// Walks a body; `performed` lists the actions executed so far on the
    /// current path, which determines where `x.success` may be read.
    fn body(
        &mut self,
        aet: &AetDef,
        p: &Process,
        scope: &HashMap<&str, Kind>,
        eqs: &HashMap<&str, &Equation>,
        performed: &mut Vec<String>,
    ) {
        let success_ok = |x: &str, performed: &Vec<String>| {
            let semisync = matches!(aet.interaction(x), Some(i) if i.synchronicity == Synchronicity::Ssync
                || (i.synchronicity == Synchronicity::Async && i.direction == Direction::Input));
            semisync && performed.iter().any(|a| a == x)
        };
        match p {
            Process::Stop => {}
            Process::Prefix { action, then, .. } => {
                performed.push(action.clone());
                self.body(aet, then, scope, eqs, performed);
                performed.pop();
            }
            Process::Choice(branches) => {
                for b in branches {
                    if let Some(g) = &b.guard {
                        let span = first_span(&b.body);
                        let r = expr::kind_of(g, &|n| scope.get(n).copied(), &|x| success_ok(x, performed));
                        match r {
                            Ok(Kind::Bool) => {}
                            Ok(Kind::Int) => self.err("E_TYPE", span, "guard must be boolean".to_string()),
                            Err(e) => self.kind_error(e, span),
                        }
                    }
                    self.body(aet, &b.body, scope, eqs, performed);
                }
            }
            Process::Invoke { equation, args, span } => {
                let Some(target) = eqs.get(equation.as_str()) else {
                    self.err("E_UNKNOWN_EQUATION", *span, format!("unknown equation `{equation}`"));
                    return;
                };
                if target.params.len() != args.len() {
                    self.err(
                        "E_ARITY",
                        *span,
                        format!("`{equation}` expects {} argument(s), got {}", target.params.len(), args.len()),
                    );
                    return;
                }
                for (param, arg) in target.params.iter().zip(args) {
                    match expr::kind_of(arg, &|n| scope.get(n).copied(), &|x| success_ok(x, performed)) {
                        Ok(k) if k == kind(&param.ty) => {
                            if let Ok(v) = expr::eval(arg, &expr::Empty) {
                                self.check_value(&param.ty, v, *span, &param.name);
                            }
                        }
                        Ok(_) => self.err(
                            "E_TYPE",
                            *span,
                            format!("argument for `{}` of `{equation}` has the wrong type", param.name),
                        ),
                        Err(e) => self.kind_error(e, *span),
                    }
                }
            }
        }
    }

    fn kind_error(&mut self, e: KindError, span: Span) {
        match e {
            KindError::UnknownVar(v) => self.err("E_UNKNOWN_VAR", span, format!("unknown variable `{v}`")),
            KindError::Success(x) => self.err(
                "E_UNDECLARED_SUCCESS",
                span,
                format!("`{x}.success` requires a preceding semi-synchronous interaction `{x}`"),
            ),
            KindError::Mismatch(e) => self.err("E_TYPE", span, format!("ill-typed expression `{e}`")),
        }
    }

    fn topology(&mut self, arch: &ArchiDescription) {
        let lookup = |ep: &Endpoint| -> Option<&InteractionDecl> {
            let inst = arch.instance(&ep.aei)?;
            arch.aet(&inst.aet)?.interaction(&ep.interaction)
        };
        let check_ep = |v: &mut Self, ep: &Endpoint, span: Span| -> bool {
            let Some(inst) = arch.instance(&ep.aei) else {
                v.err("E_UNKNOWN_AEI", span, format!("unknown instance `{}`", ep.aei));
                return false;
            };
            let known = arch.aet(&inst.aet).and_then(|a| a.interaction(&ep.interaction)).is_some();
            if !known && arch.aet(&inst.aet).is_some() {
                v.err("E_UNKNOWN_INTERACTION", span, format!("`{}` has no interaction `{}`", ep.aei, ep.interaction));
            }
            known
        };

        let mut counts: BTreeMap<&Endpoint, usize> = BTreeMap::new();
        let mut seen = HashSet::new();
        for att in &arch.attachments {
            if !seen.insert((&att.from, &att.to)) {
                self.err("E_DUP_ATTACHMENT", att.span, format!("duplicate attachment from {} to {}", att.from, att.to));
            }
            let ok_from = check_ep(self, &att.from, att.span);
            let ok_to = check_ep(self, &att.to, att.span);
            if att.from.aei == att.to.aei {
                self.err("E_SELF_ATTACH", att.span, format!("attachment connects `{}` to itself", att.from.aei));
            }
            if !(ok_from && ok_to) {
                continue;
            }
            *counts.entry(&att.from).or_default() += 1;
            *counts.entry(&att.to).or_default() += 1;
            let (f, t) = (lookup(&att.from).unwrap(), lookup(&att.to).unwrap());
            if f.direction != Direction::Output || t.direction != Direction::Input {
                self.err(
                    "E_ATTACH_DIR",
                    att.span,
                    format!("attachment from {} to {} must go from an output to an input", att.from, att.to),
                );
            }
            if f.multiplicity != Multiplicity::Uni && t.multiplicity != Multiplicity::Uni {
                self.err(
                    "E_MULTI_TO_MULTI",
                    att.span,
                    format!("and-/or-interactions may only be attached to uni-interactions ({} to {})", att.from, att.to),
                );
            }
        }
        for (ep, n) in &counts {
            if *n > 1 && lookup(ep).map(|d| d.multiplicity) == Some(Multiplicity::Uni) {
                let span = arch.attachments.iter().filter(|a| a.from == **ep || a.to == **ep).nth(1).unwrap().span;
                self.err("E_UNI_FANOUT", span, format!("uni-interaction {ep} is attached {n} times"));
            }
        }

        // Dependent or-interactions need matching attachment counts.
        for inst in &arch.instances {
            let Some(aet) = arch.aet(&inst.aet) else { continue };
            for i in &aet.interactions {
                let Some(dep) = &i.dep_on else { continue };
                let o = counts.get(&Endpoint::new(&inst.name, &i.name)).copied().unwrap_or(0);
                let d = counts.get(&Endpoint::new(&inst.name, dep)).copied().unwrap_or(0);
                if o != d {
                    self.err(
                        "E_DEP_COUNT",
                        inst.span,
                        format!("`{}.{}` has {o} attachment(s) but `{}.{dep}` has {d}", inst.name, i.name, inst.name),
                    );
                }
            }
        }

        let mut seen_archi = HashSet::new();
        for ai in &arch.archi_interactions {
            if !seen_archi.insert(&ai.endpoint) {
                self.err("E_DUP_ARCHI", ai.span, format!("duplicate architectural interaction {}", ai.endpoint));
            }
            if check_ep(self, &ai.endpoint, ai.span) && counts.contains_key(&ai.endpoint) {
                self.err(
                    "E_ARCHI_ATTACHED",
                    ai.span,
                    format!("architectural interaction {} is also attached", ai.endpoint),
                );
            }
        }
    }
}

fn kind(ty: &Type) -> Kind {
    match ty {
        Type::Bool => Kind::Bool,
        Type::Int { .. } => Kind::Int,
    }
}

fn kind_of_default(e: &Expr, aet: &HashMap<&str, Kind>) -> Result<Kind, KindError> {
    expr::kind_of(e, &|n| aet.get(n).copied(), &|_| false)
}

fn first_span(p: &Process) -> Span {
    match p {
        Process::Invoke { span, .. } | Process::Prefix { span, .. } => *span,
        Process::Choice(b) => b.first().map(|b| first_span(&b.body)).unwrap_or_default(),
        Process::Stop => Span::default(),
    }
}
