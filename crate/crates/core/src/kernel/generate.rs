//! State-space generation from behavioral equations.

use std::collections::{BTreeSet, HashMap, HashSet};

use crate::frontend::ast::{BinOp, Equation, Expr, Process, UnOp, Value};
use crate::frontend::expr;

use super::{exception_label, KernelError, LabelId, Lts, StateId, Transition};

/// The equation to start from, with evaluated actual parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Invocation {
    pub equation: String,
    pub args: Vec<Value>,
}

impl Invocation {
    /// Invokes the first equation with its declared initial values.
    pub fn initial(equations: &[Equation], constants: &[(String, Value)]) -> Result<Invocation, KernelError> {
        let eq = equations.first().ok_or_else(|| KernelError::UnknownEquation("<none>".into()))?;
        let scope = |n: &str| constants.iter().find(|(k, _)| k == n).map(|(_, v)| *v);
        let mut args = Vec::new();
        for p in &eq.params {
            let d = p.default.as_ref().ok_or_else(|| KernelError::Eval {
                equation: eq.name.clone(),
                message: format!("parameter `{}` has no initial value", p.name),
            })?;
            let v = expr::eval(d, &scope)
                .map_err(|e| KernelError::Eval { equation: eq.name.clone(), message: e.to_string() })?;
            args.push(v);
        }
        Ok(Invocation { equation: eq.name.clone(), args })
    }
}

/// How actions of a behavior become labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InteractionTable {
    /// Prefix joined to every action with a dot; empty for none.
    pub owner: String,
    /// Values of the element type's formal parameters.
    pub constants: Vec<(String, Value)>,
    /// Actions executed semi-synchronously.
    pub semisync: BTreeSet<String>,
}

impl InteractionTable {
    pub fn label(&self, action: &str) -> String {
        if self.owner.is_empty() {
            action.to_string()
        } else {
            format!("{}.{action}", self.owner)
        }
    }
}

type NodeId = usize;

#[derive(Debug, Clone)]
enum CExpr {
    Const(Value),
    Slot(usize),
    Flag(u32),
    Un(UnOp, Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
}

#[derive(Debug, Clone)]
enum Node {
    Stop,
    Prefix { label: LabelId, semi: Option<LabelId>, flag: Option<u32>, next: NodeId },
    Choice(Vec<(Option<CExpr>, NodeId)>),
    Invoke { eq: usize, args: Vec<CExpr> },
}

struct Program<'a> {
    equations: &'a [Equation],
    nodes: Vec<Node>,
    roots: Vec<NodeId>,
    /// Flag bits read somewhere at or below each node, before the next invocation.
    live: Vec<u64>,
}

type Key = (NodeId, Vec<Value>, u64);

/// Explores every state reachable from `initial`, numbering states in
/// breadth-first order. Actions become `owner.action` labels; each
/// semi-synchronous prefix yields one dual transition whose success and
/// failure continuations see `action.success` as true and false.
pub fn generate_lts(
    equations: &[Equation],
    initial: &Invocation,
    table: &InteractionTable,
    limit: usize,
) -> Result<Lts, KernelError> {
    let mut lts = Lts::new();
    let prog = compile(equations, table, &mut lts)?;
    let start_eq = equations
        .iter()
        .position(|e| e.name == initial.equation)
        .ok_or_else(|| KernelError::UnknownEquation(initial.equation.clone()))?;
    let (node, env, flags) = prog.enter(start_eq, initial.args.clone())?;
    let start = prog.settle(node, env, flags)?;

    let mut ids: HashMap<Key, StateId> = HashMap::new();
    let mut queue: Vec<Key> = Vec::new();
    let mut trans: Vec<Vec<Transition>> = Vec::new();
    let mut ntrans = 0usize;
    let start = prog.canonical(start);
    ids.insert(start.clone(), 0);
    queue.push(start);

    let mut head = 0;
    while head < queue.len() {
        let key = queue[head].clone();
        head += 1;
        let mut steps = Vec::new();
        prog.expand(key.0, &key.1, key.2, &mut steps, 0)?;
        let mut out = Vec::with_capacity(steps.len());
        for step in steps {
            let mut get = |k: Key| -> Result<StateId, KernelError> {
                let k = prog.canonical(k);
                if let Some(&id) = ids.get(&k) {
                    return Ok(id);
                }
                if ids.len() >= limit {
                    return Err(KernelError::StateLimit { limit, states: ids.len(), transitions: ntrans });
                }
                let id = ids.len() as StateId;
                ids.insert(k.clone(), id);
                queue.push(k);
                Ok(id)
            };
            out.push(match step {
                Step::Normal(label, k) => Transition::Normal { label, target: get(k)? },
                Step::Semi(label, exception, ok, exc) => {
                    let ok = get(ok)?;
                    let exc = get(exc)?;
                    Transition::SemiSync { label, ok, exc, exception }
                }
            });
        }
        ntrans += out.len();
        trans.push(out);
    }

    let mut result = Lts::with_states(trans.len());
    {
        let (labels, index, tr) = result.parts_mut();
        let (l2, i2, _) = lts.parts_mut();
        *labels = std::mem::take(l2);
        *index = std::mem::take(i2);
        *tr = trans;
    }
    Ok(result)
}

enum Step {
    Normal(LabelId, Key),
    Semi(LabelId, LabelId, Key, Key),
}

fn compile<'a>(equations: &'a [Equation], table: &InteractionTable, lts: &mut Lts) -> Result<Program<'a>, KernelError> {
    // One flag bit per interaction whose success variable is read anywhere.
    let mut read = BTreeSet::new();
    for eq in equations {
        eq.body.visit_exprs(&mut |e| e.visit_success(&mut |x| {
            read.insert(x.to_string());
        }));
    }
    if read.len() > 64 {
        let name = equations.first().map(|e| e.name.clone()).unwrap_or_default();
        return Err(KernelError::TooManyFlags(name));
    }
    let bits: HashMap<String, u32> = read.into_iter().enumerate().map(|(i, x)| (x, i as u32)).collect();

    let mut prog = Program { equations, nodes: Vec::new(), roots: Vec::new(), live: Vec::new() };
    let eq_index: HashMap<&str, usize> = equations.iter().enumerate().map(|(i, e)| (e.name.as_str(), i)).collect();
    for eq in equations {
        let ctx = Ctx { eq, table, bits: &bits, eq_index: &eq_index };
        let root = compile_process(&ctx, &eq.body, &mut prog.nodes, lts)?;
        prog.roots.push(root);
    }
    prog.live = vec![0; prog.nodes.len()];
    // Nodes are created children-first, so a single forward pass suffices.
    for id in 0..prog.nodes.len() {
        let l = match &prog.nodes[id] {
            Node::Stop => 0,
            Node::Prefix { flag, next, .. } => {
                let mut l = prog.live[*next];
                if let Some(b) = flag {
                    l &= !(1u64 << b);
                }
                l
            }
            Node::Choice(branches) => {
                branches.iter().fold(0, |acc, (g, n)| acc | prog.live[*n] | g.as_ref().map_or(0, flags_of))
            }
            Node::Invoke { args, .. } => args.iter().fold(0, |acc, a| acc | flags_of(a)),
        };
        prog.live[id] = l;
    }
    Ok(prog)
}

fn flags_of(e: &CExpr) -> u64 {
    match e {
        CExpr::Const(_) | CExpr::Slot(_) => 0,
        CExpr::Flag(b) => 1u64 << b,
        CExpr::Un(_, x) => flags_of(x),
        CExpr::Bin(_, l, r) => flags_of(l) | flags_of(r),
    }
}

struct Ctx<'a> {
    eq: &'a Equation,
    table: &'a InteractionTable,
    bits: &'a HashMap<String, u32>,
    eq_index: &'a HashMap<&'a str, usize>,
}

fn compile_process(ctx: &Ctx, p: &Process, nodes: &mut Vec<Node>, lts: &mut Lts) -> Result<NodeId, KernelError> {
    let node = match p {
        Process::Stop => Node::Stop,
        Process::Prefix { action, then, .. } => {
            let next = compile_process(ctx, then, nodes, lts)?;
            let name = ctx.table.label(action);
            let label = lts.intern(&name);
            let semi = ctx.table.semisync.contains(action).then(|| lts.intern(&exception_label(&name)));
            Node::Prefix { label, semi, flag: ctx.bits.get(action).copied(), next }
        }
        Process::Choice(branches) => {
            let mut out = Vec::new();
            for b in branches {
                let g = b.guard.as_ref().map(|g| compile_expr(ctx, g)).transpose()?;
                out.push((g, compile_process(ctx, &b.body, nodes, lts)?));
            }
            Node::Choice(out)
        }
        Process::Invoke { equation, args, .. } => {
            let eq = *ctx.eq_index.get(equation.as_str()).ok_or_else(|| KernelError::UnknownEquation(equation.clone()))?;
            let args = args.iter().map(|a| compile_expr(ctx, a)).collect::<Result<_, _>>()?;
            Node::Invoke { eq, args }
        }
    };
    nodes.push(node);
    Ok(nodes.len() - 1)
}

fn compile_expr(ctx: &Ctx, e: &Expr) -> Result<CExpr, KernelError> {
    Ok(match e {
        Expr::Bool(b) => CExpr::Const(Value::Bool(*b)),
        Expr::Int(i) => CExpr::Const(Value::Int(*i)),
        Expr::Var(v) => {
            if let Some(i) = ctx.eq.params.iter().position(|p| &p.name == v) {
                CExpr::Slot(i)
            } else if let Some((_, val)) = ctx.table.constants.iter().find(|(k, _)| k == v) {
                CExpr::Const(*val)
            } else {
                return Err(KernelError::Eval { equation: ctx.eq.name.clone(), message: format!("unbound variable `{v}`") });
            }
        }
        Expr::Success(x) => CExpr::Flag(ctx.bits[x]),
        Expr::Unary(op, x) => CExpr::Un(*op, Box::new(compile_expr(ctx, x)?)),
        Expr::Binary(op, l, r) => CExpr::Bin(*op, Box::new(compile_expr(ctx, l)?), Box::new(compile_expr(ctx, r)?)),
    })
}

fn eval(e: &CExpr, env: &[Value], flags: u64) -> Result<Value, String> {
    Ok(match e {
        CExpr::Const(v) => *v,
        CExpr::Slot(i) => env[*i],
        CExpr::Flag(b) => Value::Bool(flags & (1u64 << b) != 0),
        CExpr::Un(op, x) => match (op, eval(x, env, flags)?) {
            (UnOp::Not, Value::Bool(b)) => Value::Bool(!b),
            (UnOp::Neg, Value::Int(i)) => Value::Int(i.checked_neg().ok_or("integer overflow")?),
            _ => return Err("ill-typed operand".into()),
        },
        CExpr::Bin(op, l, r) => {
            let lv = eval(l, env, flags)?;
            match (op, lv) {
                (BinOp::And, Value::Bool(false)) => return Ok(Value::Bool(false)),
                (BinOp::Or, Value::Bool(true)) => return Ok(Value::Bool(true)),
                _ => {}
            }
            let rv = eval(r, env, flags)?;
            match expr::apply(*op, lv, rv) {
                Some(res) => res.map_err(|e| e.to_string())?,
                None => return Err("ill-typed operands".into()),
            }
        }
    })
}

impl Program<'_> {
    fn eval_err(&self, msg: String) -> KernelError {
        KernelError::Eval { equation: self.equations.first().map(|e| e.name.clone()).unwrap_or_default(), message: msg }
    }

    /// State for entering equation `eq` with the given actual values.
    fn enter(&self, eq: usize, args: Vec<Value>) -> Result<Key, KernelError> {
        let e = &self.equations[eq];
        if args.len() != e.params.len() {
            return Err(KernelError::Eval {
                equation: e.name.clone(),
                message: format!("expected {} argument(s), got {}", e.params.len(), args.len()),
            });
        }
        for (p, v) in e.params.iter().zip(&args) {
            if !p.ty.admits(v) {
                return Err(KernelError::Range {
                    equation: e.name.clone(),
                    param: p.name.clone(),
                    value: v.to_string(),
                });
            }
        }
        Ok((self.roots[eq], args, 0))
    }

    /// Masks flags that are no longer read.
    fn canonical(&self, key: Key) -> Key {
        let (node, env, flags) = key;
        (node, env, flags & self.live[node])
    }

    /// Follows invocations until a node that is not an invocation.
    fn settle(&self, mut node: NodeId, mut env: Vec<Value>, mut flags: u64) -> Result<Key, KernelError> {
        let mut visited: HashSet<(usize, Vec<Value>)> = HashSet::new();
        while let Node::Invoke { eq, args } = &self.nodes[node] {
            let vals = args
                .iter()
                .map(|a| eval(a, &env, flags))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|m| self.eval_err(m))?;
            if !visited.insert((*eq, vals.clone())) {
                return Err(KernelError::UnguardedRecursion(self.equations[*eq].name.clone()));
            }
            let k = self.enter(*eq, vals)?;
            node = k.0;
            env = k.1;
            flags = k.2;
        }
        Ok((node, env, flags))
    }

    fn expand(&self, node: NodeId, env: &[Value], flags: u64, out: &mut Vec<Step>, depth: usize) -> Result<(), KernelError> {
        if depth > 10_000 {
            return Err(KernelError::UnguardedRecursion(self.equations[0].name.clone()));
        }
        match &self.nodes[node] {
            Node::Stop => {}
            Node::Prefix { label, semi, flag, next } => {
                let with = |b: bool| {
                    let f = match flag {
                        Some(bit) if b => flags | (1u64 << bit),
                        Some(bit) => flags & !(1u64 << bit),
                        None => flags,
                    };
                    self.settle(*next, env.to_vec(), f)
                };
                match semi {
                    None => out.push(Step::Normal(*label, with(true)?)),
                    Some(exc_label) => out.push(Step::Semi(*label, *exc_label, with(true)?, with(false)?)),
                }
            }
            Node::Choice(branches) => {
                for (g, body) in branches {
                    if let Some(g) = g {
                        match eval(g, env, flags).map_err(|m| self.eval_err(m))? {
                            Value::Bool(true) => {}
                            Value::Bool(false) => continue,
                            Value::Int(_) => return Err(self.eval_err("guard is not boolean".into())),
                        }
                    }
                    self.expand(*body, env, flags, out, depth + 1)?;
                }
            }
            Node::Invoke { .. } => {
                let (n, e, f) = self.settle(node, env.to_vec(), flags)?;
                self.expand(n, &e, f, out, depth + 1)?;
            }
        }
        Ok(())
    }
}
