//! Abstract syntax of PADL architectural descriptions.

use std::fmt;

/// Source position (1-based line and column).
///
/// Spans never participate in structural equality, so an AST re-parsed
/// from pretty-printed text compares equal to the original.
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Type {
    Bool,
    /// Integer restricted to the inclusive range `lo..=hi`.
    Int { lo: i64, hi: i64 },
}

impl Type {
    pub fn admits(&self, value: &Value) -> bool {
        match (self, value) {
            (Type::Bool, Value::Bool(_)) => true,
            (Type::Int { lo, hi }, Value::Int(v)) => lo <= v && v <= hi,
            _ => false,
        }
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Type::Bool)
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => write!(f, "boolean"),
            Type::Int { lo, hi } => write!(f, "int({lo}..{hi})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: Type,
    pub default: Option<Expr>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::Add => "+",
            BinOp::Sub => "-",
        }
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Bool(bool),
    Int(i64),
    Var(String),
    /// The implicit `x.success` variable of a semi-synchronous interaction `x`.
    Success(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    /// Calls `f` on every `x.success` reference in the expression.
    pub fn visit_success(&self, f: &mut impl FnMut(&str)) {
        match self {
            Expr::Success(x) => f(x),
            Expr::Unary(_, e) => e.visit_success(f),
            Expr::Binary(_, l, r) => {
                l.visit_success(f);
                r.visit_success(f);
            }
            Expr::Bool(_) | Expr::Int(_) | Expr::Var(_) => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Process {
    Stop,
    Invoke { equation: String, args: Vec<Expr>, span: Span },
    Prefix { action: String, then: Box<Process>, span: Span },
    Choice(Vec<Branch>),
}

impl Process {
    pub fn prefix(action: impl Into<String>, then: Process) -> Process {
        Process::Prefix { action: action.into(), then: Box::new(then), span: Span::default() }
    }

    pub fn invoke(equation: impl Into<String>, args: Vec<Expr>) -> Process {
        Process::Invoke { equation: equation.into(), args, span: Span::default() }
    }

    /// Calls `f` on every action occurring in the term.
    pub fn visit_actions(&self, f: &mut impl FnMut(&str)) {
        match self {
            Process::Stop | Process::Invoke { .. } => {}
            Process::Prefix { action, then, .. } => {
                f(action);
                then.visit_actions(f);
            }
            Process::Choice(branches) => {
                for b in branches {
                    b.body.visit_actions(f);
                }
            }
        }
    }

    /// Calls `f` on every expression (guards and invocation arguments).
    pub fn visit_exprs(&self, f: &mut impl FnMut(&Expr)) {
        match self {
            Process::Stop => {}
            Process::Invoke { args, .. } => args.iter().for_each(&mut *f),
            Process::Prefix { then, .. } => then.visit_exprs(f),
            Process::Choice(branches) => {
                for b in branches {
                    if let Some(g) = &b.guard {
                        f(g);
                    }
                    b.body.visit_exprs(f);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub guard: Option<Expr>,
    pub body: Process,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub name: String,
    pub params: Vec<Param>,
    pub body: Process,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Multiplicity {
    Uni,
    And,
    Or,
}

impl Multiplicity {
    pub fn keyword(self) -> &'static str {
        match self {
            Multiplicity::Uni => "UNI",
            Multiplicity::And => "AND",
            Multiplicity::Or => "OR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Synchronicity {
    Sync,
    Ssync,
    Async,
}

impl Synchronicity {
    pub fn keyword(self) -> &'static str {
        match self {
            Synchronicity::Sync => "SYNC",
            Synchronicity::Ssync => "SSYNC",
            Synchronicity::Async => "ASYNC",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionDecl {
    pub name: String,
    pub direction: Direction,
    pub multiplicity: Multiplicity,
    pub synchronicity: Synchronicity,
    pub dep_on: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AetDef {
    pub name: String,
    pub params: Vec<Param>,
    pub equations: Vec<Equation>,
    pub interactions: Vec<InteractionDecl>,
    pub span: Span,
}

impl AetDef {
    pub fn interaction(&self, name: &str) -> Option<&InteractionDecl> {
        self.interactions.iter().find(|i| i.name == name)
    }

    pub fn equation(&self, name: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub aet: String,
    pub args: Vec<Expr>,
    pub span: Span,
}

/// A dotted reference `AEI.interaction`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Endpoint {
    pub aei: String,
    pub interaction: String,
}

impl Endpoint {
    pub fn new(aei: impl Into<String>, interaction: impl Into<String>) -> Self {
        Endpoint { aei: aei.into(), interaction: interaction.into() }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.aei, self.interaction)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Attachment {
    pub from: Endpoint,
    pub to: Endpoint,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchInteraction {
    pub endpoint: Endpoint,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchiDescription {
    pub name: String,
    pub params: Vec<Param>,
    pub aets: Vec<AetDef>,
    pub instances: Vec<Instance>,
    pub archi_interactions: Vec<ArchInteraction>,
    pub attachments: Vec<Attachment>,
}

impl ArchiDescription {
    pub fn aet(&self, name: &str) -> Option<&AetDef> {
        self.aets.iter().find(|a| a.name == name)
    }

    pub fn instance(&self, name: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.name == name)
    }
}
