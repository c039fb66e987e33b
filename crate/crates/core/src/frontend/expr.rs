//! Static typing and evaluation of guard and argument expressions.

use super::ast::{BinOp, Expr, UnOp, Value};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Bool,
    Int,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("ill-typed expression `{0}`")]
    Type(String),
    #[error("integer overflow")]
    Overflow,
}

/// Variable lookup used during evaluation.
pub trait Scope {
    fn var(&self, name: &str) -> Option<Value>;
    fn success(&self, interaction: &str) -> Option<Value>;
}

/// Scope with no variables; used for constant expressions.
pub struct Empty;

impl Scope for Empty {
    fn var(&self, _: &str) -> Option<Value> {
        None
    }
    fn success(&self, _: &str) -> Option<Value> {
        None
    }
}

impl<F: Fn(&str) -> Option<Value>> Scope for F {
    fn var(&self, name: &str) -> Option<Value> {
        self(name)
    }
    fn success(&self, _: &str) -> Option<Value> {
        None
    }
}

pub fn eval(e: &Expr, scope: &impl Scope) -> Result<Value, EvalError> {
    match e {
        Expr::Bool(b) => Ok(Value::Bool(*b)),
        Expr::Int(i) => Ok(Value::Int(*i)),
        Expr::Var(v) => scope.var(v).ok_or_else(|| EvalError::Unbound(v.clone())),
        Expr::Success(x) => scope.success(x).ok_or_else(|| EvalError::Unbound(format!("{x}.success"))),
        Expr::Unary(op, inner) => {
            let v = eval(inner, scope)?;
            match (op, v) {
                (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                (UnOp::Neg, Value::Int(i)) => i.checked_neg().map(Value::Int).ok_or(EvalError::Overflow),
                _ => Err(EvalError::Type(super::pretty::expr_to_string(e))),
            }
        }
        Expr::Binary(op, l, r) => {
            let lv = eval(l, scope)?;
            // Short-circuit boolean connectives.
            match (op, lv) {
                (BinOp::And, Value::Bool(false)) => return Ok(Value::Bool(false)),
                (BinOp::Or, Value::Bool(true)) => return Ok(Value::Bool(true)),
                _ => {}
            }
            let rv = eval(r, scope)?;
            apply(*op, lv, rv).ok_or_else(|| EvalError::Type(super::pretty::expr_to_string(e)))?
        }
    }
}

/// Applies a binary operator; `None` on a type mismatch.
pub fn apply(op: BinOp, l: Value, r: Value) -> Option<Result<Value, EvalError>> {
    use Value::*;
    Some(match (op, l, r) {
        (BinOp::And, Bool(a), Bool(b)) => Ok(Bool(a && b)),
        (BinOp::Or, Bool(a), Bool(b)) => Ok(Bool(a || b)),
        (BinOp::Eq, a, b) if same_kind(a, b) => Ok(Bool(a == b)),
        (BinOp::Ne, a, b) if same_kind(a, b) => Ok(Bool(a != b)),
        (BinOp::Lt, Int(a), Int(b)) => Ok(Bool(a < b)),
        (BinOp::Le, Int(a), Int(b)) => Ok(Bool(a <= b)),
        (BinOp::Gt, Int(a), Int(b)) => Ok(Bool(a > b)),
        (BinOp::Ge, Int(a), Int(b)) => Ok(Bool(a >= b)),
        (BinOp::Add, Int(a), Int(b)) => a.checked_add(b).map(Int).ok_or(EvalError::Overflow),
        (BinOp::Sub, Int(a), Int(b)) => a.checked_sub(b).map(Int).ok_or(EvalError::Overflow),
        _ => return None,
    })
}

fn same_kind(a: Value, b: Value) -> bool {
    matches!((a, b), (Value::Bool(_), Value::Bool(_)) | (Value::Int(_), Value::Int(_)))
}

/// Infers the kind of `e`. `lookup` yields the kind of a variable, and
/// `success_ok` reports whether `x.success` may be read. On failure the
/// offending sub-expression is described in the error text.
pub fn kind_of(
    e: &Expr,
    lookup: &dyn Fn(&str) -> Option<Kind>,
    success_ok: &dyn Fn(&str) -> bool,
) -> Result<Kind, KindError> {
    match e {
        Expr::Bool(_) => Ok(Kind::Bool),
        Expr::Int(_) => Ok(Kind::Int),
        Expr::Var(v) => lookup(v).ok_or_else(|| KindError::UnknownVar(v.clone())),
        Expr::Success(x) => {
            if success_ok(x) {
                Ok(Kind::Bool)
            } else {
                Err(KindError::Success(x.clone()))
            }
        }
        Expr::Unary(op, inner) => {
            let k = kind_of(inner, lookup, success_ok)?;
            let want = if *op == UnOp::Not { Kind::Bool } else { Kind::Int };
            if k == want {
                Ok(k)
            } else {
                Err(KindError::Mismatch(super::pretty::expr_to_string(e)))
            }
        }
        Expr::Binary(op, l, r) => {
            let lk = kind_of(l, lookup, success_ok)?;
            let rk = kind_of(r, lookup, success_ok)?;
            let mismatch = || Err(KindError::Mismatch(super::pretty::expr_to_string(e)));
            match op {
                BinOp::And | BinOp::Or if lk == Kind::Bool && rk == Kind::Bool => Ok(Kind::Bool),
                BinOp::Eq | BinOp::Ne if lk == rk => Ok(Kind::Bool),
                BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge if lk == Kind::Int && rk == Kind::Int => {
                    Ok(Kind::Bool)
                }
                BinOp::Add | BinOp::Sub if lk == Kind::Int && rk == Kind::Int => Ok(Kind::Int),
                _ => mismatch(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KindError {
    UnknownVar(String),
    Success(String),
    Mismatch(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parser::parse_expr;

    #[test]
    fn evaluates_arithmetic_and_logic() {
        let scope = |n: &str| if n == "n" { Some(Value::Int(2)) } else { None };
        let e = parse_expr("n + 1 > 2 and not (n = 3)").unwrap();
        assert_eq!(eval(&e, &scope).unwrap(), Value::Bool(true));
    }

    #[test]
    fn short_circuit_skips_unbound() {
        let e = parse_expr("false and x").unwrap();
        assert_eq!(eval(&e, &Empty).unwrap(), Value::Bool(false));
    }

    #[test]
    fn type_errors_are_detected() {
        let e = parse_expr("1 + true").unwrap();
        assert!(matches!(eval(&e, &Empty), Err(EvalError::Type(_))));
        let k = kind_of(&e, &|_| None, &|_| false);
        assert!(matches!(k, Err(KindError::Mismatch(_))));
    }
}
