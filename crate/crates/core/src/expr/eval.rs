use super::{BinOp, Bindings, Func, Node};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    /// The expression is undefined at the given point; `subexpr` is the
    /// offending node printed in re-parseable form.
    #[error("{reason} in `{subexpr}`")]
    Domain {
        subexpr: String,
        reason: &'static str,
    },
}

fn domain(node: &Node, reason: &'static str) -> EvalError {
    EvalError::Domain {
        subexpr: node.to_string(),
        reason,
    }
}

pub(super) fn eval<B: Bindings + ?Sized>(node: &Node, env: &B) -> Result<f64, EvalError> {
    let value = match node {
        Node::Num(v) => *v,
        Node::Pi => std::f64::consts::PI,
        Node::Var(name) => env
            .lookup(name)
            .ok_or_else(|| EvalError::Unbound(name.clone()))?,
        Node::Neg(inner) => -eval(inner, env)?,
        Node::Binary(op, lhs, rhs) => {
            let a = eval(lhs, env)?;
            let b = eval(rhs, env)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == 0.0 {
                        return Err(domain(node, "division by zero"));
                    }
                    a / b
                }
                BinOp::Pow => {
                    if a == 0.0 && b < 0.0 {
                        return Err(domain(node, "zero raised to a negative power"));
                    }
                    if a < 0.0 && b.fract() != 0.0 {
                        return Err(domain(node, "negative base with non-integer exponent"));
                    }
                    pow(a, b)
                }
            }
        }
        Node::Call(func, arg) => {
            let a = eval(arg, env)?;
            match func {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Exp => a.exp(),
                Func::Ln => {
                    if a <= 0.0 {
                        return Err(domain(node, "logarithm of a non-positive number"));
                    }
                    a.ln()
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        return Err(domain(node, "square root of a negative number"));
                    }
                    a.sqrt()
                }
                Func::Abs => a.abs(),
            }
        }
    };
    if value.is_nan() {
        return Err(domain(node, "undefined result"));
    }
    Ok(value)
}

/// Small integer exponents use repeated multiplication so that `y^2`
/// is bit-identical to `y*y`.
fn pow(base: f64, exp: f64) -> f64 {
    if exp.fract() == 0.0 && exp.abs() <= 64.0 {
        base.powi(exp as i32)
    } else {
        base.powf(exp)
    }
}
