//! The nonlinearity f(t, u) as an expression tree.
//!
//! Text is parsed by a small recursive-descent parser (see [`parse`]),
//! evaluated with IEEE arithmetic plus explicit domain checks, printed in a
//! fully parenthesized form that parses back to the same tree, and
//! differentiated symbolically in `u`.

mod diff;
mod parse;

use std::fmt;

use thiserror::Error;

pub use parse::{parse, ParseError, ParseErrorKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    T,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedConst {
    Pi,
    E,
}

impl NamedConst {
    pub fn value(self) -> f64 {
        match self {
            NamedConst::Pi => std::f64::consts::PI,
            NamedConst::E => std::f64::consts::E,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Abs,
    Sqrt,
    /// Appears in derivatives of `abs`; sign(0) = 0.
    Sign,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
            Func::Sign => "sign",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            "sign" => Func::Sign,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Const(NamedConst),
    Neg(Box<Expr>),
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
    },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("{op} is undefined at {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("{op} produced the non-finite value {value}")]
    NonFinite { op: &'static str, value: f64 },
}

fn finite(op: &'static str, value: f64) -> Result<f64, EvalError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvalError::NonFinite { op, value })
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse(text)
    }

    pub fn eval(&self, t: f64, u: f64) -> Result<f64, EvalError> {
        match self {
            Expr::Num(v) => Ok(*v),
            Expr::Var(Var::T) => Ok(t),
            Expr::Var(Var::U) => Ok(u),
            Expr::Const(c) => Ok(c.value()),
            Expr::Neg(a) => Ok(-a.eval(t, u)?),
            Expr::Binary { op, lhs, rhs } => {
                let a = lhs.eval(t, u)?;
                let b = rhs.eval(t, u)?;
                match op {
                    BinOp::Add => finite("+", a + b),
                    BinOp::Sub => finite("-", a - b),
                    BinOp::Mul => finite("*", a * b),
                    BinOp::Div => {
                        if b == 0.0 {
                            Err(EvalError::Domain { op: "/", arg: b })
                        } else {
                            finite("/", a / b)
                        }
                    }
                    BinOp::Pow => {
                        if a == 0.0 && b < 0.0 {
                            Err(EvalError::Domain { op: "^", arg: a })
                        } else if a < 0.0 && b.fract() != 0.0 {
                            Err(EvalError::Domain { op: "^", arg: a })
                        } else {
                            finite("^", a.powf(b))
                        }
                    }
                }
            }
            Expr::Call { func, arg } => {
                let x = arg.eval(t, u)?;
                match func {
                    Func::Exp => finite("exp", x.exp()),
                    Func::Ln => {
                        if x <= 0.0 {
                            Err(EvalError::Domain { op: "ln", arg: x })
                        } else {
                            Ok(x.ln())
                        }
                    }
                    Func::Sin => Ok(x.sin()),
                    Func::Cos => Ok(x.cos()),
                    Func::Abs => Ok(x.abs()),
                    Func::Sqrt => {
                        if x < 0.0 {
                            Err(EvalError::Domain { op: "sqrt", arg: x })
                        } else {
                            Ok(x.sqrt())
                        }
                    }
                    Func::Sign => Ok(if x > 0.0 {
                        1.0
                    } else if x < 0.0 {
                        -1.0
                    } else {
                        0.0
                    }),
                }
            }
        }
    }

    /// ∂/∂u of the expression.
    pub fn diff_u(&self) -> Expr {
        diff::diff_u(self)
    }

    pub fn depends_on_u(&self) -> bool {
        match self {
            Expr::Var(Var::U) => true,
            Expr::Num(_) | Expr::Var(Var::T) | Expr::Const(_) => false,
            Expr::Neg(a) | Expr::Call { arg: a, .. } => a.depends_on_u(),
            Expr::Binary { lhs, rhs, .. } => lhs.depends_on_u() || rhs.depends_on_u(),
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Var(_) | Expr::Const(_) => 1,
            Expr::Neg(a) | Expr::Call { arg: a, .. } => 1 + a.size(),
            Expr::Binary { lhs, rhs, .. } => 1 + lhs.size() + rhs.size(),
        }
    }
}

/// Fully parenthesized; parses back to an identically evaluating tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if v.is_sign_negative() => write!(f, "(-{:?})", -v),
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Var(Var::T) => f.write_str("t"),
            Expr::Var(Var::U) => f.write_str("u"),
            Expr::Const(NamedConst::Pi) => f.write_str("pi"),
            Expr::Const(NamedConst::E) => f.write_str("e"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary { op, lhs, rhs } => write!(f, "({lhs} {} {rhs})", op.symbol()),
            Expr::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ev(text: &str, t: f64, u: f64) -> f64 {
        Expr::parse(text).unwrap().eval(t, u).unwrap()
    }

    #[test]
    fn example_nonlinearities() {
        assert_eq!(ev("t + abs(cos(u))", 0.0, 0.0), 1.0);
        assert_eq!(ev("6528e9 * u^2 * exp(1-u)", 0.3, 1.0), 6.528e12);
        assert_abs_diff_eq!(ev("(1+t)*exp(u)", 1.0, 1.0), 2.0 * std::f64::consts::E, epsilon = 1e-15);
        let v = ev("u^2 * exp(u) * ln(1 + t + u)", 0.5, 2.0);
        assert_abs_diff_eq!(v, 4.0 * 2f64.exp() * 3.5f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(ev("2^3^2", 0.0, 0.0), 512.0);
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(ev("-2^2", 0.0, 0.0), -4.0);
        assert_eq!(ev("2^-1", 0.0, 0.0), 0.5);
        assert_eq!(ev("--3", 0.0, 0.0), 3.0);
        assert_eq!(ev("(-2)^2", 0.0, 0.0), 4.0);
    }

    #[test]
    fn constants() {
        assert_eq!(ev("pi", 0.0, 0.0), std::f64::consts::PI);
        assert_eq!(ev("e", 0.0, 0.0), std::f64::consts::E);
        assert_eq!(ev("2*e", 0.0, 0.0), 2.0 * std::f64::consts::E);
    }

    #[test]
    fn domain_errors() {
        let domain = |s: &str, u: f64| {
            matches!(
                Expr::parse(s).unwrap().eval(0.0, u),
                Err(EvalError::Domain { .. })
            )
        };
        assert!(domain("ln(u)", 0.0));
        assert!(domain("ln(u)", -1.0));
        assert!(domain("sqrt(u)", -1e-3));
        assert!(domain("u^(-1)", 0.0));
        assert!(domain("u^0.5", -2.0));
        assert!(domain("1/u", 0.0));
    }

    #[test]
    fn overflow_is_non_finite() {
        let err = Expr::parse("exp(u)").unwrap().eval(0.0, 1000.0).unwrap_err();
        assert!(matches!(err, EvalError::NonFinite { op: "exp", .. }));
        let err = Expr::parse("u*u").unwrap().eval(0.0, 1e200).unwrap_err();
        assert!(matches!(err, EvalError::NonFinite { .. }));
    }

    #[test]
    fn sign_convention() {
        assert_eq!(ev("sign(u)", 0.0, 0.0), 0.0);
        assert_eq!(ev("sign(u)", 0.0, -3.0), -1.0);
        assert_eq!(ev("sign(u)", 0.0, 0.1), 1.0);
    }

    #[test]
    fn display_is_fully_parenthesized() {
        let e = Expr::parse("1 + 2 * u ^ 2").unwrap();
        assert_eq!(e.to_string(), "(1.0 + (2.0 * (u ^ 2.0)))");
        let e = Expr::parse("6528e9*u").unwrap();
        assert_eq!(Expr::parse(&e.to_string()).unwrap(), e);
        let tiny = Expr::Num(-1e-300);
        assert_eq!(Expr::parse(&tiny.to_string()).unwrap().eval(0.0, 0.0).unwrap(), -1e-300);
    }

    #[test]
    fn depends_on_u() {
        assert!(Expr::parse("t + sin(u)").unwrap().depends_on_u());
        assert!(!Expr::parse("t^2 + pi").unwrap().depends_on_u());
    }
}
