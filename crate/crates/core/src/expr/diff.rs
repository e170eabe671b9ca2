use super::{BinOp, Expr, Func, Var};

pub(super) fn diff_u(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Const(_) | Expr::Var(Var::T) => num(0.0),
        Expr::Var(Var::U) => num(1.0),
        Expr::Neg(a) => neg(diff_u(a)),
        Expr::Binary { op, lhs, rhs } => {
            let (a, b) = (lhs.as_ref(), rhs.as_ref());
            match op {
                BinOp::Add => add(diff_u(a), diff_u(b)),
                BinOp::Sub => sub(diff_u(a), diff_u(b)),
                BinOp::Mul => add(mul(diff_u(a), b.clone()), mul(a.clone(), diff_u(b))),
                BinOp::Div => {
                    if b.depends_on_u() {
                        div(
                            sub(mul(diff_u(a), b.clone()), mul(a.clone(), diff_u(b))),
                            pow(b.clone(), num(2.0)),
                        )
                    } else {
                        div(diff_u(a), b.clone())
                    }
                }
                BinOp::Pow => match (a.depends_on_u(), b.depends_on_u()) {
                    (_, false) => mul(
                        mul(b.clone(), pow(a.clone(), sub(b.clone(), num(1.0)))),
                        diff_u(a),
                    ),
                    (false, true) => mul(mul(e.clone(), call(Func::Ln, a.clone())), diff_u(b)),
                    (true, true) => mul(
                        e.clone(),
                        add(
                            mul(diff_u(b), call(Func::Ln, a.clone())),
                            div(mul(b.clone(), diff_u(a)), a.clone()),
                        ),
                    ),
                },
            }
        }
        Expr::Call { func, arg } => {
            let inner = diff_u(arg);
            let outer = match func {
                Func::Exp => e.clone(),
                Func::Ln => div(num(1.0), arg.as_ref().clone()),
                Func::Sin => call(Func::Cos, arg.as_ref().clone()),
                Func::Cos => neg(call(Func::Sin, arg.as_ref().clone())),
                Func::Abs => call(Func::Sign, arg.as_ref().clone()),
                Func::Sqrt => div(num(0.5), e.clone()),
                Func::Sign => return num(0.0),
            };
            mul(outer, inner)
        }
    }
}

/// Negative constants take the parser's shape, `Neg(Num)`.
fn num(v: f64) -> Expr {
    if v < 0.0 {
        Expr::Neg(Box::new(Expr::Num(-v)))
    } else {
        Expr::Num(v.abs())
    }
}

fn as_num(e: &Expr) -> Option<f64> {
    match e {
        Expr::Num(v) => Some(*v),
        Expr::Neg(inner) => match **inner {
            Expr::Num(v) => Some(-v),
            _ => None,
        },
        _ => None,
    }
}

fn fold(op: BinOp, a: &Expr, b: &Expr) -> Option<Expr> {
    let (x, y) = (as_num(a)?, as_num(b)?);
    let v = match op {
        BinOp::Add => x + y,
        BinOp::Sub => x - y,
        BinOp::Mul => x * y,
        BinOp::Div if y != 0.0 => x / y,
        BinOp::Pow if x > 0.0 => x.powf(y),
        _ => return None,
    };
    v.is_finite().then_some(num(v))
}

fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
    Expr::Binary {
        op,
        lhs: Box::new(a),
        rhs: Box::new(b),
    }
}

fn call(func: Func, arg: Expr) -> Expr {
    Expr::Call {
        func,
        arg: Box::new(arg),
    }
}

fn neg(a: Expr) -> Expr {
    match a {
        Expr::Num(v) => num(-v),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if let Some(v) = fold(BinOp::Add, &a, &b) {
        return v;
    }
    match (as_num(&a), as_num(&b)) {
        (Some(z), _) if z == 0.0 => b,
        (_, Some(z)) if z == 0.0 => a,
        _ => bin(BinOp::Add, a, b),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    if let Some(v) = fold(BinOp::Sub, &a, &b) {
        return v;
    }
    match (as_num(&a), as_num(&b)) {
        (_, Some(z)) if z == 0.0 => a,
        (Some(z), _) if z == 0.0 => neg(b),
        _ => bin(BinOp::Sub, a, b),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    if let Some(v) = fold(BinOp::Mul, &a, &b) {
        return v;
    }
    match (as_num(&a), as_num(&b)) {
        (Some(z), _) if z == 0.0 => num(0.0),
        (_, Some(z)) if z == 0.0 => num(0.0),
        (Some(o), _) if o == 1.0 => b,
        (_, Some(o)) if o == 1.0 => a,
        _ => bin(BinOp::Mul, a, b),
    }
}

fn div(a: Expr, b: Expr) -> Expr {
    if let Some(v) = fold(BinOp::Div, &a, &b) {
        return v;
    }
    match (as_num(&a), as_num(&b)) {
        (Some(z), _) if z == 0.0 => num(0.0),
        (_, Some(o)) if o == 1.0 => a,
        _ => bin(BinOp::Div, a, b),
    }
}

fn pow(a: Expr, b: Expr) -> Expr {
    if let Some(v) = fold(BinOp::Pow, &a, &b) {
        return v;
    }
    match as_num(&b) {
        Some(o) if o == 1.0 => a,
        Some(z) if z == 0.0 => num(1.0),
        _ => bin(BinOp::Pow, a, b),
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::Expr;
    use approx::assert_abs_diff_eq;

    fn d(text: &str, t: f64, u: f64) -> f64 {
        Expr::parse(text).unwrap().diff_u().eval(t, u).unwrap()
    }

    #[test]
    fn power_rule() {
        assert_eq!(d("u^2", 0.0, 3.0), 6.0);
        assert_eq!(d("u^3 + 2*u", 0.0, 1.0), 5.0);
    }

    #[test]
    fn abs_cos_at_zero() {
        assert_eq!(d("t + abs(cos(u))", 0.4, 0.0), 0.0);
        assert_eq!(d("abs(u)", 0.0, 0.0), 0.0);
        assert_eq!(d("abs(u)", 0.0, -2.0), -1.0);
    }

    #[test]
    fn constant_in_u() {
        let e = Expr::parse("t^2 + sin(t)").unwrap().diff_u();
        assert_eq!(e, Expr::Num(0.0));
    }

    #[test]
    fn linear_simplifies() {
        assert_eq!(Expr::parse("u").unwrap().diff_u(), Expr::Num(1.0));
        assert_eq!(Expr::parse("3*u").unwrap().diff_u(), Expr::Num(3.0));
    }

    #[test]
    fn chain_rules() {
        let (t, u) = (0.3, 0.7);
        assert_abs_diff_eq!(d("exp(2*u)", t, u), 2.0 * (2.0 * u).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(d("ln(1+t+u)", t, u), 1.0 / (1.0 + t + u), epsilon = 1e-14);
        assert_abs_diff_eq!(d("sqrt(u)", t, u), 0.5 / u.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(d("sin(u)", t, u), u.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(d("2^u", t, u), 2f64.powf(u) * 2f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(
            d("u^u", t, u),
            u.powf(u) * (u.ln() + 1.0),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(d("1/u", t, u), -1.0 / (u * u), epsilon = 1e-13);
        assert_abs_diff_eq!(d("u/(1+t)", t, u), 1.0 / (1.0 + t), epsilon = 1e-14);
    }
}
