use std::collections::{BTreeMap, HashMap};

use super::ast::{BinOp, Expression, Func};
use crate::autodiff::Scalar;

/// Source of variable values during evaluation.
pub trait Bindings<S> {
    fn lookup(&self, name: &str) -> Option<S>;
}

impl<S: Copy> Bindings<S> for HashMap<String, S> {
    fn lookup(&self, name: &str) -> Option<S> {
        self.get(name).copied()
    }
}

impl<S: Copy> Bindings<S> for BTreeMap<String, S> {
    fn lookup(&self, name: &str) -> Option<S> {
        self.get(name).copied()
    }
}

impl<S: Copy, K: AsRef<str>> Bindings<S> for [(K, S)] {
    fn lookup(&self, name: &str) -> Option<S> {
        self.iter().find(|(k, _)| k.as_ref() == name).map(|(_, v)| *v)
    }
}

impl<S: Copy, K: AsRef<str>, const N: usize> Bindings<S> for [(K, S); N] {
    fn lookup(&self, name: &str) -> Option<S> {
        self.as_slice().lookup(name)
    }
}

/// Parallel slices of chart variable names and values.
#[derive(Debug, Clone, Copy)]
pub struct Chart<'a, S> {
    pub names: &'a [String],
    pub values: &'a [S],
}

impl<'a, S: Copy> Bindings<S> for Chart<'a, S> {
    fn lookup(&self, name: &str) -> Option<S> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.values[i])
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("domain error in `{subexpr}`: {reason} (argument value {value})")]
    Domain {
        subexpr: String,
        reason: &'static str,
        value: f64,
    },
}

fn domain(e: &Expression, reason: &'static str, value: f64) -> EvalError {
    EvalError::Domain {
        subexpr: e.to_string(),
        reason,
        value,
    }
}

impl Expression {
    /// Evaluates over any [`Scalar`]; with jets, derivatives propagate
    /// through every node.
    pub fn eval<S, B>(&self, bindings: &B) -> Result<S, EvalError>
    where
        S: Scalar,
        B: Bindings<S> + ?Sized,
    {
        match self {
            Expression::Const(c) => Ok(S::constant(*c)),
            Expression::Var(name) => bindings
                .lookup(name)
                .ok_or_else(|| EvalError::Unbound(name.clone())),
            Expression::Neg(a) => Ok(-a.eval(bindings)?),
            Expression::Call(func, a) => {
                let x: S = a.eval(bindings)?;
                let v = x.value();
                Ok(match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Tan => {
                        if v.cos() == 0.0 {
                            return Err(domain(self, "tan at a pole", v));
                        }
                        x.tan()
                    }
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Exp => x.exp(),
                    Func::Ln => {
                        if !(v > 0.0) {
                            return Err(domain(self, "logarithm of a nonpositive value", v));
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if v < 0.0 || v.is_nan() {
                            return Err(domain(self, "square root of a negative value", v));
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                })
            }
            Expression::Binary(op, a, b) => {
                if *op == BinOp::Pow {
                    return self.eval_pow(a, b, bindings);
                }
                let x: S = a.eval(bindings)?;
                let y: S = b.eval(bindings)?;
                Ok(match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.value() == 0.0 {
                            return Err(domain(self, "division by zero", 0.0));
                        }
                        x / y
                    }
                    BinOp::Pow => unreachable!(),
                })
            }
        }
    }

    fn eval_pow<S, B>(&self, base: &Expression, exp: &Expression, bindings: &B) -> Result<S, EvalError>
    where
        S: Scalar,
        B: Bindings<S> + ?Sized,
    {
        let x: S = base.eval(bindings)?;
        let v = x.value();
        if exp.free_vars().is_empty() {
            // constant exponent: integer powers accept any base
            let c: f64 = exp.eval(&[] as &[(&str, f64)])?;
            if c.fract() == 0.0 && c.abs() <= i32::MAX as f64 {
                if v == 0.0 && c < 0.0 {
                    return Err(domain(self, "zero raised to a negative power", v));
                }
                return Ok(x.powi(c as i32));
            }
            if v < 0.0 {
                return Err(domain(self, "negative base with non-integer exponent", v));
            }
            return Ok(x.powf(c));
        }
        if !(v > 0.0) {
            return Err(domain(self, "variable exponent needs a positive base", v));
        }
        let y: S = exp.eval(bindings)?;
        Ok((y * x.ln()).exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{fd_partial, FdScheme, Jet3};
    use crate::expr::parse;

    #[test]
    fn plain_values() {
        let none: [(&str, f64); 0] = [];
        assert_eq!(parse("2^3").unwrap().eval(&none), Ok(8.0));
        assert_eq!(parse("2*ln(y)").unwrap().eval(&[("y", 1.0)]), Ok(0.0));
        assert_eq!(parse("(-2)^3").unwrap().eval(&none), Ok(-8.0));
        assert_eq!(parse("-2^2").unwrap().eval(&none), Ok(-4.0));
    }

    #[test]
    fn log_jet_matches_fd() {
        let e = parse("2*ln(y)").unwrap();
        let y = Jet3::seed(&[2.0]).unwrap()[0];
        let j: Jet3 = e.eval(&[("y", y)]).unwrap();
        assert!((j.value() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((j.d(0) - 1.0).abs() < 1e-15);
        assert!((j.dd(0, 0) + 0.5).abs() < 1e-15);
        assert!((j.ddd(0, 0, 0) - 0.5).abs() < 1e-15);
        let f = |p: &[f64]| e.eval(&[("y", p[0])]).unwrap_or(f64::NAN);
        let s = FdScheme::default();
        for (dirs, exact) in [(&[0][..], 1.0), (&[0, 0][..], -0.5), (&[0, 0, 0][..], 0.5)] {
            let fd = fd_partial(f, &[2.0], dirs, &s).unwrap();
            assert!((fd - exact).abs() < 1e-4, "{dirs:?}: {fd}");
        }
    }

    #[test]
    fn domain_errors_name_subexpression() {
        let e = parse("1 + ln(y - 1)").unwrap();
        match e.eval(&[("y", 0.5)]) {
            Err(EvalError::Domain { subexpr, .. }) => assert_eq!(subexpr, "ln(y-1)"),
            other => panic!("{other:?}"),
        }
        let none: [(&str, f64); 0] = [];
        assert!(matches!(
            parse("1/(2-2)").unwrap().eval(&none),
            Err(EvalError::Domain { reason: "division by zero", .. })
        ));
        assert!(parse("(-2)^0.5").unwrap().eval(&none).is_err());
        assert!(parse("sqrt(-1)").unwrap().eval(&none).is_err());
        assert_eq!(
            parse("x+1").unwrap().eval(&none),
            Err(EvalError::Unbound("x".into()))
        );
    }

    #[test]
    fn variable_exponent() {
        let e = parse("x^y").unwrap();
        let v: f64 = e.eval(&[("x", 2.0), ("y", 0.5)]).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert!(e.eval(&[("x", -2.0), ("y", 2.0)]).is_err());
    }

    #[test]
    fn deterministic() {
        let e = parse("sin(x)*exp(x^2)/(1+x)").unwrap();
        let a: f64 = e.eval(&[("x", 0.3)]).unwrap();
        let b: f64 = e.eval(&[("x", 0.3)]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
