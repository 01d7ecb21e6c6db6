use std::collections::BTreeSet;
use std::fmt;

/// One-argument functions of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 10] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Ln,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
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
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Parsed model expression. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Const(f64),
    Var(String),
    Neg(Box<Expression>),
    Call(Func, Box<Expression>),
    Binary(BinOp, Box<Expression>, Box<Expression>),
}

// Printing precedence levels.
const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_ATOM: u8 = 5;

impl Expression {
    pub fn constant(c: f64) -> Self {
        Expression::Const(c)
    }

    pub fn var(name: impl Into<String>) -> Self {
        Expression::Var(name.into())
    }

    pub fn call(f: Func, arg: Expression) -> Self {
        Expression::Call(f, Box::new(arg))
    }

    pub fn binary(op: BinOp, lhs: Expression, rhs: Expression) -> Self {
        Expression::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn add(self, rhs: Expression) -> Self {
        Self::binary(BinOp::Add, self, rhs)
    }

    pub fn sub(self, rhs: Expression) -> Self {
        Self::binary(BinOp::Sub, self, rhs)
    }

    pub fn mul(self, rhs: Expression) -> Self {
        Self::binary(BinOp::Mul, self, rhs)
    }

    pub fn div(self, rhs: Expression) -> Self {
        Self::binary(BinOp::Div, self, rhs)
    }

    pub fn pow(self, rhs: Expression) -> Self {
        Self::binary(BinOp::Pow, self, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Expression::Neg(Box::new(self))
    }

    /// Names of every variable occurring in the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expression::Const(_) => {}
            Expression::Var(v) => {
                out.insert(v.clone());
            }
            Expression::Neg(a) | Expression::Call(_, a) => a.collect_vars(out),
            Expression::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Replaces every occurrence of `name` by `with`.
    pub fn substitute(&self, name: &str, with: &Expression) -> Expression {
        match self {
            Expression::Var(v) if v == name => with.clone(),
            Expression::Const(_) | Expression::Var(_) => self.clone(),
            Expression::Neg(a) => a.substitute(name, with).neg(),
            Expression::Call(f, a) => Expression::call(*f, a.substitute(name, with)),
            Expression::Binary(op, a, b) => {
                Expression::binary(*op, a.substitute(name, with), b.substitute(name, with))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expression::Const(c) if c.is_sign_negative() => PREC_UNARY,
            Expression::Const(_) | Expression::Var(_) | Expression::Call(..) => PREC_ATOM,
            Expression::Neg(_) => PREC_UNARY,
            Expression::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_SUM,
            Expression::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_PRODUCT,
            Expression::Binary(BinOp::Pow, ..) => PREC_UNARY + 1,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Const(c) => write!(f, "{c}"),
            Expression::Var(v) => write!(f, "{v}"),
            Expression::Neg(a) => {
                write!(f, "-")?;
                a.write_child(f, PREC_UNARY)
            }
            Expression::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expression::Binary(op, a, b) => {
                let (left, right) = match op {
                    BinOp::Add | BinOp::Sub => (PREC_SUM, PREC_PRODUCT),
                    BinOp::Mul | BinOp::Div => (PREC_PRODUCT, PREC_UNARY),
                    // base must be an atom; the exponent may be any unary
                    BinOp::Pow => (PREC_ATOM, PREC_UNARY),
                };
                a.write_child(f, left)?;
                write!(f, "{}", op.symbol())?;
                b.write_child(f, right)
            }
        }
    }
}
