//! The model expression language: infix arithmetic over real variables with
//! a fixed set of one-argument functions. Expressions evaluate over any
//! [`Scalar`](crate::autodiff::Scalar), which is how jets flow through
//! user-declared warping functions, metric entries and integrability data.

mod ast;
mod eval;
mod parser;

pub use ast::{BinOp, Expression, Func};
pub use eval::{Bindings, Chart, EvalError};
pub use parser::{parse, ParseError, ParseErrorKind};
