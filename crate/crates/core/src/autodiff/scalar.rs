use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Jet3;

/// Arithmetic and transcendental interface shared by plain reals and jets.
///
/// Expressions and the dense linear algebra in `geometry` are generic over
/// this trait, so the same code path evaluates values or propagates
/// derivatives.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    fn value(&self) -> f64;
    fn powi(self, n: i32) -> Self;
    fn powf(self, c: f64) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn tan(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn abs(self) -> Self;

    fn zero() -> Self {
        Self::constant(0.0)
    }
}

impl Scalar for f64 {
    fn constant(c: f64) -> Self {
        c
    }
    fn value(&self) -> f64 {
        *self
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, c: f64) -> Self {
        f64::powf(self, c)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn tan(self) -> Self {
        f64::tan(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
}

impl Scalar for Jet3 {
    fn constant(c: f64) -> Self {
        Jet3::constant(c)
    }
    fn value(&self) -> f64 {
        Jet3::value(self)
    }
    fn powi(self, n: i32) -> Self {
        Jet3::powi(&self, n)
    }
    fn powf(self, c: f64) -> Self {
        Jet3::powf(&self, c)
    }
    fn exp(self) -> Self {
        Jet3::exp(&self)
    }
    fn ln(self) -> Self {
        Jet3::ln(&self)
    }
    fn sqrt(self) -> Self {
        Jet3::sqrt(&self)
    }
    fn sin(self) -> Self {
        Jet3::sin(&self)
    }
    fn cos(self) -> Self {
        Jet3::cos(&self)
    }
    fn tan(self) -> Self {
        Jet3::tan(&self)
    }
    fn sinh(self) -> Self {
        Jet3::sinh(&self)
    }
    fn cosh(self) -> Self {
        Jet3::cosh(&self)
    }
    fn tanh(self) -> Self {
        Jet3::tanh(&self)
    }
    fn abs(self) -> Self {
        Jet3::abs(&self)
    }
}
