//! Truncated third-order multivariate Taylor scalar.
//!
//! A [`Jet3`] carries a value together with every partial derivative of
//! total order at most three in up to [`MAX_DIRECTIONS`] directions. Mixed
//! partials are stored once per sorted multi-index, so symmetry of mixed
//! derivatives holds structurally.
//!
//! Each jet also records the highest order that is still exact. Seeded
//! coordinates and constants are exact to order 3; [`Jet3::partial`] yields
//! the jet of a partial derivative, which is only exact to one order less.
//! Arithmetic keeps the minimum order of its operands, so quantities built
//! from derivatives (Christoffel symbols, gradients, mean curvature) carry
//! exactly the derivative information that is actually available.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

/// Largest supported number of differentiation directions.
pub const MAX_DIRECTIONS: usize = 8;
const N2: usize = MAX_DIRECTIONS * (MAX_DIRECTIONS + 1) / 2;
const N3: usize = MAX_DIRECTIONS * (MAX_DIRECTIONS + 1) * (MAX_DIRECTIONS + 2) / 6;

/// Highest derivative order carried by a jet.
pub const JET_ORDER: u8 = 3;

#[inline]
fn sort2(i: usize, j: usize) -> (usize, usize) {
    if i <= j {
        (i, j)
    } else {
        (j, i)
    }
}

#[inline]
fn sort3(i: usize, j: usize, k: usize) -> (usize, usize, usize) {
    let (a, b) = sort2(i, j);
    if k >= b {
        (a, b, k)
    } else if k >= a {
        (a, k, b)
    } else {
        (k, a, b)
    }
}

/// Storage slot of the second-order multi-index `{i, j}`.
#[inline]
pub(crate) fn idx2(i: usize, j: usize) -> usize {
    let (a, b) = sort2(i, j);
    b * (b + 1) / 2 + a
}

/// Storage slot of the third-order multi-index `{i, j, k}`.
#[inline]
pub(crate) fn idx3(i: usize, j: usize, k: usize) -> usize {
    let (a, b, c) = sort3(i, j, k);
    c * (c + 1) * (c + 2) / 6 + b * (b + 1) / 2 + a
}

#[derive(Clone, Copy)]
pub struct Jet3 {
    dim: u8,
    order: u8,
    v: f64,
    d1: [f64; MAX_DIRECTIONS],
    d2: [f64; N2],
    d3: [f64; N3],
}

impl Jet3 {
    /// A constant: every derivative is exactly zero.
    pub fn constant(value: f64) -> Self {
        Self {
            dim: 0,
            order: JET_ORDER,
            v: value,
            d1: [0.0; MAX_DIRECTIONS],
            d2: [0.0; N2],
            d3: [0.0; N3],
        }
    }

    /// The coordinate function `x_index` of a `dim`-dimensional chart, at `value`.
    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        assert!(
            dim <= MAX_DIRECTIONS && index < dim,
            "jet direction {index} out of range for dimension {dim}"
        );
        let mut j = Self::constant(value);
        j.dim = dim as u8;
        j.d1[index] = 1.0;
        j
    }

    /// Seeds one coordinate jet per entry of `point`.
    pub fn seed(point: &[f64]) -> Result<Vec<Jet3>, JetError> {
        let d = point.len();
        if d == 0 {
            return Err(JetError::NoDirections);
        }
        if d > MAX_DIRECTIONS {
            return Err(JetError::TooManyDirections(d));
        }
        Ok(point
            .iter()
            .enumerate()
            .map(|(i, &x)| Self::variable(x, i, d))
            .collect())
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    /// Highest derivative order that is exact in this jet.
    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn value(&self) -> f64 {
        self.v
    }

    fn check_order(&self, needed: u8) {
        assert!(
            self.order >= needed,
            "requested an order-{needed} derivative from a jet exact only to order {}",
            self.order
        );
    }

    fn coeff(arr: &[f64], idx: usize, i: usize, dim: usize) -> f64 {
        if i >= dim {
            0.0
        } else {
            arr[idx]
        }
    }

    /// First partial `∂_i`.
    pub fn d(&self, i: usize) -> f64 {
        self.check_order(1);
        if i >= self.dim() {
            return 0.0;
        }
        self.d1[i]
    }

    /// Second partial `∂_i ∂_j`.
    pub fn dd(&self, i: usize, j: usize) -> f64 {
        self.check_order(2);
        Self::coeff(&self.d2, idx2(i, j), i.max(j), self.dim())
    }

    /// Third partial `∂_i ∂_j ∂_k`.
    pub fn ddd(&self, i: usize, j: usize, k: usize) -> f64 {
        self.check_order(3);
        Self::coeff(&self.d3, idx3(i, j, k), i.max(j).max(k), self.dim())
    }

    /// Partial derivative selected by a list of directions; the empty list
    /// returns the value.
    pub fn derivative(&self, directions: &[usize]) -> Result<f64, JetError> {
        match *directions {
            [] => Ok(self.v),
            [i] if self.order >= 1 => Ok(self.d(i)),
            [i, j] if self.order >= 2 => Ok(self.dd(i, j)),
            [i, j, k] if self.order >= 3 => Ok(self.ddd(i, j, k)),
            _ if directions.len() > JET_ORDER as usize => {
                Err(JetError::OrderTooHigh(directions.len()))
            }
            _ => Err(JetError::Truncated {
                requested: directions.len(),
                available: self.order,
            }),
        }
    }

    /// Jet of `∂_i f`, exact to one order less than `self`.
    pub fn partial(&self, i: usize) -> Jet3 {
        self.check_order(1);
        let dim = self.dim();
        let mut out = Jet3::constant(0.0);
        out.dim = self.dim;
        out.order = self.order - 1;
        if i >= dim {
            return out;
        }
        out.v = self.d1[i];
        for a in 0..dim {
            out.d1[a] = self.d2[idx2(i, a)];
        }
        for b in 0..dim {
            for a in 0..=b {
                out.d2[idx2(a, b)] = self.d3[idx3(i, a, b)];
            }
        }
        out
    }

    /// Re-expresses the jet in the sub-chart spanned by `directions`, holding
    /// every other coordinate fixed.
    pub fn restrict(&self, directions: &[usize]) -> Jet3 {
        let mut out = Jet3::constant(self.v);
        out.order = self.order;
        out.dim = directions.len() as u8;
        let dim = self.dim();
        let get1 = |i: usize| if i < dim { self.d1[i] } else { 0.0 };
        let get2 = |i: usize, j: usize| {
            if i.max(j) < dim {
                self.d2[idx2(i, j)]
            } else {
                0.0
            }
        };
        let get3 = |i: usize, j: usize, k: usize| {
            if i.max(j).max(k) < dim {
                self.d3[idx3(i, j, k)]
            } else {
                0.0
            }
        };
        let n = directions.len();
        for c in 0..n {
            out.d1[c] = get1(directions[c]);
            for b in 0..=c {
                out.d2[idx2(b, c)] = get2(directions[b], directions[c]);
                for a in 0..=b {
                    out.d3[idx3(a, b, c)] =
                        get3(directions[a], directions[b], directions[c]);
                }
            }
        }
        out
    }

    /// Derivative of `self` along the direction `w` (components per chart
    /// direction, each itself a jet): `Σ_a w^a ∂_a self`.
    pub fn along(&self, w: &[Jet3]) -> Jet3 {
        let mut acc = Jet3::constant(0.0);
        for (a, wa) in w.iter().enumerate() {
            acc += *wa * self.partial(a);
        }
        if w.is_empty() {
            acc.order = self.order.saturating_sub(1);
        }
        acc
    }

    pub fn scale(mut self, c: f64) -> Jet3 {
        let (n1, n2, n3) = counts(self.dim());
        self.v *= c;
        self.d1[..n1].iter_mut().for_each(|x| *x *= c);
        self.d2[..n2].iter_mut().for_each(|x| *x *= c);
        self.d3[..n3].iter_mut().for_each(|x| *x *= c);
        self
    }

    /// `h ∘ self` given the value and first three derivatives of `h` at
    /// `self.value()` (truncated Faà di Bruno).
    pub fn compose(&self, h0: f64, h1: f64, h2: f64, h3: f64) -> Jet3 {
        let dim = self.dim();
        let mut out = Jet3::constant(h0);
        out.dim = self.dim;
        out.order = self.order;
        let f1 = &self.d1;
        let f2 = &self.d2;
        for c in 0..dim {
            out.d1[c] = h1 * f1[c];
            for b in 0..=c {
                let bc = idx2(b, c);
                out.d2[bc] = h2 * f1[b] * f1[c] + h1 * f2[bc];
                for a in 0..=b {
                    let abc = idx3(a, b, c);
                    out.d3[abc] = h3 * f1[a] * f1[b] * f1[c]
                        + h2 * (f2[idx2(a, b)] * f1[c]
                            + f2[idx2(a, c)] * f1[b]
                            + f2[bc] * f1[a])
                        + h1 * self.d3[abc];
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Jet3 {
        let x = self.v;
        let r = 1.0 / x;
        self.compose(r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r)
    }

    pub fn powi(&self, n: i32) -> Jet3 {
        let x = self.v;
        let nf = n as f64;
        let term = |coef: f64, p: i32| if coef == 0.0 { 0.0 } else { coef * x.powi(p) };
        self.compose(
            x.powi(n),
            term(nf, n - 1),
            term(nf * (nf - 1.0), n - 2),
            term(nf * (nf - 1.0) * (nf - 2.0), n - 3),
        )
    }

    pub fn powf(&self, c: f64) -> Jet3 {
        let x = self.v;
        let term = |coef: f64, p: f64| if coef == 0.0 { 0.0 } else { coef * x.powf(p) };
        self.compose(
            x.powf(c),
            term(c, c - 1.0),
            term(c * (c - 1.0), c - 2.0),
            term(c * (c - 1.0) * (c - 2.0), c - 3.0),
        )
    }

    pub fn exp(&self) -> Jet3 {
        let e = self.v.exp();
        self.compose(e, e, e, e)
    }

    pub fn ln(&self) -> Jet3 {
        let r = 1.0 / self.v;
        self.compose(self.v.ln(), r, -r * r, 2.0 * r * r * r)
    }

    pub fn sqrt(&self) -> Jet3 {
        let s = self.v.sqrt();
        self.compose(
            s,
            0.5 / s,
            -0.25 / (s * s * s),
            0.375 / (s * s * s * s * s),
        )
    }

    pub fn sin(&self) -> Jet3 {
        let (s, c) = self.v.sin_cos();
        self.compose(s, c, -s, -c)
    }

    pub fn cos(&self) -> Jet3 {
        let (s, c) = self.v.sin_cos();
        self.compose(c, -s, -c, s)
    }

    pub fn tan(&self) -> Jet3 {
        let t = self.v.tan();
        let sec2 = 1.0 + t * t;
        self.compose(t, sec2, 2.0 * t * sec2, sec2 * (2.0 + 6.0 * t * t))
    }

    pub fn sinh(&self) -> Jet3 {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.compose(s, c, s, c)
    }

    pub fn cosh(&self) -> Jet3 {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.compose(c, s, c, s)
    }

    pub fn tanh(&self) -> Jet3 {
        let t = self.v.tanh();
        let s = 1.0 - t * t;
        self.compose(t, s, -2.0 * t * s, -2.0 * s * s + 4.0 * t * t * s)
    }

    pub fn abs(&self) -> Jet3 {
        if self.v < 0.0 {
            -*self
        } else {
            *self
        }
    }
}

#[inline]
fn counts(dim: usize) -> (usize, usize, usize) {
    (dim, dim * (dim + 1) / 2, dim * (dim + 1) * (dim + 2) / 6)
}

impl Default for Jet3 {
    fn default() -> Self {
        Jet3::constant(0.0)
    }
}

impl fmt::Debug for Jet3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n1, n2, n3) = counts(self.dim());
        f.debug_struct("Jet3")
            .field("order", &self.order)
            .field("value", &self.v)
            .field("d1", &&self.d1[..n1])
            .field("d2", &&self.d2[..n2])
            .field("d3", &&self.d3[..n3])
            .finish()
    }
}

impl PartialEq for Jet3 {
    fn eq(&self, other: &Self) -> bool {
        let dim = self.dim().max(other.dim());
        let (n1, n2, n3) = counts(dim);
        self.order == other.order
            && self.v == other.v
            && self.d1[..n1] == other.d1[..n1]
            && self.d2[..n2] == other.d2[..n2]
            && self.d3[..n3] == other.d3[..n3]
    }
}

fn zip_with(a: &Jet3, b: &Jet3, op: impl Fn(f64, f64) -> f64) -> Jet3 {
    let dim = a.dim().max(b.dim());
    let (n1, n2, n3) = counts(dim);
    let mut out = Jet3::constant(op(a.v, b.v));
    out.dim = dim as u8;
    out.order = a.order.min(b.order);
    for i in 0..n1 {
        out.d1[i] = op(a.d1[i], b.d1[i]);
    }
    for i in 0..n2 {
        out.d2[i] = op(a.d2[i], b.d2[i]);
    }
    for i in 0..n3 {
        out.d3[i] = op(a.d3[i], b.d3[i]);
    }
    out
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        zip_with(&self, &rhs, |x, y| x + y)
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        zip_with(&self, &rhs, |x, y| x - y)
    }
}

impl AddAssign for Jet3 {
    fn add_assign(&mut self, rhs: Jet3) {
        *self = *self + rhs;
    }
}

impl SubAssign for Jet3 {
    fn sub_assign(&mut self, rhs: Jet3) {
        *self = *self - rhs;
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        self.scale(-1.0)
    }
}

impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, g: Jet3) -> Jet3 {
        let f = self;
        let dim = f.dim().max(g.dim());
        let mut out = Jet3::constant(f.v * g.v);
        out.dim = dim as u8;
        out.order = f.order.min(g.order);
        let (f0, g0) = (f.v, g.v);
        let (f1, g1) = (&f.d1, &g.d1);
        let (f2, g2) = (&f.d2, &g.d2);
        for c in 0..dim {
            out.d1[c] = f1[c] * g0 + f0 * g1[c];
            for b in 0..=c {
                let bc = idx2(b, c);
                out.d2[bc] = f2[bc] * g0 + f1[b] * g1[c] + f1[c] * g1[b] + f0 * g2[bc];
                for a in 0..=b {
                    let abc = idx3(a, b, c);
                    let (ab, ac) = (idx2(a, b), idx2(a, c));
                    out.d3[abc] = f.d3[abc] * g0
                        + f2[ab] * g1[c]
                        + f2[ac] * g1[b]
                        + f2[bc] * g1[a]
                        + f1[a] * g2[bc]
                        + f1[b] * g2[ac]
                        + f1[c] * g2[ab]
                        + f0 * g.d3[abc];
                }
            }
        }
        out
    }
}

impl Div for Jet3 {
    type Output = Jet3;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet3) -> Jet3 {
        self * rhs.recip()
    }
}

impl Mul<f64> for Jet3 {
    type Output = Jet3;
    fn mul(self, rhs: f64) -> Jet3 {
        self.scale(rhs)
    }
}

impl Add<f64> for Jet3 {
    type Output = Jet3;
    fn add(mut self, rhs: f64) -> Jet3 {
        self.v += rhs;
        self
    }
}

impl std::iter::Sum for Jet3 {
    fn sum<I: Iterator<Item = Jet3>>(iter: I) -> Jet3 {
        iter.fold(Jet3::constant(0.0), |a, b| a + b)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("a jet needs at least one direction")]
    NoDirections,
    #[error("{0} directions requested; at most {MAX_DIRECTIONS} are supported")]
    TooManyDirections(usize),
    #[error("derivatives of order {0} exceed the jet order 3")]
    OrderTooHigh(usize),
    #[error("order-{requested} derivative requested from a jet exact only to order {available}")]
    Truncated { requested: usize, available: u8 },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_layout_is_contiguous() {
        let mut seen = [false; N3];
        for c in 0..MAX_DIRECTIONS {
            for b in 0..=c {
                for a in 0..=b {
                    let i = idx3(a, b, c);
                    assert!(!seen[i]);
                    seen[i] = true;
                    assert_eq!(idx3(c, a, b), i);
                }
            }
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(idx2(3, 1), idx2(1, 3));
    }

    #[test]
    fn seed_one_direction() {
        let x = Jet3::seed(&[2.0]).unwrap()[0];
        assert_eq!(x.value(), 2.0);
        assert_eq!(x.d(0), 1.0);
        assert_eq!(x.dd(0, 0), 0.0);
        assert_eq!(x.ddd(0, 0, 0), 0.0);
        assert_eq!(Jet3::seed(&[]), Err(JetError::NoDirections));
        assert!(Jet3::seed(&[0.0; 9]).is_err());
    }

    #[test]
    fn square_of_seed() {
        let x = Jet3::seed(&[3.0]).unwrap()[0];
        let y = x * x;
        assert_eq!(
            (y.value(), y.d(0), y.dd(0, 0), y.ddd(0, 0, 0)),
            (9.0, 6.0, 2.0, 0.0)
        );
    }

    #[test]
    fn exp_at_zero() {
        let e = Jet3::seed(&[0.0]).unwrap()[0].exp();
        assert_eq!(
            (e.value(), e.d(0), e.dd(0, 0), e.ddd(0, 0, 0)),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn mixed_product() {
        // f = x^2 y^3 at (1, 2)
        let v = Jet3::seed(&[1.0, 2.0]).unwrap();
        let f = v[0].powi(2) * v[1].powi(3);
        assert_eq!(f.value(), 8.0);
        assert_eq!(f.d(0), 16.0);
        assert_eq!(f.d(1), 12.0);
        assert_eq!(f.dd(0, 1), 24.0);
        assert_eq!(f.ddd(0, 0, 1), 24.0);
        assert_eq!(f.ddd(0, 1, 1), 24.0);
        assert_eq!(f.ddd(1, 1, 1), 6.0);
        assert_eq!(f.ddd(0, 0, 0), 0.0);
    }

    #[test]
    fn partial_reduces_order() {
        let v = Jet3::seed(&[1.0, 2.0]).unwrap();
        let f = v[0].powi(3) * v[1];
        let fx = f.partial(0);
        assert_eq!(fx.order(), 2);
        assert_eq!(fx.value(), 6.0);
        assert_eq!(fx.d(0), 12.0);
        assert_eq!(fx.dd(0, 0), 12.0);
        assert_eq!(fx.dd(0, 1), 6.0);
        assert!(fx.derivative(&[0, 0, 0]).is_err());
        let prod = fx * f;
        assert_eq!(prod.order(), 2);
    }

    #[test]
    #[should_panic]
    fn reading_beyond_order_panics() {
        let v = Jet3::seed(&[1.0]).unwrap();
        let g = v[0].powi(4).partial(0).partial(0).partial(0);
        let _ = g.d(0);
    }

    #[test]
    fn restrict_keeps_slice_taylor() {
        let v = Jet3::seed(&[1.0, 2.0, 3.0]).unwrap();
        let f = v[0] * v[1].powi(2) * v[2].sin();
        let r = f.restrict(&[2, 0]);
        assert_eq!(r.dim(), 2);
        assert_eq!(r.d(0), f.d(2));
        assert_eq!(r.d(1), f.d(0));
        assert_eq!(r.dd(0, 1), f.dd(2, 0));
        assert_eq!(r.ddd(0, 0, 1), f.ddd(2, 2, 0));
    }

    #[test]
    fn tanh_third_derivative() {
        let x = Jet3::seed(&[0.3]).unwrap()[0];
        let t = x.tanh();
        let th = 0.3f64.tanh();
        let s = 1.0 - th * th;
        // d³/dx³ tanh = -2 sech²(1 - 3 tanh²)... = -2s(s - 2th²)
        assert!((t.ddd(0, 0, 0) - (-2.0 * s * (s - 2.0 * th * th))).abs() < 1e-14);
    }

    #[test]
    fn powi_at_zero_has_finite_jet() {
        let x = Jet3::seed(&[0.0]).unwrap()[0];
        let y = x.powi(2);
        assert_eq!((y.value(), y.d(0), y.dd(0, 0), y.ddd(0, 0, 0)), (0.0, 0.0, 2.0, 0.0));
    }
}
