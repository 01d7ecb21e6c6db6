//! Central finite differences, used only as an independent oracle for the
//! jet arithmetic.

/// Step sizes per derivative order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdScheme {
    steps: [f64; 3],
    /// Multiply each step by `max(1, |coordinate|)`.
    relative: bool,
}

impl Default for FdScheme {
    fn default() -> Self {
        Self {
            steps: [1e-6, 1e-4, 1e-3],
            relative: true,
        }
    }
}

impl FdScheme {
    pub fn new(steps: [f64; 3], relative: bool) -> Result<Self, FdError> {
        if steps.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(FdError::BadStep);
        }
        Ok(Self { steps, relative })
    }

    /// The same absolute step for every order.
    pub fn fixed(h: f64) -> Result<Self, FdError> {
        Self::new([h; 3], false)
    }

    pub fn step(&self, order: usize, point: &[f64], directions: &[usize]) -> f64 {
        let h = self.steps[order.clamp(1, 3) - 1];
        if !self.relative {
            return h;
        }
        let scale = directions
            .iter()
            .map(|&i| point[i].abs())
            .fold(1.0_f64, f64::max);
        h * scale
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FdError {
    #[error("finite-difference steps must be positive and finite")]
    BadStep,
    #[error("derivative order {0} exceeds 3")]
    OrderTooHigh(usize),
    #[error("direction {direction} out of range for a {dim}-dimensional point")]
    BadDirection { direction: usize, dim: usize },
    #[error("function not finite at stencil point {0:?}")]
    Domain(Vec<f64>),
}

/// Central-difference estimate of `∂^{directions} f` at `point`.
///
/// Nested first-order central differences are applied once per listed
/// direction, so the stencil reaches `point ± order·h` and is second-order
/// accurate for every multi-index.
pub fn fd_partial<F>(
    f: F,
    point: &[f64],
    directions: &[usize],
    scheme: &FdScheme,
) -> Result<f64, FdError>
where
    F: Fn(&[f64]) -> f64,
{
    let order = directions.len();
    if order > 3 {
        return Err(FdError::OrderTooHigh(order));
    }
    if let Some(&bad) = directions.iter().find(|&&i| i >= point.len()) {
        return Err(FdError::BadDirection {
            direction: bad,
            dim: point.len(),
        });
    }
    let h = scheme.step(order, point, directions);
    let mut sample = point.to_vec();
    let mut acc = 0.0;
    for mask in 0..(1usize << order) {
        sample.copy_from_slice(point);
        let mut sign = 1.0;
        for (bit, &dir) in directions.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                sample[dir] -= h;
                sign = -sign;
            } else {
                sample[dir] += h;
            }
        }
        let v = f(&sample);
        if !v.is_finite() {
            return Err(FdError::Domain(sample));
        }
        acc += sign * v;
    }
    Ok(acc / (2.0 * h).powi(order as i32))
}
