//! Forward-mode derivatives to order three, plus a finite-difference oracle.

mod fd;
mod jet;
mod scalar;

pub use fd::{fd_partial, FdError, FdScheme};
pub use jet::{Jet3, JetError, JET_ORDER, MAX_DIRECTIONS};
pub use scalar::Scalar;

/// Seeds one coordinate jet per entry of `point` (see [`Jet3::seed`]).
pub fn seed(point: &[f64]) -> Result<Vec<Jet3>, JetError> {
    Jet3::seed(point)
}
