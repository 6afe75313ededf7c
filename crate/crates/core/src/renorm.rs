//! Finite-cutoff tail renormalization.
//!
//! Truncating the kernel integration at `a` drops an exterior contribution
//! that, for a decayed bound state, acts as a constant shift: widening the
//! interval from `a` to `b` raises the eigenvalue by `c (1/a - 1/b)`. The
//! constant is `2/π` for the symmetric-interval (1D) truncation and twice
//! that, `4/π`, for the one-sided radial truncation on `[0, a]`. Sending
//! `b -> ∞` extrapolates a cutoff eigenvalue to the infinite domain.

use crate::evolution::EigenResult;
use crate::operators::Sector;
use crate::{Error, Result};
use std::f64::consts::PI;

/// Which truncation geometry a solve used; fixes the tail constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailRoute {
    /// Symmetric window `|z| <= a`; constant `2/π`. The 1D routes.
    TwoSided,
    /// Radial interval `[0, a]`; constant `4/π`. The direct 3D sectors.
    OneSided,
}

impl TailRoute {
    pub fn constant(self) -> f64 {
        match self {
            TailRoute::TwoSided => 2.0 / PI,
            TailRoute::OneSided => 4.0 / PI,
        }
    }

    /// The route is derived from the sector, never user-supplied, so the
    /// constant can't be mismatched.
    pub fn for_sector(sector: Sector) -> Self {
        match sector {
            Sector::OneDEven | Sector::OneDOdd => TailRoute::TwoSided,
            Sector::L0Direct | Sector::L1 | Sector::L2 => TailRoute::OneSided,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TailRoute::TwoSided => "two_sided",
            TailRoute::OneSided => "one_sided",
        }
    }
}

/// `E(b) - E(a) ~ c (1/a - 1/b)`; `b` may be infinite.
pub fn tail_correction(a: f64, b: f64, route: TailRoute) -> Result<f64> {
    if !(a > 0.0) || b < a || a.is_nan() || b.is_nan() {
        return Err(Error::InvalidTailInterval { a, b });
    }
    let inv_b = if b.is_infinite() { 0.0 } else { 1.0 / b };
    Ok(route.constant() * (1.0 / a - inv_b))
}

/// Recompute the `a -> ∞` eigenvalue of a result from its cutoff and route.
pub fn renormalize(result: &EigenResult) -> Result<EigenResult> {
    let route = TailRoute::for_sector(result.sector);
    let corr = tail_correction(result.cutoff_a, f64::INFINITY, route)?;
    let mut out = result.clone();
    out.eigenvalue_renormalized = out.eigenvalue_at_a + corr;
    Ok(out)
}
