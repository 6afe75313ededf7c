//! Uniform midpoint discretization grids.
//!
//! All kernels and inner products operate on one of two grid kinds:
//!
//! * symmetric — cell midpoints covering `[-a, a]`, used by the 1D routes;
//! * radial — cell midpoints covering `[0, a]`, used by the 3D sectors.
//!
//! Nodes sit at cell centers, so no node ever lands on the origin or on
//! `r = 0`, which keeps the `1/p`, `1/p^3`, `1/p^5` kernel prefactors finite
//! and makes the principal-value pairing symmetric by construction. On a
//! symmetric grid the reflection `x -> -x` is an exact involution on node
//! indices: node `N-1-j` holds exactly `-x_j` in floating point.

use crate::{Error, Result};
use std::sync::Arc;

/// Hard cap on node count; a production symmetric grid at `a = 500`,
/// `dx = 0.001` has 10^6 nodes, far below this.
pub const MAX_NODES: usize = 1 << 24;

/// Well radius in the dimensionless units used throughout; the potential
/// step and all thresholds are expressed relative to this length.
pub const WELL_RADIUS: f64 = 1.0;

/// Production runs keep the cutoff at or above this value.
pub const PRODUCTION_MIN_CUTOFF: f64 = 10.0;
/// Production runs keep the step at or below this value.
pub const PRODUCTION_MAX_STEP: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// Midpoint cells spanning `[-a, a]`; node count is even.
    Symmetric,
    /// Midpoint cells spanning `[0, a]`; first node is `dx/2`.
    Radial,
}

impl GridKind {
    pub fn label(self) -> &'static str {
        match self {
            GridKind::Symmetric => "symmetric",
            GridKind::Radial => "radial",
        }
    }
}

/// A uniform midpoint grid, immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    kind: GridKind,
    cutoff_a: f64,
    step_dx: f64,
    nodes: Vec<f64>,
}

impl RadialGrid {
    /// Build a grid of the given kind.
    ///
    /// The cell count is rounded so the cells tile the interval exactly:
    /// `N = 2*round(a/dx)` for symmetric grids, `N = round(a/dx)` for radial
    /// ones. The stored cutoff is recomputed from the realized cell count, so
    /// it can differ from the request by less than one cell.
    pub fn new(kind: GridKind, cutoff_a: f64, step_dx: f64) -> Result<Self> {
        if !step_dx.is_finite() || step_dx <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "step must be positive and finite, got {step_dx}"
            )));
        }
        if !cutoff_a.is_finite() || cutoff_a <= WELL_RADIUS {
            return Err(Error::InvalidGrid(format!(
                "cutoff {cutoff_a} must exceed the well radius {WELL_RADIUS}"
            )));
        }
        let half_cells = (cutoff_a / step_dx).round() as usize;
        if half_cells == 0 {
            return Err(Error::InvalidGrid(format!(
                "cutoff {cutoff_a} spans no cells at step {step_dx}"
            )));
        }
        let n = match kind {
            GridKind::Symmetric => 2 * half_cells,
            GridKind::Radial => half_cells,
        };
        if n > MAX_NODES {
            return Err(Error::NodeLimit {
                requested: n,
                limit: MAX_NODES,
            });
        }
        let nodes: Vec<f64> = match kind {
            // (2j + 1 - N) is an exact integer, so x_{N-1-j} = -x_j exactly.
            GridKind::Symmetric => (0..n)
                .map(|j| 0.5 * ((2 * j + 1) as f64 - n as f64) * step_dx)
                .collect(),
            GridKind::Radial => (0..n).map(|j| (j as f64 + 0.5) * step_dx).collect(),
        };
        let cutoff_a = match kind {
            GridKind::Symmetric => 0.5 * (n as f64) * step_dx,
            GridKind::Radial => (n as f64) * step_dx,
        };
        Ok(Self {
            kind,
            cutoff_a,
            step_dx,
            nodes,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff_a
    }

    pub fn dx(&self) -> f64 {
        self.step_dx
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, j: usize) -> f64 {
        self.nodes[j]
    }

    /// Index of the mirror node `-x_j`; symmetric grids only.
    pub fn reflect_index(&self, j: usize) -> usize {
        debug_assert_eq!(self.kind, GridKind::Symmetric);
        self.len() - 1 - j
    }

    /// Number of cells in a half-interval; the 1D kernel window `|u - x| <= a`
    /// spans exactly this many cells on each side.
    pub fn half_cells(&self) -> usize {
        match self.kind {
            GridKind::Symmetric => self.len() / 2,
            GridKind::Radial => self.len(),
        }
    }

    /// True when the grid meets the production-quality bounds
    /// (`a >= 10`, `dx <= 0.01`). Test grids may be anything.
    pub fn is_production_quality(&self) -> bool {
        self.cutoff_a >= PRODUCTION_MIN_CUTOFF && self.step_dx <= PRODUCTION_MAX_STEP
    }
}

/// Convenience constructor returning a shared handle, the form every solver
/// entry point takes.
pub fn make_grid(kind: GridKind, cutoff_a: f64, step_dx: f64) -> Result<Arc<RadialGrid>> {
    RadialGrid::new(kind, cutoff_a, step_dx).map(Arc::new)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn production_symmetric_grid_has_expected_cell_count() {
        let g = RadialGrid::new(GridKind::Symmetric, 50.0, 0.001).unwrap();
        assert_eq!(g.len(), 100_000);
        assert_relative_eq!(g.cutoff(), 50.0, max_relative = 1e-12);
        assert_relative_eq!(g.node(0), -50.0 + 0.0005, max_relative = 1e-9);
        assert_relative_eq!(g.node(g.len() - 1), 50.0 - 0.0005, max_relative = 1e-9);
        assert!(g.is_production_quality());
    }

    #[test]
    fn coarse_radial_grid_uses_midpoints() {
        let g = RadialGrid::new(GridKind::Radial, 1.0001, 0.5).unwrap();
        // two cells covering [0, 1]
        assert_eq!(g.nodes(), &[0.25, 0.75]);
    }

    #[test]
    fn cutoff_inside_well_is_rejected() {
        let err = RadialGrid::new(GridKind::Symmetric, 0.5, 0.1).unwrap_err();
        assert!(matches!(err, Error::InvalidGrid(_)));
        assert!(RadialGrid::new(GridKind::Radial, 1.0, 0.1).is_err());
    }

    #[test]
    fn nonpositive_step_is_rejected() {
        assert!(RadialGrid::new(GridKind::Symmetric, 10.0, 0.0).is_err());
        assert!(RadialGrid::new(GridKind::Symmetric, 10.0, -0.1).is_err());
        assert!(RadialGrid::new(GridKind::Symmetric, 10.0, f64::NAN).is_err());
    }

    #[test]
    fn node_limit_is_enforced() {
        let err = RadialGrid::new(GridKind::Radial, 1.0e9, 1e-5).unwrap_err();
        assert!(matches!(err, Error::NodeLimit { .. }));
    }

    #[test]
    fn reflection_is_an_exact_involution() {
        let g = RadialGrid::new(GridKind::Symmetric, 7.0, 0.37).unwrap();
        for j in 0..g.len() {
            let k = g.reflect_index(j);
            assert_eq!(g.reflect_index(k), j);
            // exact negation, not approximate
            assert_eq!(g.node(k), -g.node(j));
        }
    }

    #[test]
    fn spacing_is_uniform_and_cells_tile_the_interval() {
        for (kind, a, dx) in [
            (GridKind::Symmetric, 3.0, 0.01),
            (GridKind::Radial, 12.0, 0.025),
            (GridKind::Symmetric, 50.0, 0.5),
        ] {
            let g = RadialGrid::new(kind, a, dx).unwrap();
            for j in 1..g.len() {
                let gap = g.node(j) - g.node(j - 1);
                assert!((gap - dx).abs() <= 1e-9 * dx, "nonuniform gap {gap}");
            }
            let span = match kind {
                GridKind::Symmetric => 2.0 * g.cutoff(),
                GridKind::Radial => g.cutoff(),
            };
            let total = g.len() as f64 * dx;
            assert!((total - span).abs() <= 1e-6 * span);
        }
    }
}
