//! Discretized principal-value kernels, sector inner products, and the
//! potential, per orbital sector.
//!
//! Every sector reduces the 3D eigenvalue problem to one radial integral
//! operator plus a weighted inner product:
//!
//! * `oneD_even` / `oneD_odd` — the 1D kernel on a symmetric grid, with the
//!   integration window truncated in the relative coordinate `|u - x| <= a`
//!   and the function taken as zero off the grid. The odd route carries the
//!   purely radial 3D spectrum: `g(z) = z f(z)` maps the n-th radial level
//!   onto the 2n-th 1D level.
//! * `l0_direct` — the radial reduction of the 3D kernel, integrated over
//!   `[0, a]`, weight `4π r²`.
//! * `l1`, `l2` — the orbital-sector kernels obtained by integrating out the
//!   angles against `x₃` and `3x₃² - p²` profiles, weights `(4π/3) r⁴` and
//!   `(16π/5) r⁶`.
//!
//! The singular node `r = p` (or `u = x`) is skipped entirely: the quadratic
//! part then cancels in symmetric pairs and the integrable log node drops an
//! `O(Δx ln Δx)` sliver. Direct nodal summation is the reference
//! implementation; [`SectorOperator`] switches to an FFT-accelerated path on
//! large grids (the kernels are Toeplitz/Hankel in the node index), falling
//! back to direct rows near `p = 0` where the `1/p^k` prefactors would
//! amplify transform roundoff.

pub(crate) mod direct;
pub(crate) mod fast;

use crate::exec;
use crate::grid::{GridKind, RadialGrid, WELL_RADIUS};
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

/// Orbital sector / solver route of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    /// Even-parity 1D states (1D levels 1, 3, 5, ...).
    OneDEven,
    /// Odd-parity 1D states (1D levels 2, 4, 6, ...); carries the purely
    /// radial 3D spectrum through `g(z) = z f(z)`.
    OneDOdd,
    /// Purely radial `l = 0` states solved directly on `[0, a]`.
    L0Direct,
    /// Orbital `l = 1` radial profiles.
    L1,
    /// Orbital `l = 2` radial profiles.
    L2,
}

impl Sector {
    pub fn label(self) -> &'static str {
        match self {
            Sector::OneDEven => "oneD_even",
            Sector::OneDOdd => "oneD_odd",
            Sector::L0Direct => "l0_direct",
            Sector::L1 => "l1",
            Sector::L2 => "l2",
        }
    }

    pub fn grid_kind(self) -> GridKind {
        match self {
            Sector::OneDEven | Sector::OneDOdd => GridKind::Symmetric,
            _ => GridKind::Radial,
        }
    }

    pub fn is_one_dimensional(self) -> bool {
        matches!(self, Sector::OneDEven | Sector::OneDOdd)
    }

    /// Exponent of `r` in the sector weight: 0 for the 1D routes, 2, 4, 6
    /// for `l = 0, 1, 2`.
    pub fn weight_exponent(self) -> u32 {
        match self {
            Sector::OneDEven | Sector::OneDOdd => 0,
            Sector::L0Direct => 2,
            Sector::L1 => 4,
            Sector::L2 => 6,
        }
    }

    /// Constant prefactor of the sector weight.
    pub fn weight_prefactor(self) -> f64 {
        match self {
            Sector::OneDEven | Sector::OneDOdd => 1.0,
            Sector::L0Direct => 4.0 * PI,
            Sector::L1 => 4.0 * PI / 3.0,
            Sector::L2 => 16.0 * PI / 5.0,
        }
    }

    /// Weight function `w(r)` of the sector inner product.
    pub fn weight(self, r: f64) -> f64 {
        self.weight_prefactor() * r.powi(self.weight_exponent() as i32)
    }

    /// Orbital quantum number of the 3D interpretation, if any.
    /// `oneD_even` has no 3D reading and returns `None`.
    pub fn orbital_l(self) -> Option<u32> {
        match self {
            Sector::OneDEven => None,
            Sector::OneDOdd | Sector::L0Direct => Some(0),
            Sector::L1 => Some(1),
            Sector::L2 => Some(2),
        }
    }
}

/// The finite spherical well: zero inside the unit ball, `v0` outside.
/// The step at `r = 1` is assigned to the outside value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WellPotential {
    v0: f64,
}

impl WellPotential {
    pub fn new(v0: f64) -> Result<Self> {
        if !v0.is_finite() || v0 <= 0.0 {
            return Err(Error::InvalidPotential(format!(
                "well height must be positive, got {v0}"
            )));
        }
        Ok(Self { v0 })
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn well_radius(&self) -> f64 {
        WELL_RADIUS
    }

    /// `V(r)`: exactly 0 for `r < 1`, exactly `v0` for `r >= 1`.
    pub fn evaluate(&self, r: f64) -> f64 {
        if r < WELL_RADIUS {
            0.0
        } else {
            self.v0
        }
    }

    /// Value at a grid node; on the 1D routes the potential acts as `V(|x|)`.
    pub fn at_node(&self, x: f64) -> f64 {
        self.evaluate(x.abs())
    }
}

/// A sampled radial (or 1D) profile tied to a grid and a sector.
#[derive(Debug, Clone)]
pub struct SectorState {
    grid: Arc<RadialGrid>,
    sector: Sector,
    samples: Vec<f64>,
}

impl SectorState {
    pub fn new(grid: Arc<RadialGrid>, sector: Sector, samples: Vec<f64>) -> Result<Self> {
        if grid.kind() != sector.grid_kind() {
            return Err(Error::SectorMismatch(format!(
                "sector {} needs a {} grid, got {}",
                sector.label(),
                sector.grid_kind().label(),
                grid.kind().label()
            )));
        }
        if samples.len() != grid.len() {
            return Err(Error::SampleCount {
                got: samples.len(),
                expected: grid.len(),
            });
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite {
                context: "state construction",
            });
        }
        Ok(Self {
            grid,
            sector,
            samples,
        })
    }

    pub fn from_fn(
        grid: Arc<RadialGrid>,
        sector: Sector,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let samples = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, sector, samples)
    }

    pub fn zeros(grid: Arc<RadialGrid>, sector: Sector) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, sector, vec![0.0; n])
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub(crate) fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }

    pub fn norm(&self) -> f64 {
        sector_inner(self, self).expect("state is inner-compatible with itself").sqrt()
    }

    /// Scale to unit sector norm.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::ZeroNorm);
        }
        for v in &mut self.samples {
            *v /= n;
        }
        Ok(self)
    }
}

pub(crate) fn grids_match(a: &Arc<RadialGrid>, b: &Arc<RadialGrid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Sector-weighted inner product `Σ w(r_j) f1_j f2_j Δx`.
///
/// Symmetric, bilinear; errors on sector or grid mismatch. The sum runs
/// sequentially so results are bit-reproducible regardless of thread count.
pub fn sector_inner(a: &SectorState, b: &SectorState) -> Result<f64> {
    if a.sector != b.sector {
        return Err(Error::SectorMismatch(format!(
            "inner product between sectors {} and {}",
            a.sector.label(),
            b.sector.label()
        )));
    }
    if !grids_match(&a.grid, &b.grid) {
        return Err(Error::GridMismatch);
    }
    let dx = a.grid.dx();
    let pref = a.sector.weight_prefactor();
    let expo = a.sector.weight_exponent() as i32;
    let nodes = a.grid.nodes();
    let mut acc = 0.0;
    if expo == 0 {
        for (x, y) in a.samples.iter().zip(&b.samples) {
            acc += x * y;
        }
    } else {
        for ((x, y), &r) in a.samples.iter().zip(&b.samples).zip(nodes) {
            acc += r.powi(expo) * x * y;
        }
    }
    Ok(pref * acc * dx)
}

/// Pointwise multiplication by the potential, `f_j -> V(|x_j|) f_j`.
pub fn apply_potential(state: &SectorState, potential: &WellPotential) -> Vec<f64> {
    state
        .grid
        .nodes()
        .iter()
        .zip(&state.samples)
        .map(|(&x, &f)| potential.at_node(x) * f)
        .collect()
}

fn check_finite(out: Vec<f64>, context: &'static str) -> Result<Vec<f64>> {
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NonFinite { context })
    }
}

/// Reference 1D kernel apply (direct nodal summation).
pub fn apply_cauchy_1d(state: &SectorState) -> Result<Vec<f64>> {
    if !state.sector.is_one_dimensional() {
        return Err(Error::SectorMismatch(
            "1D kernel needs a oneD_* state".into(),
        ));
    }
    let g = state.grid();
    let f = state.samples();
    let out = exec::map_nodes(g.len(), |i| direct::cauchy_1d_row(g, f, i));
    check_finite(out, "1D kernel apply")
}

/// Reference `l = 0` radial kernel apply (direct nodal summation).
pub fn apply_radial_l0_direct(state: &SectorState) -> Result<Vec<f64>> {
    expect_sector(state, Sector::L0Direct)?;
    let g = state.grid();
    let f = state.samples();
    let out = exec::map_nodes(g.len(), |i| direct::radial_l0_row(g, f, i));
    check_finite(out, "l0 kernel apply")
}

/// Reference `l = 1` radial kernel apply (direct nodal summation).
pub fn apply_radial_l1(state: &SectorState) -> Result<Vec<f64>> {
    expect_sector(state, Sector::L1)?;
    let g = state.grid();
    let f = state.samples();
    let out = exec::map_nodes(g.len(), |i| direct::radial_l1_row(g, f, i));
    check_finite(out, "l1 kernel apply")
}

/// Reference `l = 2` radial kernel apply (direct nodal summation).
pub fn apply_radial_l2(state: &SectorState) -> Result<Vec<f64>> {
    expect_sector(state, Sector::L2)?;
    let g = state.grid();
    let f = state.samples();
    let out = exec::map_nodes(g.len(), |i| direct::radial_l2_row(g, f, i));
    check_finite(out, "l2 kernel apply")
}

fn expect_sector(state: &SectorState, sector: Sector) -> Result<()> {
    if state.sector != sector {
        return Err(Error::SectorMismatch(format!(
            "expected sector {}, got {}",
            sector.label(),
            state.sector.label()
        )));
    }
    Ok(())
}

/// Which evaluation path a [`SectorOperator`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Direct nodal summation, `O(N²)` per apply; the reference path.
    Direct,
    /// Toeplitz/Hankel FFT convolutions, `O(N log N)` per apply, with direct
    /// rows near `p = 0`.
    Fft,
}

/// Grids at or above this node count default to the FFT backend.
pub const FFT_BACKEND_MIN_NODES: usize = 1024;

/// A kernel bound to one grid and sector, with whatever precomputation the
/// backend needs (FFT plans, kernel transforms, diagonal sums). Cheap to
/// apply repeatedly; immutable and shareable across workers.
pub struct SectorOperator {
    grid: Arc<RadialGrid>,
    sector: Sector,
    backend: Backend,
    fast: Option<fast::FastKernel>,
}

impl SectorOperator {
    pub fn new(grid: Arc<RadialGrid>, sector: Sector) -> Result<Self> {
        let backend = if grid.len() >= FFT_BACKEND_MIN_NODES {
            Backend::Fft
        } else {
            Backend::Direct
        };
        Self::with_backend(grid, sector, backend)
    }

    pub fn with_backend(grid: Arc<RadialGrid>, sector: Sector, backend: Backend) -> Result<Self> {
        if grid.kind() != sector.grid_kind() {
            return Err(Error::SectorMismatch(format!(
                "sector {} needs a {} grid",
                sector.label(),
                sector.grid_kind().label()
            )));
        }
        let fast = match backend {
            Backend::Direct => None,
            Backend::Fft => Some(fast::FastKernel::new(&grid, sector)),
        };
        Ok(Self {
            grid,
            sector,
            backend,
            fast,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn scratch(&self) -> ApplyScratch {
        ApplyScratch {
            inner: self.fast.as_ref().map(|f| f.scratch()),
        }
    }

    /// Apply the sector kernel to raw samples.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        let mut scratch = self.scratch();
        self.apply_with_scratch(f, &mut scratch)
    }

    /// Apply reusing caller-held scratch buffers; the hot path for iteration.
    pub fn apply_with_scratch(&self, f: &[f64], scratch: &mut ApplyScratch) -> Result<Vec<f64>> {
        self.apply_impl(f, scratch, false)
    }

    /// Single-threaded apply, independent of the `parallel` feature; exists
    /// so benchmarks can compare drivers within one build.
    pub fn apply_serial(&self, f: &[f64]) -> Result<Vec<f64>> {
        let mut scratch = self.scratch();
        self.apply_impl(f, &mut scratch, true)
    }

    fn apply_impl(&self, f: &[f64], scratch: &mut ApplyScratch, serial: bool) -> Result<Vec<f64>> {
        if f.len() != self.grid.len() {
            return Err(Error::SampleCount {
                got: f.len(),
                expected: self.grid.len(),
            });
        }
        let g = &self.grid;
        let out = match (&self.fast, self.sector) {
            (Some(fast), _) => fast.apply(f, scratch.inner.as_mut().unwrap(), serial),
            (None, Sector::OneDEven | Sector::OneDOdd) => {
                map_rows(g.len(), serial, |i| direct::cauchy_1d_row(g, f, i))
            }
            (None, Sector::L0Direct) => {
                map_rows(g.len(), serial, |i| direct::radial_l0_row(g, f, i))
            }
            (None, Sector::L1) => map_rows(g.len(), serial, |i| direct::radial_l1_row(g, f, i)),
            (None, Sector::L2) => map_rows(g.len(), serial, |i| direct::radial_l2_row(g, f, i)),
        };
        check_finite(out, "kernel apply")
    }

    /// `A state`, returned as a state on the same grid and sector.
    pub fn apply_state(&self, state: &SectorState) -> Result<SectorState> {
        expect_sector_op(self, state)?;
        let out = self.apply(state.samples())?;
        SectorState::new(self.grid.clone(), self.sector, out)
    }
}

fn expect_sector_op(op: &SectorOperator, state: &SectorState) -> Result<()> {
    if state.sector() != op.sector {
        return Err(Error::SectorMismatch(format!(
            "operator sector {} vs state sector {}",
            op.sector.label(),
            state.sector().label()
        )));
    }
    if !grids_match(&op.grid, state.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn map_rows<F>(n: usize, serial: bool, f: F) -> Vec<f64>
where
    F: Fn(usize) -> f64 + Send + Sync,
{
    if serial {
        exec::map_nodes_serial(n, f)
    } else {
        exec::map_nodes(n, f)
    }
}

/// Reusable buffers for FFT-backed applies.
pub struct ApplyScratch {
    inner: Option<fast::FastScratch>,
}

#[cfg(test)]
mod tests;
