//! Imaginary-time Strang-splitting iteration.
//!
//! One step applies `S(h) = e^{-hV/2} (1 - hA) e^{-hV/2}` to the working
//! state; the eigenvalue estimate after a step is `E = -ln <phi|S phi> / h`.
//! Iterating, deflating against already-converged lower states, enforcing the
//! parity class on the 1D routes, and renormalizing converges the lowest
//! remaining eigenpair of the sector.
//!
//! Convergence is declared when successive eigenvalue estimates differ by
//! less than `eig_tol`. If the running estimate stays above `v0 + 0.5` for
//! 1000 consecutive iterations the run is classified as having no bound
//! state in this slot instead of burning the full iteration budget; final
//! existence verdicts nonetheless always defer to the renormalized test in
//! the spectrum module.
//!
//! Seeds are trigonometric profiles supported on the well (odd sine orders
//! for `oneD_odd`, cosine orders for `oneD_even`, `sin(nπr)/r` for the
//! radial sectors). Any sector-compatible seed with nonzero overlap
//! converges; seed choice only moves the iteration count. On large grids the
//! default seed is replaced by a solve on a coarsened grid, interpolated
//! back, which cuts fine-grid iterations by an order of magnitude.

use crate::grid::{RadialGrid, WELL_RADIUS};
use crate::operators::{
    sector_inner, ApplyScratch, Sector, SectorOperator, SectorState, WellPotential,
};
use crate::renorm::{self, TailRoute};
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

/// Estimates above `v0 + ESCAPE_MARGIN` count toward escape detection.
pub const ESCAPE_MARGIN: f64 = 0.5;
/// Consecutive high estimates needed to classify a run as escaped.
pub const ESCAPE_WINDOW: usize = 1000;

const MULTIGRID_FACTOR: f64 = 8.0;
const MULTIGRID_MAX_COARSE_DX: f64 = 0.05;
const MULTIGRID_MIN_FINE_NODES: usize = 4096;

/// Iteration controls. `h = None` picks the default evolution step
/// `min(Δx/4, 1/(π/Δx + v0))`, well inside the stability region of the
/// `(1 - hA)` factor.
#[derive(Debug, Clone)]
pub struct SolverParams {
    pub h: Option<f64>,
    pub max_iters: usize,
    /// Convergence tolerance on successive eigenvalue estimates.
    pub eig_tol: f64,
    /// Iterations between deflation passes.
    pub ortho_every: usize,
    /// Enforce the parity class on 1D routes after every iteration.
    pub symmetrize_parity: bool,
    /// Seed large-grid solves from a coarsened-grid solve.
    pub multigrid_seed: bool,
    /// Record the eigenvalue estimate history in the result.
    pub record_trace: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            h: None,
            max_iters: 200_000,
            eig_tol: 1e-8,
            ortho_every: 1,
            symmetrize_parity: true,
            multigrid_seed: true,
            record_trace: false,
        }
    }
}

impl SolverParams {
    fn validate(&self) -> Result<()> {
        if !(self.eig_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "eig_tol must be positive, got {}",
                self.eig_tol
            )));
        }
        if self.max_iters == 0 || self.ortho_every == 0 {
            return Err(Error::InvalidParams(
                "max_iters and ortho_every must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Resolve the evolution step for a grid and well height, enforcing the
    /// stability bound `h < 2 / (π/Δx + v0)`.
    pub fn step_for(&self, grid: &RadialGrid, v0: f64) -> Result<f64> {
        let lambda_max = PI / grid.dx() + v0;
        let h = self.h.unwrap_or_else(|| (grid.dx() / 4.0).min(1.0 / lambda_max));
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParams(format!("step h = {h} must be positive")));
        }
        if h >= 2.0 / lambda_max {
            return Err(Error::InvalidParams(format!(
                "step h = {h} violates the stability bound 2/(π/Δx + v0) = {}",
                2.0 / lambda_max
            )));
        }
        Ok(h)
    }
}

/// How an iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Successive eigenvalue estimates agreed within `eig_tol`.
    Converged,
    /// Iteration budget exhausted without convergence.
    MaxIters,
    /// Estimate stayed above `v0 + 0.5` long enough to classify the slot as
    /// having no bound state.
    Escaped,
}

impl Termination {
    pub fn label(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::Escaped => "escaped",
        }
    }
}

/// A converged (or honestly non-converged) eigenpair.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub v0: f64,
    pub sector: Sector,
    /// Index within the sector series, 1-based.
    pub n: usize,
    pub eigenvalue_at_a: f64,
    /// `E(a)` plus the `a -> ∞` tail correction for this sector's route.
    pub eigenvalue_renormalized: f64,
    pub cutoff_a: f64,
    pub step_dx: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Unit sector norm.
    pub eigenfunction: SectorState,
    /// Eigenvalue estimate history, when requested.
    pub trace: Option<Vec<f64>>,
}

/// `S(h)` bound to one grid, sector, potential and step; owns the FFT
/// scratch so repeated steps allocate nothing.
pub struct Propagator {
    op: SectorOperator,
    potential: WellPotential,
    h: f64,
    half_v: Vec<f64>,
    scratch: ApplyScratch,
}

impl Propagator {
    pub fn new(
        grid: Arc<RadialGrid>,
        sector: Sector,
        potential: &WellPotential,
        h: f64,
    ) -> Result<Self> {
        let op = SectorOperator::new(grid.clone(), sector)?;
        let half_v = grid
            .nodes()
            .iter()
            .map(|&x| (-0.5 * h * potential.at_node(x)).exp())
            .collect();
        let scratch = op.scratch();
        Ok(Self {
            op,
            potential: *potential,
            h,
            half_v,
            scratch,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn operator(&self) -> &SectorOperator {
        &self.op
    }

    pub fn potential(&self) -> &WellPotential {
        &self.potential
    }

    /// `S(h) state`, un-normalized.
    pub fn step(&mut self, state: &SectorState) -> Result<SectorState> {
        let u: Vec<f64> = state
            .samples()
            .iter()
            .zip(&self.half_v)
            .map(|(&f, &e)| e * f)
            .collect();
        let au = self
            .op
            .apply_with_scratch(&u, &mut self.scratch)
            .map_err(|e| match e {
                Error::NonFinite { .. } => Error::Unstable(format!(
                    "non-finite samples in kernel apply at h = {}",
                    self.h
                )),
                other => other,
            })?;
        let h = self.h;
        let out: Vec<f64> = u
            .iter()
            .zip(&au)
            .zip(&self.half_v)
            .map(|((&uv, &av), &e)| e * (uv - h * av))
            .collect();
        if !out.iter().all(|v| v.is_finite()) {
            return Err(Error::Unstable(format!(
                "non-finite samples after Strang step at h = {}",
                self.h
            )));
        }
        SectorState::new(state.grid().clone(), state.sector(), out)
    }
}

/// One Strang step with a freshly built propagator; the iteration loop uses
/// a persistent [`Propagator`] instead.
pub fn strang_step(
    state: &SectorState,
    potential: &WellPotential,
    params: &SolverParams,
) -> Result<SectorState> {
    let h = params.step_for(state.grid(), potential.v0())?;
    let mut prop = Propagator::new(state.grid().clone(), state.sector(), potential, h)?;
    prop.step(state)
}

/// `E = -ln <before|after> / h` for `after = S(h) before`, `before` normalized.
pub fn estimate_eigenvalue(before: &SectorState, after: &SectorState, h: f64) -> Result<f64> {
    let overlap = sector_inner(before, after)?;
    if !(overlap > 0.0) {
        return Err(Error::OverlapNotPositive { value: overlap });
    }
    Ok(-overlap.ln() / h)
}

/// Parity projection `(f(x) ∓ f(-x)) / 2` in place; 1D grids only.
pub fn parity_project(state: &mut SectorState) {
    let sector = state.sector();
    if !sector.is_one_dimensional() {
        return;
    }
    let n = state.grid().len();
    let sign = if sector == Sector::OneDOdd { -1.0 } else { 1.0 };
    let samples = state.samples_mut();
    for j in 0..n / 2 {
        let k = n - 1 - j;
        let a = samples[j];
        let b = samples[k];
        samples[j] = 0.5 * (a + sign * b);
        samples[k] = 0.5 * (b + sign * a);
    }
}

/// Subtract sector-inner projections onto every basis member.
pub fn deflate(state: &mut SectorState, basis: &[SectorState]) -> Result<()> {
    for b in basis {
        let c = sector_inner(state, b)?;
        let samples = state.samples_mut();
        for (s, &bv) in samples.iter_mut().zip(b.samples()) {
            *s -= c * bv;
        }
    }
    Ok(())
}

fn normalize_in_place(state: &mut SectorState) -> Result<()> {
    let norm = state.norm();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    for v in state.samples_mut() {
        *v /= norm;
    }
    Ok(())
}

/// Default trigonometric seed for the n-th state of a sector: supported on
/// the well, zero outside.
pub fn default_seed(grid: &Arc<RadialGrid>, sector: Sector, n: usize) -> Result<SectorState> {
    if n == 0 {
        return Err(Error::InvalidParams("state index n is 1-based".into()));
    }
    let nn = n as f64;
    match sector {
        Sector::OneDOdd => SectorState::from_fn(grid.clone(), sector, |x| {
            if x.abs() <= WELL_RADIUS {
                (nn * PI * x).sin()
            } else {
                0.0
            }
        }),
        Sector::OneDEven => SectorState::from_fn(grid.clone(), sector, |x| {
            if x.abs() <= WELL_RADIUS {
                ((2.0 * nn - 1.0) * 0.5 * PI * x).cos()
            } else {
                0.0
            }
        }),
        Sector::L0Direct | Sector::L1 | Sector::L2 => {
            SectorState::from_fn(grid.clone(), sector, |r| {
                if r <= WELL_RADIUS {
                    (nn * PI * r).sin() / r
                } else {
                    0.0
                }
            })
        }
    }
}

/// Linear interpolation of a state onto a finer (or any) grid of the same
/// kind; endpoints extrapolate with the edge slope.
pub fn interpolate_to(state: &SectorState, fine: &Arc<RadialGrid>) -> Result<SectorState> {
    let coarse = state.grid();
    if coarse.kind() != fine.kind() {
        return Err(Error::SectorMismatch(
            "interpolation between different grid kinds".into(),
        ));
    }
    let cn = coarse.len();
    if cn < 2 {
        return Err(Error::InvalidGrid("interpolation needs at least 2 nodes".into()));
    }
    let c0 = coarse.node(0);
    let cdx = coarse.dx();
    let f = state.samples();
    let samples: Vec<f64> = fine
        .nodes()
        .iter()
        .map(|&x| {
            let t = (x - c0) / cdx;
            let j = (t.floor() as isize).clamp(0, cn as isize - 2) as usize;
            let frac = t - j as f64;
            f[j] + (f[j + 1] - f[j]) * frac
        })
        .collect();
    SectorState::new(fine.clone(), state.sector(), samples)
}

/// Converge the n-th state of a sector given the n-1 lower states as an
/// orthonormal deflation basis.
pub fn solve_state(
    v0: f64,
    sector: Sector,
    n: usize,
    grid: &Arc<RadialGrid>,
    params: &SolverParams,
    deflation_basis: &[SectorState],
) -> Result<EigenResult> {
    if deflation_basis.len() + 1 != n {
        return Err(Error::InvalidParams(format!(
            "state n = {n} needs {} deflation states, got {}",
            n - 1,
            deflation_basis.len()
        )));
    }
    let seed = build_seed(v0, sector, n, grid, params, None, deflation_basis)?;
    let potential = WellPotential::new(v0)?;
    let mut prop = Propagator::new(grid.clone(), sector, &potential, params.step_for(grid, v0)?)?;
    iterate(&mut prop, seed, n, params, deflation_basis)
}

/// Converge states `1..=n_max` of a sector in order, reusing one propagator.
/// `warm` provides per-state starting guesses (previous solutions on this or
/// any same-kind grid); states without one fall back to the multigrid or
/// trigonometric seed.
pub fn solve_series(
    v0: f64,
    sector: Sector,
    n_max: usize,
    grid: &Arc<RadialGrid>,
    params: &SolverParams,
    warm: Option<&[SectorState]>,
) -> Result<Vec<EigenResult>> {
    params.validate()?;
    if n_max == 0 {
        return Ok(Vec::new());
    }
    let potential = WellPotential::new(v0)?;
    let h = params.step_for(grid, v0)?;
    let mut prop = Propagator::new(grid.clone(), sector, &potential, h)?;

    // One coarse pass seeds every requested state when no warm start exists.
    let coarse_seeds: Option<Vec<SectorState>> = if params.multigrid_seed
        && warm.map_or(true, |w| w.len() < n_max)
    {
        coarse_solutions(v0, sector, n_max, grid, params)?
    } else {
        None
    };

    let mut results = Vec::with_capacity(n_max);
    let mut basis: Vec<SectorState> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let warm_n = warm.and_then(|w| w.get(n - 1));
        let seed = match warm_n {
            Some(w) => prepare_seed(w, grid, &basis, params)?,
            None => match coarse_seeds.as_ref().and_then(|c| c.get(n - 1)) {
                Some(c) => prepare_seed(c, grid, &basis, params)?,
                None => {
                    let raw = default_seed(grid, sector, n)?;
                    prepare_seed(&raw, grid, &basis, params)?
                }
            },
        };
        let result = iterate(&mut prop, seed, n, params, &basis)?;
        let mut member = result.eigenfunction.clone();
        deflate(&mut member, &basis)?;
        normalize_in_place(&mut member)?;
        basis.push(member);
        results.push(result);
    }
    Ok(results)
}

fn build_seed(
    v0: f64,
    sector: Sector,
    n: usize,
    grid: &Arc<RadialGrid>,
    params: &SolverParams,
    warm: Option<&SectorState>,
    basis: &[SectorState],
) -> Result<SectorState> {
    if let Some(w) = warm {
        return prepare_seed(w, grid, basis, params);
    }
    if params.multigrid_seed {
        if let Some(coarse) = coarse_solutions(v0, sector, n, grid, params)? {
            if let Some(c) = coarse.get(n - 1) {
                return prepare_seed(c, grid, basis, params);
            }
        }
    }
    let raw = default_seed(grid, sector, n)?;
    prepare_seed(&raw, grid, basis, params)
}

/// Interpolate if needed, project, deflate, normalize.
fn prepare_seed(
    raw: &SectorState,
    grid: &Arc<RadialGrid>,
    basis: &[SectorState],
    params: &SolverParams,
) -> Result<SectorState> {
    let mut seed = if raw.grid().len() == grid.len() && **raw.grid() == **grid {
        raw.clone()
    } else {
        interpolate_to(raw, grid)?
    };
    if params.symmetrize_parity {
        parity_project(&mut seed);
    }
    deflate(&mut seed, basis)?;
    normalize_in_place(&mut seed).map_err(|_| {
        Error::InvalidParams("seed vanishes after projection onto the sector subspace".into())
    })?;
    Ok(seed)
}

/// Solve the series on a coarsened grid for use as fine-grid seeds.
/// Returns `None` when the grid is already coarse.
fn coarse_solutions(
    v0: f64,
    sector: Sector,
    n_max: usize,
    grid: &Arc<RadialGrid>,
    params: &SolverParams,
) -> Result<Option<Vec<SectorState>>> {
    if grid.len() < MULTIGRID_MIN_FINE_NODES {
        return Ok(None);
    }
    let coarse_dx = (grid.dx() * MULTIGRID_FACTOR).min(MULTIGRID_MAX_COARSE_DX);
    if coarse_dx < grid.dx() * 1.5 {
        return Ok(None);
    }
    let coarse = crate::grid::make_grid(grid.kind(), grid.cutoff(), coarse_dx)?;
    let coarse_params = SolverParams {
        h: None,
        record_trace: false,
        ..params.clone()
    };
    let results = solve_series(v0, sector, n_max, &coarse, &coarse_params, None)?;
    Ok(Some(
        results.into_iter().map(|r| r.eigenfunction).collect(),
    ))
}

fn iterate(
    prop: &mut Propagator,
    seed: SectorState,
    n: usize,
    params: &SolverParams,
    basis: &[SectorState],
) -> Result<EigenResult> {
    params.validate()?;
    let v0 = prop.potential().v0();
    let h = prop.h();
    let grid = seed.grid().clone();
    let escape_level = v0 + ESCAPE_MARGIN;

    let mut phi = seed;
    let mut last_estimate: Option<f64> = None;
    let mut estimate = f64::NAN;
    let mut trace = params.record_trace.then(Vec::new);
    let mut termination = Termination::MaxIters;
    let mut iterations = params.max_iters;
    let mut high_run = 0usize;

    for k in 1..=params.max_iters {
        let stepped = prop.step(&phi)?;
        estimate = estimate_eigenvalue(&phi, &stepped, h)?;
        if let Some(t) = trace.as_mut() {
            t.push(estimate);
        }

        if estimate > escape_level {
            high_run += 1;
            if high_run >= ESCAPE_WINDOW {
                termination = Termination::Escaped;
                iterations = k;
                break;
            }
        } else {
            high_run = 0;
        }

        let mut next = stepped;
        if k % params.ortho_every == 0 && !basis.is_empty() {
            deflate(&mut next, basis)?;
        }
        if params.symmetrize_parity {
            parity_project(&mut next);
        }
        normalize_in_place(&mut next)?;
        phi = next;

        if let Some(prev) = last_estimate {
            if (estimate - prev).abs() < params.eig_tol {
                termination = Termination::Converged;
                iterations = k;
                break;
            }
        }
        last_estimate = Some(estimate);
    }

    let route = TailRoute::for_sector(phi.sector());
    let renormalized = estimate + renorm::tail_correction(grid.cutoff(), f64::INFINITY, route)?;
    Ok(EigenResult {
        v0,
        sector: phi.sector(),
        n,
        eigenvalue_at_a: estimate,
        eigenvalue_renormalized: renormalized,
        cutoff_a: grid.cutoff(),
        step_dx: grid.dx(),
        iterations,
        converged: termination == Termination::Converged,
        termination,
        eigenfunction: phi,
        trace,
    })
}

/// Weighted residual norm `‖(A + V) f - E f‖ / ‖f‖` of a result.
pub fn residual_norm(result: &EigenResult) -> Result<f64> {
    let state = &result.eigenfunction;
    let op = SectorOperator::new(state.grid().clone(), state.sector())?;
    let potential = WellPotential::new(result.v0)?;
    let af = op.apply(state.samples())?;
    let vf = crate::operators::apply_potential(state, &potential);
    let res: Vec<f64> = af
        .iter()
        .zip(&vf)
        .zip(state.samples())
        .map(|((&a, &v), &f)| a + v - result.eigenvalue_at_a * f)
        .collect();
    let res_state = SectorState::new(state.grid().clone(), state.sector(), res)?;
    let num = sector_inner(&res_state, &res_state)?.sqrt();
    let den = state.norm();
    Ok(num / den)
}
