//! Existence verdicts, well-depth threshold scans, and physical observables.
//!
//! A converged eigenvalue at cutoff `a` can sit below `v0` while its
//! renormalized `a -> ∞` value does not; the renormalized value decides
//! existence, with a strict `E_∞ < v0` rule and no safety margin. Threshold
//! scans walk `v0` upward at fixed resolution (0.1 by default) until the
//! first verdict flip and report the bracketing pair. Scans warm-start each
//! state chain from the previous `v0`, which changes nothing about verdicts
//! and saves most of the iterations.

use crate::evolution::{self, EigenResult, SolverParams};
use crate::grid::{make_grid, RadialGrid, WELL_RADIUS};
use crate::operators::{Sector, SectorState};
use crate::renorm;
use crate::{Error, Result};
use std::f64::consts::PI;
use std::sync::Arc;

/// Existence verdict for a `(v0, sector, n)` slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Exists,
    NotExists,
    /// The solver did not converge; no verdict.
    Undetermined,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Exists => "exists",
            Verdict::NotExists => "not_exists",
            Verdict::Undetermined => "undetermined",
        }
    }
}

fn verdict_of(result: &EigenResult) -> Verdict {
    use crate::evolution::Termination;
    match result.termination {
        Termination::Converged => {
            if result.eigenvalue_renormalized < result.v0 {
                Verdict::Exists
            } else {
                Verdict::NotExists
            }
        }
        Termination::Escaped => Verdict::NotExists,
        Termination::MaxIters => Verdict::Undetermined,
    }
}

/// Solve the n-th state (converging the lower ones as deflation basis) and
/// decide existence from the renormalized eigenvalue.
pub fn exists_bound_state(
    v0: f64,
    sector: Sector,
    n: usize,
    grid: &Arc<RadialGrid>,
    params: &SolverParams,
) -> Result<(Verdict, EigenResult)> {
    let mut series = evolution::solve_series(v0, sector, n, grid, params, None)?;
    let result = series.pop().expect("series is n long");
    let verdict = verdict_of(&result);
    Ok((verdict, result))
}

/// A resolved existence bracket: no state at `v0_lower`, a state at
/// `v0_upper = v0_lower + resolution`.
#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub sector: Sector,
    pub n: usize,
    pub v0_lower: f64,
    pub v0_upper: f64,
    pub resolution: f64,
    /// The converged state at the upper edge.
    pub result_at_upper: EigenResult,
}

/// Outcome of a threshold scan.
#[derive(Debug, Clone)]
pub enum ScanOutcome {
    Bracketed(ThresholdReport),
    /// The state already exists at the scan start; no bracket inside range.
    ExistsAtStart { v0: f64, result: EigenResult },
    /// The whole range scanned without an existence flip.
    NotFoundInRange { v0_last: f64 },
}

/// Walk `v0` upward from `v0_start` in `resolution` steps until the first
/// (no-state, state) pair.
pub fn scan_threshold(
    sector: Sector,
    n: usize,
    v0_start: f64,
    v0_stop: f64,
    resolution: f64,
    grid: &Arc<RadialGrid>,
    params: &SolverParams,
) -> Result<ScanOutcome> {
    if !(resolution > 0.0) || v0_start >= v0_stop || !(v0_start > 0.0) {
        return Err(Error::InvalidParams(format!(
            "scan range [{v0_start}, {v0_stop}] at resolution {resolution} is invalid"
        )));
    }
    let mut warm: Option<Vec<SectorState>> = None;
    let mut previous: Option<f64> = None;
    let mut k = 0usize;
    loop {
        let v0 = v0_start + k as f64 * resolution;
        if v0 > v0_stop + 1e-9 * resolution {
            return Ok(ScanOutcome::NotFoundInRange {
                v0_last: v0_start + (k.saturating_sub(1)) as f64 * resolution,
            });
        }
        let series = evolution::solve_series(v0, sector, n, grid, params, warm.as_deref())?;
        let result = series.last().expect("series is n long").clone();
        match verdict_of(&result) {
            Verdict::Undetermined => {
                return Err(Error::Undetermined {
                    v0,
                    sector: sector.label().into(),
                    n,
                });
            }
            Verdict::Exists => {
                return Ok(match previous {
                    Some(lower) => ScanOutcome::Bracketed(ThresholdReport {
                        sector,
                        n,
                        v0_lower: lower,
                        v0_upper: v0,
                        resolution,
                        result_at_upper: result,
                    }),
                    None => ScanOutcome::ExistsAtStart { v0, result },
                });
            }
            Verdict::NotExists => {
                previous = Some(v0);
            }
        }
        warm = Some(series.into_iter().map(|r| r.eigenfunction).collect());
        k += 1;
    }
}

/// Threshold scan with a two-grid budget: walk the range on `walk_grid`,
/// then re-verify the bracket edges on `verify_grid` (typically the
/// production resolution), sliding the bracket if a verdict flips under
/// refinement. The reported bracket holds at the verify resolution.
pub fn scan_threshold_refined(
    sector: Sector,
    n: usize,
    v0_start: f64,
    v0_stop: f64,
    resolution: f64,
    walk_grid: &Arc<RadialGrid>,
    verify_grid: &Arc<RadialGrid>,
    params: &SolverParams,
) -> Result<ScanOutcome> {
    let walked = scan_threshold(sector, n, v0_start, v0_stop, resolution, walk_grid, params)?;
    let same_grid = **walk_grid == **verify_grid;
    let (mut lower, mut upper) = match walked {
        ScanOutcome::Bracketed(report) => {
            if same_grid {
                return Ok(ScanOutcome::Bracketed(report));
            }
            (report.v0_lower, report.v0_upper)
        }
        ScanOutcome::ExistsAtStart { v0, result } => {
            if same_grid {
                return Ok(ScanOutcome::ExistsAtStart { v0, result });
            }
            (v0 - resolution, v0)
        }
        not_found => return Ok(not_found),
    };
    let verify = |v0: f64| -> Result<(Verdict, EigenResult)> {
        let mut series = evolution::solve_series(v0, sector, n, verify_grid, params, None)?;
        let result = series.pop().expect("series is n long");
        let verdict = verdict_of(&result);
        if verdict == Verdict::Undetermined {
            return Err(Error::Undetermined {
                v0,
                sector: sector.label().into(),
                n,
            });
        }
        Ok((verdict, result))
    };

    // Slide until the verified verdicts straddle the bracket.
    let mut upper_result = loop {
        let (upper_verdict, result) = verify(upper)?;
        if upper_verdict == Verdict::Exists {
            break result;
        }
        lower = upper;
        upper += resolution;
        if upper > v0_stop + 1e-9 * resolution {
            return Ok(ScanOutcome::NotFoundInRange { v0_last: lower });
        }
    };
    loop {
        if lower < v0_start - 1e-9 * resolution {
            return Ok(ScanOutcome::ExistsAtStart {
                v0: upper,
                result: upper_result,
            });
        }
        let (lower_verdict, result) = verify(lower)?;
        if lower_verdict == Verdict::NotExists {
            break;
        }
        upper = lower;
        upper_result = result;
        lower -= resolution;
    }
    Ok(ScanOutcome::Bracketed(ThresholdReport {
        sector,
        n,
        v0_lower: lower,
        v0_upper: upper,
        resolution,
        result_at_upper: upper_result,
    }))
}

/// Map a converged state to its radial 3D profile, normalized in the
/// `l = 0` weight: `oneD_odd` results become `f(r) = g(r)/r` on the positive
/// half (midpoint nodes line up exactly); radial results pass through.
pub fn radial_profile(result: &EigenResult) -> Result<SectorState> {
    let state = &result.eigenfunction;
    match state.sector() {
        Sector::OneDOdd => {
            let grid = state.grid();
            let half = grid.len() / 2;
            let radial = make_grid(crate::grid::GridKind::Radial, grid.cutoff(), grid.dx())?;
            let samples: Vec<f64> = (0..radial.len())
                .map(|i| state.samples()[half + i] / radial.node(i))
                .collect();
            SectorState::new(radial, Sector::L0Direct, samples)?.normalized()
        }
        Sector::L0Direct | Sector::L1 | Sector::L2 => state.clone().normalized(),
        Sector::OneDEven => Err(Error::SectorMismatch(
            "even 1D states have no 3D interpretation".into(),
        )),
    }
}

/// Tunneling ratio `P_out / P_in = (1 - P_in) / P_in`, with `P_in` the
/// sector-weighted probability inside the well.
pub fn probability_ratio(result: &EigenResult) -> Result<f64> {
    let norm = result.eigenfunction.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::Unnormalized { norm });
    }
    let profile = radial_profile(result)?;
    let grid = profile.grid();
    let sector = profile.sector();
    let dx = grid.dx();
    let mut inside = 0.0;
    for (i, &f) in profile.samples().iter().enumerate() {
        let r = grid.node(i);
        if r < WELL_RADIUS {
            inside += sector.weight(r) * f * f * dx;
        }
    }
    if !(inside > 0.0) {
        return Err(Error::ZeroNorm);
    }
    Ok((1.0 - inside) / inside)
}

/// `|Y_l^m(θ)|²` in the orthonormalized convention; φ-independent.
pub fn spherical_harmonic_sq(l: u32, m: i32, theta: f64) -> Result<f64> {
    if m.unsigned_abs() > l || l > 2 {
        return Err(Error::InvalidHarmonic { l: l as i32, m });
    }
    let (sin_t, cos_t) = theta.sin_cos();
    Ok(match (l, m.abs()) {
        (0, 0) => 1.0 / (4.0 * PI),
        (1, 0) => 3.0 / (4.0 * PI) * cos_t * cos_t,
        (1, 1) => 3.0 / (8.0 * PI) * sin_t * sin_t,
        (2, 0) => {
            let q = 3.0 * cos_t * cos_t - 1.0;
            5.0 / (16.0 * PI) * q * q
        }
        (2, 1) => 15.0 / (8.0 * PI) * sin_t * sin_t * cos_t * cos_t,
        (2, 2) => 15.0 / (32.0 * PI) * sin_t.powi(4),
        _ => unreachable!(),
    })
}

/// One `(r, θ)` sample of `|ψ|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    pub r: f64,
    pub theta: f64,
    pub density: f64,
}

/// Sample `|ψ|²(r, θ) = |R(r)|² |Y_l^m(θ)|²` on an `(r, θ)` lattice; the φ
/// dependence drops out. `R` is rebuilt from the sector profile so that
/// `∫ r² R² dr = 1`.
pub fn density_profile(
    result: &EigenResult,
    l: u32,
    m: i32,
    r_samples: usize,
    theta_samples: usize,
) -> Result<Vec<DensitySample>> {
    if m.unsigned_abs() > l || l > 2 {
        return Err(Error::InvalidHarmonic { l: l as i32, m });
    }
    let sector_l = result
        .sector
        .orbital_l()
        .ok_or_else(|| Error::SectorMismatch("sector has no 3D interpretation".into()))?;
    if sector_l != l {
        return Err(Error::SectorMismatch(format!(
            "result is an l = {sector_l} state, asked for l = {l}"
        )));
    }
    if r_samples == 0 || theta_samples < 2 {
        return Err(Error::InvalidParams(
            "density lattice needs r_samples >= 1 and theta_samples >= 2".into(),
        ));
    }
    let profile = radial_profile(result)?;
    let grid = profile.grid();
    let n = grid.len();
    let stride = n.div_ceil(r_samples);
    let pref = match l {
        0 => 4.0 * PI,
        1 => 4.0 * PI / 3.0,
        2 => 16.0 * PI / 5.0,
        _ => unreachable!(),
    };
    let mut out = Vec::new();
    for i in (0..n).step_by(stride) {
        let r = grid.node(i);
        let f = profile.samples()[i];
        let radial_sq = pref * r.powi(2 * l as i32) * f * f;
        for k in 0..theta_samples {
            let theta = PI * k as f64 / (theta_samples - 1) as f64;
            let y2 = spherical_harmonic_sq(l, m, theta)?;
            out.push(DensitySample {
                r,
                theta,
                density: radial_sq * y2,
            });
        }
    }
    Ok(out)
}

/// Number of bound states of the nonrelativistic well `-Δ + V`: exactly `n`
/// states when `(2n-1)² π²/4 < v0 < (2n+1)² π²/4`.
pub fn nonrel_bound_count(v0: f64) -> Result<usize> {
    if !(v0 > 0.0) {
        return Err(Error::InvalidPotential(format!(
            "well height must be positive, got {v0}"
        )));
    }
    let t = 2.0 * v0.sqrt() / PI;
    let x = 0.5 * (t + 1.0);
    if (x - x.round()).abs() < 1e-12 {
        return Err(Error::DegenerateThreshold { v0 });
    }
    Ok(x.floor() as usize)
}

/// Deep-well 1D level asymptote `E_n = nπ/2 - π/8`, a good estimate from
/// `n = 5` on; consecutive same-parity gaps are exactly π.
pub fn infinite_well_asymptote(n: usize) -> f64 {
    debug_assert!(n >= 1);
    n as f64 * PI / 2.0 - PI / 8.0
}

/// One table cell: a renormalized eigenvalue, an absent state, or a solver
/// failure.
#[derive(Debug, Clone, PartialEq)]
pub enum CellValue {
    Present(f64),
    Absent,
    Failed(String),
}

/// A `(sector, n)` row of renormalized eigenvalues across the `v0` columns.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub l: u32,
    pub n: usize,
    pub sector: Sector,
    pub cells: Vec<CellValue>,
}

/// The computed spectrum grid: rows ordered by `(l, n)`, columns by `v0`.
#[derive(Debug, Clone)]
pub struct SpectrumTable {
    pub v0_values: Vec<f64>,
    pub rows: Vec<TableRow>,
}

/// Build the eigenvalue table for the requested series depths per orbital
/// sector. `l = 0` solves ride the odd 1D route. Columns are scanned in
/// ascending `v0` with warm starts.
pub fn build_table(
    v0_values: &[f64],
    series: &[(u32, usize)],
    grid_for_l: impl Fn(u32) -> Result<Arc<RadialGrid>>,
    params: &SolverParams,
) -> Result<SpectrumTable> {
    let mut sorted = v0_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut rows: Vec<TableRow> = Vec::new();
    for &(l, n_max) in series {
        let sector = match l {
            0 => Sector::OneDOdd,
            1 => Sector::L1,
            2 => Sector::L2,
            _ => {
                return Err(Error::InvalidParams(format!(
                    "no kernel available for l = {l}"
                )))
            }
        };
        let grid = grid_for_l(l)?;
        let mut cells: Vec<Vec<CellValue>> = vec![Vec::new(); n_max];
        let mut warm: Option<Vec<SectorState>> = None;
        for &v0 in &sorted {
            match evolution::solve_series(v0, sector, n_max, &grid, params, warm.as_deref()) {
                Ok(series_results) => {
                    for (slot, result) in cells.iter_mut().zip(&series_results) {
                        slot.push(match verdict_of(result) {
                            Verdict::Exists => {
                                CellValue::Present(result.eigenvalue_renormalized)
                            }
                            Verdict::NotExists => CellValue::Absent,
                            Verdict::Undetermined => {
                                CellValue::Failed("did not converge".into())
                            }
                        });
                    }
                    warm = Some(series_results.into_iter().map(|r| r.eigenfunction).collect());
                }
                Err(err) => {
                    let msg = err.to_string();
                    for slot in cells.iter_mut() {
                        slot.push(CellValue::Failed(msg.clone()));
                    }
                    warm = None;
                }
            }
        }
        for (idx, cell_row) in cells.into_iter().enumerate() {
            rows.push(TableRow {
                l,
                n: idx + 1,
                sector,
                cells: cell_row,
            });
        }
    }
    Ok(SpectrumTable {
        v0_values: sorted,
        rows,
    })
}

pub use crate::renorm::renormalize;

/// Convenience re-export so callers can follow a solve with observables
/// without importing the evolution module.
pub fn solve_and_renormalize(
    v0: f64,
    sector: Sector,
    n: usize,
    grid: &Arc<RadialGrid>,
    params: &SolverParams,
) -> Result<EigenResult> {
    let mut series = evolution::solve_series(v0, sector, n, grid, params, None)?;
    let result = series.pop().expect("series is n long");
    renorm::renormalize(&result)
}

/// Existence rule applied to a finished result.
pub fn verdict_for(result: &EigenResult) -> Verdict {
    verdict_of(result)
}

#[cfg(test)]
mod tests;
