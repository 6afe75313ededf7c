//! Direct nodal summation of the sector kernels: the reference path.
//!
//! All coordinate differences and sums are formed from node indices
//! (`r_j - p_i = (j - i) Δx`, `r_j + p_i = (i + j + 1) Δx`), which keeps the
//! quadrature exact in the index and bit-compatible with the transform path.
//! The singular node `j = i` is skipped everywhere. Log factors are taken as
//! `ln((r-p)²) = 2 ln|r-p|` to avoid squaring small differences.

use crate::grid::RadialGrid;
use std::f64::consts::PI;

/// 1D kernel row: `(1/π) Σ_{1<=|m|<=M} (f_i - f_{i+m}) / (mΔx)² Δx`,
/// window truncated in the relative coordinate, `f = 0` off the grid.
pub(crate) fn cauchy_1d_row(grid: &RadialGrid, f: &[f64], i: usize) -> f64 {
    let n = grid.len();
    let m_max = grid.half_cells();
    let fi = f[i];
    let mut acc = 0.0;
    for m in 1..=m_max {
        let right = if i + m < n { f[i + m] } else { 0.0 };
        let left = if i >= m { f[i - m] } else { 0.0 };
        let mm = m as f64;
        acc += ((fi - right) + (fi - left)) / (mm * mm);
    }
    acc / (PI * grid.dx())
}

/// `l = 0` radial kernel row:
/// `(1/(π p)) Σ_{j≠i} (f_i - f_j) r_j [1/(r_j-p)² - 1/(r_j+p)²] Δx`.
pub(crate) fn radial_l0_row(grid: &RadialGrid, f: &[f64], i: usize) -> f64 {
    let dx = grid.dx();
    let p = grid.node(i);
    let fi = f[i];
    let mut acc = 0.0;
    for j in 0..grid.len() {
        if j == i {
            continue;
        }
        let r = grid.node(j);
        let dz = (j as f64 - i as f64) * dx;
        let sz = (i as f64 + j as f64 + 1.0) * dx;
        let q = 1.0 / (dz * dz) - 1.0 / (sz * sz);
        acc += (fi - f[j]) * r * q;
    }
    acc * dx / (PI * p)
}

/// `l = 1` radial kernel row.
pub(crate) fn radial_l1_row(grid: &RadialGrid, f: &[f64], i: usize) -> f64 {
    let dx = grid.dx();
    let p = grid.node(i);
    let p2 = p * p;
    let p3 = p2 * p;
    let fi = f[i];
    let mut acc = 0.0;
    for j in 0..grid.len() {
        if j == i {
            continue;
        }
        let r = grid.node(j);
        let dz = (j as f64 - i as f64) * dx;
        let sz = (i as f64 + j as f64 + 1.0) * dx;
        let q = 1.0 / (dz * dz) - 1.0 / (sz * sz);
        let lam = 2.0 * (dz.abs().ln() - sz.ln());
        acc += (r / p) * (2.0 * fi - (r * r + p2) / p2 * f[j]) * q - r * f[j] / p3 * lam;
    }
    acc * dx / (2.0 * PI)
}

/// `l = 2` radial kernel row.
pub(crate) fn radial_l2_row(grid: &RadialGrid, f: &[f64], i: usize) -> f64 {
    let dx = grid.dx();
    let p = grid.node(i);
    let p2 = p * p;
    let p4 = p2 * p2;
    let p5 = p4 * p;
    let fi = f[i];
    let mut acc = 0.0;
    for j in 0..grid.len() {
        if j == i {
            continue;
        }
        let r = grid.node(j);
        let r2 = r * r;
        let r4 = r2 * r2;
        let dz = (j as f64 - i as f64) * dx;
        let sz = (i as f64 + j as f64 + 1.0) * dx;
        let q = 1.0 / (dz * dz) - 1.0 / (sz * sz);
        let lam = 2.0 * (dz.abs().ln() - sz.ln());
        acc += (r / p) * (4.0 * fi - f[j] * (3.0 * (r4 + p4) - 2.0 * r2 * p2) / p4) * q
            - 3.0 * f[j] * r * (r2 + p2) / p5 * lam;
    }
    acc * dx / (4.0 * PI)
}

/// `W_i = Σ_{j≠i} r_j [1/(r_j-p_i)² - 1/(r_j+p_i)²] Δx`, the coefficient of
/// `f(p)` shared by all radial kernels. Direct `O(N)` evaluation.
pub(crate) fn w_sum_direct(grid: &RadialGrid, i: usize) -> f64 {
    let dx = grid.dx();
    let mut acc = 0.0;
    for j in 0..grid.len() {
        if j == i {
            continue;
        }
        let r = grid.node(j);
        let dz = (j as f64 - i as f64) * dx;
        let sz = (i as f64 + j as f64 + 1.0) * dx;
        acc += r * (1.0 / (dz * dz) - 1.0 / (sz * sz));
    }
    acc * dx
}

/// All `W_i` in `O(N)` total via harmonic-number prefix sums.
///
/// In index units `W_i = Σ_{m≠0} (m+i+1/2)/m² - Σ_{s=i+1..i+N, s≠2i+1} (s-i-1/2)/s²`,
/// which telescopes to
/// `H(N-1-i) - H(i+N) + (i+1/2)[H₂(N-1-i) + H₂(i+N)] + (i+1/2)/(2i+1)²`.
pub(crate) fn w_sums(grid: &RadialGrid) -> Vec<f64> {
    let n = grid.len();
    // prefix harmonic sums H(k) = Σ_{1..k} 1/j, H2(k) = Σ_{1..k} 1/j²
    let mut h = vec![0.0f64; 2 * n + 1];
    let mut h2 = vec![0.0f64; 2 * n + 1];
    for k in 1..=2 * n {
        let kk = k as f64;
        h[k] = h[k - 1] + 1.0 / kk;
        h2[k] = h2[k - 1] + 1.0 / (kk * kk);
    }
    (0..n)
        .map(|i| {
            let half = i as f64 + 0.5;
            let skip = 2 * i + 1;
            h[n - 1 - i] - h[i + n]
                + half * (h2[n - 1 - i] + h2[i + n])
                + half / ((skip * skip) as f64)
        })
        .collect()
}

/// Off-diagonal matrix entry: the coefficient of `f_j` in `(A f)(p_i)`,
/// `i ≠ j`. Used by the dense-matrix oracle.
pub(crate) fn kernel_entry(sector: crate::operators::Sector, grid: &RadialGrid, i: usize, j: usize) -> f64 {
    use crate::operators::Sector;
    debug_assert_ne!(i, j);
    let dx = grid.dx();
    match sector {
        Sector::OneDEven | Sector::OneDOdd => {
            let m = i.abs_diff(j);
            if m > grid.half_cells() {
                return 0.0;
            }
            let mm = m as f64;
            -1.0 / (mm * mm * PI * dx)
        }
        Sector::L0Direct => {
            let p = grid.node(i);
            let r = grid.node(j);
            let dz = (j as f64 - i as f64) * dx;
            let sz = (i as f64 + j as f64 + 1.0) * dx;
            let q = 1.0 / (dz * dz) - 1.0 / (sz * sz);
            -r * q * dx / (PI * p)
        }
        Sector::L1 => {
            let p = grid.node(i);
            let p2 = p * p;
            let p3 = p2 * p;
            let r = grid.node(j);
            let dz = (j as f64 - i as f64) * dx;
            let sz = (i as f64 + j as f64 + 1.0) * dx;
            let q = 1.0 / (dz * dz) - 1.0 / (sz * sz);
            let lam = 2.0 * (dz.abs().ln() - sz.ln());
            -(r * (r * r + p2) / p3 * q + r / p3 * lam) * dx / (2.0 * PI)
        }
        Sector::L2 => {
            let p = grid.node(i);
            let p2 = p * p;
            let p4 = p2 * p2;
            let p5 = p4 * p;
            let r = grid.node(j);
            let r2 = r * r;
            let r4 = r2 * r2;
            let dz = (j as f64 - i as f64) * dx;
            let sz = (i as f64 + j as f64 + 1.0) * dx;
            let q = 1.0 / (dz * dz) - 1.0 / (sz * sz);
            let lam = 2.0 * (dz.abs().ln() - sz.ln());
            -(r * (3.0 * (r4 + p4) - 2.0 * r2 * p2) / p5 * q
                + 3.0 * r * (r2 + p2) / p5 * lam)
                * dx
                / (4.0 * PI)
        }
    }
}

/// Diagonal matrix entry: the coefficient of `f_i` in `(A f)(p_i)`.
pub(crate) fn kernel_diagonal(
    sector: crate::operators::Sector,
    grid: &RadialGrid,
    i: usize,
) -> f64 {
    use crate::operators::Sector;
    match sector {
        Sector::OneDEven | Sector::OneDOdd => {
            let m_max = grid.half_cells();
            let mut c = 0.0;
            for m in 1..=m_max {
                let mm = m as f64;
                c += 1.0 / (mm * mm);
            }
            2.0 * c / (PI * grid.dx())
        }
        // (2/2π) and (4/4π) alike reduce to W_i/(π p_i)
        Sector::L0Direct | Sector::L1 | Sector::L2 => {
            w_sum_direct(grid, i) / (PI * grid.node(i))
        }
    }
}
