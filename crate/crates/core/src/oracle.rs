//! Independent dense-matrix verification path.
//!
//! The sector kernel plus potential is assembled entry-by-entry into a dense
//! matrix on a coarse grid, transformed to weighted coordinates
//! (`y_i = sqrt(w_i Δx) f_i`, in which the sector inner product is the plain
//! dot product), symmetrized, and diagonalized with cyclic Jacobi rotations.
//! Nothing here shares numerical machinery with the evolution module: no
//! FFTs, no power iteration, no deflation. Agreement between the two paths
//! is the primary correctness check on both.
//!
//! The 1D sectors are assembled in the parity-adapted half basis
//! `b_k = (e_{M+k} ∓ e_{M-1-k}) / sqrt(2)`, so each parity class gets its own
//! matrix and there is no eigenvector classification step.

use crate::exec;
use crate::grid::{GridKind, RadialGrid};
use crate::operators::direct;
use crate::operators::{Sector, SectorState, WellPotential};
use crate::{Error, Result};
use std::sync::Arc;

/// Grids above this node count are refused; the oracle is a coarse-grid tool.
pub const ORACLE_NODE_LIMIT: usize = 2000;

const JACOBI_OFF_TOL: f64 = 1e-10;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense symmetric representation of `A + V` in weighted coordinates.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    sector: Sector,
    grid: Arc<RadialGrid>,
    dim: usize,
    /// Row-major, symmetrized.
    matrix: Vec<f64>,
    /// `sqrt(w_i Δx)` per basis index (constant `sqrt(2Δx)`-equivalent on
    /// parity bases).
    scale: Vec<f64>,
    /// Frobenius norm of the pre-symmetrization asymmetry `‖M - Mᵀ‖`.
    asymmetry: f64,
    /// Frobenius norm of the weighted matrix.
    frobenius: f64,
}

impl DenseOperator {
    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.dim + j]
    }

    pub fn asymmetry(&self) -> f64 {
        self.asymmetry
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.frobenius
    }

    /// Map a sampled state into the weighted basis coordinates this matrix
    /// acts on (parity-reduced for the 1D sectors), unit-normalized.
    pub fn weighted_coords(&self, state: &SectorState) -> Result<Vec<f64>> {
        if state.sector() != self.sector {
            return Err(Error::SectorMismatch(format!(
                "oracle sector {} vs state sector {}",
                self.sector.label(),
                state.sector().label()
            )));
        }
        if **state.grid() != *self.grid {
            return Err(Error::GridMismatch);
        }
        let f = state.samples();
        let mut y: Vec<f64> = match self.grid.kind() {
            GridKind::Radial => (0..self.dim).map(|i| f[i] * self.scale[i]).collect(),
            GridKind::Symmetric => {
                let m = self.grid.len() / 2;
                (0..self.dim).map(|k| f[m + k] * self.scale[k]).collect()
            }
        };
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroNorm);
        }
        for v in &mut y {
            *v /= norm;
        }
        Ok(y)
    }

    /// `‖M v - λ v‖₂ / ‖v‖₂` in the weighted coordinates.
    pub fn residual(&self, eigenvalue: f64, vector: &[f64]) -> f64 {
        let n = self.dim;
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..n {
            let mut mv = 0.0;
            for j in 0..n {
                mv += self.matrix[i * n + j] * vector[j];
            }
            let r = mv - eigenvalue * vector[i];
            num += r * r;
            den += vector[i] * vector[i];
        }
        (num / den).sqrt()
    }
}

/// Assemble `A + V` for a sector on a coarse grid.
pub fn assemble(
    sector: Sector,
    grid: &Arc<RadialGrid>,
    potential: &WellPotential,
) -> Result<DenseOperator> {
    assemble_with(sector, grid, Some(potential))
}

/// Assemble the kernel alone, potential suppressed.
pub fn assemble_kernel_only(sector: Sector, grid: &Arc<RadialGrid>) -> Result<DenseOperator> {
    assemble_with(sector, grid, None)
}

fn assemble_with(
    sector: Sector,
    grid: &Arc<RadialGrid>,
    potential: Option<&WellPotential>,
) -> Result<DenseOperator> {
    if grid.kind() != sector.grid_kind() {
        return Err(Error::SectorMismatch(format!(
            "sector {} needs a {} grid",
            sector.label(),
            sector.grid_kind().label()
        )));
    }
    if grid.len() > ORACLE_NODE_LIMIT {
        return Err(Error::OracleNodeLimit {
            nodes: grid.len(),
            limit: ORACLE_NODE_LIMIT,
        });
    }
    let n = grid.len();
    let dx = grid.dx();
    let (dim, raw) = match grid.kind() {
        GridKind::Radial => {
            let rows = exec::map_rows_flat(n, n, |i, row: &mut [f64]| {
                for (j, slot) in row.iter_mut().enumerate() {
                    *slot = if i == j {
                        direct::kernel_diagonal(sector, grid, i)
                            + potential.map_or(0.0, |p| p.at_node(grid.node(i)))
                    } else {
                        direct::kernel_entry(sector, grid, i, j)
                    };
                }
            });
            (n, rows)
        }
        GridKind::Symmetric => {
            // parity projection: (A^P)_{k'k} = A[M+k', M+k] + σ A[M+k', M-1-k]
            let m = n / 2;
            let sign = if sector == Sector::OneDOdd { -1.0 } else { 1.0 };
            let full = |i: usize, j: usize| -> f64 {
                if i == j {
                    direct::kernel_diagonal(sector, grid, i)
                } else {
                    direct::kernel_entry(sector, grid, i, j)
                }
            };
            let rows = exec::map_rows_flat(m, m, |kp, row: &mut [f64]| {
                let i = m + kp;
                for (k, slot) in row.iter_mut().enumerate() {
                    let mut v = full(i, m + k) + sign * full(i, m - 1 - k);
                    if kp == k {
                        if let Some(p) = potential {
                            v += p.at_node(grid.node(i));
                        }
                    }
                    *slot = v;
                }
            });
            (m, rows)
        }
    };

    // weighted coordinates: scale by sqrt(w_i Δx)
    let scale: Vec<f64> = match grid.kind() {
        GridKind::Radial => (0..dim)
            .map(|i| (sector.weight(grid.node(i)) * dx).sqrt())
            .collect(),
        GridKind::Symmetric => vec![(2.0 * dx).sqrt(); dim],
    };
    let mut weighted = raw;
    for i in 0..dim {
        for j in 0..dim {
            weighted[i * dim + j] *= scale[i] / scale[j];
        }
    }

    let mut asym2 = 0.0;
    let mut frob2 = 0.0;
    for i in 0..dim {
        frob2 += weighted[i * dim + i] * weighted[i * dim + i];
        for j in 0..i {
            let a = weighted[i * dim + j];
            let b = weighted[j * dim + i];
            asym2 += 2.0 * (a - b) * (a - b);
            frob2 += a * a + b * b;
        }
    }
    for i in 0..dim {
        for j in 0..i {
            let s = 0.5 * (weighted[i * dim + j] + weighted[j * dim + i]);
            weighted[i * dim + j] = s;
            weighted[j * dim + i] = s;
        }
    }

    Ok(DenseOperator {
        sector,
        grid: grid.clone(),
        dim,
        matrix: weighted,
        scale,
        asymmetry: asym2.sqrt(),
        frobenius: frob2.sqrt(),
    })
}

/// The `count` smallest eigenpairs by cyclic Jacobi rotations. Eigenvectors
/// are orthonormal in the weighted metric and returned in that basis.
pub fn lowest_eigenpairs(op: &DenseOperator, count: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let (values, vectors) = jacobi_eigen(op.matrix.clone(), op.dim)?;
    let mut order: Vec<usize> = (0..op.dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    Ok(order
        .into_iter()
        .take(count)
        .map(|idx| {
            let vec: Vec<f64> = (0..op.dim).map(|i| vectors[i * op.dim + idx]).collect();
            (values[idx], vec)
        })
        .collect())
}

/// All eigenvalues, ascending.
pub fn eigenvalues(op: &DenseOperator) -> Result<Vec<f64>> {
    let (mut values, _) = jacobi_eigen(op.matrix.clone(), op.dim)?;
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Cyclic Jacobi on a symmetric matrix; returns eigenvalues and the
/// column-major eigenvector matrix.
fn jacobi_eigen(mut a: Vec<f64>, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n <= 1 {
        return Ok((a, v));
    }
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                off2 += 2.0 * apq * apq;
            }
        }
        if off2.sqrt() < JACOBI_OFF_TOL {
            let values = (0..n).map(|i| a[i * n + i]).collect();
            let _ = sweep;
            return Ok((values, v));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    if k != p && k != q {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        let new_kp = akp - s * (akq + tau * akp);
                        let new_kq = akq + s * (akp - tau * akq);
                        a[k * n + p] = new_kp;
                        a[p * n + k] = new_kp;
                        a[k * n + q] = new_kq;
                        a[q * n + k] = new_kq;
                    }
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp - s * (vkq + tau * vkp);
                    v[k * n + q] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }
    Err(Error::JacobiNoConvergence {
        sweeps: JACOBI_MAX_SWEEPS,
    })
}
