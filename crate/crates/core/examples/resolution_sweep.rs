//! Resolution sweep: eigenvalue drift and wall time per grid step.
//!
//! Usage: cargo run --release -p cauchywell --example resolution_sweep [case]
//! with case one of `l0`, `l1`, `l2`, `edge`, `a-trend` (default `l0`).

use cauchywell::evolution::{solve_series, SolverParams};
use cauchywell::grid::{make_grid, GridKind};
use cauchywell::operators::Sector;
use std::time::Instant;

fn run(v0: f64, sector: Sector, n: usize, a: f64, dx: f64) {
    let kind = sector.grid_kind();
    let grid = make_grid(kind, a, dx).unwrap();
    let params = SolverParams::default();
    let start = Instant::now();
    match solve_series(v0, sector, n, &grid, &params, None) {
        Ok(series) => {
            let r = series.last().unwrap();
            println!(
                "v0={v0:<5} {:<9} n={n} a={a:<5} dx={dx:<7} N={:<7} E(a)={:.6} E(inf)={:.6} iters={:<7} {} [{:.1}s]",
                sector.label(),
                grid.len(),
                r.eigenvalue_at_a,
                r.eigenvalue_renormalized,
                r.iterations,
                r.termination.label(),
                start.elapsed().as_secs_f64()
            );
        }
        Err(e) => println!("v0={v0} {} n={n} a={a} dx={dx}: ERROR {e}", sector.label()),
    }
}

fn main() {
    let case = std::env::args().nth(1).unwrap_or_else(|| "l0".into());
    match case.as_str() {
        "l0" => {
            for dx in [0.02, 0.01, 0.004, 0.002, 0.001] {
                run(2.1, Sector::OneDOdd, 1, 50.0, dx);
            }
        }
        "l0deep" => {
            for dx in [0.02, 0.01, 0.004, 0.002] {
                run(5.2, Sector::OneDOdd, 2, 50.0, dx);
                run(8.3, Sector::OneDOdd, 3, 50.0, dx);
            }
        }
        "l1" => {
            for dx in [0.02, 0.01, 0.004, 0.002] {
                run(3.5, Sector::L1, 1, 50.0, dx);
            }
        }
        "l2" => {
            for dx in [0.02, 0.01, 0.004, 0.002] {
                run(4.8, Sector::L2, 1, 50.0, dx);
            }
        }
        "edge" => {
            // near-threshold margins
            for dx in [0.02, 0.01, 0.004, 0.002, 0.001] {
                run(2.0, Sector::OneDOdd, 1, 50.0, dx);
            }
        }
        "edge2" => {
            for dx in [0.01, 0.004, 0.002] {
                run(5.1, Sector::OneDOdd, 2, 50.0, dx);
                run(8.2, Sector::OneDOdd, 3, 50.0, dx);
            }
        }
        "a-trend" => {
            for a in [50.0, 100.0, 200.0] {
                run(2.1, Sector::OneDOdd, 1, a, 0.001);
            }
        }
        "ratio" => {
            run(2.1, Sector::OneDOdd, 1, 100.0, 0.001);
            run(2.1, Sector::OneDOdd, 1, 500.0, 0.005);
        }
        other => eprintln!("unknown case {other}"),
    }
}
