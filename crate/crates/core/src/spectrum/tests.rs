use super::*;
use crate::grid::{make_grid, GridKind};
use approx::assert_relative_eq;

fn sym_grid(a: f64, dx: f64) -> Arc<RadialGrid> {
    make_grid(GridKind::Symmetric, a, dx).unwrap()
}

fn rad_grid(a: f64, dx: f64) -> Arc<RadialGrid> {
    make_grid(GridKind::Radial, a, dx).unwrap()
}

#[test]
fn nonrel_bound_count_inequalities() {
    assert_eq!(nonrel_bound_count(2.0).unwrap(), 0);
    assert_eq!(nonrel_bound_count(5.0).unwrap(), 1);
    assert_eq!(nonrel_bound_count(25.0).unwrap(), 2);
    // just below and above the first threshold π²/4
    let t1 = PI * PI / 4.0;
    assert_eq!(nonrel_bound_count(t1 - 1e-6).unwrap(), 0);
    assert_eq!(nonrel_bound_count(t1 + 1e-6).unwrap(), 1);
    assert!(matches!(
        nonrel_bound_count(t1),
        Err(Error::DegenerateThreshold { .. })
    ));
    assert!(nonrel_bound_count(-1.0).is_err());
}

#[test]
fn infinite_well_asymptote_values() {
    assert_relative_eq!(infinite_well_asymptote(5), 7.46128, epsilon = 1e-5);
    assert_relative_eq!(infinite_well_asymptote(2), 2.74889, epsilon = 1e-5);
    // consecutive same-parity gaps are exactly π
    for n in 1..6 {
        assert_relative_eq!(
            infinite_well_asymptote(n + 2) - infinite_well_asymptote(n),
            PI,
            epsilon = 1e-12
        );
    }
}

#[test]
fn spherical_harmonics_are_normalized_and_have_the_right_nodes() {
    // ∫ |Y|² dΩ = 2π ∫ |Y|² sinθ dθ = 1
    for l in 0..=2u32 {
        for m in -(l as i32)..=(l as i32) {
            let steps = 20_000;
            let mut integral = 0.0;
            for k in 0..steps {
                let theta = PI * (k as f64 + 0.5) / steps as f64;
                integral += spherical_harmonic_sq(l, m, theta).unwrap()
                    * theta.sin()
                    * (PI / steps as f64);
            }
            integral *= 2.0 * PI;
            assert_relative_eq!(integral, 1.0, max_relative = 1e-6);
        }
    }
    // nodal directions
    assert_relative_eq!(
        spherical_harmonic_sq(1, 0, PI / 2.0).unwrap(),
        0.0,
        epsilon = 1e-30
    );
    let magic = (1.0f64 / 3.0).sqrt().acos(); // 3cos²θ = 1
    assert!(spherical_harmonic_sq(2, 0, magic).unwrap() < 1e-15);
    assert!(spherical_harmonic_sq(2, 2, 0.0).unwrap() < 1e-30);
    assert_relative_eq!(
        spherical_harmonic_sq(0, 0, 1.234).unwrap(),
        1.0 / (4.0 * PI),
        epsilon = 1e-15
    );
    assert!(spherical_harmonic_sq(1, 2, 0.5).is_err());
}

#[test]
fn probability_ratio_vanishes_for_interior_state() {
    let grid = rad_grid(3.0, 0.01);
    let state = SectorState::from_fn(grid.clone(), Sector::L0Direct, |r| {
        if r < 0.9 {
            (PI * r / 0.9).sin() / r
        } else {
            0.0
        }
    })
    .unwrap()
    .normalized()
    .unwrap();
    let result = fake_result(state, 2.0);
    let ratio = probability_ratio(&result).unwrap();
    assert!(ratio.abs() < 1e-12);
}

#[test]
fn probability_ratio_rejects_unnormalized_input() {
    let grid = rad_grid(3.0, 0.01);
    let state =
        SectorState::from_fn(grid, Sector::L0Direct, |r| (-r).exp()).unwrap();
    let result = fake_result(state, 2.0);
    assert!(matches!(
        probability_ratio(&result),
        Err(Error::Unnormalized { .. })
    ));
}

fn fake_result(state: SectorState, v0: f64) -> EigenResult {
    EigenResult {
        v0,
        sector: state.sector(),
        n: 1,
        eigenvalue_at_a: 1.0,
        eigenvalue_renormalized: 1.0,
        cutoff_a: state.grid().cutoff(),
        step_dx: state.grid().dx(),
        iterations: 1,
        converged: true,
        termination: crate::evolution::Termination::Converged,
        eigenfunction: state,
        trace: None,
    }
}

#[test]
fn odd_1d_state_maps_onto_matching_radial_profile() {
    let grid = sym_grid(3.0, 0.01);
    let g = SectorState::from_fn(grid, Sector::OneDOdd, |x| {
        x * (-x * x).exp()
    })
    .unwrap()
    .normalized()
    .unwrap();
    let result = fake_result(g, 2.0);
    let prof = radial_profile(&result).unwrap();
    assert_eq!(prof.sector(), Sector::L0Direct);
    // nodes line up exactly; f(r) = g(r)/r ∝ exp(-r²)
    let r0 = prof.grid().node(0);
    let rk = prof.grid().node(40);
    let ratio = prof.samples()[0] / prof.samples()[40];
    assert_relative_eq!(ratio, ((rk * rk - r0 * r0)).exp(), max_relative = 1e-9);
    assert_relative_eq!(prof.norm(), 1.0, max_relative = 1e-9);
}

#[test]
fn density_profile_respects_harmonic_nodes() {
    let grid = rad_grid(3.0, 0.01);
    let f = SectorState::from_fn(grid, Sector::L1, |r| (-r).exp())
        .unwrap()
        .normalized()
        .unwrap();
    let result = fake_result(f, 3.5);
    let samples = density_profile(&result, 1, 0, 10, 21).unwrap();
    // θ = π/2 sits at index 10 of 21
    for chunk in samples.chunks(21) {
        assert!(chunk[10].density < 1e-15);
        assert!(chunk[0].density >= 0.0);
    }
    assert!(density_profile(&result, 1, 2, 10, 21).is_err());
    assert!(density_profile(&result, 2, 0, 10, 21).is_err());
}

#[test]
fn density_profile_l0_is_spherically_symmetric() {
    let grid = sym_grid(3.0, 0.01);
    let g = SectorState::from_fn(grid, Sector::OneDOdd, |x| x * (-x * x).exp())
        .unwrap()
        .normalized()
        .unwrap();
    let result = fake_result(g, 2.1);
    let samples = density_profile(&result, 0, 0, 5, 7).unwrap();
    for chunk in samples.chunks(7) {
        let first = chunk[0].density;
        for s in chunk {
            assert_relative_eq!(s.density, first, max_relative = 1e-12);
        }
    }
}

#[test]
fn scan_brackets_a_toy_threshold() {
    // on a small grid the first odd state appears somewhere below 2.5;
    // scan at 0.25 resolution and check the bracket invariants
    let grid = sym_grid(8.0, 0.02);
    let params = SolverParams::default();
    let outcome = scan_threshold(Sector::OneDOdd, 1, 1.0, 3.0, 0.25, &grid, &params).unwrap();
    match outcome {
        ScanOutcome::Bracketed(report) => {
            assert_relative_eq!(
                report.v0_upper - report.v0_lower,
                report.resolution,
                max_relative = 1e-9
            );
            let upper = &report.result_at_upper;
            assert!(upper.converged);
            assert!(upper.eigenvalue_renormalized < report.v0_upper);
            // re-solve at the lower edge: no state
            let (verdict, lower_result) =
                exists_bound_state(report.v0_lower, Sector::OneDOdd, 1, &grid, &params).unwrap();
            assert_eq!(verdict, Verdict::NotExists);
            assert!(lower_result.eigenvalue_renormalized >= report.v0_lower);
        }
        other => panic!("expected a bracket, got {other:?}"),
    }
}

#[test]
fn scan_reports_not_found_when_range_is_too_low() {
    let grid = sym_grid(6.0, 0.05);
    let params = SolverParams::default();
    let outcome =
        scan_threshold(Sector::OneDOdd, 1, 0.2, 0.6, 0.2, &grid, &params).unwrap();
    assert!(matches!(outcome, ScanOutcome::NotFoundInRange { .. }));
}

#[test]
fn scan_reports_exists_at_start_when_range_is_too_high() {
    let grid = sym_grid(6.0, 0.05);
    let params = SolverParams::default();
    let outcome =
        scan_threshold(Sector::OneDOdd, 1, 4.0, 6.0, 0.5, &grid, &params).unwrap();
    assert!(matches!(outcome, ScanOutcome::ExistsAtStart { .. }));
}

#[test]
fn existence_is_monotone_in_well_height_on_a_toy_grid() {
    let grid = sym_grid(6.0, 0.05);
    let params = SolverParams::default();
    let mut seen_exists = false;
    for k in 0..6 {
        let v0 = 1.6 + 0.4 * k as f64;
        let (verdict, _) = exists_bound_state(v0, Sector::OneDOdd, 1, &grid, &params).unwrap();
        match verdict {
            Verdict::Exists => seen_exists = true,
            Verdict::NotExists => {
                assert!(!seen_exists, "state vanished after appearing, v0 = {v0}");
            }
            Verdict::Undetermined => panic!("undetermined at v0 = {v0}"),
        }
    }
    assert!(seen_exists);
}
