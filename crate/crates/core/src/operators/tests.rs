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
fn constant_profile_vanishes_at_window_center_1d() {
    // Near the middle of the grid every on-grid difference vanishes; all
    // that survives is the single window endpoint that falls off the grid,
    // bounded by 1/(π Δx M²).
    let grid = sym_grid(4.0, 0.05);
    let state = SectorState::from_fn(grid.clone(), Sector::OneDEven, |_| 1.0).unwrap();
    let out = apply_cauchy_1d(&state).unwrap();
    let mid = grid.len() / 2;
    let m = grid.half_cells() as f64;
    let endpoint = 1.0 / (PI * grid.dx() * m * m);
    assert!(out[mid].abs() <= 1.01 * endpoint, "{} > {}", out[mid], endpoint);
    assert!(out[mid - 1].abs() <= 1.01 * endpoint);
    // Edge nodes see zeros beyond the grid and pick up the truncation tail.
    assert!(out[0] > 1.0);
}

#[test]
fn linear_profile_cancels_by_pv_antisymmetry() {
    let grid = sym_grid(4.0, 0.05);
    let state = SectorState::from_fn(grid.clone(), Sector::OneDOdd, |x| x).unwrap();
    let out = apply_cauchy_1d(&state).unwrap();
    let mid = grid.len() / 2;
    // paired cells cancel exactly; the unpaired window endpoint leaves
    // at most ~1/(π M)
    let bound = 1.05 / (PI * grid.half_cells() as f64);
    assert!(out[mid].abs() <= bound, "{} > {}", out[mid].abs(), bound);
}

#[test]
fn fourier_symbol_of_sine_on_wide_grid() {
    // A(sin kx) ~ |k| sin(kx) far from the truncation edges.
    let k = 2.0 * PI;
    let grid = sym_grid(50.0, 0.001);
    let state = SectorState::from_fn(grid.clone(), Sector::OneDOdd, |x| (k * x).sin()).unwrap();
    let op = SectorOperator::new(grid.clone(), Sector::OneDOdd).unwrap();
    assert_eq!(op.backend(), Backend::Fft);
    let out = op.apply(state.samples()).unwrap();

    // independent direct summation at the checked node
    let i0 = grid
        .nodes()
        .iter()
        .position(|&x| (x - 0.125).abs() < grid.dx())
        .unwrap();
    for i in [i0, grid.len() / 2] {
        let x = grid.node(i);
        let mut oracle = 0.0;
        let m_max = grid.half_cells();
        for m in 1..=m_max {
            let right = if i + m < grid.len() {
                state.samples()[i + m]
            } else {
                0.0
            };
            let left = if i >= m { state.samples()[i - m] } else { 0.0 };
            let fi = state.samples()[i];
            oracle += ((fi - right) + (fi - left)) / ((m * m) as f64);
        }
        oracle /= PI * grid.dx();
        assert_relative_eq!(out[i], oracle, max_relative = 1e-8, epsilon = 1e-8);
        let expected = k.abs() * (k * x).sin();
        if expected.abs() > 0.5 {
            assert_relative_eq!(out[i], expected, max_relative = 0.02);
        } else {
            assert!((out[i] - expected).abs() < 0.02 * k);
        }
    }
}

#[test]
fn l0_unit_sample_matches_hand_sum() {
    // four-cell grid covering [0, 2]; unit sample at the first node
    let grid = rad_grid(2.0, 0.5);
    assert_eq!(grid.len(), 4);
    let mut f = vec![0.0; 4];
    f[0] = 1.0;
    let state = SectorState::new(grid, Sector::L0Direct, f).unwrap();
    let out = apply_radial_l0_direct(&state).unwrap();
    // hand sum: (9/8 + 25/72 + 49/288) * (4/π)
    let expected = (9.0 / 8.0 + 25.0 / 72.0 + 49.0 / 288.0) * 4.0 / PI;
    assert_relative_eq!(out[0], expected, max_relative = 1e-12);
}

#[test]
fn l0_constant_profile_maps_to_zero() {
    // the subtracted form has no exterior terms on the radial route
    let grid = rad_grid(3.0, 0.1);
    let state = SectorState::from_fn(grid, Sector::L0Direct, |_| 2.5).unwrap();
    let out = apply_radial_l0_direct(&state).unwrap();
    for v in out {
        assert!(v.abs() < 1e-10, "constant profile gave {v}");
    }
}

#[test]
fn l0_symmetric_pair_cancels_when_neighbors_match() {
    // the 1/(r-p)² pieces of the j = i±1 pair cancel when f(p±Δx) = f(p)
    let grid = rad_grid(2.0, 0.1);
    let i = 7;
    let p = grid.node(i);
    let dx = grid.dx();
    let fi = 0.83;
    let quad = |j: usize| {
        let dz = (j as f64 - i as f64) * dx;
        (fi - fi) * grid.node(j) / (dz * dz)
    };
    assert_eq!(quad(i - 1) + quad(i + 1), 0.0);
    let _ = p;
}

#[test]
fn l1_zero_profile_maps_to_zero() {
    let grid = rad_grid(2.0, 0.25);
    let state = SectorState::zeros(grid, Sector::L1).unwrap();
    let out = apply_radial_l1(&state).unwrap();
    assert!(out.iter().all(|&v| v == 0.0));
}

#[test]
fn l1_unit_sample_matches_hand_sum() {
    let grid = rad_grid(2.0, 0.5);
    let mut f = vec![0.0; 4];
    f[1] = 1.0;
    let state = SectorState::new(grid, Sector::L1, f).unwrap();
    let out = apply_radial_l1(&state).unwrap();
    // hand sum at p = 0.75: (1 + 25/4 + 49/25) / (2π) scaled by Δx already
    let expected = 921.0 / (200.0 * PI);
    assert_relative_eq!(out[1], expected, max_relative = 1e-12);
}

#[test]
fn l1_singular_coefficient_vanishes() {
    // 2 f(p) - ((r²+p²)/p²) f(r) at r = p is zero for any f
    for p in [0.3, 1.7] {
        for fp in [0.9, -2.4] {
            let coeff = 2.0 * fp - ((p * p + p * p) / (p * p)) * fp;
            assert_eq!(coeff, 0.0);
        }
    }
}

#[test]
fn l2_unit_sample_matches_hand_sum() {
    let grid = rad_grid(2.0, 0.5);
    let mut f = vec![0.0; 4];
    f[2] = 1.0;
    let state = SectorState::new(grid, Sector::L2, f).unwrap();
    let out = apply_radial_l2(&state).unwrap();
    let expected = (5.0 * (-1828.0) * (5.0 / 9.0) + 3.0 * 2080.0 * 2.25f64.ln()) * 0.5
        / (4.0 * PI);
    assert_relative_eq!(out[0], expected, max_relative = 1e-12);
}

#[test]
fn l2_singular_coefficient_identity() {
    for p in [0.4f64, 2.2] {
        let r = p;
        let num = 3.0 * (r.powi(4) + p.powi(4)) - 2.0 * r * r * p * p;
        assert_relative_eq!(num / p.powi(4), 4.0, max_relative = 1e-15);
    }
}

#[test]
fn l2_zero_profile_maps_to_zero() {
    let grid = rad_grid(2.0, 0.25);
    let state = SectorState::zeros(grid, Sector::L2).unwrap();
    let out = apply_radial_l2(&state).unwrap();
    assert!(out.iter().all(|&v| v == 0.0));
}

#[test]
fn pv_pole_pairs_cancel_for_constant_profile() {
    // For constant f the quadratic-singular piece of the l >= 1 kernels
    // reduces to a simple pole whose paired nodes cancel exactly.
    let grid = rad_grid(6.0, 0.01);
    let c = 1.3;
    for &i in &[250, 300, 420] {
        let p = grid.node(i);
        for m in 1..200usize {
            let pole = |offset: f64| -2.0 * c / (p * offset);
            let pair = pole(m as f64 * grid.dx()) + pole(-(m as f64) * grid.dx());
            assert_eq!(pair, 0.0);
        }
    }
}

#[test]
fn constant_profile_apply_is_resolution_stable_for_l1() {
    // The skipped singular node leaves the apply bounded as Δx shrinks.
    let coarse = rad_grid(4.0, 0.02);
    let fine = rad_grid(4.0, 0.01);
    let sc = SectorState::from_fn(coarse.clone(), Sector::L1, |_| 1.0).unwrap();
    let sf = SectorState::from_fn(fine.clone(), Sector::L1, |_| 1.0).unwrap();
    let out_c = apply_radial_l1(&sc).unwrap();
    let out_f = apply_radial_l1(&sf).unwrap();
    // coarse node 99 sits at r = 1.99, midway between fine nodes 198 and 199
    let vc = out_c[99];
    let vf = 0.5 * (out_f[198] + out_f[199]);
    assert!((coarse.node(99) - 0.5 * (fine.node(198) + fine.node(199))).abs() < 1e-12);
    assert_relative_eq!(vc, vf, max_relative = 0.05);
}

#[test]
fn fft_backend_matches_direct_rows() {
    let profile = |x: f64| (-0.7 * x.abs()).exp() * (1.7 * x).sin() + 0.3 * (-x * x).exp();
    let cases = [
        (Sector::OneDEven, sym_grid(3.0, 0.002)),
        (Sector::OneDOdd, sym_grid(3.0, 0.002)),
        (Sector::L0Direct, rad_grid(3.0, 0.002)),
        (Sector::L1, rad_grid(3.0, 0.002)),
        (Sector::L2, rad_grid(3.0, 0.002)),
    ];
    for (sector, grid) in cases {
        let state = SectorState::from_fn(grid.clone(), sector, profile).unwrap();
        let fast = SectorOperator::with_backend(grid.clone(), sector, Backend::Fft).unwrap();
        let slow = SectorOperator::with_backend(grid.clone(), sector, Backend::Direct).unwrap();
        let out_fast = fast.apply(state.samples()).unwrap();
        let out_slow = slow.apply(state.samples()).unwrap();
        let scale = out_slow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // strict pointwise agreement away from the small-p band, where the
        // 1/p^k prefactors amplify transform roundoff
        let mut worst = 0.0f64;
        for (i, (a, b)) in out_fast.iter().zip(&out_slow).enumerate() {
            if grid.node(i).abs() >= 0.6 {
                worst = worst.max((a - b).abs());
            }
        }
        assert!(
            worst <= 1e-9 * scale + 1e-10,
            "sector {}: max far-field deviation {worst} at scale {scale}",
            sector.label()
        );
        // agreement in the sector-weighted norm, the metric eigenvalues see
        let dev = SectorState::new(
            grid.clone(),
            sector,
            out_fast
                .iter()
                .zip(&out_slow)
                .map(|(a, b)| a - b)
                .collect(),
        )
        .unwrap();
        let reference =
            SectorState::new(grid.clone(), sector, out_slow.clone()).unwrap();
        let rel = dev.norm() / reference.norm();
        assert!(
            rel <= 1e-8,
            "sector {}: weighted deviation {rel}",
            sector.label()
        );
        // serial driver produces identical bits
        let serial = fast.apply_serial(state.samples()).unwrap();
        assert_eq!(out_fast, serial);
    }
}

#[test]
fn applies_are_linear() {
    let grid = rad_grid(2.5, 0.05);
    let f = SectorState::from_fn(grid.clone(), Sector::L1, |r| (-r).exp()).unwrap();
    let g = SectorState::from_fn(grid.clone(), Sector::L1, |r| (2.0 * r).sin() / (1.0 + r)).unwrap();
    let combo = SectorState::new(
        grid.clone(),
        Sector::L1,
        f.samples()
            .iter()
            .zip(g.samples())
            .map(|(a, b)| 2.0 * a - 3.0 * b)
            .collect(),
    )
    .unwrap();
    let af = apply_radial_l1(&f).unwrap();
    let ag = apply_radial_l1(&g).unwrap();
    let ac = apply_radial_l1(&combo).unwrap();
    let scale = ac.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..grid.len() {
        assert!(
            (ac[i] - (2.0 * af[i] - 3.0 * ag[i])).abs() <= 1e-11 * scale.max(1.0),
            "node {i}"
        );
    }
}

#[test]
fn kernels_are_symmetric_under_sector_inner() {
    let cases = [
        (Sector::OneDOdd, sym_grid(2.0, 0.02)),
        (Sector::L0Direct, rad_grid(2.0, 0.02)),
        (Sector::L1, rad_grid(2.0, 0.02)),
        (Sector::L2, rad_grid(2.0, 0.02)),
    ];
    for (sector, grid) in cases {
        let f = SectorState::from_fn(grid.clone(), sector, |x| (-x.abs()).exp()).unwrap();
        let g =
            SectorState::from_fn(grid.clone(), sector, |x| x * (-0.5 * x * x).exp()).unwrap();
        let op = SectorOperator::with_backend(grid.clone(), sector, Backend::Direct).unwrap();
        let af = SectorState::new(grid.clone(), sector, op.apply(f.samples()).unwrap()).unwrap();
        let ag = SectorState::new(grid.clone(), sector, op.apply(g.samples()).unwrap()).unwrap();
        let lhs = sector_inner(&f, &ag).unwrap();
        let rhs = sector_inner(&af, &g).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-6, epsilon = 1e-9);
    }
}

#[test]
fn w_sums_match_direct_summation() {
    let grid = rad_grid(2.7, 0.03);
    let fast = direct::w_sums(&grid);
    for i in [0, 1, 17, grid.len() / 2, grid.len() - 1] {
        let slow = direct::w_sum_direct(&grid, i);
        assert_relative_eq!(fast[i], slow, max_relative = 1e-10, epsilon = 1e-12);
    }
}

#[test]
fn sector_inner_matches_closed_forms() {
    let grid = rad_grid(2.0, 0.0005);
    let box_profile = |r: f64| if r < 1.0 { 1.0 } else { 0.0 };
    let l1 = SectorState::from_fn(grid.clone(), Sector::L1, box_profile).unwrap();
    let l2 = SectorState::from_fn(grid.clone(), Sector::L2, box_profile).unwrap();
    // ∫₀¹ r⁴ dr = 1/5, ∫₀¹ r⁶ dr = 1/7
    assert_relative_eq!(
        sector_inner(&l1, &l1).unwrap(),
        4.0 * PI / 3.0 / 5.0,
        max_relative = 1e-5
    );
    assert_relative_eq!(
        sector_inner(&l2, &l2).unwrap(),
        16.0 * PI / 5.0 / 7.0,
        max_relative = 1e-5
    );
    let zero = SectorState::zeros(grid, Sector::L1).unwrap();
    assert_eq!(sector_inner(&l1, &zero).unwrap(), 0.0);
}

#[test]
fn potential_step_convention() {
    let pot = WellPotential::new(2.1).unwrap();
    assert_eq!(pot.evaluate(0.5), 0.0);
    assert_eq!(pot.evaluate(1.5), 2.1);
    // the discontinuity belongs to the outside
    assert_eq!(pot.evaluate(1.0), 2.1);
    assert_eq!(pot.at_node(-1.5), 2.1);
    assert_eq!(pot.at_node(-0.25), 0.0);
    assert!(WellPotential::new(0.0).is_err());
    assert!(WellPotential::new(-1.0).is_err());
}

#[test]
fn state_validation_errors() {
    let sym = sym_grid(2.0, 0.5);
    let rad = rad_grid(2.0, 0.5);
    assert!(SectorState::new(sym.clone(), Sector::L1, vec![0.0; sym.len()]).is_err());
    assert!(SectorState::new(rad.clone(), Sector::OneDOdd, vec![0.0; rad.len()]).is_err());
    assert!(SectorState::new(rad.clone(), Sector::L1, vec![0.0; 3]).is_err());
    assert!(SectorState::new(rad.clone(), Sector::L1, vec![f64::NAN; rad.len()]).is_err());
    let a = SectorState::zeros(rad.clone(), Sector::L1).unwrap();
    let b = SectorState::zeros(rad, Sector::L2).unwrap();
    assert!(sector_inner(&a, &b).is_err());
}

#[test]
fn sector_metadata() {
    assert_eq!(Sector::OneDOdd.weight_exponent(), 0);
    assert_eq!(Sector::L0Direct.weight_exponent(), 2);
    assert_eq!(Sector::L1.weight_exponent(), 4);
    assert_eq!(Sector::L2.weight_exponent(), 6);
    assert_eq!(Sector::L1.orbital_l(), Some(1));
    assert_eq!(Sector::OneDEven.orbital_l(), None);
    assert_eq!(Sector::OneDOdd.orbital_l(), Some(0));
}
