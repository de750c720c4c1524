use discrete_canonical::numerics::{unit_phase, RealLineGrid};
use discrete_canonical::template_state::{
    asymptotic_peak_area, build_template_table, peak_area, psi, psi_detailed, template_overlap_q, unitarity_report,
};

#[test]
fn table_is_even_and_nearly_normalized() {
    let grid = RealLineGrid::symmetric(10.0, 1.0 / 64.0).unwrap();
    let t = build_template_table(grid).unwrap();
    let n = t.values.len();
    for i in 0..n / 2 {
        assert!((t.values[i] - t.values[n - 1 - i]).abs() < 1e-10);
    }
    // Σ_K ψ(x+K)² = 1. Near integer x the ±10 window holds all of it; at
    // x = 1/2 the lobe tail beyond the window is ~2e-2 and must be added.
    let sum_sq = |x: f64| (-9..=9).map(|k| t.interpolate(x + k as f64).unwrap().powi(2)).sum::<f64>();
    for x in [0.0, 0.1, 0.25] {
        assert!((sum_sq(x) - 1.0).abs() < 1e-4, "x = {x}");
    }
    let report = unitarity_report(0.5, 0, 9).unwrap();
    assert!((sum_sq(0.5) - report.raw_sum).abs() < 1e-10);
    assert!((sum_sq(0.5) - 1.0).abs() > 1e-2);
    assert!((sum_sq(0.5) + report.tail_estimate - 1.0).abs() < 1e-4);
}

#[test]
fn table_has_one_central_peak_and_alternating_lobes() {
    let grid = RealLineGrid::symmetric(6.0, 1.0 / 64.0).unwrap();
    let t = build_template_table(grid).unwrap();
    let (imax, vmax) = t.values.iter().enumerate().fold((0, f64::MIN), |m, (i, &v)| if v > m.1 { (i, v) } else { m });
    assert!((grid.point(imax)).abs() < 1e-12 && (vmax - 1.0).abs() < 1e-12);
    // Lobes near X + 1/2 carry the sign (−1)^X.
    for x in 1..5 {
        let v = t.interpolate(x as f64 + 0.5).unwrap();
        let expected = if x % 2 == 0 { 1.0 } else { -1.0 };
        assert_eq!(v.signum(), expected, "lobe {x}");
    }
}

#[test]
fn degenerate_grid_is_rejected() {
    assert!(RealLineGrid::new(1.0, 1.0, 0.5).is_err());
    assert!(RealLineGrid::new(0.0, 1.0, 0.0).is_err());
}

#[test]
fn psi_is_real() {
    for x in [0.0, 0.3, 0.5, 1.7, 4.25] {
        let e = psi_detailed(x).unwrap();
        assert!(e.imag_residue < 1e-9);
        assert!(e.error_estimate < 1e-8);
    }
}

#[test]
fn overlaps_translate_and_modulate() {
    for q in [-1.3, 0.2, 2.6] {
        let base = psi(q).unwrap();
        assert!((template_overlap_q(0, 0, q).unwrap().re - base).abs() < 1e-15);
        assert!((template_overlap_q(2, 0, q).unwrap().re - psi(q - 2.0).unwrap()).abs() < 1e-15);
        assert!((template_overlap_q(0, 3, q).unwrap() - base * unit_phase(-3.0 * q)).norm() < 1e-14);
    }
}

#[test]
fn unitarity_is_symmetric_in_m() {
    for m in 1..=4 {
        let a = unitarity_report(0.1, m, 50).unwrap();
        let b = unitarity_report(0.1, -m, 50).unwrap();
        assert!((a.raw_sum - b.raw_sum).abs() < 1e-13);
        assert!(a.residual < 1e-5);
    }
}

#[test]
fn peak_areas_follow_the_asymptotic_law() {
    let a5 = peak_area(5, true).unwrap();
    assert!((a5 / asymptotic_peak_area(5) - 1.0).abs() < 0.05);
    assert!((asymptotic_peak_area(5) + 1.0 / (2.0 * std::f64::consts::PI * 30.25)).abs() < 1e-15);
    let a10 = peak_area(10, true).unwrap();
    assert!((a10 / 1.4437e-3 - 1.0).abs() < 0.02);
    let a6 = peak_area(6, true).unwrap();
    let trend = -(6.5f64 / 5.5).powi(2);
    assert!((a5 / a6 / trend - 1.0).abs() < 0.02);
}
