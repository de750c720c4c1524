use discrete_canonical_web::{phi_field, psi_curve, quarter_orbit};

#[test]
fn psi_curve_peaks_at_the_origin() {
    let v = psi_curve(2.0, 0.25).unwrap();
    assert_eq!(v.len(), 17);
    assert!((v[8] - 1.0).abs() < 1e-12);
    assert!((v[0] - v[16]).abs() < 1e-10);
}

#[test]
fn phi_field_is_odd_in_xi() {
    let n = 8;
    let f = phi_field(n).unwrap();
    for i in 0..n {
        for j in 0..n {
            assert!((f[i * n + j] + f[i * n + (n - 1 - j)]).abs() < 1e-12);
        }
    }
}

#[test]
fn orbit_cycles_through_the_rotations() {
    let orbit: serde_json::Value = serde_json::from_str(&quarter_orbit(2, 1).unwrap()).unwrap();
    let sites: Vec<(i64, i64)> =
        orbit.as_array().unwrap().iter().map(|s| (s["q"].as_i64().unwrap(), s["p"].as_i64().unwrap())).collect();
    assert_eq!(sites, vec![(2, 1), (1, -2), (-2, -1), (-1, 2), (2, 1)]);
}
