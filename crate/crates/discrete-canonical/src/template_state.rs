//! The template wavefunction `ψ(x) = ∫_{−1/2}^{1/2} dη E^{iφ(η,x)}`, its
//! tabulation, and the unitarity / self-Fourier / peak-area properties.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{
    fourier_integral, integrate_adaptive, par_map, unit_phase, FourierEstimate, NumericsError, RealLineGrid, TailModel,
    UnitIntervalGrid,
};
use crate::phase_field::{phi_unchecked, split_x};

/// Largest tolerated quadrature error estimate for a single ψ value.
pub const PSI_HARD_TOLERANCE: f64 = 1e-6;
/// Largest tolerated imaginary part of the defining integral.
pub const PSI_IMAG_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TemplateError {
    #[error("ψ({x}) quadrature error estimate {estimate:e} exceeds {PSI_HARD_TOLERANCE:e}")]
    Quadrature { x: f64, estimate: f64 },
    #[error("ψ({x}) has imaginary residue {residue:e}")]
    Imaginary { x: f64, residue: f64 },
    #[error("template grid must be symmetric about 0, got [{x_min}, {x_max}]")]
    AsymmetricGrid { x_min: f64, x_max: f64 },
    #[error("no sign change bracketing a lobe edge in [{a}, {b}]")]
    Bracketing { a: f64, b: f64 },
    #[error("lobe index must be ≥ 1, got {0}")]
    LobeIndex(i64),
    #[error("cutoff {k_range} too small for offset x = {x}, M = {m}")]
    Range { x: f64, m: i64, k_range: i64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, TemplateError>;

/// The η rule used for ψ: 256 equal 12-node Gauss–Legendre panels, so that
/// `E^{iXη}` stays resolved for `|X|` in the hundreds, with the end panels
/// graded geometrically towards the corner vortices at η = ±1/2.
pub fn psi_rule() -> &'static UnitIntervalGrid {
    static RULE: OnceLock<UnitIntervalGrid> = OnceLock::new();
    RULE.get_or_init(|| UnitIntervalGrid::graded(256, 12, 29).expect("valid ψ rule"))
}

fn psi_check_rule() -> &'static UnitIntervalGrid {
    static RULE: OnceLock<UnitIntervalGrid> = OnceLock::new();
    RULE.get_or_init(|| psi_rule().refined())
}

fn psi_complex_with(rule: &UnitIntervalGrid, x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (&eta, &w) in rule.nodes().iter().zip(rule.weights()) {
        acc += w * unit_phase(phi_unchecked(eta, x));
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PsiEvaluation {
    pub value: f64,
    pub imag_residue: f64,
    pub error_estimate: f64,
}

/// ψ(x) with its imaginary residue and a refinement error estimate. Falls
/// back to adaptive bisection when the composite rule and its refinement
/// disagree by more than 1e−10.
pub fn psi_detailed(x: f64) -> Result<PsiEvaluation> {
    let coarse = psi_complex_with(psi_rule(), x);
    let mut value = psi_complex_with(psi_check_rule(), x);
    let mut error_estimate = (value - coarse).norm();
    if error_estimate > 1e-10 {
        let adaptive = integrate_adaptive(|eta| unit_phase(phi_unchecked(eta, x)), -0.5, 0.5, 1e-12, 48)?;
        error_estimate = adaptive.error.max((adaptive.value - value).norm().min(error_estimate));
        value = adaptive.value;
    }
    if error_estimate > PSI_HARD_TOLERANCE {
        return Err(TemplateError::Quadrature { x, estimate: error_estimate });
    }
    if value.im.abs() > PSI_IMAG_TOLERANCE {
        return Err(TemplateError::Imaginary { x, residue: value.im.abs() });
    }
    Ok(PsiEvaluation { value: value.re, imag_residue: value.im.abs(), error_estimate })
}

/// ψ(x) = ⟨0,0|x⟩, real and even.
pub fn psi(x: f64) -> Result<f64> {
    Ok(psi_detailed(x)?.value)
}

/// ψ(X + ξ) for every `X` in `x_lo..=x_hi` at one fractional offset ξ.
///
/// Uses `φ(η, X+ξ) = φ(η, ξ) + Xη`, so the phase field is evaluated once and
/// each further X costs one complex multiply per node.
pub fn psi_cell_batch(xi: f64, x_lo: i64, x_hi: i64) -> Vec<f64> {
    psi_cell_batch_with(psi_rule(), xi, x_lo, x_hi)
}

fn psi_cell_batch_with(rule: &UnitIntervalGrid, xi: f64, x_lo: i64, x_hi: i64) -> Vec<f64> {
    let nodes = rule.nodes();
    let mut acc: Vec<Complex64> = nodes
        .iter()
        .zip(rule.weights())
        .map(|(&eta, &w)| w * unit_phase(phi_unchecked(eta, xi) + x_lo as f64 * eta))
        .collect();
    let step: Vec<Complex64> = nodes.iter().map(|&eta| unit_phase(eta)).collect();
    let mut out = Vec::with_capacity((x_hi - x_lo + 1).max(0) as usize);
    for _ in x_lo..=x_hi {
        out.push(acc.iter().map(|c| c.re).sum());
        for (c, s) in acc.iter_mut().zip(&step) {
            *c *= s;
        }
    }
    out
}

/// Provenance of a [`TemplateTable`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TableMeta {
    pub quadrature_nodes: usize,
    /// Largest difference against the refined rule over probe offsets.
    pub error_estimate: f64,
    /// Largest `|ψ(q) − ψ(−q)|` over the table.
    pub asymmetry: f64,
}

/// ψ sampled on a symmetric uniform grid.
#[derive(Debug, Clone)]
pub struct TemplateTable {
    pub grid: RealLineGrid,
    pub values: Vec<f64>,
    pub meta: TableMeta,
}

/// Tabulates ψ over a grid symmetric about zero.
pub fn build_template_table(grid: RealLineGrid) -> Result<TemplateTable> {
    if !grid.is_symmetric() {
        return Err(TemplateError::AsymmetricGrid { x_min: grid.x_min, x_max: grid.x_max });
    }
    // Group nodes by fractional offset so each ξ is integrated once.
    let mut groups: BTreeMap<i64, (f64, Vec<(usize, i64)>)> = BTreeMap::new();
    for i in 0..grid.len() {
        let (big_x, xi) = split_x(grid.point(i));
        let key = (xi * (1u64 << 40) as f64).round() as i64;
        groups.entry(key).or_insert_with(|| (xi, Vec::new())).1.push((i, big_x));
    }
    let jobs: Vec<(f64, Vec<(usize, i64)>)> = groups.into_values().collect();
    let results = par_map(jobs, |(xi, members)| {
        let lo = members.iter().map(|m| m.1).min().unwrap_or(0);
        let hi = members.iter().map(|m| m.1).max().unwrap_or(0);
        let batch = psi_cell_batch(xi, lo, hi);
        members.into_iter().map(|(i, big_x)| (i, batch[(big_x - lo) as usize])).collect::<Vec<_>>()
    });
    let mut values = vec![0.0; grid.len()];
    for (i, v) in results.into_iter().flatten() {
        values[i] = v;
    }

    let n = values.len();
    let asymmetry = (0..n / 2).map(|i| (values[i] - values[n - 1 - i]).abs()).fold(0.0, f64::max);
    let reach = grid.x_max.floor() as i64;
    let mut error_estimate: f64 = 0.0;
    for xi in [-0.5, -0.25, 0.0, 0.37, 0.49] {
        let a = psi_cell_batch_with(psi_rule(), xi, -reach, reach);
        let b = psi_cell_batch_with(psi_check_rule(), xi, -reach, reach);
        for (u, v) in a.iter().zip(&b) {
            error_estimate = error_estimate.max((u - v).abs());
        }
    }
    Ok(TemplateTable {
        grid,
        values,
        meta: TableMeta { quadrature_nodes: psi_rule().len(), error_estimate, asymmetry },
    })
}

impl TemplateTable {
    /// Exact table value on a node, cubic (four-point Lagrange)
    /// interpolation between nodes, `None` outside the grid.
    pub fn interpolate(&self, q: f64) -> Option<f64> {
        if let Some(i) = self.grid.index_of(q) {
            return Some(self.values[i]);
        }
        if q < self.grid.x_min || q > self.grid.x_max {
            return None;
        }
        let t = (q - self.grid.x_min) / self.grid.step;
        let n = self.values.len();
        let i1 = (t.floor() as usize).clamp(1, n.saturating_sub(3));
        let s = t - i1 as f64;
        let (y0, y1, y2, y3) = (self.values[i1 - 1], self.values[i1], self.values[i1 + 1], self.values[i1 + 2]);
        Some(
            -y0 * s * (s - 1.0) * (s - 2.0) / 6.0 + y1 * (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0
                - y2 * (s + 1.0) * s * (s - 2.0) / 2.0
                + y3 * (s + 1.0) * s * (s - 1.0) / 6.0,
        )
    }

    /// `∫ dq ψ(q) E^{−ipq}`, trapezoid over the table plus the asymptotic
    /// alternating peaks beyond it.
    pub fn fourier(&self, p: f64) -> FourierEstimate {
        fourier_integral(&self.grid, &self.values, p, TailModel::AlternatingPeaks)
    }

    /// `⟨Q,P|q⟩ = ψ(q − Q) E^{−iPq}` from the table.
    pub fn overlap_q(&self, big_q: i64, big_p: i64, q: f64) -> Option<Complex64> {
        Some(self.interpolate(q - big_q as f64)? * unit_phase(-(big_p as f64) * q))
    }
}

/// `⟨Q,P|q⟩ = ψ(q − Q) E^{−iPq}`.
pub fn template_overlap_q(big_q: i64, big_p: i64, q: f64) -> Result<Complex64> {
    Ok(psi(q - big_q as f64)? * unit_phase(-(big_p as f64) * q))
}

/// `ψ₁(z) = Σ_{k≥0} 1/(z+k)²` for `z > 0`.
fn trigamma(mut z: f64) -> f64 {
    let mut acc = 0.0;
    while z < 20.0 {
        acc += 1.0 / (z * z);
        z += 1.0;
    }
    let z2 = 1.0 / (z * z);
    acc + 1.0 / z + 0.5 * z2 + z2 / z * (1.0 / 6.0 - z2 * (1.0 / 30.0 - z2 * (1.0 / 42.0 - z2 / 30.0)))
}

/// `Σ_{K>R} 1/((K+x)(K+x+M))`, assuming every factor is positive.
fn envelope_tail(x: f64, m: i64, r: i64) -> f64 {
    if m == 0 {
        return trigamma(r as f64 + 1.0 + x);
    }
    let mf = m.unsigned_abs() as f64;
    let range: Box<dyn Iterator<Item = i64>> = if m > 0 { Box::new(r + 1..=r + m) } else { Box::new(r + 1 + m..=r) };
    range.map(|k| 1.0 / (k as f64 + x)).sum::<f64>() / mf
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnitarityReport {
    pub x: f64,
    pub m: i64,
    pub k_range: i64,
    /// `Σ_{|K|≤R} ψ(x+K)ψ(x+K+M)`.
    pub raw_sum: f64,
    /// Envelope estimate of the omitted `|K| > R` terms.
    pub tail_estimate: f64,
    /// `|raw + tail − δ_{M0}|`.
    pub residual: f64,
    /// `|raw − δ_{M0}|` without any tail estimate.
    pub raw_residual: f64,
}

/// Unitarity sum with its truncation tail.
///
/// Far out, `ψ(x+K)ψ(x+K+M)` follows `A/((K+x)(K+x+M))` (exactly so at
/// half-integer x, where ψ is a sinc, and with negligible amplitude
/// elsewhere). `A` is fitted separately to the last kept term on each side
/// and the envelope is summed in closed form.
pub fn unitarity_report(x: f64, m: i64, k_range: i64) -> Result<UnitarityReport> {
    let r = k_range;
    if (r as f64) <= x.abs() + m.abs() as f64 + 1.0 {
        return Err(TemplateError::Range { x, m, k_range });
    }
    let (big_x, xi) = split_x(x);
    let lo = big_x - r - m.abs();
    let hi = big_x + r + m.abs();
    let vals = psi_cell_batch(xi, lo, hi);
    let at = |k: i64| vals[(big_x + k - lo) as usize];
    let mut raw = 0.0;
    for k in -r..=r {
        raw += at(k) * at(k + m);
    }
    let right_amp = at(r) * at(r + m) * (r as f64 + x) * (r as f64 + x + m as f64);
    let left_amp = at(-r) * at(-r + m) * (r as f64 - x) * (r as f64 - x - m as f64);
    let tail = right_amp * envelope_tail(x, m, r) + left_amp * envelope_tail(-x, -m, r);
    let target = if m == 0 { 1.0 } else { 0.0 };
    Ok(UnitarityReport {
        x,
        m,
        k_range,
        raw_sum: raw,
        tail_estimate: tail,
        residual: (raw + tail - target).abs(),
        raw_residual: (raw - target).abs(),
    })
}

/// `|Σ_K ψ(x+K)ψ(x+K+M) − δ_{M0}|` with the truncation tail estimated.
pub fn unitarity_residual(x: f64, m: i64, k_range: i64) -> Result<f64> {
    Ok(unitarity_report(x, m, k_range)?.residual)
}

fn psi_fast(x: f64) -> f64 {
    psi_complex_with(psi_rule(), x).re
}

fn lobe_edge(near: f64) -> Result<f64> {
    let (mut a, mut b) = (near - 0.25, near + 0.25);
    let (mut fa, fb) = (psi_fast(a), psi_fast(b));
    if fa * fb > 0.0 {
        return Err(TemplateError::Bracketing { a, b });
    }
    while b - a > 1e-10 {
        let m = 0.5 * (a + b);
        let fm = psi_fast(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// Area of the lobe of ψ around `q = X + 1/2`, between the zero crossings
/// that bracket it (located by bisection to 1e−10). Signed when
/// `sign_resolved`, absolute otherwise.
pub fn peak_area(big_x: i64, sign_resolved: bool) -> Result<f64> {
    if big_x < 1 {
        return Err(TemplateError::LobeIndex(big_x));
    }
    let a = lobe_edge(big_x as f64)?;
    let b = lobe_edge(big_x as f64 + 1.0)?;
    let area = integrate_adaptive(|q| Complex64::new(psi_fast(q), 0.0), a, b, 1e-13, 40)?.value.re;
    Ok(if sign_resolved { area } else { area.abs() })
}

/// The asymptotic lobe area `(−1)^X / (2π(X+1/2)²)`.
pub fn asymptotic_peak_area(big_x: i64) -> f64 {
    let c = big_x as f64 + 0.5;
    let sign = if big_x % 2 == 0 { 1.0 } else { -1.0 };
    sign / (2.0 * PI * c * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_at_origin_matches_dense_trapezoid() {
        // φ(η, x) is periodic in η, so a dense uniform rule is an
        // independent, spectrally accurate oracle away from half-integers.
        for x in [0.0, 0.3, 1.2] {
            let n = 10_000;
            let oracle: f64 = (0..n)
                .map(|k| {
                    let eta = -0.5 + (k as f64 + 0.5) / n as f64;
                    unit_phase(phi_unchecked(eta, x)).re
                })
                .sum::<f64>()
                / n as f64;
            let v = psi(x).unwrap();
            assert!((v - oracle).abs() < 1e-8, "x={x}: {v} vs {oracle}");
        }
        assert!((psi(0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_is_even_and_real() {
        for x in [0.17, 0.5, 2.3, 7.9] {
            let a = psi_detailed(x).unwrap();
            let b = psi_detailed(-x).unwrap();
            assert!((a.value - b.value).abs() < 1e-12);
            assert!(a.imag_residue < 1e-9);
        }
    }

    #[test]
    fn half_integer_values_are_sinc() {
        for k in [0i64, 1, 5, 10] {
            let x = k as f64 + 0.5;
            let exact = (PI * x).sin() / (PI * x);
            assert!((psi(x).unwrap() - exact).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn integers_are_zeros() {
        for k in [1.0, 2.0, 7.0] {
            assert!(psi(k).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn batch_matches_pointwise() {
        let xi = 0.3125;
        let batch = psi_cell_batch(xi, -3, 40);
        for (j, big_x) in (-3..=40).enumerate() {
            let direct = psi(big_x as f64 + xi).unwrap();
            assert!((batch[j] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn overlap_examples() {
        let q = 0.83;
        assert!((template_overlap_q(0, 0, q).unwrap().re - psi(q).unwrap()).abs() < 1e-15);
        assert!((template_overlap_q(1, 0, q).unwrap().re - psi(q - 1.0).unwrap()).abs() < 1e-15);
        let m = template_overlap_q(0, 1, q).unwrap();
        assert!((m - psi(q).unwrap() * unit_phase(-q)).norm() < 1e-15);
    }

    #[test]
    fn small_table_is_even_and_interpolates() {
        let grid = RealLineGrid::symmetric(3.0, 1.0 / 16.0).unwrap();
        let t = build_template_table(grid).unwrap();
        assert!(t.meta.asymmetry < 1e-12);
        assert!(t.meta.error_estimate < 1e-9);
        assert!((t.interpolate(0.0).unwrap() - 1.0).abs() < 1e-12);
        let mid = t.interpolate(0.3).unwrap();
        assert!((mid - psi(0.3).unwrap()).abs() < 1e-3);
        assert!(t.interpolate(3.5).is_none());
        assert!(build_template_table(RealLineGrid::new(-1.0, 2.0, 0.5).unwrap()).is_err());
    }

    #[test]
    fn unitarity_examples() {
        assert!(unitarity_residual(0.3, 0, 50).unwrap() < 1e-5);
        assert!(unitarity_residual(0.3, 3, 50).unwrap() < 1e-5);
        let a = unitarity_report(0.3, 2, 50).unwrap();
        let b = unitarity_report(0.3, -2, 50).unwrap();
        assert!((a.raw_sum - b.raw_sum).abs() < 1e-14);
    }

    #[test]
    fn envelope_tail_is_exact_for_sinc_squares() {
        // Σ_{K>R} 1/(K+1/2)² against direct summation.
        let direct: f64 = (51..2_000_000).map(|k| 1.0 / (k as f64 + 0.5).powi(2)).sum();
        let closed = envelope_tail(0.5, 0, 50);
        assert!((direct - closed).abs() < 1e-6);
        let direct: f64 = (51..2_000_000).map(|k| 1.0 / ((k as f64 + 0.5) * (k as f64 + 3.5))).sum();
        assert!((direct - envelope_tail(0.5, 3, 50)).abs() < 1e-6);
        let direct: f64 = (51..2_000_000).map(|k| 1.0 / ((k as f64 - 0.5) * (k as f64 - 2.5))).sum();
        assert!((direct - envelope_tail(-0.5, -2, 50)).abs() < 1e-6);
    }

    #[test]
    fn peak_area_rejects_bad_index() {
        assert!(matches!(peak_area(0, true), Err(TemplateError::LobeIndex(0))));
    }
}
