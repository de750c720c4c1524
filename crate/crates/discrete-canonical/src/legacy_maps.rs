//! The first-attempt kernels between the discrete basis `|Q,P⟩` and the
//! continuum bases, before the interpolating phase removes the edge states,
//! and the algebra of the bare `η_Q` operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::numerics::{unit_phase, UnitIntervalGrid};
use crate::phase_field::SigmaSplit;

/// Which split of the fractional parts the kernel uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LegacyScheme {
    /// σ = 1, σ̄ = 0.
    Naive,
    /// σ = σ̄ = 1/2, the p ↔ q symmetric choice.
    Symmetric,
    General {
        sigma: f64,
        sigma_bar: f64,
    },
}

impl LegacyScheme {
    pub fn general(split: SigmaSplit) -> Self {
        Self::General { sigma: split.sigma, sigma_bar: split.sigma_bar }
    }

    pub fn split(self) -> SigmaSplit {
        match self {
            Self::Naive => SigmaSplit::new(1.0),
            Self::Symmetric => SigmaSplit::symmetric(),
            Self::General { sigma, sigma_bar } => SigmaSplit { sigma, sigma_bar },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Naive => "naive",
            Self::Symmetric => "symmetric",
            Self::General { .. } => "general",
        }
    }
}

fn sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `(sin πa / π) · (−1)^N / (N + a)`, continued to `δ_{N0}` at `a = 0`.
fn shifted_sinc(n: i64, a: f64) -> f64 {
    let denom = n as f64 + a;
    if n == 0 {
        // sin(πa)/(πa), with the series near zero.
        let x = PI * a;
        if x.abs() < 1e-4 {
            return 1.0 - x * x / 6.0;
        }
        return x.sin() / x;
    }
    if a == 0.0 {
        return 0.0;
    }
    sign(n) * (PI * a).sin() / (PI * denom)
}

/// `∫_{−1/2}^{1/2} dη E^{i(N+κ)η} = (2 sin πκ / 2π) (−1)^N / (N+κ)`.
pub fn sinc_kernel(n: i64, kappa: f64) -> f64 {
    shifted_sinc(n, kappa)
}

/// `⟨Q₁,P₁|K+κ⟩` with σ = 1: `(sin πκ/π)(−1)^{K−P₁}/(K−P₁+κ) E^{iκQ₁}`.
pub fn naive_overlap_mom(q1: i64, p1: i64, k: i64, kappa: f64) -> Complex64 {
    shifted_sinc(k - p1, kappa) * unit_phase(kappa * q1 as f64)
}

/// `⟨Q₁,P₁|Q+ξ⟩` with σ = 1: a box, `δ_{QQ₁} E^{−iξP₁}`.
pub fn naive_overlap_pos(q1: i64, p1: i64, q: i64, xi: f64) -> Complex64 {
    if q == q1 {
        unit_phase(-xi * p1 as f64)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// `⟨Q₁,P₁|K+κ⟩ = (2 sin πσκ / 2π)(−1)^{K−P₁}/(K−P₁+σκ) E^{iκQ₁}`.
pub fn sigma_overlap_mom(q1: i64, p1: i64, k: i64, kappa: f64, split: SigmaSplit) -> Complex64 {
    shifted_sinc(k - p1, split.sigma * kappa) * unit_phase(kappa * q1 as f64)
}

/// `⟨Q₁,P₁|Q+ξ⟩ = (2 sin πσ̄ξ / 2π)(−1)^{Q−Q₁}/(Q−Q₁+σ̄ξ) E^{−iξP₁}`.
pub fn sigma_overlap_pos(q1: i64, p1: i64, q: i64, xi: f64, split: SigmaSplit) -> Complex64 {
    shifted_sinc(q - q1, split.sigma_bar * xi) * unit_phase(-xi * p1 as f64)
}

/// `⟨Q₁|η_Q|Q₂⟩ = (i/2π)(δ_{Q₁Q₂} − 1)(−1)^{Q₂−Q₁}/(Q₂−Q₁)`, zero on the
/// diagonal (η has no constant Fourier component).
pub fn eta_q_matrix_element(q1: i64, q2: i64) -> Complex64 {
    let d = q2 - q1;
    if d == 0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::new(0.0, -sign(d) / (2.0 * PI * d as f64))
}

/// `⟨Q₁|[η_Q, Q]|Q₂⟩ = (i/2π)(δ_{Q₁Q₂} − (−1)^{Q₂−Q₁})`.
pub fn eta_q_commutator_element(q1: i64, q2: i64) -> Complex64 {
    let d = q2 - q1;
    let delta = if d == 0 { 1.0 } else { 0.0 };
    Complex64::new(0.0, (delta - sign(d)) / (2.0 * PI))
}

/// `Σ_{|K−P₁|≤R} ∫dκ |⟨Q₁,P₁|K+κ⟩|²` with σ = 1 and the given κ rule.
pub fn naive_completeness(q1: i64, p1: i64, k_range: i64, rule: &UnitIntervalGrid) -> f64 {
    let mut total = 0.0;
    for (&kappa, &w) in rule.nodes().iter().zip(rule.weights()) {
        let s: f64 = (p1 - k_range..=p1 + k_range).map(|k| naive_overlap_mom(q1, p1, k, kappa).norm_sqr()).sum();
        total += w * s;
    }
    total
}

/// `⟨q|0,0⟩` in the symmetric scheme, a real function with jumps at the
/// half-integers.
pub fn symmetric_state_q(q: f64) -> f64 {
    let (big_q, xi) = legacy_split(q);
    sigma_overlap_pos(0, 0, big_q, xi, SigmaSplit::symmetric()).re
}

/// `q = Q + ξ` with `ξ ∈ (−1/2, 1/2]`, the legacy convention.
pub fn legacy_split(q: f64) -> (i64, f64) {
    let big_q = (q - 0.5).ceil();
    (big_q as i64, q - big_q)
}

/// Smooth-in-value taper used to sum the slowly decaying cell series.
fn taper(t: f64) -> f64 {
    if t <= 0.5 {
        1.0
    } else if t >= 1.0 {
        0.0
    } else {
        // C² raised-cosine-type blend on [1/2, 1].
        let s = 2.0 * (t - 0.5);
        1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
    }
}

/// `∫ dq ⟨q|0,0⟩ E^{−ipq}` for the symmetric scheme, cell by cell.
///
/// Each cell is smooth, so a Gauss–Legendre rule is exact to rounding; the
/// cell contributions fall off only like `1/Q` but oscillate as
/// `E^{−i(p+1/2)Q}`, so the series is summed with a smooth taper that
/// converges rapidly unless `p` is close to a half-integer.
pub fn symmetric_fourier(p: f64, cells: i64) -> Complex64 {
    let rule = UnitIntervalGrid::gauss_legendre(40).expect("valid rule");
    let split = SigmaSplit::symmetric();
    let mut acc = Complex64::new(0.0, 0.0);
    for big_q in -cells..=cells {
        let w = taper(big_q.unsigned_abs() as f64 / cells as f64);
        if w == 0.0 {
            continue;
        }
        let mut cell = Complex64::new(0.0, 0.0);
        for (&xi, &wt) in rule.nodes().iter().zip(rule.weights()) {
            let f = sigma_overlap_pos(0, 0, big_q, xi, split).re;
            cell += wt * f * unit_phase(-p * (big_q as f64 + xi));
        }
        acc += w * cell;
    }
    acc
}
