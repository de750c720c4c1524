//! The theta sum `Σ_K E^{−K²/2 + K(x+iη)}`, its product form, the smooth
//! phase `φ(η, x)` and the unimodular interpolating factor built from it.
//!
//! Phases are in E-units throughout: `theta = r·E^{iφ}` with `E^{iφ} = e^{2πiφ}`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::unit_phase;

/// Terms of the theta sum kept by default (`|K| ≤ 6`).
pub const THETA_TERMS: i64 = 6;
/// Factors of the product form kept by default (`K ≤ 8`).
pub const PRODUCT_FACTORS: i64 = 8;
/// Points closer than this to a zero of the theta function are rejected.
pub const VORTEX_EXCLUSION: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhaseError {
    #[error("x = {x} exceeds the summation range |x| ≤ {n_max}; shift x by an integer first")]
    Range { x: f64, n_max: i64 },
    #[error("({eta}, {x}) lies within {VORTEX_EXCLUSION:e} of the vortex at ({v_eta}, {v_x})")]
    Vortex { eta: f64, x: f64, v_eta: f64, v_x: f64 },
}

pub type Result<T> = std::result::Result<T, PhaseError>;

#[inline]
fn e_pow(x: f64) -> f64 {
    (TAU * x).exp()
}

/// Reduces η to `(−1/2, 1/2]`.
#[inline]
pub fn reduce_eta(eta: f64) -> f64 {
    eta - (eta - 0.5).ceil()
}

/// Splits `x = X + ξ` with integer `X` and `ξ ∈ [−1/2, 1/2)`.
#[inline]
pub fn split_x(x: f64) -> (i64, f64) {
    let big_x = (x + 0.5).floor();
    (big_x as i64, x - big_x)
}

/// `Σ_{|K| ≤ n_max} E^{−K²/2 + K(x + iη)}`.
pub fn theta_sum(eta: f64, x: f64, n_max: i64) -> Result<Complex64> {
    let n_max = n_max.max(1);
    if x.abs() > n_max as f64 {
        return Err(PhaseError::Range { x, n_max });
    }
    let mut acc = Complex64::new(0.0, 0.0);
    // Smallest terms first.
    for k in (1..=n_max).rev() {
        for kk in [k, -k] {
            let kf = kk as f64;
            acc += e_pow(-0.5 * kf * kf + kf * x) * unit_phase(kf * eta);
        }
    }
    Ok(acc + 1.0)
}

/// `Π_{K=1}^{k_max}(1 − E^{−K}) · Π_{K=0}^{k_max}(1 + E^{x+iη−K−1/2})(1 + E^{−x−iη−K−1/2})`.
///
/// Arguments with `|x| > 1/2` are reduced with
/// `θ(η, X + ξ) = E^{Xξ + X²/2 + iXη} θ(η, ξ)`.
pub fn theta_product(eta: f64, x: f64, k_max: i64) -> Complex64 {
    let k_max = k_max.max(1);
    let (big_x, xi) = if x.abs() <= 0.5 { (0, x) } else { split_x(x) };
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 1..=k_max {
        acc *= 1.0 - e_pow(-(k as f64));
    }
    let w = unit_phase(eta);
    for k in 0..=k_max {
        let kf = k as f64 + 0.5;
        acc *= (1.0 + e_pow(xi - kf) * w) * (1.0 + e_pow(-xi - kf) * w.conj());
    }
    if big_x != 0 {
        let xf = big_x as f64;
        acc *= e_pow(xf * xi + 0.5 * xf * xf) * unit_phase(xf * eta);
    }
    acc
}

fn nearest_vortex(eta: f64, x: f64) -> (f64, f64, f64) {
    let v_eta = (eta - 0.5).round() + 0.5;
    let v_x = (x - 0.5).round() + 0.5;
    (v_eta, v_x, (eta - v_eta).hypot(x - v_x))
}

/// Phase of the theta function on the smooth branch: the sum of principal
/// arguments of the product factors at the reduced point, plus `X·η` from
/// the quasi-period. Periodic in η, and `φ(η, x+1) = φ(η, x) + η` for η in
/// `(−1/2, 1/2]`.
pub fn phi(eta: f64, x: f64) -> Result<f64> {
    let (v_eta, v_x, d) = nearest_vortex(eta, x);
    if d < VORTEX_EXCLUSION {
        return Err(PhaseError::Vortex { eta, x, v_eta, v_x });
    }
    Ok(phi_unchecked(eta, x))
}

/// [`phi`] without the vortex guard, for quadrature nodes that are known
/// to stay off the vortex lattice.
#[inline]
pub fn phi_unchecked(eta: f64, x: f64) -> f64 {
    let er = reduce_eta(eta);
    let (big_x, xi) = split_x(x);
    let w = unit_phase(er);
    let mut s = 0.0;
    for k in 0..=PRODUCT_FACTORS {
        let kf = k as f64 + 0.5;
        s += (1.0 + e_pow(xi - kf) * w).arg();
        s += (1.0 + e_pow(-xi - kf) * w.conj()).arg();
    }
    s / TAU + big_x as f64 * er
}

/// Modulus/phase pair of the theta sum at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseSample {
    pub eta: f64,
    pub x: f64,
    pub r: f64,
    pub phi: f64,
}

/// `(r, φ)` at `(η, x)`; `r` from the product form, which stays accurate
/// for any `x`.
pub fn phase_sample(eta: f64, x: f64) -> Result<PhaseSample> {
    let phi = phi(eta, x)?;
    let r = theta_product(eta, x, PRODUCT_FACTORS).norm();
    Ok(PhaseSample { eta, x, r, phi })
}

/// `σ + σ̄ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaSplit {
    pub sigma: f64,
    pub sigma_bar: f64,
}

impl SigmaSplit {
    pub fn new(sigma: f64) -> Self {
        Self { sigma, sigma_bar: 1.0 - sigma }
    }

    pub fn symmetric() -> Self {
        Self::new(0.5)
    }
}

/// `U(η₁, η₂) = E^{iσ̄η₁η₂ − iφ(η₁,η₂)}`.
pub fn interpolator_u(eta1: f64, eta2: f64, split: SigmaSplit) -> Result<Complex64> {
    Ok(interpolator_u_forms(eta1, eta2, split)?.0)
}

/// Both closed forms of `U`: `E^{iσ̄η₁η₂ − iφ(η₁,η₂)}` and
/// `E^{−iση₁η₂ + iφ(η₂,η₁)}`. They agree through the sum rule
/// `φ(η,ξ) + φ(ξ,η) = ξη`, which outside the fundamental square holds up to
/// an integer and so still fixes `U`.
pub fn interpolator_u_forms(eta1: f64, eta2: f64, split: SigmaSplit) -> Result<(Complex64, Complex64)> {
    let (a, b) = (eta1, eta2);
    let bar_form = unit_phase(split.sigma_bar * a * b - phi(a, b)?);
    let sigma_form = unit_phase(-split.sigma * a * b + phi(b, a)?);
    Ok((bar_form, sigma_form))
}

/// `E^{−iσ̄η₁η₂} cos(πη₂) + E^{iση₁η₂} cos(πη₁)` (cosines in radians).
pub fn trial_interpolator(eta1: f64, eta2: f64, split: SigmaSplit) -> Complex64 {
    use std::f64::consts::PI;
    unit_phase(-split.sigma_bar * eta1 * eta2) * (PI * eta2).cos()
        + unit_phase(split.sigma * eta1 * eta2) * (PI * eta1).cos()
}

/// Winding number of the theta phase around the vortex at
/// `(K₁ + 1/2, K₂ + 1/2)` on a square loop of half-side `half`, traversed
/// counter-clockwise with η as the first axis. The theta sum is holomorphic
/// in `x + iη`, so every vortex winds −1 in this orientation.
pub fn vortex_winding(k1: i64, k2: i64, half: f64, steps_per_side: usize) -> f64 {
    let (ce, cx) = (k1 as f64 + 0.5, k2 as f64 + 0.5);
    let corners = [(-half, -half), (half, -half), (half, half), (-half, half), (-half, -half)];
    let value = |e: f64, x: f64| theta_product(e, x, PRODUCT_FACTORS);
    let mut total = 0.0;
    let mut prev = value(ce + corners[0].0, cx + corners[0].1);
    for side in corners.windows(2) {
        let (a, b) = (side[0], side[1]);
        for s in 1..=steps_per_side {
            let t = s as f64 / steps_per_side as f64;
            let cur = value(ce + a.0 + t * (b.0 - a.0), cx + a.1 + t * (b.1 - a.1));
            total += (cur / prev).arg();
            prev = cur;
        }
    }
    total / TAU
}
