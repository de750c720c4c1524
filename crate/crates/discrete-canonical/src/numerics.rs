//! Quadrature on the unit interval, uniform real-line grids, trapezoid
//! Fourier integrals and the `E = e^{2π}` exponential convention.

use std::f64::consts::{PI, TAU};
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("non-finite argument {0} to eexp")]
    Domain(f64),
    #[error("integrand is not finite at node {node}")]
    NonFinite { node: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("adaptive quadrature did not reach tolerance {tol:e} on [{a}, {b}] (estimate {estimate:e})")]
    NoConvergence { a: f64, b: f64, tol: f64, estimate: f64 },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// `E^{ix} = exp(2πix)`, rejecting non-finite input.
pub fn eexp(x: f64) -> Result<Complex64> {
    if !x.is_finite() {
        return Err(NumericsError::Domain(x));
    }
    Ok(unit_phase(x))
}

/// Unchecked `exp(2πix)` for hot loops. The integer part is removed first
/// so that integers map to exactly `1` and large arguments keep their
/// fractional precision.
#[inline]
pub fn unit_phase(x: f64) -> Complex64 {
    let frac = x - x.round();
    Complex64::cis(TAU * frac)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    GaussLegendre,
    UniformTrapezoid,
}

/// Quadrature rule on `(−1/2, 1/2]` with weights summing to one.
#[derive(Debug, Clone)]
pub struct UnitIntervalGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    kind: GridKind,
    // Panel edges (Gauss–Legendre) or the single interval (trapezoid);
    // kept so the rule can be refined.
    edges: Vec<f64>,
    order: usize,
}

fn gl_reference(order: usize) -> Vec<(f64, f64)> {
    let n = NonZeroUsize::new(order.max(1)).expect("order is positive");
    let mut pairs = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs
}

impl UnitIntervalGrid {
    /// Single-panel Gauss–Legendre rule with `n` nodes.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        Self::composite(&[-0.5, 0.5], n)
    }

    /// Composite Gauss–Legendre rule over the given panel edges, which must
    /// start at −1/2, end at 1/2 and increase strictly.
    pub fn composite(edges: &[f64], order: usize) -> Result<Self> {
        if order < 2 && edges.len() < 3 {
            return Err(NumericsError::InvalidGrid("need at least two nodes".into()));
        }
        if order == 0 {
            return Err(NumericsError::InvalidGrid("panel order must be positive".into()));
        }
        if edges.len() < 2 || (edges[0] + 0.5).abs() > 1e-15 || (edges[edges.len() - 1] - 0.5).abs() > 1e-15 {
            return Err(NumericsError::InvalidGrid("panel edges must span [−1/2, 1/2]".into()));
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(NumericsError::InvalidGrid("panel edges must increase".into()));
        }
        let reference = gl_reference(order);
        let mut nodes = Vec::with_capacity(order * (edges.len() - 1));
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(x, wt) in &reference {
                nodes.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        // Absorb the accumulated rounding of the reference weights.
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        Ok(Self { nodes, weights, kind: GridKind::GaussLegendre, edges: edges.to_vec(), order })
    }

    /// `panels` equal Gauss–Legendre panels, with the two outermost panels
    /// further split geometrically `grading` times towards ±1/2.
    pub fn graded(panels: usize, order: usize, grading: usize) -> Result<Self> {
        if panels < 2 {
            return Err(NumericsError::InvalidGrid("graded rule needs at least two panels".into()));
        }
        let width = 1.0 / panels as f64;
        let mut edges = vec![-0.5];
        let mut left: Vec<f64> = (1..=grading).map(|k| -0.5 + width * 0.5f64.powi(k as i32)).collect();
        left.reverse();
        edges.extend(left.iter().copied());
        for i in 1..panels {
            edges.push(-0.5 + i as f64 * width);
        }
        let mut right: Vec<f64> = left.iter().map(|x| -x).collect();
        right.reverse();
        edges.extend(right);
        edges.push(0.5);
        Self::composite(&edges, order)
    }

    /// Cell-centred uniform rule, `η_k = −1/2 + (k + 1/2)/n`, which is the
    /// trapezoid rule for periodic integrands.
    pub fn uniform_trapezoid(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(NumericsError::InvalidGrid("need at least two nodes".into()));
        }
        let h = 1.0 / n as f64;
        let nodes = (0..n).map(|k| -0.5 + (k as f64 + 0.5) * h).collect();
        Ok(Self { nodes, weights: vec![h; n], kind: GridKind::UniformTrapezoid, edges: vec![-0.5, 0.5], order: n })
    }

    /// The same rule with every panel halved (or twice the trapezoid nodes).
    pub fn refined(&self) -> Self {
        match self.kind {
            GridKind::UniformTrapezoid => Self::uniform_trapezoid(2 * self.order).expect("refinement of a valid grid"),
            GridKind::GaussLegendre => {
                let mut edges = Vec::with_capacity(2 * self.edges.len());
                for w in self.edges.windows(2) {
                    edges.push(w[0]);
                    edges.push(0.5 * (w[0] + w[1]));
                }
                edges.push(0.5);
                Self::composite(&edges, self.order).expect("refinement of a valid grid")
            }
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn sum<F: Fn(f64) -> Complex64>(&self, f: &F) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(NumericsError::NonFinite { node: x });
            }
            acc += w * v;
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureEstimate {
    pub value: Complex64,
    /// Absolute difference between the rule and its refinement.
    pub error: f64,
}

/// Integrates `f` over `(−1/2, 1/2]`; the refined rule supplies both the
/// returned value and the error estimate.
pub fn integrate_unit<F: Fn(f64) -> Complex64>(f: F, grid: &UnitIntervalGrid) -> Result<QuadratureEstimate> {
    let coarse = grid.sum(&f)?;
    let fine = grid.refined().sum(&f)?;
    Ok(QuadratureEstimate { value: fine, error: (fine - coarse).norm() })
}

const ADAPTIVE_ORDER: usize = 10;

/// Adaptive bisection with a 10-point Gauss–Legendre rule per panel.
/// A panel is accepted once it agrees with the sum over its two halves to
/// within its share of `tol`.
pub fn integrate_adaptive<F: Fn(f64) -> Complex64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: usize,
) -> Result<QuadratureEstimate> {
    let reference = gl_reference(ADAPTIVE_ORDER);
    let panel = |lo: f64, hi: f64| -> Result<Complex64> {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        let mut acc = Complex64::new(0.0, 0.0);
        for &(x, w) in &reference {
            let node = mid + half * x;
            let v = f(node);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(NumericsError::NonFinite { node });
            }
            acc += half * w * v;
        }
        Ok(acc)
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut stack = vec![(a, b, panel(a, b)?, 0usize)];
    while let Some((lo, hi, whole, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = panel(lo, mid)?;
        let right = panel(mid, hi)?;
        let diff = (left + right - whole).norm();
        let share = tol * (hi - lo) / (b - a);
        if diff <= share || depth >= max_depth {
            if diff > share {
                return Err(NumericsError::NoConvergence { a: lo, b: hi, tol: share, estimate: diff });
            }
            total += left + right;
            error += diff;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Ok(QuadratureEstimate { value: total, error })
}

/// Uniform grid `x_min + i·step`, `i = 0..=n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RealLineGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
}

impl RealLineGrid {
    pub fn new(x_min: f64, x_max: f64, step: f64) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && step.is_finite()) {
            return Err(NumericsError::InvalidGrid("grid bounds must be finite".into()));
        }
        if step <= 0.0 {
            return Err(NumericsError::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if x_min >= x_max {
            return Err(NumericsError::InvalidGrid(format!("empty range [{x_min}, {x_max}]")));
        }
        let n = (x_max - x_min) / step;
        if (n - n.round()).abs() > 1e-9 {
            return Err(NumericsError::InvalidGrid(format!(
                "range {} is not a whole number of steps {step}",
                x_max - x_min
            )));
        }
        Ok(Self { x_min, x_max, step })
    }

    pub fn symmetric(half_width: f64, step: f64) -> Result<Self> {
        Self::new(-half_width, half_width, step)
    }

    /// Number of nodes (both ends included).
    pub fn len(&self) -> usize {
        ((self.x_max - self.x_min) / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-9 * self.step
    }

    /// Index of `x` when it lies on a node (within 1e−9 steps).
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.x_min) / self.step;
        let i = t.round();
        if (t - i).abs() <= 1e-9 && i >= 0.0 && (i as usize) < self.len() {
            Some(i as usize)
        } else {
            None
        }
    }
}

/// How the part of the integrand outside the sampled range is accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    /// Nothing beyond the grid.
    None,
    /// Alternating point masses `(−1)^X / (2π(X+1/2)²)` at `|q| = X + 1/2`
    /// beyond the grid — the large-|q| limit of the template state.
    AlternatingPeaks,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierEstimate {
    pub value: Complex64,
    pub tail_correction: Complex64,
    /// Set when the sampled function is still large at the ends of the grid.
    pub support_warning: bool,
}

// Enough point masses that the remainder of the alternating sum is far
// below the trapezoid error.
const PEAK_TAIL_TERMS: usize = 200_000;

/// `∫ dq f(q) E^{−ipq}` by the trapezoid rule over the grid plus the chosen
/// tail model.
pub fn fourier_integral(grid: &RealLineGrid, values: &[f64], p: f64, tail: TailModel) -> FourierEstimate {
    assert_eq!(grid.len(), values.len(), "grid and samples differ in length");
    let n = values.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        if v == 0.0 {
            continue;
        }
        let w = if i == 0 || i + 1 == n { 0.5 } else { 1.0 };
        acc += w * v * unit_phase(-p * grid.point(i));
    }
    acc *= grid.step;

    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let edge = values[0].abs().max(values[n - 1].abs());
    let mut tail_correction = Complex64::new(0.0, 0.0);
    let support_warning = match tail {
        TailModel::None => edge > 1e-6 * peak,
        TailModel::AlternatingPeaks => {
            let reach = grid.x_max.min(-grid.x_min);
            // First peak centre strictly beyond the grid on either side.
            let first = ((reach - 0.5).floor() + 1.0).max(0.0) as usize;
            let mut s = 0.0;
            for x in first..first + PEAK_TAIL_TERMS {
                let c = x as f64 + 0.5;
                let sign = if x % 2 == 0 { 1.0 } else { -1.0 };
                s += sign / (2.0 * PI * c * c) * 2.0 * (TAU * p * c).cos();
            }
            tail_correction = Complex64::new(s, 0.0);
            !grid.is_symmetric() || reach < 4.0
        }
    };
    FourierEstimate { value: acc + tail_correction, tail_correction, support_warning }
}

/// Net number of turns of `f` around a circle (positive = counter-clockwise
/// in the `(a, b)` plane).
pub fn winding_number<F: Fn(f64, f64) -> Complex64>(f: F, center: (f64, f64), radius: f64, steps: usize) -> f64 {
    let mut total = 0.0;
    let point = |k: usize| {
        let t = TAU * k as f64 / steps as f64;
        f(center.0 + radius * t.cos(), center.1 + radius * t.sin())
    };
    let mut prev = point(0);
    for k in 1..=steps {
        let cur = point(k);
        total += (cur / prev).arg();
        prev = cur;
    }
    total / TAU
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    LineFit { slope, intercept, r_squared }
}

/// Order-preserving map, parallel when the `parallel` feature is on.
pub fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eexp_examples() {
        assert_eq!(eexp(0.0).unwrap(), Complex64::new(1.0, 0.0));
        let one = eexp(1.0).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let q = eexp(0.25).unwrap();
        assert!((q - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(matches!(eexp(f64::NAN), Err(NumericsError::Domain(_))));
        assert!(eexp(f64::INFINITY).is_err());
    }

    #[test]
    fn eexp_is_one_on_integers_even_when_large() {
        for z in [-1_000_000.0, -7.0, 3.0, 999_999.0] {
            assert!((eexp(z).unwrap() - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn gauss_legendre_weights_and_exactness() {
        for n in [2, 7, 64, 256] {
            let g = UnitIntervalGrid::gauss_legendre(n).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "n={n}: {s}");
            assert!(g.nodes().iter().all(|&x| x > -0.5 && x <= 0.5));
            // x^k over (−1/2,1/2) is (1/2)^k/(k+1) for even k.
            for k in 0..(2 * n).min(40) {
                let num: f64 = g.nodes().iter().zip(g.weights()).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 0 { 0.5f64.powi(k as i32) / (k as f64 + 1.0) } else { 0.0 };
                assert!((num - exact).abs() < 1e-13, "n={n}, k={k}");
            }
        }
    }

    #[test]
    fn integrate_unit_examples() {
        let g = UnitIntervalGrid::gauss_legendre(32).unwrap();
        let c = integrate_unit(|_| Complex64::new(1.0, 0.0), &g).unwrap();
        assert!((c.value - 1.0).norm() < 1e-14);
        let odd = integrate_unit(|x| Complex64::new(x, 0.0), &g).unwrap();
        assert!(odd.value.norm() < 1e-15);
        let wave = integrate_unit(unit_phase, &g).unwrap();
        assert!(wave.value.norm() < 1e-14);
    }

    #[test]
    fn integrate_unit_reports_nan_node() {
        let g = UnitIntervalGrid::gauss_legendre(8).unwrap();
        let err = integrate_unit(|x| if x > 0.3 { Complex64::new(f64::NAN, 0.0) } else { 1.0.into() }, &g);
        match err {
            Err(NumericsError::NonFinite { node }) => assert!(node > 0.3),
            other => panic!("expected NonFinite, got {other:?}"),
        }
    }

    #[test]
    fn refinement_error_bounds_change_on_smooth_integrand() {
        let f = |x: f64| Complex64::new((3.0 * x).exp() * (7.0 * x).cos(), 0.0);
        let g = UnitIntervalGrid::gauss_legendre(6).unwrap();
        let a = integrate_unit(f, &g).unwrap();
        let b = integrate_unit(f, &g.refined()).unwrap();
        assert!((a.value - b.value).norm() <= a.error.max(1e-15));
    }

    #[test]
    fn trapezoid_grid_is_cell_centred() {
        let g = UnitIntervalGrid::uniform_trapezoid(4).unwrap();
        assert_eq!(g.nodes(), &[-0.375, -0.125, 0.125, 0.375]);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert!(UnitIntervalGrid::uniform_trapezoid(1).is_err());
    }

    #[test]
    fn graded_grid_crowds_the_ends() {
        let g = UnitIntervalGrid::graded(16, 8, 10).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 1.0).abs() < 1e-14);
        let nearest = g.nodes().iter().fold(1.0f64, |m, &x| m.min(0.5 - x.abs()));
        assert!(nearest < 1e-4);
    }

    #[test]
    fn adaptive_handles_a_sharp_peak() {
        let f = |x: f64| Complex64::new(1.0 / (1e-4 + x * x), 0.0);
        let r = integrate_adaptive(f, -1.0, 1.0, 1e-10, 40).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value.re - exact).abs() < 1e-8, "{} vs {exact}", r.value.re);
    }

    #[test]
    fn real_line_grid_validation() {
        assert!(RealLineGrid::new(0.0, 1.0, 0.0).is_err());
        assert!(RealLineGrid::new(1.0, 1.0, 0.1).is_err());
        assert!(RealLineGrid::new(0.0, 1.0, 0.3).is_err());
        let g = RealLineGrid::symmetric(10.0, 1.0 / 64.0).unwrap();
        assert_eq!(g.len(), 1281);
        assert_eq!(g.index_of(0.0), Some(640));
        assert_eq!(g.index_of(0.001), None);
        assert!(g.is_symmetric());
    }

    #[test]
    fn fourier_of_gaussian_is_unit_at_origin() {
        let grid = RealLineGrid::symmetric(8.0, 1.0 / 64.0).unwrap();
        let v: Vec<f64> = grid.points().map(|q| (-PI * q * q).exp()).collect();
        let r = fourier_integral(&grid, &v, 0.0, TailModel::None);
        assert!((r.value - 1.0).norm() < 1e-8);
        assert!(!r.support_warning);
        // exp(−πq²) is its own transform in these units.
        let r = fourier_integral(&grid, &v, 0.7, TailModel::None);
        assert!((r.value.re - (-PI * 0.49f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn fourier_of_zero_and_truncated_support() {
        let grid = RealLineGrid::symmetric(2.0, 0.125).unwrap();
        let zeros = vec![0.0; grid.len()];
        assert_eq!(fourier_integral(&grid, &zeros, 1.3, TailModel::None).value, Complex64::new(0.0, 0.0));
        let ones = vec![1.0; grid.len()];
        assert!(fourier_integral(&grid, &ones, 0.0, TailModel::None).support_warning);
    }

    #[test]
    fn winding_of_z_and_conjugate() {
        let w = winding_number(Complex64::new, (0.0, 0.0), 0.5, 64);
        assert!((w - 1.0).abs() < 1e-12);
        let w = winding_number(|a, b| Complex64::new(a, -b), (0.0, 0.0), 0.5, 64);
        assert!((w + 1.0).abs() < 1e-12);
    }

    #[test]
    fn line_fit_recovers_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        let fit = linear_fit(&xs, &ys);
        assert!((fit.slope - 2.5).abs() < 1e-14 && (fit.intercept + 1.0).abs() < 1e-14);
        assert!((fit.r_squared - 1.0).abs() < 1e-14);
    }
}
