//! The continuum operators `q = Q + a_Q` and `p = P + a_P` as matrices on a
//! finite window of the `(Q,P)` lattice, the checkerboard edge state, and
//! the logarithmic divergence of `⟨p²⟩` for states that overlap it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::numerics::{linear_fit, par_map, unit_phase, LineFit, UnitIntervalGrid};

/// Default cap on the bytes a single dense operator may occupy.
pub const DEFAULT_MATRIX_BUDGET: usize = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("empty window: Q ∈ [{q_min}, {q_max}], P ∈ [{p_min}, {p_max}]")]
    EmptyWindow { q_min: i64, q_max: i64, p_min: i64, p_max: i64 },
    #[error("dense operator needs {required} bytes, budget is {budget}")]
    Budget { required: usize, budget: usize },
    #[error("site ({q}, {p}) is outside the window")]
    OutsideWindow { q: i64, p: i64 },
    #[error("states or operators live on different windows")]
    WindowMismatch,
    #[error("state support reaches the rim of the cutoff-{cutoff} window")]
    SupportAtRim { cutoff: i64 },
    #[error("k_max must be ≥ 1, got {0}")]
    KMax(i64),
}

pub type Result<T> = std::result::Result<T, LatticeError>;

/// Unit convention for the vector-potential matrices.
///
/// `Appendix` is the conventional closed form, for which `[q,p] = i` off
/// the edge state. `Canonical` is what the template states actually
/// produce: integrating the η-space vector potential gives exactly `1/2π`
/// of the closed-form elements, and `[q,p] = i/2π`, matching `E^{ix}`
/// phases. The oscillator uses `Canonical`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Canonical,
    #[default]
    Appendix,
}

impl Normalization {
    /// Factor applied to the closed-form `a_Q`, `a_P` elements.
    pub fn scale(self) -> f64 {
        match self {
            Self::Canonical => 1.0 / (2.0 * PI),
            Self::Appendix => 1.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Canonical => "canonical",
            Self::Appendix => "appendix",
        }
    }
}

/// Integer rectangle of lattice sites, addressed row-major in `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LatticeWindow {
    pub q_min: i64,
    pub q_max: i64,
    pub p_min: i64,
    pub p_max: i64,
}

impl LatticeWindow {
    pub fn new(q_min: i64, q_max: i64, p_min: i64, p_max: i64) -> Result<Self> {
        if q_min > q_max || p_min > p_max {
            return Err(LatticeError::EmptyWindow { q_min, q_max, p_min, p_max });
        }
        Ok(Self { q_min, q_max, p_min, p_max })
    }

    /// `[−h, h]²`.
    pub fn centered(half: i64) -> Result<Self> {
        Self::new(-half, half, -half, half)
    }

    /// The centred square with `side` sites per axis (`side` odd).
    pub fn square(side: usize) -> Result<Self> {
        let half = (side as i64 - 1) / 2;
        Self::centered(half)
    }

    pub fn q_len(&self) -> usize {
        (self.q_max - self.q_min + 1) as usize
    }

    pub fn p_len(&self) -> usize {
        (self.p_max - self.p_min + 1) as usize
    }

    pub fn size(&self) -> usize {
        self.q_len() * self.p_len()
    }

    pub fn contains(&self, q: i64, p: i64) -> bool {
        (self.q_min..=self.q_max).contains(&q) && (self.p_min..=self.p_max).contains(&p)
    }

    pub fn index(&self, q: i64, p: i64) -> Option<usize> {
        self.contains(q, p).then(|| (q - self.q_min) as usize * self.p_len() + (p - self.p_min) as usize)
    }

    pub fn site(&self, index: usize) -> (i64, i64) {
        let p_len = self.p_len();
        (self.q_min + (index / p_len) as i64, self.p_min + (index % p_len) as i64)
    }

    pub fn sites(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        (0..self.size()).map(|i| self.site(i))
    }

    /// The sites within a quarter of the side length of the centre, i.e.
    /// `|offset| ≤ (side − 1)/4` on each axis.
    pub fn central_quarter(&self) -> Self {
        let shrink = |lo: i64, hi: i64| {
            let mid = lo + (hi - lo) / 2;
            let half = (hi - lo) / 4;
            (mid - half, mid + half)
        };
        let (q_min, q_max) = shrink(self.q_min, self.q_max);
        let (p_min, p_max) = shrink(self.p_min, self.p_max);
        Self { q_min, q_max, p_min, p_max }
    }

    pub fn dense_bytes(&self) -> usize {
        self.size() * self.size() * std::mem::size_of::<Complex64>()
    }
}

fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `⟨Q₁,P₁|a_Q|Q₂,P₂⟩ = (−1)^{P+Q+1} iP/(P²+Q²)` with `Q = Q₂−Q₁`,
/// `P = P₂−P₁`, and zero on the diagonal.
pub fn a_q_element(q1: i64, p1: i64, q2: i64, p2: i64) -> Complex64 {
    let (dq, dp) = (q2 - q1, p2 - p1);
    if dq == 0 && dp == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let r2 = (dq * dq + dp * dp) as f64;
    Complex64::new(0.0, -parity(dq + dp) * dp as f64 / r2)
}

/// `⟨Q₁,P₁|a_P|Q₂,P₂⟩ = (−1)^{P+Q} iQ/(P²+Q²)`, same conventions.
pub fn a_p_element(q1: i64, p1: i64, q2: i64, p2: i64) -> Complex64 {
    let (dq, dp) = (q2 - q1, p2 - p1);
    if dq == 0 && dp == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let r2 = (dq * dq + dp * dp) as f64;
    Complex64::new(0.0, parity(dq + dp) * dq as f64 / r2)
}

fn signum(n: i64) -> f64 {
    match n.cmp(&0) {
        std::cmp::Ordering::Less => -1.0,
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => 1.0,
    }
}

/// The same element by the η-space route: the image sum
/// `Σ_{|K|≤k_max} ½ sgn(P)(−1)^{P−1} i E^{−|P(η+K+½)|}` Fourier-integrated
/// over η with weight `E^{iQη}`.
///
/// The integral natively yields the `Canonical` scale; it is converted to
/// `norm` on return.
pub fn a_q_from_integral(q1: i64, p1: i64, q2: i64, p2: i64, k_max: i64, norm: Normalization) -> Result<Complex64> {
    if k_max < 1 {
        return Err(LatticeError::KMax(k_max));
    }
    let (dq, dp) = (q2 - q1, p2 - p1);
    if dp == 0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // The images are smooth inside the cell (their kinks sit at η = ±1/2);
    // 64 sixteen-point panels resolve decay rates up to 2π|P| ~ 60.
    let edges: Vec<f64> = (0..=64).map(|i| -0.5 + i as f64 / 64.0).collect();
    let rule = UnitIntervalGrid::composite(&edges, 16).expect("valid rule");
    let rate = 2.0 * PI * dp.unsigned_abs() as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (&eta, &w) in rule.nodes().iter().zip(rule.weights()) {
        let images: f64 = (-k_max..=k_max).map(|k| (-rate * (eta + k as f64 + 0.5).abs()).exp()).sum();
        acc += w * images * unit_phase(dq as f64 * eta);
    }
    let prefactor = Complex64::new(0.0, 0.5 * signum(dp) * parity(dp - 1));
    let canonical = prefactor * acc;
    Ok(canonical * (norm.scale() / Normalization::Canonical.scale()))
}

/// Dense complex operator over a window, rows and columns both indexed by
/// the window's site addressing.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub window: LatticeWindow,
    pub entries: DMatrix<Complex64>,
}

impl OperatorMatrix {
    /// Assembles `f(row_site, col_site)`, rows in parallel.
    pub fn from_fn<F>(window: LatticeWindow, budget: usize, f: F) -> Result<Self>
    where
        F: Fn((i64, i64), (i64, i64)) -> Complex64 + Sync,
    {
        let required = window.dense_bytes();
        if required > budget {
            return Err(LatticeError::Budget { required, budget });
        }
        let n = window.size();
        let rows = par_map((0..n).collect(), |r| {
            let rs = window.site(r);
            (0..n).map(|c| f(rs, window.site(c))).collect::<Vec<_>>()
        });
        let entries = DMatrix::from_fn(n, n, |r, c| rows[r][c]);
        Ok(Self { window, entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, q1: i64, p1: i64, q2: i64, p2: i64) -> Option<Complex64> {
        Some(self.entries[(self.window.index(q1, p1)?, self.window.index(q2, p2)?)])
    }

    /// `max |M_rc − conj(M_cr)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let m = &self.entries;
        let mut worst: f64 = 0.0;
        for r in 0..m.nrows() {
            for c in r..m.ncols() {
                worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// `q = Q δ + a_Q` on the window.
pub fn build_q_matrix(window: LatticeWindow, norm: Normalization) -> Result<OperatorMatrix> {
    let s = norm.scale();
    OperatorMatrix::from_fn(window, DEFAULT_MATRIX_BUDGET, |(q1, p1), (q2, p2)| q_entry(q1, p1, q2, p2, s))
}

/// `p = P δ + a_P` on the window.
pub fn build_p_matrix(window: LatticeWindow, norm: Normalization) -> Result<OperatorMatrix> {
    let s = norm.scale();
    OperatorMatrix::from_fn(window, DEFAULT_MATRIX_BUDGET, |(q1, p1), (q2, p2)| p_entry(q1, p1, q2, p2, s))
}

fn q_entry(q1: i64, p1: i64, q2: i64, p2: i64, scale: f64) -> Complex64 {
    if q1 == q2 && p1 == p2 {
        Complex64::new(q1 as f64, 0.0)
    } else {
        scale * a_q_element(q1, p1, q2, p2)
    }
}

fn p_entry(q1: i64, p1: i64, q2: i64, p2: i64, scale: f64) -> Complex64 {
    if q1 == q2 && p1 == p2 {
        Complex64::new(p1 as f64, 0.0)
    } else {
        scale * a_p_element(q1, p1, q2, p2)
    }
}

/// The expected commutator `[q,p] = i s (−1)^{ΔQ+ΔP}(δ − 1)`, `s` the
/// normalization scale: `i s` on the complement of the edge state.
pub fn commutator_target(q1: i64, p1: i64, q2: i64, p2: i64, norm: Normalization) -> Complex64 {
    if q1 == q2 && p1 == p2 {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, -norm.scale() * parity(q2 - q1 + p2 - p1))
    }
}

fn block(
    window: &LatticeWindow,
    rows: &LatticeWindow,
    cols: &LatticeWindow,
    f: impl Fn(i64, i64, i64, i64) -> Complex64,
) -> DMatrix<Complex64> {
    debug_assert!(window.contains(rows.q_min, rows.p_min));
    DMatrix::from_fn(rows.size(), cols.size(), |r, c| {
        let (q1, p1) = rows.site(r);
        let (q2, p2) = cols.site(c);
        f(q1, p1, q2, p2)
    })
}

/// `[q,p] − target` restricted to `block` rows and columns, with the
/// intermediate sum running over the whole `window`. Only the block is
/// formed, so large windows stay cheap.
pub fn commutator_residual_on(
    window: LatticeWindow,
    region: LatticeWindow,
    norm: Normalization,
) -> Result<OperatorMatrix> {
    if !(window.contains(region.q_min, region.p_min) && window.contains(region.q_max, region.p_max)) {
        return Err(LatticeError::OutsideWindow { q: region.q_max, p: region.p_max });
    }
    let s = norm.scale();
    let q_rw = block(&window, &region, &window, |a, b, c, d| q_entry(a, b, c, d, s));
    let p_rw = block(&window, &region, &window, |a, b, c, d| p_entry(a, b, c, d, s));
    let q_wr = block(&window, &window, &region, |a, b, c, d| q_entry(a, b, c, d, s));
    let p_wr = block(&window, &window, &region, |a, b, c, d| p_entry(a, b, c, d, s));
    let comm = &q_rw * &p_wr - &p_rw * &q_wr;
    let target = block(&window, &region, &region, |a, b, c, d| commutator_target(a, b, c, d, norm));
    Ok(OperatorMatrix { window: region, entries: comm - target })
}

/// `[q,p] − target` on the central quarter of `window`, where truncation
/// at the rim does not reach.
pub fn commutator_residual(window: LatticeWindow, norm: Normalization) -> Result<OperatorMatrix> {
    commutator_residual_on(window, window.central_quarter(), norm)
}

/// Complex amplitudes over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteState {
    pub window: LatticeWindow,
    pub amplitudes: DVector<Complex64>,
}

impl DiscreteState {
    pub fn zeros(window: LatticeWindow) -> Self {
        Self { window, amplitudes: DVector::zeros(window.size()) }
    }

    /// `|Q,P⟩`.
    pub fn basis(window: LatticeWindow, q: i64, p: i64) -> Result<Self> {
        let mut s = Self::zeros(window);
        s.set(q, p, Complex64::new(1.0, 0.0))?;
        Ok(s)
    }

    pub fn from_sites(window: LatticeWindow, sites: &[((i64, i64), Complex64)]) -> Result<Self> {
        let mut s = Self::zeros(window);
        for &((q, p), a) in sites {
            let i = window.index(q, p).ok_or(LatticeError::OutsideWindow { q, p })?;
            s.amplitudes[i] += a;
        }
        Ok(s)
    }

    pub fn amplitude(&self, q: i64, p: i64) -> Complex64 {
        self.window.index(q, p).map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn set(&mut self, q: i64, p: i64, value: Complex64) -> Result<()> {
        let i = self.window.index(q, p).ok_or(LatticeError::OutsideWindow { q, p })?;
        self.amplitudes[i] = value;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes /= Complex64::new(n, 0.0);
        }
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.window != other.window {
            return Err(LatticeError::WindowMismatch);
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Sites carrying amplitude above `tol`.
    pub fn support(&self, tol: f64) -> Vec<(i64, i64)> {
        (0..self.window.size()).filter(|&i| self.amplitudes[i].norm() > tol).map(|i| self.window.site(i)).collect()
    }

    /// Site with the largest `|amplitude|` and its probability.
    pub fn dominant(&self) -> ((i64, i64), f64) {
        let (i, a) = self.amplitudes.iter().enumerate().fold((0, 0.0f64), |best, (i, z)| {
            if z.norm_sqr() > best.1 {
                (i, z.norm_sqr())
            } else {
                best
            }
        });
        (self.window.site(i), a)
    }
}

/// `⟨Q,P|ψ_edge⟩ = (−1)^{P+Q}`, unnormalized.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeState {
    pub window: LatticeWindow,
    pub amplitudes: DVector<Complex64>,
}

impl EdgeState {
    pub fn new(window: LatticeWindow) -> Self {
        let amplitudes =
            DVector::from_iterator(window.size(), window.sites().map(|(q, p)| Complex64::new(parity(q + p), 0.0)));
        Self { window, amplitudes }
    }

    /// Equals the number of sites.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }
}

/// `a(ψ) = Σ (−1)^{Q+P} ⟨Q,P|ψ⟩`.
pub fn edge_coefficient(state: &DiscreteState) -> Complex64 {
    state.window.sites().zip(state.amplitudes.iter()).map(|((q, p), a)| parity(q + p) * a).sum()
}

/// `(1 − |edge⟩⟨edge| / N) ψ`, removing the edge component.
pub fn project_physical(state: &DiscreteState) -> DiscreteState {
    let edge = EdgeState::new(state.window);
    let coeff = edge_coefficient(state) / edge.norm_sqr();
    DiscreteState { window: state.window, amplitudes: &state.amplitudes - edge.amplitudes * coeff }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub edge_coefficient: Complex64,
    /// `(cutoff, ⟨p²⟩)`.
    pub points: Vec<(i64, f64)>,
    /// `⟨p²⟩` against `ln(cutoff)`.
    pub log_fit: LineFit,
}

/// `⟨ψ|p_W²|ψ⟩ = ‖p_W ψ‖²` for each window `W = [−c, c]²`.
///
/// Evaluated matrix-free: `(pψ)(r) = P_r ψ(r) + Σ_s a_P(r, s) ψ(s)` for every
/// site `r` of the cutoff window, with `s` running over the support, which
/// must lie strictly inside every window.
pub fn p_squared_growth(state: &DiscreteState, cutoffs: &[i64], norm: Normalization) -> Result<GrowthReport> {
    let support: Vec<((i64, i64), Complex64)> =
        state.support(0.0).into_iter().map(|(q, p)| ((q, p), state.amplitude(q, p))).collect();
    let s = norm.scale();
    let mut points = Vec::with_capacity(cutoffs.len());
    for &c in cutoffs {
        let inside = support.iter().all(|&((q, p), _)| q.abs() < c && p.abs() < c);
        if !inside {
            return Err(LatticeError::SupportAtRim { cutoff: c });
        }
        let window = LatticeWindow::centered(c)?;
        let rows: Vec<usize> = (0..window.size()).collect();
        let parts = par_map(rows, |r| {
            let (q1, p1) = window.site(r);
            let v: Complex64 = support.iter().map(|&((q2, p2), a)| p_entry(q1, p1, q2, p2, s) * a).sum();
            v.norm_sqr()
        });
        points.push((c, parts.iter().sum()));
    }
    let xs: Vec<f64> = points.iter().map(|&(c, _)| (c as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, v)| v).collect();
    Ok(GrowthReport { edge_coefficient: edge_coefficient(state), points, log_fit: linear_fit(&xs, &ys) })
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    #[test]
    fn closed_form_examples() {
        assert_eq!(a_q_element(0, 0, 0, 0), Complex64::new(0.0, 0.0));
        assert!((a_q_element(0, 0, 0, 1) - I).norm() < 1e-15);
        assert_eq!(a_q_element(0, 0, 1, 0).norm(), 0.0);
        assert!((a_p_element(0, 0, 1, 0) + I).norm() < 1e-15);
        assert_eq!(a_p_element(0, 0, 0, 1).norm(), 0.0);
        assert!((a_p_element(0, 0, 1, 1) - 0.5 * I).norm() < 1e-15);
    }

    #[test]
    fn integral_route_matches_closed_form() {
        for (dq, dp) in [(0i64, 1i64), (3, 2), (-2, 5), (4, -1), (5, 0)] {
            for norm in [Normalization::Canonical, Normalization::Appendix] {
                let lhs = a_q_from_integral(0, 0, dq, dp, 40, norm).unwrap();
                let rhs = norm.scale() * a_q_element(0, 0, dq, dp);
                assert!((lhs - rhs).norm() < 1e-8, "({dq},{dp}) {lhs} vs {rhs}");
            }
        }
        assert!(a_q_from_integral(0, 0, 1, 1, 0, Normalization::Appendix).is_err());
    }

    #[test]
    fn window_addressing() {
        let w = LatticeWindow::new(-1, 2, 0, 4).unwrap();
        assert_eq!(w.size(), 20);
        for i in 0..w.size() {
            let (q, p) = w.site(i);
            assert_eq!(w.index(q, p), Some(i));
        }
        assert_eq!(w.index(3, 0), None);
        assert!(LatticeWindow::new(1, 0, 0, 0).is_err());
        let c = LatticeWindow::square(41).unwrap().central_quarter();
        assert_eq!((c.q_min, c.q_max, c.size()), (-10, 10, 441));
    }

    #[test]
    fn small_matrices() {
        let one = LatticeWindow::centered(0).unwrap();
        let q = build_q_matrix(one, Normalization::Appendix).unwrap();
        assert_eq!(q.entries[(0, 0)], Complex64::new(0.0, 0.0));
        let w = LatticeWindow::centered(1).unwrap();
        let q = build_q_matrix(w, Normalization::Appendix).unwrap();
        let p = build_p_matrix(w, Normalization::Appendix).unwrap();
        for (i, (qq, pp)) in w.sites().enumerate() {
            assert_eq!(q.entries[(i, i)].re, qq as f64);
            assert_eq!(p.entries[(i, i)].re, pp as f64);
        }
        assert!(q.is_hermitian(1e-12) && p.is_hermitian(1e-12));
    }

    #[test]
    fn budget_guard() {
        let w = LatticeWindow::centered(30).unwrap();
        let err = OperatorMatrix::from_fn(w, 1000, |_, _| Complex64::new(0.0, 0.0)).unwrap_err();
        assert!(matches!(err, LatticeError::Budget { required, .. } if required == w.dense_bytes()));
    }

    #[test]
    fn edge_coefficient_examples() {
        let w = LatticeWindow::centered(2).unwrap();
        assert_eq!(edge_coefficient(&DiscreteState::basis(w, 0, 0).unwrap()), Complex64::new(1.0, 0.0));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = DiscreteState::from_sites(w, &[((0, 0), h.into()), ((1, 0), h.into())]).unwrap();
        assert!(edge_coefficient(&s).norm() < 1e-15);
        let edge = EdgeState::new(w);
        assert_eq!(edge.norm_sqr(), 25.0);
        let as_state = DiscreteState { window: w, amplitudes: edge.amplitudes.clone() };
        assert_eq!(edge_coefficient(&as_state), Complex64::new(25.0, 0.0));
    }

    #[test]
    fn projector_examples() {
        let w = LatticeWindow::centered(2).unwrap();
        let n = w.size() as f64;
        let projected = project_physical(&DiscreteState::basis(w, 0, 0).unwrap());
        for (q, p) in w.sites() {
            let expected = if (q, p) == (0, 0) { 1.0 - 1.0 / n } else { -parity(q + p) / n };
            assert!((projected.amplitude(q, p) - expected).norm() < 1e-15);
        }
        assert!(edge_coefficient(&projected).norm() < 1e-12);
        let edge = DiscreteState { window: w, amplitudes: EdgeState::new(w).amplitudes };
        assert!(project_physical(&edge).norm() < 1e-12);
        let phys = DiscreteState::from_sites(w, &[((0, 0), 1.0.into()), ((0, 1), 1.0.into())]).unwrap();
        assert_eq!(project_physical(&phys), phys);
    }

    #[test]
    fn commutator_central_elements() {
        let w = LatticeWindow::centered(10).unwrap();
        let r = commutator_residual(w, Normalization::Appendix).unwrap();
        assert_eq!(r.window, LatticeWindow::centered(5).unwrap());
        // [q,p] itself at two central elements: residual plus target.
        let at = |q2, p2| r.entry(0, 0, q2, p2).unwrap() + commutator_target(0, 0, q2, p2, Normalization::Appendix);
        assert!(at(0, 0).norm() < 0.2);
        assert!((at(1, 0) - I).norm() < 0.6);
    }

    #[test]
    fn growth_of_zero_state_is_zero() {
        let w = LatticeWindow::centered(2).unwrap();
        let g = p_squared_growth(&DiscreteState::zeros(w), &[5, 10], Normalization::Appendix).unwrap();
        assert!(g.points.iter().all(|&(_, v)| v == 0.0));
        let s = DiscreteState::basis(w, 2, 0).unwrap();
        assert!(matches!(
            p_squared_growth(&s, &[2], Normalization::Appendix),
            Err(LatticeError::SupportAtRim { cutoff: 2 })
        ));
    }
}
