//! The harmonic oscillator `H = π(p² + q²)` in both pictures: the ground
//! state on the torus, the lattice Hamiltonian and its spectrum, and the
//! quarter-period permutation `|A,B⟩ → |B,−A⟩`.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::lattice_ops::{
    build_p_matrix, build_q_matrix, DiscreteState, EdgeState, LatticeError, LatticeWindow, Normalization,
    OperatorMatrix,
};
use crate::numerics::{linear_fit, unit_phase, LineFit, NumericsError, RealLineGrid};
use crate::phase_field::{phi_unchecked, theta_sum, PhaseError};
use crate::template_state::{build_template_table, TemplateError, TemplateTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OscillatorError {
    #[error("torus grid needs at least 8 nodes per axis, got {n1}×{n2}")]
    TorusSize { n1: usize, n2: usize },
    #[error("state support needs a margin of {needed} inside the resolution half-width {half_width}")]
    Margin { needed: f64, half_width: f64 },
    #[error("resolution grid must be symmetric about 0")]
    Resolution,
    #[error("evolution time {0} outside [−1, 1]")]
    Time(f64),
    #[error("template table does not cover q = {0}")]
    TableRange(f64),
    #[error("subtraction needs at least two cutoffs, got {0}")]
    Cutoffs(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

pub type Result<T> = std::result::Result<T, OscillatorError>;

/// Cell-centred samples on the torus `(−1/2, 1/2]²`, node
/// `η_i = −1/2 + (k + 1/2)/n_i`, so no node sits on the corner vortex.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    pub n1: usize,
    pub n2: usize,
    /// Row-major in η₁.
    pub values: Vec<Complex64>,
}

impl TorusGrid {
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 < 8 || n2 < 8 {
            return Err(OscillatorError::TorusSize { n1, n2 });
        }
        Ok(Self { n1, n2, values: vec![Complex64::new(0.0, 0.0); n1 * n2] })
    }

    pub fn node(n: usize, k: usize) -> f64 {
        -0.5 + (k as f64 + 0.5) / n as f64
    }

    pub fn eta(&self, k1: usize, k2: usize) -> (f64, f64) {
        (Self::node(self.n1, k1), Self::node(self.n2, k2))
    }

    pub fn at(&self, k1: usize, k2: usize) -> Complex64 {
        self.values[k1 * self.n2 + k2]
    }

    /// Torus distance from `(η₁, η₂)` to the corner `(±1/2, ±1/2)`.
    pub fn corner_distance(eta1: f64, eta2: f64) -> f64 {
        let d1 = 0.5 - eta1.abs();
        let d2 = 0.5 - eta2.abs();
        d1.hypot(d2)
    }
}

/// `ψ₀(η₁,η₂) = 2^{1/4} E^{iφ(η₁,η₂) − η₂²/2} Σ_X E^{−X²/2 + iX(η₁+iη₂)}`.
pub fn ground_state_value(eta1: f64, eta2: f64) -> Result<Complex64> {
    let sum = theta_sum(eta1, -eta2, 12)?;
    let envelope = (-PI * eta2 * eta2).exp() * 2f64.powf(0.25);
    Ok(envelope * unit_phase(phi_unchecked(eta1, eta2)) * sum)
}

/// The ground state sampled on an `n1 × n2` torus grid.
pub fn ground_state_torus(n1: usize, n2: usize) -> Result<TorusGrid> {
    let mut grid = TorusGrid::new(n1, n2)?;
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let (e1, e2) = grid.eta(k1, k2);
            grid.values[k1 * n2 + k2] = ground_state_value(e1, e2)?;
        }
    }
    Ok(grid)
}

const STENCIL: [(isize, f64); 4] = [(-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)];

/// `a = √π(−(1/2π)(∂₁ + i∂₂) − iη₂ + i(∂₁ + i∂₂)φ)` applied to the grid
/// values, with φ in E-units.
///
/// Fourth-order central differences. The values are wrapped periodically;
/// φ is evaluated directly at the stencil points, which carries its
/// quasi-period `φ(η₁, η₂+1) = φ(η₁, η₂) + η₁` across the boundary.
pub fn apply_annihilation(grid: &TorusGrid) -> Vec<Complex64> {
    let (n1, n2) = (grid.n1, grid.n2);
    let (h1, h2) = (1.0 / n1 as f64, 1.0 / n2 as f64);
    let wrap = |k: usize, d: isize, n: usize| (k as isize + d).rem_euclid(n as isize) as usize;
    let i = Complex64::new(0.0, 1.0);
    let mut out = Vec::with_capacity(n1 * n2);
    for k1 in 0..n1 {
        for k2 in 0..n2 {
            let (e1, e2) = grid.eta(k1, k2);
            let mut d1 = Complex64::new(0.0, 0.0);
            let mut d2 = Complex64::new(0.0, 0.0);
            let mut dphi1 = 0.0;
            let mut dphi2 = 0.0;
            for &(d, c) in &STENCIL {
                d1 += c * grid.at(wrap(k1, d, n1), k2);
                d2 += c * grid.at(k1, wrap(k2, d, n2));
                dphi1 += c * phi_unchecked(e1 + d as f64 * h1, e2);
                dphi2 += c * phi_unchecked(e1, e2 + d as f64 * h2);
            }
            let (d1, d2, dphi1, dphi2) = (d1 / h1, d2 / h2, dphi1 / h1, dphi2 / h2);
            let v = grid.at(k1, k2);
            let a = -(d1 + i * d2) / (2.0 * PI) - i * e2 * v + i * (dphi1 + i * dphi2) * v;
            out.push(PI.sqrt() * a);
        }
    }
    out
}

/// `max |aψ| / max |ψ|` over cells farther than 0.1 from the corner vortex.
pub fn annihilation_residual(grid: &TorusGrid) -> f64 {
    let applied = apply_annihilation(grid);
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for k1 in 0..grid.n1 {
        for k2 in 0..grid.n2 {
            let (e1, e2) = grid.eta(k1, k2);
            if TorusGrid::corner_distance(e1, e2) <= 0.1 {
                continue;
            }
            num = num.max(applied[k1 * grid.n2 + k2].norm());
            den = den.max(grid.at(k1, k2).norm());
        }
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// How the divergent edge-state part of `H` is tamed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularization {
    /// `Π π(q_W² + p_W²) Π` with Π removing the edge state.
    ProjectEdge,
    /// Template-integral elements with the fitted checkerboard removed.
    SubtractCheckerboard,
}

impl Regularization {
    pub fn name(self) -> &'static str {
        match self {
            Self::ProjectEdge => "project_edge",
            Self::SubtractCheckerboard => "subtract_checkerboard",
        }
    }
}

/// Real-line integration settings for the template matrix elements.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TemplateQuadrature {
    /// Table step; `1/step` must be an integer.
    pub step: f64,
    /// Integration cutoffs `L` for `∫_{−L}^{L}`.
    pub cutoffs: Vec<f64>,
    /// The cutoff whose matrix is returned after subtraction.
    pub reference_cutoff: f64,
}

impl Default for TemplateQuadrature {
    fn default() -> Self {
        Self { step: 1.0 / 1024.0, cutoffs: vec![16.0, 32.0, 64.0], reference_cutoff: 64.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatorConfig {
    pub window: LatticeWindow,
    pub regularization: Regularization,
    pub quadrature: TemplateQuadrature,
}

impl OscillatorConfig {
    pub fn new(window: LatticeWindow, regularization: Regularization) -> Self {
        Self { window, regularization, quadrature: TemplateQuadrature::default() }
    }
}

/// The divergent part of the template-integral Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckerboardFit {
    pub cutoffs: Vec<f64>,
    /// `c(L) = ⟨C, H(L)⟩ / ‖C‖²` with `C = (−1)^{ΔQ+ΔP}`.
    pub coefficients: Vec<f64>,
    /// `c(L)` against `ln L`.
    pub log_fit: LineFit,
    /// Cosine similarity of `H(L_max) − H(L_min)` with `C`.
    pub cosine_similarity: f64,
    /// `c(L_ref)`, the amount subtracted.
    pub subtracted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    pub matrix: OperatorMatrix,
    pub regularization: Regularization,
    pub checkerboard: Option<CheckerboardFit>,
}

fn checkerboard(window: LatticeWindow) -> DMatrix<Complex64> {
    let edge = EdgeState::new(window);
    &edge.amplitudes * edge.amplitudes.transpose()
}

fn frobenius(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Assembles `H` for the configured regularization, building whatever ψ
/// table it needs.
pub fn hamiltonian_matrix(config: &OscillatorConfig) -> Result<Hamiltonian> {
    match config.regularization {
        Regularization::ProjectEdge => project_edge_hamiltonian(config.window),
        Regularization::SubtractCheckerboard => {
            let table = template_table_for(config)?;
            subtract_checkerboard_hamiltonian(config, &table)
        }
    }
}

fn project_edge_hamiltonian(window: LatticeWindow) -> Result<Hamiltonian> {
    let q = build_q_matrix(window, Normalization::Canonical)?.entries;
    let p = build_p_matrix(window, Normalization::Canonical)?.entries;
    let h = (&q * &q + &p * &p) * Complex64::new(PI, 0.0);
    let n = window.size();
    let proj = DMatrix::<Complex64>::identity(n, n) - checkerboard(window) / Complex64::new(n as f64, 0.0);
    let mut entries = &proj * h * &proj;
    symmetrize(&mut entries);
    Ok(Hamiltonian {
        matrix: OperatorMatrix { window, entries },
        regularization: Regularization::ProjectEdge,
        checkerboard: None,
    })
}

fn symmetrize(m: &mut DMatrix<Complex64>) {
    let t = m.adjoint();
    *m = (&*m + t) * Complex64::new(0.5, 0.0);
}

/// A ψ table wide enough for the configured cutoffs and window.
pub fn template_table_for(config: &OscillatorConfig) -> Result<TemplateTable> {
    let w = config.window;
    let reach = [w.q_min, w.q_max, w.p_min, w.p_max].iter().map(|v| v.abs()).max().unwrap_or(0) as f64;
    let l_max = config.quadrature.cutoffs.iter().cloned().fold(config.quadrature.reference_cutoff, f64::max);
    let grid = RealLineGrid::symmetric(l_max + reach, config.quadrature.step)?;
    Ok(build_template_table(grid)?)
}

/// `T(a, b; k) = ∫_{−L}^{L} dq E^{ikq} ψ(q−a) q² ψ(q−b)` for all integer
/// `a, b` in `lo..=hi` and `|k| ≤ k_max`, by trapezoid on the table.
///
/// The integrand is folded onto one unit cell first, since `E^{ikq}` is
/// periodic there; the frequencies are then a short DFT over the cell.
fn template_moments(
    table: &TemplateTable,
    lo: i64,
    hi: i64,
    k_max: i64,
    cutoff: f64,
) -> Result<Vec<Vec<Vec<Complex64>>>> {
    let h = table.grid.step;
    let m = (1.0 / h).round() as usize;
    let n_cut = (cutoff / h).round() as i64;
    let idx = |q_steps: i64| -> Result<usize> {
        let x = q_steps as f64 * h;
        table.grid.index_of(x).ok_or(OscillatorError::TableRange(x))
    };
    let span = (hi - lo + 1) as usize;
    let phases: Vec<Vec<Complex64>> =
        (-k_max..=k_max).map(|k| (0..m).map(|j| unit_phase(k as f64 * j as f64 * h)).collect()).collect();
    let mut out = vec![vec![vec![Complex64::new(0.0, 0.0); (2 * k_max + 1) as usize]; span]; span];
    // Validate the extreme reads once; the loop then indexes directly.
    idx(-n_cut - hi * m as i64)?;
    idx(n_cut - lo * m as i64)?;
    let base = idx(0)? as i64;
    for a in lo..=hi {
        for b in a..=hi {
            let mut folded = vec![0.0; m];
            for s in -n_cut..=n_cut {
                let q = s as f64 * h;
                let wa = table.values[(base + s - a * m as i64) as usize];
                let wb = table.values[(base + s - b * m as i64) as usize];
                let w = if s.abs() == n_cut { 0.5 } else { 1.0 };
                folded[s.rem_euclid(m as i64) as usize] += w * wa * wb * q * q;
            }
            for (ki, ph) in phases.iter().enumerate() {
                let v: Complex64 = folded.iter().zip(ph).map(|(f, e)| f * e).sum::<Complex64>() * h;
                out[(a - lo) as usize][(b - lo) as usize][ki] = v;
                out[(b - lo) as usize][(a - lo) as usize][ki] = v;
            }
        }
    }
    Ok(out)
}

/// `π(⟨q²⟩ + ⟨p²⟩)` from template integrals truncated at `cutoff`.
pub fn template_hamiltonian(window: LatticeWindow, table: &TemplateTable, cutoff: f64) -> Result<OperatorMatrix> {
    let lo = window.q_min.min(window.p_min);
    let hi = window.q_max.max(window.p_max);
    let k_max = (window.q_max - window.q_min).max(window.p_max - window.p_min);
    let t = template_moments(table, lo, hi, k_max, cutoff)?;
    let at = |a: i64, b: i64, k: i64| t[(a - lo) as usize][(b - lo) as usize][(k + k_max) as usize];
    let n = window.size();
    let entries = DMatrix::from_fn(n, n, |r, c| {
        let (q1, p1) = window.site(r);
        let (q2, p2) = window.site(c);
        (at(q1, q2, p2 - p1) + at(p1, p2, q1 - q2)) * PI
    });
    Ok(OperatorMatrix { window, entries })
}

/// Template-integral Hamiltonian with the logarithmically divergent
/// checkerboard part fitted over the cutoffs and subtracted at the
/// reference cutoff.
pub fn subtract_checkerboard_hamiltonian(config: &OscillatorConfig, table: &TemplateTable) -> Result<Hamiltonian> {
    let quad = &config.quadrature;
    if quad.cutoffs.len() < 2 {
        return Err(OscillatorError::Cutoffs(quad.cutoffs.len()));
    }
    let window = config.window;
    let c_mat = checkerboard(window);
    let c_norm = frobenius(&c_mat, &c_mat).re;
    let mut coefficients = Vec::with_capacity(quad.cutoffs.len());
    let mut first = None;
    let mut last = None;
    for &l in &quad.cutoffs {
        let h = template_hamiltonian(window, table, l)?.entries;
        coefficients.push(frobenius(&c_mat, &h).re / c_norm);
        if first.is_none() {
            first = Some(h);
        } else {
            last = Some(h);
        }
    }
    let diff = last.expect("two cutoffs") - first.expect("two cutoffs");
    let cosine_similarity = frobenius(&c_mat, &diff).norm() / (c_norm.sqrt() * diff.norm());
    let xs: Vec<f64> = quad.cutoffs.iter().map(|l| l.ln()).collect();
    let log_fit = linear_fit(&xs, &coefficients);

    let mut h_ref = template_hamiltonian(window, table, quad.reference_cutoff)?.entries;
    let subtracted = frobenius(&c_mat, &h_ref).re / c_norm;
    h_ref -= c_mat * Complex64::new(subtracted, 0.0);
    symmetrize(&mut h_ref);
    Ok(Hamiltonian {
        matrix: OperatorMatrix { window, entries: h_ref },
        regularization: Regularization::SubtractCheckerboard,
        checkerboard: Some(CheckerboardFit {
            cutoffs: quad.cutoffs.clone(),
            coefficients,
            log_fit,
            cosine_similarity,
            subtracted,
        }),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Matching eigenvectors, each orthogonal to the edge state.
    pub eigenvectors: Vec<DiscreteState>,
}

impl Spectrum {
    /// `|4λ − round(4λ)|` per level: how far `E^{−4iH}` is from 𝕀 there.
    pub fn period_defects(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| (4.0 * l - (4.0 * l).round()).abs()).collect()
    }
}

/// Eigenpairs of `H` restricted to the orthogonal complement of the edge
/// state (where the regularization acts), via a Householder reflection that
/// maps the edge direction onto the first basis vector.
pub fn edge_complement_spectrum(h: &OperatorMatrix) -> Spectrum {
    let window = h.window;
    let n = window.size();
    let edge = EdgeState::new(window);
    let mut v: DVector<Complex64> = &edge.amplitudes / Complex64::new(edge.norm_sqr().sqrt(), 0.0);
    let sign = if v[0].re >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign;
    let vv = v.norm_squared();
    let reflect = DMatrix::<Complex64>::identity(n, n) - (&v * v.adjoint()) * Complex64::new(2.0 / vv, 0.0);
    let rotated = &reflect * &h.entries * &reflect;
    let mut inner = rotated.view((1, 1), (n - 1, n - 1)).into_owned();
    symmetrize(&mut inner);
    let eig = SymmetricEigen::new(inner);
    let mut order: Vec<usize> = (0..n - 1).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = order
        .iter()
        .map(|&i| {
            let mut padded = DVector::<Complex64>::zeros(n);
            padded.rows_mut(1, n - 1).copy_from(&eig.eigenvectors.column(i));
            DiscreteState { window, amplitudes: &reflect * padded }
        })
        .collect();
    Spectrum { eigenvalues, eigenvectors }
}

/// `f(q) = Σ c_{QP} ⟨q|Q,P⟩ = Σ c_{QP} ψ(q−Q) E^{iPq}` on `grid`.
pub fn synthesize_q(state: &DiscreteState, table: &TemplateTable, grid: &RealLineGrid) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, &c) in state.amplitudes.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let (big_q, big_p) = state.window.site(i);
        for (k, q) in grid.points().enumerate() {
            let shifted = q - big_q as f64;
            let psi = table.interpolate(shifted).ok_or(OscillatorError::TableRange(shifted))?;
            out[k] += c * psi * unit_phase(big_p as f64 * q);
        }
    }
    Ok(out)
}

/// `c'_{QP} = ∫ dp ⟨Q,P|p⟩ g(p) = ∫ dp E^{iQp} ψ(p−P) g(p)` for every
/// site of `window`, trapezoid over `grid`.
pub fn project_from_p(
    values: &[Complex64],
    window: LatticeWindow,
    table: &TemplateTable,
    grid: &RealLineGrid,
) -> Result<DiscreteState> {
    let mut state = DiscreteState::zeros(window);
    let n = grid.len();
    for (i, (big_q, big_p)) in window.sites().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, p) in grid.points().enumerate() {
            let shifted = p - big_p as f64;
            let psi = table.interpolate(shifted).ok_or(OscillatorError::TableRange(shifted))?;
            let w = if k == 0 || k + 1 == n { 0.5 } else { 1.0 };
            acc += w * psi * unit_phase(big_q as f64 * p) * values[k];
        }
        state.amplitudes[i] = acc * grid.step;
    }
    Ok(state)
}

/// `2^{1/4} e^{−πq²}`, the continuum ground state.
pub fn continuum_ground_state(q: f64) -> f64 {
    2f64.powf(0.25) * (-PI * q * q).exp()
}

/// `|⟨g|f⟩|² / (‖f‖² ‖g‖²)` of a lattice state synthesized to q-space with
/// the continuum ground state.
pub fn ground_state_fidelity(state: &DiscreteState, table: &TemplateTable, grid: &RealLineGrid) -> Result<f64> {
    let f = synthesize_q(state, table, grid)?;
    let mut overlap = Complex64::new(0.0, 0.0);
    let (mut nf, mut ng) = (0.0, 0.0);
    for (k, q) in grid.points().enumerate() {
        let g = continuum_ground_state(q);
        overlap += g * f[k];
        nf += f[k].norm_sqr();
        ng += g * g;
    }
    Ok(overlap.norm_sqr() / (nf * ng))
}

/// The default synthesis grid: `q ∈ [−13, 13]`, step 1/64.
pub fn default_resolution() -> RealLineGrid {
    RealLineGrid::symmetric(13.0, 1.0 / 64.0).expect("valid grid")
}

/// A ψ table covering `grid` shifted by any site of `window`.
pub fn table_for_resolution(grid: &RealLineGrid, window: LatticeWindow) -> Result<TemplateTable> {
    if !grid.is_symmetric() {
        return Err(OscillatorError::Resolution);
    }
    let reach = [window.q_min, window.q_max, window.p_min, window.p_max].iter().map(|v| v.abs()).max().unwrap_or(0);
    let half = grid.x_max + reach as f64 + 1.0;
    let half = (half / grid.step).ceil() * grid.step;
    Ok(build_template_table(RealLineGrid::symmetric(half, grid.step)?)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuarterOutcome {
    pub state: DiscreteState,
    /// Dominant site and its probability.
    pub dominant: ((i64, i64), f64),
    /// Phase of the dominant amplitude, in E-units (turns).
    pub phase: f64,
    /// `⟨p|ψ_{1/4}⟩ = f(−p)` on the resolution grid.
    pub intermediate: Vec<Complex64>,
}

fn check_margin(state: &DiscreteState, grid: &RealLineGrid) -> Result<()> {
    if !grid.is_symmetric() {
        return Err(OscillatorError::Resolution);
    }
    // Leakage from earlier quarter steps is not support.
    let tol = 1e-3 * state.amplitudes.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let reach = state.support(tol).iter().map(|&(q, p)| q.abs().max(p.abs())).max().unwrap_or(0) as f64;
    if reach + 10.0 > grid.x_max + 1e-9 {
        return Err(OscillatorError::Margin { needed: reach + 10.0, half_width: grid.x_max });
    }
    Ok(())
}

/// One quarter period of `H = π(p² + q²)`: synthesize `f(q)`, take
/// `⟨p|ψ_{1/4}⟩ = f(−p)`, and re-expand on the lattice. Analytically this
/// is the permutation `|A,B⟩ → |B,−A⟩`.
pub fn quarter_evolution(state: &DiscreteState, resolution: &RealLineGrid) -> Result<QuarterOutcome> {
    let table = table_for_resolution(resolution, state.window)?;
    quarter_evolution_with(state, resolution, &table)
}

/// [`quarter_evolution`] with a prebuilt table (see [`table_for_resolution`]).
pub fn quarter_evolution_with(
    state: &DiscreteState,
    resolution: &RealLineGrid,
    table: &TemplateTable,
) -> Result<QuarterOutcome> {
    check_margin(state, resolution)?;
    let f = synthesize_q(state, table, resolution)?;
    let intermediate: Vec<Complex64> = f.iter().rev().copied().collect();
    let out = project_from_p(&intermediate, state.window, table, resolution)?;
    let dominant = out.dominant();
    let amp = out.amplitude(dominant.0 .0, dominant.0 .1);
    Ok(QuarterOutcome { phase: amp.arg() / (2.0 * PI), dominant, state: out, intermediate })
}

/// Continuum samples of the evolved state.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSample {
    pub grid: RealLineGrid,
    pub t: f64,
    /// `⟨q|ψ_t⟩`.
    pub q_values: Vec<Complex64>,
    /// `⟨p|ψ_t⟩ = e^{iπ/4} ⟨q=p|ψ_{t+1/4}⟩`.
    pub p_values: Vec<Complex64>,
}

/// One parity block of the sinc-DVR oscillator: eigenpairs and the map
/// from grid values to the block basis.
struct ParityBlock {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<f64>,
    // Grid indices (i, mirror) and their weights in each block basis vector.
    members: Vec<(usize, usize, f64)>,
}

fn dvr_blocks(grid: &RealLineGrid) -> Vec<ParityBlock> {
    let n = grid.len();
    let h = grid.step;
    let q = |i: usize| grid.point(i);
    let kinetic = |i: usize, j: usize| {
        // −d²/dq² in the sinc basis, scaled to p² = −(1/4π²) d²/dq².
        let t = if i == j {
            PI * PI / (3.0 * h * h)
        } else {
            let d = i as i64 - j as i64;
            let s = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            2.0 * s / (h * h * (d * d) as f64)
        };
        t / (4.0 * PI * PI)
    };
    let ham = |i: usize, j: usize| PI * (kinetic(i, j) + if i == j { q(i) * q(i) } else { 0.0 });
    let half = n / 2;
    let centre = (n % 2 == 1).then_some(half);
    let mut blocks = Vec::new();
    for even in [true, false] {
        let mut members: Vec<(usize, usize, f64)> =
            (0..half).map(|i| (i, n - 1 - i, std::f64::consts::FRAC_1_SQRT_2)).collect();
        if even {
            if let Some(c) = centre {
                members.push((c, c, 1.0));
            }
        }
        let sgn = if even { 1.0 } else { -1.0 };
        let m = members.len();
        let mat = DMatrix::from_fn(m, m, |a, b| {
            let (ia, ma, wa) = members[a];
            let (ib, mb, wb) = members[b];
            let mut v = 0.0;
            // Basis vector: wa (e_ia + sgn e_ma), collapsed when ia == ma.
            let ea: Vec<(usize, f64)> = if ia == ma { vec![(ia, wa)] } else { vec![(ia, wa), (ma, sgn * wa)] };
            let eb: Vec<(usize, f64)> = if ib == mb { vec![(ib, wb)] } else { vec![(ib, wb), (mb, sgn * wb)] };
            for &(x, cx) in &ea {
                for &(y, cy) in &eb {
                    v += cx * cy * ham(x, y);
                }
            }
            v
        });
        let eig = SymmetricEigen::new(mat);
        blocks.push(ParityBlock { eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors, members });
    }
    blocks
}

fn dvr_evolve(blocks: &[ParityBlock], values: &[Complex64], times: &[f64]) -> Vec<Vec<Complex64>> {
    let n = values.len();
    let mut outs = vec![vec![Complex64::new(0.0, 0.0); n]; times.len()];
    for (bi, block) in blocks.iter().enumerate() {
        let sgn = if bi == 0 { 1.0 } else { -1.0 };
        let m = block.members.len();
        let coords: DVector<Complex64> = DVector::from_iterator(
            m,
            block
                .members
                .iter()
                .map(|&(i, mi, w)| if i == mi { w * values[i] } else { w * (values[i] + sgn * values[mi]) }),
        );
        let vt = block.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let modal = vt.transpose() * &coords;
        for (ti, &t) in times.iter().enumerate() {
            let phased = DVector::from_iterator(
                m,
                modal.iter().zip(block.eigenvalues.iter()).map(|(c, &l)| c * unit_phase(-l * t)),
            );
            let back = &vt * phased;
            for (a, &(i, mi, w)) in block.members.iter().enumerate() {
                outs[ti][i] += w * back[a];
                if i != mi {
                    outs[ti][mi] += sgn * w * back[a];
                }
            }
        }
    }
    outs
}

/// Evolves the synthesized continuum state for time `t` (in periods) under
/// `H = π(p² + q²)`, i.e. a fractional Fourier transform by angle 2πt.
///
/// `H` is diagonalized in the sinc (Whittaker–Shannon) basis of the
/// resolution grid, split by parity; each mode picks up `E^{−i(n+1/2)t}`.
pub fn evolve_fractional(state: &DiscreteState, t: f64, resolution: &RealLineGrid) -> Result<FractionalSample> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(OscillatorError::Time(t));
    }
    let table = table_for_resolution(resolution, state.window)?;
    let f = synthesize_q(state, &table, resolution)?;
    evolve_samples(resolution, &f, t)
}

/// The evolution behind [`evolve_fractional`], applied to arbitrary samples
/// on a symmetric grid. Content beyond the grid (in q) or beyond its
/// Nyquist band (in p) is lost, so the result is exact only for states
/// well localized in both.
pub fn evolve_samples(grid: &RealLineGrid, values: &[Complex64], t: f64) -> Result<FractionalSample> {
    if !(-1.0..=1.0).contains(&t) {
        return Err(OscillatorError::Time(t));
    }
    if !grid.is_symmetric() || values.len() != grid.len() {
        return Err(OscillatorError::Resolution);
    }
    let blocks = dvr_blocks(grid);
    let mut outs = dvr_evolve(&blocks, values, &[t, t + 0.25]).into_iter();
    let q_values = outs.next().expect("two times");
    let rot = Complex64::from_polar(1.0, FRAC_PI_4);
    let p_values = outs.next().expect("two times").into_iter().map(|z| rot * z).collect();
    Ok(FractionalSample { grid: *grid, t, q_values, p_values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_value_at_origin() {
        let v = ground_state_value(0.0, 0.0).unwrap();
        let oracle: f64 = (-30i32..=30).map(|x| (-PI * (x * x) as f64).exp()).sum();
        assert!((v.re - 2f64.powf(0.25) * oracle).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
        assert!((oracle - 1.086_434_811).abs() < 1e-9);
    }

    #[test]
    fn ground_state_modulus_symmetries_and_periodicity() {
        for (a, b) in [(0.13, 0.27), (-0.31, 0.05), (0.44, -0.38)] {
            let m = ground_state_value(a, b).unwrap().norm();
            assert!((ground_state_value(-a, b).unwrap().norm() - m).abs() < 1e-12);
            assert!((ground_state_value(a, -b).unwrap().norm() - m).abs() < 1e-12);
        }
        for s in [-0.37, 0.0, 0.21] {
            let d1 = ground_state_value(0.5 - 1e-12, s).unwrap() - ground_state_value(-0.5 + 1e-12, s).unwrap();
            let d2 = ground_state_value(s, 0.5 - 1e-12).unwrap() - ground_state_value(s, -0.5 + 1e-12).unwrap();
            assert!(d1.norm() < 1e-8 && d2.norm() < 1e-8, "{d1} {d2}");
        }
    }

    #[test]
    fn torus_grid_avoids_corners() {
        assert!(TorusGrid::new(4, 16).is_err());
        let g = TorusGrid::new(8, 8).unwrap();
        let (a, b) = g.eta(7, 0);
        assert!(TorusGrid::corner_distance(a, b) > 0.08);
    }

    #[test]
    fn quarter_map_on_origin_is_fixed() {
        let w = LatticeWindow::centered(1).unwrap();
        let s = DiscreteState::basis(w, 0, 0).unwrap();
        let grid = RealLineGrid::symmetric(11.0, 1.0 / 32.0).unwrap();
        let out = quarter_evolution(&s, &grid).unwrap();
        assert_eq!(out.dominant.0, (0, 0));
        assert!(out.dominant.1 > 0.99);
    }

    #[test]
    fn margin_is_enforced() {
        let w = LatticeWindow::centered(3).unwrap();
        let s = DiscreteState::basis(w, 3, 0).unwrap();
        let grid = RealLineGrid::symmetric(12.0, 1.0 / 16.0).unwrap();
        assert!(matches!(quarter_evolution(&s, &grid), Err(OscillatorError::Margin { .. })));
    }

    #[test]
    fn dvr_spectrum_is_the_ladder() {
        let grid = RealLineGrid::symmetric(6.0, 1.0 / 16.0).unwrap();
        let mut e: Vec<f64> = dvr_blocks(&grid).iter().flat_map(|b| b.eigenvalues.iter().copied()).collect();
        e.sort_by(|a, b| a.total_cmp(b));
        for (n, l) in e.iter().take(8).enumerate() {
            assert!((l - (n as f64 + 0.5)).abs() < 1e-10, "level {n}: {l}");
        }
    }

    #[test]
    fn evolution_of_a_localized_state() {
        let grid = RealLineGrid::symmetric(6.0, 1.0 / 16.0).unwrap();
        let f: Vec<Complex64> = grid
            .points()
            .map(|q| Complex64::new((-PI * q * q).exp() * (1.0 + q), 0.3 * q * (-PI * q * q).exp()))
            .collect();
        let n = f.len();
        let at0 = evolve_samples(&grid, &f, 0.0).unwrap();
        assert!((0..n).all(|k| (at0.q_values[k] - f[k]).norm() < 1e-12));
        // Half a period is parity with phase E^{−i/4}.
        let half = evolve_samples(&grid, &f, 0.5).unwrap();
        assert!((0..n).all(|k| (half.q_values[k] * Complex64::new(0.0, 1.0) - f[n - 1 - k]).norm() < 1e-12));
        // A quarter period is the Fourier transform: ⟨p|ψ_{1/4}⟩ = e^{−iπ/4} f(−p).
        let quarter = evolve_samples(&grid, &f, 0.25).unwrap();
        let rot = Complex64::from_polar(1.0, FRAC_PI_4);
        assert!((0..n).all(|k| (quarter.p_values[k] * rot - f[n - 1 - k]).norm() < 1e-12));
        assert!(evolve_samples(&grid, &f, 1.5).is_err());
    }
}
