//! Spatial search with one marked vertex: the walk `U₀ = U·R₀` started from
//! the uniform superposition, its principal eigenphase and the constants
//! that control it.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{dense_evolution_matrix, step_in_place, StateVector, WalkAngles};
use crate::fit::correlation;
use crate::lattice::{HexLattice, Vertex};
use crate::linalg::{eigenvalues, eigenvector_near, nearest_distance};
use crate::roots::bisect;
use crate::spectral::{block_eigensystem, fourier_block, phi_min};

/// Bracket offset from both ends of `(0, φ_min)`.
pub const BRACKET_EPS: f64 = 1e-10;
/// Absolute tolerance on λ.
pub const LAMBDA_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    pub n: usize,
    pub marked: Vertex,
    pub theta: f64,
    pub t_max: usize,
}

impl SearchConfig {
    pub fn new(n: usize, t_max: usize) -> Self {
        SearchConfig {
            n,
            marked: Vertex::new(0, 0, 0),
            theta: PI / 3.0,
            t_max,
        }
    }

    pub fn validate(&self, lat: &HexLattice) -> Result<()> {
        if lat.n() != self.n {
            return Err(Error::invalid(format!(
                "config n = {} but lattice n = {}",
                self.n,
                lat.n()
            )));
        }
        lat.index(self.marked)?;
        if !(self.theta > 0.0 && self.theta < PI) {
            return Err(Error::invalid(format!("θ = {} outside (0, π)", self.theta)));
        }
        Ok(())
    }
}

/// `(1/(√2 n)) Σ (|x,y,0⟩ + |x,y,1⟩)`
pub fn uniform_state(lat: &HexLattice) -> StateVector {
    let amp = 1.0 / (lat.num_vertices() as f64).sqrt();
    StateVector::new(vec![Complex64::new(amp, 0.0); lat.num_vertices()])
}

/// `U R₀`: flip the marked amplitude, then one walk step.
pub fn search_step(state: &StateVector, config: &SearchConfig, lat: &HexLattice) -> Result<StateVector> {
    state.check_len(lat)?;
    let mut out = state.clone();
    search_step_in_place(&mut out, config, lat)?;
    Ok(out)
}

fn search_step_in_place(state: &mut StateVector, config: &SearchConfig, lat: &HexLattice) -> Result<()> {
    let m = lat.index(config.marked)?;
    let amps = state.amplitudes_mut();
    amps[m] = -amps[m];
    step_in_place(lat, &WalkAngles::uniform(config.theta), amps);
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Complete,
    /// `t_max` is shorter than two predicted runtimes; the series may stop
    /// before the first peak.
    Partial,
}

/// Simulated success-probability curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchRun {
    /// `p_marked(t)` for `t = 0..=t_max`.
    pub series: Vec<f64>,
    pub t_sim: usize,
    pub p_sim: f64,
    pub status: SearchStatus,
}

/// Half-width of the window a peak must dominate. The success probability
/// carries a period-2 ripple, so plain neighbour comparison finds spurious
/// maxima on the rising edge.
pub const PEAK_RADIUS: usize = 2;

/// First `t` that is the largest value within `±PEAK_RADIUS` steps and at
/// least half of the series maximum.
pub fn first_peak(series: &[f64]) -> usize {
    let top = series.iter().copied().fold(0.0, f64::max);
    (0..series.len())
        .find(|&t| {
            let lo = t.saturating_sub(PEAK_RADIUS);
            let hi = (t + PEAK_RADIUS).min(series.len() - 1);
            series[t] >= 0.5 * top && series[lo..=hi].iter().all(|&p| p <= series[t])
        })
        .unwrap_or(0)
}

pub fn run_search(config: &SearchConfig, lat: &HexLattice) -> Result<SearchRun> {
    config.validate(lat)?;
    let m = lat.index(config.marked)?;
    let mut psi = uniform_state(lat);
    let mut series = Vec::with_capacity(config.t_max + 1);
    series.push(psi.amplitudes()[m].norm_sqr());
    for _ in 0..config.t_max {
        search_step_in_place(&mut psi, config, lat)?;
        series.push(psi.amplitudes()[m].norm_sqr());
    }
    let t_sim = first_peak(&series);
    let status = match lambda_exact_theta(config.n, config.theta) {
        Ok(lambda) if (config.t_max as f64) < PI / lambda => SearchStatus::Partial,
        _ => SearchStatus::Complete,
    };
    Ok(SearchRun {
        p_sim: series[t_sim],
        t_sim,
        series,
        status,
    })
}

/// Phase and marked-vertex weight `|⟨0|v⟩|²` (times `n²`) of every eigenvector
/// of `U`, skipping blocks whose phase sits at `π`; their total weight is
/// returned separately.
fn secular_terms(n: usize, theta: f64) -> (Vec<(f64, f64)>, f64) {
    let blocks: Vec<[(f64, f64); 2]> = (0..n * n)
        .into_par_iter()
        .map(|i| {
            let e = block_eigensystem(&fourier_block(i % n, i / n, theta, n));
            [
                (e.phi, e.v_plus[0].norm_sqr()),
                (-e.phi, e.v_minus[0].norm_sqr()),
            ]
        })
        .collect();
    let mut terms = Vec::with_capacity(2 * n * n);
    let mut at_pi = 0.0;
    for [p, m] in blocks {
        if PI - p.0 < 1e-12 {
            at_pi += p.1 + m.1;
        } else {
            terms.push(p);
            terms.push(m);
        }
    }
    (terms, at_pi)
}

/// `Σ w tan((λ + φ)/2) − W_π cot(λ/2)`: zero exactly when `e^{iλ}` is an
/// eigenvalue of `−U₀`.
fn secular(terms: &[(f64, f64)], at_pi: f64, lambda: f64) -> f64 {
    let regular: f64 = terms
        .iter()
        // sin x / (1 + cos x) written as tan(x/2), which stays finite next to the pole
        .map(|&(phi, w)| w * (0.5 * (lambda + phi)).tan())
        .sum();
    regular - at_pi / (0.5 * lambda).tan()
}

/// Secular function on `(0, φ_min)`, exposed for bracketing checks.
pub fn secular_function(n: usize, theta: f64) -> impl Fn(f64) -> f64 {
    let (terms, at_pi) = secular_terms(n, theta);
    move |lambda| secular(&terms, at_pi, lambda)
}

/// Smallest positive eigenphase of `−U₀` at angle `θ`.
pub fn lambda_exact_theta(n: usize, theta: f64) -> Result<f64> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("n = {n} must be even and ≥ 2")));
    }
    let top = phi_min(n, theta);
    let f = secular_function(n, theta);
    bisect(f, BRACKET_EPS, top - BRACKET_EPS, LAMBDA_TOL)
}

/// Smallest positive eigenphase of `−U₀` at `θ = π/3`.
pub fn lambda_exact(n: usize) -> Result<f64> {
    lambda_exact_theta(n, PI / 3.0)
}

/// `a_kl` at `θ = π/3`: `(3/4)(1/3 − cos k̃ − cos l̃ − cos(k̃ − l̃))`.
pub fn a_third(k: i64, l: i64, n: usize) -> f64 {
    let w = 2.0 * PI / n as f64;
    let (kt, lt) = (w * k as f64, w * l as f64);
    0.75 * (1.0 / 3.0 - kt.cos() - lt.cos() - (kt - lt).cos())
}

fn inverse_gap_sum(n: usize, range: usize) -> f64 {
    let mut acc = 0.0;
    for l in 0..range {
        for k in 0..range {
            if (k, l) != (0, 0) {
                acc += 1.0 / (2.0 + a_third(k as i64, l as i64, n));
            }
        }
    }
    acc / (n * n) as f64
}

/// `C² = (1/n²) Σ_{(k,l)≠(0,0)} 1/(2 + a_kl)` over the full zone.
pub fn c_squared(n: usize) -> f64 {
    inverse_gap_sum(n, n)
}

pub fn c_constant(n: usize) -> f64 {
    c_squared(n).sqrt()
}

/// The same sum restricted to `0 ≤ k, l < n/2`.
pub fn c_squared_half(n: usize) -> f64 {
    inverse_gap_sum(n, n / 2)
}

/// `S(n) = Σ 1/(k² + l²)` over `0 ≤ k, l < n/2`, `(k,l) ≠ (0,0)`.
pub fn s_sum(n: usize) -> f64 {
    let h = n / 2;
    let mut acc = 0.0;
    for l in 0..h {
        for k in 0..h {
            if (k, l) != (0, 0) {
                acc += 1.0 / (k * k + l * l) as f64;
            }
        }
    }
    acc
}

/// `Σ 1/(k² + l² − kl)` over the half range.
pub fn q_sum(n: usize) -> f64 {
    let h = n / 2;
    let mut acc = 0.0;
    for l in 0..h {
        for k in 0..h {
            if (k, l) != (0, 0) {
                acc += 1.0 / (k * k + l * l - k * l) as f64;
            }
        }
    }
    acc
}

/// One inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl BoundCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AppendixReport {
    pub n: usize,
    pub c_squared: f64,
    pub c_squared_half: f64,
    pub q_sum: f64,
    pub s_sum: f64,
    pub checks: Vec<BoundCheck>,
}

impl AppendixReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(BoundCheck::holds)
    }

    pub fn violations(&self) -> Vec<&BoundCheck> {
        self.checks.iter().filter(|c| !c.holds()).collect()
    }
}

/// Evaluates every link of the chain bounding `C²` by `S(n)`:
///
/// * `half ≤ C² ≤ 4·half`
/// * `1 − 2π²k²/n² ≤ cos(2πk/n) ≤ 1 − 8k²/n²` for `0 ≤ k < n/2`
/// * `Σ1/Q / (3π²) ≤ half ≤ Σ1/Q / 12` with `Q = k² + l² − kl`
/// * `(k² + l²)/2 ≤ Q ≤ k² + l²` termwise
/// * `S/(3π²) ≤ half ≤ S/6`
///
/// where `half` is the half-range sum [`c_squared_half`].
pub fn verify_appendix_bounds(n: usize) -> Result<AppendixReport> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::invalid(format!("n = {n} must be even and ≥ 4")));
    }
    let full = c_squared(n);
    let half = c_squared_half(n);
    let q = q_sum(n);
    let s = s_sum(n);
    let nf = n as f64;
    let mut checks = vec![
        BoundCheck { name: "half <= C^2".into(), lhs: half, rhs: full },
        BoundCheck { name: "C^2 <= 4 half".into(), lhs: full, rhs: 4.0 * half },
    ];
    for k in 0..n / 2 {
        let kf = k as f64;
        let c = (2.0 * PI * kf / nf).cos();
        checks.push(BoundCheck {
            name: format!("cos lower k={k}"),
            lhs: 1.0 - 2.0 * PI * PI * kf * kf / (nf * nf),
            rhs: c,
        });
        checks.push(BoundCheck {
            name: format!("cos upper k={k}"),
            lhs: c,
            rhs: 1.0 - 8.0 * kf * kf / (nf * nf),
        });
    }
    checks.push(BoundCheck { name: "Q/(3pi^2) <= half".into(), lhs: q / (3.0 * PI * PI), rhs: half });
    checks.push(BoundCheck { name: "half <= Q/12".into(), lhs: half, rhs: q / 12.0 });
    let mut q_lower_ok = true;
    let mut q_upper_ok = true;
    for l in 0..n / 2 {
        for k in 0..n / 2 {
            let r = (k * k + l * l) as f64;
            let qq = (k * k + l * l - k * l) as f64;
            q_lower_ok &= r / 2.0 <= qq;
            q_upper_ok &= qq <= r;
        }
    }
    checks.push(BoundCheck {
        name: "(k^2+l^2)/2 <= Q".into(),
        lhs: if q_lower_ok { 0.0 } else { 1.0 },
        rhs: 0.0,
    });
    checks.push(BoundCheck {
        name: "Q <= k^2+l^2".into(),
        lhs: if q_upper_ok { 0.0 } else { 1.0 },
        rhs: 0.0,
    });
    checks.push(BoundCheck { name: "S/(3pi^2) <= half".into(), lhs: s / (3.0 * PI * PI), rhs: half });
    checks.push(BoundCheck { name: "half <= S/6".into(), lhs: half, rhs: s / 6.0 });
    Ok(AppendixReport {
        n,
        c_squared: full,
        c_squared_half: half,
        q_sum: q,
        s_sum: s,
        checks,
    })
}

/// `(π/(2λ), n²λ²/8)`
pub fn predicted_runtime_and_probability(n: usize) -> Result<(f64, f64)> {
    let lambda = lambda_exact(n)?;
    Ok(prediction_from_lambda(n, lambda))
}

pub fn prediction_from_lambda(n: usize, lambda: f64) -> (f64, f64) {
    let nf = n as f64;
    (PI / (2.0 * lambda), nf * nf * lambda * lambda / 8.0)
}

/// Largest `N` accepted by [`overlap_checks`].
pub const OVERLAP_MAX_N: usize = 16;

/// Dense `−U₀ = −U R₀` with the marked vertex at `(0,0,0)`.
pub fn dense_negated_search_operator(n: usize, theta: f64) -> Result<DMatrix<Complex64>> {
    let lat = HexLattice::new(n)?;
    let mut u = dense_evolution_matrix(&WalkAngles::uniform(theta), &lat)?;
    // right-multiplying by R₀ flips column 0
    for r in 0..u.nrows() {
        u[(r, 0)] = -u[(r, 0)];
    }
    Ok(-u)
}

/// Dense checks on the two principal eigenvectors of `−U₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    pub n: usize,
    pub lambda: f64,
    /// Distance of `e^{+iλ}` and `e^{−iλ}` to the nearest computed eigenvalue.
    pub eigenvalue_errors: (f64, f64),
    /// `‖(−U₀)|λ±⟩ − e^{±iλ}|λ±⟩‖`
    pub residuals: (f64, f64),
    /// `⟨0,0,0|λ⟩` after rotating it onto the positive real axis.
    pub marked_overlap: f64,
    /// `⟨0,0,0|λ⟩ / (nλ/(2√2))`
    pub marked_overlap_ratio: f64,
    /// `|⟨λ|ψ₀⟩|² + |⟨λ⁻|ψ₀⟩|²`
    pub initial_weight: f64,
}

pub fn overlap_checks(n: usize) -> Result<OverlapReport> {
    if n > OVERLAP_MAX_N {
        return Err(Error::LatticeTooLarge {
            vertices: 2 * n * n,
            limit: 2 * OVERLAP_MAX_N * OVERLAP_MAX_N,
        });
    }
    let lambda = lambda_exact(n)?;
    let m = dense_negated_search_operator(n, PI / 3.0)?;
    let spectrum = eigenvalues(&m)?;
    let mu_p = Complex64::from_polar(1.0, lambda);
    let mu_m = Complex64::from_polar(1.0, -lambda);
    let mut v_p = eigenvector_near(&m, mu_p)?;
    let v_m = eigenvector_near(&m, mu_m)?;
    let residual = |v: &DVector<Complex64>, mu: Complex64| (&m * v - v * mu).norm();

    let phase = v_p[0].conj() / v_p[0].norm();
    v_p *= phase;
    let dim = 2 * n * n;
    let psi0 = DVector::from_element(dim, Complex64::new(1.0 / (dim as f64).sqrt(), 0.0));
    let nf = n as f64;
    Ok(OverlapReport {
        n,
        lambda,
        eigenvalue_errors: (nearest_distance(mu_p, &spectrum), nearest_distance(mu_m, &spectrum)),
        residuals: (residual(&v_p, mu_p), residual(&v_m, mu_m)),
        marked_overlap: v_p[0].re,
        marked_overlap_ratio: v_p[0].re / (nf * lambda / (2.0 * 2f64.sqrt())),
        initial_weight: v_p.dotc(&psi0).norm_sqr() + v_m.dotc(&psi0).norm_sqr(),
    })
}

/// Predictions and simulation for one lattice size.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchAnalysis {
    pub n: usize,
    pub lambda: f64,
    pub c: f64,
    pub s: f64,
    pub t_pred: f64,
    pub p_pred: f64,
    pub run: SearchRun,
}

impl SearchAnalysis {
    pub fn vertices(&self) -> usize {
        2 * self.n * self.n
    }

    /// Correlation of `p_marked(t)` with `sin²(λt)` over `t ≤ 2 t_pred`.
    pub fn sinusoid_correlation(&self) -> Result<f64> {
        let t_end = ((2.0 * self.t_pred).floor() as usize).min(self.run.series.len() - 1);
        let sim = &self.run.series[..=t_end];
        let model: Vec<f64> = (0..=t_end)
            .map(|t| (self.lambda * t as f64).sin().powi(2))
            .collect();
        correlation(sim, &model)
    }
}

/// Runs the search for `config.n` at `θ = π/3` predictions. When
/// `config.t_max` is zero it defaults to `⌈2.5 t_pred⌉`.
pub fn analyze(config: &SearchConfig) -> Result<SearchAnalysis> {
    let lat = HexLattice::new(config.n)?;
    let lambda = lambda_exact(config.n)?;
    let (t_pred, p_pred) = prediction_from_lambda(config.n, lambda);
    let mut cfg = *config;
    if cfg.t_max == 0 {
        cfg.t_max = (2.5 * t_pred).ceil() as usize;
    }
    let run = run_search(&cfg, &lat)?;
    Ok(SearchAnalysis {
        n: config.n,
        lambda,
        c: c_constant(config.n),
        s: s_sum(config.n),
        t_pred,
        p_pred,
        run,
    })
}
