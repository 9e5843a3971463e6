//! Localization diagnostics: stationary points of the eigenphase surface,
//! Hessians, the spectral amplitude sum and long-time decay fits.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{check_light_cone, InitialState};
use crate::error::{Error, Result};
use crate::evolution::StateVector;
use crate::fit::linear_fit;
use crate::lattice::{HexLattice, Vertex};
use crate::spectral::{block_eigensystem, fourier_block_continuous, SpectralPropagator};

/// `sin φ` below this makes the phase non-differentiable.
pub const SINGULAR_SIN_PHI: f64 = 1e-9;

const CHUNK: usize = 4096;

/// `φ(k, l) ∈ [0, π]` with `cos φ = a cos θ`, for continuous momenta.
pub fn phase(k: f64, l: f64, theta: f64) -> f64 {
    block_eigensystem(&fourier_block_continuous(k, l, theta)).phi
}

fn sin_phase(k: f64, l: f64, theta: f64) -> f64 {
    let b = fourier_block_continuous(k, l, theta);
    (b.diag.im * b.diag.im + b.off_diag.norm_sqr()).sqrt()
}

fn regular_sin_phase(k: f64, l: f64, theta: f64) -> Result<f64> {
    let s = sin_phase(k, l, theta);
    if s < SINGULAR_SIN_PHI {
        Err(Error::SingularPoint { k, l, sin_phi: s })
    } else {
        Ok(s)
    }
}

/// `cos θ sin²θ`
fn prefactor(theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    c * s * s
}

/// The two stationarity conditions `sin k + sin(k − l)` and `sin l + sin(l − k)`.
pub fn stationarity(k: f64, l: f64) -> (f64, f64) {
    (k.sin() + (k - l).sin(), l.sin() + (l - k).sin())
}

/// `(∂φ/∂k, ∂φ/∂l) = −cos θ sin²θ (sin k + sin(k−l), sin l + sin(l−k)) / sin φ`.
pub fn phase_gradient(k: f64, l: f64, theta: f64) -> Result<(f64, f64)> {
    let s = regular_sin_phase(k, l, theta)?;
    let (gk, gl) = stationarity(k, l);
    let p = prefactor(theta);
    Ok((-p * gk / s, -p * gl / s))
}

/// Second derivatives of `φ`.
pub fn phase_hessian(k: f64, l: f64, theta: f64) -> Result<[[f64; 2]; 2]> {
    let s = regular_sin_phase(k, l, theta)?;
    let p = prefactor(theta);
    let u = fourier_block_continuous(k, l, theta).diag.re;
    let (gk, gl) = stationarity(k, l);
    let du = [p * gk, p * gl];
    let ckl = (k - l).cos();
    let ddu = [
        [p * (k.cos() + ckl), -p * ckl],
        [-p * ckl, p * (l.cos() + ckl)],
    ];
    // φ = arccos u
    let mut h = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            h[i][j] = -ddu[i][j] / s - u * du[i] * du[j] / (s * s * s);
        }
    }
    Ok(h)
}

/// `det` of [`phase_hessian`].
pub fn hessian_det(k: f64, l: f64, theta: f64) -> Result<f64> {
    let h = phase_hessian(k, l, theta)?;
    Ok(h[0][0] * h[1][1] - h[0][1] * h[1][0])
}

/// The closed-form determinant as commonly printed:
///
/// ```text
/// cos θ sin²θ / sin²φ · | cos k + cos(k−l)      −cos φ − cos(k−l) |
///                       | −cos φ − cos(k−l)     cos l + cos(k−l)  |
/// ```
///
/// It does not agree with [`hessian_det`]; it is kept for comparison.
pub fn hessian_det_formula(k: f64, l: f64, theta: f64) -> Result<f64> {
    let s = regular_sin_phase(k, l, theta)?;
    let cos_phi = fourier_block_continuous(k, l, theta).diag.re;
    let ckl = (k - l).cos();
    let off = -cos_phi - ckl;
    let det = (k.cos() + ckl) * (l.cos() + ckl) - off * off;
    Ok(prefactor(theta) / (s * s) * det)
}

/// Central finite-difference Hessian determinant of [`phase`].
pub fn numerical_hessian_det(k: f64, l: f64, theta: f64, h: f64) -> f64 {
    let f = |dk: f64, dl: f64| phase(k + dk, l + dl, theta);
    let f0 = f(0.0, 0.0);
    let fkk = (f(h, 0.0) - 2.0 * f0 + f(-h, 0.0)) / (h * h);
    let fll = (f(0.0, h) - 2.0 * f0 + f(0.0, -h)) / (h * h);
    let fkl = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
    fkk * fll - fkl * fkl
}

/// Central finite-difference gradient of [`phase`].
pub fn numerical_gradient(k: f64, l: f64, theta: f64, h: f64) -> (f64, f64) {
    (
        (phase(k + h, l, theta) - phase(k - h, l, theta)) / (2.0 * h),
        (phase(k, l + h, theta) - phase(k, l - h, theta)) / (2.0 * h),
    )
}

/// A solution of the stationarity system on `[−π, π)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub k: f64,
    pub l: f64,
    /// `max(|sin k + sin(k−l)|, |sin l + sin(l−k)|)`
    pub residual: f64,
    pub sin_phi: f64,
    /// `|∂φ/∂k| + |∂φ/∂l|`, absent where `φ` is singular.
    pub gradient_residual: Option<f64>,
    pub hessian_det: Option<f64>,
    pub hessian_det_formula: Option<f64>,
    pub hessian_det_numerical: f64,
}

fn wrap(x: f64) -> f64 {
    let w = (x + PI).rem_euclid(2.0 * PI) - PI;
    // snap values that rounded just below π onto −π
    if PI - w.abs() < 1e-12 {
        -PI
    } else {
        w
    }
}

fn torus_distance(a: (f64, f64), b: (f64, f64)) -> f64 {
    let d = |x: f64, y: f64| wrap(x - y).abs();
    d(a.0, b.0).max(d(a.1, b.1))
}

fn newton(mut k: f64, mut l: f64) -> Option<(f64, f64)> {
    for _ in 0..60 {
        let (gk, gl) = stationarity(k, l);
        if gk.abs().max(gl.abs()) < 1e-15 {
            break;
        }
        let ckl = (k - l).cos();
        let j = [[k.cos() + ckl, -ckl], [-ckl, l.cos() + ckl]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-14 {
            return None;
        }
        let dk = (j[1][1] * gk - j[0][1] * gl) / det;
        let dl = (-j[1][0] * gk + j[0][0] * gl) / det;
        k -= dk;
        l -= dl;
        if !(k.is_finite() && l.is_finite()) {
            return None;
        }
    }
    let (gk, gl) = stationarity(k, l);
    (gk.abs().max(gl.abs()) < 1e-12).then_some((wrap(k), wrap(l)))
}

/// Stationary points of `φ` in `[−π, π)²`, found by Newton refinement from a
/// `seeds × seeds` grid. The stationarity system does not depend on θ; θ
/// only enters the reported Hessians and gradient residuals.
pub fn find_critical_points(theta: f64, seeds: usize) -> Vec<CriticalPoint> {
    let step = 2.0 * PI / seeds as f64;
    let found: Vec<Option<(f64, f64)>> = (0..seeds * seeds)
        .into_par_iter()
        .map(|i| {
            let k0 = -PI + (i % seeds) as f64 * step + 0.37 * step;
            let l0 = -PI + (i / seeds) as f64 * step + 0.61 * step;
            newton(k0, l0)
        })
        .collect();
    let mut roots: Vec<(f64, f64)> = Vec::new();
    for r in found.into_iter().flatten() {
        if roots.iter().all(|&q| torus_distance(q, r) > 1e-6) {
            roots.push(r);
        }
    }
    roots.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    roots
        .into_iter()
        .map(|(k, l)| describe_point(k, l, theta))
        .collect()
}

fn describe_point(k: f64, l: f64, theta: f64) -> CriticalPoint {
    let (gk, gl) = stationarity(k, l);
    CriticalPoint {
        k,
        l,
        residual: gk.abs().max(gl.abs()),
        sin_phi: sin_phase(k, l, theta),
        gradient_residual: phase_gradient(k, l, theta).ok().map(|(a, b)| a.abs() + b.abs()),
        hessian_det: hessian_det(k, l, theta).ok(),
        hessian_det_formula: hessian_det_formula(k, l, theta).ok(),
        hessian_det_numerical: numerical_hessian_det(k, l, theta, 1e-4),
    }
}

/// Per-momentum coefficients `h^{±j}_kl = v±[j] ⟨v±|s_kl⟩` of a state, so
/// that `⟨x,y,j|Uᵗψ⟩ = (1/n) Σ ω^{kx+ly} (h^{+j} e^{itφ} + h^{−j} e^{−itφ})`.
#[derive(Debug, Clone)]
pub struct AmplitudeIntegrand {
    n: usize,
    phi: Vec<f64>,
    h_plus: [Vec<Complex64>; 2],
    h_minus: [Vec<Complex64>; 2],
}

impl AmplitudeIntegrand {
    pub fn new(state: &StateVector, theta: f64, lat: &HexLattice) -> Result<Self> {
        let prop = SpectralPropagator::new(lat, theta);
        let m = prop.forward(state)?;
        let n = lat.n();
        let mut phi = Vec::with_capacity(n * n);
        let mut h_plus = [Vec::with_capacity(n * n), Vec::with_capacity(n * n)];
        let mut h_minus = [Vec::with_capacity(n * n), Vec::with_capacity(n * n)];
        for l in 0..n {
            for k in 0..n {
                let eig = &prop.spectrum().get(k, l).1;
                let (cp, cm) = eig.coefficients(m.spinor(k, l));
                phi.push(eig.phi);
                for j in 0..2 {
                    h_plus[j].push(cp * eig.v_plus[j]);
                    h_minus[j].push(cm * eig.v_minus[j]);
                }
            }
        }
        Ok(AmplitudeIntegrand {
            n,
            phi,
            h_plus,
            h_minus,
        })
    }

    /// Coefficient pair `(h^{+j}_kl, h^{−j}_kl)`.
    pub fn coefficients(&self, k: usize, l: usize, j: usize) -> (Complex64, Complex64) {
        let i = l * self.n + k;
        (self.h_plus[j][i], self.h_minus[j][i])
    }

    /// `⟨v|Uᵗψ⟩` by the spectral sum.
    pub fn amplitude(&self, v: Vertex, t: usize) -> Complex64 {
        let n = self.n;
        let j = v.s as usize;
        let t = t as f64;
        let two_pi_n = 2.0 * PI / n as f64;
        let partial: Vec<Complex64> = (0..n * n)
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = Complex64::new(0.0, 0.0);
                for &i in chunk {
                    let (k, l) = (i % n, i / n);
                    let wave = ((k * v.x + l * v.y) % n) as f64 * two_pi_n;
                    let phase = t * self.phi[i];
                    acc += self.h_plus[j][i] * Complex64::from_polar(1.0, wave + phase)
                        + self.h_minus[j][i] * Complex64::from_polar(1.0, wave - phase);
                }
                acc
            })
            .collect();
        partial.into_iter().sum::<Complex64>() / n as f64
    }
}

/// `⟨vertex|Uᵗ ψ(0)⟩` for the initial state `init`.
pub fn amplitude_at(
    vertex: Vertex,
    init: &InitialState,
    t: usize,
    theta: f64,
    lat: &HexLattice,
) -> Result<Complex64> {
    lat.index(vertex)?;
    let psi = init.build(lat)?;
    Ok(AmplitudeIntegrand::new(&psi, theta, lat)?.amplitude(vertex, t))
}

/// Log-log fit of the local maxima of `p_vertex(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub exponent: f64,
    pub r_squared: f64,
    pub series: Vec<(usize, f64)>,
    pub maxima: Vec<(usize, f64)>,
}

/// Strict local maxima of a series: `p[t−1] < p[t] ≥ p[t+1]`, positive only.
pub fn local_maxima(series: &[(usize, f64)]) -> Vec<(usize, f64)> {
    series
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 >= w[2].1 && w[1].1 > 0.0)
        .map(|w| w[1])
        .collect()
}

/// Return-probability decay at `vertex` over `t ∈ [t_lo, t_hi]`.
pub fn decay_fit(
    vertex: Vertex,
    init: &InitialState,
    theta: f64,
    window: (usize, usize),
    lat: &HexLattice,
) -> Result<DecayFit> {
    let (t_lo, t_hi) = window;
    if t_lo == 0 || t_hi <= t_lo + 2 {
        return Err(Error::invalid(format!("bad decay window [{t_lo}, {t_hi}]")));
    }
    lat.index(vertex)?;
    let psi = init.build(lat)?;
    check_light_cone(&psi, t_hi, lat)?;
    let integrand = AmplitudeIntegrand::new(&psi, theta, lat)?;
    let series: Vec<(usize, f64)> = (t_lo..=t_hi)
        .map(|t| (t, integrand.amplitude(vertex, t).norm_sqr()))
        .collect();
    let maxima = local_maxima(&series);
    if maxima.len() < 2 {
        return Err(Error::NumericalFailure(format!(
            "only {} local maxima in [{t_lo}, {t_hi}]",
            maxima.len()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = maxima
        .iter()
        .map(|&(t, p)| ((t as f64).ln(), p.ln()))
        .unzip();
    let fit = linear_fit(&xs, &ys)?;
    Ok(DecayFit {
        exponent: fit.slope,
        r_squared: fit.r_squared,
        series,
        maxima,
    })
}

/// `(t, max_v p_v(t)·t²)` at each requested time.
pub fn scaled_peak_series(
    init: &InitialState,
    theta: f64,
    times: &[usize],
    lat: &HexLattice,
) -> Result<Vec<(usize, f64)>> {
    let psi = init.build(lat)?;
    if let Some(&t_max) = times.iter().max() {
        check_light_cone(&psi, t_max, lat)?;
    }
    let prop = SpectralPropagator::new(lat, theta);
    let m = prop.forward(&psi)?;
    times
        .iter()
        .map(|&t| {
            let out = prop.inverse(prop.propagate(&m, t))?;
            let peak = out
                .amplitudes()
                .iter()
                .map(|a| a.norm_sqr())
                .fold(0.0, f64::max);
            Ok((t, peak * (t * t) as f64))
        })
        .collect()
}
