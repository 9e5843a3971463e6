//! Momentum-space form of the walk.
//!
//! The sublattice Fourier modes
//!
//! ```text
//! |ψ^s_kl⟩ = (1/n) Σ_{x,y} ω^{kx+ly} |x,y,s⟩,   ω = e^{2πi/n}
//! ```
//!
//! span a two-dimensional invariant subspace for each momentum `(k, l)`. On
//! it the walk (uniform angle θ) acts as the 2×2 unitary
//!
//! ```text
//! U_kl = [  A   B  ]     A = (a + ib) cos θ,   B = (c + id) sin θ
//!        [ −B*  A* ]
//! ```
//!
//! with eigenvalues `e^{±iφ}`, `cos φ = a cos θ`. Transforming a state to
//! spinors takes two 2-D FFTs, so any power `Uᵗ` costs O(N log N) regardless
//! of `t`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::evolution::{StateVector, WalkAngles};
use crate::lattice::HexLattice;

/// Blocks with `|B|` below this are treated as diagonal.
pub const DEGENERATE_OFF_DIAG: f64 = 1e-9;

/// Two-component amplitude on the `(empty, full)` Fourier pair.
pub type Spinor = [Complex64; 2];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Reduced walk operator on momentum `(k, l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierBlock {
    pub k: usize,
    pub l: usize,
    /// `2πk/n`
    pub k_angle: f64,
    /// `2πl/n`
    pub l_angle: f64,
    pub theta: f64,
    /// `f = cos k̃ + cos l̃ + cos(k̃ − l̃)`
    pub cos_sum: f64,
    /// `g = sin k̃ + sin l̃ + sin(k̃ − l̃)`
    pub sin_sum: f64,
    /// `a = −f sin²θ + cos²θ`
    pub a: f64,
    /// `b = −g sin²θ`
    pub b: f64,
    /// `c = b + sin k̃ + sin l̃`
    pub c: f64,
    /// `d = a + cos k̃ + cos l̃`
    pub d: f64,
    /// Diagonal entry `A = (a + ib) cos θ`.
    pub diag: Complex64,
    /// Off-diagonal entry `B = (c + id) sin θ`.
    pub off_diag: Complex64,
}

impl FourierBlock {
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [
            [self.diag, self.off_diag],
            [-self.off_diag.conj(), self.diag.conj()],
        ]
    }

    /// `U_kl · s`
    pub fn apply(&self, s: Spinor) -> Spinor {
        [
            self.diag * s[0] + self.off_diag * s[1],
            -self.off_diag.conj() * s[0] + self.diag.conj() * s[1],
        ]
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.diag.norm_sqr() + self.off_diag.norm_sqr() - 1.0).abs()
    }
}

/// Builds the reduced block for momentum `(k, l)` on an `n × n` lattice.
pub fn fourier_block(k: usize, l: usize, theta: f64, n: usize) -> FourierBlock {
    let k_angle = 2.0 * PI * k as f64 / n as f64;
    let l_angle = 2.0 * PI * l as f64 / n as f64;
    fourier_block_at(k, l, k_angle, l_angle, theta)
}

/// Same as [`fourier_block`] for continuous momenta; `k`, `l` are set to 0.
pub fn fourier_block_continuous(k_angle: f64, l_angle: f64, theta: f64) -> FourierBlock {
    fourier_block_at(0, 0, k_angle, l_angle, theta)
}

fn fourier_block_at(k: usize, l: usize, k_angle: f64, l_angle: f64, theta: f64) -> FourierBlock {
    let (sk, ck) = k_angle.sin_cos();
    let (sl, cl) = l_angle.sin_cos();
    let (skl, ckl) = (k_angle - l_angle).sin_cos();
    let (st, ct) = theta.sin_cos();
    let cos_sum = ck + cl + ckl;
    let sin_sum = sk + sl + skl;
    let a = -cos_sum * st * st + ct * ct;
    let b = -sin_sum * st * st;
    let c = b + sk + sl;
    let d = a + ck + cl;
    FourierBlock {
        k,
        l,
        k_angle,
        l_angle,
        theta,
        cos_sum,
        sin_sum,
        a,
        b,
        c,
        d,
        diag: Complex64::new(a, b) * ct,
        off_diag: Complex64::new(c, d) * st,
    }
}

/// Eigen-decomposition of one block: `U_kl v± = e^{±iφ} v±`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigensystem {
    /// `φ ∈ [0, π]`
    pub phi: f64,
    /// Squared norm of the unnormalized eigenvector `(B, e^{iφ} − A)`.
    pub gamma_plus: f64,
    /// Squared norm of `(B, e^{−iφ} − A)`.
    pub gamma_minus: f64,
    pub v_plus: Spinor,
    pub v_minus: Spinor,
}

impl BlockEigensystem {
    pub fn eigenvalue_plus(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phi)
    }

    pub fn eigenvalue_minus(&self) -> Complex64 {
        Complex64::from_polar(1.0, -self.phi)
    }

    /// `(⟨v+|s⟩, ⟨v−|s⟩)`
    pub fn coefficients(&self, s: Spinor) -> (Complex64, Complex64) {
        (dot(&self.v_plus, &s), dot(&self.v_minus, &s))
    }

    /// `U_klᵗ s` through the eigen-decomposition.
    pub fn power_apply(&self, s: Spinor, t: f64) -> Spinor {
        let (cp, cm) = self.coefficients(s);
        let ep = Complex64::from_polar(1.0, t * self.phi) * cp;
        let em = Complex64::from_polar(1.0, -t * self.phi) * cm;
        [
            ep * self.v_plus[0] + em * self.v_minus[0],
            ep * self.v_plus[1] + em * self.v_minus[1],
        ]
    }
}

fn dot(u: &Spinor, v: &Spinor) -> Complex64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

/// Eigenphases and eigenvectors of a block.
///
/// `φ` is taken on `[0, π]`, so the `±` pair carries the sign. When `|B|` is
/// below [`DEGENERATE_OFF_DIAG`] the block is diagonal and the basis vectors
/// are used, ordered so that `v+` belongs to `e^{+iφ}`; if in addition the
/// block is a multiple of the identity (`γ± ≈ 0`, e.g. `(0,0)` at θ = π/3)
/// the eigenvectors are `(1, ±1)/√2`.
pub fn block_eigensystem(block: &FourierBlock) -> BlockEigensystem {
    let diag = block.diag;
    let off = block.off_diag;
    let off_sqr = off.norm_sqr();
    let cos_phi = diag.re;
    let sin_phi = (diag.im * diag.im + off_sqr).sqrt();
    let phi = sin_phi.atan2(cos_phi);

    // Imaginary parts of e^{+iφ} − A and e^{−iφ} − A (the real parts vanish),
    // written to avoid cancellation when |B| is small.
    let plus_gap = if diag.im > 0.0 {
        off_sqr / (sin_phi + diag.im)
    } else {
        sin_phi - diag.im
    };
    let minus_gap = if diag.im < 0.0 {
        -off_sqr / (sin_phi - diag.im)
    } else {
        -(sin_phi + diag.im)
    };
    let gamma_plus = off_sqr + plus_gap * plus_gap;
    let gamma_minus = off_sqr + minus_gap * minus_gap;

    let (v_plus, v_minus) = if off.norm() < DEGENERATE_OFF_DIAG {
        if gamma_plus < DEGENERATE_OFF_DIAG && gamma_minus < DEGENERATE_OFF_DIAG {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let r = Complex64::new(h, 0.0);
            ([r, r], [r, -r])
        } else if diag.im >= 0.0 {
            ([ONE, ZERO], [ZERO, ONE])
        } else {
            ([ZERO, ONE], [ONE, ZERO])
        }
    } else {
        let np = gamma_plus.sqrt();
        let nm = gamma_minus.sqrt();
        (
            [off / np, Complex64::new(0.0, plus_gap / np)],
            [off / nm, Complex64::new(0.0, minus_gap / nm)],
        )
    };

    BlockEigensystem {
        phi,
        gamma_plus,
        gamma_minus,
        v_plus,
        v_minus,
    }
}

/// `γ± = 2 − 2(a cos φ ± b sin φ) cos θ`, the closed form of the eigenvector
/// normalization.
pub fn gamma_closed_form(block: &FourierBlock, phi: f64) -> (f64, f64) {
    let ct = block.theta.cos();
    let (sp, cp) = phi.sin_cos();
    (
        2.0 - 2.0 * (block.a * cp + block.b * sp) * ct,
        2.0 - 2.0 * (block.a * cp - block.b * sp) * ct,
    )
}

/// A state expressed on the Fourier pairs: `planes[s][l·n + k] = ⟨ψ^s_kl|ψ⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    n: usize,
    planes: [Vec<Complex64>; 2],
}

impl MomentumState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spinor(&self, k: usize, l: usize) -> Spinor {
        let i = l * self.n + k;
        [self.planes[0][i], self.planes[1][i]]
    }

    pub fn set_spinor(&mut self, k: usize, l: usize, s: Spinor) {
        let i = l * self.n + k;
        self.planes[0][i] = s[0];
        self.planes[1][i] = s[1];
    }

    pub fn norm_sqr(&self) -> f64 {
        self.planes
            .iter()
            .flat_map(|p| p.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }
}

/// Planned forward/inverse 2-D transforms of size `n × n`.
#[derive(Clone)]
pub struct Fft2 {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fft2 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fft2").field("n", &self.n).finish()
    }
}

impl Fft2 {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Fft2 {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    fn transform(&self, plane: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        // rows (x → k), then columns (y → l) through a transpose
        fft.process(plane);
        transpose_in_place(plane, n);
        fft.process(plane);
        transpose_in_place(plane, n);
        let scale = 1.0 / n as f64;
        for a in plane.iter_mut() {
            *a *= scale;
        }
    }

    /// `(1/n) Σ ω^{−(kx+ly)} ψ(x, y)`
    pub fn forward(&self, plane: &mut [Complex64]) {
        self.transform(plane, &self.forward);
    }

    /// `(1/n) Σ ω^{kx+ly} s(k, l)`
    pub fn inverse(&self, plane: &mut [Complex64]) {
        self.transform(plane, &self.inverse);
    }
}

fn transpose_in_place(m: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            m.swap(r * n + c, c * n + r);
        }
    }
}

/// Spinors `(⟨ψ⁰_kl|ψ⟩, ⟨ψ¹_kl|ψ⟩)` for every momentum.
pub fn forward_transform(state: &StateVector, lat: &HexLattice) -> Result<MomentumState> {
    forward_with(&Fft2::new(lat.n()), state, lat)
}

fn forward_with(fft: &Fft2, state: &StateVector, lat: &HexLattice) -> Result<MomentumState> {
    state.check_len(lat)?;
    let nn = lat.plane_len();
    let amps = state.amplitudes();
    let mut planes = [amps[..nn].to_vec(), amps[nn..].to_vec()];
    planes.par_iter_mut().for_each(|p| fft.forward(p));
    Ok(MomentumState { n: lat.n(), planes })
}

/// Inverse of [`forward_transform`].
pub fn inverse_transform(momentum: &MomentumState, lat: &HexLattice) -> Result<StateVector> {
    inverse_with(&Fft2::new(lat.n()), momentum.clone(), lat)
}

fn inverse_with(fft: &Fft2, mut momentum: MomentumState, lat: &HexLattice) -> Result<StateVector> {
    if momentum.n != lat.n() {
        return Err(Error::DimensionMismatch {
            expected: lat.num_vertices(),
            found: 2 * momentum.n * momentum.n,
        });
    }
    momentum.planes.par_iter_mut().for_each(|p| fft.inverse(p));
    let [mut empty, full] = momentum.planes;
    empty.extend(full);
    Ok(StateVector::new(empty))
}

/// Blocks and eigensystems for every momentum at a fixed angle, indexed
/// `l·n + k`.
#[derive(Debug, Clone)]
pub struct SublatticeSpectrum {
    n: usize,
    theta: f64,
    entries: Vec<(FourierBlock, BlockEigensystem)>,
}

impl SublatticeSpectrum {
    pub fn new(n: usize, theta: f64) -> Self {
        let entries = (0..n * n)
            .into_par_iter()
            .map(|i| {
                let block = fourier_block(i % n, i / n, theta, n);
                (block, block_eigensystem(&block))
            })
            .collect();
        SublatticeSpectrum { n, theta, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn get(&self, k: usize, l: usize) -> &(FourierBlock, BlockEigensystem) {
        &self.entries[l * self.n + k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &(FourierBlock, BlockEigensystem)> {
        self.entries.iter()
    }

    /// All `2n²` eigenvalues `e^{±iφ_kl}` of the walk operator.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.entries
            .iter()
            .flat_map(|(_, e)| [e.eigenvalue_plus(), e.eigenvalue_minus()])
            .collect()
    }
}

/// Reusable `Uᵗ` evaluator for a fixed lattice and uniform angle.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    lat: HexLattice,
    spectrum: SublatticeSpectrum,
    fft: Fft2,
}

impl SpectralPropagator {
    pub fn new(lat: &HexLattice, theta: f64) -> Self {
        SpectralPropagator {
            lat: *lat,
            spectrum: SublatticeSpectrum::new(lat.n(), theta),
            fft: Fft2::new(lat.n()),
        }
    }

    pub fn lattice(&self) -> &HexLattice {
        &self.lat
    }

    pub fn spectrum(&self) -> &SublatticeSpectrum {
        &self.spectrum
    }

    pub fn forward(&self, state: &StateVector) -> Result<MomentumState> {
        forward_with(&self.fft, state, &self.lat)
    }

    pub fn inverse(&self, momentum: MomentumState) -> Result<StateVector> {
        inverse_with(&self.fft, momentum, &self.lat)
    }

    /// Applies `U_klᵗ` to every spinor.
    pub fn propagate(&self, momentum: &MomentumState, t: usize) -> MomentumState {
        let n = self.lat.n();
        let t = t as f64;
        let (p0, p1): (Vec<_>, Vec<_>) = self
            .spectrum
            .entries
            .par_iter()
            .enumerate()
            .map(|(i, (_, eig))| {
                let s = eig.power_apply([momentum.planes[0][i], momentum.planes[1][i]], t);
                (s[0], s[1])
            })
            .unzip();
        MomentumState { n, planes: [p0, p1] }
    }

    pub fn evolve(&self, state: &StateVector, t: usize) -> Result<StateVector> {
        let m = self.forward(state)?;
        self.inverse(self.propagate(&m, t))
    }
}

/// `Uᵗ · state` in O(N log N). Only uniform angles are supported.
pub fn spectral_evolve(
    state: &StateVector,
    t: usize,
    angles: &WalkAngles,
    lat: &HexLattice,
) -> Result<StateVector> {
    let theta = angles.common().ok_or_else(|| {
        Error::Unsupported(format!(
            "spectral evolution needs equal angles, got {:?}",
            angles.theta
        ))
    })?;
    state.check_len(lat)?;
    SpectralPropagator::new(lat, theta).evolve(state, t)
}

/// Smallest positive eigenphase of `−U`, with a momentum attaining it.
pub fn phi_min_with_mode(n: usize, theta: f64) -> (f64, usize, usize) {
    let two_pi = 2.0 * PI;
    let mut best = (f64::INFINITY, 0, 0);
    for l in 0..n {
        for k in 0..n {
            let phi = block_eigensystem(&fourier_block(k, l, theta, n)).phi;
            for arg in [(PI + phi).rem_euclid(two_pi), (PI - phi).rem_euclid(two_pi)] {
                if arg > 1e-12 && arg < best.0 {
                    best = (arg, k, l);
                }
            }
        }
    }
    best
}

/// Smallest positive eigenphase of `−U`.
pub fn phi_min(n: usize, theta: f64) -> f64 {
    phi_min_with_mode(n, theta).0
}

/// Two-term large-`n` expansion of `cos φ_kl`:
/// `(4cos²θ − 3)cos θ + 4π²(k² − kl + l²) sin²θ cos θ / n²`.
pub fn cos_phi_asymptotic(k: i64, l: i64, theta: f64, n: usize) -> f64 {
    let (st, ct) = theta.sin_cos();
    let q = (k * k - k * l + l * l) as f64;
    (4.0 * ct * ct - 3.0) * ct + 4.0 * PI * PI * q * st * st * ct / (n * n) as f64
}
