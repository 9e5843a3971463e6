//! Direct-space evolution.
//!
//! Each tessellation Hamiltonian `H_j = 2 Σ |η⟩⟨η| − I` is a reflection whose
//! action is the swap of the two amplitudes inside every cell, so
//! `exp(iθH_j) = cos θ·I + i sin θ·H_j` is applied in place in O(N). One walk
//! step is `U = e^{iθ₂H₂} e^{iθ₁H₁} e^{iθ₀H₀}` (red first, blue last).
//!
//! [`dense_evolution_matrix`] rebuilds `U` as an explicit matrix from the cell
//! projectors and is meant only as a brute-force oracle for small lattices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Color, HexLattice, Vertex};

/// Largest vertex count accepted by [`dense_evolution_matrix`].
pub const DENSE_LIMIT: usize = 4096;

/// Planes at least this wide are processed row-parallel.
const PARALLEL_MIN_N: usize = 128;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Amplitudes over the `2n²` lattice vertices in flat-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amps: Vec<Complex64>) -> Self {
        StateVector { amps }
    }

    pub fn zeros(lat: &HexLattice) -> Self {
        StateVector::new(vec![Complex64::new(0.0, 0.0); lat.num_vertices()])
    }

    pub fn basis(lat: &HexLattice, v: Vertex) -> Result<Self> {
        let mut s = StateVector::zeros(lat);
        s.amps[lat.index(v)?] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Normalized superposition of the given `(vertex, amplitude)` terms.
    /// Repeated vertices accumulate.
    pub fn superposition(lat: &HexLattice, terms: &[(Vertex, Complex64)]) -> Result<Self> {
        let mut s = StateVector::zeros(lat);
        for &(v, a) in terms {
            s.amps[lat.index(v)?] += a;
        }
        let norm = s.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::invalid("superposition has zero or non-finite norm"));
        }
        s.scale(1.0 / norm);
        Ok(s)
    }

    /// Seeded random unit state (real and imaginary parts uniform in [−1, 1]).
    pub fn random(lat: &HexLattice, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s = StateVector::new(
            (0..lat.num_vertices())
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        );
        s.scale(1.0 / s.norm());
        s
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn amplitude(&self, lat: &HexLattice, v: Vertex) -> Result<Complex64> {
        self.check_len(lat)?;
        Ok(self.amps[lat.index(v)?])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.amps {
            *a *= factor;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Largest componentwise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn check_len(&self, lat: &HexLattice) -> Result<()> {
        if self.amps.len() != lat.num_vertices() {
            return Err(Error::DimensionMismatch {
                expected: lat.num_vertices(),
                found: self.amps.len(),
            });
        }
        Ok(())
    }
}

/// Angles `θ₀, θ₁, θ₂` of the red, green and blue local unitaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkAngles {
    pub theta: [f64; 3],
}

impl WalkAngles {
    pub fn new(theta0: f64, theta1: f64, theta2: f64) -> Self {
        WalkAngles {
            theta: [theta0, theta1, theta2],
        }
    }

    pub fn uniform(theta: f64) -> Self {
        WalkAngles { theta: [theta; 3] }
    }

    /// The common angle when all three coincide.
    pub fn common(&self) -> Option<f64> {
        let [a, b, c] = self.theta;
        (a == b && b == c).then_some(a)
    }

    pub fn for_color(&self, color: Color) -> f64 {
        self.theta[color.hamiltonian_index()]
    }
}

/// Pairs every full-sublattice row with the empty-sublattice row holding the
/// partners of its cells, then calls `f(full_row, empty_row)`. Within a row,
/// the cell of `full_row[x]` is `empty_row[x]`, except for red where it is
/// `empty_row[(x + 1) % n]`.
fn for_each_row_pair<F>(n: usize, color: Color, amps: &mut [Complex64], f: F)
where
    F: Fn(&mut [Complex64], &mut [Complex64]) + Sync,
{
    let (empty, full) = amps.split_at_mut(n * n);
    let mut empty_rows: Vec<&mut [Complex64]> = empty.chunks_mut(n).collect();
    if color == Color::Green {
        empty_rows.rotate_left(1);
    }
    let pairs: Vec<_> = full.chunks_mut(n).zip(empty_rows).collect();
    if n >= PARALLEL_MIN_N {
        pairs.into_par_iter().for_each(|(fr, er)| f(fr, er));
    } else {
        pairs.into_iter().for_each(|(fr, er)| f(fr, er));
    }
}

#[inline]
fn partner_column(color: Color, x: usize, n: usize) -> usize {
    if color == Color::Red {
        if x + 1 == n {
            0
        } else {
            x + 1
        }
    } else {
        x
    }
}

/// Applies the reflection `H_color` (cell swap) in place.
pub fn apply_reflection_in_place(lat: &HexLattice, color: Color, amps: &mut [Complex64]) {
    let n = lat.n();
    for_each_row_pair(n, color, amps, |fr, er| {
        for x in 0..n {
            std::mem::swap(&mut fr[x], &mut er[partner_column(color, x, n)]);
        }
    });
}

/// Applies `exp(iθ H_color) = cos θ + i sin θ H_color` in place.
pub fn apply_local_unitary_in_place(
    lat: &HexLattice,
    color: Color,
    theta: f64,
    amps: &mut [Complex64],
) {
    let n = lat.n();
    let (s, c) = theta.sin_cos();
    let is = I * s;
    for_each_row_pair(n, color, amps, |fr, er| {
        for x in 0..n {
            let e = &mut er[partner_column(color, x, n)];
            let (u, v) = (fr[x], *e);
            fr[x] = u * c + is * v;
            *e = v * c + is * u;
        }
    });
}

/// One walk step in place.
pub fn step_in_place(lat: &HexLattice, angles: &WalkAngles, amps: &mut [Complex64]) {
    for color in Color::ALL {
        apply_local_unitary_in_place(lat, color, angles.for_color(color), amps);
    }
}

/// `H_color · state`.
pub fn apply_reflection(
    state: &StateVector,
    color: Color,
    lat: &HexLattice,
) -> Result<StateVector> {
    state.check_len(lat)?;
    let mut out = state.clone();
    apply_reflection_in_place(lat, color, &mut out.amps);
    Ok(out)
}

/// `exp(iθ H_color) · state`.
pub fn apply_local_unitary(
    state: &StateVector,
    color: Color,
    theta: f64,
    lat: &HexLattice,
) -> Result<StateVector> {
    state.check_len(lat)?;
    let mut out = state.clone();
    apply_local_unitary_in_place(lat, color, theta, &mut out.amps);
    Ok(out)
}

/// `U · state`.
pub fn step(state: &StateVector, angles: &WalkAngles, lat: &HexLattice) -> Result<StateVector> {
    state.check_len(lat)?;
    let mut out = state.clone();
    step_in_place(lat, angles, &mut out.amps);
    Ok(out)
}

/// `Uᵗ · state`.
pub fn evolve(
    state: &StateVector,
    t: usize,
    angles: &WalkAngles,
    lat: &HexLattice,
) -> Result<StateVector> {
    state.check_len(lat)?;
    let mut out = state.clone();
    for _ in 0..t {
        step_in_place(lat, angles, &mut out.amps);
    }
    Ok(out)
}

/// Steps `state` up to `t_max`, calling `observe(t, ψ(t))` for every
/// `t = 0..=t_max`.
pub fn evolve_observed<F>(
    state: &StateVector,
    t_max: usize,
    angles: &WalkAngles,
    lat: &HexLattice,
    mut observe: F,
) -> Result<StateVector>
where
    F: FnMut(usize, &StateVector),
{
    state.check_len(lat)?;
    let mut cur = state.clone();
    observe(0, &cur);
    for t in 1..=t_max {
        step_in_place(lat, angles, &mut cur.amps);
        observe(t, &cur);
    }
    Ok(cur)
}

/// `|amplitude|²` per vertex.
pub fn probability_distribution(state: &StateVector) -> Vec<f64> {
    state.amps.iter().map(|a| a.norm_sqr()).collect()
}

/// Projector `Σ |η⟩⟨η|` onto the cell states of one tessellation.
fn dense_cell_projector(lat: &HexLattice, color: Color) -> DMatrix<Complex64> {
    let dim = lat.num_vertices();
    let mut p = DMatrix::zeros(dim, dim);
    for cell in lat.tessellation(color) {
        let idx = [
            lat.index_unchecked(cell.full),
            lat.index_unchecked(cell.empty),
        ];
        // |η⟩ = (|full⟩ + |empty⟩)/√2
        for &r in &idx {
            for &c in &idx {
                p[(r, c)] += Complex64::new(0.5, 0.0);
            }
        }
    }
    p
}

/// Dense `H_color = 2 Σ |η⟩⟨η| − I`.
pub fn dense_hamiltonian(lat: &HexLattice, color: Color) -> Result<DMatrix<Complex64>> {
    guard_dense(lat)?;
    let dim = lat.num_vertices();
    Ok(dense_cell_projector(lat, color) * Complex64::new(2.0, 0.0) - DMatrix::identity(dim, dim))
}

/// Dense `exp(iθH_color)` through the spectral split of the reflection:
/// `e^{iθ} P + e^{−iθ} (I − P)`.
pub fn dense_local_unitary(
    lat: &HexLattice,
    color: Color,
    theta: f64,
) -> Result<DMatrix<Complex64>> {
    guard_dense(lat)?;
    let dim = lat.num_vertices();
    let p = dense_cell_projector(lat, color);
    let q = DMatrix::<Complex64>::identity(dim, dim) - &p;
    Ok(p * Complex64::from_polar(1.0, theta) + q * Complex64::from_polar(1.0, -theta))
}

/// Explicit `N × N` evolution matrix. Test oracle; refuses `N > 4096`.
pub fn dense_evolution_matrix(
    angles: &WalkAngles,
    lat: &HexLattice,
) -> Result<DMatrix<Complex64>> {
    guard_dense(lat)?;
    let e0 = dense_local_unitary(lat, Color::Red, angles.theta[0])?;
    let e1 = dense_local_unitary(lat, Color::Green, angles.theta[1])?;
    let e2 = dense_local_unitary(lat, Color::Blue, angles.theta[2])?;
    Ok(e2 * e1 * e0)
}

fn guard_dense(lat: &HexLattice) -> Result<()> {
    if lat.num_vertices() > DENSE_LIMIT {
        return Err(Error::LatticeTooLarge {
            vertices: lat.num_vertices(),
            limit: DENSE_LIMIT,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use nalgebra::DVector;

    use super::*;

    fn random_state(lat: &HexLattice, seed: u64) -> StateVector {
        StateVector::random(lat, seed)
    }

    fn to_dvector(s: &StateVector) -> DVector<Complex64> {
        DVector::from_column_slice(s.amplitudes())
    }

    #[test]
    fn zero_angle_is_identity() {
        let lat = HexLattice::new(4).unwrap();
        let psi = random_state(&lat, 1);
        for color in Color::ALL {
            let out = apply_local_unitary(&psi, color, 0.0, &lat).unwrap();
            assert_eq!(out, psi);
        }
        let out = step(&psi, &WalkAngles::uniform(0.0), &lat).unwrap();
        assert_eq!(out, psi);
        assert_eq!(evolve(&psi, 0, &WalkAngles::uniform(1.0), &lat).unwrap(), psi);
    }

    #[test]
    fn quarter_turn_blue_moves_to_partner() {
        let lat = HexLattice::new(4).unwrap();
        let psi = StateVector::basis(&lat, Vertex::new(2, 1, 0)).unwrap();
        let out = apply_local_unitary(&psi, Color::Blue, PI / 2.0, &lat).unwrap();
        let expected = StateVector::basis(&lat, Vertex::new(2, 1, 1)).unwrap();
        for (a, b) in out.amplitudes().iter().zip(expected.amplitudes()) {
            assert!((a - I * b).norm() < 1e-15);
        }
    }

    #[test]
    fn reflection_is_involution() {
        let lat = HexLattice::new(6).unwrap();
        let psi = random_state(&lat, 2);
        for color in Color::ALL {
            let once = apply_reflection(&psi, color, &lat).unwrap();
            assert_ne!(once, psi);
            let twice = apply_reflection(&once, color, &lat).unwrap();
            assert_eq!(twice, psi);
        }
    }

    #[test]
    fn reflection_matches_dense_hamiltonian() {
        let lat = HexLattice::new(4).unwrap();
        let psi = random_state(&lat, 3);
        for color in Color::ALL {
            let h = dense_hamiltonian(&lat, color).unwrap();
            let dense = &h * to_dvector(&psi);
            let sparse = apply_reflection(&psi, color, &lat).unwrap();
            for (a, b) in sparse.amplitudes().iter().zip(dense.iter()) {
                assert!((a - b).norm() < 1e-14);
            }
            let hh = &h * &h;
            assert!((hh - DMatrix::identity(32, 32)).camax() < 1e-14);
        }
    }

    #[test]
    fn local_unitary_inverse() {
        let lat = HexLattice::new(4).unwrap();
        let psi = random_state(&lat, 4);
        for color in Color::ALL {
            let fwd = apply_local_unitary(&psi, color, 0.83, &lat).unwrap();
            let back = apply_local_unitary(&fwd, color, -0.83, &lat).unwrap();
            assert!(back.max_abs_diff(&psi) < 1e-14);
        }
    }

    #[test]
    fn local_unitary_matches_dense_exponential_on_basis() {
        let lat = HexLattice::new(2).unwrap();
        let theta = 0.61;
        for color in Color::ALL {
            let e = dense_local_unitary(&lat, color, theta).unwrap();
            for v in lat.vertices() {
                let psi = StateVector::basis(&lat, v).unwrap();
                let sparse = apply_local_unitary(&psi, color, theta, &lat).unwrap();
                let col = e.column(lat.index(v).unwrap());
                for (a, b) in sparse.amplitudes().iter().zip(col.iter()) {
                    assert!((a - b).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn dense_identity_at_zero() {
        let lat = HexLattice::new(2).unwrap();
        let u = dense_evolution_matrix(&WalkAngles::uniform(0.0), &lat).unwrap();
        assert!((u - DMatrix::identity(8, 8)).camax() < 1e-15);
    }

    #[test]
    fn dense_is_unitary() {
        let lat = HexLattice::new(2).unwrap();
        for k in 0..8 {
            let u = dense_evolution_matrix(&WalkAngles::uniform(k as f64 * 0.4), &lat).unwrap();
            let uu = u.adjoint() * &u;
            assert!((uu - DMatrix::identity(8, 8)).camax() < 1e-12);
        }
    }

    #[test]
    fn dense_guard_rail() {
        let lat = HexLattice::new(46).unwrap();
        assert!(matches!(
            dense_evolution_matrix(&WalkAngles::uniform(0.3), &lat),
            Err(Error::LatticeTooLarge { .. })
        ));
    }

    #[test]
    fn step_matches_dense_on_basis_states() {
        let lat = HexLattice::new(2).unwrap();
        let angles = WalkAngles::uniform(PI / 3.0);
        let u = dense_evolution_matrix(&angles, &lat).unwrap();
        for v in lat.vertices() {
            let psi = StateVector::basis(&lat, v).unwrap();
            let out = step(&psi, &angles, &lat).unwrap();
            let col = u.column(lat.index(v).unwrap());
            for (a, b) in out.amplitudes().iter().zip(col.iter()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn step_matches_dense_with_independent_angles() {
        let lat = HexLattice::new(4).unwrap();
        let angles = WalkAngles::new(0.3, 1.1, 2.0);
        let u = dense_evolution_matrix(&angles, &lat).unwrap();
        let psi = random_state(&lat, 9);
        let dense = &u * to_dvector(&psi);
        let out = step(&psi, &angles, &lat).unwrap();
        for (a, b) in out.amplitudes().iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn row_parallel_path_matches_dense_order() {
        // translation covariance on a lattice wide enough for the rayon path
        let lat = HexLattice::new(PARALLEL_MIN_N).unwrap();
        let angles = WalkAngles::uniform(PI / 3.0);
        let c = lat.n() / 2;
        let a = StateVector::basis(&lat, Vertex::new(c, c, 0)).unwrap();
        let b = StateVector::basis(&lat, Vertex::new(c + 3, c - 5, 0)).unwrap();
        let a = evolve(&a, 9, &angles, &lat).unwrap();
        let b = evolve(&b, 9, &angles, &lat).unwrap();
        for v in lat.vertices() {
            let w = lat.translate(v, 3, lat.n() - 5);
            let x = a.amplitude(&lat, v).unwrap();
            let y = b.amplitude(&lat, w).unwrap();
            assert!((x - y).norm() < 1e-15);
        }
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unitarity_on_random_states() {
        let lat = HexLattice::new(4).unwrap();
        let psi = random_state(&lat, 5);
        for k in 0..32 {
            let theta = k as f64 * PI / 32.0;
            let out = step(&psi, &WalkAngles::uniform(theta), &lat).unwrap();
            assert!((out.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn semigroup() {
        let lat = HexLattice::new(8).unwrap();
        let angles = WalkAngles::uniform(PI / 3.0);
        let psi = random_state(&lat, 6);
        let ab = evolve(&evolve(&psi, 13, &angles, &lat).unwrap(), 8, &angles, &lat).unwrap();
        let direct = evolve(&psi, 21, &angles, &lat).unwrap();
        assert!(ab.max_abs_diff(&direct) < 1e-10);
    }

    #[test]
    fn dimension_mismatch() {
        let lat = HexLattice::new(4).unwrap();
        let other = HexLattice::new(2).unwrap();
        let psi = StateVector::zeros(&other);
        assert!(matches!(
            step(&psi, &WalkAngles::uniform(0.1), &lat),
            Err(Error::DimensionMismatch { expected: 32, found: 8 })
        ));
        assert!(apply_local_unitary(&psi, Color::Red, 0.1, &lat).is_err());
    }

    #[test]
    fn probability_distribution_cases() {
        let lat = HexLattice::new(2).unwrap();
        let v = Vertex::new(1, 0, 1);
        let p = probability_distribution(&StateVector::basis(&lat, v).unwrap());
        for (i, x) in p.iter().enumerate() {
            assert_eq!(*x, if i == 5 { 1.0 } else { 0.0 });
        }
        let one = Complex64::new(1.0, 0.0);
        let u = Vertex::new(0, 0, 0);
        let psi = StateVector::superposition(&lat, &[(u, one), (v, one)]).unwrap();
        let p = probability_distribution(&psi);
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[5] - 0.5).abs() < 1e-15);

        let lat = HexLattice::new(6).unwrap();
        let psi = evolve(&random_state(&lat, 7), 17, &WalkAngles::uniform(0.9), &lat).unwrap();
        let total: f64 = probability_distribution(&psi).iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }
}
