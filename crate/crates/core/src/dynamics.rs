//! Position statistics: spreading of the walker, σ(t) line fits and the
//! angle sweep of σ(t)/t.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evolution::{evolve_observed, StateVector, WalkAngles};
use crate::fit::{linear_fit, LinearFit};
use crate::lattice::{HexLattice, Point2, Vertex};
use crate::spectral::SpectralPropagator;

/// Canonical starting states. `TwoNode` and `Hexagon` are placed around the
/// lattice centre `(n/2, n/2)`; the other variants use the given vertices.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `(|1,1,0⟩ + |1,0,1⟩)/√2`
    TwoNode,
    /// Uniform over the six vertices of the hexagon
    /// `(0,0,1) (1,0,0) (1,0,1) (0,1,0) (0,1,1) (1,1,0)`.
    Hexagon,
    SingleNode(Vertex),
    Custom(Vec<(Vertex, Complex64)>),
}

const TWO_NODE: [Vertex; 2] = [Vertex::new(1, 1, 0), Vertex::new(1, 0, 1)];

const HEXAGON: [Vertex; 6] = [
    Vertex::new(0, 0, 1),
    Vertex::new(1, 0, 0),
    Vertex::new(1, 0, 1),
    Vertex::new(0, 1, 0),
    Vertex::new(0, 1, 1),
    Vertex::new(1, 1, 0),
];

impl InitialState {
    /// Vertices and (unnormalized) amplitudes before centring.
    fn terms(&self) -> Vec<(Vertex, Complex64)> {
        let one = Complex64::new(1.0, 0.0);
        match self {
            InitialState::TwoNode => TWO_NODE.iter().map(|&v| (v, one)).collect(),
            InitialState::Hexagon => HEXAGON.iter().map(|&v| (v, one)).collect(),
            InitialState::SingleNode(v) => vec![(*v, one)],
            InitialState::Custom(terms) => terms.clone(),
        }
    }

    fn centred(&self) -> bool {
        matches!(self, InitialState::TwoNode | InitialState::Hexagon)
    }

    /// Normalized state on `lat`.
    pub fn build(&self, lat: &HexLattice) -> Result<StateVector> {
        let c = lat.n() / 2;
        let mut terms = self.terms();
        if self.centred() {
            for (v, _) in terms.iter_mut() {
                *v = lat.translate(*v, c, c);
            }
        }
        StateVector::superposition(lat, &terms)
    }

    pub fn name(&self) -> &'static str {
        match self {
            InitialState::TwoNode => "two-node",
            InitialState::Hexagon => "hexagon",
            InitialState::SingleNode(_) => "single-node",
            InitialState::Custom(_) => "custom",
        }
    }
}

/// `σ = sqrt(Σ p_v ‖r_v − μ‖²)` with `μ = Σ p_v r_v`, in edge-length units.
/// Positions are not unwrapped, so the packet must stay away from the seam.
pub fn std_deviation(state: &StateVector, lat: &HexLattice) -> f64 {
    let positions = lat.positions();
    let amps = state.amplitudes();
    let mut mu = Point2::default();
    let mut total = 0.0;
    for (a, r) in amps.iter().zip(&positions) {
        let p = a.norm_sqr();
        mu.x += p * r.x;
        mu.y += p * r.y;
        total += p;
    }
    mu.x /= total;
    mu.y /= total;
    let var: f64 = amps
        .iter()
        .zip(&positions)
        .map(|(a, r)| a.norm_sqr() * ((r.x - mu.x).powi(2) + (r.y - mu.y).powi(2)))
        .sum();
    (var / total).sqrt()
}

/// Smallest box `[x_lo, x_hi] × [y_lo, y_hi]` holding every nonzero amplitude.
pub fn support_box(state: &StateVector, lat: &HexLattice) -> Option<(usize, usize, usize, usize)> {
    let mut bbox: Option<(usize, usize, usize, usize)> = None;
    for (i, a) in state.amplitudes().iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let v = lat.label(i).ok()?;
        bbox = Some(match bbox {
            None => (v.x, v.x, v.y, v.y),
            Some((x0, x1, y0, y1)) => (x0.min(v.x), x1.max(v.x), y0.min(v.y), y1.max(v.y)),
        });
    }
    bbox
}

/// Checks that `t` steps cannot carry amplitude across the periodic seam.
/// Each step moves a walker by at most one cell in `x` and in `y`.
pub fn check_light_cone(state: &StateVector, t: usize, lat: &HexLattice) -> Result<()> {
    let n = lat.n();
    let Some((x0, x1, y0, y1)) = support_box(state, lat) else {
        return Err(Error::invalid("state has no support"));
    };
    let fits = |lo: usize, hi: usize| lo > t && hi + t + 2 <= n;
    if fits(x0, x1) && fits(y0, y1) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{t} steps from support x∈[{x0},{x1}], y∈[{y0},{y1}] reach the boundary of an n = {n} lattice"
        )))
    }
}

/// σ(t) for `t = 0..=t_max` with a line fit over `t ∈ [t_max/5, t_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSeries {
    pub theta: f64,
    pub points: Vec<(usize, f64)>,
    pub fit: LinearFit,
}

impl SigmaSeries {
    pub fn slope(&self) -> f64 {
        self.fit.slope
    }

    pub fn r_squared(&self) -> f64 {
        self.fit.r_squared
    }

    /// Refits over `t ∈ [t_lo, t_hi]`.
    pub fn fit_window(&self, t_lo: usize, t_hi: usize) -> Result<LinearFit> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .points
            .iter()
            .filter(|(t, _)| (t_lo..=t_hi).contains(t))
            .map(|&(t, s)| (t as f64, s))
            .unzip();
        linear_fit(&xs, &ys)
    }
}

pub fn sigma_series(
    init: &InitialState,
    theta: f64,
    t_max: usize,
    lat: &HexLattice,
) -> Result<SigmaSeries> {
    if t_max < 2 {
        return Err(Error::invalid("σ(t) fit needs t_max ≥ 2"));
    }
    let psi = init.build(lat)?;
    check_light_cone(&psi, t_max, lat)?;
    let mut points = Vec::with_capacity(t_max + 1);
    evolve_observed(&psi, t_max, &WalkAngles::uniform(theta), lat, |t, s| {
        points.push((t, std_deviation(s, lat)));
    })?;
    let lo = t_max as f64 / 5.0;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(t, _)| *t as f64 >= lo)
        .map(|&(t, s)| (t as f64, s))
        .unzip();
    let fit = linear_fit(&xs, &ys)?;
    Ok(SigmaSeries { theta, points, fit })
}

/// `points` evenly spaced angles on `[0, π]`, with `π/3` and `2π/3` added
/// when the spacing misses them.
pub fn theta_grid(points: usize) -> Result<Vec<f64>> {
    if points < 2 {
        return Err(Error::invalid("θ grid needs at least two points"));
    }
    let mut grid: Vec<f64> = (0..points)
        .map(|i| PI * i as f64 / (points - 1) as f64)
        .collect();
    for extra in [PI / 3.0, 2.0 * PI / 3.0] {
        if grid.iter().all(|g| (g - extra).abs() > 1e-12) {
            grid.push(extra);
        }
    }
    grid.sort_by(f64::total_cmp);
    Ok(grid)
}

/// `(θ, σ(t_probe)/t_probe)` for every angle of `grid`.
pub fn theta_sweep(
    init: &InitialState,
    t_probe: usize,
    grid: &[f64],
    lat: &HexLattice,
) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(Error::invalid("θ grid is empty"));
    }
    if t_probe == 0 {
        return Err(Error::invalid("probe time must be positive"));
    }
    let psi = init.build(lat)?;
    check_light_cone(&psi, t_probe, lat)?;
    grid.par_iter()
        .map(|&theta| {
            let out = SpectralPropagator::new(lat, theta).evolve(&psi, t_probe)?;
            Ok((theta, std_deviation(&out, lat) / t_probe as f64))
        })
        .collect()
}
