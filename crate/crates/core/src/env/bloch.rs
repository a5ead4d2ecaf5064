use std::f64::consts::PI;

use super::Environment;
use crate::quantum::{c64, DensityOperator};
use crate::{tolerance, Error, Result};

/// Grid of spin directions `θ_i = iπ/n_theta`, `φ_j = 2πj/n_phi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlochGrid {
    pub n_theta: usize,
    pub n_phi: usize,
}

impl Default for BlochGrid {
    fn default() -> Self {
        Self { n_theta: 20, n_phi: 20 }
    }
}

impl BlochGrid {
    pub fn theta(&self, i: usize) -> f64 {
        i as f64 * PI / self.n_theta as f64
    }

    pub fn phi(&self, j: usize) -> f64 {
        j as f64 * 2.0 * PI / self.n_phi as f64
    }
}

/// `(sin θ cos φ, sin θ sin φ, cos θ)`.
pub fn bloch_vector(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Pure qubit state `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn bloch_state(theta: f64, phi: f64) -> Result<DensityOperator> {
    let (s, c) = (theta / 2.0).sin_cos();
    DensityOperator::pure(&[c64(c, 0.0), c64(s * phi.cos(), s * phi.sin())])
}

/// Default labeling predicate: "blue" iff the Bloch vector has a
/// non-positive component (up to `tolerance::GEOMETRY`) along every signed
/// axis of the orthant.
pub fn orthant_rule(orthant: [i8; 3]) -> impl Fn([f64; 3]) -> bool {
    move |r| (0..3).all(|i| f64::from(orthant[i].signum()) * r[i] <= tolerance::GEOMETRY)
}

/// Spin-direction environment labeled by [`orthant_rule`], uniform over the grid.
pub fn bloch_spin_preset(grid: BlochGrid, orthant: [i8; 3]) -> Result<Environment> {
    if orthant.contains(&0) {
        return Err(Error::InvalidParameter("orthant signs must be nonzero".into()));
    }
    bloch_spin_preset_with(grid, orthant_rule(orthant))
}

/// Spin-direction environment with a caller-supplied "blue" predicate.
pub fn bloch_spin_preset_with(grid: BlochGrid, is_blue: impl Fn([f64; 3]) -> bool) -> Result<Environment> {
    if grid.n_theta == 0 || grid.n_phi == 0 || grid.n_theta > 20 || grid.n_phi > 20 {
        return Err(Error::InvalidParameter(format!(
            "grid {}x{} outside 1..=20",
            grid.n_theta, grid.n_phi
        )));
    }
    let n = (grid.n_theta * grid.n_phi) as f64;
    let mut features = Vec::new();
    let mut states = Vec::new();
    let mut dist = Vec::new();
    for i in 0..grid.n_theta {
        for j in 0..grid.n_phi {
            let (theta, phi) = (grid.theta(i), grid.phi(j));
            features.push(format!("theta{i}_phi{j}"));
            states.push(bloch_state(theta, phi)?);
            let blue = is_blue(bloch_vector(theta, phi));
            dist.push(if blue { vec![1.0 / n, 0.0] } else { vec![0.0, 1.0 / n] });
        }
    }
    Environment::new(features, vec!["blue".into(), "red".into()], states, dist)
}
