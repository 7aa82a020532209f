use nalgebra::Vector3;
use num_complex::Complex64;

use crate::error::{domain, Result};

/// Two-level amplitudes (ground, excited).
pub type Internal = [Complex64; 2];

pub const GROUND: Internal = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];

/// Positions [m], velocities [m/s], internal states and time [s] of N ions.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemState {
    pub positions: Vec<Vector3<f64>>,
    pub velocities: Vec<Vector3<f64>>,
    pub internal: Vec<Internal>,
    pub time: f64,
}

impl SystemState {
    /// State with every ion in the ground state.
    pub fn new(positions: Vec<Vector3<f64>>, velocities: Vec<Vector3<f64>>, time: f64) -> Result<Self> {
        if positions.len() != velocities.len() {
            return domain(format!(
                "{} positions but {} velocities",
                positions.len(),
                velocities.len()
            ));
        }
        if positions.is_empty() {
            return domain("state must contain at least one ion");
        }
        let n = positions.len();
        let state = Self {
            positions,
            velocities,
            internal: vec![GROUND; n],
            time,
        };
        if !state.is_finite() {
            return domain("state contains non-finite entries");
        }
        Ok(state)
    }

    /// Ions at rest.
    pub fn at_rest(positions: Vec<Vector3<f64>>, time: f64) -> Result<Self> {
        let n = positions.len();
        Self::new(positions, vec![Vector3::zeros(); n], time)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.time.is_finite()
            && self.positions.iter().all(|r| r.iter().all(|c| c.is_finite()))
            && self.velocities.iter().all(|v| v.iter().all(|c| c.is_finite()))
            && self
                .internal
                .iter()
                .all(|a| a.iter().all(|c| c.re.is_finite() && c.im.is_finite()))
    }

    pub fn kinetic_energy(&self, mass: f64) -> f64 {
        0.5 * mass * self.velocities.iter().map(|v| v.norm_squared()).sum::<f64>()
    }

    pub fn centroid(&self) -> Vector3<f64> {
        self.positions.iter().sum::<Vector3<f64>>() / self.len() as f64
    }
}
