use nalgebra::Vector3;

use super::field::ForceField;
use super::state::SystemState;
use crate::error::{domain, Result};

/// Forest–Ruth coefficient θ = 1/(2 − 2^{1/3}).
pub const FOREST_RUTH_THETA: f64 = 1.351_207_191_959_657_8;

/// Minimum resolution of the RF drive.
pub const MIN_STEPS_PER_PERIOD: usize = 10;

/// Drift and kick fractions of one step: x ← x + d₀ v dt, v ← v + k₀ a dt,
/// ..., ending with the drift d₃.
const DRIFTS: [f64; 4] = [
    0.5 * FOREST_RUTH_THETA,
    0.5 * (1.0 - FOREST_RUTH_THETA),
    0.5 * (1.0 - FOREST_RUTH_THETA),
    0.5 * FOREST_RUTH_THETA,
];
const KICKS: [f64; 3] = [FOREST_RUTH_THETA, 1.0 - 2.0 * FOREST_RUTH_THETA, FOREST_RUTH_THETA];

/// Step size and resolution of the RF integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub steps_per_rf_period: usize,
    pub rf_period: f64,
}

impl IntegratorConfig {
    pub fn new(steps_per_rf_period: usize, rf_period: f64) -> Result<Self> {
        if steps_per_rf_period < MIN_STEPS_PER_PERIOD {
            return domain(format!(
                "need at least {MIN_STEPS_PER_PERIOD} steps per RF period, got {steps_per_rf_period}"
            ));
        }
        if !(rf_period > 0.0) {
            return domain(format!("RF period must be positive, got {rf_period}"));
        }
        Ok(Self {
            steps_per_rf_period,
            rf_period,
        })
    }

    pub fn dt(&self) -> f64 {
        self.rf_period / self.steps_per_rf_period as f64
    }
}

/// Reusable force buffer for [`forest_ruth_step`].
#[derive(Debug, Clone, Default)]
pub struct Scratch {
    forces: Vec<Vector3<f64>>,
}

/// One fourth-order symplectic Forest–Ruth step of length `dt`. Time
/// advances with the drifts, so the three kicks see the field at
/// t + θdt/2, t + dt/2 and t + (1 − θ/2)dt.
pub fn forest_ruth_step<F: ForceField + ?Sized>(
    state: &mut SystemState,
    dt: f64,
    field: &F,
    scratch: &mut Scratch,
) -> Result<()> {
    if !(dt > 0.0) {
        return domain(format!("time step must be positive, got {dt}"));
    }
    let n = state.len();
    scratch.forces.resize(n, Vector3::zeros());
    let inv_m = 1.0 / field.mass();
    let t0 = state.time;
    let mut elapsed = 0.0;
    for stage in 0..3 {
        drift(state, DRIFTS[stage] * dt);
        elapsed += DRIFTS[stage];
        field.forces(&state.positions, t0 + elapsed * dt, &mut scratch.forces)?;
        let h = KICKS[stage] * dt * inv_m;
        for (v, f) in state.velocities.iter_mut().zip(&scratch.forces) {
            *v += f * h;
        }
    }
    drift(state, DRIFTS[3] * dt);
    state.time = t0 + dt;
    Ok(())
}

#[inline]
fn drift(state: &mut SystemState, h: f64) {
    for (r, v) in state.positions.iter_mut().zip(&state.velocities) {
        *r += v * h;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Spring {
        k: f64,
    }

    impl ForceField for Spring {
        fn mass(&self) -> f64 {
            1.0
        }
        fn forces(&self, p: &[Vector3<f64>], _t: f64, out: &mut [Vector3<f64>]) -> Result<()> {
            for (f, r) in out.iter_mut().zip(p) {
                *f = -self.k * r;
            }
            Ok(())
        }
        fn potential_energy(&self, p: &[Vector3<f64>], _t: f64) -> f64 {
            p.iter().map(|r| 0.5 * self.k * r.norm_squared()).sum()
        }
    }

    #[test]
    fn theta_value() {
        assert!((FOREST_RUTH_THETA - 1.0 / (2.0 - 2f64.cbrt())).abs() < 1e-15);
        assert!((DRIFTS.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((KICKS.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn free_particle_is_exact() {
        let mut s = SystemState::new(vec![Vector3::new(1.0, -2.0, 0.5)], vec![Vector3::new(0.25, 0.5, -1.0)], 0.0)
            .unwrap();
        let mut scratch = Scratch::default();
        for _ in 0..64 {
            forest_ruth_step(&mut s, 0.125, &Spring { k: 0.0 }, &mut scratch).unwrap();
        }
        assert_eq!(s.time, 8.0);
        let expected = Vector3::new(3.0, 2.0, -7.5);
        assert!((s.positions[0] - expected).norm() < 1e-13);
    }

    #[test]
    fn rejects_bad_step() {
        let mut s = SystemState::at_rest(vec![Vector3::zeros()], 0.0).unwrap();
        assert!(forest_ruth_step(&mut s, 0.0, &Spring { k: 1.0 }, &mut Scratch::default()).is_err());
        assert!(IntegratorConfig::new(5, 1.0).is_err());
    }
}
