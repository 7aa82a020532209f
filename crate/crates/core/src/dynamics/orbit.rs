use nalgebra::{DMatrix, DVector, Vector3};

use super::field::ForceField;
use super::integrator::{forest_ruth_step, IntegratorConfig, Scratch};
use super::state::SystemState;
use crate::error::{Error, Result};
use crate::trap::TrapParameters;

const MAX_SHOOTING_ITER: usize = 30;
const FD_STEP: f64 = 1e-6;

/// Micromotion-corrected starting point for a crystal whose secular
/// (time-averaged) positions are `secular`: y = Y(1 + (q/2)cos Ωt),
/// z = Z(1 − (q/2)cos Ωt), evaluated with velocities at time `t0`.
pub fn micromotion_guess(trap: &TrapParameters, secular: &[Vector3<f64>], t0: f64) -> Result<SystemState> {
    let q = trap.q();
    let w = trap.rf_frequency();
    let (c, s) = ((w * t0).cos(), (w * t0).sin());
    let positions = secular
        .iter()
        .map(|r| Vector3::new(r.x, r.y * (1.0 + 0.5 * q * c), r.z * (1.0 - 0.5 * q * c)))
        .collect();
    let velocities = secular
        .iter()
        .map(|r| Vector3::new(0.0, -r.y * 0.5 * q * w * s, r.z * 0.5 * q * w * s))
        .collect();
    SystemState::new(positions, velocities, t0)
}

fn pack(state: &SystemState, length: f64, speed: f64) -> DVector<f64> {
    let n = state.len();
    let mut x = DVector::zeros(6 * n);
    for i in 0..n {
        for k in 0..3 {
            x[3 * i + k] = state.positions[i][k] / length;
            x[3 * n + 3 * i + k] = state.velocities[i][k] / speed;
        }
    }
    x
}

fn unpack(x: &DVector<f64>, template: &SystemState, length: f64, speed: f64) -> SystemState {
    let n = template.len();
    let mut s = template.clone();
    for i in 0..n {
        for k in 0..3 {
            s.positions[i][k] = x[3 * i + k] * length;
            s.velocities[i][k] = x[3 * n + 3 * i + k] * speed;
        }
    }
    s
}

fn one_period<F: ForceField + ?Sized>(
    mut state: SystemState,
    field: &F,
    integrator: &IntegratorConfig,
    scratch: &mut Scratch,
) -> Result<SystemState> {
    let dt = integrator.dt();
    for _ in 0..integrator.steps_per_rf_period {
        forest_ruth_step(&mut state, dt, field, scratch)?;
    }
    Ok(state)
}

/// The RF-periodic orbit through the neighbourhood of `guess`: the cold
/// crystal including micromotion, found by Newton shooting on the
/// one-period map of the discrete integrator. `length` sets the scale of
/// positions (typically the ion spacing); velocities are scaled by
/// `length · Ω`. Returns the state at `guess.time`.
pub fn periodic_orbit<F: ForceField + ?Sized>(
    field: &F,
    guess: &SystemState,
    integrator: &IntegratorConfig,
    length: f64,
    tolerance: f64,
) -> Result<SystemState> {
    let speed = length * std::f64::consts::TAU / integrator.rf_period;
    let t0 = guess.time;
    let mut scratch = Scratch::default();
    let map = |x: &DVector<f64>, scratch: &mut Scratch| -> Result<DVector<f64>> {
        let mut s = unpack(x, guess, length, speed);
        s.time = t0;
        Ok(pack(&one_period(s, field, integrator, scratch)?, length, speed))
    };
    let mut x = pack(guess, length, speed);
    let dim = x.len();
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_SHOOTING_ITER {
        let fx = map(&x, &mut scratch)? - &x;
        residual = fx.amax();
        if residual < tolerance {
            let mut s = unpack(&x, guess, length, speed);
            s.time = t0;
            return Ok(s);
        }
        let mut jac = DMatrix::zeros(dim, dim);
        for j in 0..dim {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += FD_STEP;
            xm[j] -= FD_STEP;
            let col = (map(&xp, &mut scratch)? - map(&xm, &mut scratch)?) / (2.0 * FD_STEP);
            jac.set_column(j, &col);
        }
        for j in 0..dim {
            jac[(j, j)] -= 1.0;
        }
        let step = jac.lu().solve(&(-&fx)).ok_or(Error::NonConvergence {
            solver: "periodic orbit",
            iterations: 0,
            residual,
        })?;
        x += step;
    }
    Err(Error::NonConvergence {
        solver: "periodic orbit",
        iterations: MAX_SHOOTING_ITER,
        residual,
    })
}

/// States at every integrator step of one period starting from `state`;
/// element k is at `state.time + k·dt`.
pub fn sample_period<F: ForceField + ?Sized>(
    state: &SystemState,
    field: &F,
    integrator: &IntegratorConfig,
) -> Result<Vec<SystemState>> {
    let dt = integrator.dt();
    let mut scratch = Scratch::default();
    let mut s = state.clone();
    let mut out = Vec::with_capacity(integrator.steps_per_rf_period);
    for _ in 0..integrator.steps_per_rf_period {
        out.push(s.clone());
        forest_ruth_step(&mut s, dt, field, &mut scratch)?;
    }
    Ok(out)
}
