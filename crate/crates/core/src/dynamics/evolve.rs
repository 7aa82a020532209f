use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cooling::{cooling_substep, CoolingParameters};
use super::field::ForceField;
use super::integrator::{forest_ruth_step, IntegratorConfig, Scratch};
use super::state::SystemState;
use crate::error::{domain, Result};

/// Instantaneous velocity change applied before a given step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduledKick {
    /// Global step index (period × steps_per_period + step).
    pub step: usize,
    pub ion: usize,
    pub delta_v: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions {
    pub integrator: IntegratorConfig,
    pub periods: usize,
    pub cooling: Option<CoolingParameters>,
    /// Per-ion cooling mask; `None` cools every ion.
    pub cooled: Option<Vec<bool>>,
    pub kick: Option<ScheduledKick>,
    /// Any ion farther than this from the trap centre ends the run [m].
    pub ejection_radius: Option<f64>,
    /// Keep one [`PeriodRecord`] per RF period.
    pub record: bool,
}

impl EvolveOptions {
    pub fn new(integrator: IntegratorConfig, periods: usize) -> Self {
        Self {
            integrator,
            periods,
            cooling: None,
            cooled: None,
            kick: None,
            ejection_radius: None,
            record: false,
        }
    }

    /// Ejection radius of 10× the largest ion distance from the centre.
    pub fn eject_beyond_extent(mut self, state: &SystemState) -> Self {
        let extent = state.positions.iter().map(|r| r.norm()).fold(1e-6, f64::max);
        self.ejection_radius = Some(10.0 * extent);
        self
    }
}

/// Stroboscopic summary at the end of an RF period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodRecord {
    pub period: usize,
    pub time: f64,
    pub kinetic_energy: f64,
    pub potential_energy: f64,
    pub total_energy: f64,
    pub centroid: [f64; 3],
    /// Largest ion displacement from its initial position [m].
    pub max_displacement: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOutcome {
    pub state: SystemState,
    pub records: Vec<PeriodRecord>,
    /// Period during which an ion crossed the ejection radius.
    pub ejected_at: Option<usize>,
    pub photons: u64,
}

impl EvolveOutcome {
    pub fn ejected(&self) -> bool {
        self.ejected_at.is_some()
    }
}

/// Integrates `periods` RF periods, interleaving each Forest–Ruth step with
/// quantum-trajectory cooling substeps covering the same interval.
pub fn evolve<F: ForceField + ?Sized, R: Rng + ?Sized>(
    mut state: SystemState,
    field: &F,
    options: &EvolveOptions,
    rng: &mut R,
) -> Result<EvolveOutcome> {
    let n = state.len();
    if let Some(mask) = &options.cooled {
        if mask.len() != n {
            return domain(format!("cooling mask has {} entries for {n} ions", mask.len()));
        }
    }
    if let Some(k) = &options.kick {
        if k.ion >= n {
            return domain(format!("kick targets ion {} of {n}", k.ion));
        }
    }
    let dt = options.integrator.dt();
    let steps = options.integrator.steps_per_rf_period;
    let mass = field.mass();
    let cooling = options.cooling.as_ref();
    let substeps = cooling.map_or(0, |c| c.substeps(dt));
    let sub_dt = dt / substeps.max(1) as f64;
    let initial: Vec<Vector3<f64>> = state.positions.clone();
    let mut scratch = Scratch::default();
    let mut records = Vec::with_capacity(if options.record { options.periods } else { 0 });
    let mut photons = 0u64;
    let mut ejected_at = None;
    'periods: for period in 0..options.periods {
        for step in 0..steps {
            if let Some(k) = &options.kick {
                if k.step == period * steps + step {
                    state.velocities[k.ion] += Vector3::from(k.delta_v);
                }
            }
            forest_ruth_step(&mut state, dt, field, &mut scratch)?;
            if let Some(c) = cooling {
                for _ in 0..substeps {
                    photons +=
                        cooling_substep(&mut state, sub_dt, c, mass, options.cooled.as_deref(), rng) as u64;
                }
            }
        }
        if options.record {
            let ke = state.kinetic_energy(mass);
            let pe = field.potential_energy(&state.positions, state.time);
            let c = state.centroid();
            let max_displacement = state
                .positions
                .iter()
                .zip(&initial)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            records.push(PeriodRecord {
                period,
                time: state.time,
                kinetic_energy: ke,
                potential_energy: pe,
                total_energy: ke + pe,
                centroid: [c.x, c.y, c.z],
                max_displacement,
            });
        }
        if let Some(radius) = options.ejection_radius {
            if state.positions.iter().any(|r| r.norm() > radius) {
                ejected_at = Some(period);
                break 'periods;
            }
        }
    }
    Ok(EvolveOutcome {
        state,
        records,
        ejected_at,
        photons,
    })
}
