use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::constants::BOLTZMANN;
use crate::crystal::trap_equilibrium;
use crate::dynamics::{evolve, CoolingParameters, EvolveOptions, IntegratorConfig, IonTrapField, SystemState};
use crate::error::{domain, Result};
use crate::parallel::sample_rng;
use crate::species::IonSpecies;
use crate::trap::{blade_trap_geometric_efficiency, TrapParameters};

/// Doppler cooling of a hot crystal from rest positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoolingRunConfig {
    pub ions: usize,
    pub rf_frequency_hz: f64,
    /// (axial, y, z) secular frequencies [Hz].
    pub secular_hz: [f64; 3],
    /// Initial kinetic energy per ion [K], along the beam.
    pub initial_energy_k: f64,
    pub duration_s: f64,
    pub steps_per_period: usize,
    /// Kinetic energy is averaged over windows of this many RF periods.
    pub window_periods: usize,
    pub beam_direction: [f64; 3],
    pub recoil: bool,
}

impl Default for CoolingRunConfig {
    fn default() -> Self {
        Self {
            ions: 1,
            rf_frequency_hz: 24e6,
            secular_hz: [150e3, 480e3, 540e3],
            initial_energy_k: 1.0,
            duration_s: 5e-3,
            steps_per_period: 100,
            window_periods: 1000,
            beam_direction: [1.0, 1.0, 1.0],
            recoil: true,
        }
    }
}

impl CoolingRunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ions == 0 {
            return domain("ions: must be positive");
        }
        if !(self.rf_frequency_hz > 0.0) {
            return domain(format!("rf_frequency_hz: must be positive, got {}", self.rf_frequency_hz));
        }
        if !self.secular_hz.iter().all(|&f| f > 0.0 && f.is_finite()) {
            return domain("secular_hz: frequencies must be positive");
        }
        if !(self.initial_energy_k >= 0.0 && self.initial_energy_k.is_finite()) {
            return domain(format!("initial_energy_k: must be non-negative, got {}", self.initial_energy_k));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return domain(format!("duration_s: must be positive, got {}", self.duration_s));
        }
        if self.window_periods == 0 {
            return domain("window_periods: must be positive");
        }
        Ok(())
    }
}

/// Mean kinetic energy per ion over one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoolingRecord {
    /// End of the window [s].
    pub time: f64,
    /// [J]
    pub mean_kinetic_energy: f64,
    pub photons: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoolingRun {
    pub records: Vec<CoolingRecord>,
    /// ħΓ/2 [J].
    pub doppler_limit: f64,
}

impl CoolingRun {
    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.mean_kinetic_energy)
    }

    pub fn final_energy_k(&self) -> f64 {
        self.final_energy() / BOLTZMANN
    }
}

/// Cools the crystal for `duration_s`, starting every ion at its equilibrium
/// position with speed √(2E/m) along the beam.
pub fn run_cooling(config: &CoolingRunConfig, seed: u64) -> Result<CoolingRun> {
    config.validate()?;
    let species = IonSpecies::yb171();
    let [fx, fy, fz] = config.secular_hz;
    let trap = TrapParameters::from_secular(
        species,
        TAU * config.rf_frequency_hz,
        blade_trap_geometric_efficiency(),
        TAU * fx,
        [TAU * fy, TAU * fz],
    )?;
    let positions = if config.ions == 1 {
        vec![Vector3::zeros()]
    } else {
        trap_equilibrium(&trap, config.ions)?
    };
    let mut cooling = CoolingParameters::yb171(config.beam_direction);
    if !config.recoil {
        cooling = cooling.without_recoil();
    }
    let speed = (2.0 * config.initial_energy_k * BOLTZMANN / species.mass()).sqrt();
    let velocities = vec![cooling.beam_direction() * speed; config.ions];
    let mut state = SystemState::new(positions, velocities, 0.0)?;
    let field = IonTrapField::harmonic(trap.clone());
    let integrator = IntegratorConfig::new(config.steps_per_period, trap.rf_period())?;
    let total_periods = (config.duration_s / trap.rf_period()).ceil() as usize;
    let mut rng = sample_rng(seed, 0);
    let mut records = Vec::new();
    let mut done = 0;
    while done < total_periods {
        let periods = config.window_periods.min(total_periods - done);
        let mut options = EvolveOptions::new(integrator, periods);
        options.cooling = Some(cooling);
        options.record = true;
        let out = evolve(state, &field, &options, &mut rng)?;
        let mean = out.records.iter().map(|r| r.kinetic_energy).sum::<f64>()
            / (out.records.len() * config.ions) as f64;
        records.push(CoolingRecord {
            time: out.state.time,
            mean_kinetic_energy: mean,
            photons: out.photons,
        });
        state = out.state;
        done += periods;
    }
    Ok(CoolingRun {
        records,
        doppler_limit: cooling.doppler_limit_energy(),
    })
}
