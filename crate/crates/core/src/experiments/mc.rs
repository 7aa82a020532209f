use nalgebra::Vector3;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::flip::{classify_final_state, mirror_distance, FinalState, DEFAULT_FLIP_THRESHOLD};
use crate::axial::{characteristic_length, zigzag_criterion};
use crate::collision::{collide, sample_collision, CaptureModel, Interaction};
use crate::crystal::{crystal_equilibrium, CrystalTrap};
use crate::dynamics::{
    evolve, micromotion_guess, periodic_orbit, sample_period, CoolingParameters, EvolveOptions,
    IntegratorConfig, IonTrapField, SystemState,
};
use crate::error::{domain, Result};
use crate::parallel::{parallel_map, sample_rng};
use crate::species::{BackgroundGas, IonSpecies};
use crate::trap::{blade_trap_geometric_efficiency, TrapParameters};

/// Zig-zag flip Monte Carlo settings. Frequencies are ordinary (not
/// angular) frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FlipExperimentConfig {
    pub ions: usize,
    pub rf_frequency_hz: f64,
    pub axial_frequency_hz: f64,
    /// (ω_y + ω_z)/2.
    pub transverse_mean_hz: f64,
    /// ω_z − ω_y.
    pub transverse_split_hz: f64,
    /// Field-gradient efficiency g [1/m²]; the blade-trap calibration when
    /// absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometric_efficiency_per_m2: Option<f64>,
    pub gas_temperature_k: f64,
    pub samples_per_batch: usize,
    pub batches: usize,
    pub periods: usize,
    pub steps_per_period: usize,
    pub flip_threshold_um2: f64,
    /// Impact parameters are drawn up to this multiple of b_c.
    pub b_max_factor: f64,
    pub capture_model: CaptureModel,
    pub beam_direction: [f64; 3],
    /// Ejected or failed samples count as non-flips in the denominator.
    pub count_ejections: bool,
}

impl Default for FlipExperimentConfig {
    /// The N = 31 chain of the full-scale study.
    fn default() -> Self {
        Self {
            ions: 31,
            rf_frequency_hz: 24e6,
            axial_frequency_hz: 67e3,
            transverse_mean_hz: 622.5e3,
            transverse_split_hz: 19e3,
            geometric_efficiency_per_m2: None,
            gas_temperature_k: 4.7,
            samples_per_batch: 100_000,
            batches: 5,
            periods: 20_000,
            steps_per_period: 100,
            flip_threshold_um2: DEFAULT_FLIP_THRESHOLD * 1e12,
            b_max_factor: 1.0,
            capture_model: CaptureModel::HeadOn,
            beam_direction: [1.0, 1.0, 0.0],
            count_ejections: true,
        }
    }
}

impl FlipExperimentConfig {
    /// Seven-ion chain small enough for a workstation run. The wider
    /// transverse split keeps flips activated between 12 and 20 K; the
    /// threshold is about half the 63.6 µm² mirror distance.
    pub fn desk() -> Self {
        Self {
            ions: 7,
            axial_frequency_hz: 150e3,
            transverse_mean_hz: 480e3,
            transverse_split_hz: 60e3,
            samples_per_batch: 200,
            batches: 5,
            periods: 2_000,
            flip_threshold_um2: 30.0,
            beam_direction: [1.0, 1.0, 1.0],
            ..Self::default()
        }
    }

    pub fn total_samples(&self) -> usize {
        self.samples_per_batch * self.batches
    }

    /// (ω_x, ω_y, ω_z) [rad/s].
    pub fn angular_frequencies(&self) -> [f64; 3] {
        let half = 0.5 * self.transverse_split_hz;
        [
            TAU * self.axial_frequency_hz,
            TAU * (self.transverse_mean_hz - half),
            TAU * (self.transverse_mean_hz + half),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.ions < 3 {
            return domain(format!("ions: need at least 3, got {}", self.ions));
        }
        if self.samples_per_batch == 0 || self.batches == 0 {
            return domain("samples_per_batch, batches: must be positive");
        }
        if self.periods == 0 {
            return domain("periods: must be positive");
        }
        for (name, v) in [
            ("rf_frequency_hz", self.rf_frequency_hz),
            ("axial_frequency_hz", self.axial_frequency_hz),
            ("transverse_mean_hz", self.transverse_mean_hz),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return domain(format!("{name}: must be positive, got {v}"));
            }
        }
        if !(self.gas_temperature_k > 0.0) {
            return domain(format!("gas_temperature_k: must be positive, got {}", self.gas_temperature_k));
        }
        if !(self.flip_threshold_um2 > 0.0) {
            return domain(format!("flip_threshold_um2: must be positive, got {}", self.flip_threshold_um2));
        }
        if !(self.b_max_factor > 0.0) {
            return domain(format!("b_max_factor: must be positive, got {}", self.b_max_factor));
        }
        if !(self.transverse_split_hz >= 0.0) {
            return domain(format!("transverse_split_hz: must be non-negative, got {}", self.transverse_split_hz));
        }
        let [wx, wy, wz] = self.angular_frequencies();
        if !zigzag_criterion(self.ions, wx, wy, wz)? {
            return domain(format!(
                "{} ions at these frequencies form a linear chain, not a zig-zag",
                self.ions
            ));
        }
        Ok(())
    }
}

/// Everything shared by the samples of one experiment: the trap, the cold
/// crystal on its periodic orbit and its state at every integrator phase.
#[derive(Debug, Clone)]
pub struct FlipSetup {
    pub trap: TrapParameters,
    pub field: IonTrapField,
    pub gas: BackgroundGas,
    pub interaction: Interaction,
    pub integrator: IntegratorConfig,
    pub cooling: CoolingParameters,
    /// Crystal state at each of the `steps_per_period` phases.
    pub phase_states: Vec<SystemState>,
    /// Pseudopotential equilibrium [m].
    pub equilibrium: Vec<Vector3<f64>>,
    /// Dimensionless pseudopotential used to quench final states.
    pub crystal: CrystalTrap,
    /// Characteristic length scaling `crystal` to metres.
    pub length: f64,
    pub mirror_distance: f64,
    pub threshold: f64,
    pub ejection_radius: f64,
}

impl FlipSetup {
    pub fn new(config: &FlipExperimentConfig) -> Result<Self> {
        config.validate()?;
        let species = IonSpecies::yb171();
        let [wx, wy, wz] = config.angular_frequencies();
        let g = config
            .geometric_efficiency_per_m2
            .unwrap_or_else(blade_trap_geometric_efficiency);
        let trap = TrapParameters::from_secular(species, TAU * config.rf_frequency_hz, g, wx, [wy, wz])?;
        let length = characteristic_length(&species, wx)?;
        let crystal = CrystalTrap::harmonic(wx, wy, wz)?;
        let dimless = crystal_equilibrium(config.ions, &crystal, None)?;
        let equilibrium: Vec<Vector3<f64>> = dimless.iter().map(|r| r * length).collect();
        let field = IonTrapField::harmonic(trap.clone());
        let integrator = IntegratorConfig::new(config.steps_per_period, trap.rf_period())?;
        let guess = micromotion_guess(&trap, &equilibrium, 0.0)?;
        let orbit = periodic_orbit(&field, &guess, &integrator, length, 1e-10)?;
        let phase_states = sample_period(&orbit, &field, &integrator)?;
        let extent = equilibrium.iter().map(|r| r.norm()).fold(0.0, f64::max);
        let gas = BackgroundGas::h2(config.gas_temperature_k)?;
        Ok(Self {
            interaction: Interaction::new(&gas, &species),
            gas,
            cooling: CoolingParameters::yb171(config.beam_direction),
            mirror_distance: mirror_distance(&equilibrium),
            threshold: config.flip_threshold_um2 * 1e-12,
            ejection_radius: 10.0 * extent,
            trap,
            field,
            integrator,
            phase_states,
            equilibrium,
            crystal,
            length,
        })
    }
}

/// Outcome class of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Unflipped,
    Flipped,
    Partial,
    Ejected,
    /// Physics error (e.g. coincident ions) or a panicking sample.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipSample {
    pub kind: SampleKind,
    /// Kinetic energy given to the struck ion in its rest frame [J]; zero
    /// for failed samples.
    pub kick_energy: f64,
    pub phase_step: usize,
    pub ion: usize,
    /// Error or panic message of a failed sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Runs sample `index` of an experiment with master seed `seed`.
pub fn run_flip_sample(
    setup: &FlipSetup,
    config: &FlipExperimentConfig,
    seed: u64,
    index: u64,
) -> Result<FlipSample> {
    let mut rng = sample_rng(seed, index);
    let phase_step = rng.random_range(0..setup.phase_states.len());
    let ion = rng.random_range(0..config.ions);
    let base = &setup.phase_states[phase_step];
    let mut state = base.clone();
    let v_ion = state.velocities[ion];
    let ev = sample_collision(
        &setup.gas,
        &setup.interaction,
        &v_ion,
        config.b_max_factor,
        config.capture_model,
        &mut rng,
    )?;
    let (v_after, _) = collide(
        &v_ion,
        &Vector3::from(ev.molecule_velocity),
        ev.theta,
        ev.azimuth,
        &setup.interaction,
    );
    state.velocities[ion] = v_after;
    let kick_energy = 0.5 * setup.interaction.ion_mass() * (v_after - v_ion).norm_squared();
    let mut options = EvolveOptions::new(setup.integrator, config.periods);
    options.cooling = Some(setup.cooling);
    options.ejection_radius = Some(setup.ejection_radius);
    let out = evolve(state, &setup.field, &options, &mut rng)?;
    let kind = if out.ejected() {
        SampleKind::Ejected
    } else {
        // quench into the nearest pseudopotential minimum before classifying
        let scaled: Vec<Vector3<f64>> = out.state.positions.iter().map(|r| r / setup.length).collect();
        let relaxed: Vec<Vector3<f64>> = crystal_equilibrium(config.ions, &setup.crystal, Some(&scaled))?
            .into_iter()
            .map(|r| r * setup.length)
            .collect();
        match classify_final_state(&setup.equilibrium, &relaxed, setup.threshold)? {
            FinalState::Unflipped => SampleKind::Unflipped,
            FinalState::Flipped => SampleKind::Flipped,
            FinalState::Partial => SampleKind::Partial,
        }
    };
    Ok(FlipSample {
        kind,
        kick_energy,
        phase_step,
        ion,
        failure: None,
    })
}

/// Aggregated flip statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlipResult {
    pub p_flip: f64,
    /// Standard deviation of the batch estimates over √batches; binomial
    /// when there is a single batch.
    pub std_err: f64,
    pub flip_count: u64,
    pub partial_count: u64,
    pub total: u64,
    pub ejections: u64,
    pub failures: u64,
    pub batch_p: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Tally {
    flips: u64,
    partial: u64,
    samples: u64,
    ejections: u64,
    failures: u64,
}

impl Tally {
    fn add(&mut self, kind: SampleKind) {
        self.samples += 1;
        match kind {
            SampleKind::Flipped => self.flips += 1,
            SampleKind::Partial => {
                self.flips += 1;
                self.partial += 1
            }
            SampleKind::Ejected => self.ejections += 1,
            SampleKind::Failed => self.failures += 1,
            SampleKind::Unflipped => {}
        }
    }

    fn denominator(&self, count_ejections: bool) -> u64 {
        if count_ejections {
            self.samples
        } else {
            self.samples - self.ejections - self.failures
        }
    }
}

/// Builds a [`FlipResult`] from per-sample outcomes split into equal batches
/// in index order.
pub fn aggregate(kinds: &[SampleKind], batches: usize, count_ejections: bool) -> Result<FlipResult> {
    if batches == 0 || kinds.len() % batches != 0 || kinds.is_empty() {
        return domain(format!("{} samples do not split into {batches} batches", kinds.len()));
    }
    let per = kinds.len() / batches;
    let mut total = Tally::default();
    let mut batch_p = Vec::with_capacity(batches);
    for chunk in kinds.chunks(per) {
        let mut t = Tally::default();
        for &k in chunk {
            t.add(k);
            total.add(k);
        }
        let d = t.denominator(count_ejections);
        batch_p.push(if d > 0 { t.flips as f64 / d as f64 } else { 0.0 });
    }
    let d = total.denominator(count_ejections);
    if d == 0 {
        return domain("every sample was ejected or failed");
    }
    let p = total.flips as f64 / d as f64;
    let std_err = if batches > 1 {
        let mean = batch_p.iter().sum::<f64>() / batches as f64;
        let var = batch_p.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (batches - 1) as f64;
        (var / batches as f64).sqrt()
    } else {
        (p * (1.0 - p) / d as f64).sqrt()
    };
    Ok(FlipResult {
        p_flip: p,
        std_err,
        flip_count: total.flips,
        partial_count: total.partial,
        total: d,
        ejections: total.ejections,
        failures: total.failures,
        batch_p,
    })
}

/// Estimates p_flip with `workers` threads (0 = all cores). Each sample uses
/// its own RNG stream, so the result is independent of `workers`.
/// `progress(done, total)` is called after every sample.
pub fn estimate_p_flip<P>(
    config: &FlipExperimentConfig,
    seed: u64,
    workers: usize,
    progress: P,
) -> Result<(FlipResult, Vec<FlipSample>)>
where
    P: Fn(usize, usize) + Sync,
{
    let setup = FlipSetup::new(config)?;
    let n = config.total_samples();
    let results = parallel_map(
        workers,
        n,
        |i| run_flip_sample(&setup, config, seed, i as u64),
        progress,
    );
    let samples: Vec<FlipSample> = results
        .into_iter()
        .map(|r| {
            let failure = match r {
                Ok(Ok(s)) => return s,
                Ok(Err(e)) => e.to_string(),
                Err(panic) => panic,
            };
            FlipSample {
                kind: SampleKind::Failed,
                kick_energy: 0.0,
                phase_step: 0,
                ion: 0,
                failure: Some(failure),
            }
        })
        .collect();
    let kinds: Vec<SampleKind> = samples.iter().map(|s| s.kind).collect();
    Ok((aggregate(&kinds, config.batches, config.count_ejections)?, samples))
}

/// Least-squares fit of ln p = ln A − E/T. Returns (A, E [K]).
pub fn fit_arrhenius(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 2 {
        return domain("Arrhenius fit needs at least two points");
    }
    if points.iter().any(|&(t, p)| !(t > 0.0 && p > 0.0)) {
        return domain("Arrhenius fit needs positive temperatures and probabilities");
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(t, _)| 1.0 / t).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, p)| p.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return domain("Arrhenius fit needs distinct temperatures");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(((my - slope * mx).exp(), -slope))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aggregate_pools_batches() {
        use SampleKind::*;
        let kinds = [Flipped, Unflipped, Unflipped, Unflipped, Partial, Flipped, Ejected, Unflipped];
        let r = aggregate(&kinds, 2, true).unwrap();
        assert_eq!(r.flip_count, 3);
        assert_eq!(r.partial_count, 1);
        assert_eq!(r.total, 8);
        assert_eq!(r.ejections, 1);
        assert_eq!(r.batch_p, vec![0.25, 0.5]);
        // pooled equals the mean of equal batches
        assert_eq!(r.p_flip, 0.375);
        assert!((r.std_err - 0.125).abs() < 1e-15);
        let r = aggregate(&kinds, 2, false).unwrap();
        assert_eq!(r.total, 7);
        assert!(aggregate(&kinds, 3, true).is_err());
    }

    #[test]
    fn arrhenius_recovers_parameters() {
        let pts: Vec<(f64, f64)> = [12.0, 16.0, 20.0].iter().map(|&t| (t, 0.5 * (-9.0f64 / t).exp())).collect();
        let (a, e) = fit_arrhenius(&pts).unwrap();
        assert!((a - 0.5).abs() < 1e-12 && (e - 9.0).abs() < 1e-10);
        assert!(fit_arrhenius(&pts[..1]).is_err());
        assert!(fit_arrhenius(&[(12.0, 0.0), (20.0, 0.1)]).is_err());
    }

    #[test]
    fn default_geometry_is_a_zigzag() {
        assert!(FlipExperimentConfig::default().validate().is_ok());
        assert!(FlipExperimentConfig::desk().validate().is_ok());
        let linear = FlipExperimentConfig {
            transverse_mean_hz: 5e6,
            ..FlipExperimentConfig::desk()
        };
        assert!(linear.validate().is_err());
    }
}
