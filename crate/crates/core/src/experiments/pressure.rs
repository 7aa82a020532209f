use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::collision::{
    density_from_pressure, langevin_rate, langevin_rate_coefficient, pressure_from_density,
    DensityConvention,
};
use crate::constants::pa_to_torr;
use crate::error::{domain, Result};
use crate::parallel::sample_rng;
use crate::species::{BackgroundGas, IonSpecies};

/// A measured or simulated quantity with its one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    pub std_err: f64,
}

impl Measured {
    pub fn new(value: f64, std_err: f64) -> Self {
        Self { value, std_err }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, std_err: 0.0 }
    }

    fn relative(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.std_err / self.value.abs()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PressureMethod {
    Elastic,
    InelasticRatio,
}

/// Inputs of a pressure inference, echoed with the result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum PressureInputs {
    Elastic {
        elastic_rate: Measured,
        p_flip: Measured,
        temperature: f64,
        rate_coefficient: f64,
        convention: DensityConvention,
    },
    InelasticRatio {
        cold_rate: Measured,
        warm_rate: Measured,
        warm_pressure: f64,
        cold_temperature: f64,
        warm_temperature: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureEstimate {
    /// [Pa]
    pub pressure: f64,
    /// One sigma [Pa].
    pub uncertainty: f64,
    pub method: PressureMethod,
    pub inputs: PressureInputs,
}

impl PressureEstimate {
    pub fn pressure_torr(&self) -> f64 {
        pa_to_torr(self.pressure)
    }

    pub fn uncertainty_torr(&self) -> f64 {
        pa_to_torr(self.uncertainty)
    }
}

/// γ_el = p_flip γ.
pub fn elastic_rate(p_flip: f64, collision_rate: f64) -> Result<f64> {
    if !(p_flip >= 0.0 && collision_rate >= 0.0) {
        return domain("p_flip and collision rate must be non-negative");
    }
    Ok(p_flip * collision_rate)
}

/// Pressure from a measured per-ion reconfiguration rate: γ = γ_el/p_flip,
/// n = γ/k_L and P from n via `convention`. Relative uncertainties of γ_el
/// and p_flip add in quadrature.
pub fn infer_pressure_elastic(
    elastic: Measured,
    p_flip: Measured,
    gas: &BackgroundGas,
    ion: &IonSpecies,
    convention: DensityConvention,
) -> Result<PressureEstimate> {
    if !(p_flip.value > 0.0) {
        return domain("p_flip must be positive to invert the elastic rate");
    }
    if !(elastic.value >= 0.0) {
        return domain("elastic rate must be non-negative");
    }
    let k = langevin_rate_coefficient(gas, ion);
    let density = elastic.value / p_flip.value / k;
    let pressure = pressure_from_density(density, gas.temperature(), convention)?;
    let rel = elastic.relative().hypot(p_flip.relative());
    Ok(PressureEstimate {
        pressure,
        uncertainty: pressure * rel,
        method: PressureMethod::Elastic,
        inputs: PressureInputs::Elastic {
            elastic_rate: elastic,
            p_flip,
            temperature: gas.temperature(),
            rate_coefficient: k,
            convention,
        },
    })
}

/// P_cold = P_warm (γ_cold/γ_warm)(T_cold/T_warm); the unknown inelastic
/// probability cancels.
pub fn infer_pressure_ratio(
    cold_rate: Measured,
    warm_rate: Measured,
    warm_pressure: f64,
    cold_temperature: f64,
    warm_temperature: f64,
) -> Result<PressureEstimate> {
    if !(warm_rate.value > 0.0) {
        return domain("warm inelastic rate must be positive");
    }
    if !(cold_rate.value >= 0.0 && warm_pressure > 0.0 && cold_temperature > 0.0 && warm_temperature > 0.0) {
        return domain("rates, pressure and temperatures must be positive");
    }
    let pressure = warm_pressure * (cold_rate.value / warm_rate.value) * (cold_temperature / warm_temperature);
    let rel = cold_rate.relative().hypot(warm_rate.relative());
    Ok(PressureEstimate {
        pressure,
        uncertainty: pressure * rel,
        method: PressureMethod::InelasticRatio,
        inputs: PressureInputs::InelasticRatio {
            cold_rate,
            warm_rate,
            warm_pressure,
            cold_temperature,
            warm_temperature,
        },
    })
}

/// Event times of a homogeneous Poisson process at rate
/// `ions · rate · probability` over `duration` [s].
pub fn simulate_dark_ion_series(
    rate: f64,
    probability: f64,
    duration: f64,
    ions: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&probability) {
        return domain(format!("probability must lie in [0, 1], got {probability}"));
    }
    if !(rate >= 0.0 && duration >= 0.0) {
        return domain("rate and duration must be non-negative");
    }
    let total = ions as f64 * rate * probability;
    let mut out = Vec::new();
    if total == 0.0 {
        return Ok(out);
    }
    let exp = Exp::new(total).map_err(|e| crate::Error::Domain(e.to_string()))?;
    let mut rng = sample_rng(seed, 0);
    let mut t = exp.sample(&mut rng);
    while t < duration {
        out.push(t);
        t += exp.sample(&mut rng);
    }
    Ok(out)
}

/// Rate and Poisson error from `count` events in `exposure` (e.g. ion·s).
pub fn count_rate(count: usize, exposure: f64) -> Result<Measured> {
    if !(exposure > 0.0) {
        return domain("exposure must be positive");
    }
    let k = count as f64;
    Ok(Measured::new(k / exposure, k.sqrt() / exposure))
}

/// Synthetic reconfiguration measurement: Langevin collisions at pressure
/// `pressure` [Pa] on `ions` ions for `duration` s, each flipping with
/// probability `p_flip`. Returns the per-ion elastic rate with its counting
/// error.
pub fn synthetic_elastic_rate(
    pressure: f64,
    gas: &BackgroundGas,
    ion: &IonSpecies,
    convention: DensityConvention,
    p_flip: f64,
    ions: usize,
    duration: f64,
    seed: u64,
) -> Result<Measured> {
    if ions == 0 {
        return domain("need at least one ion");
    }
    let density = density_from_pressure(pressure, gas.temperature(), convention)?;
    let gamma = langevin_rate(gas, ion, density)?;
    let collisions = simulate_dark_ion_series(gamma, 1.0, duration, ions, seed)?;
    let mut rng = sample_rng(seed, 1);
    let flips = collisions.iter().filter(|_| rng.random::<f64>() < p_flip).count();
    count_rate(flips, ions as f64 * duration)
}
