//! Ion and background-gas species.

use serde::{Deserialize, Serialize};

use crate::constants::{
    ATOMIC_MASS_UNIT, BOLTZMANN, ELECTRON_MASS, ELEMENTARY_CHARGE, H2_MASS_U,
    H2_POLARIZABILITY_VOLUME, YB171_ATOMIC_MASS_U,
};
use crate::error::{domain, Result};

/// An ion species: mass [kg] and charge [C].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IonSpecies {
    mass: f64,
    charge: f64,
}

impl IonSpecies {
    /// `charge_number` is the charge in units of e.
    pub fn new(mass: f64, charge_number: i32) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return domain(format!("ion mass must be positive, got {mass}"));
        }
        if charge_number == 0 {
            return domain("ion charge must be nonzero");
        }
        Ok(Self {
            mass,
            charge: charge_number as f64 * ELEMENTARY_CHARGE,
        })
    }

    /// 171Yb+.
    pub fn yb171() -> Self {
        Self {
            mass: YB171_ATOMIC_MASS_U * ATOMIC_MASS_UNIT - ELECTRON_MASS,
            charge: ELEMENTARY_CHARGE,
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }
}

/// Neutral background gas: molecular mass [kg], polarizability volume [m^3]
/// and temperature [K].
///
/// The polarizability is stored as a *volume* α/(4πε0). All collision
/// formulas in [`crate::collision`] assume this convention; passing an SI
/// polarizability (C m²/V) here gives results off by 4πε0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BackgroundGas {
    mass: f64,
    polarizability_volume: f64,
    temperature: f64,
}

impl BackgroundGas {
    pub fn new(mass: f64, polarizability_volume: f64, temperature: f64) -> Result<Self> {
        if !(mass > 0.0 && mass.is_finite()) {
            return domain(format!("gas mass must be positive, got {mass}"));
        }
        if !(polarizability_volume >= 0.0 && polarizability_volume.is_finite()) {
            return domain(format!(
                "polarizability volume must be non-negative, got {polarizability_volume}"
            ));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return domain(format!("gas temperature must be positive, got {temperature}"));
        }
        Ok(Self {
            mass,
            polarizability_volume,
            temperature,
        })
    }

    /// Molecular hydrogen at `temperature` [K].
    pub fn h2(temperature: f64) -> Result<Self> {
        Self::new(
            H2_MASS_U * ATOMIC_MASS_UNIT,
            H2_POLARIZABILITY_VOLUME,
            temperature,
        )
    }

    pub fn with_temperature(&self, temperature: f64) -> Result<Self> {
        Self::new(self.mass, self.polarizability_volume, temperature)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn polarizability_volume(&self) -> f64 {
        self.polarizability_volume
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Mean kinetic energy 3/2 k_B T [J].
    pub fn mean_kinetic_energy(&self) -> f64 {
        1.5 * BOLTZMANN * self.temperature
    }

    /// Most probable speed sqrt(2 k_B T / m) [m/s].
    pub fn most_probable_speed(&self) -> f64 {
        (2.0 * BOLTZMANN * self.temperature / self.mass).sqrt()
    }
}
