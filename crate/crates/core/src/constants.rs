//! Physical constants (CODATA 2018, SI) and species data.

/// Elementary charge [C].
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Vacuum permittivity [F/m].
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Boltzmann constant [J/K].
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass unit [kg].
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Stefan-Boltzmann constant [W m^-2 K^-4].
pub const STEFAN_BOLTZMANN: f64 = 5.670_374_419e-8;
/// 1 Torr in pascal (101325/760).
pub const TORR: f64 = 101_325.0 / 760.0;

/// Atomic mass of 171Yb [u]; the ion mass subtracts one electron.
pub const YB171_ATOMIC_MASS_U: f64 = 170.936_323_8;
/// Electron mass [kg].
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
/// Molecular mass of H2 [u].
pub const H2_MASS_U: f64 = 2.015_650;

/// Static polarizability volume of H2 [m^3].
///
/// 0.787 Å^3, the isotropic average of the static dipole polarizability
/// (5.31 a0^3 ≈ 0.787e-30 m^3; CRC Handbook, "Atomic and molecular
/// polarizabilities"). This is α/(4πε0), not the SI polarizability in C m^2/V.
pub const H2_POLARIZABILITY_VOLUME: f64 = 0.787e-30;

/// Coulomb constant e²/(4πε0) for a singly charged pair [J m].
pub fn coulomb_constant(charge: f64) -> f64 {
    charge * charge / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY)
}

/// Converts a value in Torr to pascal.
pub fn torr_to_pa(p: f64) -> f64 {
    p * TORR
}

/// Converts a value in pascal to Torr.
pub fn pa_to_torr(p: f64) -> f64 {
    p / TORR
}

/// Angular frequency [rad/s] from an ordinary frequency [Hz].
pub fn angular(hz: f64) -> f64 {
    2.0 * std::f64::consts::PI * hz
}
