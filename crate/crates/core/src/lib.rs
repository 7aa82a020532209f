//! Simulation library for cryogenic trapped-ion chains.
//!
//! * [`trap`]: Paul-trap parameterization and the RF force field.
//! * [`axial`]: quartic axial potentials, 1D equilibria, spacing optimization.
//! * [`crystal`]: 3D pseudopotential equilibria (linear and zig-zag crystals).
//! * [`collision`]: ion–neutral Langevin kinematics.
//! * [`dynamics`]: Forest-Ruth molecular dynamics with quantum-trajectory
//!   Doppler cooling.
//! * [`experiments`]: zig-zag flip Monte Carlo and vacuum-pressure inference.
//! * [`design`]: cryostat heat loads and helical-resonator figures.
//!
//! All quantities are SI internally.

pub mod axial;
pub mod collision;
pub mod constants;
pub mod crystal;
pub mod design;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod numeric;
pub mod parallel;
pub mod special;
pub mod species;
pub mod trap;

pub use error::{Error, Result};
pub use species::{BackgroundGas, IonSpecies};
pub use trap::TrapParameters;
