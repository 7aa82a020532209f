//! Time-domain dynamics of ions in the full RF field: Coulomb coupling,
//! fourth-order symplectic stepping and quantum-trajectory Doppler cooling.

mod cooling;
mod evolve;
mod field;
mod integrator;
mod io;
mod orbit;
mod state;

pub use cooling::{cooling_substep, propagate_internal, CoolingParameters, MAX_SUBSTEP_GAMMA};
pub use evolve::{evolve, EvolveOptions, EvolveOutcome, PeriodRecord, ScheduledKick};
pub use field::{
    coulomb_energy, coulomb_forces, total_force, Axial, ForceField, IonTrapField, COINCIDENCE_DISTANCE,
};
pub use integrator::{
    forest_ruth_step, IntegratorConfig, Scratch, FOREST_RUTH_THETA, MIN_STEPS_PER_PERIOD,
};
pub use io::{
    read_snapshot, write_snapshot, write_trajectory_csv, SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
    TRAJECTORY_HEADER,
};
pub use orbit::{micromotion_guess, periodic_orbit, sample_period};
pub use state::{Internal, SystemState, GROUND};
