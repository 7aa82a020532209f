//! Numerical versions of the measurement protocols: zig-zag flip Monte
//! Carlo, laser cooling runs, reconfiguration and inelastic rates, and pressure inference.

mod cooling;
mod flip;
mod mc;
mod pressure;

pub use cooling::{run_cooling, CoolingRecord, CoolingRun, CoolingRunConfig};
pub use flip::{
    classify_final_state, detect_flip, flip_distance, mirror_configuration, mirror_distance, FinalState,
    DEFAULT_FLIP_THRESHOLD,
};
pub use mc::{
    aggregate, estimate_p_flip, fit_arrhenius, run_flip_sample, FlipExperimentConfig, FlipResult,
    FlipSample, FlipSetup, SampleKind,
};
pub use pressure::{
    count_rate, elastic_rate, infer_pressure_elastic, infer_pressure_ratio, simulate_dark_ion_series,
    synthetic_elastic_rate, Measured, PressureEstimate, PressureInputs, PressureMethod,
};
