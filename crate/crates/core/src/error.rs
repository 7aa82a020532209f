use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{solver} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        solver: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("root find failed: no sign change in bracket [{lo:e}, {hi:e}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("ions {i} and {j} are coincident (separation {separation:e} m)")]
    CoincidentIons { i: usize, j: usize, separation: f64 },

    #[error("non-finite force on ion {ion} at t = {time:e} s")]
    NonFiniteForce { ion: usize, time: f64 },

    #[error("conductivity table does not cover {lo} K .. {hi} K (table spans {table_lo} K .. {table_hi} K)")]
    TableGap {
        lo: f64,
        hi: f64,
        table_lo: f64,
        table_hi: f64,
    },

    #[error("snapshot format: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
