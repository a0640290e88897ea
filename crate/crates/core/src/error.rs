use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("{op} supports dimension {supported} only, got {dim}")]
    UnsupportedDimension {
        op: &'static str,
        dim: usize,
        supported: &'static str,
    },

    #[error("invalid point cloud: {0}")]
    InvalidCloud(String),

    #[error("point cloud window does not cover the required region: {0}")]
    WindowCoverage(String),

    #[error("precondition violated in {op}: {reason}")]
    Precondition { op: &'static str, reason: String },

    #[error("linear solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("time step rejected at t = {time}: Picard residual {residual:e} exceeds {bound:e}")]
    TimeStepRejected { time: f64, residual: f64, bound: f64 },

    #[error("stability search exceeded n = {cap}; the cloud is not admissible inside the window")]
    StabilityCapExceeded { cap: usize },

    #[error("channel bound violated: energy {energy} < bound {bound} (N = {channels})")]
    ChannelBoundViolated {
        energy: f64,
        bound: f64,
        channels: usize,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of a numerical solver rather than of the inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::SolverDiverged { .. }
                | Error::TimeStepRejected { .. }
                | Error::ChannelBoundViolated { .. }
        )
    }
}
