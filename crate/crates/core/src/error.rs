//! Error type shared by all modules.

/// Errors surfaced by transforms, solvers, and the simulation harness.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Evaluation point lies in (or too close to) the support of a measure,
    /// or outside the domain of analyticity of a transform.
    #[error("domain error: {0}")]
    Domain(String),

    /// `G` vanishes at the evaluation point, so `F = 1/G` has a pole there.
    #[error("pole error: {0}")]
    Pole(String),

    /// Newton inversion of the Cauchy transform did not converge.
    #[error("inversion error: {0}")]
    Inversion(String),

    /// Fixed-point iteration exhausted its budget without reaching tolerance.
    #[error("convergence error: {0}")]
    Convergence(String),

    /// Boundary extrapolation toward the real line did not settle.
    #[error("boundary error: {0}")]
    Boundary(String),

    /// A closed-form transform was requested for a family that has none.
    #[error("family error: {0}")]
    Family(String),

    /// Matrix dimension constraint violated.
    #[error("size error: {0}")]
    Size(String),

    /// Invalid run or harness configuration.
    #[error("config error: {0}")]
    Config(String),

    /// A linear system was singular at the requested shift.
    #[error("singular error: {0}")]
    Singular(String),

    /// A measure failed its construction invariants.
    #[error("measure error: {0}")]
    Measure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
