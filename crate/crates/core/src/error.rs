use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("profile endpoint not settled: spread {spread:e} over the last 10% of the grid")]
    InconclusiveEndpoint { spread: f64 },

    #[error("|sinh(r) u| = {arg:e} exceeds the saturation guard {limit}")]
    Saturation { arg: f64, limit: f64 },

    #[error("integration failed at r = {r}: {reason}")]
    Integration { r: f64, reason: String },

    #[error("truncation radius too small: {0}")]
    Truncation(String),

    #[error("wronskian has the same sign at both bracket ends (mu^2 = {lo} and {hi})")]
    Bracketing { lo: f64, hi: f64 },

    #[error("multiplicity anomaly: {0}")]
    Multiplicity(String),

    #[error("threshold fit inconclusive: residual {residual:e} above {limit:e}")]
    InconclusiveFit { residual: f64, limit: f64 },

    #[error("no transition in [{lo}, {hi}]")]
    Range { lo: f64, hi: f64 },

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("|W| = {0:e} below 1e-12: near a threshold resonance")]
    NearResonance(f64),

    #[error("quadrature did not converge in the oscillatory regime (r xi = {0})")]
    Oscillatory(f64),

    #[error("plancherel gap {gap:.3} exceeds 20%; try a xi grid finer than {suggested_step}")]
    Resolution { gap: f64, suggested_step: f64 },

    #[error("evolution became unstable at t = {t}, r = {r}")]
    Instability { t: f64, r: f64 },

    #[error("L-infinity bound violated: sup |psi| = {sup} > {bound}")]
    BoundViolated { sup: f64, bound: f64 },

    #[error("frequency fit inconclusive: signal-to-noise {0:.2}")]
    Inconclusive(f64),

    #[error("result contradicts a proven bound: {0}")]
    Contradiction(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of a numerical computation, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            Error::Domain(_) | Error::Config(_) | Error::Precondition(_) | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
