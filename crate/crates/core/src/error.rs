use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Step-potential parameters violate one of the admissibility inequalities.
    #[error("inadmissible step potential: {0}")]
    Admissibility(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Mollification width shrank to its floor without reaching the mean target.
    #[error("smoothing infeasible: integral of q~ is {integral:.6e} > -{mu} at delta floor {delta:.3e}")]
    InfeasibleSmoothing { integral: f64, mu: f64, delta: f64 },

    /// Scaled support `(a + delta) L^{-c1}` does not fit into `[-L, L]`.
    #[error("domain too small: support half-width {support:.6} exceeds L = {l}")]
    DomainTooSmall { support: f64, l: f64 },

    #[error("mean condition violated: <q> = {mean_q:.6} > -3/4; use a smaller delta or a larger mu")]
    MeanCondition { mean_q: f64 },

    #[error("grid too coarse: {0}")]
    Resolution(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("eigensolver did not converge after {0} sweeps")]
    Eigensolver(usize),

    /// Mode doubling hit the cap before `lambda_min` settled. Not a disproof.
    #[error("certification inconclusive: lambda_min not converged at N = {n} (last change {change:.3e})")]
    Inconclusive { n: usize, change: f64 },

    #[error("coercivity not certified: margin {0:.6e} <= 0")]
    NotCertified(f64),

    #[error("descent failed after {iterations} iterations, gradient norm {grad_norm:.3e}")]
    Descent { iterations: usize, grad_norm: f64 },

    #[error("blow-up at t = {t:.4}: ||u||_2 = {norm:.4e}")]
    BlowUp { t: f64, norm: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("power-law fit: {0}")]
    Fit(String),

    #[error("aspect-ratio condition violated: Ly = {ly:.6e} > Ly_max = {ly_max:.6e}")]
    AspectRatio { ly: f64, ly_max: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
