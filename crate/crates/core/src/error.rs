//! Error type shared by all modules.

use crate::sublevel::SublevelEstimate;

/// Everything that can go wrong across the crate. Variants are grouped by the
/// module that raises them; callers that need exit-code style triage can use
/// [`Error::is_validation`] / [`Error::is_numerical`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on user input failed (bad grid, empty phase, exponent cap, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Linear change of variables with zero determinant.
    #[error("linear change of variables is singular (zero determinant)")]
    SingularMatrix,

    /// Decay prediction requires the caller to assert adaptedness of the coordinates.
    #[error("decay prediction requires the adapted-coordinates assertion")]
    NotAsserted,

    /// Wedge with empty cross-section at some sampled x.
    #[error("wedge is empty at sampled x = {0:.3e}")]
    DegenerateWedge(f64),

    /// The principal polynomial r(y) changes sign inside the wedge's y-range.
    #[error("principal polynomial vanishes near y = {0:.6} inside [0, H]")]
    RootInRange(f64),

    /// Damped integration requires S >= 0 on the support of the bump.
    #[error("phase is negative on the bump support (sampled min {0:.3e})")]
    NegativePhase(f64),

    /// A theorem hypothesis failed on sampled data.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// Least-squares design matrix is numerically rank-deficient.
    #[error("design matrix condition {0:.3e} exceeds 1e8")]
    IllConditioned(f64),

    /// Not enough usable data points for a fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The sharp-decay theorem does not cover this phase.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// Subdivision budget exhausted before the sublevel bracket closed.
    #[error("subdivision budget exhausted; best bracket {measure:.6e} +- {uncertainty:.3e}",
            measure = estimate.measure, uncertainty = estimate.uncertainty)]
    SublevelBudget { estimate: SublevelEstimate },

    /// Frequency-side datum support contains too few grid modes.
    #[error("datum support unresolved: {0} grid modes inside the frequency bump, need >= 8")]
    UnresolvedSupport(usize),

    /// Dissipative evolution requires a nonnegative symbol on the datum support.
    #[error("multiplier symbol is negative on the datum support (sampled min {0:.3e})")]
    NegativeSymbol(f64),

    /// Fractional inverse order must stay below the sublevel growth exponent.
    #[error("delta = {delta} must be smaller than the sublevel exponent epsilon = {epsilon}")]
    DeltaTooLarge { delta: f64, epsilon: f64 },

    /// Fractional inverse with eta = 0 hit a retained mode with exactly zero symbol.
    #[error("retained grid mode has exactly zero symbol; use a positive eta cutoff")]
    ZeroSymbolMode,

    /// The eta-refinement sequence did not converge.
    #[error("eta sequence exhausted without convergence: {0}")]
    NotConverging(String),
}

impl Error {
    /// True for errors that reflect bad input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        !self.is_numerical()
    }

    /// True for errors that reflect a numerical process failing to converge.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SublevelBudget { .. } | Error::NotConverging(_) | Error::IllConditioned(_)
        )
    }
}
