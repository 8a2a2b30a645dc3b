//! Shared evaluation settings: sample sizes, tolerances, and the
//! exact-vs-Monte-Carlo path policy.

/// Whether measure queries may or must use the exact arc oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathPolicy {
    /// Use the exact oracle whenever the prior supports it (default).
    PreferExact,
    /// Fail if the exact oracle is unavailable.
    RequireExact,
    /// Always estimate by Monte Carlo, even when an exact path exists.
    ForceMonteCarlo,
}

#[derive(Debug, Clone)]
pub struct EvalConfig {
    /// Monte-Carlo sample count for measure estimates.
    pub n_samples: usize,
    /// Membership tolerance when classifying sampled directions.
    pub tie_tol: f64,
    /// Abort threshold on the fraction of samples landing in two or more
    /// cells of one partition; exceeding it signals a non-regular prior or
    /// a degenerate menu.
    pub tie_rate_abort: f64,
    /// Multiplier on standard errors for statistical comparisons.
    pub sigma: f64,
    /// Adaptive doubling cap for borderline comparisons.
    pub adapt_cap: usize,
    /// Equality tolerance on the exact path.
    pub exact_tol: f64,
    pub path: PathPolicy,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            n_samples: 100_000,
            tie_tol: 1e-9,
            tie_rate_abort: 1e-4,
            sigma: 4.0,
            adapt_cap: 1_000_000,
            exact_tol: 1e-9,
            path: PathPolicy::PreferExact,
        }
    }
}

impl EvalConfig {
    pub fn with_samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_path(mut self, path: PathPolicy) -> Self {
        self.path = path;
        self
    }
}
