//! Primitive parameters and the elementary probability / log-odds calculus.
//!
//! Everything downstream works in log-likelihood-ratio (LLR) units: a
//! probability `p` maps to `log(p/(1-p))`, evidence adds, and decision rules
//! compare a single index against zero.

use crate::error::{ModelError, Result};
use crate::{real, Real};

/// All primitive scalars of the environment.
///
/// `q0`/`q1` are the true private-signal accuracies without/with education;
/// `qhat0`/`qhat1` are the accuracies an uneducated observer ascribes to
/// others' signals; `rho` is the tag accuracy under imperfect observability;
/// `eta` weighs education costs in welfare; `beta` discounts; `epsilon`
/// absorbs float accumulation in boundary comparisons of |LLR| against a
/// decision weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T> {
    pub mu0: T,
    pub q0: T,
    pub q1: T,
    pub qhat0: T,
    pub qhat1: T,
    pub rho: T,
    pub eta: T,
    pub beta: T,
    pub epsilon: T,
}

/// Default boundary-comparison tolerance.
pub const DEFAULT_EPSILON: f64 = 1e-9;

impl<T: Real> ModelParams<T> {
    /// Builds and validates a parameter set.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        mu0: T,
        q0: T,
        q1: T,
        qhat0: T,
        qhat1: T,
        rho: T,
        eta: T,
        beta: T,
        epsilon: T,
    ) -> Result<Self> {
        let params = Self {
            mu0,
            q0,
            q1,
            qhat0,
            qhat1,
            rho,
            eta,
            beta,
            epsilon,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks every domain restriction; see the field docs.
    pub fn validate(&self) -> Result<()> {
        let half = real::<T>(0.5);
        let one = T::one();
        let zero = T::zero();
        let fail = |name: &'static str, reason: &str| {
            Err(ModelError::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !(self.mu0 > zero && self.mu0 < one) {
            return fail("mu0", "prior must lie in (0,1)");
        }
        if !(self.q0 > half && self.q0 < one) {
            return fail("q0", "uneducated accuracy must lie in (1/2,1)");
        }
        if !(self.q1 >= self.q0 && self.q1 < one) {
            return fail("q1", "educated accuracy must lie in [q0,1)");
        }
        if !(self.qhat0 > half && self.qhat0 < one) {
            return fail("qhat0", "perceived uneducated accuracy must lie in (1/2,1)");
        }
        // qhat1 = 1 would give an infinite perceived weight and break LLR
        // additivity; callers wanting near-certainty use 1 - 1e-9.
        if !(self.qhat1 > self.qhat0 && self.qhat1 < one) {
            return fail("qhat1", "perceived educated accuracy must lie in (qhat0,1)");
        }
        if !(self.rho > half && self.rho <= one) {
            return fail("rho", "tag accuracy must lie in (1/2,1]");
        }
        if !(self.eta >= zero && self.eta <= one) {
            return fail("eta", "resource weight must lie in [0,1]");
        }
        if !(self.beta >= zero && self.beta < one) {
            return fail("beta", "discount factor must lie in [0,1)");
        }
        if !(self.epsilon >= zero) {
            return fail("epsilon", "tolerance must be nonnegative");
        }
        Ok(())
    }

    /// True uneducated signal weight `ψ(q0)`.
    pub fn lambda0(&self) -> T {
        psi_unchecked(self.q0)
    }

    /// True educated signal weight `ψ(q1)`; also the educated decision weight.
    pub fn lambda1(&self) -> T {
        psi_unchecked(self.q1)
    }

    /// Perceived uneducated weight `ψ(q̂(0))`; also the uneducated decision weight.
    pub fn lambda_hat0(&self) -> T {
        psi_unchecked(self.qhat0)
    }

    /// Perceived educated weight `ψ(q̂(1))`.
    pub fn lambda_hat1(&self) -> T {
        psi_unchecked(self.qhat1)
    }

    /// Misspecification wedge `κ0 = ψ(q̂(0)) − ψ(q0)`; may be negative.
    pub fn kappa0(&self) -> T {
        self.lambda_hat0() - self.lambda0()
    }

    /// Prior in LLR units, `ψ(μ0)`.
    pub fn prior_llr(&self) -> T {
        psi_unchecked(self.mu0)
    }

    /// Returns a copy with a replaced perceived uneducated accuracy.
    pub fn with_qhat0(&self, qhat0: T) -> Result<Self> {
        let mut p = *self;
        p.qhat0 = qhat0;
        p.validate()?;
        Ok(p)
    }
}

impl ModelParams<f64> {
    /// A baseline dual-channel parameterization used by the command-line
    /// front end when a key is not supplied.
    pub fn baseline() -> Self {
        Self {
            mu0: 0.5,
            q0: 0.6,
            q1: 0.8,
            qhat0: 0.75,
            qhat1: 0.85,
            rho: 0.9,
            eta: 1.0,
            beta: 0.9,
            epsilon: DEFAULT_EPSILON,
        }
    }
}

/// Whether the private signal can still change the chosen action at a given
/// public LLR, or the action is fixed regardless of the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    SignalDominant,
    /// The action taken regardless of the signal.
    ActionDominant(bool),
}

impl Dominance {
    pub fn is_action_dominant(self) -> bool {
        matches!(self, Dominance::ActionDominant(_))
    }

    /// The fixed action, if any.
    pub fn fixed_action(self) -> Option<bool> {
        match self {
            Dominance::SignalDominant => None,
            Dominance::ActionDominant(a) => Some(a),
        }
    }
}

fn psi_unchecked<T: Real>(x: T) -> T {
    (x / (T::one() - x)).ln()
}

/// Log-odds map `ψ(x) = log(x/(1−x))`.
///
/// Strictly increasing on (0,1) with `ψ(1−x) = −ψ(x)`.
pub fn log_odds<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero() && x < T::one()) {
        return Err(ModelError::Domain {
            op: "log_odds",
            reason: format!("argument {x} outside (0,1)"),
        });
    }
    Ok(psi_unchecked(x))
}

/// Inverse of [`log_odds`]: `(1 + e^{−L})^{−1}`.
pub fn posterior_from_llr<T: Real>(l: T) -> T {
    T::one() / (T::one() + (-l).exp())
}

/// Posterior on the better-supported state, `(1 + e^{−|L|})^{−1} ∈ [1/2, 1)`.
pub fn folded_posterior<T: Real>(l: T) -> T {
    posterior_from_llr(l.abs())
}

/// Classifies a public LLR against a decision weight.
///
/// The classification enumerates the threshold action rule at both signal
/// values: the regime is action-dominant only when the decision index
/// `L + Λ(2s−1)` is strictly positive (beyond `eps`) for both signals, or
/// strictly negative for both. An index within `eps` of zero is an exact
/// indifference the signal can still tie, so boundary histories
/// `|L| = Λ` stay signal-dominant.
pub fn classify_dominance<T: Real>(l: T, lambda: T, eps: T) -> Result<Dominance> {
    if !(lambda > T::zero()) {
        return Err(ModelError::Domain {
            op: "classify_dominance",
            reason: format!("decision weight {lambda} must be positive"),
        });
    }
    Ok(classify_dominance_unchecked(l, lambda, eps))
}

pub(crate) fn classify_dominance_unchecked<T: Real>(l: T, lambda: T, eps: T) -> Dominance {
    if l - lambda > eps {
        Dominance::ActionDominant(true)
    } else if l + lambda < -eps {
        Dominance::ActionDominant(false)
    } else {
        Dominance::SignalDominant
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams<f64> {
        ModelParams::baseline()
    }

    #[test]
    fn log_odds_closed_forms() {
        assert_eq!(log_odds(0.5f64).unwrap(), 0.0);
        assert!((log_odds(0.75f64).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!((log_odds(0.9f64).unwrap() - 9f64.ln()).abs() < 1e-15);
        assert!(log_odds(0.0f64).is_err());
        assert!(log_odds(1.0f64).is_err());
        assert!(log_odds(-0.2f64).is_err());
    }

    #[test]
    fn posterior_inverts_log_odds() {
        assert_eq!(posterior_from_llr(0.0f64), 0.5);
        assert!((posterior_from_llr(3f64.ln()) - 0.75).abs() < 1e-15);
        assert!((posterior_from_llr(-(9f64.ln())) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn folded_posterior_examples() {
        assert_eq!(folded_posterior(0.0f64), 0.5);
        assert!((folded_posterior(3f64.ln()) - 0.75).abs() < 1e-15);
        assert!((folded_posterior(-(3f64.ln())) - 0.75).abs() < 1e-15);
        // Run of two uneducated actions at q0 = 0.6: folded posterior at
        // 2ψ(0.6) equals q0²/(q0²+(1−q0)²) = 0.36/0.52.
        let l = 2.0 * log_odds(0.6f64).unwrap();
        assert!((folded_posterior(l) - 0.36 / 0.52).abs() < 1e-12);
    }

    #[test]
    fn dominance_classification() {
        let eps = 1e-9;
        assert_eq!(
            classify_dominance(0.3f64, 1.0, eps).unwrap(),
            Dominance::SignalDominant
        );
        assert_eq!(
            classify_dominance(2.0f64, 1.0, eps).unwrap(),
            Dominance::ActionDominant(true)
        );
        assert_eq!(
            classify_dominance(-2.0f64, 1.0, eps).unwrap(),
            Dominance::ActionDominant(false)
        );
        // Boundary cases are signal-dominant: the index ties at one signal
        // value, so the signal still decides.
        assert_eq!(
            classify_dominance(-1.0f64, 1.0, eps).unwrap(),
            Dominance::SignalDominant
        );
        assert_eq!(
            classify_dominance(1.0f64, 1.0, eps).unwrap(),
            Dominance::SignalDominant
        );
        assert!(classify_dominance(0.0f64, 0.0, eps).is_err());
        assert!(classify_dominance(0.0f64, -1.0, eps).is_err());
    }

    #[test]
    fn params_validation_rejects_bad_domains() {
        let p = params();
        assert!(p.validate().is_ok());
        let bad = ModelParams { q0: 0.5, ..p };
        assert!(bad.validate().is_err());
        let bad = ModelParams { q1: 0.55, ..p }; // below q0
        assert!(bad.validate().is_err());
        let bad = ModelParams { qhat1: 1.0, ..p }; // infinite perceived weight
        assert!(bad.validate().is_err());
        let bad = ModelParams { qhat1: 0.7, ..p }; // below qhat0
        assert!(bad.validate().is_err());
        let bad = ModelParams { rho: 0.5, ..p };
        assert!(bad.validate().is_err());
        let bad = ModelParams { beta: 1.0, ..p };
        assert!(bad.validate().is_err());
        let bad = ModelParams { mu0: 0.0, ..p };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn negative_wedge_is_allowed() {
        // Perceived under-precision: qhat0 below q0 keeps κ0 < 0 legal.
        let p = ModelParams::<f64>::new(0.5, 0.8, 0.9, 0.6, 0.85, 1.0, 1.0, 0.0, 1e-9).unwrap();
        assert!(p.kappa0() < 0.0);
    }

    #[test]
    fn derived_weights_positive_and_finite() {
        let p = params();
        for w in [p.lambda0(), p.lambda1(), p.lambda_hat0(), p.lambda_hat1()] {
            assert!(w > 0.0 && w.is_finite());
        }
    }
}
