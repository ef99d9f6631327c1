//! Welfare accounting and planner subsidy rules.
//!
//! Per-period welfare is `1{a_t = θ} − η·F_t·e_t`. The static gain from
//! making education available at a history combines the accuracy improvement
//! of the educating mass with the expected resource cost of their draws;
//! subsidy rules shift the private education cutoff.

use crate::costs::CostModel;
use crate::decision::ValueBreakdown;
use crate::dynamics::{simulate_paths, SimConfig};
use crate::error::{ModelError, Result};
use crate::model::{classify_dominance_unchecked, folded_posterior, Dominance, ModelParams};
use crate::{real, Real};

/// A per-education subsidy policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubsidyRule<T> {
    /// No subsidy.
    None,
    /// Constant subsidy per education.
    Flat(T),
    /// Myopically optimal history-dependent subsidy solving
    /// `ΔAcc = η(ΔV + s)`, truncated to feasibility.
    Myopic { eta: T },
    /// Smallest subsidy guaranteeing per-period break probability
    /// `pi_bar` given flip probability at least `p_star`.
    TargetBreak { pi_bar: T, p_star: T },
}

impl<T: Real> std::fmt::Display for SubsidyRule<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::None => write!(f, "none"),
            Self::Flat(s) => write!(f, "flat({s})"),
            Self::Myopic { eta } => write!(f, "myopic(eta={eta})"),
            Self::TargetBreak { pi_bar, p_star } => {
                write!(f, "target(pi_bar={pi_bar},p_star={p_star})")
            }
        }
    }
}

impl<T: Real> SubsidyRule<T> {
    /// Validates rule parameters against a cost model.
    pub fn validate(&self, cost_model: &CostModel<T>) -> Result<()> {
        match *self {
            Self::None => Ok(()),
            Self::Flat(s) => {
                if s < T::zero() || s > cost_model.effective_upper() {
                    Err(ModelError::InvalidParameter {
                        name: "subsidy.s",
                        reason: format!("flat subsidy {s} outside [0, effective upper bound]"),
                    })
                } else {
                    Ok(())
                }
            }
            Self::Myopic { eta } => {
                if eta > T::zero() {
                    Ok(())
                } else {
                    // the first-order condition divides by η
                    Err(ModelError::InvalidParameter {
                        name: "subsidy.eta",
                        reason: "myopic rule requires a positive resource weight".to_string(),
                    })
                }
            }
            Self::TargetBreak { pi_bar, p_star } => {
                if pi_bar > T::zero() && pi_bar <= p_star && p_star <= T::one() {
                    Ok(())
                } else {
                    Err(ModelError::InvalidParameter {
                        name: "subsidy.pi_bar",
                        reason: format!("need 0 < pi_bar ({pi_bar}) <= p_star ({p_star}) <= 1"),
                    })
                }
            }
        }
    }

    /// Evaluates the subsidy at a history with value breakdown `breakdown`.
    ///
    /// In the unsubsidized model the accuracy gain equals the private value,
    /// so history-dependent rules read both off `breakdown.delta_v`.
    pub fn evaluate(&self, breakdown: &ValueBreakdown<T>, cost_model: &CostModel<T>) -> T {
        match *self {
            Self::None => T::zero(),
            Self::Flat(s) => s,
            Self::Myopic { eta } => clamp_feasible(
                breakdown.delta_v / eta - breakdown.delta_v,
                breakdown.delta_v,
                cost_model,
            ),
            Self::TargetBreak { pi_bar, p_star } => {
                target_break_subsidy(pi_bar, p_star, breakdown.delta_v, cost_model)
                    .expect("validated rule parameters")
            }
        }
    }
}

fn clamp_feasible<T: Real>(raw: T, delta_v: T, cost_model: &CostModel<T>) -> T {
    let cap = (cost_model.effective_upper() - delta_v).max(T::zero());
    raw.max(T::zero()).min(cap)
}

/// Expected per-period social welfare gain from allowing education:
/// `F(max(ΔV,0))·ΔAcc − η·H(max(ΔV,0))`.
pub fn static_welfare_gain<T: Real>(
    delta_v: T,
    delta_acc: T,
    eta: T,
    cost_model: &CostModel<T>,
) -> T {
    let cutoff = delta_v.max(T::zero());
    let h = cost_model
        .truncated_first_moment(cutoff)
        .expect("nonnegative cutoff");
    cost_model.cdf(cutoff) * delta_acc - eta * h
}

/// Myopically optimal subsidy `[ΔAcc/η − ΔV]` truncated to
/// `[0, F̄_eff − ΔV]`; distribution-free.
pub fn myopic_subsidy<T: Real>(
    delta_acc: T,
    delta_v: T,
    eta: T,
    fbar_effective: T,
) -> Result<T> {
    if !(eta > T::zero()) {
        return Err(ModelError::Domain {
            op: "myopic_subsidy",
            reason: "interior first-order condition requires eta > 0".to_string(),
        });
    }
    let cap = (fbar_effective - delta_v).max(T::zero());
    Ok((delta_acc / eta - delta_v).max(T::zero()).min(cap))
}

/// Smallest subsidy with `F(ΔV + s)·p⋆ ≥ π̄`:
/// `[F^{-1}(π̄/p⋆) − ΔV]` truncated to `[0, F̄_eff − ΔV]`.
pub fn target_break_subsidy<T: Real>(
    pi_bar: T,
    p_star: T,
    delta_v: T,
    cost_model: &CostModel<T>,
) -> Result<T> {
    if !(pi_bar > T::zero() && pi_bar <= p_star && p_star <= T::one()) {
        return Err(ModelError::Domain {
            op: "target_break_subsidy",
            reason: format!("need 0 < pi_bar ({pi_bar}) <= p_star ({p_star}) <= 1"),
        });
    }
    let ratio = pi_bar / p_star;
    let quantile = if ratio >= T::one() {
        cost_model.effective_upper()
    } else {
        cost_model.quantile(ratio)?
    };
    Ok(clamp_feasible(quantile - delta_v, delta_v, cost_model))
}

/// Accuracy floor gained when an incorrect cascade breaks, from the educated
/// public LLR: pre-break accuracy is at most `1 − μ̄^E`, post-break at least
/// `μ̄^E` (educated action-dominant) or `q1` (signal-dominant).
pub fn welfare_gap_lower_bound<T: Real>(l_e: T, params: &ModelParams<T>) -> T {
    let mu_bar = folded_posterior(l_e);
    let pre = T::one() - mu_bar;
    let post = match classify_dominance_unchecked(l_e, params.lambda1(), params.epsilon) {
        Dominance::ActionDominant(_) => mu_bar,
        Dominance::SignalDominant => params.q1,
    };
    post - pre
}

/// Discounted welfare lower bound under a constant per-period break
/// probability `pi_s`:
/// `pi/(1−β(1−pi))·Δ̲ − η·outlay/(1−β(1−pi))`.
pub fn dynamic_welfare_bound<T: Real>(
    pi_s: T,
    beta: T,
    delta_lower: T,
    eta: T,
    expected_subsidy_outlay: T,
) -> Result<T> {
    if !(pi_s > T::zero() && pi_s <= T::one()) {
        return Err(ModelError::Domain {
            op: "dynamic_welfare_bound",
            reason: format!("break probability {pi_s} outside (0,1]"),
        });
    }
    if !(beta >= T::zero() && beta < T::one()) {
        return Err(ModelError::Domain {
            op: "dynamic_welfare_bound",
            reason: format!("discount factor {beta} outside [0,1)"),
        });
    }
    let denom = T::one() - beta * (T::one() - pi_s);
    Ok(pi_s / denom * delta_lower - eta * expected_subsidy_outlay / denom)
}

/// Monte Carlo estimate of discounted welfare under a subsidy rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelfareEstimate<T> {
    pub mean: T,
    pub std_error: T,
    /// Mean of the discounted per-period static-gain track
    /// `Σ β^{t-1} (F(ΔV_t+s_t)·ΔAcc_t − η·H(ΔV_t+s_t))`, the pointwise
    /// lower-bound series for history-dependent subsidies.
    pub pointwise_bound_mean: T,
    pub pointwise_bound_se: T,
    pub n_reps: usize,
}

/// Estimates `W = E[Σ β^{t-1} w_t]` under `rule` (overriding the config's
/// subsidy). The horizon must satisfy `β^horizon < 1e-6` so the truncated
/// tail is negligible.
pub fn discounted_welfare_mc<T: Real>(
    config: &SimConfig<T>,
    rule: SubsidyRule<T>,
) -> Result<WelfareEstimate<T>> {
    let beta = config.params.beta;
    let tail = beta.powi(config.horizon as i32);
    if !(tail < real::<T>(1e-6)) {
        return Err(ModelError::Domain {
            op: "discounted_welfare_mc",
            reason: format!(
                "beta^horizon = {tail} is not below 1e-6; raise the horizon"
            ),
        });
    }
    let mut cfg = config.clone();
    cfg.subsidy = rule;
    rule.validate(&cfg.cost_model)?;
    let paths = simulate_paths(&cfg)?;
    let eta = cfg.params.eta;
    let mut w_acc = Accumulator::<T>::new();
    let mut b_acc = Accumulator::<T>::new();
    for path in &paths {
        let mut discount = T::one();
        let mut w = T::zero();
        let mut bound = T::zero();
        for period in &path.periods {
            w = w + discount * period.welfare;
            let cutoff = (period.delta_v + period.subsidy).max(T::zero());
            let h = cfg
                .cost_model
                .truncated_first_moment(cutoff)
                .expect("nonnegative cutoff");
            bound = bound
                + discount * (cfg.cost_model.cdf(cutoff) * period.delta_v - eta * h);
            discount = discount * beta;
        }
        w_acc.push(w);
        b_acc.push(bound);
    }
    Ok(WelfareEstimate {
        mean: w_acc.mean(),
        std_error: w_acc.std_error(),
        pointwise_bound_mean: b_acc.mean(),
        pointwise_bound_se: b_acc.std_error(),
        n_reps: paths.len(),
    })
}

/// Running mean / standard-error accumulator.
pub(crate) struct Accumulator<T> {
    n: usize,
    sum: T,
    sum_sq: T,
}

impl<T: Real> Accumulator<T> {
    pub fn new() -> Self {
        Self {
            n: 0,
            sum: T::zero(),
            sum_sq: T::zero(),
        }
    }

    pub fn push(&mut self, x: T) {
        self.n += 1;
        self.sum = self.sum + x;
        self.sum_sq = self.sum_sq + x * x;
    }

    pub fn mean(&self) -> T {
        if self.n == 0 {
            return T::zero();
        }
        self.sum / real::<T>(self.n as f64)
    }

    pub fn std_error(&self) -> T {
        if self.n < 2 {
            return T::zero();
        }
        let n = real::<T>(self.n as f64);
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - T::one())).max(T::zero());
        (var / n).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> CostModel<f64> {
        CostModel::uniform(1.0).unwrap()
    }

    #[test]
    fn static_gain_examples() {
        let gain = static_welfare_gain(0.2, 0.2, 1.0, &uniform());
        assert!((gain - 0.02).abs() < 1e-15);
        // pure transfers drop the resource term
        let gain = static_welfare_gain(0.2, 0.2, 0.0, &uniform());
        assert!((gain - 0.04).abs() < 1e-15);
        assert_eq!(static_welfare_gain(0.0, 0.3, 1.0, &uniform()), 0.0);
        // negative value clamps to a zero cutoff
        assert_eq!(static_welfare_gain(-0.4, 0.3, 1.0, &uniform()), 0.0);
    }

    #[test]
    fn myopic_subsidy_corners() {
        assert!((myopic_subsidy(0.3f64, 0.1, 1.0, 1.0).unwrap() - 0.2).abs() < 1e-15);
        // no subsidy when the gain is already covered privately
        assert_eq!(myopic_subsidy(0.05f64, 0.1, 1.0, 1.0).unwrap(), 0.0);
        // cap at the feasible maximum
        assert!((myopic_subsidy(5.0f64, 0.1, 1.0, 1.0).unwrap() - 0.9).abs() < 1e-15);
        assert!(myopic_subsidy(0.3f64, 0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn target_break_subsidy_examples() {
        let s = target_break_subsidy(0.45, 0.9, 0.2, &uniform()).unwrap();
        assert!((s - 0.3).abs() < 1e-15);
        // target already met
        let s = target_break_subsidy(0.9 * 0.2, 0.9, 0.2, &uniform()).unwrap();
        assert_eq!(s, 0.0);
        // quantile beyond the cap truncates
        let s = target_break_subsidy(0.9, 0.9, 0.2, &uniform()).unwrap();
        assert!((s - 0.8).abs() < 1e-15);
        assert!(target_break_subsidy(0.95, 0.9, 0.2, &uniform()).is_err());
    }

    #[test]
    fn target_break_subsidy_monotonicity() {
        let model = CostModel::exponential(2.0f64).unwrap();
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let dv = 0.05 * k as f64;
            let s = target_break_subsidy(0.4, 0.8, dv, &model).unwrap();
            assert!(s <= prev + 1e-12, "nonincreasing in delta_v");
            prev = s;
        }
        let mut prev = -1.0;
        for k in 1..=16 {
            let pi_bar = 0.05 * k as f64;
            let s = target_break_subsidy(pi_bar, 0.8, 0.1, &model).unwrap();
            assert!(s + 1e-12 >= prev, "nondecreasing in pi_bar");
            prev = s;
        }
    }

    #[test]
    fn dynamic_bound_limits() {
        // pure transfer: only the gain term
        let b = dynamic_welfare_bound(0.27f64, 0.9, 0.5, 0.0, 0.3).unwrap();
        assert!((b - 0.27 / (1.0 - 0.9 * 0.73) * 0.5).abs() < 1e-12);
        // one-period limit
        let b = dynamic_welfare_bound(0.27f64, 0.0, 0.5, 1.0, 0.3).unwrap();
        assert!((b - (0.27 * 0.5 - 0.3)).abs() < 1e-15);
        assert!(dynamic_welfare_bound(0.0f64, 0.9, 0.5, 0.0, 0.0).is_err());
        assert!(dynamic_welfare_bound(0.5f64, 1.0, 0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn welfare_gap_pure_correction_floor() {
        // educated action-dominant: gap is 2μ̄ − 1
        let p = crate::model::ModelParams::<f64>::new(0.5, 0.7, 0.7, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9)
            .unwrap();
        let l_e = 3f64.ln(); // μ̄ = 0.75, above λ1 = ψ(0.7)
        let gap = welfare_gap_lower_bound(l_e, &p);
        assert!((gap - 0.5).abs() < 1e-12);
        // signal-dominant: post-break accuracy floor is q1
        let p = crate::model::ModelParams::<f64>::new(0.5, 0.6, 0.9, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9)
            .unwrap();
        let gap = welfare_gap_lower_bound(-1.0, &p);
        let mu_bar = crate::model::folded_posterior(1.0f64);
        assert!((gap - (0.9 - (1.0 - mu_bar))).abs() < 1e-12);
    }

    #[test]
    fn subsidy_rule_validation() {
        let costs = uniform();
        assert!(SubsidyRule::Flat(0.5).validate(&costs).is_ok());
        assert!(SubsidyRule::Flat(1.5).validate(&costs).is_err());
        assert!(SubsidyRule::Myopic { eta: 0.0 }.validate(&costs).is_err());
        assert!(SubsidyRule::TargetBreak {
            pi_bar: 0.5,
            p_star: 0.4
        }
        .validate(&costs)
        .is_err());
    }
}
