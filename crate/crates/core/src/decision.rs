//! Decision rules: the accuracy functional, the value-of-education
//! statistic, the education cutoff, the threshold action rule, and the
//! cascade flip probability.

use crate::beliefs::History;
use crate::error::{ModelError, Result};
use crate::model::{
    classify_dominance_unchecked, folded_posterior, posterior_from_llr, Dominance, ModelParams,
};
use crate::{real, Real};

/// Threshold best reply `a = 1{L + Λ(2s−1) ≥ 0}`.
///
/// An index within `eps` of zero is an exact indifference; the agent then
/// follows the signal, which keeps boundary histories signal-dominant and
/// the realized action distribution consistent with
/// [`crate::model::classify_dominance`].
pub fn action_choice<T: Real>(l_dec: T, lambda: T, signal: bool, eps: T) -> bool {
    let index = l_dec + lambda * if signal { T::one() } else { -T::one() };
    if index > eps {
        true
    } else if index < -eps {
        false
    } else {
        signal
    }
}

/// Ex-ante probability that the threshold rule `(L_dec, Λ)` matches the
/// state, when the true public LLR is `L_true` and the private signal has
/// true accuracy `r`.
///
/// Computed by exact enumeration over states and signals, so boundary
/// histories need no special-casing; away from boundaries it reduces to the
/// folded posterior (action-dominant, matching signs), its complement
/// (mismatched signs), or `r` (signal-dominant).
pub fn accuracy<T: Real>(l_dec: T, lambda: T, l_true: T, r: T, eps: T) -> Result<T> {
    if !(lambda > T::zero()) {
        return Err(ModelError::Domain {
            op: "accuracy",
            reason: format!("decision weight {lambda} must be positive"),
        });
    }
    let half = real::<T>(0.5);
    if !(r > half && r < T::one()) {
        return Err(ModelError::Domain {
            op: "accuracy",
            reason: format!("signal accuracy {r} outside (1/2,1)"),
        });
    }
    Ok(accuracy_unchecked(l_dec, lambda, l_true, r, eps))
}

pub(crate) fn accuracy_unchecked<T: Real>(l_dec: T, lambda: T, l_true: T, r: T, eps: T) -> T {
    let p_state1 = posterior_from_llr(l_true);
    let mut acc = T::zero();
    for state in [false, true] {
        let p_state = if state { p_state1 } else { T::one() - p_state1 };
        for signal in [false, true] {
            let p_signal = if signal == state { r } else { T::one() - r };
            if action_choice(l_dec, lambda, signal, eps) == state {
                acc = acc + p_state * p_signal;
            }
        }
    }
    acc
}

/// Regime pair classification attached to a [`ValueBreakdown`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueCase {
    BothSignal,
    EducatedActionOnly,
    UneducatedActionOnly,
    BothActionSameSign,
    BothActionOppositeSign,
}

impl std::fmt::Display for ValueCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::BothSignal => "BothSignal",
            Self::EducatedActionOnly => "EducatedActionOnly",
            Self::UneducatedActionOnly => "UneducatedActionOnly",
            Self::BothActionSameSign => "BothAction_SameSign",
            Self::BothActionOppositeSign => "BothAction_OppositeSign",
        };
        f.write_str(s)
    }
}

/// The two accuracies behind the value of education at a history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueBreakdown<T> {
    pub acc_educated: T,
    pub acc_uneducated: T,
    /// `acc_educated − acc_uneducated`; may be negative and is not clamped,
    /// so comparative statics can observe sign changes. The education rule
    /// clamps implicitly by comparing against nonnegative costs.
    pub delta_v: T,
    pub case_label: ValueCase,
}

/// Accuracy gain from switching to the educated rule at public state
/// `(L_U, L_E)`: the educated agent decides with `(L_E, ψ(q1))` and signal
/// accuracy `q1`, the uneducated with `(L_U, ψ(q̂0))` and accuracy `q0`,
/// both evaluated under the true public LLR `L_E`.
pub fn value_of_education<T: Real>(l_u: T, l_e: T, params: &ModelParams<T>) -> ValueBreakdown<T> {
    let eps = params.epsilon;
    let acc_educated = accuracy_unchecked(l_e, params.lambda1(), l_e, params.q1, eps);
    let acc_uneducated = accuracy_unchecked(l_u, params.lambda_hat0(), l_e, params.q0, eps);
    let dom_u = classify_dominance_unchecked(l_u, params.lambda_hat0(), eps);
    let dom_e = classify_dominance_unchecked(l_e, params.lambda1(), eps);
    let case_label = match (dom_u, dom_e) {
        (Dominance::SignalDominant, Dominance::SignalDominant) => ValueCase::BothSignal,
        (Dominance::SignalDominant, Dominance::ActionDominant(_)) => ValueCase::EducatedActionOnly,
        (Dominance::ActionDominant(_), Dominance::SignalDominant) => {
            ValueCase::UneducatedActionOnly
        }
        (Dominance::ActionDominant(a_u), Dominance::ActionDominant(a_e)) => {
            if a_u == a_e {
                ValueCase::BothActionSameSign
            } else {
                ValueCase::BothActionOppositeSign
            }
        }
    };
    ValueBreakdown {
        acc_educated,
        acc_uneducated,
        delta_v: acc_educated - acc_uneducated,
        case_label,
    }
}

/// Cutoff rule: educate iff the realized cost is below `ΔV + s`, with the
/// tie broken toward not educating.
pub fn education_choice<T: Real>(delta_v: T, cost: T, subsidy: T) -> bool {
    cost < delta_v + subsidy
}

/// Probability that an educated agent takes the anti-cascade action at an
/// incorrect uneducated cascade: 1 when the educated regime is
/// action-dominant, else `q1`.
pub fn flip_probability<T: Real>(l_u: T, l_e: T, params: &ModelParams<T>) -> Result<T> {
    let dom_u = classify_dominance_unchecked(l_u, params.lambda_hat0(), params.epsilon);
    let incorrect = dom_u.is_action_dominant()
        && l_e != T::zero()
        && (l_u > T::zero()) != (l_e > T::zero());
    if !incorrect {
        return Err(ModelError::Domain {
            op: "flip_probability",
            reason: format!("(L_U={l_u}, L_E={l_e}) is not an incorrect uneducated cascade"),
        });
    }
    match classify_dominance_unchecked(l_e, params.lambda1(), params.epsilon) {
        Dominance::ActionDominant(_) => Ok(T::one()),
        Dominance::SignalDominant => Ok(params.q1),
    }
}

/// Early-period closed forms for the value of education at an uninformative
/// prior (`μ0 = 1/2`), used as an independent oracle against
/// [`value_of_education`].
///
/// `t = 1`: `q1 − q0`. `t = 2`: `q1 − q0` if `e1 = 0`, else 0. `t = 3`:
/// `q1 − q0` on split actions; on a run with `e1 = e2 = 0`, `q1 − μ̄(2λ0)`
/// when `2λ0 < λ1` and 0 otherwise; 0 on a run once someone educated.
pub fn early_value_closed_form<T: Real>(
    t: usize,
    prefix: &History,
    params: &ModelParams<T>,
) -> Result<T> {
    let err = |reason: String| {
        Err(ModelError::Domain {
            op: "early_value_closed_form",
            reason,
        })
    };
    if (params.mu0 - real::<T>(0.5)).abs() > real::<T>(1e-12) {
        return err(format!("prior {} must be 1/2", params.mu0));
    }
    if prefix.mode() != crate::beliefs::ObsMode::Perfect {
        return err("prefix must be perfectly observed".to_string());
    }
    if prefix.len() != t - 1 {
        return err(format!(
            "prefix length {} does not match period {t}",
            prefix.len()
        ));
    }
    let precision_gain = params.q1 - params.q0;
    match t {
        1 => Ok(precision_gain),
        2 => {
            let r1 = prefix.records()[0];
            Ok(if r1.education {
                T::zero()
            } else {
                precision_gain
            })
        }
        3 => {
            let r1 = prefix.records()[0];
            let r2 = prefix.records()[1];
            if r1.education && !r2.education && r2.action != r1.action {
                return err(
                    "prefix unreachable: an uneducated follower defies a strict cascade"
                        .to_string(),
                );
            }
            if r1.action != r2.action {
                // split actions must leave the uneducated regime signal-dominant
                let weight = |e: bool| {
                    if e {
                        params.lambda_hat1()
                    } else {
                        params.lambda_hat0()
                    }
                };
                let sign = |a: bool| if a { T::one() } else { -T::one() };
                let l_u3 = weight(r1.education) * sign(r1.action)
                    + weight(r2.education) * sign(r2.action);
                if classify_dominance_unchecked(l_u3, params.lambda_hat0(), params.epsilon)
                    .is_action_dominant()
                {
                    return err(
                        "hypotheses fail: a cascade already formed on split actions".to_string(),
                    );
                }
                Ok(precision_gain)
            } else if !r1.education && !r2.education {
                let two_lambda0 = real::<T>(2.0) * params.lambda0();
                if two_lambda0 < params.lambda1() {
                    Ok(params.q1 - folded_posterior(two_lambda0))
                } else {
                    Ok(T::zero())
                }
            } else {
                Ok(T::zero())
            }
        }
        _ => err(format!("period {t} outside the closed-form range 1..=3")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::log_odds;

    fn params() -> ModelParams<f64> {
        ModelParams::<f64>::new(0.5, 0.6, 0.8, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9).unwrap()
    }

    #[test]
    fn action_rule_thresholds_and_ties() {
        assert!(action_choice(0.0, 1.0, true, 1e-9));
        assert!(action_choice(-1.0, 1.0, true, 1e-9)); // index exactly 0
        assert!(!action_choice(-1.5, 1.0, true, 1e-9));
        assert!(!action_choice(1.0, 1.0, false, 1e-9)); // tied index follows s=0
        assert!(action_choice(1.0 + 1e-6, 1.0, false, 1e-9));
    }

    #[test]
    fn action_rule_is_monotone() {
        let eps = 1e-9;
        for lambda in [0.3, 1.0, 2.5] {
            let mut prev = false;
            for k in -40..=40 {
                let l = 0.1 * k as f64;
                let a0 = action_choice(l, lambda, false, eps);
                let a1 = action_choice(l, lambda, true, eps);
                assert!(a1 >= a0, "increasing in the signal");
                assert!(a0 >= prev, "increasing in the public LLR");
                prev = a0;
            }
        }
    }

    #[test]
    fn accuracy_examples() {
        let eps = 1e-9;
        // signal-dominant: accuracy is the signal accuracy
        let acc = accuracy(0.2f64, 1.0, 5.0, 0.7, eps).unwrap();
        assert!((acc - 0.7).abs() < 1e-15);
        // action-dominant, matching signs: folded posterior of the truth
        let acc = accuracy(2.0f64, 1.0, 1.5, 0.7, eps).unwrap();
        assert!((acc - 0.8175744761936437).abs() < 1e-12);
        // action-dominant, mismatched signs: the complement
        let acc = accuracy(2.0f64, 1.0, -1.5, 0.7, eps).unwrap();
        assert!((acc - 0.18242552380635635).abs() < 1e-12);
        assert!(accuracy(0.0f64, 0.0, 0.0, 0.7, eps).is_err());
        assert!(accuracy(0.0f64, 1.0, 0.0, 0.5, eps).is_err());
    }

    #[test]
    fn value_of_education_cases() {
        let p = params();
        // empty history: both regimes signal-dominant, gain is the precision gap
        let v = value_of_education(0.0, 0.0, &p);
        assert!((v.delta_v - 0.2).abs() < 1e-15);
        assert_eq!(v.case_label, ValueCase::BothSignal);
        assert!((v.delta_v - (v.acc_educated - v.acc_uneducated)).abs() < 1e-15);

        // incorrect cascade under pure correction: ΔV = 2μ̄^E − 1
        let pc = ModelParams::<f64>::new(0.5, 0.7, 0.7, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9).unwrap();
        let l_u = -3.0 * pc.lambda_hat0();
        let v = value_of_education(l_u, 1.0, &pc);
        assert_eq!(v.case_label, ValueCase::BothActionOppositeSign);
        assert!((v.delta_v - 0.46211715726000974).abs() < 1e-12);

        // run of two uneducated actions, dual channel
        let run = ModelParams::<f64>::new(0.5, 0.6, 0.9, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9).unwrap();
        let l_e = 2.0 * run.lambda0();
        let v = value_of_education(2.0 * run.lambda_hat0(), l_e, &run);
        assert_eq!(v.case_label, ValueCase::UneducatedActionOnly);
        assert!((v.delta_v - (0.9 - 0.36 / 0.52)).abs() < 1e-12);
    }

    #[test]
    fn education_cutoff_tie_breaks_to_not_educating() {
        assert!(education_choice(0.2, 0.1, 0.0));
        assert!(!education_choice(0.2, 0.2, 0.0));
        assert!(education_choice(0.1, 0.3, 0.25));
        assert!(!education_choice(-0.1, 0.0, 0.05));
    }

    #[test]
    fn flip_probability_cases() {
        let p = ModelParams::<f64>::new(0.5, 0.6, 0.9, 0.75, 0.95, 0.9, 1.0, 0.9, 1e-9).unwrap();
        let l_u = 3.0 * p.lambda_hat0();
        // educated action-dominant on the opposite side: certain flip
        assert_eq!(flip_probability(l_u, -3.0, &p).unwrap(), 1.0);
        // educated signal-dominant: flips with probability q1
        assert_eq!(flip_probability(l_u, -1.0, &p).unwrap(), 0.9);
        // matching signs: not an incorrect cascade
        assert!(flip_probability(l_u, 1.0, &p).is_err());
        // uneducated regime not action-dominant
        assert!(flip_probability(0.2, -1.0, &p).is_err());
    }

    #[test]
    fn early_closed_forms() {
        let p = ModelParams::<f64>::new(0.5, 0.6, 0.9, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9).unwrap();
        let empty = History::perfect_from_pairs(&[]);
        assert!((early_value_closed_form(1, &empty, &p).unwrap() - 0.3).abs() < 1e-15);

        let e1_0 = History::perfect_from_pairs(&[(true, false)]);
        assert!((early_value_closed_form(2, &e1_0, &p).unwrap() - 0.3).abs() < 1e-15);
        let e1_1 = History::perfect_from_pairs(&[(true, true)]);
        assert_eq!(early_value_closed_form(2, &e1_1, &p).unwrap(), 0.0);

        let run = History::perfect_from_pairs(&[(true, false), (true, false)]);
        let expected = 0.9 - 0.36 / 0.52; // q1 − μ̄(2λ0), since 2λ0 < λ1 here
        assert!((early_value_closed_form(3, &run, &p).unwrap() - expected).abs() < 1e-12);

        let split = History::perfect_from_pairs(&[(true, false), (false, false)]);
        assert!((early_value_closed_form(3, &split, &p).unwrap() - 0.3).abs() < 1e-15);

        let run_edu = History::perfect_from_pairs(&[(true, true), (true, false)]);
        assert_eq!(early_value_closed_form(3, &run_edu, &p).unwrap(), 0.0);

        // wide-precision variant: 2λ0 ≥ λ1 kills the run value
        let wide = ModelParams::<f64>::new(0.5, 0.7, 0.75, 0.8, 0.9, 0.9, 1.0, 0.9, 1e-9).unwrap();
        assert_eq!(early_value_closed_form(3, &run, &wide).unwrap(), 0.0);

        // unreachable prefix: uneducated follower defies a strict cascade
        let bad = History::perfect_from_pairs(&[(true, true), (false, false)]);
        assert!(early_value_closed_form(3, &bad, &p).is_err());

        // hypotheses checks
        let off_prior = ModelParams::<f64>::new(0.6, 0.6, 0.9, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9).unwrap();
        assert!(early_value_closed_form(1, &empty, &off_prior).is_err());
        assert!(early_value_closed_form(2, &empty, &p).is_err());
        assert!(early_value_closed_form(4, &empty, &p).is_err());
    }

    #[test]
    fn accuracy_is_the_lemma_formula_away_from_boundaries() {
        let eps = 1e-9;
        let lambda = log_odds(0.7f64).unwrap();
        for i in -20..=20 {
            for j in -20..=20 {
                let l_dec = 0.21 * i as f64;
                let l_true = 0.19 * j as f64;
                if (l_dec.abs() - lambda).abs() < 1e-6 {
                    continue;
                }
                let expected = if l_dec.abs() > lambda {
                    if (l_dec > 0.0) == (l_true > 0.0) || l_true == 0.0 {
                        folded_posterior(l_true)
                    } else {
                        1.0 - folded_posterior(l_true)
                    }
                } else {
                    0.7
                };
                let got = accuracy(l_dec, lambda, l_true, 0.7, eps).unwrap();
                assert!(
                    (got - expected).abs() < 1e-12,
                    "L_dec={l_dec} L_true={l_true}"
                );
            }
        }
    }
}
