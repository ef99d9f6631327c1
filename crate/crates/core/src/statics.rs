//! Comparative-statics sweeps, regime-boundary jumps, run-length values,
//! and the early-period closed-form table.

use crate::beliefs::{replay_beliefs, History, ObsMode};
use crate::costs::CostModel;
use crate::decision::{early_value_closed_form, value_of_education, ValueCase};
use crate::dynamics::forced_cascade_prefix;
use crate::error::{ModelError, Result};
use crate::model::{log_odds, posterior_from_llr, ModelParams};
use crate::welfare::SubsidyRule;
use crate::{real, Real};

/// Which primitive a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    /// Misspecification wedge `κ0`; the grid holds κ0 values and
    /// `q̂0 = ψ^{-1}(ψ(q0) + κ0)`.
    Kappa0,
    Q1,
    Q0,
    Rho,
    /// Length of an all-uneducated run replacing the history; grid values
    /// must be positive integers.
    RunLength,
}

/// A sweep over one primitive, holding the rest of the environment fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec<T> {
    pub target: SweepTarget,
    /// Strictly increasing grid.
    pub grid: Vec<T>,
    pub base: ModelParams<T>,
    pub history: History,
    pub cost_model: CostModel<T>,
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint<T> {
    pub grid_value: T,
    pub delta_v: T,
    pub case_label: ValueCase,
    /// Set when the value jumped relative to the previous grid point.
    pub jump: bool,
}

/// Threshold for flagging a jump between adjacent grid points.
const JUMP_TOLERANCE: f64 = 1e-9;

/// Evaluates the value of education at the end of the (possibly rebuilt)
/// history for every grid point and flags discontinuities.
pub fn run_sweep<T: Real>(spec: &SweepSpec<T>) -> Result<Vec<SweepPoint<T>>> {
    spec.base.validate()?;
    if spec.grid.is_empty() {
        return Err(ModelError::Domain {
            op: "run_sweep",
            reason: "empty grid".to_string(),
        });
    }
    if spec.grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(ModelError::Domain {
            op: "run_sweep",
            reason: "grid must be strictly increasing".to_string(),
        });
    }
    if spec.target == SweepTarget::Rho && spec.history.mode() != ObsMode::Imperfect {
        return Err(ModelError::Domain {
            op: "run_sweep",
            reason: "rho sweeps need an imperfect-observability history".to_string(),
        });
    }
    let mut points = Vec::with_capacity(spec.grid.len());
    let mut prev: Option<T> = None;
    for &g in &spec.grid {
        let (params, history) = sweep_instance(spec, g)?;
        let track = replay_beliefs(&history, &params, &spec.cost_model, &SubsidyRule::None)?;
        let last = track.last();
        let breakdown = value_of_education(last.l_u, last.l_e, &params);
        let jump = prev
            .map(|p| (breakdown.delta_v - p).abs() > real::<T>(JUMP_TOLERANCE))
            .unwrap_or(false);
        points.push(SweepPoint {
            grid_value: g,
            delta_v: breakdown.delta_v,
            case_label: breakdown.case_label,
            jump,
        });
        prev = Some(breakdown.delta_v);
    }
    Ok(points)
}

fn sweep_instance<T: Real>(spec: &SweepSpec<T>, g: T) -> Result<(ModelParams<T>, History)> {
    let mut params = spec.base;
    let mut history = spec.history.clone();
    match spec.target {
        SweepTarget::Kappa0 => {
            params.qhat0 = posterior_from_llr(params.lambda0() + g);
        }
        SweepTarget::Q1 => params.q1 = g,
        SweepTarget::Q0 => params.q0 = g,
        SweepTarget::Rho => params.rho = g,
        SweepTarget::RunLength => {
            let r = g.to_usize().filter(|&r| real::<T>(r as f64) == g && r >= 1);
            let r = r.ok_or_else(|| ModelError::Domain {
                op: "run_sweep",
                reason: format!("run length {g} is not a positive integer"),
            })?;
            history = forced_cascade_prefix(r, true);
        }
    }
    params.validate()?;
    Ok((params, history))
}

/// Kappa sweep specialization of [`run_sweep`].
pub fn kappa_sweep<T: Real>(spec: &SweepSpec<T>) -> Result<Vec<SweepPoint<T>>> {
    if spec.target != SweepTarget::Kappa0 {
        return Err(ModelError::Domain {
            op: "kappa_sweep",
            reason: format!("target {:?} is not Kappa0", spec.target),
        });
    }
    run_sweep(spec)
}

/// Value jump when the uneducated regime crosses from signal- into
/// action-dominance: `q0 − μ̄^E` on the matching side, `q0 + μ̄^E − 1` on
/// the wrong side.
pub fn regime_jump<T: Real>(q0: T, mu_bar_e: T, signs_match: bool) -> Result<T> {
    let half = real::<T>(0.5);
    for (name, v) in [("q0", q0), ("mu_bar_e", mu_bar_e)] {
        if !(v > half && v < T::one()) {
            return Err(ModelError::Domain {
                op: "regime_jump",
                reason: format!("{name} = {v} outside (1/2,1)"),
            });
        }
    }
    Ok(if signs_match {
        q0 - mu_bar_e
    } else {
        q0 + mu_bar_e - T::one()
    })
}

/// Value of education after an all-uneducated run of length `r` in the
/// pure-correction benchmark at an uninformative prior.
///
/// Computed via the general pipeline (forced prefix, replay, value), not a
/// closed-form table; the `r = 1` value is identically zero because the
/// folded posterior at one true weight equals the signal accuracy.
pub fn run_length_value<T: Real>(r: usize, params: &ModelParams<T>) -> Result<T> {
    if params.q1 != params.q0 {
        return Err(ModelError::Domain {
            op: "run_length_value",
            reason: "pure correction requires q1 = q0".to_string(),
        });
    }
    if (params.mu0 - real::<T>(0.5)).abs() > real::<T>(1e-12) {
        return Err(ModelError::Domain {
            op: "run_length_value",
            reason: format!("prior {} must be 1/2", params.mu0),
        });
    }
    if r == 0 {
        return Err(ModelError::Domain {
            op: "run_length_value",
            reason: "run length must be positive".to_string(),
        });
    }
    let prefix = forced_cascade_prefix(r, true);
    let track = replay_beliefs(&prefix, params, &CostModel::uniform(T::one())?, &SubsidyRule::None)?;
    let last = track.last();
    Ok(value_of_education(last.l_u, last.l_e, params).delta_v)
}

/// Run lengths that cascades require: rational needs `r > |ψ(μ0)|/λ + 1`,
/// naive needs `r > |ψ(μ0)|/λ̂ + 1`.
pub fn run_length_thresholds<T: Real>(mu0: T, lambda: T, lambdahat: T) -> Result<(T, T)> {
    let prior = log_odds(mu0).map_err(|_| ModelError::Domain {
        op: "run_length_thresholds",
        reason: format!("mu0 = {mu0} outside (0,1)"),
    })?;
    for (name, v) in [("lambda", lambda), ("lambdahat", lambdahat)] {
        if !(v > T::zero()) {
            return Err(ModelError::Domain {
                op: "run_length_thresholds",
                reason: format!("{name} = {v} must be positive"),
            });
        }
    }
    let b = prior.abs();
    Ok((b / lambda + T::one(), b / lambdahat + T::one()))
}

/// The fourteen two-period prefixes reachable in equilibrium: all
/// `(a1,e1,a2,e2)` combinations except the two where an uneducated agent 2
/// defies the strict cascade formed by an educated period 1.
pub fn early_prefixes() -> Vec<History> {
    let mut prefixes = Vec::with_capacity(14);
    for a1 in [false, true] {
        for e1 in [false, true] {
            for a2 in [false, true] {
                for e2 in [false, true] {
                    if e1 && !e2 && a2 != a1 {
                        continue;
                    }
                    prefixes.push(History::perfect_from_pairs(&[(a1, e1), (a2, e2)]));
                }
            }
        }
    }
    prefixes
}

/// One row of [`early_values_table`].
#[derive(Debug, Clone, PartialEq)]
pub struct EarlyTableRow<T> {
    /// Compact prefix encoding, e.g. `a1e0;a0e1` (`-` for the empty prefix).
    pub prefix: String,
    pub t: usize,
    /// Closed-form value; absent when the closed form's hypotheses fail at
    /// these parameters (reported, not asserted).
    pub delta_v_closed: Option<T>,
    pub delta_v_pipeline: T,
    /// `F(max(ΔV,0))` from the pipeline value.
    pub education_probability: T,
}

fn encode_prefix(history: &History) -> String {
    if history.is_empty() {
        return "-".to_string();
    }
    history
        .records()
        .iter()
        .map(|r| format!("a{}e{}", r.action as u8, r.education as u8))
        .collect::<Vec<_>>()
        .join(";")
}

/// Tabulates closed-form vs. pipeline values of education and the implied
/// education probability over every prefix of length ≤ 2 at an
/// uninformative prior.
pub fn early_values_table<T: Real>(
    params: &ModelParams<T>,
    cost_model: &CostModel<T>,
) -> Result<Vec<EarlyTableRow<T>>> {
    params.validate()?;
    let mut prefixes = vec![History::perfect_from_pairs(&[])];
    for a1 in [false, true] {
        for e1 in [false, true] {
            prefixes.push(History::perfect_from_pairs(&[(a1, e1)]));
        }
    }
    prefixes.extend(early_prefixes());
    let mut rows = Vec::with_capacity(prefixes.len());
    for prefix in prefixes {
        let t = prefix.len() + 1;
        let closed = match early_value_closed_form(t, &prefix, params) {
            Ok(v) => Some(v),
            Err(ModelError::Domain { .. }) => None,
            Err(e) => return Err(e),
        };
        let track = replay_beliefs(&prefix, params, cost_model, &SubsidyRule::None)?;
        let last = track.last();
        let delta_v = value_of_education(last.l_u, last.l_e, params).delta_v;
        rows.push(EarlyTableRow {
            prefix: encode_prefix(&prefix),
            t,
            delta_v_closed: closed,
            delta_v_pipeline: delta_v,
            education_probability: cost_model.cdf(delta_v.max(T::zero())),
        });
    }
    Ok(rows)
}

/// One point plus its finite-difference value derivative at fixed regime
/// classification; used by comparative-statics checks.
pub fn central_difference<T: Real>(
    f: impl Fn(T) -> Result<T>,
    x: T,
    step: T,
) -> Result<T> {
    let hi = f(x + step)?;
    let lo = f(x - step)?;
    Ok((hi - lo) / (real::<T>(2.0) * step))
}
