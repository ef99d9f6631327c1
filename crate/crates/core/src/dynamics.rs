//! Equilibrium path simulation and cascade-break experiments.
//!
//! Each period: the agent sees the public state, draws an education cost,
//! educates iff the cost is below the value of education plus any subsidy,
//! draws a private signal at the regime's true accuracy, and acts by the
//! threshold rule of her regime. Replications run on independent
//! counter-indexed random substreams, so results are reproducible and
//! independent of worker count.

use rayon::prelude::*;

use crate::beliefs::{
    educated_increment, educated_increment_io, replay_beliefs, uneducated_increment,
    uneducated_increment_io, BeliefTrack, History, ObsMode, PeriodRecord,
};
use crate::costs::CostModel;
use crate::decision::{action_choice, education_choice, value_of_education};
use crate::error::{ModelError, Result};
use crate::model::{Dominance, ModelParams};
use crate::rng::{substream, uniform_draw, PathRng};
use crate::welfare::SubsidyRule;
use crate::{real, Real};

/// Everything needed to run one batch of simulated paths.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub params: ModelParams<T>,
    pub cost_model: CostModel<T>,
    pub horizon: usize,
    pub n_reps: usize,
    pub mode: ObsMode,
    /// Forced prefix replayed before simulation starts.
    pub initial_history: Option<History>,
    pub subsidy: SubsidyRule<T>,
    pub seed: u64,
    /// Pin the state for conditional experiments; `None` draws
    /// `θ ~ Bernoulli(μ0)` per path.
    pub theta: Option<bool>,
}

impl<T: Real> SimConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.subsidy.validate(&self.cost_model)?;
        if self.horizon == 0 {
            return Err(ModelError::InvalidParameter {
                name: "sim.horizon",
                reason: "horizon must be at least 1".to_string(),
            });
        }
        if self.n_reps == 0 {
            return Err(ModelError::InvalidParameter {
                name: "sim.reps",
                reason: "replication count must be at least 1".to_string(),
            });
        }
        if let Some(history) = &self.initial_history {
            if history.mode() != self.mode {
                return Err(ModelError::ModeMismatch {
                    op: "SimConfig::validate",
                    reason: "initial history mode differs from sim.mode".to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Realized quantities of one simulated period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOutcome<T> {
    /// Global period index (prefix periods included in the count).
    pub t: usize,
    pub cost: T,
    pub delta_v: T,
    pub subsidy: T,
    pub educated: bool,
    pub signal: bool,
    pub action: bool,
    pub tag: Option<bool>,
    /// `1{a_t = θ} − η·F_t·e_t`.
    pub welfare: T,
}

/// Cascade events along a path (global period indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PathEvents {
    /// First period whose start is an incorrect uneducated cascade; forced
    /// prefix periods are scanned too.
    pub incorrect_onset: Option<usize>,
    /// First simulated period whose agent's action differs from the
    /// prevailing (uneducated action-dominant) cascade action. Forced
    /// prefix records are scripted, not behavior, so they never count.
    pub break_period: Option<usize>,
}

/// One simulated equilibrium path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult<T> {
    pub theta: bool,
    /// Forced prefix followed by the simulated records.
    pub history: History,
    pub prefix_len: usize,
    /// Start-of-period states for periods `1..=len(history)+1`; always
    /// equals `replay_beliefs` on the full history.
    pub beliefs: BeliefTrack<T>,
    /// Outcomes for the simulated periods only.
    pub periods: Vec<PeriodOutcome<T>>,
    pub events: PathEvents,
}

/// Simulates one path on the provided stream.
pub fn simulate_path<T: Real>(config: &SimConfig<T>, rng: &mut PathRng) -> Result<PathResult<T>> {
    config.validate()?;
    let params = &config.params;
    let theta = match config.theta {
        Some(theta) => theta,
        None => uniform_draw::<T, _>(rng) < params.mu0,
    };
    let mut history = match &config.initial_history {
        Some(prefix) => prefix.clone(),
        None => History::empty(config.mode),
    };
    let prefix_len = history.len();
    let prefix_track = replay_beliefs(&history, params, &config.cost_model, &config.subsidy)?;
    let mut l_u = prefix_track.last().l_u;
    let mut l_e = prefix_track.last().l_e;

    let mut periods = Vec::with_capacity(config.horizon);
    let mut events = PathEvents::default();
    for t in 1..=prefix_len {
        if detect_incorrect_cascade(&prefix_track, t) {
            events.incorrect_onset = Some(t);
            break;
        }
    }
    let one = T::one();
    for step in 0..config.horizon {
        let t = prefix_len + step + 1;
        let dominance_u = crate::model::classify_dominance_unchecked(
            l_u,
            params.lambda_hat0(),
            params.epsilon,
        );
        let breakdown = value_of_education(l_u, l_e, params);
        let subsidy = config.subsidy.evaluate(&breakdown, &config.cost_model);
        let p_edu = config
            .cost_model
            .cdf((breakdown.delta_v + subsidy).max(T::zero()));

        if events.incorrect_onset.is_none()
            && dominance_u.is_action_dominant()
            && l_e != T::zero()
            && (l_u > T::zero()) != (l_e > T::zero())
        {
            events.incorrect_onset = Some(t);
        }

        let cost = config.cost_model.sample_cost(rng);
        let educated = education_choice(breakdown.delta_v, cost, subsidy);
        let signal_accuracy = if educated { params.q1 } else { params.q0 };
        let signal = if uniform_draw::<T, _>(rng) < signal_accuracy {
            theta
        } else {
            !theta
        };
        let (l_dec, weight) = if educated {
            (l_e, params.lambda1())
        } else {
            (l_u, params.lambda_hat0())
        };
        let action = action_choice(l_dec, weight, signal, params.epsilon);
        let tag = match config.mode {
            ObsMode::Perfect => None,
            ObsMode::Imperfect => {
                let truthful = uniform_draw::<T, _>(rng) < params.rho;
                Some(if truthful { educated } else { !educated })
            }
        };

        if events.break_period.is_none() {
            if let Dominance::ActionDominant(cascade_action) = dominance_u {
                if action != cascade_action {
                    events.break_period = Some(t);
                }
            }
        }

        let welfare =
            (if action == theta { one } else { T::zero() }) - params.eta * cost * indicator(educated);
        let record = PeriodRecord {
            action,
            education: educated,
            tag,
        };
        let (du, de) = match config.mode {
            ObsMode::Perfect => (
                uneducated_increment(&record, params)?,
                educated_increment(l_u, l_e, &record, params)?,
            ),
            ObsMode::Imperfect => (
                uneducated_increment_io(&record, p_edu, params)?,
                educated_increment_io(l_u, l_e, &record, p_edu, params)?,
            ),
        };
        history.push(record)?;
        periods.push(PeriodOutcome {
            t,
            cost,
            delta_v: breakdown.delta_v,
            subsidy,
            educated,
            signal,
            action,
            tag,
            welfare,
        });
        l_u = l_u + du;
        l_e = l_e + de;
    }
    let beliefs = replay_beliefs(&history, params, &config.cost_model, &config.subsidy)?;
    Ok(PathResult {
        theta,
        history,
        prefix_len,
        beliefs,
        periods,
        events,
    })
}

/// Runs `config.n_reps` independent paths in parallel; replication `i`
/// always uses substream `i` of `config.seed`.
pub fn simulate_paths<T: Real>(config: &SimConfig<T>) -> Result<Vec<PathResult<T>>> {
    config.validate()?;
    (0..config.n_reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(config.seed, rep as u64);
            simulate_path(config, &mut rng)
        })
        .collect()
}

/// True iff the start of period `t` is an incorrect uneducated cascade:
/// the uneducated regime is action-dominant and its LLR sign disagrees with
/// a nonzero educated LLR.
pub fn detect_incorrect_cascade<T: Real>(track: &BeliefTrack<T>, t: usize) -> bool {
    let point = track.point(t);
    point.dominance_u.is_action_dominant()
        && point.l_e != T::zero()
        && (point.l_u > T::zero()) != (point.l_e > T::zero())
}

/// A perfectly observed run: `run_length` identical uneducated actions.
///
/// Replaying it yields `L_U = ψ(μ0) ± r·ψ(q̂0)`; educated increments are
/// computed, not assumed, so they truncate to zero from the onset of
/// uneducated action-dominance.
pub fn forced_cascade_prefix(run_length: usize, direction: bool) -> History {
    History::perfect_from_pairs(&vec![(direction, false); run_length])
}

/// Aggregates of a break-time experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct BreakTimeReport<T> {
    pub n_paths: usize,
    pub n_broken: usize,
    /// Paths that reached the horizon without an anti-cascade action.
    pub n_censored: usize,
    /// Paths that left the incorrect-cascade region without breaking
    /// (the educated LLR crossed to the cascade's side).
    pub n_benign_exits: usize,
    /// Mean break time over broken paths (periods since the prefix, 1-based).
    pub mean_break_time: T,
    /// Mean with censored paths counted at the horizon.
    pub mean_break_time_censored: T,
    pub mean_break_time_se: T,
    /// Breaks divided by pre-break simulated periods.
    pub per_period_break_rate: T,
    pub per_period_break_rate_se: T,
    /// Theoretical floor `F(δ + s)·p⋆` (flat subsidies shift the cutoff).
    pub rate_floor: T,
    /// `1 / rate_floor`.
    pub expected_break_time_bound: T,
    /// Empirical survival `P(break time > k)` for `k = 0..=horizon`.
    pub survival: Vec<T>,
}

/// Runs replications from a forced incorrect-cascade prefix and measures
/// break times against the geometric floor `F(δ+s)·p⋆`.
///
/// The maintained hypotheses (`ΔV_t ≥ δ` and flip floor `≥ p⋆`) are
/// validated at every pre-break period at which the incorrect cascade
/// holds; a violation there aborts with `ScenarioInvalid`. Paths whose
/// educated LLR crosses to the cascade side without a break are counted as
/// benign exits and keep running.
pub fn break_time_experiment<T: Real>(
    config: &SimConfig<T>,
    delta: T,
    p_star: T,
) -> Result<BreakTimeReport<T>> {
    config.validate()?;
    if !(delta > T::zero()) {
        return Err(ModelError::Domain {
            op: "break_time_experiment",
            reason: format!("delta = {delta} must be positive"),
        });
    }
    if !(p_star > T::zero() && p_star <= T::one()) {
        return Err(ModelError::Domain {
            op: "break_time_experiment",
            reason: format!("p_star = {p_star} outside (0,1]"),
        });
    }
    let prefix = config.initial_history.clone().unwrap_or_else(|| {
        History::empty(config.mode)
    });
    // Deterministic precheck: the prefix must establish an incorrect cascade
    // at the first simulated period; the maintained hypotheses themselves are
    // validated per period inside each path.
    let prefix_track = replay_beliefs(&prefix, &config.params, &config.cost_model, &config.subsidy)?;
    let start = prefix.len() + 1;
    if !detect_incorrect_cascade(&prefix_track, start) {
        return Err(ModelError::ScenarioInvalid {
            rep: 0,
            period: start,
            reason: "forced prefix does not establish an incorrect cascade".to_string(),
        });
    }

    let tol = real::<T>(1e-12);
    let results: Vec<(Option<usize>, usize, Option<usize>)> = (0..config.n_reps)
        .into_par_iter()
        .map(|rep| -> Result<(Option<usize>, usize, Option<usize>)> {
            let mut rng = substream(config.seed, rep as u64);
            let path = simulate_path(config, &mut rng)?;
            let sim_break = path
                .events
                .break_period
                .map(|t| t - path.prefix_len);
            let mut benign_exit = None;
            let last_checked = match sim_break {
                Some(b) => b,
                None => config.horizon,
            };
            for k in 1..=last_checked {
                let t = path.prefix_len + k;
                if detect_incorrect_cascade(&path.beliefs, t) {
                    let point = path.beliefs.point(t);
                    let breakdown =
                        value_of_education(point.l_u, point.l_e, &config.params);
                    if breakdown.delta_v < delta - tol {
                        return Err(ModelError::ScenarioInvalid {
                            rep,
                            period: t,
                            reason: format!(
                                "maintained hypothesis failed: delta_v = {} < delta = {delta}",
                                breakdown.delta_v
                            ),
                        });
                    }
                    let cascade_action = point
                        .dominance_u
                        .fixed_action()
                        .expect("incorrect cascade is action-dominant");
                    let floor = match point.dominance_e {
                        Dominance::ActionDominant(a) if a != cascade_action => T::one(),
                        Dominance::ActionDominant(_) => T::zero(),
                        Dominance::SignalDominant => config.params.q1,
                    };
                    if floor < p_star - tol {
                        return Err(ModelError::ScenarioInvalid {
                            rep,
                            period: t,
                            reason: format!(
                                "maintained hypothesis failed: flip floor = {floor} < p_star = {p_star}"
                            ),
                        });
                    }
                } else if benign_exit.is_none() {
                    benign_exit = Some(k);
                }
            }
            let periods_run = sim_break.unwrap_or(config.horizon);
            Ok((sim_break, periods_run, benign_exit))
        })
        .collect::<Result<Vec<_>>>()?;

    let n_paths = results.len();
    let horizon = config.horizon;
    let mut broken_times = Vec::new();
    let mut n_benign = 0usize;
    let mut total_periods = 0usize;
    let mut survival_counts = vec![0usize; horizon + 1];
    let mut censored_acc = crate::welfare::Accumulator::<T>::new();
    for &(break_time, periods_run, benign) in &results {
        total_periods += periods_run;
        if benign.is_some() {
            n_benign += 1;
        }
        let effective = break_time.unwrap_or(horizon);
        censored_acc.push(real::<T>(effective as f64));
        if let Some(b) = break_time {
            broken_times.push(b);
        }
        // survival at lag k counts paths that had not broken by period k
        let survive_through = break_time.map(|b| b - 1).unwrap_or(horizon);
        for count in survival_counts.iter_mut().take(survive_through + 1) {
            *count += 1;
        }
    }
    let n_broken = broken_times.len();
    let n_censored = n_paths - n_broken;
    let mean_break_time = if n_broken > 0 {
        real::<T>(broken_times.iter().sum::<usize>() as f64) / real::<T>(n_broken as f64)
    } else {
        T::infinity()
    };
    let rate = if total_periods > 0 {
        real::<T>(n_broken as f64) / real::<T>(total_periods as f64)
    } else {
        T::zero()
    };
    let rate_se = if total_periods > 0 {
        (rate * (T::one() - rate) / real::<T>(total_periods as f64)).sqrt()
    } else {
        T::zero()
    };
    let flat = match config.subsidy {
        SubsidyRule::Flat(s) => s,
        _ => T::zero(),
    };
    let rate_floor = config.cost_model.cdf(delta + flat) * p_star;
    let expected_break_time_bound = if rate_floor > T::zero() {
        T::one() / rate_floor
    } else {
        T::infinity()
    };
    let total = real::<T>(n_paths as f64);
    let survival = survival_counts
        .iter()
        .map(|&c| real::<T>(c as f64) / total)
        .collect();
    Ok(BreakTimeReport {
        n_paths,
        n_broken,
        n_censored,
        n_benign_exits: n_benign,
        mean_break_time,
        mean_break_time_censored: censored_acc.mean(),
        mean_break_time_se: censored_acc.std_error(),
        per_period_break_rate: rate,
        per_period_break_rate_se: rate_se,
        rate_floor,
        expected_break_time_bound,
        survival,
    })
}

fn indicator<T: Real>(flag: bool) -> T {
    if flag {
        T::one()
    } else {
        T::zero()
    }
}

/// The incorrect-cascade scenario used by break-time experiments when no
/// explicit prefix is configured: an opposing prior `ψ(μ0) = −3ψ(q̂0)`, a
/// forced run of six uneducated high actions, and the state pinned to 0.
/// The replayed start state has `L_U = +3ψ(q̂0)` (action-dominant) and
/// `L_E = −3ψ(q̂0) + 3ψ(q0)` (signal-dominant for the parameters below), so
/// the maintained hypotheses hold with ΔV ≈ 0.789 and flip floor `q1`.
pub fn default_break_scenario(seed: u64, n_reps: usize) -> SimConfig<f64> {
    let qhat0 = 0.75f64;
    let lambda_hat0 = (qhat0 / (1.0 - qhat0)).ln();
    let mu0 = 1.0 / (1.0 + (3.0 * lambda_hat0).exp());
    let params = ModelParams::new(
        mu0,
        0.6,
        0.9,
        qhat0,
        0.95,
        0.9,
        1.0,
        0.9,
        crate::model::DEFAULT_EPSILON,
    )
    .expect("valid scenario parameters");
    SimConfig {
        params,
        cost_model: CostModel::uniform(1.0).expect("valid"),
        horizon: 200,
        n_reps,
        mode: ObsMode::Perfect,
        initial_history: Some(forced_cascade_prefix(6, true)),
        subsidy: SubsidyRule::None,
        seed,
        theta: Some(false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::welfare::SubsidyRule;

    fn base_config() -> SimConfig<f64> {
        SimConfig {
            params: ModelParams::<f64>::new(0.5, 0.6, 0.8, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9).unwrap(),
            cost_model: CostModel::uniform(1.0).unwrap(),
            horizon: 20,
            n_reps: 8,
            mode: ObsMode::Perfect,
            initial_history: None,
            subsidy: SubsidyRule::None,
            seed: 17,
            theta: None,
        }
    }

    #[test]
    fn identical_seeds_give_identical_paths() {
        let config = base_config();
        let a = simulate_paths(&config).unwrap();
        let b = simulate_paths(&config).unwrap();
        assert_eq!(a, b);
        // replication i is untouched by the replication count
        let mut more = config.clone();
        more.n_reps = 16;
        let c = simulate_paths(&more).unwrap();
        assert_eq!(a[..], c[..8]);
    }

    #[test]
    fn education_follows_the_cutoff_everywhere() {
        let config = base_config();
        for path in simulate_paths(&config).unwrap() {
            for p in &path.periods {
                assert_eq!(p.educated, p.cost < p.delta_v + p.subsidy);
                let w = (if p.action == path.theta { 1.0 } else { 0.0 })
                    - config.params.eta * p.cost * (p.educated as u8 as f64);
                assert_eq!(p.welfare, w);
            }
        }
    }

    #[test]
    fn pure_correction_never_educates_at_the_origin() {
        // q1 = q0 makes the period-1 value of education exactly zero, and
        // costs have no mass at zero, so nobody educates at t=1
        let mut config = base_config();
        config.params =
            ModelParams::<f64>::new(0.5, 0.7, 0.7, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9).unwrap();
        config.horizon = 1;
        config.n_reps = 500;
        for path in simulate_paths(&config).unwrap() {
            assert_eq!(path.periods[0].delta_v, 0.0);
            assert!(!path.periods[0].educated);
        }
    }

    #[test]
    fn path_beliefs_match_full_replay() {
        let mut config = base_config();
        config.mode = ObsMode::Imperfect;
        config.params.rho = 0.8;
        let paths = simulate_paths(&config).unwrap();
        for path in paths {
            let replayed = replay_beliefs(
                &path.history,
                &config.params,
                &config.cost_model,
                &config.subsidy,
            )
            .unwrap();
            assert_eq!(path.beliefs, replayed);
        }
    }

    #[test]
    fn forced_prefix_replay_values() {
        let params = ModelParams::<f64>::new(0.5, 0.6, 0.9, 0.75, 0.85, 0.9, 1.0, 0.9, 1e-9).unwrap();
        let costs = CostModel::uniform(1.0).unwrap();
        let prefix = forced_cascade_prefix(2, true);
        let track = replay_beliefs(&prefix, &params, &costs, &SubsidyRule::None).unwrap();
        assert!((track.last().l_u - 2.0 * params.lambda_hat0()).abs() < 1e-12);
        assert!((track.last().l_e - 2.0 * params.lambda0()).abs() < 1e-12);
        // single record: one perceived weight
        let prefix = forced_cascade_prefix(1, true);
        let track = replay_beliefs(&prefix, &params, &costs, &SubsidyRule::None).unwrap();
        assert!((track.last().l_u - params.lambda_hat0()).abs() < 1e-12);
        // mirrored direction negates the track
        let prefix = forced_cascade_prefix(2, false);
        let track = replay_beliefs(&prefix, &params, &costs, &SubsidyRule::None).unwrap();
        assert!((track.last().l_u + 2.0 * params.lambda_hat0()).abs() < 1e-12);
        // longer runs freeze the educated increments once action-dominant
        let prefix = forced_cascade_prefix(5, true);
        let track = replay_beliefs(&prefix, &params, &costs, &SubsidyRule::None).unwrap();
        assert!((track.last().l_e - 2.0 * params.lambda0()).abs() < 1e-12);
    }

    #[test]
    fn incorrect_cascade_detection() {
        let scenario = default_break_scenario(3, 1);
        let track = replay_beliefs(
            scenario.initial_history.as_ref().unwrap(),
            &scenario.params,
            &scenario.cost_model,
            &SubsidyRule::None,
        )
        .unwrap();
        assert!(detect_incorrect_cascade(&track, 7));
        assert!(!detect_incorrect_cascade(&track, 1));
        // period 2 is a correct cascade: both tracks point the same way
        let p2 = track.point(2);
        assert!(p2.dominance_u.is_action_dominant());
        assert!((p2.l_u > 0.0) == (p2.l_e > 0.0));
        assert!(!detect_incorrect_cascade(&track, 2));
        // the onset inside the forced prefix is reported on simulated paths
        let mut one_path = scenario.clone();
        one_path.horizon = 3;
        let mut rng = substream(one_path.seed, 0);
        let path = simulate_path(&one_path, &mut rng).unwrap();
        assert_eq!(path.events.incorrect_onset, Some(6));
    }

    #[test]
    fn flat_subsidies_lift_the_rate_floor() {
        let mut config = default_break_scenario(51, 300);
        config.subsidy = SubsidyRule::Flat(0.1);
        let report = break_time_experiment(&config, 0.2, 0.9).unwrap();
        assert!((report.rate_floor - 0.3 * 0.9).abs() < 1e-12);
    }

    #[test]
    fn break_experiment_certain_break_is_immediate() {
        // education certain (cdf(delta)=1 via a tiny support) and educated
        // action-dominant on the opposite side gives p_flip = 1
        let mut config = default_break_scenario(11, 64);
        config.params.q0 = 0.55; // L_E = −3λ̂0 + 3ψ(0.55) < −λ1; educated AD
        config.cost_model = CostModel::uniform(1e-6).unwrap();
        let report = break_time_experiment(&config, 1e-6, 1.0).unwrap();
        assert_eq!(report.n_broken, report.n_paths);
        assert_eq!(report.mean_break_time, 1.0);
        assert_eq!(report.per_period_break_rate, 1.0);
    }

    #[test]
    fn break_experiment_rejects_invalid_scenarios() {
        let mut config = base_config();
        config.initial_history = None; // no cascade at all
        let err = break_time_experiment(&config, 0.2, 0.9).unwrap_err();
        assert!(matches!(err, ModelError::ScenarioInvalid { .. }));
        // hypotheses too strong for the scenario
        let config = default_break_scenario(5, 16);
        let err = break_time_experiment(&config, 0.999, 0.9).unwrap_err();
        assert!(matches!(err, ModelError::ScenarioInvalid { .. }));
        let err = break_time_experiment(&config, 0.2, 0.95).unwrap_err();
        assert!(matches!(err, ModelError::ScenarioInvalid { .. }));
    }

    #[test]
    fn break_experiment_geometric_dominance() {
        // educated action-dominant scenario: every educated agent flips, so
        // the incorrect cascade persists until the break on every path and
        // survival is dominated by the geometric tail of the floor
        let mut config = default_break_scenario(23, 4000);
        config.params.q0 = 0.55;
        let report = break_time_experiment(&config, 0.2, 1.0).unwrap();
        assert_eq!(report.n_benign_exits, 0);
        let floor = 0.2;
        assert!((report.rate_floor - floor).abs() < 1e-12);
        assert!(report.per_period_break_rate >= floor);
        assert!(report.mean_break_time_censored <= report.expected_break_time_bound);
        assert_eq!(report.survival[0], 1.0);
        let n = report.n_paths as f64;
        for (k, &s) in report.survival.iter().enumerate() {
            let bound = (1.0 - floor).powi(k as i32);
            let se = (s * (1.0 - s) / n).sqrt();
            assert!(s <= bound + 3.0 * se + 1e-12, "lag {k}: {s} vs {bound}");
        }
    }

    #[test]
    fn break_experiment_counts_benign_exits() {
        // signal-dominant educated regime: a non-flipping educated agent can
        // push the educated LLR onto the cascade side; those paths are
        // reported as benign exits, not hypothesis violations
        let config = default_break_scenario(23, 4000);
        let report = break_time_experiment(&config, 0.2, 0.9).unwrap();
        assert!((report.rate_floor - 0.18).abs() < 1e-12);
        assert!(report.n_benign_exits > 0);
        assert!(report.per_period_break_rate >= 0.18);
        assert!(report.mean_break_time_censored <= report.expected_break_time_bound);
        assert_eq!(
            report.n_broken + report.n_censored,
            report.n_paths
        );
    }
}
