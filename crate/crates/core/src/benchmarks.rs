//! Homogeneous-precision baseline: rational vs. naive belief dynamics.
//!
//! Both observers watch the same action sequence. The rational one learns
//! from actions only while they reflect signals and freezes once a cascade
//! starts; the naive one treats every action as an independent signal of
//! perceived accuracy `q̂` and keeps adding `±ψ(q̂)` forever. Cascade onset
//! is strict: a regime is action-dominant only when `|L| > Λ` beyond the
//! tolerance, so boundary histories still follow signals.

use rand::Rng;

use crate::error::{ModelError, Result};
use crate::model::log_odds;
use crate::rng::uniform_draw;
use crate::{real, Real};

/// One paired simulation of the two benchmark worlds on a shared signal
/// stream. LLR tracks hold start-of-period values for periods
/// `1..=horizon+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkPath<T> {
    pub theta: bool,
    pub signals: Vec<bool>,
    pub actions_rational: Vec<bool>,
    pub actions_naive: Vec<bool>,
    pub llr_rational: Vec<T>,
    pub llr_naive: Vec<T>,
    /// First period whose start lies in the action-dominant region.
    pub tau_rational: Option<usize>,
    pub tau_naive: Option<usize>,
    /// Signal walk `S_t = Σ_{j≤t} (2s_j − 1)`, `t = 1..=horizon`; equals the
    /// action walk in both worlds pre-cascade.
    pub signal_walk: Vec<i64>,
}

/// Simulates both benchmarks on freshly drawn signals with accuracy `q`
/// given `theta`.
pub fn simulate_benchmark_path<T: Real, R: Rng>(
    theta: bool,
    q: T,
    qhat: T,
    mu0: T,
    horizon: usize,
    eps: T,
    rng: &mut R,
) -> Result<BenchmarkPath<T>> {
    let signals: Vec<bool> = (0..horizon)
        .map(|_| {
            let correct = uniform_draw::<T, R>(rng) < q;
            if correct {
                theta
            } else {
                !theta
            }
        })
        .collect();
    simulate_benchmark_path_from_signals(theta, &signals, q, qhat, mu0, eps)
}

/// Deterministic kernel over a given signal stream; used for matched-pair
/// couplings and cross-checks against the full simulator.
pub fn simulate_benchmark_path_from_signals<T: Real>(
    theta: bool,
    signals: &[bool],
    q: T,
    qhat: T,
    mu0: T,
    eps: T,
) -> Result<BenchmarkPath<T>> {
    let half = real::<T>(0.5);
    for (name, value) in [("q", q), ("qhat", qhat)] {
        if !(value > half && value < T::one()) {
            return Err(ModelError::Domain {
                op: "simulate_benchmark_path",
                reason: format!("{name} = {value} outside (1/2,1)"),
            });
        }
    }
    let prior = log_odds(mu0).map_err(|_| ModelError::Domain {
        op: "simulate_benchmark_path",
        reason: format!("mu0 = {mu0} outside (0,1)"),
    })?;
    let lambda = log_odds(q).expect("validated");
    let lambda_hat = log_odds(qhat).expect("validated");

    let horizon = signals.len();
    let mut path = BenchmarkPath {
        theta,
        signals: signals.to_vec(),
        actions_rational: Vec::with_capacity(horizon),
        actions_naive: Vec::with_capacity(horizon),
        llr_rational: Vec::with_capacity(horizon + 1),
        llr_naive: Vec::with_capacity(horizon + 1),
        tau_rational: None,
        tau_naive: None,
        signal_walk: Vec::with_capacity(horizon),
    };
    let mut l_r = prior;
    let mut l_n = prior;
    let mut walk = 0i64;
    for (idx, &signal) in signals.iter().enumerate() {
        let t = idx + 1;
        path.llr_rational.push(l_r);
        path.llr_naive.push(l_n);
        if path.tau_rational.is_none() && l_r.abs() > lambda + eps {
            path.tau_rational = Some(t);
        }
        if path.tau_naive.is_none() && l_n.abs() > lambda_hat + eps {
            path.tau_naive = Some(t);
        }
        let a_r = if path.tau_rational.is_some() {
            l_r > T::zero()
        } else {
            signal
        };
        let a_n = if path.tau_naive.is_some() {
            l_n > T::zero()
        } else {
            signal
        };
        path.actions_rational.push(a_r);
        path.actions_naive.push(a_n);
        // the rational LLR freezes post-cascade; the naive one never does
        if path.tau_rational.is_none() {
            l_r = l_r + lambda * sign(a_r);
        }
        l_n = l_n + lambda_hat * sign(a_n);
        walk += if signal { 1 } else { -1 };
        path.signal_walk.push(walk);
    }
    path.llr_rational.push(l_r);
    path.llr_naive.push(l_n);
    // onset can also occur exactly at the horizon boundary
    let t = horizon + 1;
    if path.tau_rational.is_none() && l_r.abs() > lambda + eps {
        path.tau_rational = Some(t);
    }
    if path.tau_naive.is_none() && l_n.abs() > lambda_hat + eps {
        path.tau_naive = Some(t);
    }
    Ok(path)
}

/// First-passage periods of the prior-offset signal walk out of the
/// signal-dominant band, for the rational and naive weights.
///
/// `τ = inf{t ≥ 2 : |ψ(μ0) + λ·S_{t−1}| > λ}`, evaluated in LLR units with
/// tolerance `eps`; `s_walk[j]` holds `S_{j+1}`.
pub fn stopping_times<T: Real>(
    s_walk: &[i64],
    mu0: T,
    lambda: T,
    lambdahat: T,
    eps: T,
) -> Result<(Option<usize>, Option<usize>)> {
    let prior = log_odds(mu0).map_err(|_| ModelError::Domain {
        op: "stopping_times",
        reason: format!("mu0 = {mu0} outside (0,1)"),
    })?;
    let first_passage = |weight: T| -> Option<usize> {
        for (idx, &s) in s_walk.iter().enumerate() {
            let l = prior + weight * real::<T>(s as f64);
            if l.abs() > weight + eps {
                return Some(idx + 2);
            }
        }
        None
    };
    Ok((first_passage(lambda), first_passage(lambdahat)))
}

/// Empirical-CDF comparison of paired naive vs. rational stopping times.
#[derive(Debug, Clone, PartialEq)]
pub struct FosdReport<T> {
    pub n_pairs: usize,
    /// Pairs dropped because either time was censored at the horizon.
    pub n_dropped: usize,
    /// Largest value of `F_R(t) − F_N(t)`; positive values violate
    /// "naive cascades earlier".
    pub max_violation: T,
    pub max_violation_at: Option<usize>,
    pub tolerance: T,
    pub exceeds_tolerance: bool,
    /// `(t, F_N(t), F_R(t))` on the pooled support.
    pub cdf_grid: Vec<(usize, T, T)>,
}

/// Compares empirical stopping-time CDFs from matched-pair samples; pairs
/// with a censored member are excluded symmetrically.
pub fn fosd_report<T: Real>(
    samples_naive: &[Option<usize>],
    samples_rational: &[Option<usize>],
    tolerance: T,
) -> Result<FosdReport<T>> {
    if samples_naive.len() != samples_rational.len() {
        return Err(ModelError::Domain {
            op: "fosd_report",
            reason: format!(
                "sample lengths differ: {} vs {}",
                samples_naive.len(),
                samples_rational.len()
            ),
        });
    }
    let mut taus_n = Vec::new();
    let mut taus_r = Vec::new();
    let mut dropped = 0usize;
    for (&n, &r) in samples_naive.iter().zip(samples_rational) {
        match (n, r) {
            (Some(n), Some(r)) => {
                taus_n.push(n);
                taus_r.push(r);
            }
            _ => dropped += 1,
        }
    }
    let n_pairs = taus_n.len();
    let max_t = taus_n
        .iter()
        .chain(taus_r.iter())
        .copied()
        .max()
        .unwrap_or(0);
    let mut cdf_grid = Vec::new();
    let mut max_violation = T::zero();
    let mut max_violation_at = None;
    if n_pairs > 0 {
        let total = real::<T>(n_pairs as f64);
        let mut count_n = 0usize;
        let mut count_r = 0usize;
        let mut hist_n = vec![0usize; max_t + 1];
        let mut hist_r = vec![0usize; max_t + 1];
        for &t in &taus_n {
            hist_n[t] += 1;
        }
        for &t in &taus_r {
            hist_r[t] += 1;
        }
        for t in 0..=max_t {
            count_n += hist_n[t];
            count_r += hist_r[t];
            let f_n = real::<T>(count_n as f64) / total;
            let f_r = real::<T>(count_r as f64) / total;
            cdf_grid.push((t, f_n, f_r));
            let violation = f_r - f_n;
            if violation > max_violation {
                max_violation = violation;
                max_violation_at = Some(t);
            }
        }
    }
    Ok(FosdReport {
        n_pairs,
        n_dropped: dropped,
        max_violation,
        max_violation_at,
        tolerance,
        exceeds_tolerance: max_violation > tolerance,
        cdf_grid,
    })
}

fn sign<T: Real>(action: bool) -> T {
    if action {
        T::one()
    } else {
        -T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-9;

    #[test]
    fn run_of_two_starts_both_cascades_at_three() {
        let path = simulate_benchmark_path_from_signals(
            true,
            &[true, true, false, true],
            0.7f64,
            0.9,
            0.5,
            EPS,
        )
        .unwrap();
        assert_eq!(path.tau_rational, Some(3));
        assert_eq!(path.tau_naive, Some(3));
    }

    #[test]
    fn split_actions_delay_both_cascades() {
        let path = simulate_benchmark_path_from_signals(
            true,
            &[true, false, true, true, true],
            0.7f64,
            0.9,
            0.5,
            EPS,
        )
        .unwrap();
        assert!(path.tau_rational.is_none() || path.tau_rational.unwrap() >= 4);
        assert!(path.tau_naive.is_none() || path.tau_naive.unwrap() >= 4);
        assert_eq!(path.tau_rational, Some(5));
    }

    #[test]
    fn rational_llr_freezes_and_naive_keeps_stepping() {
        let lambda_hat = log_odds(0.9f64).unwrap();
        let path = simulate_benchmark_path_from_signals(
            true,
            &[true, true, true, false, true, false],
            0.7f64,
            0.9,
            0.5,
            EPS,
        )
        .unwrap();
        let tau = path.tau_rational.unwrap();
        let frozen = path.llr_rational[tau - 1];
        for t in tau..=path.signals.len() + 1 {
            assert_eq!(path.llr_rational[t - 1], frozen);
        }
        for t in 1..=path.signals.len() {
            let step = (path.llr_naive[t] - path.llr_naive[t - 1]).abs();
            assert!((step - lambda_hat).abs() < 1e-12);
        }
        // pre-cascade actions equal signals in both worlds
        for t in 0..tau.min(path.tau_naive.unwrap()) - 1 {
            assert_eq!(path.actions_rational[t], path.signals[t]);
            assert_eq!(path.actions_naive[t], path.signals[t]);
        }
    }

    #[test]
    fn stopping_rule_examples() {
        // uninformative prior, two same-direction actions: both stop at t=3
        let (tau_r, tau_n) = stopping_times(&[1, 2], 0.5f64, 1.0, 2.0, EPS).unwrap();
        assert_eq!(tau_r, Some(3));
        assert_eq!(tau_n, Some(3));
        // prior offset of half a weight: one step up is already decisive
        let lambda = 1.0f64;
        let mu0 = crate::model::posterior_from_llr(0.5 * lambda);
        let (tau_r, _) = stopping_times(&[1], mu0, lambda, 2.0, EPS).unwrap();
        assert_eq!(tau_r, Some(2));
        // boundary |offset + S| = 1 is signal-dominant: no cascade
        let mu0 = crate::model::posterior_from_llr(1.0 * lambda);
        let (tau_r, _) = stopping_times(&[0, -1, 0], mu0, lambda, 2.0, EPS).unwrap();
        assert_eq!(tau_r, None);
    }

    #[test]
    fn heavier_perceived_weight_never_stops_later_here() {
        // with both prior offsets inside the unit cell the integer stopping
        // sets coincide, so the naive time is pathwise no later
        let lambda = log_odds(0.7f64).unwrap();
        let lambda_hat = log_odds(0.9f64).unwrap();
        let walks: [&[i64]; 4] = [
            &[1, 2],
            &[-1, -2],
            &[1, 0, -1, -2],
            &[1, 0, 1, 2, 3],
        ];
        for walk in walks {
            let (tau_r, tau_n) = stopping_times(walk, 0.6f64, lambda, lambda_hat, EPS).unwrap();
            match (tau_n, tau_r) {
                (Some(n), Some(r)) => assert!(n <= r, "walk {walk:?}"),
                (None, Some(_)) => panic!("naive censored while rational stopped"),
                _ => {}
            }
        }
    }

    #[test]
    fn fosd_report_on_identical_samples_is_clean() {
        let xs: Vec<Option<usize>> = vec![Some(3), Some(5), Some(3), None, Some(7)];
        let report = fosd_report(&xs, &xs, 0.01f64).unwrap();
        assert_eq!(report.n_pairs, 4);
        assert_eq!(report.n_dropped, 1);
        assert_eq!(report.max_violation, 0.0);
        assert!(!report.exceeds_tolerance);
    }

    #[test]
    fn fosd_report_flags_violations() {
        let naive: Vec<Option<usize>> = vec![Some(5), Some(5), Some(5), Some(5)];
        let rational: Vec<Option<usize>> = vec![Some(3), Some(3), Some(3), Some(3)];
        let report = fosd_report(&naive, &rational, 0.01f64).unwrap();
        assert!(report.max_violation >= 1.0 - 1e-12);
        assert!(report.exceeds_tolerance);
        assert_eq!(report.max_violation_at, Some(3));
    }
}
