//! Public belief recursions along a history.
//!
//! Two LLR tracks are maintained for the same record sequence: the
//! uneducated rule adds a perceived weight for every observed action, while
//! the educated rule adds the correct equilibrium log-likelihood of that
//! action (zero in action-dominant periods, a true signal weight in
//! signal-dominant ones). Under imperfect observability the education flag
//! is replaced by a noisy tag and both rules integrate over it.

use crate::costs::CostModel;
use crate::decision::value_of_education;
use crate::error::{ModelError, Result};
use crate::model::{classify_dominance_unchecked, Dominance, ModelParams};
use crate::welfare::SubsidyRule;
use crate::Real;

/// How education choices appear in the public record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObsMode {
    /// `e_j` is public.
    Perfect,
    /// Only a noisy tag `y_j` of `e_j` is public.
    Imperfect,
}

/// One period of the public record.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodRecord {
    pub action: bool,
    pub education: bool,
    /// Present exactly in imperfect-observability histories.
    pub tag: Option<bool>,
}

impl PeriodRecord {
    pub fn perfect(action: bool, education: bool) -> Self {
        Self {
            action,
            education,
            tag: None,
        }
    }

    pub fn imperfect(action: bool, education: bool, tag: bool) -> Self {
        Self {
            action,
            education,
            tag: Some(tag),
        }
    }
}

/// The ordered public record (1-based periods).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct History {
    records: Vec<PeriodRecord>,
    mode: ObsMode,
}

impl History {
    pub fn empty(mode: ObsMode) -> Self {
        Self {
            records: Vec::new(),
            mode,
        }
    }

    /// Builds a history, checking that tag presence matches the mode.
    pub fn new(records: Vec<PeriodRecord>, mode: ObsMode) -> Result<Self> {
        for (idx, rec) in records.iter().enumerate() {
            check_mode("History::new", rec, mode, idx + 1)?;
        }
        Ok(Self { records, mode })
    }

    /// Perfect-observability history from (action, education) pairs.
    pub fn perfect_from_pairs(pairs: &[(bool, bool)]) -> Self {
        Self {
            records: pairs
                .iter()
                .map(|&(a, e)| PeriodRecord::perfect(a, e))
                .collect(),
            mode: ObsMode::Perfect,
        }
    }

    pub fn push(&mut self, record: PeriodRecord) -> Result<()> {
        check_mode("History::push", &record, self.mode, self.records.len() + 1)?;
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[PeriodRecord] {
        &self.records
    }

    pub fn mode(&self) -> ObsMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Serializes as one `t,a,e[,y]` record per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (idx, rec) in self.records.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}",
                idx + 1,
                rec.action as u8,
                rec.education as u8
            ));
            if let Some(y) = rec.tag {
                out.push_str(&format!(",{}", y as u8));
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `t,a,e[,y]` format; records may be separated by newlines
    /// or semicolons (the inline config form). The mode is inferred from the
    /// field count, which must be consistent across records.
    pub fn parse(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        let mut mode: Option<ObsMode> = None;
        let entries = text
            .split(['\n', ';'])
            .map(str::trim)
            .filter(|s| !s.is_empty());
        for entry in entries {
            let fields: Vec<&str> = entry.split(',').map(str::trim).collect();
            let parse_err = |reason: String| ModelError::Domain {
                op: "History::parse",
                reason,
            };
            let rec_mode = match fields.len() {
                3 => ObsMode::Perfect,
                4 => ObsMode::Imperfect,
                n => {
                    return Err(parse_err(format!(
                        "record `{entry}` has {n} fields, expected 3 (t,a,e) or 4 (t,a,e,y)"
                    )))
                }
            };
            match mode {
                None => mode = Some(rec_mode),
                Some(m) if m != rec_mode => {
                    return Err(parse_err(format!(
                        "record `{entry}` mixes tagged and untagged records"
                    )))
                }
                _ => {}
            }
            let t: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("bad period index in `{entry}`")))?;
            if t != records.len() + 1 {
                return Err(parse_err(format!(
                    "period index {t} out of order (expected {})",
                    records.len() + 1
                )));
            }
            let bit = |s: &str| -> Result<bool> {
                match s {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    _ => Err(parse_err(format!("bad binary field `{s}` in `{entry}`"))),
                }
            };
            let action = bit(fields[1])?;
            let education = bit(fields[2])?;
            let tag = if fields.len() == 4 {
                Some(bit(fields[3])?)
            } else {
                None
            };
            records.push(PeriodRecord {
                action,
                education,
                tag,
            });
        }
        Ok(Self {
            records,
            mode: mode.unwrap_or(ObsMode::Perfect),
        })
    }
}

fn check_mode(op: &'static str, record: &PeriodRecord, mode: ObsMode, period: usize) -> Result<()> {
    let ok = match mode {
        ObsMode::Perfect => record.tag.is_none(),
        ObsMode::Imperfect => record.tag.is_some(),
    };
    if ok {
        Ok(())
    } else {
        Err(ModelError::ModeMismatch {
            op,
            reason: format!("record for period {period} does not match mode {mode:?}"),
        })
    }
}

/// Start-of-period public state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeliefPoint<T> {
    /// Uneducated-rule public LLR.
    pub l_u: T,
    /// Educated-rule public LLR.
    pub l_e: T,
    /// Equilibrium education probability `F(max(ΔV+s, 0))` at this history.
    pub p_edu: T,
    pub dominance_u: Dominance,
    pub dominance_e: Dominance,
}

/// Per-period belief states for periods `1..=len(history)+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefTrack<T> {
    points: Vec<BeliefPoint<T>>,
}

impl<T: Real> BeliefTrack<T> {
    pub fn points(&self) -> &[BeliefPoint<T>] {
        &self.points
    }

    /// State at the start of period `t` (1-based).
    pub fn point(&self, t: usize) -> &BeliefPoint<T> {
        &self.points[t - 1]
    }

    /// State facing the next (not yet realized) agent.
    pub fn last(&self) -> &BeliefPoint<T> {
        self.points.last().expect("track is never empty")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Uneducated-rule increment for a perfectly observed record:
/// `ψ(q̂(e_j))·(2a_j−1)`.
pub fn uneducated_increment<T: Real>(record: &PeriodRecord, params: &ModelParams<T>) -> Result<T> {
    if record.tag.is_some() {
        return Err(ModelError::ModeMismatch {
            op: "uneducated_increment",
            reason: "record carries a tag; use uneducated_increment_io".to_string(),
        });
    }
    let weight = if record.education {
        params.lambda_hat1()
    } else {
        params.lambda_hat0()
    };
    Ok(weight * action_sign(record.action))
}

/// Educated-rule increment for a perfectly observed record.
///
/// The caller supplies the decision-relevant LLRs of agent `j`'s own regime
/// at period `j`. Action-dominant periods carry no information; in
/// signal-dominant periods the action reveals the signal and the increment
/// uses the true accuracy `q^T(e_j)`.
pub fn educated_increment<T: Real>(
    l_u_at_j: T,
    l_e_at_j: T,
    record: &PeriodRecord,
    params: &ModelParams<T>,
) -> Result<T> {
    if record.tag.is_some() {
        return Err(ModelError::ModeMismatch {
            op: "educated_increment",
            reason: "record carries a tag; use educated_increment_io".to_string(),
        });
    }
    let (l_dec, weight, true_weight) = if record.education {
        (l_e_at_j, params.lambda1(), params.lambda1())
    } else {
        (l_u_at_j, params.lambda_hat0(), params.lambda0())
    };
    match classify_dominance_unchecked(l_dec, weight, params.epsilon) {
        Dominance::ActionDominant(_) => Ok(T::zero()),
        Dominance::SignalDominant => Ok(true_weight * action_sign(record.action)),
    }
}

/// Posterior probability that agent `j` educated, given tag `y`.
///
/// Degenerate priors are returned unchanged when the observed tag has zero
/// probability (impossible-tag corner).
pub fn tag_posterior<T: Real>(p_edu: T, rho: T, y: bool) -> T {
    let one = T::one();
    let (num, den) = if y {
        (rho * p_edu, rho * p_edu + (one - rho) * (one - p_edu))
    } else {
        (
            (one - rho) * p_edu,
            (one - rho) * p_edu + rho * (one - p_edu),
        )
    };
    if den > T::zero() {
        num / den
    } else {
        p_edu
    }
}

/// Mixture weight `λ̃_j(y_j) = w_j ψ(q̂(1)) + (1−w_j) ψ(q̂(0))` on action `a_j`.
pub fn mixture_weight<T: Real>(p_edu: T, record: &PeriodRecord, params: &ModelParams<T>) -> Result<T> {
    let y = record.tag.ok_or_else(|| ModelError::ModeMismatch {
        op: "mixture_weight",
        reason: "record has no tag".to_string(),
    })?;
    let w = tag_posterior(p_edu, params.rho, y);
    Ok(w * params.lambda_hat1() + (T::one() - w) * params.lambda_hat0())
}

/// Uneducated-rule increment under imperfect observability:
/// `λ̃_j(y_j)·(2a_j−1)`.
pub fn uneducated_increment_io<T: Real>(
    record: &PeriodRecord,
    p_edu: T,
    params: &ModelParams<T>,
) -> Result<T> {
    Ok(mixture_weight(p_edu, record, params)? * action_sign(record.action))
}

/// Educated-rule increment under imperfect observability.
///
/// Per-regime action likelihoods (deterministic when action-dominant, true
/// signal accuracy when signal-dominant) are mixed with the tag posterior,
/// and the increment is the log ratio of the mixtures across states.
pub fn educated_increment_io<T: Real>(
    l_u_at_j: T,
    l_e_at_j: T,
    record: &PeriodRecord,
    p_edu: T,
    params: &ModelParams<T>,
) -> Result<T> {
    let y = record.tag.ok_or_else(|| ModelError::ModeMismatch {
        op: "educated_increment_io",
        reason: "record has no tag".to_string(),
    })?;
    let w1 = tag_posterior(p_edu, params.rho, y);
    let w0 = T::one() - w1;
    let mut num = T::zero(); // P(a_j | θ=1)
    let mut den = T::zero(); // P(a_j | θ=0)
    for (weight, educated) in [(w0, false), (w1, true)] {
        if weight == T::zero() {
            continue;
        }
        let (l_dec, decision_weight, accuracy) = if educated {
            (l_e_at_j, params.lambda1(), params.q1)
        } else {
            (l_u_at_j, params.lambda_hat0(), params.q0)
        };
        let (lik1, lik0) = match classify_dominance_unchecked(l_dec, decision_weight, params.epsilon)
        {
            Dominance::ActionDominant(fixed) => {
                let hit = if fixed == record.action {
                    T::one()
                } else {
                    T::zero()
                };
                (hit, hit)
            }
            Dominance::SignalDominant => {
                // action equals the signal
                if record.action {
                    (accuracy, T::one() - accuracy)
                } else {
                    (T::one() - accuracy, accuracy)
                }
            }
        };
        num = num + weight * lik1;
        den = den + weight * lik0;
    }
    if num > T::zero() && den > T::zero() {
        Ok((num / den).ln())
    } else {
        // The observed action is impossible under every weighted regime
        // (off-path record); it carries no usable information.
        Ok(T::zero())
    }
}

/// Forward pass producing per-period LLRs, dominance labels, and equilibrium
/// education probabilities along a history.
///
/// `p_edu(t) = F(max(ΔV_t + s_t, 0))` feeds the tag posteriors of later
/// periods in imperfect mode; observers are assumed to know the subsidy
/// policy.
pub fn replay_beliefs<T: Real>(
    history: &History,
    params: &ModelParams<T>,
    cost_model: &CostModel<T>,
    subsidy: &SubsidyRule<T>,
) -> Result<BeliefTrack<T>> {
    params.validate()?;
    let n = history.len();
    let mut points = Vec::with_capacity(n + 1);
    let mut l_u = params.prior_llr();
    let mut l_e = l_u;
    for j in 0..=n {
        let breakdown = value_of_education(l_u, l_e, params);
        let s = subsidy.evaluate(&breakdown, cost_model);
        let cutoff = (breakdown.delta_v + s).max(T::zero());
        let p_edu = cost_model.cdf(cutoff);
        points.push(BeliefPoint {
            l_u,
            l_e,
            p_edu,
            dominance_u: classify_dominance_unchecked(l_u, params.lambda_hat0(), params.epsilon),
            dominance_e: classify_dominance_unchecked(l_e, params.lambda1(), params.epsilon),
        });
        if j < n {
            let record = &history.records()[j];
            let (du, de) = match history.mode() {
                ObsMode::Perfect => (
                    uneducated_increment(record, params)?,
                    educated_increment(l_u, l_e, record, params)?,
                ),
                ObsMode::Imperfect => (
                    uneducated_increment_io(record, p_edu, params)?,
                    educated_increment_io(l_u, l_e, record, p_edu, params)?,
                ),
            };
            l_u = l_u + du;
            l_e = l_e + de;
        }
    }
    Ok(BeliefTrack { points })
}

fn action_sign<T: Real>(action: bool) -> T {
    if action {
        T::one()
    } else {
        -T::one()
    }
}
