//! Education-cost distributions: cdf, density, quantile, truncated first
//! moment, and inverse-transform sampling.

use rand::Rng;

use crate::error::{ModelError, Result};
use crate::rng::uniform_draw;
use crate::{real, Real};

/// Mass cutoff used to cap unbounded supports when a finite upper bound is
/// needed (subsidy feasibility): the effective bound is `quantile(1 - CAP)`.
const UPPER_TAIL_CAP: f64 = 1e-9;

/// A cost distribution family.
///
/// Uniform lives on `[0, fbar]`; the exponential on `[0, ∞)`; the logistic
/// has full-line support, so draws are floored at zero while cutoff
/// probabilities keep the untruncated cdf (negative costs always educate
/// when the cutoff is nonnegative, so the education rule is unchanged).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostModel<T> {
    Uniform { fbar: T },
    Exponential { rate: T },
    Logit { location: T, scale: T },
}

impl<T: Real> CostModel<T> {
    pub fn uniform(fbar: T) -> Result<Self> {
        if !(fbar > T::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "cost.fbar",
                reason: format!("support bound {fbar} must be positive"),
            });
        }
        Ok(Self::Uniform { fbar })
    }

    pub fn exponential(rate: T) -> Result<Self> {
        if !(rate > T::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "cost.rate",
                reason: format!("rate {rate} must be positive"),
            });
        }
        Ok(Self::Exponential { rate })
    }

    pub fn logit(location: T, scale: T) -> Result<Self> {
        if !(scale > T::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "cost.scale",
                reason: format!("scale {scale} must be positive"),
            });
        }
        Ok(Self::Logit { location, scale })
    }

    /// Cumulative distribution function, clamped to `[0,1]`.
    pub fn cdf(&self, x: T) -> T {
        let zero = T::zero();
        let one = T::one();
        match *self {
            Self::Uniform { fbar } => {
                if x <= zero {
                    zero
                } else if x >= fbar {
                    one
                } else {
                    x / fbar
                }
            }
            Self::Exponential { rate } => {
                if x <= zero {
                    zero
                } else {
                    one - (-rate * x).exp()
                }
            }
            Self::Logit { location, scale } => one / (one + (-(x - location) / scale).exp()),
        }
    }

    /// Density of the family (untruncated for logit).
    pub fn pdf(&self, x: T) -> T {
        let zero = T::zero();
        match *self {
            Self::Uniform { fbar } => {
                if x < zero || x > fbar {
                    zero
                } else {
                    T::one() / fbar
                }
            }
            Self::Exponential { rate } => {
                if x < zero {
                    zero
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Self::Logit { scale, .. } => {
                // logistic identity f(x) = F(x)(1−F(x))/s
                let f = self.cdf(x);
                f * (T::one() - f) / scale
            }
        }
    }

    /// Inverse cdf. `p = 1` is only admitted for bounded support.
    pub fn quantile(&self, p: T) -> Result<T> {
        let zero = T::zero();
        let one = T::one();
        if !(p >= zero && p <= one) {
            return Err(ModelError::Domain {
                op: "quantile",
                reason: format!("probability {p} outside [0,1]"),
            });
        }
        match *self {
            Self::Uniform { fbar } => Ok(p * fbar),
            Self::Exponential { rate } => {
                if p == one {
                    return Err(ModelError::Domain {
                        op: "quantile",
                        reason: "p = 1 on unbounded support".to_string(),
                    });
                }
                Ok(-(one - p).ln() / rate)
            }
            Self::Logit { location, scale } => {
                if p == one || p == zero {
                    return Err(ModelError::Domain {
                        op: "quantile",
                        reason: "p in {0,1} on full-line support".to_string(),
                    });
                }
                Ok(location + scale * (p / (one - p)).ln())
            }
        }
    }

    /// Truncated first moment `H(x) = ∫₀ˣ u f(u) du` for `x ≥ 0`.
    ///
    /// Uniform and exponential use closed forms; the logistic has none, so it
    /// is integrated by adaptive quadrature at relative tolerance 1e-9.
    pub fn truncated_first_moment(&self, x: T) -> Result<T> {
        let zero = T::zero();
        if !(x >= zero) {
            return Err(ModelError::Domain {
                op: "truncated_first_moment",
                reason: format!("upper limit {x} must be nonnegative"),
            });
        }
        if x == zero {
            return Ok(zero);
        }
        let one = T::one();
        Ok(match *self {
            Self::Uniform { fbar } => {
                let x = x.min(fbar);
                x * x / (real::<T>(2.0) * fbar)
            }
            Self::Exponential { rate } => {
                // (1/θ)(1 − e^{−θx}(1 + θx)); differentiates to x·f(x) and
                // tends to the full mean 1/θ
                (one - (-rate * x).exp() * (one + rate * x)) / rate
            }
            Self::Logit { .. } => {
                let model = *self;
                adaptive_simpson(
                    |u| u * model.pdf(u),
                    zero,
                    x,
                    real::<T>(1e-9),
                )
            }
        })
    }

    /// Inverse-transform draw; logistic draws are floored at zero.
    pub fn sample_cost<R: Rng>(&self, rng: &mut R) -> T {
        let u: T = uniform_draw(rng);
        self.sample_from_uniform(u)
    }

    /// Deterministic kernel behind [`Self::sample_cost`]; exposed so tests
    /// can feed explicit uniform draws.
    pub fn sample_from_uniform(&self, u: T) -> T {
        let zero = T::zero();
        let one = T::one();
        match *self {
            Self::Uniform { fbar } => u * fbar,
            Self::Exponential { rate } => -(one - u).ln() / rate,
            Self::Logit { location, scale } => {
                if u <= zero {
                    zero
                } else {
                    (location + scale * (u / (one - u)).ln()).max(zero)
                }
            }
        }
    }

    /// Finite upper bound usable for subsidy caps: the support end for the
    /// uniform family, else the `1 − 1e-9` quantile.
    pub fn effective_upper(&self) -> T {
        match *self {
            Self::Uniform { fbar } => fbar,
            _ => self
                .quantile(T::one() - real::<T>(UPPER_TAIL_CAP))
                .expect("interior quantile"),
        }
    }
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` with relative tolerance
/// `rel_tol` (absolute floor 1e-300 guards the zero integral).
pub fn adaptive_simpson<T: Real>(f: impl Fn(T) -> T + Copy, a: T, b: T, rel_tol: T) -> T {
    fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
        (b - a) / real::<T>(6.0) * (fa + real::<T>(4.0) * fm + fb)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<T: Real>(
        f: impl Fn(T) -> T + Copy,
        a: T,
        b: T,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: T,
        depth: u32,
    ) -> T {
        let two = real::<T>(2.0);
        let m = (a + b) / two;
        let lm = (a + m) / two;
        let rm = (m + b) / two;
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= real::<T>(15.0) * tol {
            left + right + delta / real::<T>(15.0)
        } else {
            recurse(f, a, m, fa, flm, fm, left, tol / two, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, tol / two, depth - 1)
        }
    }

    if a == b {
        return T::zero();
    }
    let two = real::<T>(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let tol = (whole.abs() * rel_tol).max(real::<T>(1e-300));
    recurse(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_examples() {
        let u = CostModel::uniform(1.0f64).unwrap();
        assert_eq!(u.cdf(0.2), 0.2);
        assert_eq!(u.cdf(-1.0), 0.0);
        assert_eq!(u.cdf(2.0), 1.0);
        let e = CostModel::exponential(2.0f64).unwrap();
        assert_eq!(e.cdf(0.0), 0.0);
        let e1 = CostModel::exponential(1.0f64).unwrap();
        assert!((e1.cdf(2f64.ln()) - 0.5).abs() < 1e-15);
        let l = CostModel::logit(0.0f64, 1.0).unwrap();
        assert!((l.cdf(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let u = CostModel::uniform(1.0f64).unwrap();
        assert!((u.quantile(0.45).unwrap() - 0.45).abs() < 1e-15);
        let e = CostModel::exponential(1.0f64).unwrap();
        assert!((e.quantile(0.5).unwrap() - 2f64.ln()).abs() < 1e-15);
        let l = CostModel::logit(0.0f64, 1.0).unwrap();
        assert_eq!(l.quantile(0.5).unwrap(), 0.0);
        for model in [u, e, l] {
            for p in [0.01, 0.2, 0.5, 0.77, 0.99] {
                let x = model.quantile(p).unwrap();
                assert!((model.cdf(x) - p).abs() < 1e-10, "{model:?} at p={p}");
            }
        }
        assert!(u.quantile(1.5).unwrap_err().to_string().contains("quantile"));
        assert!(e.quantile(1.0).is_err());
        assert_eq!(u.quantile(1.0).unwrap(), 1.0);
    }

    #[test]
    fn truncated_first_moment_closed_forms() {
        let u = CostModel::uniform(1.0f64).unwrap();
        assert!((u.truncated_first_moment(0.4).unwrap() - 0.08).abs() < 1e-15);
        assert_eq!(u.truncated_first_moment(0.0).unwrap(), 0.0);
        // past the support end the integral saturates at the mean
        assert!((u.truncated_first_moment(5.0).unwrap() - 0.5).abs() < 1e-15);
        let e = CostModel::exponential(1.0f64).unwrap();
        assert!((e.truncated_first_moment(1e9).unwrap() - 1.0).abs() < 1e-9);
        assert!(e.truncated_first_moment(-0.1).is_err());
        // full mean of a rate-θ exponential is 1/θ
        let e2 = CostModel::exponential(4.0f64).unwrap();
        assert!((e2.truncated_first_moment(1e9).unwrap() - 0.25).abs() < 1e-9);
        let l = CostModel::logit(0.0f64, 1.0).unwrap();
        assert_eq!(l.truncated_first_moment(0.0).unwrap(), 0.0);
    }

    #[test]
    fn closed_forms_match_quadrature() {
        let u = CostModel::uniform(0.8f64).unwrap();
        let e = CostModel::exponential(1.7f64).unwrap();
        for model in [u, e] {
            for k in 1..=50 {
                let x = 0.05 * k as f64;
                let numeric = adaptive_simpson(|v| v * model.pdf(v), 0.0, x, 1e-12);
                let closed = model.truncated_first_moment(x).unwrap();
                assert!(
                    (numeric - closed).abs() < 1e-9,
                    "{model:?} x={x}: {numeric} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn sampling_kernels() {
        let u = CostModel::uniform(1.0f64).unwrap();
        assert_eq!(u.sample_from_uniform(0.37), 0.37);
        let e = CostModel::exponential(2.0f64).unwrap();
        assert!((e.sample_from_uniform(0.5) - 2f64.ln() / 2.0).abs() < 1e-15);
        // logistic quantile at u=0.2 is ln(0.25) < 0, floored at zero
        let l = CostModel::logit(0.0f64, 1.0).unwrap();
        assert_eq!(l.sample_from_uniform(0.2), 0.0);
        assert!(l.sample_from_uniform(0.9) > 0.0);
    }

    #[test]
    fn h_dominated_by_x_times_cdf() {
        let models = [
            CostModel::uniform(2.0f64).unwrap(),
            CostModel::exponential(0.7f64).unwrap(),
            CostModel::logit(0.3f64, 0.4).unwrap(),
        ];
        for model in models {
            let mut prev = 0.0;
            for k in 0..=40 {
                let x = 0.1 * k as f64;
                let h = model.truncated_first_moment(x).unwrap();
                assert!(h + 1e-12 >= prev, "H must be nondecreasing");
                assert!(h <= x * model.cdf(x) + 1e-12);
                prev = h;
            }
        }
    }

    #[test]
    fn effective_upper_bounds() {
        let u = CostModel::uniform(3.0f64).unwrap();
        assert_eq!(u.effective_upper(), 3.0);
        let e = CostModel::exponential(1.0f64).unwrap();
        let cap = e.effective_upper();
        assert!((e.cdf(cap) - (1.0 - 1e-9)).abs() < 1e-12);
    }
}
