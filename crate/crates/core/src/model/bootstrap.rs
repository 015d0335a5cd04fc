//! Checker for the absorption argument `X ≤ a + b X^θ ⇒ X ≤ θa/(θ-1)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapVerdict {
    pub a: f64,
    pub b: f64,
    pub theta: f64,
    /// `(1 - 1/θ) (θ b)^{-1/θ}`; smallness requires `a` strictly below it.
    pub smallness_threshold: f64,
    /// `(θ b)^{-1/(θ-1)}`; bound on `X(0)`.
    pub initial_threshold: f64,
    /// `θ a / (θ - 1)`.
    pub conclusion_bound: f64,
    pub smallness: bool,
    pub initial_condition: bool,
    pub self_bound: bool,
    /// First sample violating `X ≤ a + b X^θ`.
    pub self_bound_violation: Option<usize>,
    /// `None` when the hypotheses are not met and no conclusion is claimed.
    pub conclusion_holds: Option<bool>,
    /// First sample violating the conclusion, if any.
    pub conclusion_violation: Option<usize>,
}

impl BootstrapVerdict {
    pub fn hypotheses_met(&self) -> bool {
        self.smallness && self.initial_condition && self.self_bound
    }

    pub fn passed(&self) -> bool {
        self.conclusion_holds == Some(true)
    }
}

/// Checks the hypotheses of the absorption lemma on sampled `(t, X(t))`
/// and, when they hold, the conclusion on every sample.
pub fn bootstrap_check(a: f64, b: f64, theta: f64, samples: &[(f64, f64)]) -> Result<BootstrapVerdict> {
    if samples.is_empty() {
        return Err(Error::Empty("bootstrap check needs at least one sample".into()));
    }
    if !(a > 0.0 && b > 0.0 && theta > 1.0) {
        return Err(Error::Domain(format!(
            "need a, b > 0 and θ > 1, got a = {a}, b = {b}, θ = {theta}"
        )));
    }
    if samples.iter().any(|&(_, x)| !(x >= 0.0)) {
        return Err(Error::Domain("samples must be nonnegative".into()));
    }

    let smallness_threshold = (1.0 - 1.0 / theta) * (theta * b).powf(-1.0 / theta);
    let initial_threshold = (theta * b).powf(-1.0 / (theta - 1.0));
    let conclusion_bound = theta * a / (theta - 1.0);

    let smallness = a < smallness_threshold;
    let initial_condition = samples[0].1 <= initial_threshold;
    let self_bound_violation = samples
        .iter()
        .position(|&(_, x)| x > a + b * x.powf(theta));
    let self_bound = self_bound_violation.is_none();

    let (conclusion_holds, conclusion_violation) = if smallness && initial_condition && self_bound {
        let v = samples.iter().position(|&(_, x)| x > conclusion_bound);
        (Some(v.is_none()), v)
    } else {
        (None, None)
    };

    Ok(BootstrapVerdict {
        a,
        b,
        theta,
        smallness_threshold,
        initial_threshold,
        conclusion_bound,
        smallness,
        initial_condition,
        self_bound,
        self_bound_violation,
        conclusion_holds,
        conclusion_violation,
    })
}

/// Smallest `a` for which `X ≤ a + b X^θ` holds on every sample
/// (`max (X - b X^θ)`, floored at the smallest positive float).
pub fn fit_offset(b: f64, theta: f64, samples: &[(f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|&(_, x)| x - b * x.powf(theta))
        .fold(f64::MIN_POSITIVE, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passing_example() {
        let xs: Vec<_> = (0..5).map(|i| (i as f64, 0.35)).collect();
        let v = bootstrap_check(0.3, 1.0, 2.0, &xs).unwrap();
        assert!((v.smallness_threshold - 0.5 / 2f64.sqrt()).abs() < 1e-15);
        assert!(v.smallness && v.initial_condition && v.self_bound);
        assert!((v.conclusion_bound - 0.6).abs() < 1e-15);
        assert!(v.passed());
    }

    #[test]
    fn initial_condition_fails() {
        let xs = vec![(0.0, 0.9), (1.0, 0.35)];
        let v = bootstrap_check(0.3, 1.0, 2.0, &xs).unwrap();
        assert!(!v.initial_condition);
        assert!(!v.hypotheses_met());
        assert_eq!(v.conclusion_holds, None);
    }

    #[test]
    fn smallness_boundary() {
        let xs = vec![(0.0, 0.1)];
        let threshold = bootstrap_check(0.1, 1.0, 2.0, &xs).unwrap().smallness_threshold;
        let v = bootstrap_check(threshold, 1.0, 2.0, &xs).unwrap();
        assert!(!v.smallness);
        let below = bootstrap_check(threshold * (1.0 - 1e-15), 1.0, 2.0, &xs).unwrap();
        assert!(below.smallness);
        let v = bootstrap_check(0.5, 1.0, 2.0, &xs).unwrap();
        assert!(!v.smallness);
    }

    #[test]
    fn self_bound_violation_reported() {
        let xs = vec![(0.0, 0.1), (1.0, 0.2), (2.0, 0.45)];
        let v = bootstrap_check(0.1, 1.0, 2.0, &xs).unwrap();
        assert_eq!(v.self_bound_violation, Some(1));
        assert_eq!(v.conclusion_holds, None);
    }

    #[test]
    fn errors() {
        assert!(matches!(bootstrap_check(0.1, 1.0, 2.0, &[]), Err(Error::Empty(_))));
        assert!(bootstrap_check(0.1, 1.0, 1.0, &[(0.0, 0.0)]).is_err());
        assert!(bootstrap_check(-0.1, 1.0, 2.0, &[(0.0, 0.0)]).is_err());
    }

    #[test]
    fn fitted_offset_is_tight() {
        let xs = vec![(0.0, 0.01), (1.0, 0.012), (2.0, 0.011)];
        let a = fit_offset(1.0, 3.0, &xs);
        assert!((a - (0.012 - 0.012f64.powi(3))).abs() < 1e-17);
        let v = bootstrap_check(a, 1.0, 3.0, &xs).unwrap();
        assert!(v.passed());
    }
}
