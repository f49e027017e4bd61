//! Opinion value types and the opinion/evidence mapping.
//!
//! A binomial opinion `(b, d, u, a)` states belief, disbelief and uncertainty
//! about one proposition (here: "the component is functional") together with
//! a base rate. Opinions map one-to-one onto Beta evidence `(r, s)` for a
//! fixed prior weight `W`.

use std::fmt;

use thiserror::Error;

/// Slack accepted on `b + d + u = 1` before an input is rejected.
pub const ADDITIVITY_TOLERANCE: f64 = 1e-9;
/// Slack accepted on each component's `[0, 1]` range before clamping.
pub const RANGE_TOLERANCE: f64 = 1e-12;
/// Non-informative prior weight for a binary domain.
pub const DEFAULT_PRIOR_WEIGHT: f64 = 2.0;
/// Base rate for `{functional, non-functional}` when nothing else is known.
pub const DEFAULT_BASE_RATE: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpinionError {
    #[error("non-finite component `{0}`")]
    NonFinite(&'static str),
    #[error("component `{component}` = {value} outside [0, 1]")]
    OutOfRange { component: &'static str, value: f64 },
    #[error("belief, disbelief and uncertainty sum to {sum}, expected 1")]
    Additivity { sum: f64 },
    #[error("base rates sum to {sum}, expected 1")]
    BaseRateAdditivity { sum: f64 },
    #[error("dogmatic opinion (u = 0) has unbounded evidence")]
    Dogmatic,
    #[error("invalid evidence: {0}")]
    InvalidEvidence(&'static str),
    #[error("domain needs at least 2 states, got {0}")]
    DomainTooSmall(usize),
    #[error("belief vector has {beliefs} entries but base rate vector has {base_rates}")]
    DomainMismatch { beliefs: usize, base_rates: usize },
}

fn check_component(name: &'static str, value: f64) -> Result<f64, OpinionError> {
    if !value.is_finite() {
        return Err(OpinionError::NonFinite(name));
    }
    if !(-RANGE_TOLERANCE..=1.0 + RANGE_TOLERANCE).contains(&value) {
        return Err(OpinionError::OutOfRange { component: name, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Opinion over the binary domain `{functional, non-functional}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinomialOpinion {
    b: f64,
    d: f64,
    u: f64,
    a: f64,
}

impl BinomialOpinion {
    /// Validates and normalizes `(b, d, u, a)`.
    ///
    /// Components may stray from `[0, 1]` by `1e-12` and the triple may miss
    /// additivity by `1e-9`; the result is clamped and rescaled so that
    /// `b + d + u == 1`.
    pub fn new(b: f64, d: f64, u: f64, a: f64) -> Result<Self, OpinionError> {
        let b = check_component("b", b)?;
        let d = check_component("d", d)?;
        let u = check_component("u", u)?;
        let a = check_component("a", a)?;
        let sum = b + d + u;
        if (sum - 1.0).abs() > ADDITIVITY_TOLERANCE {
            return Err(OpinionError::Additivity { sum });
        }
        Ok(Self::normalized(b, d, u, a))
    }

    /// Builds an opinion from values already known to be (nearly) valid,
    /// e.g. operator outputs carrying floating-point drift.
    pub(crate) fn normalized(b: f64, d: f64, u: f64, a: f64) -> Self {
        let b = b.clamp(0.0, 1.0);
        let d = d.clamp(0.0, 1.0);
        let u = u.clamp(0.0, 1.0);
        let a = a.clamp(0.0, 1.0);
        let sum = b + d + u;
        let (b, d) = if sum > 0.0 { (b / sum, d / sum) } else { (0.0, 0.0) };
        let mut u = 1.0 - (b + d);
        let mut d = d;
        if u < 0.0 {
            u = 0.0;
            d = 1.0 - b;
        }
        Self { b, d, u, a }
    }

    /// Maximum-uncertainty opinion `(0, 0, 1, a)`.
    pub fn vacuous(a: f64) -> Self {
        Self::normalized(0.0, 0.0, 1.0, a)
    }

    /// Full-belief opinion `(1, 0, 0, a)`.
    pub fn full_belief(a: f64) -> Self {
        Self::normalized(1.0, 0.0, 0.0, a)
    }

    /// Full-disbelief opinion `(0, 1, 0, a)`.
    pub fn full_disbelief(a: f64) -> Self {
        Self::normalized(0.0, 1.0, 0.0, a)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `P = b + a·u`.
    pub fn projected_probability(&self) -> f64 {
        self.b + self.a * self.u
    }

    pub fn is_dogmatic(&self) -> bool {
        self.u == 0.0
    }

    pub fn is_vacuous(&self) -> bool {
        self.u == 1.0
    }

    pub fn with_base_rate(self, a: f64) -> Self {
        Self::normalized(self.b, self.d, self.u, a)
    }

    /// Maps Beta evidence onto an opinion: `b = r/(r+s+W)`, `d = s/(r+s+W)`,
    /// `u = W/(r+s+W)`.
    pub fn from_evidence(ev: &Evidence) -> Self {
        let total = ev.r + ev.s + ev.prior_weight;
        Self::normalized(ev.r / total, ev.s / total, ev.prior_weight / total, ev.a)
    }

    /// Inverse of [`BinomialOpinion::from_evidence`]: `r = W·b/u`, `s = W·d/u`.
    pub fn to_evidence(&self, prior_weight: f64) -> Result<Evidence, OpinionError> {
        if self.is_dogmatic() {
            return Err(OpinionError::Dogmatic);
        }
        Evidence::new(
            prior_weight * self.b / self.u,
            prior_weight * self.d / self.u,
            prior_weight,
            self.a,
        )
    }

    /// Componentwise distance, max over `b`, `d`, `u`, `a`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        [
            (self.b - other.b).abs(),
            (self.d - other.d).abs(),
            (self.u - other.u).abs(),
            (self.a - other.a).abs(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }
}

impl fmt::Display for BinomialOpinion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(b={:.6}, d={:.6}, u={:.6}, a={:.6})",
            self.b, self.d, self.u, self.a
        )
    }
}

/// Beta evidence for a binomial opinion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evidence {
    pub r: f64,
    pub s: f64,
    pub prior_weight: f64,
    pub a: f64,
}

impl Evidence {
    pub fn new(r: f64, s: f64, prior_weight: f64, a: f64) -> Result<Self, OpinionError> {
        if !(r.is_finite() && s.is_finite() && prior_weight.is_finite() && a.is_finite()) {
            return Err(OpinionError::InvalidEvidence("non-finite value"));
        }
        if r < 0.0 || s < 0.0 {
            return Err(OpinionError::InvalidEvidence("negative evidence count"));
        }
        if prior_weight <= 0.0 {
            return Err(OpinionError::InvalidEvidence("prior weight must be positive"));
        }
        if !(0.0..=1.0).contains(&a) {
            return Err(OpinionError::InvalidEvidence("base rate outside [0, 1]"));
        }
        Ok(Self { r, s, prior_weight, a })
    }

    /// Evidence with the default prior weight and base rate.
    pub fn counts(r: f64, s: f64) -> Result<Self, OpinionError> {
        Self::new(r, s, DEFAULT_PRIOR_WEIGHT, DEFAULT_BASE_RATE)
    }
}

/// Opinion over a domain of `k >= 2` exclusive states.
#[derive(Debug, Clone, PartialEq)]
pub struct MultinomialOpinion {
    belief: Vec<f64>,
    u: f64,
    base_rate: Vec<f64>,
}

impl MultinomialOpinion {
    pub fn new(belief: Vec<f64>, u: f64, base_rate: Vec<f64>) -> Result<Self, OpinionError> {
        if belief.len() < 2 {
            return Err(OpinionError::DomainTooSmall(belief.len()));
        }
        if belief.len() != base_rate.len() {
            return Err(OpinionError::DomainMismatch {
                beliefs: belief.len(),
                base_rates: base_rate.len(),
            });
        }
        let u = check_component("u", u)?;
        let belief = belief
            .into_iter()
            .map(|b| check_component("b", b))
            .collect::<Result<Vec<_>, _>>()?;
        let base_rate = base_rate
            .into_iter()
            .map(|a| check_component("a", a))
            .collect::<Result<Vec<_>, _>>()?;
        let sum = u + belief.iter().sum::<f64>();
        if (sum - 1.0).abs() > ADDITIVITY_TOLERANCE {
            return Err(OpinionError::Additivity { sum });
        }
        let base_sum = base_rate.iter().sum::<f64>();
        if (base_sum - 1.0).abs() > ADDITIVITY_TOLERANCE {
            return Err(OpinionError::BaseRateAdditivity { sum: base_sum });
        }
        Ok(Self { belief, u, base_rate })
    }

    /// Skips validation; callers guarantee additivity by construction.
    pub(crate) fn from_parts(belief: Vec<f64>, u: f64, base_rate: Vec<f64>) -> Self {
        debug_assert_eq!(belief.len(), base_rate.len());
        Self { belief, u, base_rate }
    }

    /// Embeds a binomial opinion as the 2-state multinomial `(T, F)`.
    pub fn from_binomial(op: &BinomialOpinion) -> Self {
        Self::from_parts(vec![op.b(), op.d()], op.u(), vec![op.a(), 1.0 - op.a()])
    }

    pub fn domain_size(&self) -> usize {
        self.belief.len()
    }

    pub fn belief(&self) -> &[f64] {
        &self.belief
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn base_rate(&self) -> &[f64] {
        &self.base_rate
    }

    /// Projected probability of state `k`: `b[k] + a[k]·u`.
    pub fn projected(&self, k: usize) -> f64 {
        self.belief[k] + self.base_rate[k] * self.u
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn op(b: f64, d: f64, u: f64, a: f64) -> BinomialOpinion {
        BinomialOpinion::new(b, d, u, a).unwrap()
    }

    #[test]
    fn make_binomial_examples() {
        let v = op(0.0, 0.0, 1.0, 0.5);
        assert!(v.is_vacuous());
        let full = op(1.0, 0.0, 0.0, 0.5);
        assert!(full.is_dogmatic());
        assert_eq!(full.b(), 1.0);
        assert!(matches!(
            BinomialOpinion::new(0.5, 0.3, 0.4, 0.5),
            Err(OpinionError::Additivity { .. })
        ));
    }

    #[test]
    fn make_binomial_rejects_bad_components() {
        assert_eq!(
            BinomialOpinion::new(f64::NAN, 0.0, 1.0, 0.5),
            Err(OpinionError::NonFinite("b"))
        );
        assert!(matches!(
            BinomialOpinion::new(1.1, -0.1, 0.0, 0.5),
            Err(OpinionError::OutOfRange { component: "b", .. })
        ));
        assert!(matches!(
            BinomialOpinion::new(0.5, 0.5, 0.0, 1.5),
            Err(OpinionError::OutOfRange { component: "a", .. })
        ));
        // within slack: clamped
        let o = op(-1e-13, 0.5, 0.5 + 1e-13, 0.5);
        assert_eq!(o.b(), 0.0);
    }

    #[test]
    fn projected_probability_examples() {
        assert_eq!(op(0.0, 0.0, 1.0, 0.5).projected_probability(), 0.5);
        assert_eq!(op(1.0, 0.0, 0.0, 0.3).projected_probability(), 1.0);
        assert!((op(0.6, 0.2, 0.2, 0.5).projected_probability() - 0.7).abs() < TOL);
    }

    #[test]
    fn from_evidence_examples() {
        let e = |r, s| BinomialOpinion::from_evidence(&Evidence::counts(r, s).unwrap());
        assert!(e(0.0, 0.0).approx_eq(&op(0.0, 0.0, 1.0, 0.5), TOL));
        assert!(e(8.0, 0.0).approx_eq(&op(0.8, 0.0, 0.2, 0.5), TOL));
        assert!(e(4.0, 2.0).approx_eq(&op(0.5, 0.25, 0.25, 0.5), TOL));
    }

    #[test]
    fn to_evidence_examples() {
        let ev = op(0.0, 0.0, 1.0, 0.5).to_evidence(2.0).unwrap();
        assert_eq!((ev.r, ev.s), (0.0, 0.0));
        let ev = op(0.8, 0.0, 0.2, 0.5).to_evidence(2.0).unwrap();
        assert!((ev.r - 8.0).abs() < TOL && ev.s.abs() < TOL);
        let ev = op(0.5, 0.25, 0.25, 0.5).to_evidence(2.0).unwrap();
        assert!((ev.r - 4.0).abs() < TOL && (ev.s - 2.0).abs() < TOL);
        assert_eq!(op(1.0, 0.0, 0.0, 0.5).to_evidence(2.0), Err(OpinionError::Dogmatic));
    }

    #[test]
    fn evidence_validation() {
        assert!(Evidence::new(-1.0, 0.0, 2.0, 0.5).is_err());
        assert!(Evidence::new(1.0, 0.0, 0.0, 0.5).is_err());
        assert!(Evidence::new(1.0, f64::INFINITY, 2.0, 0.5).is_err());
    }

    #[test]
    fn multinomial_validation() {
        assert!(MultinomialOpinion::new(vec![0.5, 0.2], 0.3, vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            MultinomialOpinion::new(vec![0.5, 0.2], 0.2, vec![0.5, 0.5]),
            Err(OpinionError::Additivity { .. })
        ));
        assert!(matches!(
            MultinomialOpinion::new(vec![0.5, 0.2], 0.3, vec![0.5, 0.6]),
            Err(OpinionError::BaseRateAdditivity { .. })
        ));
        assert_eq!(
            MultinomialOpinion::new(vec![1.0], 0.0, vec![1.0]),
            Err(OpinionError::DomainTooSmall(1))
        );
    }

    fn arb_evidence() -> impl Strategy<Value = Evidence> {
        (0.0..1e3f64, 0.0..1e3f64, 0.1..10.0f64, 0.0..=1.0f64)
            .prop_map(|(r, s, w, a)| Evidence::new(r, s, w, a).unwrap())
    }

    proptest! {
        #[test]
        fn evidence_round_trip(ev in arb_evidence()) {
            let back = BinomialOpinion::from_evidence(&ev).to_evidence(ev.prior_weight).unwrap();
            prop_assert!((back.r - ev.r).abs() <= 1e-9 * (1.0 + ev.r));
            prop_assert!((back.s - ev.s).abs() <= 1e-9 * (1.0 + ev.s));
            prop_assert_eq!(back.a, ev.a);
        }

        #[test]
        fn uncertainty_shrinks_with_evidence(ev in arb_evidence(), extra in 1e-3..100.0f64) {
            let more = Evidence::new(ev.r + extra, ev.s, ev.prior_weight, ev.a).unwrap();
            let u0 = BinomialOpinion::from_evidence(&ev).u();
            let u1 = BinomialOpinion::from_evidence(&more).u();
            prop_assert!(u1 < u0);
        }

        #[test]
        fn construction_is_exactly_additive(b in 0.0..1.0f64, d in 0.0..1.0f64, a in 0.0..=1.0f64, jitter in -1e-10..1e-10f64) {
            prop_assume!(b + d <= 1.0);
            let u = 1.0 - b - d + jitter;
            prop_assume!(u >= -1e-12);
            let o = BinomialOpinion::new(b, d, u, a).unwrap();
            prop_assert_eq!(o.b() + o.d() + o.u(), 1.0);
            prop_assert!(o.b() >= 0.0 && o.d() >= 0.0 && o.u() >= 0.0);
        }

        #[test]
        fn projection_bounds(b in 0.0..1.0f64, d in 0.0..1.0f64, a in 0.0..=1.0f64) {
            prop_assume!(b + d <= 1.0);
            let o = BinomialOpinion::new(b, d, 1.0 - b - d, a).unwrap();
            let p = o.projected_probability();
            prop_assert!(p >= o.b() - 1e-15 && p <= o.b() + o.u() + 1e-15);
            prop_assert_eq!(BinomialOpinion::vacuous(a).projected_probability(), a);
        }
    }
}
