//! Subjective-logic operators used by the assessment engine.
//!
//! Parent-state combinations are enumerated lexicographically over the parent
//! list with "functional" before "non-functional": for parents `(p0, p1)` the
//! order is `TT, TF, FT, FF`. State index bit `m-1-i` is set when parent `i`
//! is non-functional.

use thiserror::Error;

use crate::opinion::{BinomialOpinion, Evidence, MultinomialOpinion, OpinionError};

/// Negative evidence tolerated by unfusion before it is treated as an error.
pub const UNFUSE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("joint multiplication needs at least one parent")]
    EmptyParents,
    #[error("parent joint has {joint} states but the conditional table has {table}")]
    DimensionMismatch { joint: usize, table: usize },
    #[error("conditional table size {0} is not 2^m for m >= 1")]
    InvalidTableSize(usize),
    #[error("decay factor {0} outside (0, 1]")]
    InvalidDecay(f64),
    #[error("unfusion leaves negative {component} evidence {value}; the removed opinion was never fused")]
    NegativeEvidence { component: &'static str, value: f64 },
    #[error(transparent)]
    Opinion(#[from] OpinionError),
}

/// True when parent `parent` is functional in joint state `state` of `m` parents.
pub fn parent_functional(state: usize, parent: usize, m: usize) -> bool {
    state & (1 << (m - 1 - parent)) == 0
}

/// One conditional opinion per joint parent state, in canonical state order.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    conditionals: Vec<BinomialOpinion>,
}

impl ConditionalTable {
    pub fn new(conditionals: Vec<BinomialOpinion>) -> Result<Self, OperatorError> {
        let k = conditionals.len();
        if k < 2 || !k.is_power_of_two() {
            return Err(OperatorError::InvalidTableSize(k));
        }
        Ok(Self { conditionals })
    }

    /// Table that is functional only when every one of `m` parents is.
    /// `on` is used for the all-functional state, `off` for every other state.
    pub fn and_shaped(m: usize, on: BinomialOpinion, off: BinomialOpinion) -> Self {
        let k = 1usize << m;
        let conditionals = (0..k).map(|s| if s == 0 { on } else { off }).collect();
        Self { conditionals }
    }

    /// Single-parent table passing the parent through unchanged.
    pub fn pass_through(a: f64) -> Self {
        Self {
            conditionals: vec![BinomialOpinion::full_belief(a), BinomialOpinion::full_disbelief(a)],
        }
    }

    pub fn parent_domain_size(&self) -> usize {
        self.conditionals.len()
    }

    pub fn parent_count(&self) -> usize {
        self.conditionals.len().trailing_zeros() as usize
    }

    pub fn conditionals(&self) -> &[BinomialOpinion] {
        &self.conditionals
    }
}

/// Probability-sensitive trust discount: `A`'s derived opinion about `x`
/// given `A`'s referral trust in `B` and `B`'s functional opinion about `x`.
pub fn trust_discount(referral: &BinomialOpinion, functional: &BinomialOpinion) -> BinomialOpinion {
    let p = referral.projected_probability();
    let b = p * functional.b();
    let d = p * functional.d();
    let u = 1.0 - p * (functional.b() + functional.d());
    BinomialOpinion::normalized(b, d, u, functional.a())
}

/// Aleatory cumulative belief fusion.
pub fn cumulative_fuse(x: &BinomialOpinion, y: &BinomialOpinion) -> BinomialOpinion {
    let (ux, uy) = (x.u(), y.u());
    if ux == 0.0 && uy == 0.0 {
        let b = (x.b() + y.b()) / 2.0;
        let a = (x.a() + y.a()) / 2.0;
        return BinomialOpinion::normalized(b, 1.0 - b, 0.0, a);
    }
    let denom = ux + uy - ux * uy;
    let b = (x.b() * uy + y.b() * ux) / denom;
    let u = (ux * uy) / denom;
    let a_denom = ux + uy - 2.0 * ux * uy;
    let a = if a_denom.abs() > f64::EPSILON {
        (x.a() * uy + y.a() * ux - (x.a() + y.a()) * ux * uy) / a_denom
    } else {
        (x.a() + y.a()) / 2.0
    };
    BinomialOpinion::normalized(b, 1.0 - b - u, u, a)
}

/// Removes `removed` from `fused` by subtracting evidence.
///
/// Inverse of [`cumulative_fuse`] for non-dogmatic operands.
pub fn cumulative_unfuse(
    fused: &BinomialOpinion,
    removed: &BinomialOpinion,
    prior_weight: f64,
) -> Result<BinomialOpinion, OperatorError> {
    let ef = fused.to_evidence(prior_weight)?;
    let er = removed.to_evidence(prior_weight)?;
    let r = ef.r - er.r;
    let s = ef.s - er.s;
    if r < -UNFUSE_TOLERANCE {
        return Err(OperatorError::NegativeEvidence {
            component: "positive",
            value: r,
        });
    }
    if s < -UNFUSE_TOLERANCE {
        return Err(OperatorError::NegativeEvidence {
            component: "negative",
            value: s,
        });
    }
    let (r, s) = (r.max(0.0), s.max(0.0));
    let u_rest = prior_weight / (r + s + prior_weight);
    // invert the base-rate fusion for the remaining operand
    let (uf_rest, ur) = (u_rest, removed.u());
    let a_denom = uf_rest + ur - 2.0 * uf_rest * ur;
    let weight = ur * (1.0 - uf_rest);
    let a = if weight > 1e-12 {
        ((fused.a() * a_denom - removed.a() * uf_rest * (1.0 - ur)) / weight).clamp(0.0, 1.0)
    } else {
        fused.a()
    };
    Ok(BinomialOpinion::from_evidence(&Evidence::new(r, s, prior_weight, a)?))
}

/// Scales an opinion's evidence by `lambda`.
pub fn decay(op: &BinomialOpinion, lambda: f64, prior_weight: f64) -> Result<BinomialOpinion, OperatorError> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(OperatorError::InvalidDecay(lambda));
    }
    let ev = op.to_evidence(prior_weight)?;
    if lambda == 1.0 {
        return Ok(*op);
    }
    let scaled = Evidence::new(ev.r * lambda, ev.s * lambda, prior_weight, ev.a)?;
    Ok(BinomialOpinion::from_evidence(&scaled))
}

/// Joint opinion over the product domain of independent binary parents.
///
/// Belief per joint state is the product of the parents' belief (functional)
/// or disbelief (non-functional) masses; `u = 1 - Π(1 - u_i)`.
pub fn multiply_joint(parents: &[BinomialOpinion]) -> Result<MultinomialOpinion, OperatorError> {
    if parents.is_empty() {
        return Err(OperatorError::EmptyParents);
    }
    let m = parents.len();
    let k = 1usize << m;
    let mut belief = Vec::with_capacity(k);
    let mut base_rate = Vec::with_capacity(k);
    for state in 0..k {
        let mut b = 1.0;
        let mut a = 1.0;
        for (i, p) in parents.iter().enumerate() {
            if parent_functional(state, i, m) {
                b *= p.b();
                a *= p.a();
            } else {
                b *= p.d();
                a *= 1.0 - p.a();
            }
        }
        belief.push(b);
        base_rate.push(a);
    }
    let certainty: f64 = parents.iter().map(|p| 1.0 - p.u()).product();
    Ok(MultinomialOpinion::from_parts(belief, 1.0 - certainty, base_rate))
}

/// Deduces a child opinion from a joint parent opinion and a conditional table.
///
/// The projected probability is the total-probability mixture of the
/// conditionals; uncertainty is the weighted conditional uncertainty plus the
/// parent uncertainty scaled by the spread of the conditionals, capped so that
/// belief and disbelief stay non-negative.
pub fn deduce(parent_joint: &MultinomialOpinion, table: &ConditionalTable) -> Result<BinomialOpinion, OperatorError> {
    let k = parent_joint.domain_size();
    if k != table.parent_domain_size() {
        return Err(OperatorError::DimensionMismatch {
            joint: k,
            table: table.parent_domain_size(),
        });
    }
    let mut p_y = 0.0;
    let mut a_y = 0.0;
    let mut u_weighted = 0.0;
    let mut q_max = f64::NEG_INFINITY;
    let mut q_min = f64::INFINITY;
    for (state, cond) in table.conditionals().iter().enumerate() {
        let p_k = parent_joint.projected(state);
        let q_k = cond.projected_probability();
        p_y += p_k * q_k;
        a_y += parent_joint.base_rate()[state] * cond.a();
        u_weighted += p_k * cond.u();
        q_max = q_max.max(q_k);
        q_min = q_min.min(q_k);
    }
    let p_y = p_y.clamp(0.0, 1.0);
    let a_y = a_y.clamp(0.0, 1.0);
    let spread = q_max - q_min;
    let cap_low = if a_y > 0.0 { p_y / a_y } else { 1.0 };
    let cap_high = if a_y < 1.0 { (1.0 - p_y) / (1.0 - a_y) } else { 1.0 };
    let u = (u_weighted + parent_joint.u() * spread)
        .min(cap_low)
        .min(cap_high)
        .min(1.0);
    let b = p_y - a_y * u;
    Ok(BinomialOpinion::normalized(b, 1.0 - b - u, u, a_y))
}

/// Projected distance scaled by conjunctive certainty.
pub fn degree_of_conflict(x: &BinomialOpinion, y: &BinomialOpinion) -> f64 {
    let distance = (x.projected_probability() - y.projected_probability()).abs();
    (distance * (1.0 - x.u()) * (1.0 - y.u())).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOL: f64 = 1e-9;

    fn op(b: f64, d: f64, u: f64, a: f64) -> BinomialOpinion {
        BinomialOpinion::new(b, d, u, a).unwrap()
    }

    fn ev(r: f64, s: f64) -> BinomialOpinion {
        BinomialOpinion::from_evidence(&Evidence::counts(r, s).unwrap())
    }

    fn assert_close(got: &BinomialOpinion, want: &BinomialOpinion, tol: f64) {
        assert!(got.approx_eq(want, tol), "got {got}, want {want}");
    }

    #[test]
    fn trust_discount_examples() {
        let w = op(0.6, 0.2, 0.2, 0.3);
        assert_close(&trust_discount(&op(1.0, 0.0, 0.0, 0.5), &w), &w, TOL);
        assert_close(
            &trust_discount(&op(0.0, 1.0, 0.0, 0.5), &w),
            &op(0.0, 0.0, 1.0, 0.3),
            TOL,
        );
        let got = trust_discount(&op(0.7, 0.1, 0.2, 0.5), &op(0.6, 0.2, 0.2, 0.5));
        assert_close(&got, &op(0.48, 0.16, 0.36, 0.5), TOL);
    }

    #[test]
    fn fuse_examples() {
        let w = op(0.6, 0.2, 0.2, 0.5);
        assert_close(&cumulative_fuse(&w, &BinomialOpinion::vacuous(0.5)), &w, TOL);
        assert_close(&cumulative_fuse(&ev(4.0, 0.0), &ev(0.0, 2.0)), &ev(4.0, 2.0), TOL);
        assert_close(
            &cumulative_fuse(&ev(4.0, 0.0), &ev(0.0, 2.0)),
            &op(0.5, 0.25, 0.25, 0.5),
            TOL,
        );
        let got = cumulative_fuse(&op(1.0, 0.0, 0.0, 0.5), &op(0.0, 1.0, 0.0, 0.5));
        assert_close(&got, &op(0.5, 0.5, 0.0, 0.5), TOL);
    }

    #[test]
    fn fuse_dogmatic_dominates_non_dogmatic() {
        let got = cumulative_fuse(&op(0.7, 0.3, 0.0, 0.4), &op(0.1, 0.1, 0.8, 0.9));
        assert_close(&got, &op(0.7, 0.3, 0.0, 0.4), TOL);
    }

    #[test]
    fn fuse_two_vacuous_with_different_base_rates() {
        let got = cumulative_fuse(&BinomialOpinion::vacuous(0.2), &BinomialOpinion::vacuous(0.6));
        assert_close(&got, &op(0.0, 0.0, 1.0, 0.4), TOL);
    }

    #[test]
    fn unfuse_examples() {
        let w = op(0.6, 0.2, 0.2, 0.5);
        assert_close(
            &cumulative_unfuse(&w, &BinomialOpinion::vacuous(0.5), 2.0).unwrap(),
            &w,
            TOL,
        );
        let x = op(0.3, 0.3, 0.4, 0.5);
        let y = op(0.1, 0.6, 0.3, 0.5);
        let back = cumulative_unfuse(&cumulative_fuse(&x, &y), &y, 2.0).unwrap();
        assert_close(&back, &x, 1e-7);
        let got = cumulative_unfuse(&ev(4.0, 2.0), &ev(4.0, 0.0), 2.0).unwrap();
        assert_close(&got, &op(0.0, 0.5, 0.5, 0.5), TOL);
    }

    #[test]
    fn unfuse_errors() {
        assert!(matches!(
            cumulative_unfuse(&ev(1.0, 0.0), &ev(4.0, 0.0), 2.0),
            Err(OperatorError::NegativeEvidence {
                component: "positive",
                ..
            })
        ));
        assert!(matches!(
            cumulative_unfuse(&op(1.0, 0.0, 0.0, 0.5), &ev(1.0, 0.0), 2.0),
            Err(OperatorError::Opinion(OpinionError::Dogmatic))
        ));
    }

    #[test]
    fn decay_examples() {
        let w = op(0.6, 0.2, 0.2, 0.5);
        assert_eq!(decay(&w, 1.0, 2.0).unwrap(), w);
        let v = BinomialOpinion::vacuous(0.5);
        assert_close(&decay(&v, 0.3, 2.0).unwrap(), &v, TOL);
        let got = decay(&ev(8.0, 0.0), 0.5, 2.0).unwrap();
        assert_close(&got, &op(2.0 / 3.0, 0.0, 1.0 / 3.0, 0.5), TOL);
        assert!(matches!(decay(&w, 0.0, 2.0), Err(OperatorError::InvalidDecay(_))));
        assert!(matches!(decay(&w, 1.5, 2.0), Err(OperatorError::InvalidDecay(_))));
        assert!(decay(&op(1.0, 0.0, 0.0, 0.5), 0.5, 2.0).is_err());
    }

    #[test]
    fn repeated_decay_drifts_to_base_rate() {
        let mut w = ev(30.0, 2.0).with_base_rate(0.3);
        for _ in 0..400 {
            w = decay(&w, 0.9, 2.0).unwrap();
        }
        assert!((w.projected_probability() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn multiply_joint_examples() {
        let single = multiply_joint(&[op(0.6, 0.3, 0.1, 0.4)]).unwrap();
        assert!((single.belief()[0] - 0.6).abs() < 1e-15 && (single.belief()[1] - 0.3).abs() < 1e-15);
        assert!((single.u() - 0.1).abs() < 1e-15);
        assert_eq!(single.base_rate(), &[0.4, 0.6]);

        let point = multiply_joint(&[op(1.0, 0.0, 0.0, 0.5), op(0.0, 1.0, 0.0, 0.5)]).unwrap();
        assert_eq!(point.belief(), &[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(point.u(), 0.0);

        let j = multiply_joint(&[op(0.8, 0.1, 0.1, 0.5), op(0.5, 0.3, 0.2, 0.5)]).unwrap();
        for (got, want) in j.belief().iter().zip([0.40, 0.24, 0.05, 0.03]) {
            assert!((got - want).abs() < TOL);
        }
        assert!((j.u() - 0.28).abs() < TOL);
        assert_eq!(j.base_rate(), &[0.25, 0.25, 0.25, 0.25]);
        assert_eq!(multiply_joint(&[]), Err(OperatorError::EmptyParents));
    }

    #[test]
    fn deduce_examples() {
        let c = op(0.3, 0.5, 0.2, 0.7);
        let table = ConditionalTable::new(vec![c; 4]).unwrap();
        let joint = multiply_joint(&[op(0.8, 0.1, 0.1, 0.5), op(0.5, 0.3, 0.2, 0.5)]).unwrap();
        assert_close(&deduce(&joint, &table).unwrap(), &c, 1e-12);

        let table = ConditionalTable::new(vec![op(0.9, 0.05, 0.05, 0.5), op(0.1, 0.85, 0.05, 0.5)]).unwrap();
        let got = deduce(&multiply_joint(&[op(1.0, 0.0, 0.0, 0.5)]).unwrap(), &table).unwrap();
        assert_close(&got, &op(0.9, 0.05, 0.05, 0.5), TOL);

        let table = ConditionalTable::new(vec![op(1.0, 0.0, 0.0, 0.5), op(0.0, 1.0, 0.0, 0.5)]).unwrap();
        let got = deduce(&multiply_joint(&[BinomialOpinion::vacuous(0.5)]).unwrap(), &table).unwrap();
        assert_close(&got, &BinomialOpinion::vacuous(0.5), TOL);
    }

    #[test]
    fn deduce_dimension_mismatch() {
        let table = ConditionalTable::pass_through(0.5);
        let joint = multiply_joint(&[ev(1.0, 1.0), ev(2.0, 0.0)]).unwrap();
        assert_eq!(
            deduce(&joint, &table),
            Err(OperatorError::DimensionMismatch { joint: 4, table: 2 })
        );
    }

    #[test]
    fn table_size_must_be_power_of_two() {
        let c = BinomialOpinion::vacuous(0.5);
        assert_eq!(
            ConditionalTable::new(vec![c; 3]),
            Err(OperatorError::InvalidTableSize(3))
        );
        assert_eq!(ConditionalTable::new(vec![c]), Err(OperatorError::InvalidTableSize(1)));
        assert_eq!(ConditionalTable::new(vec![c; 8]).unwrap().parent_count(), 3);
    }

    #[test]
    fn pass_through_reproduces_parent() {
        let parent = op(0.55, 0.15, 0.3, 0.5);
        let got = deduce(
            &multiply_joint(&[parent]).unwrap(),
            &ConditionalTable::pass_through(0.5),
        )
        .unwrap();
        assert_close(&got, &parent, TOL);
    }

    #[test]
    fn degree_of_conflict_examples() {
        let w = op(0.6, 0.2, 0.2, 0.5);
        assert_eq!(degree_of_conflict(&w, &w), 0.0);
        assert_eq!(
            degree_of_conflict(&op(1.0, 0.0, 0.0, 0.5), &op(0.0, 1.0, 0.0, 0.5)),
            1.0
        );
        let dc = degree_of_conflict(&op(0.8, 0.1, 0.1, 0.5), &op(0.2, 0.7, 0.1, 0.5));
        assert!((dc - 0.486).abs() < TOL);
    }

    // -- property tests --------------------------------------------------------

    fn arb_opinion() -> impl Strategy<Value = BinomialOpinion> {
        (0.0..=1.0f64, 0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(x, y, a)| {
            let (lo, hi) = if x < y { (x, y) } else { (y, x) };
            BinomialOpinion::normalized(lo, hi - lo, 1.0 - hi, a)
        })
    }

    fn arb_uncertain() -> impl Strategy<Value = BinomialOpinion> {
        (0.0..=1.0f64, 0.01..0.99f64, 0.0..=1.0f64).prop_map(|(split, u, a)| {
            let mass = 1.0 - u;
            BinomialOpinion::normalized(mass * split, mass * (1.0 - split), u, a)
        })
    }

    fn valid(o: &BinomialOpinion) -> bool {
        let parts = [o.b(), o.d(), o.u(), o.a()];
        parts.iter().all(|v| (0.0..=1.0).contains(v)) && (o.b() + o.d() + o.u() - 1.0).abs() <= 1e-12
    }

    proptest! {
        #[test]
        fn discount_degrades(t in arb_opinion(), w in arb_opinion()) {
            let got = trust_discount(&t, &w);
            prop_assert!(valid(&got));
            prop_assert!(got.b() <= w.b() + 1e-15);
            prop_assert!(got.d() <= w.d() + 1e-15);
            prop_assert!(got.u() >= w.u() - 1e-15);
        }

        #[test]
        fn fusion_commutes_and_associates(x in arb_opinion(), y in arb_opinion(), z in arb_uncertain()) {
            let xy = cumulative_fuse(&x, &y);
            prop_assert!(valid(&xy));
            prop_assert!(xy.approx_eq(&cumulative_fuse(&y, &x), 1e-9));
            let left = cumulative_fuse(&xy, &z);
            let right = cumulative_fuse(&x, &cumulative_fuse(&y, &z));
            prop_assert!(left.b() - right.b() < 1e-9 && right.b() - left.b() < 1e-9);
            prop_assert!((left.u() - right.u()).abs() < 1e-9);
        }

        #[test]
        fn fusion_sharpens(x in arb_uncertain(), y in arb_uncertain()) {
            let f = cumulative_fuse(&x, &y);
            prop_assert!(f.u() <= x.u().min(y.u()));
        }

        #[test]
        fn fusion_is_evidence_addition(r1 in 0.0..50.0f64, s1 in 0.0..50.0f64, r2 in 0.0..50.0f64, s2 in 0.0..50.0f64, a in 0.0..=1.0f64) {
            let mk = |r, s| BinomialOpinion::from_evidence(&Evidence::new(r, s, 2.0, a).unwrap());
            let got = cumulative_fuse(&mk(r1, s1), &mk(r2, s2));
            prop_assert!(got.approx_eq(&mk(r1 + r2, s1 + s2), 1e-9));
        }

        #[test]
        fn unfuse_inverts_fuse(x in arb_uncertain(), y in arb_uncertain()) {
            let back = cumulative_unfuse(&cumulative_fuse(&x, &y), &y, 2.0).unwrap();
            prop_assert!(back.approx_eq(&x, 1e-7), "{} vs {}", back, x);
        }

        #[test]
        fn decay_raises_uncertainty(x in arb_uncertain(), lambda in 0.01..=1.0f64) {
            let got = decay(&x, lambda, 2.0).unwrap();
            prop_assert!(valid(&got));
            prop_assert!(got.u() >= x.u() - 1e-12);
        }

        #[test]
        fn joint_matches_enumeration(parents in prop::collection::vec(arb_opinion(), 1..5)) {
            let joint = multiply_joint(&parents).unwrap();
            let m = parents.len();
            let mut mass = 0.0;
            for state in 0..(1usize << m) {
                // independent enumeration: read the state as a list of flags
                let flags: Vec<bool> = (0..m).map(|i| (state >> (m - 1 - i)) & 1 == 0).collect();
                let want: f64 = parents.iter().zip(&flags).map(|(p, &f)| if f { p.b() } else { p.d() }).product();
                prop_assert!((joint.belief()[state] - want).abs() < 1e-15);
                mass += joint.belief()[state];
            }
            prop_assert!((mass + joint.u() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn deduce_total_probability(parents in prop::collection::vec(arb_opinion(), 1..4), seed in prop::collection::vec(arb_opinion(), 8)) {
            let joint = multiply_joint(&parents).unwrap();
            let k = joint.domain_size();
            let table = ConditionalTable::new(seed[..k].to_vec()).unwrap();
            let got = deduce(&joint, &table).unwrap();
            prop_assert!(valid(&got));
            let want: f64 = (0..k).map(|s| joint.projected(s) * table.conditionals()[s].projected_probability()).sum();
            prop_assert!((got.projected_probability() - want).abs() < 1e-9);
        }

        #[test]
        fn deduce_and_shaped_is_monotone(b in 0.0..0.9f64, step in 0.0..0.1f64, u in 0.0..0.1f64, other in arb_opinion()) {
            prop_assume!(b + step + u <= 1.0);
            let table = ConditionalTable::and_shaped(2, BinomialOpinion::normalized(0.9, 0.05, 0.05, 0.5), BinomialOpinion::normalized(0.05, 0.9, 0.05, 0.5));
            let lo = BinomialOpinion::normalized(b, 1.0 - b - u, u, 0.5);
            let hi = BinomialOpinion::normalized(b + step, 1.0 - b - step - u, u, 0.5);
            let p_lo = deduce(&multiply_joint(&[lo, other]).unwrap(), &table).unwrap().projected_probability();
            let p_hi = deduce(&multiply_joint(&[hi, other]).unwrap(), &table).unwrap().projected_probability();
            prop_assert!(p_hi >= p_lo - 1e-12);
        }

        #[test]
        fn conflict_is_bounded(x in arb_opinion(), y in arb_opinion()) {
            let dc = degree_of_conflict(&x, &y);
            prop_assert!((0.0..=1.0).contains(&dc));
            prop_assert!((dc - degree_of_conflict(&y, &x)).abs() < 1e-15);
        }
    }
}
