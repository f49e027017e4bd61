//! Reference assessment modules: trajectory-planner scoring, track-record
//! evidence, and a short-term/long-term sliding-window fuser compared
//! against a reference opinion.

use std::collections::VecDeque;

use thiserror::Error;

use crate::operators::{cumulative_fuse, cumulative_unfuse, decay, degree_of_conflict, OperatorError};
use crate::opinion::{BinomialOpinion, Evidence, OpinionError, DEFAULT_BASE_RATE, DEFAULT_PRIOR_WEIGHT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AssessorError {
    #[error("trajectory has no points")]
    EmptyTrajectory,
    #[error("point index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("assessment uncertainty {0} outside [0, 1]")]
    InvalidUncertainty(f64),
    #[error("window length must be at least 1")]
    EmptyWindow,
    #[error("step opinion must not be dogmatic")]
    DogmaticStep,
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Opinion(#[from] OpinionError),
}

/// Planner trajectory points flagged functional or nonfunctional.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryClassification {
    nonfunctional: Vec<bool>,
    uncertainty: f64,
}

impl TrajectoryClassification {
    pub fn new(n: usize, nonfunctional_indices: &[usize], uncertainty: f64) -> Result<Self, AssessorError> {
        if n == 0 {
            return Err(AssessorError::EmptyTrajectory);
        }
        if !(0.0..=1.0).contains(&uncertainty) {
            return Err(AssessorError::InvalidUncertainty(uncertainty));
        }
        let mut nonfunctional = vec![false; n];
        for &index in nonfunctional_indices {
            *nonfunctional
                .get_mut(index)
                .ok_or(AssessorError::IndexOutOfRange { index, n })? = true;
        }
        Ok(Self {
            nonfunctional,
            uncertainty,
        })
    }

    pub fn len(&self) -> usize {
        self.nonfunctional.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nonfunctional.is_empty()
    }

    pub fn uncertainty(&self) -> f64 {
        self.uncertainty
    }
}

/// Scores a trajectory: point `i` of `n` weighs `(n - i)/n`, so early points
/// dominate; the non-uncertain mass splits by weighted share of functional
/// and nonfunctional points.
pub fn planner_assess(tc: &TrajectoryClassification, base_rate: f64) -> BinomialOpinion {
    let n = tc.len() as f64;
    let (mut functional, mut nonfunctional) = (0.0, 0.0);
    for (i, &bad) in tc.nonfunctional.iter().enumerate() {
        let w = (n - i as f64) / n;
        if bad {
            nonfunctional += w;
        } else {
            functional += w;
        }
    }
    let total = functional + nonfunctional;
    let mass = 1.0 - tc.uncertainty;
    BinomialOpinion::normalized(
        mass * functional / total,
        mass * nonfunctional / total,
        tc.uncertainty,
        base_rate,
    )
}

/// Opinion from a track record of `correct` and `incorrect` classifications.
pub fn evidence_assess(
    correct: f64,
    incorrect: f64,
    prior_weight: f64,
    base_rate: f64,
) -> Result<BinomialOpinion, AssessorError> {
    let ev = Evidence::new(correct, incorrect, prior_weight, base_rate)?;
    Ok(BinomialOpinion::from_evidence(&ev))
}

/// Turns a degree of conflict between two opinions into an opinion: belief is
/// agreement and disbelief is conflict, both scaled by joint certainty.
pub fn conflict_to_opinion(dc: f64, x: &BinomialOpinion, y: &BinomialOpinion, base_rate: f64) -> BinomialOpinion {
    let dc = dc.clamp(0.0, 1.0);
    let certainty = (1.0 - x.u()) * (1.0 - y.u());
    BinomialOpinion::normalized((1.0 - dc) * certainty, dc * certainty, 1.0 - certainty, base_rate)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowParams {
    /// Short-term window length; `usize::MAX` never evicts.
    pub window_len: usize,
    /// Evidence decay applied to the long-term opinion per eviction.
    pub decay: f64,
    pub prior_weight: f64,
    pub base_rate: f64,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self {
            window_len: 10,
            decay: 0.95,
            prior_weight: DEFAULT_PRIOR_WEIGHT,
            base_rate: DEFAULT_BASE_RATE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowOutput {
    /// Assessment derived from the conflict between ST and the reference.
    pub assessment: BinomialOpinion,
    pub reference_conflict: f64,
    /// Conflict between the short- and long-term opinions (auxiliary).
    pub st_lt_conflict: f64,
}

/// Short-term/long-term sliding-window fuser.
///
/// New step opinions are fused into the short-term (ST) opinion; once the
/// window is full the oldest one is unfused from ST and fused into the decayed
/// long-term (LT) opinion.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedFuser {
    params: WindowParams,
    window: VecDeque<BinomialOpinion>,
    st: BinomialOpinion,
    lt: BinomialOpinion,
}

impl WindowedFuser {
    pub fn new(params: WindowParams) -> Result<Self, AssessorError> {
        if params.window_len == 0 {
            return Err(AssessorError::EmptyWindow);
        }
        if !(params.decay > 0.0 && params.decay <= 1.0) {
            return Err(OperatorError::InvalidDecay(params.decay).into());
        }
        Evidence::new(0.0, 0.0, params.prior_weight, params.base_rate)?;
        let vacuous = BinomialOpinion::vacuous(params.base_rate);
        Ok(Self {
            params,
            window: VecDeque::new(),
            st: vacuous,
            lt: vacuous,
        })
    }

    pub fn params(&self) -> &WindowParams {
        &self.params
    }

    pub fn short_term(&self) -> &BinomialOpinion {
        &self.st
    }

    pub fn long_term(&self) -> &BinomialOpinion {
        &self.lt
    }

    pub fn window(&self) -> impl Iterator<Item = &BinomialOpinion> {
        self.window.iter()
    }

    pub fn step(&mut self, step: &BinomialOpinion, reference: &BinomialOpinion) -> Result<WindowOutput, AssessorError> {
        if step.is_dogmatic() {
            return Err(AssessorError::DogmaticStep);
        }
        let w = self.params.prior_weight;
        self.st = cumulative_fuse(&self.st, step);
        self.window.push_back(*step);
        if self.window.len() > self.params.window_len {
            let evicted = self.window.pop_front().expect("window is non-empty");
            self.st = cumulative_unfuse(&self.st, &evicted, w)?;
            self.lt = cumulative_fuse(&decay(&self.lt, self.params.decay, w)?, &evicted);
        }
        let reference_conflict = degree_of_conflict(&self.st, reference);
        Ok(WindowOutput {
            assessment: conflict_to_opinion(reference_conflict, &self.st, reference, self.params.base_rate),
            reference_conflict,
            st_lt_conflict: degree_of_conflict(&self.st, &self.lt),
        })
    }
}
