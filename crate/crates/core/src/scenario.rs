//! Bundled example system: grid map `u`, localization `w`, lanelet map `x`
//! and planner `y`, monitored by assessment modules `alpha` (localization),
//! `beta` and `delta` (map) and `gamma` (planner), plus a seeded synthetic
//! assessment stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assessors::{evidence_assess, planner_assess, TrajectoryClassification, WindowParams, WindowedFuser};
use crate::engine::AssessmentRecord;
use crate::graph::{AssessmentGraph, DependencyTable, NodeKind, OVERALL, SINK};
use crate::opinion::{BinomialOpinion, DEFAULT_BASE_RATE, DEFAULT_PRIOR_WEIGHT};

pub const STEPS: usize = 1000;
/// Time at which the planner trust and the grid-map opinion change.
pub const SWITCH_AT: f64 = 500.0;
pub const SEED: u64 = 0x5EED_2024;
/// Name of the data-exchange node of the extended example.
pub const POSE: &str = "pose";

fn op(b: f64, d: f64, u: f64) -> BinomialOpinion {
    BinomialOpinion::new(b, d, u, DEFAULT_BASE_RATE).expect("constant opinion is valid")
}

/// Conditional opinion of a node whose parents all work.
pub fn and_on() -> BinomialOpinion {
    op(0.95, 0.02, 0.03)
}

/// Conditional opinion of a node with at least one failed parent.
pub fn and_off() -> BinomialOpinion {
    op(0.02, 0.95, 0.03)
}

pub fn planner_trust_low() -> BinomialOpinion {
    op(0.1, 0.7, 0.2)
}

pub fn planner_trust_high() -> BinomialOpinion {
    op(0.9, 0.0, 0.1)
}

pub fn grid_map_nominal() -> BinomialOpinion {
    op(0.9, 0.05, 0.05)
}

pub fn grid_map_degraded() -> BinomialOpinion {
    op(0.3, 0.3, 0.4)
}

fn build(with_pose: bool) -> AssessmentGraph {
    let mut g = AssessmentGraph::new();
    for n in ["u", "w", "x", "y"] {
        g.add_node(n, NodeKind::Functional).expect("fresh name");
    }
    for n in ["alpha", "beta", "delta", "gamma"] {
        g.add_node(n, NodeKind::Assessment).expect("fresh name");
    }
    for (from, to) in [
        ("u", "y"),
        ("w", "x"),
        ("w", "y"),
        ("x", "y"),
        ("u", "beta"),
        ("w", "beta"),
        ("w", "delta"),
    ] {
        g.add_dependency(from, to).expect("acyclic example");
    }
    for (from, to) in [("alpha", "w"), ("beta", "x"), ("delta", "x"), ("gamma", "y")] {
        g.add_functional_trust(from, to).expect("assessment edge");
    }
    let tables: [(&str, &[&str]); 4] = [
        ("x", &["w"]),
        ("y", &["u", "w", "x"]),
        ("beta", &["u", "w"]),
        ("delta", &["w"]),
    ];
    for (node, parents) in tables {
        g.set_conditional_table(node, DependencyTable::and_shaped(parents, and_on(), and_off()))
            .expect("sized table");
    }
    g.set_conditional_table(
        SINK,
        DependencyTable::new(vec!["y".into()], vec![op(1.0, 0.0, 0.0), op(0.0, 1.0, 0.0)]),
    )
    .expect("sized table");
    for (am, trust) in [
        ("alpha", op(0.85, 0.05, 0.1)),
        ("beta", op(0.8, 0.05, 0.15)),
        ("delta", op(0.7, 0.1, 0.2)),
        ("gamma", planner_trust_low()),
    ] {
        g.add_referral_trust(am, trust).expect("assessment node");
    }
    g.set_expert_default("u", grid_map_nominal()).expect("functional node");
    if with_pose {
        g.insert_data_node("w", POSE).expect("w has children");
    }
    g.finalize().expect("example graph is valid");
    g
}

/// The four-component example graph, finalized.
pub fn example_graph() -> AssessmentGraph {
    build(false)
}

/// The example graph with a data-exchange node carrying `w`'s output.
pub fn extended_graph() -> AssessmentGraph {
    build(true)
}

/// Seeded 1000-step stream. Each step carries `A`'s referral trust in the
/// planner assessor (switching from low to high at `SWITCH_AT`), `A`'s
/// opinion about the grid map (degrading at `SWITCH_AT`), planner, map and
/// localization assessments.
pub fn example_stream() -> Vec<AssessmentRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut fuser = WindowedFuser::new(WindowParams::default()).expect("default parameters");
    let odometry = BinomialOpinion::from_evidence(
        &crate::opinion::Evidence::new(8.0, 1.0, DEFAULT_PRIOR_WEIGHT, DEFAULT_BASE_RATE).expect("valid evidence"),
    );
    let mut out = Vec::with_capacity(STEPS * 6);
    for step in 0..STEPS {
        let t = step as f64;
        let after = t >= SWITCH_AT;
        let trust = if after {
            planner_trust_high()
        } else {
            planner_trust_low()
        };
        out.push(AssessmentRecord::new(t, OVERALL, "gamma", trust));
        let grid = if after { grid_map_degraded() } else { grid_map_nominal() };
        out.push(AssessmentRecord::new(t, OVERALL, "u", grid));

        let n = 20;
        let bad: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.1)).collect();
        let tc = TrajectoryClassification::new(n, &bad, 0.1).expect("valid classification");
        out.push(AssessmentRecord::new(
            t,
            "gamma",
            "y",
            planner_assess(&tc, DEFAULT_BASE_RATE),
        ));

        for am in ["beta", "delta"] {
            let r = rng.gen_range(4..=12) as f64;
            let s = rng.gen_range(0..=3) as f64;
            let o = evidence_assess(r, s, DEFAULT_PRIOR_WEIGHT, DEFAULT_BASE_RATE).expect("non-negative counts");
            out.push(AssessmentRecord::new(t, am, "x", o));
        }

        let hits = rng.gen_range(2..=5) as f64;
        let misses = rng.gen_range(0..=1) as f64;
        let step_opinion = evidence_assess(hits, misses, DEFAULT_PRIOR_WEIGHT, DEFAULT_BASE_RATE).expect("counts");
        let window = fuser.step(&step_opinion, &odometry).expect("non-dogmatic step");
        out.push(AssessmentRecord::new(t, "alpha", "w", window.assessment));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{evaluate_stream, InferenceConfig};

    #[test]
    fn graphs_validate() {
        let g = example_graph();
        assert!(g.validate().is_empty());
        assert_eq!(g.parents(SINK), vec!["y"]);
        let e = extended_graph();
        assert!(e.validate().is_empty());
        assert_eq!(e.kind(POSE), Some(NodeKind::DataExchange));
        assert_eq!(e.parents("x"), vec![POSE]);
        assert_eq!(e.parents(POSE), vec!["w"]);
    }

    #[test]
    fn stream_is_deterministic_and_replays() {
        let s = example_stream();
        assert_eq!(s, example_stream());
        assert_eq!(s.len(), STEPS * 6);
        let traces = evaluate_stream(&example_graph(), &s, &InferenceConfig::default()).unwrap();
        assert_eq!(traces.len(), STEPS);
        let ext = evaluate_stream(&extended_graph(), &s, &InferenceConfig::default()).unwrap();
        assert_eq!(ext.len(), STEPS);
    }
}
