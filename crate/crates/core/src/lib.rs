pub mod assessors;
pub mod engine;
pub mod graph;
pub mod io;
pub mod operators;
pub mod opinion;
pub mod scenario;

pub use engine::{evaluate_snapshot, evaluate_stream, AssessmentSnapshot, InferenceConfig, InferenceTrace};
pub use graph::{AssessmentGraph, EdgeKind, NodeKind, Violation};
pub use operators::{
    cumulative_fuse, cumulative_unfuse, decay, deduce, degree_of_conflict, multiply_joint, trust_discount,
    ConditionalTable,
};
pub use opinion::{BinomialOpinion, Evidence, MultinomialOpinion, OpinionError};
