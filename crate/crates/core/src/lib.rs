//! Constructive snowflake embeddings of finite doubling metric spaces.
//!
//! Given a finite metric space `(E, d)`, an exponent `alpha` in `(2/3, 1)`,
//! and a scale parameter `tau`, the builder produces `F : E -> R^N` with
//!
//! ```text
//! (tau^5 / 8) d(x, y)^alpha <= |F(x) - F(y)| <= 5 N tau^(-2(1 - alpha)) d(x, y)^alpha
//! ```
//!
//! where `N = 2 chi m` depends only on the doubling constant (through the
//! palette size `chi` and component dimension `m`), not on `alpha`. The
//! [`verify`] module certifies the bounds and every intermediate inequality
//! of the construction on all pairs.
//!
//! The geometry is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what file I/O and the pipeline use.

pub mod embed;
pub mod error;
pub mod instances;
pub mod io;
pub mod metric;
pub mod nets;
pub mod pipeline;
mod scalar;
pub mod verify;

pub use embed::{
    build_embedding, bump, candidate_vectors, forbidden_centers, select_vector, validate_params,
    AssignmentKey, Direction, EmbeddingMap, Params, VectorAssignment,
};
pub use error::{Error, Result, TauInequality};
pub use instances::{generate_instance, load_instance, InstanceKind};
pub use metric::{
    covering_bound, estimate_doubling_constant, DoublingEstimate, FiniteMetricSpace, ProbePolicy,
};
pub use nets::{build_ladder, build_levels, greedy_color, maximal_net, neighbor_count, NetLevel, ScaleLadder};
pub use pipeline::{run_pipeline, InstanceSource, PipelineOutcome, RunConfig};
pub use scalar::Scalar;
pub use verify::{
    check_lipschitz_levels, check_net_invariants, check_separation, check_tail_and_sup,
    pairwise_distortion, verify_all, DistortionReport, ReferenceEvaluator, Violation,
};

pub type MetricSpace = FiniteMetricSpace<f64>;
pub type Ladder = ScaleLadder<f64>;
pub type Level = NetLevel<f64>;
pub type Parameters = Params<f64>;
pub type Embedding = EmbeddingMap<f64>;
pub type Doubling = DoublingEstimate<f64>;
