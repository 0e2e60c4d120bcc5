//! Construction of the snowflake embedding.

mod bump;
mod candidates;
mod map;
mod params;

pub use bump::{bump, bump_profile};
pub use candidates::{candidate_vectors, select_vector, CandidateLattice};
pub use map::{
    build_embedding, forbidden_centers, target_sets, AssignmentKey, Direction, EmbeddingMap,
    VectorAssignment,
};
pub use params::{validate_params, Params};
