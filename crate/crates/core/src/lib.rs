//! Matching researchers to funding calls and forming teams around them.
//!
//! The pipeline: [`ingest`] parses calls, rosters and awards; [`skills`]
//! normalizes free-form keywords; [`matching`] scores calls against people;
//! [`team`] assembles constrained teams; [`workflow`] tracks confirmation;
//! [`evaluation`] and [`taxonomy`] cover retrospective scoring and code
//! mapping.

pub mod evaluation;
pub mod ingest;
pub mod matching;
mod money;
pub mod pipeline;
pub mod scalar;
pub mod skills;
pub mod taxonomy;
pub mod team;
pub mod workflow;

pub use money::Money;
pub use scalar::Scalar;

pub type Vector = matching::SparseVector<f64>;
pub type Embeddings = matching::EmbeddingTable<f64>;
pub type DefaultMatcher<'m> = matching::Matcher<'m, f64>;
