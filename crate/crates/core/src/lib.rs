//! Co-citation topic analysis for mentor-mentee publication records.
//!
//! The pipeline runs, per mentorship pair:
//!
//! 1. [`corpus`] ingests papers and mentorships into an immutable [`CitationIndex`].
//! 2. [`pairgraph`] builds the unweighted co-citation network of the pair's papers.
//! 3. [`community`] finds topic communities by multilevel modularity optimization.
//! 4. [`impact`] allocates topic-specific impact from co-citing papers with fractional
//!    author counting.
//! 5. [`topics`] types topics (primary, secondary, new) and classifies the mentee's
//!    topic-selection strategy.
//! 6. [`distance`] measures the average shortest-path distance between the two
//!    authors' papers.
//! 7. [`career`] accumulates impact over career years.
//!
//! [`stats`] holds the cohort-level statistics, [`synth`] generates planted corpora,
//! and [`pipeline`] wires everything together with caching and report output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod career;
pub mod community;
pub mod corpus;
pub mod distance;
pub mod error;
pub mod impact;
pub mod numeric;
pub mod par;
pub mod pairgraph;
pub mod pipeline;
pub mod profile;
pub mod stats;
pub mod synth;
pub mod topics;

pub use corpus::{CitationIndex, IngestConfig, MentorshipRecord, PaperRecord};
pub use error::{Error, Result};
pub use pairgraph::{Authorship, PairGraph};
