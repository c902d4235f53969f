//! Output-sensitive lower envelopes of line segments in the plane.
//!
//! All coordinates are exact rationals. The central routine is
//! [`merge::merge_envelopes`], which merges `m` x-monotone chains with `n`
//! vertices in total into their lower envelope of `k` vertices in
//! `O(n + m k)` time. [`solver`] builds the segment-level algorithms on top
//! of it, [`workload`] generates reproducible instances and measures them,
//! and [`formats`], [`svg`] and [`cli`] are the file and command-line
//! surface.

pub mod chain;
pub mod cli;
pub mod formats;
pub mod geom;
pub mod merge;
pub mod solver;
pub mod svg;
pub mod workload;

pub use chain::{validate_chain, Diagnostic, Edge, EdgeKind, Envelope, Rule};
pub use geom::{Point, Rational, Segment, SourceId};
pub use merge::{merge_envelopes, select_initial_active, MergeCounters, MergeOutcome};
pub use solver::{
    envelope_bruteforce, envelope_divide_conquer, envelope_output_sensitive, envelope_size,
    partition_segments, RunReport, SegmentSet,
};
