//! Lower envelopes of arbitrary segment sets.
//!
//! Three routes to the same canonical [`Envelope`]:
//!
//! * [`envelope_bruteforce`]: the definition, evaluated between every pair of
//!   consecutive critical abscissae. Cubic; meant as a test oracle.
//! * [`envelope_divide_conquer`]: recursive halving, joined with two-chain
//!   merges.
//! * [`envelope_output_sensitive`]: guesses the output size with the doubly
//!   exponential schedule `kappa = 2^(2^t)`, splits the input into groups of
//!   at most `kappa` segments, solves each group with divide and conquer and
//!   merges the group envelopes, abandoning the round as soon as the merged
//!   output exceeds `kappa` vertices.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::chain::{Edge, Envelope};
use crate::geom::{intersect_closed, IntersectionResult, Point, Rational, Segment};
use crate::merge::{merge_envelopes, MergeCounters, MergeOutcome};

/// Largest doubling round; `kappa = 2^64` there.
pub const MAX_ROUND: u32 = 6;

/// Segments to take the envelope of. Ids are unique; sets parsed from input
/// are numbered `0..n` in input order, groups keep their parent's ids.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SegmentSet {
    segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("segment set is empty")]
    Empty,
    #[error("segment {0} is vertical")]
    Vertical(usize),
    #[error("duplicate segment id {0}")]
    DuplicateId(usize),
    #[error("no round up to kappa = 2^(2^{MAX_ROUND}) completed")]
    ScheduleExhausted,
}

impl SegmentSet {
    /// Wraps `segments`, rejecting vertical ones and repeated ids.
    pub fn new(segments: Vec<Segment>) -> Result<Self, SolverError> {
        let mut seen = std::collections::HashSet::new();
        for s in &segments {
            if s.is_vertical() {
                return Err(SolverError::Vertical(s.id));
            }
            if !seen.insert(s.id) {
                return Err(SolverError::DuplicateId(s.id));
            }
        }
        Ok(SegmentSet { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn translate(&self, dx: &Rational, dy: &Rational) -> SegmentSet {
        SegmentSet {
            segments: self.segments.iter().map(|s| s.translate(dx, dy)).collect(),
        }
    }
}

/// Number of vertices `k` of an envelope.
pub fn envelope_size(e: &Envelope) -> usize {
    e.len()
}

/// `y = slope * x + intercept` restricted to `[lo, hi]`.
struct Piece {
    lo: Rational,
    hi: Rational,
    slope: Rational,
    intercept: Rational,
    id: usize,
}

impl Piece {
    fn value(&self, x: &Rational) -> Rational {
        &self.slope * x + &self.intercept
    }
}

/// The pointwise minimum, computed from its definition.
pub fn envelope_bruteforce(input: &SegmentSet) -> Result<Envelope, SolverError> {
    if input.is_empty() {
        return Err(SolverError::Empty);
    }
    let segs = input.segments();
    let pieces: Vec<Piece> = segs
        .iter()
        .map(|s| {
            let slope = s.slope().expect("segment sets hold no vertical segments");
            let intercept = &s.a.y - &(&slope * &s.a.x);
            Piece {
                lo: s.a.x.clone(),
                hi: s.b.x.clone(),
                slope,
                intercept,
                id: s.id,
            }
        })
        .collect();

    let mut xs: Vec<Rational> = Vec::with_capacity(2 * segs.len());
    for s in segs {
        xs.push(s.a.x.clone());
        xs.push(s.b.x.clone());
    }
    for (i, s) in segs.iter().enumerate() {
        for t in &segs[i + 1..] {
            // Overlap ends are segment endpoints already.
            if let IntersectionResult::Point(p) = intersect_closed(&s.a, &s.b, &t.a, &t.b) {
                xs.push(p.x);
            }
        }
    }
    xs.sort();
    xs.dedup();

    let mut out: Option<Envelope> = None;
    let mut prev_covered = false;
    for w in xs.windows(2) {
        let (x0, x1) = (&w[0], &w[1]);
        let mid = x0.midpoint(x1);
        let winner = pieces
            .iter()
            .filter(|p| p.lo < mid && mid < p.hi)
            .map(|p| (p.value(&mid), p.id, p))
            .min_by(|a, b| (&a.0, a.1).cmp(&(&b.0, b.1)))
            .map(|(_, _, p)| p);
        let Some(p) = winner else {
            prev_covered = false;
            continue;
        };
        let left = Point::new(x0.clone(), p.value(x0));
        let right = Point::new(x1.clone(), p.value(x1));
        match out.as_mut() {
            None => out = Some(Envelope::start(left)),
            Some(env) => {
                let last = env.vertices().last().expect("non-empty").clone();
                if !prev_covered {
                    env.push(left, Edge::gap());
                } else if last != left {
                    env.push(left, Edge::connector());
                }
            }
        }
        out.as_mut()
            .expect("started above")
            .push(right, Edge::solid(p.id));
        prev_covered = true;
    }
    Ok(out.expect("a non-empty set of non-degenerate segments covers some interval"))
}

/// Divide and conquer over the input order with two-chain merges.
pub fn envelope_divide_conquer(
    input: &SegmentSet,
) -> Result<(Envelope, MergeCounters), SolverError> {
    if input.is_empty() {
        return Err(SolverError::Empty);
    }
    Ok(divide_conquer(input.segments()))
}

/// Below this many segments the halves are solved on the current thread.
const PARALLEL_CUTOFF: usize = 2048;

fn divide_conquer(segs: &[Segment]) -> (Envelope, MergeCounters) {
    if segs.len() == 1 {
        return (Envelope::from_segment(&segs[0]), MergeCounters::default());
    }
    let (left, right) = segs.split_at(segs.len() / 2);
    let ((le, lc), (re, rc)) = if segs.len() >= PARALLEL_CUTOFF {
        rayon::join(|| divide_conquer(left), || divide_conquer(right))
    } else {
        (divide_conquer(left), divide_conquer(right))
    };
    let outcome = merge_envelopes(&[le, re], None).expect("sub-envelopes are valid chains");
    let MergeOutcome::Completed(env, mc) = outcome else {
        unreachable!("merge without a threshold always completes")
    };
    let mut counters = lc;
    counters += rc;
    counters += mc;
    (env, counters)
}

/// Splits into `ceil(n / kappa)` runs of consecutive segments, each of size
/// at most `kappa`.
pub fn partition_segments(input: &SegmentSet, kappa: u128) -> Vec<SegmentSet> {
    assert!(kappa >= 1, "kappa must be positive");
    let size = usize::try_from(kappa).unwrap_or(usize::MAX);
    input
        .segments()
        .chunks(size)
        .map(|c| SegmentSet {
            segments: c.to_vec(),
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundOutcome {
    Aborted,
    Completed,
}

/// One round of the doubling schedule.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Round {
    pub t: u32,
    pub kappa: u128,
    pub groups: usize,
    pub outcome: RoundOutcome,
    /// Work spent in this round (group solves plus the final merge).
    pub counters: MergeCounters,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RunReport {
    pub iterations: Vec<Round>,
    pub final_k: usize,
    pub totals: MergeCounters,
    pub wall_time: Duration,
}

pub fn kappa_for_round(t: u32) -> u128 {
    1u128 << (1u32 << t)
}

/// Output-sensitive envelope: `O(n log k)` group work per the doubling
/// schedule, with every round's merge capped at `kappa` output vertices.
pub fn envelope_output_sensitive(input: &SegmentSet) -> Result<(Envelope, RunReport), SolverError> {
    if input.is_empty() {
        return Err(SolverError::Empty);
    }
    let started = Instant::now();
    let mut iterations = Vec::new();
    let mut totals = MergeCounters::default();
    for t in 0..=MAX_ROUND {
        let kappa = kappa_for_round(t);
        let groups = partition_segments(input, kappa);
        let mut counters = MergeCounters::default();
        let result = if groups.len() == 1 {
            // A lone group needs no merge, but still has to respect kappa.
            let (env, c) = divide_conquer(groups[0].segments());
            counters += c;
            (env.len() as u128 <= kappa).then_some(env)
        } else {
            let solved: Vec<(Envelope, MergeCounters)> = groups
                .par_iter()
                .map(|g| divide_conquer(g.segments()))
                .collect();
            let mut chains = Vec::with_capacity(solved.len());
            for (env, c) in solved {
                counters += c;
                chains.push(env);
            }
            let threshold = u64::try_from(kappa).unwrap_or(u64::MAX);
            let outcome =
                merge_envelopes(&chains, Some(threshold)).expect("group envelopes are valid");
            counters += *outcome.counters();
            match outcome {
                MergeOutcome::Completed(env, _) => Some(env),
                MergeOutcome::Aborted(_) => None,
            }
        };
        totals += counters;
        iterations.push(Round {
            t,
            kappa,
            groups: groups.len(),
            outcome: if result.is_some() {
                RoundOutcome::Completed
            } else {
                RoundOutcome::Aborted
            },
            counters,
        });
        if let Some(env) = result {
            let report = RunReport {
                iterations,
                final_k: env.len(),
                totals,
                wall_time: started.elapsed(),
            };
            return Ok((env, report));
        }
    }
    Err(SolverError::ScheduleExhausted)
}
