//! Lower envelope of `m` x-monotone chains in `O(n + m k)`.
//!
//! The merge follows one *active* chain at a time. `current_vertex` (v*) is
//! the last emitted envelope vertex and lies on the active chain's cursor
//! edge; the active segment S* runs from v* to that edge's right endpoint.
//! Every other chain keeps a cursor that only moves forward: each round it
//! is pushed past edges that S* hides, and the first point where the chain
//! drops below S* becomes a takeover candidate. The leftmost candidate wins
//! (lower right-hand value, then smaller slope, then smaller source id, then
//! smaller chain index); without one, S* is emitted whole and the envelope's
//! continuation at its right end is resolved by one pass over all chains.
//!
//! Chains may cover different x-ranges. Where no chain is defined the output
//! carries a gap edge and the merge restarts at the leftmost pending chain
//! start. Jumps at a single abscissa become sourceless vertical connectors,
//! so S* itself is never vertical.

use std::cmp::Ordering;
use std::fmt;
use std::ops::AddAssign;

use serde::Serialize;
use thiserror::Error;

use crate::chain::{validate_chain, Diagnostic, Edge, EdgeKind, Envelope};
use crate::geom::{
    intersect_closed, line_value, ray_up_closed, slope_between, Point, Rational, SourceId,
};

/// Operation counts that make `n`, `m` and `k` observable.
#[derive(Clone, Copy, Default, PartialEq, Eq, Debug, Serialize)]
pub struct MergeCounters {
    pub cursor_increments: u64,
    pub intersection_tests: u64,
    pub vertices_emitted: u64,
    pub restarts: u64,
    pub chains: u64,
    pub total_input_vertices: u64,
}

impl MergeCounters {
    /// `4 (n + m k)`, the ceiling on `intersection_tests` for one merge.
    pub fn work_bound(&self) -> u64 {
        4 * (self.total_input_vertices + self.chains * self.vertices_emitted)
    }
}

impl AddAssign for MergeCounters {
    fn add_assign(&mut self, rhs: Self) {
        self.cursor_increments += rhs.cursor_increments;
        self.intersection_tests += rhs.intersection_tests;
        self.vertices_emitted += rhs.vertices_emitted;
        self.restarts += rhs.restarts;
        self.chains += rhs.chains;
        self.total_input_vertices += rhs.total_input_vertices;
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum MergeOutcome {
    Completed(Envelope, MergeCounters),
    /// The output grew past the abort threshold.
    Aborted(MergeCounters),
}

impl MergeOutcome {
    pub fn counters(&self) -> &MergeCounters {
        match self {
            MergeOutcome::Completed(_, c) | MergeOutcome::Aborted(c) => c,
        }
    }

    pub fn envelope(&self) -> Option<&Envelope> {
        match self {
            MergeOutcome::Completed(e, _) => Some(e),
            MergeOutcome::Aborted(_) => None,
        }
    }

    pub fn is_aborted(&self) -> bool {
        matches!(self, MergeOutcome::Aborted(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("no chains to merge")]
    Empty,
    #[error("chain {index} is invalid: {}", join_diagnostics(.diagnostics))]
    InvalidChain {
        index: usize,
        diagnostics: Vec<Diagnostic>,
    },
}

fn join_diagnostics(ds: &[Diagnostic]) -> String {
    ds.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Verdict of the cursor-advance guard for one chain.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Advance {
    Continue,
    Stop(StopReason),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum StopReason {
    /// The cursor is past the chain's last vertex.
    Exhausted,
    /// The cursor vertex lies strictly right of the active segment's end.
    BeyondActive,
    /// The cursor edge meets S* somewhere other than v*.
    Crossing,
    /// The upward ray from the cursor edge's left endpoint meets S*.
    RayHit,
}

/// How a chain continues immediately right of some abscissa.
#[derive(Clone, Debug)]
struct Lead {
    value: Rational,
    slope: Rational,
    source: Option<SourceId>,
    chain: usize,
}

impl Lead {
    /// Lower first, then the one that stays lower, then the smaller source.
    fn rank(&self, other: &Lead) -> Ordering {
        self.value
            .cmp(&other.value)
            .then_with(|| self.slope.cmp(&other.slope))
            .then_with(|| self.source.cmp(&other.source))
            .then_with(|| self.chain.cmp(&other.chain))
    }
}

/// S*: from v* to the end of the active chain's cursor edge. Never vertical.
struct ActiveSegment {
    start: Point,
    end: Point,
    slope: Rational,
    source: Option<SourceId>,
}

impl ActiveSegment {
    fn value_at(&self, x: &Rational) -> Rational {
        line_value(&self.start, &self.end, x)
    }
}

/// Live state of a merge.
pub struct MergeState<'a> {
    chains: &'a [Envelope],
    /// `cursors[i] = p` means chain `i` is examined on its edge `(p - 1, p)`.
    pub cursors: Vec<usize>,
    pub active: usize,
    pub current_vertex: Point,
    /// Takeover point chosen in the last round, if any.
    pub best: Option<Point>,
    /// Chain that took over in the last round, if any.
    pub next: Option<usize>,
    pub output: Envelope,
    pub counters: MergeCounters,
}

impl fmt::Debug for MergeState<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MergeState")
            .field("cursors", &self.cursors)
            .field("active", &self.active)
            .field("current_vertex", &self.current_vertex)
            .field("best", &self.best)
            .field("next", &self.next)
            .finish_non_exhaustive()
    }
}

fn check_chains(chains: &[Envelope]) -> Result<(), MergeError> {
    if chains.is_empty() {
        return Err(MergeError::Empty);
    }
    for (index, chain) in chains.iter().enumerate() {
        let diagnostics = validate_chain(chain);
        if !diagnostics.is_empty() {
            return Err(MergeError::InvalidChain { index, diagnostics });
        }
    }
    Ok(())
}

/// Index of the chain the envelope starts on: leftmost first vertex, then
/// lowest, then smallest first-edge slope, source id and index.
pub fn select_initial_active(chains: &[Envelope]) -> Result<usize, MergeError> {
    check_chains(chains)?;
    let state = MergeState::fresh(chains);
    let mut tests = 0;
    let (_, lead) = state
        .leftmost_start(None, &mut tests)
        .expect("valid chains always have a first edge");
    Ok(lead.chain)
}

/// Merges `chains` into their lower envelope, giving up once the output has
/// more than `abort_threshold` vertices.
pub fn merge_envelopes(
    chains: &[Envelope],
    abort_threshold: Option<u64>,
) -> Result<MergeOutcome, MergeError> {
    Ok(MergeState::new(chains)?.run(abort_threshold))
}

impl<'a> MergeState<'a> {
    /// Validates `chains` and positions the merge on its first vertex.
    pub fn new(chains: &'a [Envelope]) -> Result<Self, MergeError> {
        check_chains(chains)?;
        let mut state = MergeState::fresh(chains);
        let mut tests = 0;
        let (x, lead) = state
            .leftmost_start(None, &mut tests)
            .expect("valid chains always have a first edge");
        state.counters.intersection_tests += tests;
        state.active = lead.chain;
        state.current_vertex = Point::new(x, lead.value);
        state.output = Envelope::start(state.current_vertex.clone());
        state.counters.vertices_emitted = 1;
        Ok(state)
    }

    fn fresh(chains: &'a [Envelope]) -> Self {
        MergeState {
            chains,
            cursors: vec![1; chains.len()],
            active: 0,
            current_vertex: chains[0].vertices()[0].clone(),
            best: None,
            next: None,
            output: Envelope::default(),
            counters: MergeCounters {
                chains: chains.len() as u64,
                total_input_vertices: chains.iter().map(|c| c.len() as u64).sum(),
                ..MergeCounters::default()
            },
        }
    }

    pub fn chains(&self) -> &'a [Envelope] {
        self.chains
    }

    fn active_segment(&self) -> ActiveSegment {
        let chain = &self.chains[self.active];
        let p = self.cursors[self.active];
        let end = chain.vertices()[p].clone();
        let start = self.current_vertex.clone();
        let slope = slope_between(&start, &end).expect("active segment is never vertical");
        ActiveSegment {
            start,
            end,
            slope,
            source: chain.edges()[p - 1].source,
        }
    }

    /// Whether chain `i`'s cursor must move on: Continue while its cursor
    /// vertex is no further right than S* ends and neither its cursor edge nor
    /// the upward ray from that edge's left end meets S* (away from v*).
    pub fn advance_condition(&self, i: usize) -> Advance {
        let mut tests = 0;
        self.guard(i, &self.active_segment(), &mut tests)
    }

    fn guard(&self, i: usize, s: &ActiveSegment, tests: &mut u64) -> Advance {
        let chain = &self.chains[i];
        let p = self.cursors[i];
        if p >= chain.len() {
            return Advance::Stop(StopReason::Exhausted);
        }
        let (lo, hi) = chain.edge_points(p - 1);
        if hi.x > s.end.x {
            return Advance::Stop(StopReason::BeyondActive);
        }
        if chain.edges()[p - 1].is_gap() {
            return Advance::Continue;
        }
        *tests += 1;
        if intersect_closed(lo, hi, &s.start, &s.end).touches_other_than(&s.start) {
            return Advance::Stop(StopReason::Crossing);
        }
        *tests += 1;
        if !ray_up_closed(lo, &s.start, &s.end).is_none() {
            return Advance::Stop(StopReason::RayHit);
        }
        Advance::Continue
    }

    /// First abscissa in `(v*.x, S*.end.x)` at which chain `i`'s cursor edge
    /// ranks ahead of S*, with the chain's lead there.
    fn first_better(&self, i: usize, s: &ActiveSegment) -> Option<(Rational, Lead)> {
        let chain = &self.chains[i];
        let j = self.cursors[i] - 1;
        let edge = &chain.edges()[j];
        let (p, q) = chain.edge_points(j);
        if edge.is_gap() || p.x == q.x {
            return None;
        }
        let lo = p.x.max_ref(&s.start.x);
        let hi = q.x.min_ref(&s.end.x);
        if lo >= hi {
            return None;
        }
        let slope = slope_between(p, q).expect("checked non-vertical");
        let lead = |value: Rational| Lead {
            value,
            slope: slope.clone(),
            source: edge.source,
            chain: i,
        };
        if lo > &s.start.x {
            let mine = line_value(p, q, lo);
            let theirs = s.value_at(lo);
            let ahead = match mine.cmp(&theirs) {
                Ordering::Less => true,
                Ordering::Equal => (&slope, edge.source) < (&s.slope, s.source),
                Ordering::Greater => false,
            };
            if ahead {
                return Some((lo.clone(), lead(mine)));
            }
        }
        if slope < s.slope {
            // Solve p.y + slope (x - p.x) = start.y + s.slope (x - start.x).
            let x =
                (&s.start.y - &p.y + &slope * &p.x - &s.slope * &s.start.x) / (&slope - &s.slope);
            if lo < &x && &x < hi {
                let y = s.value_at(&x);
                return Some((x, lead(y)));
            }
        }
        None
    }

    /// Moves chain `i`'s cursor past every edge S* hides and returns its
    /// takeover candidate, if any.
    fn advance(&mut self, i: usize, s: &ActiveSegment) -> Option<(Rational, Lead)> {
        loop {
            let mut tests = 0;
            let verdict = self.guard(i, s, &mut tests);
            self.counters.intersection_tests += tests;
            match verdict {
                Advance::Continue => {
                    debug_assert!(self.first_better(i, s).is_none());
                }
                Advance::Stop(StopReason::Exhausted) => return None,
                Advance::Stop(StopReason::BeyondActive) => {
                    self.counters.intersection_tests += 1;
                    return self.first_better(i, s);
                }
                Advance::Stop(StopReason::Crossing | StopReason::RayHit) => {
                    // A contact is only a takeover if the chain actually
                    // drops below S*; a mere touch is skipped like any
                    // hidden edge.
                    self.counters.intersection_tests += 1;
                    if let Some(found) = self.first_better(i, s) {
                        return Some(found);
                    }
                }
            }
            self.cursors[i] += 1;
            self.counters.cursor_increments += 1;
        }
    }

    /// Chain `i`'s lead just right of `x`, if its cursor edge covers `(x, x + eps)`.
    fn lead_at(&self, i: usize, x: &Rational, tests: &mut u64) -> Option<Lead> {
        *tests += 1;
        let chain = &self.chains[i];
        let p = self.cursors[i];
        if p >= chain.len() {
            return None;
        }
        let edge = &chain.edges()[p - 1];
        let (lo, hi) = chain.edge_points(p - 1);
        if edge.is_gap() || &lo.x > x || &hi.x <= x {
            return None;
        }
        Some(Lead {
            value: line_value(lo, hi, x),
            slope: slope_between(lo, hi).expect("covering edge is not vertical"),
            source: edge.source,
            chain: i,
        })
    }

    /// Where chain `i` next begins to be defined strictly after `after`
    /// (or at all, for `None`), with its lead there.
    fn pending_start(
        &self,
        i: usize,
        after: Option<&Rational>,
        tests: &mut u64,
    ) -> Option<(Rational, Lead)> {
        *tests += 1;
        let chain = &self.chains[i];
        let p = self.cursors[i];
        if p >= chain.len() {
            return None;
        }
        let j = if chain.edges()[p - 1].is_gap() {
            p
        } else {
            p - 1
        };
        let (lo, hi) = chain.edge_points(j);
        debug_assert!(after.is_none_or(|x| &lo.x > x));
        let edge = &chain.edges()[j];
        debug_assert_eq!(edge.kind, EdgeKind::Solid);
        Some((
            lo.x.clone(),
            Lead {
                value: lo.y.clone(),
                slope: slope_between(lo, hi).expect("runs start on a non-vertical edge"),
                source: edge.source,
                chain: i,
            },
        ))
    }

    fn leftmost_start(
        &self,
        after: Option<&Rational>,
        tests: &mut u64,
    ) -> Option<(Rational, Lead)> {
        let mut best: Option<(Rational, Lead)> = None;
        for i in 0..self.chains.len() {
            if let Some((x, lead)) = self.pending_start(i, after, tests) {
                let better = match &best {
                    None => true,
                    Some((bx, bl)) => x.cmp(bx).then_with(|| lead.rank(bl)) == Ordering::Less,
                };
                if better {
                    best = Some((x, lead));
                }
            }
        }
        best
    }

    /// Appends a vertex; true if that pushed the output past the threshold.
    fn emit(&mut self, p: Point, edge: Edge, abort: Option<u64>) -> bool {
        self.output.push(p, edge);
        self.counters.vertices_emitted = self.output.len() as u64;
        abort.is_some_and(|k| self.counters.vertices_emitted > k)
    }

    /// Runs the merge to completion or abort.
    pub fn run(mut self, abort: Option<u64>) -> MergeOutcome {
        if abort.is_some_and(|k| self.counters.vertices_emitted > k) {
            return MergeOutcome::Aborted(self.counters);
        }
        let m = self.chains.len();
        loop {
            let s = self.active_segment();
            self.best = None;
            self.next = None;

            let mut winner: Option<(Rational, Lead)> = None;
            for i in 0..m {
                if i == self.active {
                    continue;
                }
                if let Some((x, lead)) = self.advance(i, &s) {
                    let better = match &winner {
                        None => true,
                        Some((wx, wl)) => x.cmp(wx).then_with(|| lead.rank(wl)) == Ordering::Less,
                    };
                    if better {
                        winner = Some((x, lead));
                    }
                }
            }

            if let Some((x, lead)) = winner {
                // Another chain takes over inside S*.
                let hit = Point::new(x.clone(), s.value_at(&x));
                self.best = Some(hit.clone());
                self.next = Some(lead.chain);
                let drop = lead.value < hit.y;
                if self.emit(hit, edge_of(s.source), abort) {
                    return MergeOutcome::Aborted(self.counters);
                }
                let landing = Point::new(x, lead.value);
                if drop && self.emit(landing.clone(), Edge::connector(), abort) {
                    return MergeOutcome::Aborted(self.counters);
                }
                self.current_vertex = landing;
                self.active = lead.chain;
                continue;
            }

            // S* is on the envelope up to its right end.
            let a = self.active;
            if self.emit(s.end.clone(), edge_of(s.source), abort) {
                return MergeOutcome::Aborted(self.counters);
            }
            self.current_vertex = s.end.clone();
            let chain = &self.chains[a];
            self.cursors[a] += 1;
            self.counters.cursor_increments += 1;
            if self.cursors[a] < chain.len() && chain.is_vertical_edge(self.cursors[a] - 1) {
                self.cursors[a] += 1;
                self.counters.cursor_increments += 1;
            }

            let x = s.end.x.clone();
            let mut tests = 0;
            let lead = (0..m)
                .filter_map(|i| self.lead_at(i, &x, &mut tests))
                .min_by(|l, r| l.rank(r));
            self.counters.intersection_tests += tests;
            if let Some(lead) = lead {
                if lead.value != s.end.y {
                    let landing = Point::new(x, lead.value);
                    if self.emit(landing.clone(), Edge::connector(), abort) {
                        return MergeOutcome::Aborted(self.counters);
                    }
                    self.current_vertex = landing;
                }
                self.active = lead.chain;
                continue;
            }

            // Nothing is defined just right of x: skip the gap.
            let mut tests = 0;
            let start = self.leftmost_start(Some(&x), &mut tests);
            self.counters.intersection_tests += tests;
            let Some((sx, lead)) = start else {
                break;
            };
            self.counters.restarts += 1;
            let w = lead.chain;
            if self.chains[w].edges()[self.cursors[w] - 1].is_gap() {
                self.cursors[w] += 1;
                self.counters.cursor_increments += 1;
            }
            let landing = Point::new(sx, lead.value);
            if self.emit(landing.clone(), Edge::gap(), abort) {
                return MergeOutcome::Aborted(self.counters);
            }
            self.current_vertex = landing;
            self.active = w;
        }
        MergeOutcome::Completed(self.output, self.counters)
    }
}

fn edge_of(source: Option<SourceId>) -> Edge {
    Edge {
        kind: EdgeKind::Solid,
        source,
    }
}
