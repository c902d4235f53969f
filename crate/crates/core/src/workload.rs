//! Reproducible instance generators and the scaling harness.
//!
//! Every generator is a pure function of its [`GenSpec`]. Randomness comes
//! from SplitMix64 (Steele, Lea and Flood's 64-bit mixer, the seeding
//! generator of the xoshiro family):
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! with wrapping arithmetic and the initial state equal to the seed. A draw
//! in `0..bound` is `next() % bound`. Random coordinates snap to a grid of
//! `2^16` steps across the bounding box.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use thiserror::Error;

use crate::geom::{Point, Rational, Segment};
use crate::merge::MergeCounters;
use crate::solver::{envelope_output_sensitive, SegmentSet};

/// Grid steps across each side of the bounding box.
pub const GRID_STEPS: u64 = 1 << 16;

/// SplitMix64.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw in `0..bound`.
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    /// Fisher-Yates shuffle driven by [`SplitMix64::below`].
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GenKind {
    Random,
    SmallK,
    Parabola,
    DisjointSpans,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [
        GenKind::Random,
        GenKind::SmallK,
        GenKind::Parabola,
        GenKind::DisjointSpans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GenKind::Random => "random",
            GenKind::SmallK => "small-k",
            GenKind::Parabola => "parabola",
            GenKind::DisjointSpans => "disjoint-spans",
        }
    }
}

impl fmt::Display for GenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GenKind {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "random" => Ok(GenKind::Random),
            "small-k" | "smallk" => Ok(GenKind::SmallK),
            "parabola" => Ok(GenKind::Parabola),
            "disjoint-spans" | "disjointspans" | "disjoint" => Ok(GenKind::DisjointSpans),
            _ => Err(GenError::UnknownKind(s.to_string())),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BBox {
    pub xmin: Rational,
    pub ymin: Rational,
    pub xmax: Rational,
    pub ymax: Rational,
}

impl BBox {
    pub fn new(xmin: Rational, ymin: Rational, xmax: Rational, ymax: Rational) -> Self {
        BBox {
            xmin,
            ymin,
            xmax,
            ymax,
        }
    }

    pub fn is_well_formed(&self) -> bool {
        self.xmin < self.xmax && self.ymin < self.ymax
    }

    fn grid_x(&self, step: u64) -> Rational {
        grid(&self.xmin, &self.xmax, step)
    }

    fn grid_y(&self, step: u64) -> Rational {
        grid(&self.ymin, &self.ymax, step)
    }
}

/// The unit square.
impl Default for BBox {
    fn default() -> Self {
        BBox::new(
            Rational::zero(),
            Rational::zero(),
            Rational::one(),
            Rational::one(),
        )
    }
}

fn grid(lo: &Rational, hi: &Rational, step: u64) -> Rational {
    let step = Rational::from_integer(step as i64);
    let steps = Rational::from_integer(GRID_STEPS as i64);
    lo + &((hi - lo) * step / steps)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub seed: u64,
    pub bbox: BBox,
}

impl GenSpec {
    /// A spec over the unit square.
    pub fn new(kind: GenKind, n: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            n,
            seed,
            bbox: BBox::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("n must be at least {min} for {kind}")]
    TooFew { kind: GenKind, min: usize },
    #[error("bounding box must satisfy xmin < xmax and ymin < ymax")]
    BadBBox,
    #[error("unknown generator kind `{0}`")]
    UnknownKind(String),
    #[error("generator {expected} called with a {got} spec")]
    WrongKind { expected: GenKind, got: GenKind },
}

fn check(spec: &GenSpec, kind: GenKind, min: usize) -> Result<(), GenError> {
    if spec.kind != kind {
        return Err(GenError::WrongKind {
            expected: kind,
            got: spec.kind,
        });
    }
    if spec.n < min {
        return Err(GenError::TooFew { kind, min });
    }
    if !spec.bbox.is_well_formed() {
        return Err(GenError::BadBBox);
    }
    Ok(())
}

fn build(pairs: Vec<(Point, Point)>) -> SegmentSet {
    let segments = pairs
        .into_iter()
        .enumerate()
        .map(|(id, (p, q))| {
            Segment::new(p, q, id).expect("generators never emit zero-length segments")
        })
        .collect();
    SegmentSet::new(segments).expect("generators never emit vertical segments")
}

/// Dispatches on `spec.kind`.
pub fn generate(spec: &GenSpec) -> Result<SegmentSet, GenError> {
    match spec.kind {
        GenKind::Random => gen_random(spec),
        GenKind::SmallK => gen_small_k(spec),
        GenKind::Parabola => gen_parabola(spec),
        GenKind::DisjointSpans => gen_disjoint_spans(spec),
    }
}

/// `n` segments with grid endpoints anywhere in the box; vertical draws are
/// redrawn.
pub fn gen_random(spec: &GenSpec) -> Result<SegmentSet, GenError> {
    check(spec, GenKind::Random, 1)?;
    let mut rng = SplitMix64::new(spec.seed);
    let b = &spec.bbox;
    let mut pairs = Vec::with_capacity(spec.n);
    while pairs.len() < spec.n {
        let (x1, y1) = (rng.below(GRID_STEPS + 1), rng.below(GRID_STEPS + 1));
        let (x2, y2) = (rng.below(GRID_STEPS + 1), rng.below(GRID_STEPS + 1));
        if x1 == x2 {
            continue;
        }
        pairs.push((
            Point::new(b.grid_x(x1), b.grid_y(y1)),
            Point::new(b.grid_x(x2), b.grid_y(y2)),
        ));
    }
    Ok(build(pairs))
}

/// A segment along the bottom edge of the box (id 0) under `n - 1` random
/// segments lying strictly above it; the envelope is the bottom segment.
pub fn gen_small_k(spec: &GenSpec) -> Result<SegmentSet, GenError> {
    check(spec, GenKind::SmallK, 2)?;
    let mut rng = SplitMix64::new(spec.seed);
    let b = &spec.bbox;
    let mut pairs = Vec::with_capacity(spec.n);
    pairs.push((
        Point::new(b.xmin.clone(), b.ymin.clone()),
        Point::new(b.xmax.clone(), b.ymin.clone()),
    ));
    while pairs.len() < spec.n {
        let (x1, x2) = (rng.below(GRID_STEPS + 1), rng.below(GRID_STEPS + 1));
        let y1 = 1 + rng.below(GRID_STEPS);
        let y2 = 1 + rng.below(GRID_STEPS);
        if x1 == x2 {
            continue;
        }
        pairs.push((
            Point::new(b.grid_x(x1), b.grid_y(y1)),
            Point::new(b.grid_x(x2), b.grid_y(y2)),
        ));
    }
    Ok(build(pairs))
}

/// Consecutive chords of `y = x^2` over `n` equal steps of the box's x-range
/// (the box's y-range is ignored). Every chord is on the envelope, so
/// `k = n + 1`. Ids are a seeded shuffle of left-to-right order.
pub fn gen_parabola(spec: &GenSpec) -> Result<SegmentSet, GenError> {
    check(spec, GenKind::Parabola, 1)?;
    let b = &spec.bbox;
    let steps = Rational::from_integer(spec.n as i64);
    let width = &b.xmax - &b.xmin;
    let on_curve = |i: usize| {
        let x = &b.xmin + &(&width * Rational::from_integer(i as i64) / &steps);
        let y = &x * &x;
        Point::new(x, y)
    };
    let mut order: Vec<usize> = (0..spec.n).collect();
    SplitMix64::new(spec.seed).shuffle(&mut order);
    let pairs = order
        .into_iter()
        .map(|i| (on_curve(i), on_curve(i + 1)))
        .collect();
    Ok(build(pairs))
}

/// One segment per slot of width `w = (xmax - xmin) / n`, confined to the
/// slot's interior so neighbours never meet; ids shuffled.
pub fn gen_disjoint_spans(spec: &GenSpec) -> Result<SegmentSet, GenError> {
    check(spec, GenKind::DisjointSpans, 1)?;
    let mut rng = SplitMix64::new(spec.seed);
    let b = &spec.bbox;
    let slot = (&b.xmax - &b.xmin) / Rational::from_integer(spec.n as i64);
    let eighth = |k: u64| &slot * Rational::new(k as i64, 8);
    let mut pairs: Vec<(Point, Point)> = (0..spec.n)
        .map(|i| {
            let base = &b.xmin + &(&slot * Rational::from_integer(i as i64));
            let x1 = &base + &eighth(1 + rng.below(3));
            let x2 = &base + &eighth(5 + rng.below(3));
            let y1 = b.grid_y(rng.below(GRID_STEPS + 1));
            let y2 = b.grid_y(rng.below(GRID_STEPS + 1));
            (Point::new(x1, y1), Point::new(x2, y2))
        })
        .collect();
    rng.shuffle(&mut pairs);
    Ok(build(pairs))
}

/// One measured run of the output-sensitive solver.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalingRow {
    pub kind: GenKind,
    pub n: usize,
    pub k: usize,
    pub iterations: usize,
    pub counters: MergeCounters,
    pub wall_time: Duration,
}

/// Generates one instance per `(kind, n)` over the unit square and solves it.
pub fn scaling_report(
    sizes: &[usize],
    kinds: &[GenKind],
    seed: u64,
) -> Result<Vec<ScalingRow>, GenError> {
    let mut rows = Vec::with_capacity(sizes.len() * kinds.len());
    for &kind in kinds {
        for &n in sizes {
            let set = generate(&GenSpec::new(kind, n, seed))?;
            let (env, report) =
                envelope_output_sensitive(&set).expect("generated sets are non-empty");
            rows.push(ScalingRow {
                kind,
                n,
                k: env.len(),
                iterations: report.iterations.len(),
                counters: report.totals,
                wall_time: report.wall_time,
            });
        }
    }
    Ok(rows)
}

/// CSV rendering of a report. Wall time is only included on request so the
/// default output is reproducible byte for byte.
pub fn report_csv(rows: &[ScalingRow], with_timing: bool) -> String {
    let mut out = String::from(
        "kind,n,k,iterations,cursor_increments,intersection_tests,vertices_emitted,restarts,chains,total_input_vertices",
    );
    if with_timing {
        out.push_str(",wall_time_ms");
    }
    out.push('\n');
    for r in rows {
        let c = &r.counters;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}",
            r.kind,
            r.n,
            r.k,
            r.iterations,
            c.cursor_increments,
            c.intersection_tests,
            c.vertices_emitted,
            c.restarts,
            c.chains,
            c.total_input_vertices
        ));
        if with_timing {
            out.push_str(&format!(",{:.3}", r.wall_time.as_secs_f64() * 1e3));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitmix_reference_values() {
        // Known-answer vector for seed 1234567.
        let mut rng = SplitMix64::new(1234567);
        let got: Vec<u64> = (0..5).map(|_| rng.next_u64()).collect();
        assert_eq!(
            got,
            vec![
                6457827717110365317,
                3203168211198807973,
                9817491932198370423,
                4593380528125082431,
                16408922859458223821
            ]
        );
    }

    #[test]
    fn random_is_deterministic() {
        let one = gen_random(&GenSpec::new(GenKind::Random, 1, 7)).unwrap();
        assert_eq!(
            one,
            gen_random(&GenSpec::new(GenKind::Random, 1, 7)).unwrap()
        );
        let a = gen_random(&GenSpec::new(GenKind::Random, 64, 1)).unwrap();
        let b = gen_random(&GenSpec::new(GenKind::Random, 64, 1)).unwrap();
        let c = gen_random(&GenSpec::new(GenKind::Random, 64, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn kinds_parse() {
        for kind in GenKind::ALL {
            assert_eq!(kind.name().parse::<GenKind>().unwrap(), kind);
        }
        assert!("nope".parse::<GenKind>().is_err());
    }

    #[test]
    fn spec_errors() {
        assert_eq!(
            gen_small_k(&GenSpec::new(GenKind::SmallK, 1, 0)),
            Err(GenError::TooFew {
                kind: GenKind::SmallK,
                min: 2
            })
        );
        assert!(matches!(
            gen_random(&GenSpec::new(GenKind::Parabola, 3, 0)),
            Err(GenError::WrongKind { .. })
        ));
        let mut bad = GenSpec::new(GenKind::Random, 3, 0);
        bad.bbox.xmax = Rational::zero();
        assert_eq!(gen_random(&bad), Err(GenError::BadBBox));
    }

    #[test]
    fn small_k_dominance_certificate() {
        let set = gen_small_k(&GenSpec::new(GenKind::SmallK, 200, 3)).unwrap();
        let base = &set.segments()[0];
        let base_max = base.a.y.max_ref(&base.b.y);
        for s in &set.segments()[1..] {
            assert!(s.a.y.min_ref(&s.b.y) > base_max);
        }
    }

    #[test]
    fn csv_shape() {
        let rows = scaling_report(&[16], &[GenKind::Random], 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].counters.intersection_tests > 0);
        let csv = report_csv(&rows, false);
        assert_eq!(csv.lines().count(), 2);
        assert!(csv.starts_with("kind,n,k,"));
        assert!(report_csv(&rows, true)
            .lines()
            .next()
            .unwrap()
            .ends_with("wall_time_ms"));
    }
}
