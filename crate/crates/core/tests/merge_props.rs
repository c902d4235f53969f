use envelope_core::geom::{
    eval_at, orientation, ray_up_intersection, segment_intersection, IntersectionResult,
};
use envelope_core::merge::MergeOutcome;
use envelope_core::{
    envelope_bruteforce, envelope_divide_conquer, envelope_output_sensitive, merge_envelopes,
    Envelope, Point, Rational, Segment, SegmentSet,
};
use proptest::prelude::*;

fn arb_point(r: i64) -> impl Strategy<Value = Point> {
    (-r..=r, -r..=r).prop_map(|(x, y)| Point::from_ints(x, y))
}

fn arb_segments(max: usize) -> impl Strategy<Value = SegmentSet> {
    arb_segments_in(8, max)
}

/// Small coordinate range, so shared endpoints and overlaps are common.
fn arb_crowded(max: usize) -> impl Strategy<Value = SegmentSet> {
    arb_segments_in(2, max)
}

fn arb_segments_in(r: i64, max: usize) -> impl Strategy<Value = SegmentSet> {
    prop::collection::vec((-r..=r, -r..=r, 1i64..=r.max(2), -r..=r), 1..=max).prop_map(|raw| {
        let segs = raw
            .into_iter()
            .enumerate()
            .map(|(id, (x, y, w, y2))| {
                Segment::new(Point::from_ints(x, y), Point::from_ints(x + w, y2), id).unwrap()
            })
            .collect();
        SegmentSet::new(segs).unwrap()
    })
}

/// Lowest point of all segments covering `x`, straight from the definition.
fn pointwise_min(segs: &[Segment], x: &Rational) -> Option<Rational> {
    segs.iter().filter_map(|s| eval_at(s, x).ok()).min()
}

/// Every endpoint, every pairwise crossing, every midpoint between them and
/// a little beyond both ends.
fn probe_xs(segs: &[Segment]) -> Vec<Rational> {
    let mut xs = Vec::new();
    for s in segs {
        xs.push(s.a.x.clone());
        xs.push(s.b.x.clone());
    }
    for (i, s) in segs.iter().enumerate() {
        for t in &segs[i + 1..] {
            if let IntersectionResult::Point(p) = segment_intersection(s, t) {
                xs.push(p.x);
            }
        }
    }
    xs.sort();
    xs.dedup();
    let mut out = xs.clone();
    for w in xs.windows(2) {
        out.push(w[0].midpoint(&w[1]));
    }
    out.push(&xs[0] - &Rational::one());
    out.push(xs.last().unwrap() + &Rational::one());
    out
}

fn completed(chains: &[Envelope], abort: Option<u64>) -> Envelope {
    match merge_envelopes(chains, abort).unwrap() {
        MergeOutcome::Completed(e, _) => e,
        MergeOutcome::Aborted(_) => panic!("unexpected abort"),
    }
}

/// Envelopes of consecutive runs of the input, used as merge inputs.
fn split_chains(set: &SegmentSet, parts: usize) -> Vec<Envelope> {
    let segs = set.segments();
    let size = segs.len().div_ceil(parts.max(1));
    segs.chunks(size)
        .map(|c| envelope_bruteforce(&SegmentSet::new(c.to_vec()).unwrap()).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn solvers_agree_with_pointwise_minimum(set in arb_segments(12)) {
        let oracle = envelope_bruteforce(&set).unwrap();
        let (dc, _) = envelope_divide_conquer(&set).unwrap();
        let (os, _) = envelope_output_sensitive(&set).unwrap();
        prop_assert!(dc.validate().is_empty(), "{:?}", dc.validate());
        prop_assert_eq!(&dc, &oracle);
        prop_assert_eq!(&os, &oracle);
        for x in probe_xs(set.segments()) {
            prop_assert_eq!(dc.eval(&x), pointwise_min(set.segments(), &x), "x = {}", x);
        }
    }

    #[test]
    fn crowded_instances_agree(set in arb_crowded(10), parts in 1usize..5) {
        let oracle = envelope_bruteforce(&set).unwrap();
        prop_assert_eq!(&envelope_divide_conquer(&set).unwrap().0, &oracle);
        prop_assert_eq!(&envelope_output_sensitive(&set).unwrap().0, &oracle);
        prop_assert_eq!(&completed(&split_chains(&set, parts), None), &oracle);
        for x in probe_xs(set.segments()) {
            prop_assert_eq!(oracle.eval(&x), pointwise_min(set.segments(), &x));
        }
    }

    #[test]
    fn merge_is_order_independent(set in arb_segments(12), parts in 1usize..5, seed in any::<u64>()) {
        let mut chains = split_chains(&set, parts);
        let base = completed(&chains, None);
        let mut rng = envelope_core::workload::SplitMix64::new(seed);
        rng.shuffle(&mut chains);
        prop_assert_eq!(completed(&chains, None), base);
    }

    #[test]
    fn merge_is_idempotent_and_associative(a in arb_segments(6), b in arb_segments(6), c in arb_segments(6)) {
        let (ea, eb, ec) = (
            envelope_bruteforce(&a).unwrap(),
            envelope_bruteforce(&b).unwrap(),
            envelope_bruteforce(&c).unwrap(),
        );
        prop_assert_eq!(completed(&[ea.clone(), ea.clone()], None), ea.clone());
        let left = completed(&[completed(&[ea.clone(), eb.clone()], None), ec.clone()], None);
        let right = completed(&[ea.clone(), completed(&[eb.clone(), ec.clone()], None)], None);
        let flat = completed(&[ea, eb, ec], None);
        prop_assert_eq!(&left, &flat);
        prop_assert_eq!(&right, &flat);
    }

    #[test]
    fn merge_commutes_with_translation(set in arb_segments(10), parts in 1usize..4,
                                       dx in -20i64..20, dy in -20i64..20, q in 1i64..5) {
        let (dx, dy) = (Rational::new(dx, q), Rational::new(dy, q));
        let chains = split_chains(&set, parts);
        let moved: Vec<Envelope> = chains.iter().map(|e| e.translate(&dx, &dy)).collect();
        prop_assert_eq!(completed(&moved, None), completed(&chains, None).translate(&dx, &dy));
    }

    #[test]
    fn abort_matches_output_size(set in arb_segments(12), parts in 1usize..5, threshold in 1u64..30) {
        let chains = split_chains(&set, parts);
        let full = completed(&chains, None);
        let out = merge_envelopes(&chains, Some(threshold)).unwrap();
        prop_assert_eq!(out.is_aborted(), full.len() as u64 > threshold);
        if let Some(e) = out.envelope() {
            prop_assert_eq!(e, &full);
        }
    }

    #[test]
    fn merge_counters_stay_within_bounds(set in arb_segments(16), parts in 1usize..6) {
        let chains = split_chains(&set, parts);
        let out = merge_envelopes(&chains, None).unwrap();
        let c = *out.counters();
        let n: usize = chains.iter().map(Envelope::len).sum();
        prop_assert_eq!(c.total_input_vertices, n as u64);
        prop_assert_eq!(c.vertices_emitted, out.envelope().unwrap().len() as u64);
        prop_assert!(c.cursor_increments <= c.total_input_vertices);
        prop_assert!(c.intersection_tests <= c.work_bound(), "{:?}", c);
    }

    #[test]
    fn output_vertices_lie_on_inputs(set in arb_segments(12)) {
        let (env, _) = envelope_divide_conquer(&set).unwrap();
        for v in env.vertices() {
            let on_some = set.segments().iter().any(|s| {
                s.a.x <= v.x && v.x <= s.b.x && orientation(&s.a, &s.b, v) == 0
            });
            prop_assert!(on_some, "{:?} is on no input segment", v);
        }
        for (j, e) in env.edges().iter().enumerate() {
            if let Some(id) = e.source {
                let s = &set.segments()[id];
                let (p, q) = env.edge_points(j);
                prop_assert_eq!(orientation(&s.a, &s.b, p), 0);
                prop_assert_eq!(orientation(&s.a, &s.b, q), 0);
            }
        }
    }

    #[test]
    fn orientation_is_antisymmetric(a in arb_point(20), b in arb_point(20), c in arb_point(20)) {
        prop_assert_eq!(orientation(&a, &b, &c), -orientation(&b, &a, &c));
        prop_assert_eq!(orientation(&a, &b, &c), orientation(&b, &c, &a));
    }

    #[test]
    fn intersection_is_symmetric_and_exact(p in arb_point(10), q in arb_point(10),
                                           r in arb_point(10), s in arb_point(10)) {
        prop_assume!(p != q && r != s);
        let (u, v) = (Segment::new(p, q, 0).unwrap(), Segment::new(r, s, 1).unwrap());
        let uv = segment_intersection(&u, &v);
        prop_assert_eq!(&uv, &segment_intersection(&v, &u));
        let on = |seg: &Segment, pt: &Point| {
            orientation(&seg.a, &seg.b, pt) == 0 && seg.a <= *pt && *pt <= seg.b
        };
        match uv {
            IntersectionResult::None => {}
            IntersectionResult::Point(x) => {
                prop_assert!(on(&u, &x) && on(&v, &x));
            }
            IntersectionResult::Overlap { start, end } => {
                prop_assert!(start < end);
                for x in [&start, &end] {
                    prop_assert!(on(&u, x) && on(&v, x));
                }
            }
        }
    }

    #[test]
    fn upward_ray_hits_lie_above_origin(o in arb_point(10), p in arb_point(10), q in arb_point(10)) {
        prop_assume!(p != q);
        let s = Segment::new(p, q, 0).unwrap();
        match ray_up_intersection(&o, &s) {
            IntersectionResult::Point(x) => {
                prop_assert_eq!(&x.x, &o.x);
                prop_assert!(x.y >= o.y);
            }
            IntersectionResult::Overlap { start, end } => {
                prop_assert!(s.is_vertical());
                prop_assert!(start.y >= o.y && end.y > start.y);
            }
            IntersectionResult::None => {
                if !s.is_vertical() && s.a.x <= o.x && o.x <= s.b.x {
                    prop_assert!(eval_at(&s, &o.x).unwrap() < o.y);
                }
            }
        }
    }

    #[test]
    fn eval_at_endpoints(p in arb_point(20), q in arb_point(20)) {
        prop_assume!(p.x != q.x);
        let s = Segment::new(p, q, 0).unwrap();
        prop_assert_eq!(eval_at(&s, &s.a.x).unwrap(), s.a.y.clone());
        prop_assert_eq!(eval_at(&s, &s.b.x).unwrap(), s.b.y.clone());
    }
}
