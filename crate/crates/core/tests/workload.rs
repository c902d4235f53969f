use std::collections::BTreeSet;

use envelope_core::workload::{generate, scaling_report, GenKind, GenSpec};
use envelope_core::{envelope_bruteforce, envelope_output_sensitive};

#[test]
fn small_k_envelopes_stay_small() {
    for n in [2, 3, 5, 64, 500] {
        for seed in 0..5 {
            let set = generate(&GenSpec::new(GenKind::SmallK, n, seed)).unwrap();
            let (env, _) = envelope_output_sensitive(&set).unwrap();
            assert!(env.len() <= 4, "n = {n}, seed = {seed}: k = {}", env.len());
        }
    }
}

#[test]
fn parabola_uses_every_segment() {
    for n in [1, 3, 16, 40] {
        let set = generate(&GenSpec::new(GenKind::Parabola, n, 9)).unwrap();
        let oracle = envelope_bruteforce(&set).unwrap();
        assert_eq!(oracle.len(), n + 1);
        let ids: BTreeSet<usize> = oracle.edge_sources().into_iter().flatten().collect();
        assert_eq!(ids, (0..n).collect());
    }
}

#[test]
fn disjoint_spans_alternate_with_gaps() {
    let set = generate(&GenSpec::new(GenKind::DisjointSpans, 10, 4)).unwrap();
    let env = envelope_bruteforce(&set).unwrap();
    assert_eq!(env.len(), 20);
    assert_eq!(env.edges().iter().filter(|e| e.is_gap()).count(), 9);
}

#[test]
fn generators_are_reproducible() {
    for kind in GenKind::ALL {
        let a = generate(&GenSpec::new(kind, 33, 77)).unwrap();
        let b = generate(&GenSpec::new(kind, 33, 77)).unwrap();
        assert_eq!(a, b, "{kind}");
        if kind != GenKind::Parabola {
            let c = generate(&GenSpec::new(kind, 33, 78)).unwrap();
            assert_ne!(a, c, "{kind}");
        }
    }
}

#[test]
fn random_work_grows_roughly_linearly() {
    let sizes = [250, 500, 1000, 2000];
    let rows = scaling_report(&sizes, &[GenKind::Random], 5).unwrap();
    for w in rows.windows(2) {
        let ratio = w[1].counters.cursor_increments as f64 / w[0].counters.cursor_increments as f64;
        assert!(ratio <= 2.5, "{} -> {}: ratio {ratio}", w[0].n, w[1].n);
    }
}

#[test]
fn small_k_does_less_work_than_parabola() {
    let rows = scaling_report(&[2000], &[GenKind::SmallK, GenKind::Parabola], 1).unwrap();
    assert!(rows[0].counters.intersection_tests < rows[1].counters.intersection_tests);
}
