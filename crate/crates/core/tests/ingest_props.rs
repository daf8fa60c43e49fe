use std::collections::BTreeSet;

use chrono::Duration;
use decay::ingest::{
    build_snapshot, build_snapshot_filtered, label_leaves, parse_events, parse_timestamp, write_events, EventKind,
    InteractionEvent, Timestamp,
};
use proptest::prelude::*;

fn t0() -> Timestamp {
    parse_timestamp("2021-03-01").unwrap()
}

fn events() -> impl Strategy<Value = Vec<InteractionEvent>> {
    proptest::collection::vec((0u32..10, 0u32..10, 0i64..60 * 24, 0usize..3), 0..80).prop_map(|raw| {
        raw.into_iter()
            .filter(|(a, b, _, _)| a != b)
            .map(|(a, b, hours, k)| InteractionEvent {
                timestamp: t0() + Duration::hours(hours),
                actor: format!("u{a}"),
                target: format!("u{b}"),
                kind: [EventKind::Comment, EventKind::Answer, EventKind::Other][k],
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn event_order_is_irrelevant(evs in events(), seed in any::<u64>(), days in 1u32..60) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = evs.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let a = build_snapshot(&evs, t0(), days).unwrap();
        let b = build_snapshot(&shuffled, t0(), days).unwrap();
        prop_assert_eq!(a.graph, b.graph);
    }

    #[test]
    fn longer_windows_only_add(evs in events(), d1 in 1u32..60, extra in 0u32..30) {
        let short = build_snapshot(&evs, t0(), d1).unwrap().graph;
        let long = build_snapshot(&evs, t0(), d1 + extra).unwrap().graph;
        prop_assert!(short.nodes().iter().all(|n| long.contains(n)));
        prop_assert!(short.edges().all(|(a, b)| long.has_edge(a, b)));
    }

    #[test]
    fn snapshot_matches_a_direct_scan(evs in events(), days in 1u32..60) {
        let g = build_snapshot(&evs, t0(), days).unwrap().graph;
        let end = t0() + Duration::days(days as i64);
        let inside: Vec<&InteractionEvent> = evs.iter().filter(|e| e.timestamp >= t0() && e.timestamp < end).collect();
        let pairs: BTreeSet<(String, String)> = inside
            .iter()
            .map(|e| if e.actor < e.target { (e.actor.clone(), e.target.clone()) } else { (e.target.clone(), e.actor.clone()) })
            .collect();
        let nodes: BTreeSet<&str> = inside.iter().flat_map(|e| [e.actor.as_str(), e.target.as_str()]).collect();
        prop_assert_eq!(g.edge_count(), pairs.len());
        prop_assert_eq!(g.nodes().iter().map(String::as_str).collect::<BTreeSet<_>>(), nodes);
        prop_assert!(pairs.iter().all(|(a, b)| g.has_edge(a, b)));
    }

    #[test]
    fn leave_labels_are_set_differences(evs in events()) {
        let now = build_snapshot(&evs, t0(), 20).unwrap();
        let later = build_snapshot(&evs, t0() + Duration::days(25), 20).unwrap();
        let l = label_leaves(&now, &later).unwrap();
        let a: BTreeSet<&String> = now.graph.nodes().iter().collect();
        let b: BTreeSet<&String> = later.graph.nodes().iter().collect();
        prop_assert_eq!(l.departed.iter().collect::<BTreeSet<_>>(), a.difference(&b).copied().collect());
        prop_assert_eq!(l.ignored.iter().collect::<BTreeSet<_>>(), b.difference(&a).copied().collect());
        prop_assert!(l.departed.is_subset(&l.initial_nodes));
    }

    #[test]
    fn csv_round_trip(evs in events()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("events.csv");
        let mut buf = Vec::new();
        write_events(&evs, &mut buf).unwrap();
        std::fs::write(&path, buf).unwrap();
        let back = parse_events(&path).unwrap().events;
        let mut sorted = evs.clone();
        sorted.sort_by_key(|e| e.timestamp);
        prop_assert_eq!(back, sorted);
    }
}

fn ev(ts: Timestamp, a: &str, b: &str, kind: EventKind) -> InteractionEvent {
    InteractionEvent { timestamp: ts, actor: a.into(), target: b.into(), kind }
}

#[test]
fn window_is_half_open() {
    let evs = [
        ev(t0(), "a", "b", EventKind::Comment),
        ev(t0() + Duration::days(7), "c", "d", EventKind::Comment),
        ev(t0() - Duration::seconds(1), "e", "f", EventKind::Comment),
    ];
    let g = build_snapshot(&evs, t0(), 7).unwrap().graph;
    assert_eq!(g.nodes(), ["a", "b"]);
}

#[test]
fn repeated_interactions_collapse() {
    let evs = [
        ev(t0(), "a", "b", EventKind::Comment),
        ev(t0() + Duration::hours(1), "b", "a", EventKind::Answer),
        ev(t0() + Duration::hours(2), "a", "b", EventKind::Comment),
    ];
    let g = build_snapshot(&evs, t0(), 1).unwrap().graph;
    assert_eq!(g.edge_count(), 1);
    let answers = build_snapshot_filtered(&evs, t0(), 1, Some(&[EventKind::Answer])).unwrap().graph;
    assert_eq!(answers.edge_count(), 1);
    let none = build_snapshot_filtered(&evs, t0(), 1, Some(&[EventKind::Other])).unwrap().graph;
    assert!(none.is_empty());
}

#[test]
fn zero_day_window_is_rejected() {
    assert!(build_snapshot(&[], t0(), 0).is_err());
}

#[test]
fn labeling_needs_a_later_window() {
    let s = build_snapshot(&[], t0(), 5).unwrap();
    assert!(label_leaves(&s, &s).is_err());
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.csv");
    std::fs::write(&path, "timestamp,actor,target,kind\n2020-01-01,a,b,comment\nnot-a-date,a,b,comment\n").unwrap();
    let err = parse_events(&path).unwrap_err().to_string();
    assert!(err.contains("line 3"), "{err}");
    std::fs::write(&path, "when,who,whom,what\n").unwrap();
    assert!(parse_events(&path).is_err());
    std::fs::write(&path, "timestamp,actor,target,kind\n2020-01-01,a,a,comment\n2020-01-01,a,b,vote\n").unwrap();
    let log = parse_events(&path).unwrap();
    assert_eq!(log.self_loops_dropped, 1);
    assert_eq!(log.events[0].kind, EventKind::Other);
}
