use fuglede_core::catalog::{four_profile, load_dir, vendored_fixtures_dir};
use fuglede_core::gf2::{dephased_rank, RANK_BOUND};

fn order_dir(order: usize) -> std::path::PathBuf {
    vendored_fixtures_dir().join(format!("order-{order}"))
}

#[test]
fn fixtures_are_hadamard_with_expected_ranks() {
    for (order, rank) in [(20, 18), (24, 11), (28, 26)] {
        let entries = load_dir(&order_dir(order), order, true).unwrap();
        assert!(!entries.is_empty());
        for e in &entries {
            assert!(e.matrix.is_hadamard());
            let r = dephased_rank(&e.matrix);
            assert_eq!(r, rank, "{}", e.class_label);
            assert!(r > RANK_BOUND);
        }
    }
}

#[test]
fn fixtures_are_pairwise_inequivalent() {
    for order in [20, 24, 28] {
        let entries = load_dir(&order_dir(order), order, true).unwrap();
        let mut profiles: Vec<_> = entries.iter().map(|e| four_profile(&e.matrix)).collect();
        let n = profiles.len();
        profiles.sort();
        profiles.dedup();
        assert_eq!(profiles.len(), n, "order {order}");
    }
}
