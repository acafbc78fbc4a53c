use irrmot_core::partition::{enumerate_partitions, Partition};
use proptest::prelude::*;

fn p(v: &[u32]) -> Partition {
    Partition::new(v.to_vec()).unwrap()
}

#[test]
fn conjugate_examples() {
    assert_eq!(p(&[2, 1]).conjugate(), p(&[2, 1]));
    assert_eq!(p(&[3]).conjugate(), p(&[1, 1, 1]));
    assert_eq!(Partition::empty().conjugate(), Partition::empty());
}

#[test]
fn cell_stats_of_hook() {
    let s = p(&[2, 1]).cell_stats();
    let mut got: Vec<_> = s.cells.iter().map(|c| ((c.row, c.col), (c.arm, c.leg))).collect();
    got.sort();
    assert_eq!(got, vec![((1, 1), (1, 1)), ((1, 2), (0, 0)), ((2, 1), (0, 0))]);
    assert_eq!(s.n, 1);
    assert_eq!(s.self_pairing, 5);
    let legs: u64 = s.cells.iter().map(|c| 2 * c.leg as u64 + 1).sum();
    assert_eq!(legs, 5);
    let e = Partition::empty().cell_stats();
    assert_eq!((e.n, e.size, e.self_pairing, e.cells.len()), (0, 0, 0, 0));
}

#[test]
fn enumeration_counts() {
    assert_eq!(enumerate_partitions(0), vec![Partition::empty()]);
    assert_eq!(enumerate_partitions(3).len(), 7);
    let counts: Vec<usize> = (0..=5).map(|m| Partition::of_size(m).len()).collect();
    assert_eq!(counts, vec![1, 1, 2, 3, 5, 7]);
}

#[test]
fn invalid_partition_rejected() {
    assert!(Partition::new(vec![1, 2]).is_err());
    assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
    assert_eq!(serde_json::to_string(&p(&[3, 1])).unwrap(), "[3,1]");
}

#[test]
fn statistics_identities_up_to_eight() {
    for mu in enumerate_partitions(8) {
        let cells = mu.cells();
        let pair = mu.pairing(&mu);
        assert_eq!(pair, 2 * mu.n() + mu.size() as u64);
        assert_eq!(pair, cells.iter().map(|c| 2 * c.leg as u64 + 1).sum::<u64>());
        assert_eq!(mu.conjugate().n(), cells.iter().map(|c| c.arm as u64).sum::<u64>());
        assert_eq!(mu.conjugate().conjugate(), mu);
        assert_eq!(pair % 2, mu.size() as u64 % 2);
        let conj = mu.conjugate().cells();
        for c in &cells {
            let t = conj.iter().find(|d| d.row == c.col && d.col == c.row).unwrap();
            assert_eq!(c.arm, t.leg);
            assert_eq!(c.leg, t.arm);
        }
    }
}

fn arb_partition() -> impl Strategy<Value = Partition> {
    prop::collection::vec(1u32..=5, 0..5).prop_map(Partition::from_unsorted)
}

proptest! {
    #[test]
    fn pairing_is_symmetric(a in arb_partition(), b in arb_partition()) {
        prop_assert_eq!(a.pairing(&b), b.pairing(&a));
    }
}
