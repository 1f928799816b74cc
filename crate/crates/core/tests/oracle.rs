mod common;

use hypersre::oracle::abs_overlaps_for_x;
use hypersre::sre::two_h;
use hypersre::{
    brute_pl_moment, chain, eq9_expectation, exact_pl_moment, pauli_expectation, statevector, union_jack, Alpha,
    BitVec, EnumOptions, Hypergraph3, Moment, PauliLabel,
};
use proptest::prelude::*;

fn arb_hypergraph(max_n: usize, clifford: bool) -> impl Strategy<Value = Hypergraph3> {
    (3..=max_n, any::<u64>(), 0.05f64..0.6).prop_map(move |(n, seed, p)| {
        common::random_hypergraph(&mut common::rng(seed), n, p, clifford)
    })
}

fn assert_moments_match(fast: &Moment, slow: &Moment) {
    match (fast, slow) {
        (Moment::Exact(a), Moment::Exact(b)) => assert_eq!(a, b),
        (a, b) => {
            let (a, b) = (a.to_f64(), b.to_f64());
            assert!((a - b).abs() <= 1e-10 * b.abs(), "{a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_formula_matches_pauli_sum(h in arb_hypergraph(8, false)) {
        for alpha in [2.0, 3.0, 1.5, 2.3, 0.5] {
            let a = Alpha::new(alpha).unwrap();
            let fast = exact_pl_moment(&h, a, &EnumOptions::default()).unwrap();
            let slow = brute_pl_moment(&h, a).unwrap();
            assert_moments_match(&fast, &slow);
        }
    }

    #[test]
    fn phase_sum_matches_statevector(h in arb_hypergraph(6, true)) {
        let n = h.n();
        let psi = statevector(&h).unwrap();
        for x in 0..1u64 << n {
            for z in 0..1u64 << n {
                let p = PauliLabel::from_masks(n, x, z);
                let direct = pauli_expectation(&psi, &p).unwrap().abs();
                prop_assert_eq!(direct, eq9_expectation(&h, &p).unwrap());
            }
        }
    }

    #[test]
    fn clifford_edges_do_not_change_moment(h in arb_hypergraph(8, true)) {
        let bare = h.without_clifford_edges();
        for alpha in [2.0, 3.0] {
            let a = Alpha::new(alpha).unwrap();
            prop_assert_eq!(brute_pl_moment(&h, a).unwrap(), brute_pl_moment(&bare, a).unwrap());
            prop_assert_eq!(
                exact_pl_moment(&h, a, &EnumOptions::default()).unwrap(),
                exact_pl_moment(&bare, a, &EnumOptions::default()).unwrap()
            );
        }
    }

    #[test]
    fn nonzero_expectations_have_rank_structure(h in arb_hypergraph(8, true)) {
        let n = h.n();
        let psi = statevector(&h).unwrap();
        for x in 0..1usize << n {
            let hx = two_h(&h, &BitVec::from_u64(n, x as u64)).unwrap() / 2;
            let nonzero: Vec<u64> = abs_overlaps_for_x(&psi, x).into_iter().filter(|&v| v != 0).collect();
            prop_assert_eq!(nonzero.len(), 1 << (2 * hx));
            prop_assert!(nonzero.iter().all(|&v| v == 1 << (n - hx)));
        }
    }
}

#[test]
fn lattices_match_pauli_sum() {
    for h in [chain(3).unwrap(), chain(8).unwrap(), union_jack(2).unwrap()] {
        for alpha in [2.0, 3.0] {
            let a = Alpha::new(alpha).unwrap();
            assert_eq!(
                exact_pl_moment(&h, a, &EnumOptions::default()).unwrap(),
                brute_pl_moment(&h, a).unwrap()
            );
        }
    }
}

#[test]
fn statevector_is_normalized() {
    for h in common::corpus(5, 20, &[3, 6, 10, 14]) {
        assert!((statevector(&h).unwrap().norm_squared() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn oracle_caps_are_enforced() {
    assert!(statevector(&chain(15).unwrap()).unwrap_err().is_capacity());
    assert!(brute_pl_moment(&chain(9).unwrap(), Alpha::Finite(2.0)).unwrap_err().is_capacity());
}
