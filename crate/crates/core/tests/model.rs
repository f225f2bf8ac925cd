mod common;

use common::*;
use proptest::prelude::*;
use qubo_arena::solvers::solve_exact;
use qubo_arena::{
    ising_to_qubo, qubo_to_ising, BinaryAssignment, Error, QuboEntry, QuboProblem, SpinAssignment,
};
use rand::Rng;

#[test]
fn energy_matches_double_loop() {
    for seed in 0..5 {
        let p = random_qubo(10, 0.5, seed);
        let m = dense(&p);
        for w in 0..1u64 << 10 {
            let x = bits(w, 10);
            let e = p.energy(&BinaryAssignment(x.clone())).unwrap();
            assert!((e - naive_energy(&m, p.offset(), &x)).abs() < 1e-9);
        }
    }
}

#[test]
fn ising_min_matches_exact() {
    let ising = random_ising(12, 3);
    let by_spins = (0..1u64 << 12)
        .map(|w| naive_ising(&ising, &spins(w, 12)))
        .fold(f64::INFINITY, f64::min);
    let run = solve_exact(&ising_to_qubo(&ising)).unwrap();
    assert!((run.best_energy - by_spins).abs() < 1e-9);
}

#[test]
fn ising_to_qubo_agrees_on_all_assignments() {
    let ising = random_ising(10, 11);
    let q = ising_to_qubo(&ising);
    for w in 0..1u64 << 10 {
        let s = spins(w, 10);
        let x = SpinAssignment(s.clone()).to_binary();
        assert!((q.energy(&x).unwrap() - naive_ising(&ising, &s)).abs() < 1e-9);
    }
}

#[test]
fn qubo_round_trip_n8() {
    let p = random_qubo(8, 0.7, 21);
    let back = ising_to_qubo(&qubo_to_ising(&p));
    let m = dense(&p);
    let mut worst = 0.0f64;
    for w in 0..256 {
        let x = bits(w, 8);
        let e = back.energy(&BinaryAssignment(x.clone())).unwrap();
        worst = worst.max((e - naive_energy(&m, p.offset(), &x)).abs());
    }
    assert!(worst < 1e-9, "{worst}");
}

#[test]
fn flip_delta_matches_recompute() {
    let p = random_qubo(16, 0.4, 8);
    let mut r = rng(99);
    for _ in 0..1000 {
        let x = BinaryAssignment((0..16).map(|_| r.random_range(0..2u8)).collect());
        let i = r.random_range(0..16);
        let mut y = x.clone();
        y.flip(i);
        let full = p.energy(&y).unwrap() - p.energy(&x).unwrap();
        assert!((p.flip_delta(&x, i).unwrap() - full).abs() < 1e-9);
    }
}

#[test]
fn length_mismatch_rejected() {
    let p = random_qubo(4, 1.0, 0);
    assert!(matches!(p.energy(&BinaryAssignment(vec![0; 3])), Err(Error::Dimension { .. })));
    assert!(matches!(p.flip_delta(&BinaryAssignment(vec![0; 4]), 4), Err(Error::IndexOutOfRange { .. })));
    assert!(QuboProblem::new(2, vec![QuboEntry { i: 0, j: 2, q: 1.0 }], 0.0).is_err());
    assert!(QuboProblem::new(2, vec![QuboEntry { i: 1, j: 0, q: 1.0 }], 0.0).is_err());
    let dup = vec![QuboEntry { i: 0, j: 1, q: 1.0 }, QuboEntry { i: 0, j: 1, q: 2.0 }];
    assert!(QuboProblem::new(2, dup, 0.0).is_err());
}

fn arb_qubo() -> impl Strategy<Value = (QuboProblem, Vec<u8>)> {
    (1usize..12).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        let len = pairs.len();
        (
            proptest::collection::vec(prop_oneof![Just(0.0), -5.0..5.0f64], len),
            -3.0..3.0f64,
            proptest::collection::vec(0u8..2, n),
        )
            .prop_map(move |(ws, off, x)| {
                let entries = pairs
                    .iter()
                    .zip(ws)
                    .filter(|(_, w)| *w != 0.0)
                    .map(|(&(i, j), q)| QuboEntry { i, j, q })
                    .collect();
                (QuboProblem::new(n, entries, off).unwrap(), x)
            })
    })
}

proptest! {
    #[test]
    fn stored_entries_are_canonical((p, _x) in arb_qubo()) {
        let mut seen = std::collections::HashSet::new();
        for e in p.entries() {
            prop_assert!(e.i <= e.j && e.j < p.num_vars());
            prop_assert!(e.q != 0.0);
            prop_assert!(seen.insert((e.i, e.j)));
        }
    }

    #[test]
    fn conversions_preserve_energy((p, x) in arb_qubo()) {
        let e = p.energy(&BinaryAssignment(x.clone())).unwrap();
        prop_assert!(e.is_finite());
        let ising = qubo_to_ising(&p);
        let s = BinaryAssignment(x.clone()).to_spins();
        prop_assert!((ising.energy(&s).unwrap() - e).abs() < 1e-9);
        prop_assert!((naive_ising(&ising, &s.0) - e).abs() < 1e-9);
        for c in ising.couplings() {
            prop_assert!(c.i < c.j);
        }
        let back = ising_to_qubo(&ising);
        prop_assert!((back.energy(&BinaryAssignment(x)).unwrap() - e).abs() < 1e-9);
    }

    #[test]
    fn flip_delta_is_energy_difference((p, x) in arb_qubo(), k in 0usize..12) {
        let k = k % p.num_vars();
        let x = BinaryAssignment(x);
        let mut y = x.clone();
        y.flip(k);
        let d = p.energy(&y).unwrap() - p.energy(&x).unwrap();
        prop_assert!((p.flip_delta(&x, k).unwrap() - d).abs() < 1e-9);
    }

    #[test]
    fn spin_binary_bijection(x in proptest::collection::vec(0u8..2, 1..40)) {
        let b = BinaryAssignment(x);
        prop_assert_eq!(b.to_spins().to_binary(), b);
    }
}
