use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use qlbm_core::qstate::{
    apply_circuit_dense, circuit_to_operator, to_dense, unitarity_check, BasisLabel, Circuit, Gate, SparseState,
};

fn random_unit_pair(rng: &mut StdRng) -> (Complex64, Complex64) {
    let theta: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    let (pa, pb): (f64, f64) = (rng.random_range(-3.2..3.2), rng.random_range(-3.2..3.2));
    (
        Complex64::from_polar(theta.cos(), pa),
        Complex64::from_polar(theta.sin(), pb),
    )
}

fn random_gate(rng: &mut StdRng, n: usize) -> Gate {
    let mut qs: Vec<usize> = (0..n).collect();
    qs.shuffle(rng);
    match rng.random_range(0..5) {
        0 => Gate::X(qs[0]),
        1 if n > 1 => Gate::Swap(qs[0], qs[1]),
        2 if n > 1 => Gate::Cnot {
            control: qs[0],
            target: qs[1],
        },
        3 => {
            let mut dest: Vec<usize> = (0..n).collect();
            dest.shuffle(rng);
            Gate::Permute(dest)
        }
        _ => {
            let k = rng.random_range(0..n.min(4));
            let (alpha, beta) = random_unit_pair(rng);
            Gate::mc_rot(qs[1..=k].to_vec(), qs[0], alpha, beta).unwrap()
        }
    }
}

fn random_circuit(rng: &mut StdRng, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..len {
        c.push(random_gate(rng, n)).unwrap();
    }
    c
}

fn random_state(rng: &mut StdRng, n: usize, terms: usize) -> SparseState {
    let mut ts = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for _ in 0..terms {
        let idx = rng.random_range(0..1u64 << n);
        if seen.insert(idx) {
            ts.push((
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
                BasisLabel::from_index(idx, n),
            ));
        }
    }
    SparseState::superpose(&ts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sparse_matches_dense(seed in any::<u64>(), n in 1usize..=10, len in 0usize..30, terms in 1usize..6) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, n, len);
        let mut s = random_state(&mut rng, n, terms);
        let mut v = to_dense(&s).unwrap();
        s.apply_circuit(&c).unwrap();
        apply_circuit_dense(&mut v, &c).unwrap();
        let got = to_dense(&s).unwrap();
        for (a, b) in got.iter().zip(&v) {
            prop_assert!((a - b).norm() <= 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn norm_preserved(seed in any::<u64>(), n in 1usize..=20, len in 0usize..40) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, n, len);
        let mut s = random_state(&mut rng, n, 4);
        s.apply_circuit(&c).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn swap_is_an_involution(seed in any::<u64>(), n in 2usize..=16) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        prop_assume!(a != b);
        let s0 = random_state(&mut rng, n, 5);
        let mut s = s0.clone();
        s.apply_gate(&Gate::Swap(a, b)).unwrap();
        s.apply_gate(&Gate::Swap(a, b)).unwrap();
        prop_assert_eq!(s, s0);
    }

    #[test]
    fn trivial_rotation_is_identity(seed in any::<u64>(), n in 1usize..=12) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut qs: Vec<usize> = (0..n).collect();
        qs.shuffle(&mut rng);
        let k = rng.random_range(0..n);
        let g = Gate::mc_rot(qs[1..=k].to_vec(), qs[0], Complex64::new(1.0, 0.0), Complex64::default()).unwrap();
        let s0 = random_state(&mut rng, n, 6);
        let mut s = s0.clone();
        let eff = s.apply_gate(&g).unwrap();
        prop_assert_eq!(eff.merged, 0);
        prop_assert_eq!(s, s0);
    }

    #[test]
    fn permutation_then_inverse(seed in any::<u64>(), n in 1usize..=24) {
        let mut rng = StdRng::seed_from_u64(seed);
        let mut dest: Vec<usize> = (0..n).collect();
        dest.shuffle(&mut rng);
        let mut inv = vec![0; n];
        for (i, &d) in dest.iter().enumerate() {
            inv[d] = i;
        }
        let s0 = random_state(&mut rng, n, 6);
        let mut s = s0.clone();
        s.apply_gate(&Gate::Permute(dest)).unwrap();
        s.apply_gate(&Gate::Permute(inv)).unwrap();
        prop_assert_eq!(s, s0);
    }

    #[test]
    fn random_circuits_are_unitary(seed in any::<u64>(), n in 1usize..=6, len in 0usize..20) {
        let mut rng = StdRng::seed_from_u64(seed);
        let op = circuit_to_operator(&random_circuit(&mut rng, n, len)).unwrap();
        prop_assert!(unitarity_check(&op, 1e-12).passed());
    }
}

#[test]
fn permute_moves_values() {
    // value on qubit 0 goes to qubit 2
    let mut s = SparseState::init_basis(3, "100".parse().unwrap()).unwrap();
    s.apply_gate(&Gate::Permute(vec![2, 0, 1])).unwrap();
    assert_eq!(s.as_basis().unwrap().to_string(), "001");
}

#[test]
fn out_of_range_qubits_rejected() {
    let mut s = SparseState::init_basis(2, BasisLabel::zeros(2)).unwrap();
    assert!(s.apply_gate(&Gate::X(2)).is_err());
    assert!(s.apply_gate(&Gate::Swap(1, 1)).is_err());
    assert!(s.apply_gate(&Gate::Permute(vec![0, 0])).is_err());
    let mut c = Circuit::new(2);
    assert!(c.push(Gate::Cnot { control: 0, target: 5 }).is_err());
}

#[test]
fn interference_counted() {
    // two half-turn rotations recombine into a single basis state
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let g = Gate::mc_rot(vec![], 0, Complex64::new(h, 0.0), Complex64::new(h, 0.0)).unwrap();
    let mut s = SparseState::init_basis(1, "0".parse().unwrap()).unwrap();
    assert_eq!(s.apply_gate(&g).unwrap().merged, 0);
    assert_eq!(s.len(), 2);
    assert_eq!(s.apply_gate(&g).unwrap().merged, 1);
    assert_eq!(s.as_basis().unwrap().to_string(), "1");
}
