use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qlbm_core::lattice::{equivalence_classes, mass_momentum, stream_classical, LatticeDescriptor, Pattern};
use qlbm_core::qstate::{circuit_to_operator, unitarity_check, BasisLabel, SparseState};
use qlbm_core::simulator::Window;
use qlbm_core::spacetime::{
    collision_count_formula, collision_local_circuit, collision_quad, collision_total_circuit, enumerate_vicinity,
    qubit_count_formula, step_circuits, streaming_step, swap_count_formula, swap_depth, swap_depth_bound,
    CollisionParams,
};

fn d2q4() -> LatticeDescriptor {
    LatticeDescriptor::build("D2Q4").unwrap()
}

fn unit_params(rng: &mut StdRng) -> CollisionParams {
    let t: f64 = rng.random_range(0.0..std::f64::consts::FRAC_PI_2);
    CollisionParams::new(
        Complex64::from_polar(t.cos(), rng.random_range(-3.2..3.2)),
        Complex64::from_polar(t.sin(), rng.random_range(-3.2..3.2)),
    )
    .unwrap()
}

#[test]
fn d2q4_register_sizes() {
    let d = d2q4();
    for n in 0..=8usize {
        let enumerated = enumerate_vicinity(&d, n).unwrap().num_qubits();
        assert_eq!(enumerated, 8 * n * n + 8 * n + 4, "N_t = {n}");
        assert_eq!(qubit_count_formula(&d, n), enumerated);
    }
    assert_eq!(enumerate_vicinity(&d, 1).unwrap().num_qubits(), 20);
}

#[test]
fn other_lattice_register_sizes() {
    for (name, per_ball) in [("D1Q2", 2), ("D1Q3", 3), ("D2Q5", 5)] {
        let d = LatticeDescriptor::build(name).unwrap();
        for n in 0..=6usize {
            let ball = if d.dimension() == 1 {
                2 * n + 1
            } else {
                2 * n * n + 2 * n + 1
            };
            assert_eq!(enumerate_vicinity(&d, n).unwrap().num_qubits(), per_ball * ball);
            assert_eq!(qubit_count_formula(&d, n), per_ball * ball);
        }
    }
}

#[test]
fn d2q4_step_counts() {
    let d = d2q4();
    let params = CollisionParams::real(0.6, 0.8).unwrap();
    for n_t in 1..=6usize {
        let layout = enumerate_vicinity(&d, n_t).unwrap();
        for t in 1..=n_t {
            let r = n_t - t;
            let step = step_circuits(&layout, &params, t).unwrap();
            assert_eq!(step.c_applied, 2 * r * r + 2 * r + 1);
            assert_eq!(step.swaps_applied, 8 * r * r + 8 * r + 4);
            assert_eq!(collision_count_formula(&d, n_t, t).unwrap(), step.c_applied);
            assert_eq!(swap_count_formula(&d, n_t, t).unwrap(), step.swaps_applied);
            let total = collision_total_circuit(&layout, &params, t).unwrap();
            assert_eq!(total.len(), 7 * step.c_applied);
        }
    }
}

#[test]
fn step_counts_reject_bad_steps() {
    let d = d2q4();
    assert!(swap_count_formula(&d, 3, 0).is_err());
    assert!(swap_count_formula(&d, 3, 4).is_err());
    let layout = enumerate_vicinity(&d, 2).unwrap();
    assert!(streaming_step(&layout, 3).is_err());
}

#[test]
fn depth_within_bound() {
    for name in ["D1Q2", "D1Q3", "D2Q4", "D2Q5"] {
        let d = LatticeDescriptor::build(name).unwrap();
        for n_t in 1..=8usize {
            let layout = enumerate_vicinity(&d, n_t).unwrap();
            for t in 1..=n_t {
                let step = streaming_step(&layout, t).unwrap();
                step.circuit.validate_layering().unwrap();
                let depth = swap_depth(&layout, t).unwrap();
                assert!(depth <= swap_depth_bound(n_t, t), "{name} N_t={n_t} t={t}: {depth}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn streaming_matches_classical_window(seed in any::<u64>(), k in 0usize..4, n_t in 1usize..=4) {
        let d = LatticeDescriptor::build(["D1Q2", "D1Q3", "D2Q4", "D2Q5"][k]).unwrap();
        let mut rng = StdRng::seed_from_u64(seed);
        let layout = enumerate_vicinity(&d, n_t).unwrap();
        let bits: Vec<bool> = (0..layout.num_qubits()).map(|_| rng.random_bool(0.5)).collect();
        let window = Window::from_layout_bits(&layout, &bits).unwrap();
        let field = window.to_field();
        let streamed = stream_classical(&field);
        for t in 1..=n_t {
            let step = streaming_step(&layout, t).unwrap();
            let mut s = SparseState::init_basis(layout.num_qubits(), BasisLabel::from_bits(&bits)).unwrap();
            s.apply_circuit(&step.circuit).unwrap();
            let out = s.as_basis().unwrap().clone();
            for (q, &bit) in bits.iter().enumerate() {
                let (offset, j) = layout.location(q);
                let norm: usize = offset.iter().map(|c| c.unsigned_abs() as usize).sum();
                if norm > n_t - t {
                    continue;
                }
                let coords: Vec<i64> = offset.iter().map(|&c| c as i64 + n_t as i64).collect();
                prop_assert_eq!(out.get(q), streamed.get(streamed.site_index(&coords), j));
                prop_assert_eq!(out.get(step.dest[q]), bit);
            }
        }
    }

    #[test]
    fn local_collision_is_unitary(seed in any::<u64>()) {
        let params = unit_params(&mut StdRng::seed_from_u64(seed));
        let op = circuit_to_operator(&collision_local_circuit(&params, [0, 1, 2, 3], 4).unwrap()).unwrap();
        prop_assert!(unitarity_check(&op, 1e-12).passed());
        let idx = |s: &str| BasisLabel::from_bits(&s.chars().map(|c| c == '1').collect::<Vec<_>>()).to_index().unwrap() as usize;
        let (a, b) = (idx("1010"), idx("0101"));
        prop_assert!((op.get(a, a) - params.alpha()).norm() <= 1e-12);
        prop_assert!((op.get(b, a) - params.beta()).norm() <= 1e-12);
        prop_assert!((op.get(a, b) + params.beta().conj()).norm() <= 1e-12);
        prop_assert!((op.get(b, b) - params.alpha().conj()).norm() <= 1e-12);
        for col in (0..16).filter(|&c| c != a && c != b) {
            for row in 0..16 {
                let want = if row == col { 1.0 } else { 0.0 };
                prop_assert!((op.get(row, col) - want).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn collision_output_stays_in_class(seed in any::<u64>(), five in any::<bool>()) {
        let d = LatticeDescriptor::build(if five { "D2Q5" } else { "D2Q4" }).unwrap();
        let m = d.num_directions();
        let params = unit_params(&mut StdRng::seed_from_u64(seed));
        let c = collision_local_circuit(&params, collision_quad(&d).unwrap(), m).unwrap();
        let table = equivalence_classes(&d);
        for p in Pattern::all(m) {
            let label = BasisLabel::from_bits(&(0..m).map(|j| p.get(j)).collect::<Vec<_>>());
            let mut s = SparseState::init_basis(m, label).unwrap();
            s.apply_circuit(&c).unwrap();
            for (out, _) in s.iter() {
                let q = (0..m).fold(Pattern::empty(m), |acc, j| acc.with(j, out.get(j)));
                prop_assert!(table.class_of(p).contains(&q));
                prop_assert_eq!(mass_momentum(q, &d), mass_momentum(p, &d));
            }
        }
    }
}

#[test]
fn one_dimensional_lattices_have_no_collision() {
    for name in ["D1Q2", "D1Q3"] {
        let d = LatticeDescriptor::build(name).unwrap();
        assert!(collision_quad(&d).is_none());
        assert_eq!(collision_count_formula(&d, 3, 1).unwrap(), 0);
    }
}
