//! Space-time encoding of a lattice-gas window.
//!
//! A focal site carries one qubit for every (offset, direction) pair whose
//! offset lies within Manhattan distance `N_t` of it, where `N_t` is the
//! number of steps to run before readout. Offsets are ordered by
//! `(norm, lexicographic coordinates)` so the focal site comes first and each
//! shrinking radius is a prefix of the qubit index space. Qubit index is
//! `offset_index * m + direction`.
//!
//! Per step `t` only offsets within `N_t - t` of the focal site still matter,
//! so collision and streaming circuits shrink with `t`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{equivalence_classes, LatticeDescriptor};
use crate::qstate::{Circuit, Gate, ROTATION_NORM_TOL};

/// Number of lattice offsets with Manhattan norm at most `radius` in `dimension` dimensions.
pub fn von_neumann_ball_size(dimension: usize, radius: usize) -> usize {
    let r = radius;
    match dimension {
        1 => 2 * r + 1,
        2 => 2 * r * r + 2 * r + 1,
        d => {
            // sum_k 2^k C(d,k) C(r,k)
            (0..=d.min(r))
                .map(|k| (1usize << k) * binomial(d, k) * binomial(r, k))
                .sum()
        }
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn manhattan(offset: &[i32]) -> usize {
    offset.iter().map(|c| c.unsigned_abs() as usize).sum()
}

/// Bijection between (offset, direction) pairs of the vicinity and qubit indices.
#[derive(Debug, Clone)]
pub struct VicinityLayout {
    descriptor: LatticeDescriptor,
    extent: usize,
    offsets: Vec<Vec<i32>>,
    index: FxHashMap<Vec<i32>, usize>,
}

pub fn enumerate_vicinity(descriptor: &LatticeDescriptor, extent: usize) -> Result<VicinityLayout> {
    if !descriptor.is_von_neumann() {
        return Err(Error::UnknownLattice(format!(
            "{} (no von Neumann neighborhood)",
            descriptor.name()
        )));
    }
    let dim = descriptor.dimension();
    let n = extent as i32;
    let mut offsets: Vec<Vec<i32>> = vec![Vec::new()];
    for _ in 0..dim {
        offsets = offsets
            .into_iter()
            .flat_map(|prefix| {
                (-n..=n).map(move |c| {
                    let mut o = prefix.clone();
                    o.push(c);
                    o
                })
            })
            .filter(|o| manhattan(o) <= extent)
            .collect();
    }
    offsets.sort_by(|a, b| manhattan(a).cmp(&manhattan(b)).then_with(|| a.cmp(b)));
    let index = offsets.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
    Ok(VicinityLayout {
        descriptor: descriptor.clone(),
        extent,
        offsets,
        index,
    })
}

impl VicinityLayout {
    pub fn descriptor(&self) -> &LatticeDescriptor {
        &self.descriptor
    }

    /// `N_t`, the window radius.
    pub fn extent(&self) -> usize {
        self.extent
    }

    pub fn offsets(&self) -> &[Vec<i32>] {
        &self.offsets
    }

    pub fn num_qubits(&self) -> usize {
        self.offsets.len() * self.descriptor.num_directions()
    }

    /// Number of offsets with norm at most `radius` (a prefix of [`Self::offsets`]).
    pub fn offsets_within(&self, radius: usize) -> usize {
        self.offsets.partition_point(|o| manhattan(o) <= radius)
    }

    pub fn offset_index(&self, offset: &[i32]) -> Option<usize> {
        self.index.get(offset).copied()
    }

    pub fn qubit(&self, offset: &[i32], direction: usize) -> Option<usize> {
        let m = self.descriptor.num_directions();
        (direction < m)
            .then(|| self.offset_index(offset))
            .flatten()
            .map(|i| i * m + direction)
    }

    /// Inverse of [`Self::qubit`].
    pub fn location(&self, qubit: usize) -> (&[i32], usize) {
        let m = self.descriptor.num_directions();
        (&self.offsets[qubit / m], qubit % m)
    }

    /// Qubits of the focal site, `0..m`.
    pub fn focal_qubits(&self) -> Vec<usize> {
        (0..self.descriptor.num_directions()).collect()
    }
}

fn check_step(n_t: usize, t: usize) -> Result<()> {
    if t == 0 || t > n_t {
        Err(Error::StepOutOfRange { t, n_t })
    } else {
        Ok(())
    }
}

/// Closed-form qubit count `m * |ball(N_t)|`; for D2Q4 this is `8 N_t^2 + 8 N_t + 4`.
pub fn qubit_count_formula(descriptor: &LatticeDescriptor, n_t: usize) -> usize {
    descriptor.num_directions() * von_neumann_ball_size(descriptor.dimension(), n_t)
}

/// Closed-form swap count at step `t`: one swap per retained moving qubit,
/// `8 (N_t - t)^2 + 8 (N_t - t) + 4` for D2Q4.
pub fn swap_count_formula(descriptor: &LatticeDescriptor, n_t: usize, t: usize) -> Result<usize> {
    check_step(n_t, t)?;
    Ok(descriptor.moving_directions().len() * von_neumann_ball_size(descriptor.dimension(), n_t - t))
}

/// Closed-form count of local collisions at step `t`,
/// `2 (N_t - t)^2 + 2 (N_t - t) + 1` for D2Q4; zero for lattices without nontrivial classes.
pub fn collision_count_formula(descriptor: &LatticeDescriptor, n_t: usize, t: usize) -> Result<usize> {
    check_step(n_t, t)?;
    Ok(if collision_quad(descriptor).is_some() {
        von_neumann_ball_size(descriptor.dimension(), n_t - t)
    } else {
        0
    })
}

/// Coefficients of the local collision, `|alpha|^2 + |beta|^2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionParams {
    alpha: Complex64,
    beta: Complex64,
}

impl CollisionParams {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > ROTATION_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { alpha, beta })
    }

    pub fn real(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(Complex64::new(alpha, 0.0), Complex64::new(beta, 0.0))
    }

    /// `alpha = 1, beta = 0`: the collision acts as the identity.
    pub fn identity() -> Self {
        Self {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::default(),
        }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Whether one of the two outcomes has zero weight.
    pub fn is_deterministic(&self) -> bool {
        self.alpha.norm_sqr() == 0.0 || self.beta.norm_sqr() == 0.0
    }
}

/// The four moving directions `(d0, d1, d2, d3)` on which the pair class
/// `{d0+d2, d1+d3}` lives, or `None` when every class is a singleton.
pub fn collision_quad(descriptor: &LatticeDescriptor) -> Option<[usize; 4]> {
    equivalence_classes(descriptor).non_singleton().next()?;
    let moving = descriptor.moving_directions();
    let quad: [usize; 4] = moving.try_into().ok()?;
    (descriptor.opposite(quad[0]) == quad[2] && descriptor.opposite(quad[1]) == quad[3]).then_some(quad)
}

/// Local collision on four qubits `(q0, q1, q2, q3)`:
/// `|1010> -> a|1010> + b|0101>`, `|0101> -> -conj(b)|1010> + conj(a)|0101>`,
/// identity on the other 14 basis states.
///
/// Three CNOTs send `1010 -> 1110` and `0101 -> 1111`, a rotation on `q3`
/// controlled by `q0 q1 q2` mixes the pair, and the CNOTs are undone.
pub fn collision_local_circuit(params: &CollisionParams, quad: [usize; 4], num_qubits: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(num_qubits);
    append_local_collision(&mut circuit, params, quad)?;
    Ok(circuit)
}

fn append_local_collision(circuit: &mut Circuit, params: &CollisionParams, quad: [usize; 4]) -> Result<()> {
    for (i, q) in quad.iter().enumerate() {
        if quad[..i].contains(q) {
            return Err(Error::DuplicateQubit(*q));
        }
    }
    let [q0, q1, q2, q3] = quad;
    let cnots = [
        Gate::Cnot {
            control: q0,
            target: q1,
        },
        Gate::Cnot {
            control: q3,
            target: q0,
        },
        Gate::Cnot {
            control: q3,
            target: q2,
        },
    ];
    for g in &cnots {
        circuit.push(g.clone())?;
    }
    circuit.push(Gate::mc_rot(vec![q0, q1, q2], q3, params.alpha, params.beta)?)?;
    for g in cnots.iter().rev() {
        circuit.push(g.clone())?;
    }
    Ok(())
}

/// Local collisions on every offset within `radius` of the focal site.
/// Returns the circuit and the number of local collisions placed.
pub fn collision_circuit_for_radius(
    layout: &VicinityLayout,
    params: &CollisionParams,
    radius: usize,
) -> Result<(Circuit, usize)> {
    let mut circuit = Circuit::new(layout.num_qubits());
    let Some(quad) = collision_quad(layout.descriptor()) else {
        return Ok((circuit, 0));
    };
    let m = layout.descriptor().num_directions();
    let count = layout.offsets_within(radius.min(layout.extent()));
    for site in 0..count {
        append_local_collision(&mut circuit, params, quad.map(|j| site * m + j))?;
    }
    Ok((circuit, count))
}

/// Collision operator of step `t`: local collisions on offsets within `N_t - t`.
pub fn collision_total_circuit(layout: &VicinityLayout, params: &CollisionParams, t: usize) -> Result<Circuit> {
    check_step(layout.extent(), t)?;
    Ok(collision_circuit_for_radius(layout, params, layout.extent() - t)?.0)
}

/// Layered swap network for one streaming step, and the qubit permutation it realizes.
#[derive(Debug, Clone)]
pub struct StreamingStep {
    pub circuit: Circuit,
    /// The value on qubit `i` ends on qubit `dest[i]`.
    pub dest: Vec<usize>,
}

/// Streaming that makes every qubit `(o, j)` with `|o| <= radius` receive `(o - e_j, j)`.
///
/// Each direction line is handled as a cyclic shift of the segment running
/// from the first source to the last receiver, written as two reversals
/// (two layers of disjoint swaps). The value pushed off the end of a segment
/// wraps to its source end, where it is never read again.
pub fn streaming_circuit_for_radius(layout: &VicinityLayout, radius: usize) -> Result<StreamingStep> {
    let n = layout.num_qubits();
    let mut circuit = Circuit::new(n);
    let descriptor = layout.descriptor();
    if radius >= layout.extent() {
        if layout.extent() == 0 {
            return Ok(StreamingStep {
                circuit,
                dest: (0..n).collect(),
            });
        }
        return Err(Error::StepOutOfRange {
            t: 0,
            n_t: layout.extent(),
        });
    }
    let retained = &layout.offsets()[..layout.offsets_within(radius)];
    let mut layers: [Vec<(usize, usize)>; 2] = [Vec::new(), Vec::new()];
    for j in descriptor.moving_directions() {
        let e = descriptor.velocity(j);
        let axis = e.iter().position(|&c| c != 0).expect("moving direction");
        let sign = e[axis];
        // line key: offset with the streaming axis zeroed; value: positions along e_j
        let mut lines: BTreeMap<Vec<i32>, (i32, i32)> = BTreeMap::new();
        for o in retained {
            let mut key = o.clone();
            key[axis] = 0;
            let p = o[axis] * sign;
            let span = lines.entry(key).or_insert((p, p));
            span.0 = span.0.min(p);
            span.1 = span.1.max(p);
        }
        for (base, (lo, hi)) in lines {
            let qubits: Vec<usize> = (lo - 1..=hi)
                .map(|p| {
                    let mut o = base.clone();
                    o[axis] = p * sign;
                    layout.qubit(&o, j).expect("source within the window")
                })
                .collect();
            let len = qubits.len();
            for k in 0..len / 2 {
                layers[0].push((qubits[k], qubits[len - 1 - k]));
            }
            for k in 0..(len - 1) / 2 {
                layers[1].push((qubits[1 + k], qubits[len - 1 - k]));
            }
        }
    }
    for (layer, swaps) in layers.iter().enumerate() {
        for &(a, b) in swaps {
            circuit.push_layered(Gate::Swap(a, b), layer)?;
        }
    }
    // holder[pos] = qubit whose initial value sits on pos
    let mut holder: Vec<usize> = (0..n).collect();
    for &(a, b) in layers.iter().flatten() {
        holder.swap(a, b);
    }
    let mut dest = vec![0; n];
    for (pos, &orig) in holder.iter().enumerate() {
        dest[orig] = pos;
    }
    Ok(StreamingStep { circuit, dest })
}

/// Streaming of step `t`, valid on offsets within `N_t - t`.
pub fn streaming_step(layout: &VicinityLayout, t: usize) -> Result<StreamingStep> {
    check_step(layout.extent(), t)?;
    streaming_circuit_for_radius(layout, layout.extent() - t)
}

/// Measured depth of the layered streaming circuit at step `t`.
pub fn swap_depth(layout: &VicinityLayout, t: usize) -> Result<usize> {
    Ok(streaming_step(layout, t)?.circuit.depth())
}

/// Engineering depth bound `2 ceil(log2(max(2, N_t - t + 2)))`.
pub fn swap_depth_bound(n_t: usize, t: usize) -> usize {
    let x = 2usize.max(n_t + 2 - t);
    2 * x.next_power_of_two().trailing_zeros() as usize
}

/// Collision and streaming circuits of one time step.
#[derive(Debug, Clone)]
pub struct StepCircuits {
    pub t: usize,
    pub collision: Circuit,
    pub streaming: StreamingStep,
    pub c_applied: usize,
    pub swaps_applied: usize,
}

pub fn step_circuits(layout: &VicinityLayout, params: &CollisionParams, t: usize) -> Result<StepCircuits> {
    check_step(layout.extent(), t)?;
    let (collision, c_applied) = collision_circuit_for_radius(layout, params, layout.extent() - t)?;
    let streaming = streaming_step(layout, t)?;
    let swaps_applied = streaming.circuit.count(|g| matches!(g, Gate::Swap(..)));
    Ok(StepCircuits {
        t,
        collision,
        streaming,
        c_applied,
        swaps_applied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d2q4() -> LatticeDescriptor {
        LatticeDescriptor::build("D2Q4").unwrap()
    }

    #[test]
    fn vicinity_sizes() {
        let d = d2q4();
        assert_eq!(enumerate_vicinity(&d, 0).unwrap().num_qubits(), 4);
        assert_eq!(enumerate_vicinity(&d, 1).unwrap().num_qubits(), 20);
        assert_eq!(enumerate_vicinity(&d, 3).unwrap().num_qubits(), 100);
        assert_eq!(qubit_count_formula(&d, 2), 52);
    }

    #[test]
    fn focal_site_first_and_shells_ordered() {
        let layout = enumerate_vicinity(&d2q4(), 2).unwrap();
        assert_eq!(layout.offsets()[0], vec![0, 0]);
        assert_eq!(layout.focal_qubits(), vec![0, 1, 2, 3]);
        assert_eq!(
            &layout.offsets()[1..5],
            &[vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]
        );
        assert_eq!(layout.offsets_within(1), 5);
        assert_eq!(layout.qubit(&[0, -1], 2), Some(8 + 2));
        assert_eq!(layout.location(10), (&[0, -1][..], 2));
        assert_eq!(layout.qubit(&[3, 0], 0), None);
    }

    #[test]
    fn ball_size_closed_forms() {
        for r in 0..6 {
            assert_eq!(von_neumann_ball_size(1, r), 2 * r + 1);
            assert_eq!(von_neumann_ball_size(2, r), 2 * r * r + 2 * r + 1);
        }
        assert_eq!(von_neumann_ball_size(3, 1), 7);
        assert_eq!(von_neumann_ball_size(3, 2), 25);
    }

    #[test]
    fn step_formula_examples() {
        let d = d2q4();
        assert_eq!(swap_count_formula(&d, 1, 1).unwrap(), 4);
        assert_eq!(swap_count_formula(&d, 2, 1).unwrap(), 20);
        assert_eq!(collision_count_formula(&d, 2, 1).unwrap(), 5);
        for n_t in 1..5 {
            assert_eq!(collision_count_formula(&d, n_t, n_t).unwrap(), 1);
        }
        assert!(matches!(
            swap_count_formula(&d, 2, 3),
            Err(Error::StepOutOfRange { t: 3, n_t: 2 })
        ));
        assert!(collision_count_formula(&d, 2, 0).is_err());
        let d1 = LatticeDescriptor::build("D1Q2").unwrap();
        assert_eq!(collision_count_formula(&d1, 3, 1).unwrap(), 0);
    }

    #[test]
    fn collision_quads() {
        assert_eq!(collision_quad(&d2q4()), Some([0, 1, 2, 3]));
        assert_eq!(
            collision_quad(&LatticeDescriptor::build("D2Q5").unwrap()),
            Some([0, 1, 2, 3])
        );
        assert_eq!(collision_quad(&LatticeDescriptor::build("D1Q2").unwrap()), None);
        assert_eq!(collision_quad(&LatticeDescriptor::build("D1Q3").unwrap()), None);
    }

    #[test]
    fn local_collision_gate_structure() {
        let p = CollisionParams::real(0.6, 0.8).unwrap();
        let c = collision_local_circuit(&p, [0, 1, 2, 3], 4).unwrap();
        assert_eq!(c.len(), 7);
        assert_eq!(c.count(|g| matches!(g, Gate::Cnot { .. })), 6);
        assert_eq!(c.count(|g| matches!(g, Gate::McRot { .. })), 1);
        assert!(matches!(
            collision_local_circuit(&p, [0, 1, 1, 3], 4),
            Err(Error::DuplicateQubit(1))
        ));
        assert!(matches!(CollisionParams::real(0.8, 0.7), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn collision_counts_per_step() {
        let p = CollisionParams::real(0.0, 1.0).unwrap();
        for (n_t, t, expected) in [(1, 1, 1), (2, 1, 5), (3, 1, 13)] {
            let layout = enumerate_vicinity(&d2q4(), n_t).unwrap();
            let c = collision_total_circuit(&layout, &p, t).unwrap();
            assert_eq!(c.count(|g| matches!(g, Gate::McRot { .. })), expected);
        }
        let layout = enumerate_vicinity(&d2q4(), 1).unwrap();
        let c = collision_total_circuit(&layout, &p, 1).unwrap();
        let targets: Vec<Vec<usize>> = c
            .gates()
            .iter()
            .filter(|g| matches!(g, Gate::McRot { .. }))
            .map(Gate::qubits)
            .collect();
        assert_eq!(targets, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn single_step_streaming_pairs_focal_with_upstream_neighbors() {
        let d = d2q4();
        let layout = enumerate_vicinity(&d, 1).unwrap();
        let step = streaming_step(&layout, 1).unwrap();
        let mut swaps: Vec<(usize, usize)> = step
            .circuit
            .gates()
            .iter()
            .map(|g| match g {
                Gate::Swap(a, b) => ((*a).min(*b), (*a).max(*b)),
                other => panic!("unexpected gate {other:?}"),
            })
            .collect();
        swaps.sort();
        let mut expected: Vec<(usize, usize)> = (0..4)
            .map(|j| {
                let back: Vec<i32> = d.velocity(j).iter().map(|c| -c).collect();
                (j, layout.qubit(&back, j).unwrap())
            })
            .collect();
        expected.sort();
        assert_eq!(swaps, expected);
        assert_eq!(step.circuit.depth(), 1);
        step.circuit.validate_layering().unwrap();
    }

    #[test]
    fn zero_extent_has_no_steps() {
        let layout = enumerate_vicinity(&d2q4(), 0).unwrap();
        let s = streaming_circuit_for_radius(&layout, 0).unwrap();
        assert!(s.circuit.is_empty());
        assert!(streaming_step(&layout, 1).is_err());
    }

    #[test]
    fn depth_bound_values() {
        assert_eq!(swap_depth_bound(1, 1), 2);
        assert_eq!(swap_depth_bound(4, 1), 6);
        assert_eq!(swap_depth_bound(8, 1), 8);
        let layout = enumerate_vicinity(&d2q4(), 4).unwrap();
        assert!(swap_depth(&layout, 1).unwrap() <= 6);
    }

    #[test]
    fn rest_qubits_never_stream() {
        let d = LatticeDescriptor::build("D2Q5").unwrap();
        let layout = enumerate_vicinity(&d, 2).unwrap();
        for t in 1..=2 {
            let step = streaming_step(&layout, t).unwrap();
            for g in step.circuit.gates() {
                for q in g.qubits() {
                    assert_ne!(layout.location(q).1, 4);
                }
            }
        }
    }
}
