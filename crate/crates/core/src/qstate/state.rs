use std::collections::BTreeMap;

use num_complex::Complex64;
use rustc_hash::{FxHashMap, FxHashSet};

use super::gate::{Circuit, Gate};
use super::label::BasisLabel;
use crate::error::{Error, Result};

/// Amplitudes below this magnitude are dropped after a rotation.
pub const PRUNE_THRESHOLD: f64 = 1e-14;

/// What a gate application did to the entry set.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct GateEffect {
    /// Entries whose controls were all set (rotations only).
    pub active: usize,
    /// Pairs where both target branches were populated and the rotation mixes them.
    pub merged: usize,
}

impl GateEffect {
    pub fn branched(&self) -> bool {
        self.active > 0
    }
}

/// Accumulated statistics of a circuit application.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CircuitEffect {
    /// Rotations that acted on at least one entry.
    pub branching_rotations: usize,
    pub merged_pairs: usize,
    pub peak_entries: usize,
}

impl CircuitEffect {
    pub fn absorb(&mut self, other: CircuitEffect) {
        self.branching_rotations += other.branching_rotations;
        self.merged_pairs += other.merged_pairs;
        self.peak_entries = self.peak_entries.max(other.peak_entries);
    }
}

/// Sparse statevector: basis label to complex amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    num_qubits: usize,
    entries: FxHashMap<BasisLabel, Complex64>,
}

impl SparseState {
    pub fn init_basis(num_qubits: usize, label: BasisLabel) -> Result<Self> {
        if label.width() != num_qubits {
            return Err(Error::WidthMismatch {
                expected: num_qubits,
                got: label.width(),
            });
        }
        let mut entries = FxHashMap::default();
        entries.insert(label, Complex64::new(1.0, 0.0));
        Ok(Self { num_qubits, entries })
    }

    /// Normalized superposition of distinct basis labels. Zero-weight terms are dropped.
    pub fn superpose(terms: &[(Complex64, BasisLabel)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::ZeroVector);
        };
        let num_qubits = first.width();
        let mut entries = FxHashMap::default();
        let mut seen = FxHashSet::default();
        for (w, label) in terms {
            if label.width() != num_qubits {
                return Err(Error::WidthMismatch {
                    expected: num_qubits,
                    got: label.width(),
                });
            }
            if !seen.insert(label.clone()) {
                return Err(Error::DuplicateLabel(label.to_string()));
            }
            if w.norm() > 0.0 {
                entries.insert(label.clone(), *w);
            }
        }
        let norm = entries.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        for a in entries.values_mut() {
            *a /= norm;
        }
        Ok(Self { num_qubits, entries })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    /// Number of stored amplitudes.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn amplitude(&self, label: &BasisLabel) -> Complex64 {
        self.entries.get(label).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisLabel, &Complex64)> {
        self.entries.iter()
    }

    /// Entries sorted by label, for deterministic output.
    pub fn sorted_entries(&self) -> Vec<(BasisLabel, Complex64)> {
        let mut v: Vec<_> = self.entries.iter().map(|(l, a)| (l.clone(), *a)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    /// The single basis label if the state has exactly one entry.
    pub fn as_basis(&self) -> Option<&BasisLabel> {
        (self.entries.len() == 1).then(|| self.entries.keys().next().expect("one entry"))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner_product(&self, other: &SparseState) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::default();
        for (label, a) in &small.entries {
            if let Some(b) = large.entries.get(label) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<GateEffect> {
        gate.validate(self.num_qubits)?;
        match gate {
            Gate::X(q) => {
                self.remap(|l| l.flip(*q));
                Ok(GateEffect::default())
            }
            Gate::Cnot { control, target } => {
                self.remap(|l| {
                    if l.get(*control) {
                        l.flip(*target)
                    }
                });
                Ok(GateEffect::default())
            }
            Gate::Swap(_, _) | Gate::Permute(_) => {
                let moved = gate.qubits();
                self.remap(|l| {
                    let old: Vec<bool> = moved.iter().map(|&q| l.get(q)).collect();
                    for (&q, b) in moved.iter().zip(old) {
                        l.set(gate.permuted_position(q), b);
                    }
                });
                Ok(GateEffect::default())
            }
            Gate::McRot {
                controls,
                target,
                alpha,
                beta,
            } => Ok(self.rotate(controls, *target, *alpha, *beta)),
        }
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<CircuitEffect> {
        self.apply_circuit_capped(circuit, usize::MAX)
    }

    /// Applies `circuit`, failing once the entry count exceeds `cap`.
    pub fn apply_circuit_capped(&mut self, circuit: &Circuit, cap: usize) -> Result<CircuitEffect> {
        if circuit.num_qubits() != self.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                got: circuit.num_qubits(),
            });
        }
        let mut effect = CircuitEffect {
            peak_entries: self.len(),
            ..Default::default()
        };
        for gate in circuit.gates() {
            let g = self.apply_gate(gate)?;
            if g.branched() {
                effect.branching_rotations += 1;
            }
            effect.merged_pairs += g.merged;
            effect.peak_entries = effect.peak_entries.max(self.len());
            if self.len() > cap {
                return Err(Error::MemoryBudget { count: self.len(), cap });
            }
        }
        Ok(effect)
    }

    fn remap(&mut self, f: impl Fn(&mut BasisLabel)) {
        let old = std::mem::take(&mut self.entries);
        self.entries.reserve(old.len());
        for (mut label, amp) in old {
            f(&mut label);
            self.entries.insert(label, amp);
        }
    }

    fn rotate(&mut self, controls: &[usize], target: usize, alpha: Complex64, beta: Complex64) -> GateEffect {
        let mut groups: Vec<BasisLabel> = Vec::new();
        let mut seen: FxHashSet<BasisLabel> = FxHashSet::default();
        let mut effect = GateEffect::default();
        // a rotation with alpha or beta zero only relabels and rephases
        let mixing = alpha != Complex64::default() && beta != Complex64::default();
        for label in self.entries.keys() {
            if controls.iter().all(|&c| label.get(c)) {
                effect.active += 1;
                let mut low = label.clone();
                low.set(target, false);
                if seen.insert(low.clone()) {
                    groups.push(low);
                } else if mixing {
                    effect.merged += 1;
                }
            }
        }
        for low in groups {
            let high = low.with_flipped(target);
            let a0 = self.entries.remove(&low).unwrap_or_default();
            let a1 = self.entries.remove(&high).unwrap_or_default();
            let n0 = alpha * a0 - beta.conj() * a1;
            let n1 = beta * a0 + alpha.conj() * a1;
            if n0.norm() >= PRUNE_THRESHOLD {
                self.entries.insert(low, n0);
            }
            if n1.norm() >= PRUNE_THRESHOLD {
                self.entries.insert(high, n1);
            }
        }
        effect
    }

    /// Exact marginal distribution of the given qubits (in the given order).
    pub fn marginal(&self, qubits: &[usize]) -> Result<BTreeMap<BasisLabel, f64>> {
        if let Some(&q) = qubits.iter().find(|&&q| q >= self.num_qubits) {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        let mut out: BTreeMap<BasisLabel, f64> = BTreeMap::new();
        for (label, amp) in &self.entries {
            *out.entry(label.project(qubits)).or_default() += amp.norm_sqr();
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn l(s: &str) -> BasisLabel {
        s.parse().unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn init_basis_examples() {
        let s = SparseState::init_basis(4, l("1010")).unwrap();
        assert_eq!(s.amplitude(&l("1010")), c(1.0));
        assert_eq!(s.len(), 1);
        let s = SparseState::init_basis(20, BasisLabel::zeros(20)).unwrap();
        assert_eq!(s.as_basis(), Some(&BasisLabel::zeros(20)));
        assert!(matches!(
            SparseState::init_basis(4, l("10100")),
            Err(Error::WidthMismatch { expected: 4, got: 5 })
        ));
    }

    #[test]
    fn superpose_examples() {
        let s = SparseState::superpose(&[(c(1.0), l("0000")), (c(1.0), l("1111"))]).unwrap();
        assert!((s.amplitude(&l("0000")).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitude(&l("1111")).re - FRAC_1_SQRT_2).abs() < 1e-15);

        let s = SparseState::superpose(&[(c(2.0), l("01")), (c(0.0), l("10"))]).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.amplitude(&l("01")), c(1.0));

        assert!(matches!(
            SparseState::superpose(&[(c(1.0), l("01")), (c(1.0), l("01"))]),
            Err(Error::DuplicateLabel(_))
        ));
        assert!(matches!(
            SparseState::superpose(&[(c(0.0), l("01"))]),
            Err(Error::ZeroVector)
        ));
        assert!(matches!(SparseState::superpose(&[]), Err(Error::ZeroVector)));
    }

    #[test]
    fn cnot_on_leftmost_control() {
        let mut s = SparseState::init_basis(2, l("10")).unwrap();
        s.apply_gate(&Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(s.as_basis(), Some(&l("11")));
    }

    #[test]
    fn permute_exchanges_bit_positions() {
        let g = Gate::swaps(20, &[(0, 12), (1, 17), (2, 6), (3, 11)]).unwrap();
        let mut bits = vec![false; 20];
        bits[0] = true;
        bits[1] = true;
        bits[11] = true;
        let mut s = SparseState::init_basis(20, BasisLabel::from_bits(&bits)).unwrap();
        s.apply_gate(&g).unwrap();
        let got: Vec<usize> = s.as_basis().unwrap().ones().collect();
        assert_eq!(got, vec![3, 12, 17]);
    }

    #[test]
    fn mc_rot_splits_active_entry() {
        let h = c(FRAC_1_SQRT_2);
        let g = Gate::mc_rot(vec![0, 1, 2], 3, h, h).unwrap();
        let mut s = SparseState::init_basis(4, l("1110")).unwrap();
        let eff = s.apply_gate(&g).unwrap();
        assert_eq!(eff, GateEffect { active: 1, merged: 0 });
        assert_eq!(s.len(), 2);
        assert!((s.amplitude(&l("1110")) - h).norm() < 1e-15);
        assert!((s.amplitude(&l("1111")) - h).norm() < 1e-15);

        // inactive controls leave the state alone
        let mut s = SparseState::init_basis(4, l("1010")).unwrap();
        assert_eq!(s.apply_gate(&g).unwrap().active, 0);
        assert_eq!(s.as_basis(), Some(&l("1010")));
    }

    #[test]
    fn mc_rot_interference_is_reported_and_exact() {
        let h = c(FRAC_1_SQRT_2);
        let g = Gate::mc_rot(vec![0], 1, h, h).unwrap();
        let mut s = SparseState::init_basis(2, l("10")).unwrap();
        s.apply_gate(&g).unwrap();
        // second application: [[h,-h],[h,h]]^2 = [[0,-1],[1,0]]
        let eff = s.apply_gate(&g).unwrap();
        assert_eq!(eff.merged, 1);
        assert_eq!(s.len(), 1);
        assert!((s.amplitude(&l("11")) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_products() {
        let a = SparseState::superpose(&[(c(1.0), l("00")), (c(1.0), l("11"))]).unwrap();
        let b = SparseState::superpose(&[(c(1.0), l("00")), (Complex64::new(0.0, 1.0), l("01"))]).unwrap();
        assert!((a.inner_product(&a).unwrap() - c(1.0)).norm() < 1e-15);
        assert!((a.inner_product(&b).unwrap() - c(0.5)).norm() < 1e-15);
        let ab = a.inner_product(&b).unwrap();
        let ba = b.inner_product(&a).unwrap();
        assert!((ab - ba.conj()).norm() < 1e-15);
        let three = SparseState::init_basis(3, l("000")).unwrap();
        assert!(a.inner_product(&three).is_err());
    }

    #[test]
    fn out_of_range_gate_rejected() {
        let mut s = SparseState::init_basis(2, l("00")).unwrap();
        assert!(matches!(
            s.apply_gate(&Gate::X(2)),
            Err(Error::QubitOutOfRange {
                index: 2,
                num_qubits: 2
            })
        ));
    }

    #[test]
    fn capped_application_errors() {
        let h = c(FRAC_1_SQRT_2);
        let mut circuit = Circuit::new(3);
        for q in 0..3 {
            circuit.push(Gate::mc_rot(vec![], q, h, h).unwrap()).unwrap();
        }
        let mut s = SparseState::init_basis(3, l("000")).unwrap();
        assert!(matches!(
            s.apply_circuit_capped(&circuit, 4),
            Err(Error::MemoryBudget { count: 8, cap: 4 })
        ));
    }

    #[test]
    fn marginal_sums_over_other_qubits() {
        let s = SparseState::superpose(&[(c(1.0), l("100")), (c(1.0), l("101")), (c(1.0), l("010"))]).unwrap();
        let m = s.marginal(&[0]).unwrap();
        assert!((m[&l("1")] - 2.0 / 3.0).abs() < 1e-15);
        assert!((m[&l("0")] - 1.0 / 3.0).abs() < 1e-15);
    }
}
