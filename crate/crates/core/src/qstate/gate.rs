use std::collections::BTreeSet;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance on `|alpha|^2 + |beta|^2 = 1` for controlled rotations.
pub const ROTATION_NORM_TOL: f64 = 1e-12;

/// Gate set of the engine: permutations plus one multi-controlled rotation.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X(usize),
    Swap(usize, usize),
    Cnot {
        control: usize,
        target: usize,
    },
    /// Qubit permutation: the value on qubit `i` moves to qubit `dest[i]`.
    Permute(Vec<usize>),
    /// When every control is 1, the target transforms by `[[a, -conj(b)], [b, conj(a)]]`
    /// in the basis `{|0>, |1>}`.
    McRot {
        controls: Vec<usize>,
        target: usize,
        alpha: Complex64,
        beta: Complex64,
    },
}

impl Gate {
    /// Checked multi-controlled rotation constructor.
    pub fn mc_rot(controls: Vec<usize>, target: usize, alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > ROTATION_NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        let gate = Gate::McRot {
            controls,
            target,
            alpha,
            beta,
        };
        gate.check_distinct()?;
        Ok(gate)
    }

    /// Permutation gate exchanging the listed qubit pairs.
    pub fn swaps(num_qubits: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut dest: Vec<usize> = (0..num_qubits).collect();
        for &(a, b) in pairs {
            for q in [a, b] {
                if q >= num_qubits {
                    return Err(Error::QubitOutOfRange { index: q, num_qubits });
                }
            }
            dest.swap(a, b);
        }
        let gate = Gate::Permute(dest);
        gate.validate(num_qubits)?;
        Ok(gate)
    }

    /// Qubits the gate acts on. For `Permute`, the qubits that actually move.
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X(q) => vec![*q],
            Gate::Swap(a, b) => vec![*a, *b],
            Gate::Cnot { control, target } => vec![*control, *target],
            Gate::Permute(dest) => dest
                .iter()
                .enumerate()
                .filter(|(i, d)| i != *d)
                .map(|(i, _)| i)
                .collect(),
            Gate::McRot { controls, target, .. } => {
                let mut qs = controls.clone();
                qs.push(*target);
                qs
            }
        }
    }

    pub fn is_permutation(&self) -> bool {
        !matches!(self, Gate::McRot { .. })
    }

    fn check_distinct(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for q in self.qubits() {
            if !seen.insert(q) {
                return Err(Error::DuplicateQubit(q));
            }
        }
        Ok(())
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if let Gate::Permute(dest) = self {
            if dest.len() != num_qubits {
                return Err(Error::InvalidPermutation(format!(
                    "length {} for a {num_qubits}-qubit register",
                    dest.len()
                )));
            }
            let mut seen = vec![false; num_qubits];
            for &d in dest {
                if d >= num_qubits || std::mem::replace(&mut seen[d], true) {
                    return Err(Error::InvalidPermutation(format!("{dest:?} is not a bijection")));
                }
            }
            return Ok(());
        }
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::QubitOutOfRange { index: q, num_qubits });
            }
        }
        self.check_distinct()?;
        if let Gate::McRot { alpha, beta, .. } = self {
            let norm = alpha.norm_sqr() + beta.norm_sqr();
            if (norm - 1.0).abs() > ROTATION_NORM_TOL {
                return Err(Error::NotNormalized(norm));
            }
        }
        Ok(())
    }

    /// Image of qubit position `q` under this gate, for permutation gates.
    pub(crate) fn permuted_position(&self, q: usize) -> usize {
        match self {
            Gate::Swap(a, b) if q == *a => *b,
            Gate::Swap(a, b) if q == *b => *a,
            Gate::Permute(dest) => dest[q],
            _ => q,
        }
    }
}

/// Ordered gate list over a fixed register, with optional per-gate layer annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    layers: Vec<Option<usize>>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
            layers: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn layers(&self) -> &[Option<usize>] {
        &self.layers
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        self.layers.push(None);
        Ok(())
    }

    pub fn push_layered(&mut self, gate: Gate, layer: usize) -> Result<()> {
        self.push(gate)?;
        *self.layers.last_mut().expect("just pushed") = Some(layer);
        Ok(())
    }

    /// Appends `other`, shifting its layer annotations past ours.
    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                got: other.num_qubits,
            });
        }
        let base = self.layers.iter().flatten().max().map_or(0, |l| l + 1);
        self.gates.extend(other.gates.iter().cloned());
        self.layers.extend(other.layers.iter().map(|l| l.map(|l| l + base)));
        Ok(())
    }

    pub fn count(&self, pred: impl Fn(&Gate) -> bool) -> usize {
        self.gates.iter().filter(|g| pred(g)).count()
    }

    /// Checks that annotated layers are contiguous in gate order and act on disjoint qubits.
    pub fn validate_layering(&self) -> Result<()> {
        let mut seen_layers = BTreeSet::new();
        let mut current: Option<usize> = None;
        let mut used = BTreeSet::new();
        for (gate, layer) in self.gates.iter().zip(&self.layers) {
            let Some(layer) = *layer else {
                return Err(Error::InvalidLayering("gate without layer annotation".into()));
            };
            if current != Some(layer) {
                if !seen_layers.insert(layer) {
                    return Err(Error::InvalidLayering(format!("layer {layer} is split")));
                }
                current = Some(layer);
                used.clear();
            }
            for q in gate.qubits() {
                if !used.insert(q) {
                    return Err(Error::InvalidLayering(format!("qubit {q} used twice in layer {layer}")));
                }
            }
        }
        Ok(())
    }

    /// Number of layers: the annotated layer count when every gate is annotated,
    /// otherwise an as-soon-as-possible schedule.
    pub fn depth(&self) -> usize {
        if !self.layers.is_empty() && self.layers.iter().all(Option::is_some) {
            return self.layers.iter().flatten().collect::<BTreeSet<_>>().len();
        }
        let mut ready = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for gate in &self.gates {
            let qs = gate.qubits();
            let level = qs.iter().map(|&q| ready[q]).max().unwrap_or(0) + 1;
            for q in qs {
                ready[q] = level;
            }
            depth = depth.max(level);
        }
        depth
    }
}
