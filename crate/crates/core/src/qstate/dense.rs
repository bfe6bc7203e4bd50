//! Dense vectors and operators for small registers.
//!
//! Gates are applied here with plain integer index arithmetic, independent of
//! the sparse label path, so the two can be cross-checked. Index ordering is
//! big-endian: qubit 0 is the most significant bit.

use num_complex::Complex64;

use super::gate::{Circuit, Gate};
use super::state::SparseState;
use crate::error::{Error, Result};

/// Largest register expanded to a dense vector.
pub const DENSE_CAP: usize = 16;
/// Largest register expanded to a dense operator.
pub const OPERATOR_CAP: usize = 12;

/// Square `2^k x 2^k` complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    num_qubits: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn identity(num_qubits: usize) -> Result<Self> {
        check_cap(num_qubits, OPERATOR_CAP)?;
        let dim = 1usize << num_qubits;
        let mut data = vec![Complex64::default(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { num_qubits, data })
    }

    /// Builds from row-major entries; the length must be `4^k`.
    pub fn from_rows(num_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        check_cap(num_qubits, OPERATOR_CAP)?;
        let dim = 1usize << num_qubits;
        if data.len() != dim * dim {
            return Err(Error::InvalidField(format!(
                "operator needs {} entries, got {}",
                dim * dim,
                data.len()
            )));
        }
        Ok(Self { num_qubits, data })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        let dim = self.dim();
        self.data[row * dim + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim()).map(|r| self.get(r, col)).collect()
    }

    pub fn adjoint(&self) -> Self {
        let dim = self.dim();
        let mut data = vec![Complex64::default(); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[c * dim + r] = self.data[r * dim + c].conj();
            }
        }
        Self {
            num_qubits: self.num_qubits,
            data,
        }
    }

    pub fn matmul(&self, rhs: &DenseOperator) -> Result<Self> {
        if self.num_qubits != rhs.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                got: rhs.num_qubits,
            });
        }
        let dim = self.dim();
        let mut data = vec![Complex64::default(); dim * dim];
        for r in 0..dim {
            for k in 0..dim {
                let a = self.data[r * dim + k];
                if a == Complex64::default() {
                    continue;
                }
                for c in 0..dim {
                    data[r * dim + c] += a * rhs.data[k * dim + c];
                }
            }
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            data,
        })
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let dim = self.dim();
        if v.len() != dim {
            return Err(Error::WidthMismatch {
                expected: dim,
                got: v.len(),
            });
        }
        Ok((0..dim)
            .map(|r| (0..dim).map(|c| self.data[r * dim + c] * v[c]).sum())
            .collect())
    }
}

fn check_cap(num_qubits: usize, cap: usize) -> Result<()> {
    if num_qubits > cap {
        Err(Error::RegisterTooLarge { num_qubits, cap })
    } else {
        Ok(())
    }
}

pub fn to_dense(state: &SparseState) -> Result<Vec<Complex64>> {
    let n = state.num_qubits();
    check_cap(n, DENSE_CAP)?;
    let mut v = vec![Complex64::default(); 1 << n];
    for (label, amp) in state.iter() {
        v[label.to_index().expect("within dense cap") as usize] = *amp;
    }
    Ok(v)
}

/// Dense basis vector `e_index`.
pub fn basis_vector(num_qubits: usize, index: usize) -> Result<Vec<Complex64>> {
    check_cap(num_qubits, DENSE_CAP)?;
    let mut v = vec![Complex64::default(); 1 << num_qubits];
    v[index] = Complex64::new(1.0, 0.0);
    Ok(v)
}

#[inline]
fn bit(index: usize, n: usize, q: usize) -> bool {
    index >> (n - 1 - q) & 1 == 1
}

#[inline]
fn mask(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Applies `gate` to a dense vector of `log2(v.len())` qubits in place.
pub fn apply_gate_dense(v: &mut [Complex64], gate: &Gate) -> Result<()> {
    let n = v.len().trailing_zeros() as usize;
    if v.len() != 1 << n {
        return Err(Error::InvalidField("vector length is not a power of two".into()));
    }
    gate.validate(n)?;
    let dim = v.len();
    match gate {
        Gate::McRot {
            controls,
            target,
            alpha,
            beta,
        } => {
            let cmask: usize = controls.iter().map(|&c| mask(n, c)).sum();
            let tmask = mask(n, *target);
            for i in 0..dim {
                if i & tmask != 0 || i & cmask != cmask {
                    continue;
                }
                let (a0, a1) = (v[i], v[i | tmask]);
                v[i] = alpha * a0 - beta.conj() * a1;
                v[i | tmask] = beta * a0 + alpha.conj() * a1;
            }
        }
        _ => {
            let mut out = vec![Complex64::default(); dim];
            for (i, amp) in v.iter().enumerate() {
                out[permuted_index(i, n, gate)] = *amp;
            }
            v.copy_from_slice(&out);
        }
    }
    Ok(())
}

fn permuted_index(i: usize, n: usize, gate: &Gate) -> usize {
    match gate {
        Gate::X(q) => i ^ mask(n, *q),
        Gate::Cnot { control, target } => {
            if bit(i, n, *control) {
                i ^ mask(n, *target)
            } else {
                i
            }
        }
        Gate::Swap(a, b) => {
            if bit(i, n, *a) != bit(i, n, *b) {
                i ^ mask(n, *a) ^ mask(n, *b)
            } else {
                i
            }
        }
        Gate::Permute(dest) => (0..n).filter(|&q| bit(i, n, q)).map(|q| mask(n, dest[q])).sum(),
        Gate::McRot { .. } => unreachable!("rotations are not permutations"),
    }
}

/// Runs a whole circuit on a dense vector.
pub fn apply_circuit_dense(v: &mut [Complex64], circuit: &Circuit) -> Result<()> {
    for gate in circuit.gates() {
        apply_gate_dense(v, gate)?;
    }
    Ok(())
}

/// Dense operator of a circuit, composing gates in application order.
pub fn circuit_to_operator(circuit: &Circuit) -> Result<DenseOperator> {
    let n = circuit.num_qubits();
    let mut op = DenseOperator::identity(n)?;
    let dim = op.dim();
    let mut col = vec![Complex64::default(); dim];
    for c in 0..dim {
        col.iter_mut().for_each(|x| *x = Complex64::default());
        col[c] = Complex64::new(1.0, 0.0);
        apply_circuit_dense(&mut col, circuit)?;
        for (r, x) in col.iter().enumerate() {
            op.set(r, c, *x);
        }
    }
    Ok(op)
}

/// Maximum entrywise deviation of `U^dagger U` from the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitarityReport {
    pub max_deviation: f64,
    pub tolerance: f64,
}

impl UnitarityReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

pub fn unitarity_check(op: &DenseOperator, tol: f64) -> UnitarityReport {
    let gram = op.adjoint().matmul(op).expect("same shape");
    let dim = op.dim();
    let mut max_deviation = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let expected = if r == c { 1.0 } else { 0.0 };
            max_deviation = max_deviation.max((gram.get(r, c) - expected).norm());
        }
    }
    UnitarityReport {
        max_deviation,
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::BasisLabel;

    #[test]
    fn dense_index_is_big_endian() {
        let s = SparseState::init_basis(2, "01".parse::<BasisLabel>().unwrap()).unwrap();
        let v = to_dense(&s).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        assert_eq!(v, vec![zero, one, zero, zero]);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let op = circuit_to_operator(&Circuit::new(3)).unwrap();
        assert_eq!(op, DenseOperator::identity(3).unwrap());
        assert_eq!(unitarity_check(&op, 0.0).max_deviation, 0.0);
    }

    #[test]
    fn caps_enforced() {
        let s = SparseState::init_basis(17, BasisLabel::zeros(17)).unwrap();
        assert!(matches!(
            to_dense(&s),
            Err(Error::RegisterTooLarge {
                num_qubits: 17,
                cap: 16
            })
        ));
        assert!(circuit_to_operator(&Circuit::new(OPERATOR_CAP + 1)).is_err());
    }

    #[test]
    fn non_unitary_detected() {
        let mut op = DenseOperator::identity(1).unwrap();
        op.set(0, 1, Complex64::new(1.0, 0.0));
        assert!(!unitarity_check(&op, 1e-12).passed());
    }

    #[test]
    fn cnot_matrix() {
        let mut c = Circuit::new(2);
        c.push(Gate::Cnot { control: 0, target: 1 }).unwrap();
        let op = circuit_to_operator(&c).unwrap();
        // |10> (index 2) -> |11> (index 3)
        assert_eq!(op.get(3, 2), Complex64::new(1.0, 0.0));
        assert_eq!(op.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(op.get(2, 3), Complex64::new(1.0, 0.0));
    }
}
