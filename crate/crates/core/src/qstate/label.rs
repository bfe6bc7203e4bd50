use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Computational basis label of fixed width, one bit per qubit.
///
/// Qubit 0 is the leftmost character of the ket, so `"1010"` has qubits 0 and
/// 2 set. The dense index of a label is its big-endian integer value.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisLabel(FixedBitSet);

impl BasisLabel {
    pub fn zeros(width: usize) -> Self {
        Self(FixedBitSet::with_capacity(width))
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut set = FixedBitSet::with_capacity(bits.len());
        for (q, &b) in bits.iter().enumerate() {
            set.set(q, b);
        }
        Self(set)
    }

    /// Label whose big-endian value is `index`.
    pub fn from_index(index: u64, width: usize) -> Self {
        assert!(width <= 64, "index labels limited to 64 qubits");
        let mut set = FixedBitSet::with_capacity(width);
        for q in 0..width {
            set.set(q, index >> (width - 1 - q) & 1 == 1);
        }
        Self(set)
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, qubit: usize) -> bool {
        self.0.contains(qubit)
    }

    pub fn set(&mut self, qubit: usize, value: bool) {
        self.0.set(qubit, value);
    }

    pub fn flip(&mut self, qubit: usize) {
        self.0.toggle(qubit);
    }

    pub fn with_flipped(&self, qubit: usize) -> Self {
        let mut out = self.clone();
        out.flip(qubit);
        out
    }

    /// Indices of set qubits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn count_ones(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.width()).map(|q| self.get(q)).collect()
    }

    /// Big-endian integer value; `None` above 64 qubits.
    pub fn to_index(&self) -> Option<u64> {
        let width = self.width();
        (width <= 64).then(|| self.ones().fold(0u64, |acc, q| acc | 1u64 << (width - 1 - q)))
    }

    /// Sub-label made of the given qubits, in the given order.
    pub fn project(&self, qubits: &[usize]) -> Self {
        let mut out = Self::zeros(qubits.len());
        for (k, &q) in qubits.iter().enumerate() {
            out.set(k, self.get(q));
        }
        out
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.width() {
            f.write_str(if self.get(q) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{self}>")
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::Parse {
                    line: 0,
                    msg: format!("invalid basis label `{s}`"),
                }),
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(Self::from_bits(&bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leftmost_is_qubit_zero() {
        let l: BasisLabel = "1010".parse().unwrap();
        assert!(l.get(0) && !l.get(1) && l.get(2) && !l.get(3));
        assert_eq!(l.to_index(), Some(0b1010));
        assert_eq!(BasisLabel::from_index(0b1010, 4), l);
        assert_eq!(l.to_string(), "1010");
    }

    #[test]
    fn wide_labels() {
        let mut l = BasisLabel::zeros(164);
        l.set(163, true);
        l.set(70, true);
        assert_eq!(l.ones().collect::<Vec<_>>(), vec![70, 163]);
        assert_eq!(l.to_index(), None);
        assert_eq!(l.project(&[163, 0, 70]).to_string(), "101");
    }
}
