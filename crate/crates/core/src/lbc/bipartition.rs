use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::state::qubit_shift;

/// An unordered split of the qubits into two nonempty blocks.
///
/// Stored canonically as the block containing qubit 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    n_qubits: usize,
    block: Vec<usize>,
}

impl Bipartition {
    /// Builds the bipartition with `block` on one side, canonicalizing to the side holding qubit 1.
    pub fn new(n_qubits: usize, block: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::TooFewQubits { min: 2, found: n_qubits });
        }
        let mut block: Vec<usize> = block.into_iter().collect();
        block.sort_unstable();
        block.dedup();
        if let Some(&bad) = block.iter().find(|&&q| q == 0 || q > n_qubits) {
            return Err(Error::IndexOutOfRange { index: bad, n_qubits });
        }
        if block.is_empty() || block.len() == n_qubits {
            return Err(Error::ConfigMismatch("bipartition blocks must both be nonempty".into()));
        }
        let mut out = Self { n_qubits, block };
        if out.block[0] != 1 {
            out.block = out.complement();
        }
        Ok(out)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// The block containing qubit 1, sorted.
    pub fn block(&self) -> &[usize] {
        &self.block
    }

    /// The other block, sorted.
    pub fn complement(&self) -> Vec<usize> {
        (1..=self.n_qubits).filter(|q| !self.block.contains(q)).collect()
    }

    /// `k`, the size of the stored block.
    pub fn size(&self) -> usize {
        self.block.len()
    }

    /// Basis-index mask with the bits of the stored block set.
    pub fn mask(&self) -> usize {
        self.block.iter().fold(0, |m, &q| m | (1 << qubit_shift(self.n_qubits, q)))
    }

    /// Qubit order with the stored block first, then its complement.
    pub fn ordering(&self) -> Vec<usize> {
        let mut order = self.block.clone();
        order.extend(self.complement());
        order
    }

    /// Column-safe label such as `1.3|2`.
    pub fn label(&self) -> String {
        let join = |qs: &[usize]| qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(".");
        format!("{}|{}", join(&self.block), join(&self.complement()))
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl Serialize for Bipartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

/// All `2^(n-1) - 1` bipartitions of `n` qubits, ordered lexicographically by block.
pub fn bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if n < 2 {
        return Err(Error::TooFewQubits { min: 2, found: n });
    }
    // Qubit 1 is always in the block; the remaining qubits are chosen by `rest`.
    let mut out: Vec<Bipartition> = (0..(1usize << (n - 1)) - 1)
        .map(|rest| {
            let mut block = vec![1];
            block.extend((2..=n).filter(|q| rest & (1 << (q - 2)) != 0));
            Bipartition { n_qubits: n, block }
        })
        .collect();
    out.sort();
    Ok(out)
}
