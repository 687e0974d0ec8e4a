//! Computational basis conventions.
//!
//! Basis state `k` (zero based) of an `n`-qubit register is the binary
//! representation of `k` with qubit 0 as the most significant bit. Bit value
//! 0 is the lossy level `|e>` and bit value 1 is `|f>`, so for three qubits
//! index 0 is `|eee>` and index 7 is `|fff>`.

use serde::{Deserialize, Serialize};

/// Single-qubit level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    E,
    F,
}

impl Level {
    pub fn bit(self) -> usize {
        match self {
            Level::E => 0,
            Level::F => 1,
        }
    }
}

/// Bit mask selecting `qubit` in an `n`-qubit basis index.
#[inline]
pub fn qubit_mask(qubit: usize, n: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Level of `qubit` in basis state `index`.
#[inline]
pub fn level(index: usize, qubit: usize, n: usize) -> Level {
    if index & qubit_mask(qubit, n) == 0 {
        Level::E
    } else {
        Level::F
    }
}

/// Basis index of a product of levels, first entry being qubit 0.
pub fn index_of(levels: &[Level]) -> usize {
    levels.iter().fold(0, |acc, l| (acc << 1) | l.bit())
}

/// Human-readable label such as `eef`.
pub fn label(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| match level(index, q, n) {
            Level::E => 'e',
            Level::F => 'f',
        })
        .collect()
}

/// Maps basis index `index` to the index obtained by relabelling qubits so
/// that old qubit `q` becomes new qubit `perm[q]`.
pub fn permute_index(index: usize, perm: &[usize]) -> usize {
    let n = perm.len();
    let mut out = 0;
    for (q, &target) in perm.iter().enumerate() {
        if index & qubit_mask(q, n) != 0 {
            out |= qubit_mask(target, n);
        }
    }
    out
}
