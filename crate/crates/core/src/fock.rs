//! Truncated bosonic operators and the Fock-number binary encoding.

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64};

/// A qumode truncated to `2^k` Fock levels, stored on `k` wires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FockSpace {
    qubits_per_mode: u32,
}

impl FockSpace {
    /// Largest qubits-per-mode accepted by [`FockSpace::new`].
    pub const MAX_QUBITS_PER_MODE: u32 = 12;

    pub fn new(qubits_per_mode: u32) -> Result<Self> {
        Self::with_limit(qubits_per_mode, Self::MAX_QUBITS_PER_MODE)
    }

    pub fn with_limit(qubits_per_mode: u32, max: u32) -> Result<Self> {
        if qubits_per_mode == 0 || qubits_per_mode > max {
            return Err(Error::InvalidFockSpace {
                got: qubits_per_mode,
                max,
            });
        }
        Ok(Self { qubits_per_mode })
    }

    pub fn qubits_per_mode(&self) -> u32 {
        self.qubits_per_mode
    }

    pub fn cutoff(&self) -> usize {
        1usize << self.qubits_per_mode
    }
}

/// `a` with `a[n, n+1] = √(n+1)`.
pub fn annihilation(space: FockSpace) -> ComplexMatrix {
    let mut a = ComplexMatrix::zeros(space.cutoff());
    for n in 0..space.cutoff() - 1 {
        a.set(n, n + 1, C64::new(((n + 1) as f64).sqrt(), 0.0));
    }
    a
}

/// `a†`; annihilates the top Fock level.
pub fn creation(space: FockSpace) -> ComplexMatrix {
    annihilation(space).dagger()
}

pub fn number(space: FockSpace) -> ComplexMatrix {
    let diag: Vec<C64> = (0..space.cutoff()).map(|n| C64::new(n as f64, 0.0)).collect();
    ComplexMatrix::from_diag(&diag)
}

/// Binary expansion of `n` over `k` wires; element 0 is the qumode's first
/// wire and the least-significant bit.
pub fn fock_encode(n: u64, k: u32) -> Result<Vec<bool>> {
    if k >= 64 || n >= 1u64 << k {
        return Err(Error::FockOutOfRange {
            level: n,
            cutoff: 1u64.checked_shl(k).unwrap_or(u64::MAX),
        });
    }
    Ok((0..k).map(|j| (n >> j) & 1 == 1).collect())
}

pub fn fock_decode(bits: &[bool]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0, |acc, (j, &b)| acc | ((b as u64) << j))
}
