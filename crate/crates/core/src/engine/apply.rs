//! Wire-local gate application.

use std::sync::Arc;

use crate::error::Result;
use crate::linalg::{embed, local_offsets, ComplexMatrix, C64, ZERO};

/// A gate matrix bound to concrete global wires.
#[derive(Clone, Debug)]
pub struct LocalGate {
    matrix: Arc<ComplexMatrix>,
    wires: Vec<usize>,
    offsets: Vec<usize>,
    mask: usize,
    diagonal: Option<Vec<C64>>,
}

impl LocalGate {
    pub fn new(matrix: Arc<ComplexMatrix>, wires: Vec<usize>, total_wires: usize) -> Result<Self> {
        let offsets = local_offsets(&wires, total_wires)?;
        if matrix.dim() != offsets.len() {
            return Err(crate::error::Error::DimensionMismatch(format!(
                "gate of dim {} on {} wires",
                matrix.dim(),
                wires.len()
            )));
        }
        let mask = wires.iter().fold(0, |m, &w| m | (1usize << w));
        let diagonal = matrix.is_diagonal().then(|| matrix.diagonal());
        Ok(Self {
            matrix,
            wires,
            offsets,
            mask,
            diagonal,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn wires(&self) -> &[usize] {
        &self.wires
    }

    /// Applies the gate in place across every strided amplitude group.
    pub fn apply(&self, amps: &mut [C64]) {
        if let Some(diag) = &self.diagonal {
            for (i, a) in amps.iter_mut().enumerate() {
                *a *= diag[crate::linalg::extract_bits(i, &self.wires)];
            }
            return;
        }
        let d = self.offsets.len();
        let mut buf = vec![ZERO; d];
        let m = self.matrix.as_slice();
        for base in 0..amps.len() {
            if base & self.mask != 0 {
                continue;
            }
            for (b, &off) in buf.iter_mut().zip(&self.offsets) {
                *b = amps[base | off];
            }
            for (r, &off) in self.offsets.iter().enumerate() {
                let row = &m[r * d..(r + 1) * d];
                amps[base | off] = row.iter().zip(&buf).map(|(x, y)| x * y).sum();
            }
        }
    }

    /// Reference path: lift to the full space and multiply.
    pub fn apply_embedded(&self, amps: &mut [C64]) -> Result<()> {
        let total = amps.len().trailing_zeros() as usize;
        let full = embed(&self.matrix, &self.wires, total)?;
        let out = full.apply(amps);
        amps.copy_from_slice(&out);
        Ok(())
    }
}
