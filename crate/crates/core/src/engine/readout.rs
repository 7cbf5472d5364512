//! Counts, conditioning, reduced states and text readout.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{StateVector, WireLayout};
use crate::circuit::{Circuit, Instruction, Operand};
use crate::error::{Error, Result};
use crate::fock::fock_decode;
use crate::linalg::{deposit_bits, ComplexMatrix, C64, ZERO};

/// Bit order of count keys. `Little` puts classical bit 0 first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Endianness {
    #[default]
    Little,
    Big,
}

impl Endianness {
    pub fn flipped(self) -> Self {
        match self {
            Self::Little => Self::Big,
            Self::Big => Self::Little,
        }
    }
}

pub(crate) fn bits_to_key(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShotResult {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
    pub seed: u64,
    pub endianness: Endianness,
}

impl ShotResult {
    pub fn new(counts: BTreeMap<String, u64>, shots: u64, seed: u64) -> Self {
        Self {
            counts,
            shots,
            seed,
            endianness: Endianness::Little,
        }
    }

    /// Same counts with every key written in the opposite bit order.
    pub fn reversed(&self) -> Self {
        Self {
            counts: self
                .counts
                .iter()
                .map(|(k, &v)| (k.chars().rev().collect(), v))
                .collect(),
            shots: self.shots,
            seed: self.seed,
            endianness: self.endianness.flipped(),
        }
    }

    /// Counts with keys in little-endian order regardless of `endianness`.
    fn little(&self) -> std::borrow::Cow<'_, Self> {
        match self.endianness {
            Endianness::Little => std::borrow::Cow::Borrowed(self),
            Endianness::Big => std::borrow::Cow::Owned(self.reversed()),
        }
    }
}

/// Which cbits hold which measured operand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasureLayout {
    pub operands: Vec<Operand>,
    pub cbits: Vec<usize>,
    pub qubits_per_mode: u32,
}

impl MeasureLayout {
    /// Layout of the last measure instruction in `circuit`.
    pub fn from_circuit(circuit: &Circuit) -> Option<Self> {
        circuit.instructions().iter().rev().find_map(|inst| match inst {
            Instruction::Measure { operands, cbits } => Some(Self {
                operands: operands.clone(),
                cbits: cbits.clone(),
                qubits_per_mode: circuit.space().qubits_per_mode(),
            }),
            _ => None,
        })
    }

    fn width(&self, op: Operand) -> usize {
        match op {
            Operand::Qumode(_) => self.qubits_per_mode as usize,
            Operand::Qubit(_) => 1,
        }
    }
}

/// Decodes count keys to one integer per measured operand: Fock numbers for
/// qumodes, 0/1 for qubits. `reverse_endianness` reverses the tuple.
pub fn fock_counts(r: &ShotResult, layout: &MeasureLayout, reverse_endianness: bool) -> Result<BTreeMap<Vec<u64>, u64>> {
    let needed: usize = layout.operands.iter().map(|&o| layout.width(o)).sum();
    if needed != layout.cbits.len() {
        return Err(Error::LayoutMismatch(format!(
            "operands span {needed} bits but {} cbits are given",
            layout.cbits.len()
        )));
    }
    let little = r.little();
    let mut out = BTreeMap::new();
    for (key, &count) in &little.counts {
        let bits: Vec<bool> = key.chars().map(|c| c == '1').collect();
        if let Some(&bad) = layout.cbits.iter().find(|&&b| b >= bits.len()) {
            return Err(Error::LayoutMismatch(format!(
                "cbit {bad} outside key of length {}",
                bits.len()
            )));
        }
        let mut cursor = layout.cbits.iter();
        let mut tuple: Vec<u64> = layout
            .operands
            .iter()
            .map(|&op| {
                let group: Vec<bool> = cursor.by_ref().take(layout.width(op)).map(|&b| bits[b]).collect();
                fock_decode(&group)
            })
            .collect();
        if reverse_endianness {
            tuple.reverse();
        }
        *out.entry(tuple).or_insert(0) += count;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MeasureBasis {
    #[default]
    Z,
    X,
}

/// Projects `qubit` onto `|outcome⟩` (Z basis) or `|±⟩` (X basis, `false` ↔ `+`).
pub fn condition_on_outcome(s: &StateVector, qubit: usize, outcome: bool, basis: MeasureBasis) -> Result<(StateVector, f64)> {
    let layout = s.layout();
    if qubit >= layout.num_qubits {
        return Err(Error::IndexOutOfRange {
            what: "qubit",
            index: qubit,
            size: layout.num_qubits,
        });
    }
    let bit = 1usize << layout.qubit_wire(qubit);
    let mut amps = s.amplitudes().to_vec();
    match basis {
        MeasureBasis::Z => {
            for (i, a) in amps.iter_mut().enumerate() {
                if ((i & bit) != 0) != outcome {
                    *a = ZERO;
                }
            }
        }
        MeasureBasis::X => {
            let sign = if outcome { -1.0 } else { 1.0 };
            let h = std::f64::consts::FRAC_1_SQRT_2;
            for i0 in (0..amps.len()).filter(|i| i & bit == 0) {
                let c = (amps[i0] + amps[i0 | bit] * sign) * h;
                amps[i0] = c * h;
                amps[i0 | bit] = c * h * sign;
            }
        }
    }
    let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if p <= 1e-14 {
        return Err(Error::ZeroProbabilityBranch(p));
    }
    Ok((StateVector::from_amplitudes(layout, amps)?, p))
}

/// Registers kept by a partial trace.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Subsystem {
    pub qumodes: Vec<usize>,
    pub qubits: Vec<usize>,
}

impl Subsystem {
    pub fn qumode(m: usize) -> Self {
        Self {
            qumodes: vec![m],
            qubits: vec![],
        }
    }

    pub fn qubit(q: usize) -> Self {
        Self {
            qumodes: vec![],
            qubits: vec![q],
        }
    }

    pub fn everything(layout: WireLayout) -> Self {
        Self {
            qumodes: (0..layout.num_qumodes).collect(),
            qubits: (0..layout.num_qubits).collect(),
        }
    }

    fn normalized(&self) -> Self {
        let mut s = self.clone();
        s.qumodes.sort_unstable();
        s.qumodes.dedup();
        s.qubits.sort_unstable();
        s.qubits.dedup();
        s
    }

    fn wires(&self, layout: WireLayout) -> Vec<usize> {
        self.qumodes
            .iter()
            .flat_map(|&m| layout.qumode_wires(m))
            .chain(self.qubits.iter().map(|&q| layout.qubit_wire(q)))
            .collect()
    }
}

/// Reduced state of a subsystem. Basis order follows the kept wires,
/// lowest global wire as least-significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub matrix: ComplexMatrix,
    pub subsystem: Subsystem,
    pub qubits_per_mode: u32,
}

impl DensityMatrix {
    /// A density matrix over one qumode of dimension `2^k`.
    pub fn single_qumode(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::NotAQumodeDensityMatrix(format!("dimension {dim} is not 2^k with k ≥ 1")));
        }
        Ok(Self {
            matrix,
            subsystem: Subsystem::qumode(0),
            qubits_per_mode: dim.trailing_zeros(),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.matmul(&self.matrix).trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let n = self.dim();
        let h = nalgebra::DMatrix::from_fn(n, n, |r, c| {
            (self.matrix.get(r, c) + self.matrix.get(c, r).conj()) * 0.5
        });
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Hermitian, unit trace and positive semidefinite within `tol`.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.matrix.is_hermitian(tol)
            && (self.trace() - 1.0).norm() <= tol
            && self.eigenvalues().first().is_none_or(|&e| e >= -tol)
    }

    /// True when only a single qumode is kept.
    pub fn is_single_qumode(&self) -> bool {
        self.subsystem.qumodes.len() == 1 && self.subsystem.qubits.is_empty()
    }
}

pub fn partial_trace(s: &StateVector, keep: &Subsystem) -> Result<DensityMatrix> {
    let layout = s.layout();
    let keep = keep.normalized();
    if keep.qumodes.is_empty() && keep.qubits.is_empty() {
        return Err(Error::EmptySelector);
    }
    if let Some(&m) = keep.qumodes.iter().find(|&&m| m >= layout.num_qumodes) {
        return Err(Error::IndexOutOfRange {
            what: "qumode",
            index: m,
            size: layout.num_qumodes,
        });
    }
    if let Some(&q) = keep.qubits.iter().find(|&&q| q >= layout.num_qubits) {
        return Err(Error::IndexOutOfRange {
            what: "qubit",
            index: q,
            size: layout.num_qubits,
        });
    }
    let kept = keep.wires(layout);
    let env: Vec<usize> = (0..layout.total_wires()).filter(|w| !kept.contains(w)).collect();
    let d = 1usize << kept.len();
    let amps = s.amplitudes();
    let kept_offsets: Vec<usize> = (0..d).map(|r| deposit_bits(r, &kept)).collect();
    let mut rho = vec![ZERO; d * d];
    let mut v = vec![ZERO; d];
    for e in 0..(1usize << env.len()) {
        let base = deposit_bits(e, &env);
        for (slot, &off) in v.iter_mut().zip(&kept_offsets) {
            *slot = amps[base | off];
        }
        for r in 0..d {
            if v[r] == ZERO {
                continue;
            }
            for c in 0..d {
                rho[r * d + c] += v[r] * v[c].conj();
            }
        }
    }
    Ok(DensityMatrix {
        matrix: ComplexMatrix::from_row_major(rho)?,
        subsystem: keep,
        qubits_per_mode: layout.qubits_per_mode,
    })
}

/// One basis state of a statevector listing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateRecord {
    pub index: usize,
    pub fock_labels: Vec<u64>,
    pub qubit_bits: Vec<u8>,
    pub re: f64,
    pub im: f64,
}

/// Basis states with `|amplitude| > threshold`, ascending global index.
pub fn state_records(s: &StateVector, big_endian: bool, threshold: f64) -> Vec<StateRecord> {
    let layout = s.layout();
    s.amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > threshold)
        .map(|(i, a)| {
            let mut fock: Vec<u64> = (0..layout.num_qumodes).map(|m| layout.fock_of(i, m)).collect();
            let mut qubits: Vec<u8> = (0..layout.num_qubits).map(|q| layout.qubit_of(i, q) as u8).collect();
            if big_endian {
                fock.reverse();
                qubits.reverse();
            }
            StateRecord {
                index: i,
                fock_labels: fock,
                qubit_bits: qubits,
                re: a.re,
                im: a.im,
            }
        })
        .collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn format_amp(re: f64, im: f64) -> String {
    // Values that round to zero print without a sign.
    let clean = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
    let (re, im) = (clean(re), clean(im));
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{re:.6}{sign}{:.6}i", im.abs())
}

/// Text listing, one line per basis state above `threshold`.
pub fn stateread(s: &StateVector, big_endian: bool, threshold: f64) -> String {
    state_records(s, big_endian, threshold)
        .iter()
        .map(|r| {
            format!(
                "fock=({}) qubits=({}) amp={}\n",
                join(&r.fock_labels),
                join(&r.qubit_bits),
                format_amp(r.re, r.im)
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ONE;

    fn key_result(pairs: &[(&str, u64)]) -> ShotResult {
        let counts: BTreeMap<String, u64> = pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let shots = counts.values().sum();
        ShotResult::new(counts, shots, 0)
    }

    fn qumode_layout(k: u32) -> MeasureLayout {
        MeasureLayout {
            operands: vec![Operand::Qumode(0)],
            cbits: (0..k as usize).collect(),
            qubits_per_mode: k,
        }
    }

    #[test]
    fn decodes_lsb_first() {
        let r = key_result(&[("10", 3), ("01", 5)]);
        let f = fock_counts(&r, &qumode_layout(2), false).unwrap();
        assert_eq!(f[&vec![1]], 3);
        assert_eq!(f[&vec![2]], 5);
    }

    #[test]
    fn mixed_operands_and_reversal() {
        let layout = MeasureLayout {
            operands: vec![Operand::Qumode(0), Operand::Qubit(0)],
            cbits: vec![0, 1, 2],
            qubits_per_mode: 2,
        };
        let r = key_result(&[("111", 2), ("100", 1)]);
        let f = fock_counts(&r, &layout, false).unwrap();
        assert_eq!(f[&vec![3, 1]], 2);
        assert_eq!(f[&vec![1, 0]], 1);
        let rev = fock_counts(&r, &layout, true).unwrap();
        assert_eq!(rev[&vec![1, 3]], 2);
        // Big-endian keys decode to the same outcomes.
        assert_eq!(fock_counts(&r.reversed(), &layout, false).unwrap(), f);
        assert_eq!(r.reversed().reversed(), r);
    }

    #[test]
    fn layout_mismatch() {
        let r = key_result(&[("1", 1)]);
        assert!(matches!(
            fock_counts(&r, &qumode_layout(2), false),
            Err(Error::LayoutMismatch(_))
        ));
        let bad = MeasureLayout {
            cbits: vec![0],
            ..qumode_layout(2)
        };
        assert!(matches!(fock_counts(&r, &bad, false), Err(Error::LayoutMismatch(_))));
    }

    fn plus_state() -> StateVector {
        let layout = WireLayout::new(1, 1, 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 4];
        amps[0] = C64::new(h, 0.0);
        amps[2] = C64::new(h, 0.0);
        StateVector::from_amplitudes(layout, amps).unwrap()
    }

    #[test]
    fn conditioning() {
        let vac = StateVector::vacuum(WireLayout::new(1, 1, 1));
        let (s, p) = condition_on_outcome(&vac, 0, false, MeasureBasis::Z).unwrap();
        assert_eq!(s, vac);
        assert_eq!(p, 1.0);
        assert!(matches!(
            condition_on_outcome(&vac, 0, true, MeasureBasis::Z),
            Err(Error::ZeroProbabilityBranch(_))
        ));
        let (_, p) = condition_on_outcome(&plus_state(), 0, false, MeasureBasis::Z).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        let (s, p) = condition_on_outcome(&plus_state(), 0, false, MeasureBasis::X).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert!((s.fidelity(&plus_state()) - 1.0).abs() < 1e-15);
        assert!(condition_on_outcome(&plus_state(), 0, true, MeasureBasis::X).is_err());
    }

    #[test]
    fn partial_traces() {
        let layout = WireLayout::new(1, 1, 1);
        let s = StateVector::basis(layout, &[0], &[true]);
        let rho = partial_trace(&s, &Subsystem::qubit(0)).unwrap();
        assert_eq!(rho.matrix.get(1, 1), ONE);
        assert_eq!(rho.matrix.get(0, 0), ZERO);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![ZERO; 4];
        amps[0] = C64::new(h, 0.0);
        amps[3] = C64::new(h, 0.0);
        let bell = StateVector::from_amplitudes(layout, amps).unwrap();
        let rho = partial_trace(&bell, &Subsystem::qumode(0)).unwrap();
        assert!((rho.purity() - 0.5).abs() < 1e-12);
        assert!((rho.matrix.get(0, 0).re - 0.5).abs() < 1e-12);
        assert!(rho.matrix.get(0, 1).norm() < 1e-15);

        let all = partial_trace(&bell, &Subsystem::everything(layout)).unwrap();
        assert!((all.purity() - 1.0).abs() < 1e-12);
        assert!(all.is_valid(1e-10));
        assert_eq!(
            partial_trace(&bell, &Subsystem::default()).unwrap_err(),
            Error::EmptySelector
        );
    }

    #[test]
    fn stateread_lines() {
        let vac = StateVector::vacuum(WireLayout::new(1, 2, 0));
        assert_eq!(stateread(&vac, false, 1e-10), "fock=(0) qubits=() amp=1.000000+0.000000i\n");
        let s = StateVector::basis(WireLayout::new(2, 2, 1), &[2, 1], &[true]);
        assert_eq!(stateread(&s, false, 1e-10), "fock=(2,1) qubits=(1) amp=1.000000+0.000000i\n");
        assert_eq!(stateread(&s, true, 1e-10), "fock=(1,2) qubits=(1) amp=1.000000+0.000000i\n");
        assert_eq!(format_amp(-0.5, -0.25), "-0.500000-0.250000i");
        assert_eq!(format_amp(0.0, -0.0), "0.000000+0.000000i");
        assert_eq!(format_amp(-1e-9, -1e-17), "0.000000+0.000000i");
    }
}
