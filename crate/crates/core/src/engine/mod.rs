//! Statevector simulation of hybrid circuits.
//!
//! A circuit is first compiled against a [`FockSpace`]: every gate becomes a
//! unitary bound to its global wires, with identical gates sharing one matrix.
//! The compiled form is immutable and shared by concurrently running shots.
//!
//! Shot `i` draws from a ChaCha8 stream seeded with `seed + i`, so counts do
//! not depend on thread count or scheduling.

mod apply;
mod readout;

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{gate_unitary, Circuit, GateKind, GateSpec, Instruction, Operand, QubitOp};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::linalg::{extract_bits, inner, norm, ComplexMatrix, C64, ONE, ZERO};

pub use apply::LocalGate;
pub use readout::{
    condition_on_outcome, fock_counts, partial_trace, state_records, stateread, DensityMatrix, Endianness,
    MeasureBasis, MeasureLayout, ShotResult, StateRecord, Subsystem,
};

/// Default limit on total wires (qumode wires plus qubits).
pub const DEFAULT_WIRE_CAP: usize = 24;

/// How the global basis index is split between registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WireLayout {
    pub num_qumodes: usize,
    pub qubits_per_mode: u32,
    pub num_qubits: usize,
}

impl WireLayout {
    pub fn new(num_qumodes: usize, qubits_per_mode: u32, num_qubits: usize) -> Self {
        Self {
            num_qumodes,
            qubits_per_mode,
            num_qubits,
        }
    }

    pub fn of(circuit: &Circuit, space: FockSpace) -> Self {
        Self::new(circuit.num_qumodes(), space.qubits_per_mode(), circuit.num_qubits())
    }

    pub fn k(&self) -> usize {
        self.qubits_per_mode as usize
    }

    pub fn cutoff(&self) -> usize {
        1 << self.qubits_per_mode
    }

    pub fn qumode_wire_count(&self) -> usize {
        self.num_qumodes * self.k()
    }

    pub fn total_wires(&self) -> usize {
        self.qumode_wire_count() + self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.total_wires()
    }

    pub fn qumode_wires(&self, m: usize) -> Vec<usize> {
        (m * self.k()..(m + 1) * self.k()).collect()
    }

    pub fn qubit_wire(&self, q: usize) -> usize {
        self.qumode_wire_count() + q
    }

    pub fn operand_wires(&self, op: Operand) -> Vec<usize> {
        match op {
            Operand::Qumode(m) => self.qumode_wires(m),
            Operand::Qubit(q) => vec![self.qubit_wire(q)],
        }
    }

    pub fn fock_of(&self, index: usize, m: usize) -> u64 {
        ((index >> (m * self.k())) & (self.cutoff() - 1)) as u64
    }

    pub fn qubit_of(&self, index: usize, q: usize) -> bool {
        (index >> self.qubit_wire(q)) & 1 == 1
    }

    /// Global index of the product basis state `|focks⟩ ⊗ |bits⟩`.
    pub fn index_of(&self, focks: &[u64], bits: &[bool]) -> usize {
        let mut idx = 0;
        for (m, &n) in focks.iter().enumerate() {
            idx |= (n as usize) << (m * self.k());
        }
        for (q, &b) in bits.iter().enumerate() {
            idx |= (b as usize) << self.qubit_wire(q);
        }
        idx
    }

    /// Wires of a gate in local-space order (targets, then controls).
    pub fn gate_wires(&self, spec: &GateSpec) -> Vec<usize> {
        match spec.kind {
            GateKind::Qubit(_) => spec.qubit_operands().iter().map(|&q| self.qubit_wire(q)).collect(),
            _ => spec
                .targets
                .iter()
                .flat_map(|&m| self.qumode_wires(m))
                .chain(spec.controls.iter().map(|&q| self.qubit_wire(q)))
                .collect(),
        }
    }
}

/// Complex amplitudes over the full hybrid space.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
    layout: WireLayout,
}

impl StateVector {
    /// All qumodes in `|0⟩`, all qubits in `|0⟩`.
    pub fn vacuum(layout: WireLayout) -> Self {
        let mut amplitudes = vec![ZERO; layout.dim()];
        amplitudes[0] = ONE;
        Self { amplitudes, layout }
    }

    pub fn basis(layout: WireLayout, focks: &[u64], bits: &[bool]) -> Self {
        let mut amplitudes = vec![ZERO; layout.dim()];
        amplitudes[layout.index_of(focks, bits)] = ONE;
        Self { amplitudes, layout }
    }

    /// Wraps raw amplitudes, normalising them.
    pub fn from_amplitudes(layout: WireLayout, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a space of dim {}",
                amplitudes.len(),
                layout.dim()
            )));
        }
        let nrm = norm(&amplitudes);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::ZeroNormAmplitudes);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a / nrm).collect(),
            layout,
        })
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn layout(&self) -> WireLayout {
        self.layout
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn overlap(&self, other: &StateVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.overlap(other).norm_sqr()
    }

    pub fn apply_gate(&mut self, gate: &LocalGate) {
        gate.apply(&mut self.amplitudes);
    }

    /// Fock-level distribution of qumode `m`.
    pub fn fock_probabilities(&self, m: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.layout.cutoff()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            p[self.layout.fock_of(i, m) as usize] += a.norm_sqr();
        }
        p
    }

    /// `⟨n̂_m⟩`.
    pub fn mean_number(&self, m: usize) -> f64 {
        self.fock_probabilities(m)
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// `⟨ψ|O|ψ⟩` for an operator on `wires`.
    pub fn expectation(&self, op: &ComplexMatrix, wires: &[usize]) -> Result<C64> {
        let gate = LocalGate::new(Arc::new(op.clone()), wires.to_vec(), self.layout.total_wires())?;
        let mut applied = self.amplitudes.clone();
        gate.apply(&mut applied);
        Ok(inner(&self.amplitudes, &applied))
    }

    fn renormalize(&mut self) {
        let n = self.norm();
        for a in &mut self.amplitudes {
            *a /= n;
        }
    }

    /// Samples a joint outcome over `wires`, collapses onto it and returns it
    /// as a local index (bit j ↔ `wires[j]`).
    fn measure_wires(&mut self, wires: &[usize], rng: &mut impl Rng) -> usize {
        let mut probs = vec![0.0; 1 << wires.len()];
        for (i, a) in self.amplitudes.iter().enumerate() {
            probs[extract_bits(i, wires)] += a.norm_sqr();
        }
        let total: f64 = probs.iter().sum();
        let u = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        let mut outcome = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            if u < acc && p > 0.0 {
                outcome = k;
                break;
            }
        }
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if extract_bits(i, wires) != outcome {
                *a = ZERO;
            }
        }
        self.renormalize();
        outcome
    }

    /// Resets qumode `m` and prepares `target` (normalised, cutoff-long) on it.
    /// Entangled qumodes are first collapsed onto a Fock level drawn from `rng`.
    pub fn reset_qumode(&mut self, m: usize, target: &[C64], rng: &mut ChaCha8Rng) -> Result<()> {
        if m >= self.layout.num_qumodes {
            return Err(Error::IndexOutOfRange {
                what: "qumode",
                index: m,
                size: self.layout.num_qumodes,
            });
        }
        if target.len() != self.layout.cutoff() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for cutoff {}",
                target.len(),
                self.layout.cutoff()
            )));
        }
        self.initialize_qumode(m, target, Some(rng));
        Ok(())
    }

    /// Resets qumode `m` and prepares `target` on it. Returns `true` if the
    /// reset needed a random draw (qumode entangled with the rest).
    fn initialize_qumode(&mut self, m: usize, target: &[C64], rng: Option<&mut ChaCha8Rng>) -> Option<bool> {
        let cutoff = self.layout.cutoff();
        let shift = m * self.layout.k();
        let mask = (cutoff - 1) << shift;
        // Reduced density matrix of the qumode decides whether a reset is deterministic.
        let mut rho = vec![ZERO; cutoff * cutoff];
        for base in (0..self.amplitudes.len()).filter(|i| i & mask == 0) {
            for r in 0..cutoff {
                let ar = self.amplitudes[base | (r << shift)];
                if ar == ZERO {
                    continue;
                }
                for c in 0..cutoff {
                    rho[r * cutoff + c] += ar * self.amplitudes[base | (c << shift)].conj();
                }
            }
        }
        let purity: f64 = rho.iter().map(|v| v.norm_sqr()).sum();
        let probs: Vec<f64> = (0..cutoff).map(|n| rho[n * cutoff + n].re).collect();
        let pure = purity > 1.0 - 1e-12;
        let level = if pure {
            probs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .map(|(n, _)| n)
                .unwrap_or(0)
        } else {
            let rng = rng?;
            let u = rng.gen::<f64>();
            let mut acc = 0.0;
            let mut pick = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
            for (n, &p) in probs.iter().enumerate() {
                acc += p;
                if u < acc && p > 0.0 {
                    pick = n;
                    break;
                }
            }
            pick
        };
        let scale = probs[level].sqrt();
        for base in (0..self.amplitudes.len()).filter(|i| i & mask == 0) {
            let rest = self.amplitudes[base | (level << shift)] / scale;
            for (n, t) in target.iter().enumerate() {
                self.amplitudes[base | (n << shift)] = rest * t;
            }
        }
        Some(!pure)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ApplyStrategy {
    /// Strided application on the gate's own wires.
    #[default]
    Local,
    /// Full-space matrix–vector product; reference path for small circuits.
    Embedded,
}

#[derive(Clone, Debug)]
pub struct SimOptions {
    pub wire_cap: usize,
    pub strategy: ApplyStrategy,
    /// Worker threads for shots; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            wire_cap: DEFAULT_WIRE_CAP,
            strategy: ApplyStrategy::Local,
            threads: None,
        }
    }
}

#[derive(Clone, Debug)]
enum CompiledOp {
    Unitary(Arc<LocalGate>),
    Initialize { qumode: usize, target: Vec<C64> },
    Measure { wires: Vec<usize>, cbits: Vec<usize> },
}

#[derive(PartialEq, Eq, Hash)]
struct GateKey {
    kind: &'static str,
    qubit_op: Option<QubitOp>,
    params: Vec<(u64, u64)>,
    targets: usize,
    controls: usize,
}

impl GateKey {
    fn of(spec: &GateSpec) -> Option<Self> {
        let qubit_op = match spec.kind {
            GateKind::Custom(_) => return None,
            GateKind::Qubit(op) => Some(op),
            _ => None,
        };
        Some(Self {
            kind: spec.kind.name(),
            qubit_op,
            params: spec.params.iter().map(|p| (p.re.to_bits(), p.im.to_bits())).collect(),
            targets: spec.targets.len(),
            controls: spec.controls.len(),
        })
    }
}

/// Gate matrices keyed by kind, parameters and operand shape. Filled while
/// compiling; read-only afterwards.
#[derive(Default)]
pub struct GateCache {
    space: Option<FockSpace>,
    entries: HashMap<GateKey, Arc<ComplexMatrix>>,
}

impl GateCache {
    pub fn unitary(&mut self, spec: &GateSpec, space: FockSpace) -> Result<Arc<ComplexMatrix>> {
        if self.space != Some(space) {
            self.entries.clear();
            self.space = Some(space);
        }
        let Some(key) = GateKey::of(spec) else {
            return Ok(Arc::new(gate_unitary(spec, space)?));
        };
        if let Some(u) = self.entries.get(&key) {
            return Ok(u.clone());
        }
        let u = Arc::new(gate_unitary(spec, space)?);
        self.entries.insert(key, u.clone());
        Ok(u)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A circuit bound to a truncation, ready to run.
#[derive(Clone, Debug)]
pub struct CompiledCircuit {
    layout: WireLayout,
    num_cbits: usize,
    ops: Vec<CompiledOp>,
    strategy: ApplyStrategy,
}

impl CompiledCircuit {
    pub fn new(circuit: &Circuit, space: FockSpace, opts: &SimOptions) -> Result<Self> {
        Self::with_cache(circuit, space, opts, &mut GateCache::default())
    }

    pub fn with_cache(circuit: &Circuit, space: FockSpace, opts: &SimOptions, cache: &mut GateCache) -> Result<Self> {
        let layout = WireLayout::of(circuit, space);
        if layout.total_wires() > opts.wire_cap {
            return Err(Error::WireCapExceeded {
                wires: layout.total_wires(),
                cap: opts.wire_cap,
            });
        }
        circuit.validate_for(space)?;
        let total = layout.total_wires();
        let ops = circuit
            .instructions()
            .iter()
            .map(|inst| {
                Ok(match inst {
                    Instruction::Gate(spec) => {
                        let u = cache.unitary(spec, space)?;
                        CompiledOp::Unitary(Arc::new(LocalGate::new(u, layout.gate_wires(spec), total)?))
                    }
                    Instruction::Initialize { qumode, value } => CompiledOp::Initialize {
                        qumode: *qumode,
                        target: value.amplitudes(space.cutoff())?,
                    },
                    Instruction::Measure { operands, cbits } => {
                        let wires: Vec<usize> = operands.iter().flat_map(|&o| layout.operand_wires(o)).collect();
                        if wires.len() != cbits.len() {
                            return Err(Error::ClassicalBitCountMismatch {
                                needed: wires.len(),
                                given: cbits.len(),
                            });
                        }
                        CompiledOp::Measure {
                            wires,
                            cbits: cbits.clone(),
                        }
                    }
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            layout,
            num_cbits: circuit.num_cbits(),
            ops,
            strategy: opts.strategy,
        })
    }

    pub fn layout(&self) -> WireLayout {
        self.layout
    }

    pub fn num_cbits(&self) -> usize {
        self.num_cbits
    }

    /// Unitary gates in instruction order.
    pub fn gates(&self) -> impl Iterator<Item = &LocalGate> {
        self.ops.iter().filter_map(|op| match op {
            CompiledOp::Unitary(g) => Some(g.as_ref()),
            _ => None,
        })
    }

    fn apply_unitary(&self, gate: &LocalGate, state: &mut StateVector) -> Result<()> {
        match self.strategy {
            ApplyStrategy::Local => gate.apply(&mut state.amplitudes),
            ApplyStrategy::Embedded => gate.apply_embedded(&mut state.amplitudes)?,
        }
        Ok(())
    }

    /// Runs instructions `from..` on `state`, writing measured bits into `cbits`.
    fn run_from(&self, from: usize, state: &mut StateVector, rng: &mut ChaCha8Rng, cbits: &mut [bool]) -> Result<()> {
        for op in &self.ops[from..] {
            match op {
                CompiledOp::Unitary(g) => self.apply_unitary(g, state)?,
                CompiledOp::Initialize { qumode, target } => {
                    state.initialize_qumode(*qumode, target, Some(rng));
                }
                CompiledOp::Measure { wires, cbits: targets } => {
                    let outcome = state.measure_wires(wires, rng);
                    for (j, &b) in targets.iter().enumerate() {
                        cbits[b] = (outcome >> j) & 1 == 1;
                    }
                }
            }
        }
        Ok(())
    }

    /// Executes the leading instructions that need no randomness. Returns
    /// the state and the index of the first instruction left to run.
    fn deterministic_prefix(&self, initial: StateVector) -> Result<(StateVector, usize)> {
        let mut state = initial;
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                CompiledOp::Unitary(g) => self.apply_unitary(g, &mut state)?,
                CompiledOp::Initialize { qumode, target } => {
                    let mut probe = state.clone();
                    match probe.initialize_qumode(*qumode, target, None) {
                        Some(false) => state = probe,
                        _ => return Ok((state, i)),
                    }
                }
                CompiledOp::Measure { .. } => return Ok((state, i)),
            }
        }
        Ok((state, self.ops.len()))
    }

    /// Runs the whole circuit on `state` with one random stream.
    pub fn run(&self, state: &mut StateVector, rng: &mut ChaCha8Rng) -> Result<Vec<bool>> {
        if state.layout != self.layout {
            return Err(Error::LayoutMismatch("state layout differs from circuit layout".into()));
        }
        let mut bits = vec![false; self.num_cbits];
        self.run_from(0, state, rng, &mut bits)?;
        Ok(bits)
    }

    /// Applies only the unitary instructions; errors on any other instruction.
    pub fn apply_unitaries(&self, state: &mut StateVector) -> Result<()> {
        for op in &self.ops {
            match op {
                CompiledOp::Unitary(g) => self.apply_unitary(g, state)?,
                CompiledOp::Measure { .. } => return Err(Error::MeasurementInAnimation),
                CompiledOp::Initialize { .. } => {
                    return Err(Error::InvalidParameter {
                        kind: "initialize".into(),
                        reason: "not a unitary instruction".into(),
                    })
                }
            }
        }
        Ok(())
    }

    fn shot(&self, prefix: &(StateVector, usize), seed: u64, shot: u64) -> Result<(StateVector, Vec<bool>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(shot));
        let mut state = prefix.0.clone();
        let mut bits = vec![false; self.num_cbits];
        self.run_from(prefix.1, &mut state, &mut rng, &mut bits)?;
        Ok((state, bits))
    }

    /// Runs `shots` shots; also returns the final state of the last shot.
    pub fn run_shots(&self, shots: u64, seed: u64, threads: Option<usize>) -> Result<(ShotResult, StateVector)> {
        if shots == 0 {
            return Err(Error::InvalidParameter {
                kind: "shots".into(),
                reason: "need at least one shot".into(),
            });
        }
        let prefix = self.deterministic_prefix(StateVector::vacuum(self.layout))?;
        let tally = || -> Result<BTreeMap<String, u64>> {
            (0..shots)
                .into_par_iter()
                .try_fold(BTreeMap::new, |mut acc, i| {
                    let (_, bits) = self.shot(&prefix, seed, i)?;
                    *acc.entry(readout::bits_to_key(&bits)).or_insert(0) += 1;
                    Ok::<_, Error>(acc)
                })
                .try_reduce(BTreeMap::new, |mut a, b| {
                    for (k, v) in b {
                        *a.entry(k).or_insert(0) += v;
                    }
                    Ok(a)
                })
        };
        let counts = match threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::InvalidParameter {
                    kind: "threads".into(),
                    reason: e.to_string(),
                })?
                .install(tally)?,
            None => tally()?,
        };
        let (last, _) = self.shot(&prefix, seed, shots - 1)?;
        Ok((ShotResult::new(counts, shots, seed), last))
    }
}

fn prepare(circuit: &Circuit, space: FockSpace) -> Result<std::borrow::Cow<'_, Circuit>> {
    if circuit.space() == space {
        Ok(std::borrow::Cow::Borrowed(circuit))
    } else {
        Ok(std::borrow::Cow::Owned(circuit.with_qubits_per_mode(space.qubits_per_mode())?))
    }
}

/// One shot: final (branch-conditioned) state and its measured bits.
pub fn simulate(circuit: &Circuit, space: FockSpace, seed: u64) -> Result<(StateVector, ShotResult)> {
    simulate_with(circuit, space, seed, &SimOptions::default())
}

pub fn simulate_with(circuit: &Circuit, space: FockSpace, seed: u64, opts: &SimOptions) -> Result<(StateVector, ShotResult)> {
    let circuit = prepare(circuit, space)?;
    let compiled = CompiledCircuit::new(&circuit, space, opts)?;
    let prefix = compiled.deterministic_prefix(StateVector::vacuum(compiled.layout))?;
    let (state, bits) = compiled.shot(&prefix, seed, 0)?;
    let mut counts = BTreeMap::new();
    counts.insert(readout::bits_to_key(&bits), 1);
    Ok((state, ShotResult::new(counts, 1, seed)))
}

/// Aggregated measurement counts over `shots` independent shots.
pub fn run_shots(circuit: &Circuit, space: FockSpace, shots: u64, seed: u64) -> Result<ShotResult> {
    run_shots_with(circuit, space, shots, seed, &SimOptions::default()).map(|(r, _)| r)
}

pub fn run_shots_with(
    circuit: &Circuit,
    space: FockSpace,
    shots: u64,
    seed: u64,
    opts: &SimOptions,
) -> Result<(ShotResult, StateVector)> {
    let circuit = prepare(circuit, space)?;
    let compiled = CompiledCircuit::new(&circuit, space, opts)?;
    compiled.run_shots(shots, seed, opts.threads)
}
