//! Hybrid qubit/qumode circuits.
//!
//! Global wire order: qumode `m` occupies wires `m·k .. m·k + k` (Fock number
//! binary-encoded LSB first), followed by one wire per qubit. Wire 0 is the
//! least-significant bit of every global basis index.
//!
//! "Controlled" gates use a `σ^z` tensor factor on the control qubit
//! (phase-kickback form), not a `|1⟩⟨1|` projector: qubit `|0⟩` sees the
//! generator with sign `+1`, qubit `|1⟩` with sign `−1`.

mod format;
mod gates;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::linalg::{ComplexMatrix, C64};

pub use format::{circuit_from_json, circuit_to_json, CircuitFile};
pub use gates::{gate_generator, gate_unitary, qubit_generator, swap_matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QumodeRegister {
    num_qumodes: usize,
    space: FockSpace,
}

impl QumodeRegister {
    pub fn new(num_qumodes: usize, qubits_per_mode: u32) -> Result<Self> {
        if num_qumodes == 0 {
            return Err(Error::InvalidParameter {
                kind: "qumode register".into(),
                reason: "needs at least one qumode".into(),
            });
        }
        Ok(Self {
            num_qumodes,
            space: FockSpace::new(qubits_per_mode)?,
        })
    }

    pub fn num_qumodes(&self) -> usize {
        self.num_qumodes
    }

    pub fn qubits_per_mode(&self) -> u32 {
        self.space.qubits_per_mode()
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn num_wires(&self) -> usize {
        self.num_qumodes * self.space.qubits_per_mode() as usize
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QubitRegister {
    pub num_qubits: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ClassicalRegister {
    pub num_bits: usize,
}

/// Standard qubit gates. Each is stored as a generator so it can be applied
/// fractionally (animation); `H`, `X`, `Y`, `Z` use `iπ(I − U)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QubitOp {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    T,
    Rx,
    Ry,
    Rz,
    /// Controlled-X; `controls = [c]`, `targets = [t]`.
    Cx,
}

impl QubitOp {
    pub const ALL: [QubitOp; 11] = [
        QubitOp::H,
        QubitOp::X,
        QubitOp::Y,
        QubitOp::Z,
        QubitOp::S,
        QubitOp::Sdg,
        QubitOp::T,
        QubitOp::Rx,
        QubitOp::Ry,
        QubitOp::Rz,
        QubitOp::Cx,
    ];

    pub fn name(self) -> &'static str {
        match self {
            QubitOp::H => "h",
            QubitOp::X => "x",
            QubitOp::Y => "y",
            QubitOp::Z => "z",
            QubitOp::S => "s",
            QubitOp::Sdg => "sdg",
            QubitOp::T => "t",
            QubitOp::Rx => "rx",
            QubitOp::Ry => "ry",
            QubitOp::Rz => "rz",
            QubitOp::Cx => "cx",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.name() == name)
    }

    fn num_params(self) -> usize {
        matches!(self, QubitOp::Rx | QubitOp::Ry | QubitOp::Rz) as usize
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Rotation,
    Displacement,
    Squeeze1,
    Squeeze2,
    Beamsplitter,
    CondRotation,
    CondDisplacement,
    CondBeamsplitter,
    /// Phase vector `θ_n` over Fock levels `0..len`; controlled when one
    /// control qubit is given.
    Snap,
    Eswap,
    CondParity,
    Qubit(QubitOp),
    /// User generator over the target qumodes (first target in the low bits)
    /// followed by the control qubits.
    Custom(Arc<ComplexMatrix>),
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::Rotation => "rotation",
            GateKind::Displacement => "displacement",
            GateKind::Squeeze1 => "squeeze1",
            GateKind::Squeeze2 => "squeeze2",
            GateKind::Beamsplitter => "beamsplitter",
            GateKind::CondRotation => "cond_rotation",
            GateKind::CondDisplacement => "cond_displacement",
            GateKind::CondBeamsplitter => "cond_beamsplitter",
            GateKind::Snap => "snap",
            GateKind::Eswap => "eswap",
            GateKind::CondParity => "cond_parity",
            GateKind::Qubit(_) => "qubit_gate",
            GateKind::Custom(_) => "custom",
        }
    }

    /// Every bosonic kind listed in the gate table plus controlled parity.
    pub const BOSONIC: [GateKind; 11] = [
        GateKind::Rotation,
        GateKind::Displacement,
        GateKind::Squeeze1,
        GateKind::Squeeze2,
        GateKind::Beamsplitter,
        GateKind::CondRotation,
        GateKind::CondDisplacement,
        GateKind::CondBeamsplitter,
        GateKind::Snap,
        GateKind::Eswap,
        GateKind::CondParity,
    ];
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::Qubit(op) => write!(f, "qubit_gate({})", op.name()),
            other => f.write_str(other.name()),
        }
    }
}

/// One gate application: kind, parameters, target qumodes and control qubits.
///
/// For [`GateKind::Qubit`] the `targets` are qubit indices.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub params: Vec<C64>,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

impl GateSpec {
    pub fn new(kind: GateKind, params: Vec<C64>, targets: Vec<usize>, controls: Vec<usize>) -> Self {
        Self {
            kind,
            params,
            targets,
            controls,
        }
    }

    pub fn rotation(theta: f64, qumode: usize) -> Self {
        Self::new(GateKind::Rotation, vec![re(theta)], vec![qumode], vec![])
    }

    pub fn displacement(alpha: C64, qumode: usize) -> Self {
        Self::new(GateKind::Displacement, vec![alpha], vec![qumode], vec![])
    }

    pub fn squeeze(theta: C64, qumode: usize) -> Self {
        Self::new(GateKind::Squeeze1, vec![theta], vec![qumode], vec![])
    }

    pub fn two_mode_squeeze(theta: C64, a: usize, b: usize) -> Self {
        Self::new(GateKind::Squeeze2, vec![theta], vec![a, b], vec![])
    }

    pub fn beamsplitter(theta: C64, a: usize, b: usize) -> Self {
        Self::new(GateKind::Beamsplitter, vec![theta], vec![a, b], vec![])
    }

    pub fn cond_rotation(theta: f64, qumode: usize, qubit: usize) -> Self {
        Self::new(GateKind::CondRotation, vec![re(theta)], vec![qumode], vec![qubit])
    }

    pub fn cond_displacement(alpha: C64, qumode: usize, qubit: usize) -> Self {
        Self::new(GateKind::CondDisplacement, vec![alpha], vec![qumode], vec![qubit])
    }

    pub fn cond_beamsplitter(theta: C64, a: usize, b: usize, qubit: usize) -> Self {
        Self::new(GateKind::CondBeamsplitter, vec![theta], vec![a, b], vec![qubit])
    }

    pub fn snap(phases: &[f64], qumode: usize) -> Self {
        Self::new(GateKind::Snap, phases.iter().map(|&p| re(p)).collect(), vec![qumode], vec![])
    }

    pub fn cond_snap(phases: &[f64], qumode: usize, qubit: usize) -> Self {
        Self::new(
            GateKind::Snap,
            phases.iter().map(|&p| re(p)).collect(),
            vec![qumode],
            vec![qubit],
        )
    }

    pub fn eswap(theta: f64, a: usize, b: usize) -> Self {
        Self::new(GateKind::Eswap, vec![re(theta)], vec![a, b], vec![])
    }

    pub fn cond_parity(qumode: usize, qubit: usize) -> Self {
        Self::new(GateKind::CondParity, vec![], vec![qumode], vec![qubit])
    }

    pub fn qubit(op: QubitOp, qubit: usize) -> Self {
        Self::new(GateKind::Qubit(op), vec![], vec![qubit], vec![])
    }

    pub fn qubit_rotation(op: QubitOp, theta: f64, qubit: usize) -> Self {
        Self::new(GateKind::Qubit(op), vec![re(theta)], vec![qubit], vec![])
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(GateKind::Qubit(QubitOp::Cx), vec![], vec![target], vec![control])
    }

    pub fn custom(generator: ComplexMatrix, qumodes: Vec<usize>, qubits: Vec<usize>) -> Self {
        Self::new(GateKind::Custom(Arc::new(generator)), vec![], qumodes, qubits)
    }

    /// Real part of parameter `i`; shape validation guarantees it exists.
    pub(crate) fn real_param(&self, i: usize) -> f64 {
        self.params[i].re
    }

    /// Checks operand counts and parameter shapes, independent of registers.
    pub fn validate_shape(&self) -> Result<()> {
        let kind = self.kind.to_string();
        let arity = |expected: &str, got: String| Error::ArityMismatch {
            kind: kind.clone(),
            expected: expected.to_string(),
            got,
        };
        // (qumode targets, controls allowed, parameter count, real params)
        let (targets, controls, params, real): (usize, &[usize], Option<usize>, bool) = match &self.kind {
            GateKind::Rotation => (1, &[0], Some(1), true),
            GateKind::Displacement | GateKind::Squeeze1 => (1, &[0], Some(1), false),
            GateKind::Squeeze2 | GateKind::Beamsplitter => (2, &[0], Some(1), false),
            GateKind::CondRotation => (1, &[1], Some(1), true),
            GateKind::CondDisplacement => (1, &[1], Some(1), false),
            GateKind::CondBeamsplitter => (2, &[1], Some(1), false),
            GateKind::Snap => (1, &[0, 1], None, true),
            GateKind::Eswap => (2, &[0], Some(1), true),
            GateKind::CondParity => (1, &[1], Some(0), true),
            GateKind::Qubit(QubitOp::Cx) => (1, &[1], Some(0), true),
            GateKind::Qubit(op) => (1, &[0], Some(op.num_params()), true),
            GateKind::Custom(g) => {
                if self.targets.is_empty() && self.controls.is_empty() {
                    return Err(arity("at least one operand", "none".into()));
                }
                if !self.params.is_empty() {
                    return Err(Error::InvalidParameter {
                        kind,
                        reason: "custom gates take no parameters".into(),
                    });
                }
                if !g.is_finite() {
                    return Err(Error::InvalidParameter {
                        kind,
                        reason: "generator has non-finite entries".into(),
                    });
                }
                (self.targets.len(), &[], None, true)
            }
        };
        if self.targets.len() != targets {
            return Err(arity(
                &format!("{targets} target(s)"),
                format!("{}", self.targets.len()),
            ));
        }
        if !controls.is_empty() && !controls.contains(&self.controls.len()) {
            let expected = controls
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(" or ");
            return Err(arity(
                &format!("{expected} control qubit(s)"),
                format!("{}", self.controls.len()),
            ));
        }
        match params {
            Some(n) if self.params.len() != n => {
                return Err(Error::InvalidParameter {
                    kind,
                    reason: format!("expected {n} parameter(s), got {}", self.params.len()),
                })
            }
            None if matches!(self.kind, GateKind::Snap) && self.params.is_empty() => {
                return Err(Error::InvalidParameter {
                    kind,
                    reason: "SNAP needs at least one phase".into(),
                })
            }
            _ => {}
        }
        for p in &self.params {
            if !(p.re.is_finite() && p.im.is_finite()) {
                return Err(Error::InvalidParameter {
                    kind,
                    reason: "non-finite parameter".into(),
                });
            }
            if real && p.im != 0.0 {
                return Err(Error::InvalidParameter {
                    kind,
                    reason: "parameter must be real".into(),
                });
            }
        }
        for (i, t) in self.targets.iter().enumerate() {
            if self.targets[..i].contains(t) {
                return Err(arity("distinct targets", format!("{t} repeated")));
            }
        }
        for (i, c) in self.controls.iter().enumerate() {
            if self.controls[..i].contains(c) {
                return Err(arity("distinct controls", format!("{c} repeated")));
            }
        }
        if let GateKind::Qubit(_) = self.kind {
            if self.controls.first().is_some_and(|c| self.targets.contains(c)) {
                return Err(arity("control distinct from target", "overlap".into()));
            }
        }
        Ok(())
    }

    /// Qumode indices this gate touches.
    pub fn qumode_operands(&self) -> &[usize] {
        match self.kind {
            GateKind::Qubit(_) => &[],
            _ => &self.targets,
        }
    }

    /// Qubit indices this gate touches, in local-space order.
    pub fn qubit_operands(&self) -> Vec<usize> {
        match self.kind {
            GateKind::Qubit(_) => self.targets.iter().chain(&self.controls).copied().collect(),
            _ => self.controls.clone(),
        }
    }

    /// Checks everything that depends on the truncation.
    pub fn validate_for(&self, space: FockSpace) -> Result<()> {
        self.validate_shape()?;
        match &self.kind {
            GateKind::Snap if self.params.len() > space.cutoff() => Err(Error::SnapPhaseVectorTooLong {
                len: self.params.len(),
                cutoff: space.cutoff(),
            }),
            GateKind::Custom(g) => {
                let want = space.cutoff().pow(self.targets.len() as u32) << self.controls.len();
                if g.dim() != want {
                    Err(Error::DimensionMismatch(format!(
                        "custom generator has dim {}, operands need {want}",
                        g.dim()
                    )))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

/// Qumode preparation: a Fock level or a (to be normalised) superposition.
#[derive(Clone, Debug, PartialEq)]
pub enum FockInit {
    Fock(u64),
    Amplitudes(Vec<C64>),
}

impl FockInit {
    /// Normalised amplitudes over `cutoff` levels.
    pub fn amplitudes(&self, cutoff: usize) -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); cutoff];
        match self {
            FockInit::Fock(n) => {
                if *n as usize >= cutoff {
                    return Err(Error::FockOutOfRange {
                        level: *n,
                        cutoff: cutoff as u64,
                    });
                }
                out[*n as usize] = C64::new(1.0, 0.0);
            }
            FockInit::Amplitudes(amps) => {
                if amps.len() > cutoff {
                    return Err(Error::FockOutOfRange {
                        level: amps.len() as u64 - 1,
                        cutoff: cutoff as u64,
                    });
                }
                let norm = crate::linalg::norm(amps);
                if !(norm > 0.0) || !norm.is_finite() {
                    return Err(Error::ZeroNormAmplitudes);
                }
                for (o, a) in out.iter_mut().zip(amps) {
                    *o = a / norm;
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    Qumode(usize),
    Qubit(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instruction {
    Initialize { qumode: usize, value: FockInit },
    Gate(GateSpec),
    /// Measured bits are laid out operand by operand (each qumode LSB first)
    /// and written to `cbits` in that order.
    Measure { operands: Vec<Operand>, cbits: Vec<usize> },
}

/// Registers plus an ordered instruction list. Mutating methods validate
/// their input and leave the circuit unchanged on error.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    qumodes: QumodeRegister,
    qubits: QubitRegister,
    cbits: ClassicalRegister,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(
        qumodes: QumodeRegister,
        qubits: Option<QubitRegister>,
        cbits: Option<ClassicalRegister>,
    ) -> Self {
        Self {
            qumodes,
            qubits: qubits.unwrap_or_default(),
            cbits: cbits.unwrap_or_default(),
            instructions: Vec::new(),
        }
    }

    pub fn qumodes(&self) -> QumodeRegister {
        self.qumodes
    }

    pub fn num_qumodes(&self) -> usize {
        self.qumodes.num_qumodes
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.num_qubits
    }

    pub fn num_cbits(&self) -> usize {
        self.cbits.num_bits
    }

    pub fn space(&self) -> FockSpace {
        self.qumodes.space
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn num_gates(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Gate(_)))
            .count()
    }

    pub fn has_measurement(&self) -> bool {
        self.instructions
            .iter()
            .any(|i| matches!(i, Instruction::Measure { .. }))
    }

    /// Copy with any measurements at the end of the instruction list removed.
    pub fn without_trailing_measurements(&self) -> Self {
        let mut out = self.clone();
        while matches!(out.instructions.last(), Some(Instruction::Measure { .. })) {
            out.instructions.pop();
        }
        out
    }

    /// Same instructions, re-registered at a different truncation.
    pub fn with_qubits_per_mode(&self, k: u32) -> Result<Self> {
        let mut out = self.clone();
        out.qumodes = QumodeRegister::new(self.num_qumodes(), k)?;
        out.validate()?;
        Ok(out)
    }

    pub fn append_gate(&mut self, spec: GateSpec) -> Result<&mut Self> {
        self.check_gate(&spec, self.space())?;
        self.instructions.push(Instruction::Gate(spec));
        Ok(self)
    }

    pub fn initialize(&mut self, qumode: usize, value: FockInit) -> Result<&mut Self> {
        self.check_initialize(qumode, &value, self.space())?;
        self.instructions.push(Instruction::Initialize { qumode, value });
        Ok(self)
    }

    pub fn measure(&mut self, operands: &[Operand], cbits: &[usize]) -> Result<&mut Self> {
        self.check_measure(operands, cbits)?;
        self.instructions.push(Instruction::Measure {
            operands: operands.to_vec(),
            cbits: cbits.to_vec(),
        });
        Ok(self)
    }

    /// Re-checks every instruction against the registers and `space`.
    pub fn validate_for(&self, space: FockSpace) -> Result<()> {
        for inst in &self.instructions {
            match inst {
                Instruction::Gate(spec) => self.check_gate(spec, space)?,
                Instruction::Initialize { qumode, value } => self.check_initialize(*qumode, value, space)?,
                Instruction::Measure { operands, cbits } => self.check_measure(operands, cbits)?,
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_for(self.space())
    }

    /// Bits written by one measurement of `operand` at the register truncation.
    pub fn operand_bits(&self, operand: Operand) -> usize {
        match operand {
            Operand::Qumode(_) => self.qumodes.qubits_per_mode() as usize,
            Operand::Qubit(_) => 1,
        }
    }

    fn check_qumode(&self, m: usize) -> Result<()> {
        if m >= self.num_qumodes() {
            return Err(Error::IndexOutOfRange {
                what: "qumode",
                index: m,
                size: self.num_qumodes(),
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits() {
            return Err(Error::IndexOutOfRange {
                what: "qubit",
                index: q,
                size: self.num_qubits(),
            });
        }
        Ok(())
    }

    fn check_gate(&self, spec: &GateSpec, space: FockSpace) -> Result<()> {
        spec.validate_shape()?;
        for &m in spec.qumode_operands() {
            self.check_qumode(m)?;
        }
        for q in spec.qubit_operands() {
            self.check_qubit(q)?;
        }
        spec.validate_for(space)
    }

    fn check_initialize(&self, qumode: usize, value: &FockInit, space: FockSpace) -> Result<()> {
        self.check_qumode(qumode)?;
        value.amplitudes(space.cutoff()).map(|_| ())
    }

    fn check_measure(&self, operands: &[Operand], cbits: &[usize]) -> Result<()> {
        for (i, op) in operands.iter().enumerate() {
            match *op {
                Operand::Qumode(m) => self.check_qumode(m)?,
                Operand::Qubit(q) => self.check_qubit(q)?,
            }
            if operands[..i].contains(op) {
                return Err(Error::ArityMismatch {
                    kind: "measure".into(),
                    expected: "distinct operands".into(),
                    got: format!("{op:?} repeated"),
                });
            }
        }
        let needed: usize = operands.iter().map(|&o| self.operand_bits(o)).sum();
        if cbits.len() < needed {
            return Err(Error::InsufficientClassicalBits {
                needed,
                given: cbits.len(),
            });
        }
        if cbits.len() > needed {
            return Err(Error::ClassicalBitCountMismatch {
                needed,
                given: cbits.len(),
            });
        }
        for (i, &b) in cbits.iter().enumerate() {
            if b >= self.num_cbits() {
                return Err(Error::IndexOutOfRange {
                    what: "classical bit",
                    index: b,
                    size: self.num_cbits(),
                });
            }
            if cbits[..i].contains(&b) {
                return Err(Error::DuplicateClassicalBit(b));
            }
        }
        Ok(())
    }
}
