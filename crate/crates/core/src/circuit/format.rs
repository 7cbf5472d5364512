//! JSON circuit file format.
//!
//! ```json
//! {
//!   "registers": { "qumodes": 1, "qubits_per_mode": 6, "qubits": 1, "cbits": 1 },
//!   "instructions": [
//!     { "op": "initialize", "qumode": 0, "value": 0 },
//!     { "op": "gate", "kind": "qubit_gate", "name": "h", "targets": [0] },
//!     { "op": "gate", "kind": "cond_displacement", "params": [[1.0, 0.0]],
//!       "targets": [0], "controls": [0] },
//!     { "op": "measure", "operands": [{ "qubit": 0 }], "cbits": [0] }
//!   ]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs. `value` is a Fock level or a list of
//! complex amplitudes. Qubit gates name their qubits in `targets`.

use serde::{Deserialize, Serialize};

use super::{Circuit, ClassicalRegister, FockInit, GateKind, GateSpec, Instruction, Operand, QubitOp, QubitRegister, QumodeRegister};
use crate::error::{Error, Result};
use crate::linalg::C64;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub registers: RegistersRecord,
    #[serde(default)]
    pub instructions: Vec<InstructionRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RegistersRecord {
    pub qumodes: usize,
    pub qubits_per_mode: u32,
    #[serde(default)]
    pub qubits: usize,
    #[serde(default)]
    pub cbits: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstructionRecord {
    Initialize {
        qumode: usize,
        value: InitValue,
    },
    Gate {
        kind: KindRecord,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        params: Vec<[f64; 2]>,
        #[serde(default)]
        targets: Vec<usize>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        controls: Vec<usize>,
    },
    Measure {
        operands: Vec<OperandRecord>,
        cbits: Vec<usize>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum InitValue {
    Fock(u64),
    Amplitudes(Vec<[f64; 2]>),
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum KindRecord {
    Rotation,
    Displacement,
    Squeeze1,
    Squeeze2,
    Beamsplitter,
    CondRotation,
    CondDisplacement,
    CondBeamsplitter,
    Snap,
    Eswap,
    CondParity,
    QubitGate,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum OperandRecord {
    Qumode(usize),
    Qubit(usize),
}

fn complex(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn pair(c: &C64) -> [f64; 2] {
    [c.re, c.im]
}

impl InstructionRecord {
    fn into_instruction(self) -> Result<Instruction> {
        Ok(match self {
            InstructionRecord::Initialize { qumode, value } => Instruction::Initialize {
                qumode,
                value: match value {
                    InitValue::Fock(n) => FockInit::Fock(n),
                    InitValue::Amplitudes(a) => FockInit::Amplitudes(a.iter().map(complex).collect()),
                },
            },
            InstructionRecord::Gate {
                kind,
                name,
                params,
                targets,
                controls,
            } => {
                let kind = match (kind, name) {
                    (KindRecord::QubitGate, Some(name)) => GateKind::Qubit(QubitOp::from_name(&name).ok_or_else(|| Error::Parse {
                        path: "name".into(),
                        message: format!("unknown qubit gate `{name}`"),
                    })?),
                    (KindRecord::QubitGate, None) => {
                        return Err(Error::Parse {
                            path: "name".into(),
                            message: "qubit_gate needs a `name`".into(),
                        })
                    }
                    (_, Some(_)) => {
                        return Err(Error::Parse {
                            path: "name".into(),
                            message: "`name` is only valid for qubit_gate".into(),
                        })
                    }
                    (k, None) => match k {
                        KindRecord::Rotation => GateKind::Rotation,
                        KindRecord::Displacement => GateKind::Displacement,
                        KindRecord::Squeeze1 => GateKind::Squeeze1,
                        KindRecord::Squeeze2 => GateKind::Squeeze2,
                        KindRecord::Beamsplitter => GateKind::Beamsplitter,
                        KindRecord::CondRotation => GateKind::CondRotation,
                        KindRecord::CondDisplacement => GateKind::CondDisplacement,
                        KindRecord::CondBeamsplitter => GateKind::CondBeamsplitter,
                        KindRecord::Snap => GateKind::Snap,
                        KindRecord::Eswap => GateKind::Eswap,
                        KindRecord::CondParity => GateKind::CondParity,
                        KindRecord::QubitGate => unreachable!(),
                    },
                };
                Instruction::Gate(GateSpec::new(kind, params.iter().map(complex).collect(), targets, controls))
            }
            InstructionRecord::Measure { operands, cbits } => Instruction::Measure {
                operands: operands
                    .into_iter()
                    .map(|o| match o {
                        OperandRecord::Qumode(m) => Operand::Qumode(m),
                        OperandRecord::Qubit(q) => Operand::Qubit(q),
                    })
                    .collect(),
                cbits,
            },
        })
    }

    fn from_instruction(inst: &Instruction) -> Result<Self> {
        Ok(match inst {
            Instruction::Initialize { qumode, value } => InstructionRecord::Initialize {
                qumode: *qumode,
                value: match value {
                    FockInit::Fock(n) => InitValue::Fock(*n),
                    FockInit::Amplitudes(a) => InitValue::Amplitudes(a.iter().map(pair).collect()),
                },
            },
            Instruction::Gate(spec) => {
                let (kind, name) = match &spec.kind {
                    GateKind::Rotation => (KindRecord::Rotation, None),
                    GateKind::Displacement => (KindRecord::Displacement, None),
                    GateKind::Squeeze1 => (KindRecord::Squeeze1, None),
                    GateKind::Squeeze2 => (KindRecord::Squeeze2, None),
                    GateKind::Beamsplitter => (KindRecord::Beamsplitter, None),
                    GateKind::CondRotation => (KindRecord::CondRotation, None),
                    GateKind::CondDisplacement => (KindRecord::CondDisplacement, None),
                    GateKind::CondBeamsplitter => (KindRecord::CondBeamsplitter, None),
                    GateKind::Snap => (KindRecord::Snap, None),
                    GateKind::Eswap => (KindRecord::Eswap, None),
                    GateKind::CondParity => (KindRecord::CondParity, None),
                    GateKind::Qubit(op) => (KindRecord::QubitGate, Some(op.name().to_string())),
                    GateKind::Custom(_) => {
                        return Err(Error::InvalidParameter {
                            kind: "custom".into(),
                            reason: "custom gates cannot be written to a circuit file".into(),
                        })
                    }
                };
                InstructionRecord::Gate {
                    kind,
                    name,
                    params: spec.params.iter().map(pair).collect(),
                    targets: spec.targets.clone(),
                    controls: spec.controls.clone(),
                }
            }
            Instruction::Measure { operands, cbits } => InstructionRecord::Measure {
                operands: operands
                    .iter()
                    .map(|o| match *o {
                        Operand::Qumode(m) => OperandRecord::Qumode(m),
                        Operand::Qubit(q) => OperandRecord::Qubit(q),
                    })
                    .collect(),
                cbits: cbits.clone(),
            },
        })
    }
}

impl CircuitFile {
    /// Validates the file into a circuit. Errors name the offending entry.
    pub fn into_circuit(self) -> Result<Circuit> {
        let r = self.registers;
        let qumodes = QumodeRegister::new(r.qumodes, r.qubits_per_mode)?;
        let mut circuit = Circuit::new(
            qumodes,
            Some(QubitRegister { num_qubits: r.qubits }),
            Some(ClassicalRegister { num_bits: r.cbits }),
        );
        for (i, rec) in self.instructions.into_iter().enumerate() {
            let at = |e: Error| match e {
                Error::Parse { path, message } => Error::Parse {
                    path: format!("instructions[{i}].{path}"),
                    message,
                },
                other => other,
            };
            let appended = match rec.into_instruction().map_err(at)? {
                Instruction::Initialize { qumode, value } => circuit.initialize(qumode, value).map(|_| ()),
                Instruction::Gate(spec) => circuit.append_gate(spec).map(|_| ()),
                Instruction::Measure { operands, cbits } => circuit.measure(&operands, &cbits).map(|_| ()),
            };
            appended?;
        }
        Ok(circuit)
    }

    pub fn from_circuit(circuit: &Circuit) -> Result<Self> {
        Ok(Self {
            registers: RegistersRecord {
                qumodes: circuit.num_qumodes(),
                qubits_per_mode: circuit.qumodes().qubits_per_mode(),
                qubits: circuit.num_qubits(),
                cbits: circuit.num_cbits(),
            },
            instructions: circuit
                .instructions()
                .iter()
                .map(InstructionRecord::from_instruction)
                .collect::<Result<_>>()?,
        })
    }
}

/// Parses and validates a circuit document.
///
/// Syntax errors come back as [`Error::Parse`] with the JSON path and line;
/// semantic errors (indices, Fock levels, arity) keep their own variants.
pub fn circuit_from_json(text: &str) -> Result<Circuit> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: CircuitFile = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    file.into_circuit()
}

pub fn circuit_to_json(circuit: &Circuit) -> Result<String> {
    let file = CircuitFile::from_circuit(circuit)?;
    Ok(serde_json::to_string_pretty(&file).expect("circuit records serialise"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAT: &str = r#"{
      "registers": { "qumodes": 1, "qubits_per_mode": 6, "qubits": 1, "cbits": 1 },
      "instructions": [
        { "op": "initialize", "qumode": 0, "value": 0 },
        { "op": "gate", "kind": "qubit_gate", "name": "h", "targets": [0] },
        { "op": "gate", "kind": "cond_displacement", "params": [[1.0, 0.0]], "targets": [0], "controls": [0] },
        { "op": "gate", "kind": "qubit_gate", "name": "h", "targets": [0] },
        { "op": "measure", "operands": [{ "qubit": 0 }], "cbits": [0] }
      ]
    }"#;

    #[test]
    fn parses_cat_circuit() {
        let c = circuit_from_json(CAT).unwrap();
        assert_eq!(c.instructions().len(), 5);
        assert_eq!(c.num_gates(), 3);
        assert!(c.has_measurement());
    }

    #[test]
    fn round_trips_through_json() {
        let c = circuit_from_json(CAT).unwrap();
        let text = circuit_to_json(&c).unwrap();
        assert_eq!(circuit_from_json(&text).unwrap(), c);
    }

    #[test]
    fn unknown_kind_names_the_entry() {
        let bad = CAT.replace("cond_displacement", "teleport");
        match circuit_from_json(&bad).unwrap_err() {
            Error::Parse { path, message } => {
                assert!(path.starts_with("instructions[2]"), "{path}");
                assert!(message.contains("teleport"), "{message}");
                assert!(message.contains("line"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_qubit_gate_is_a_parse_error() {
        let bad = CAT.replacen("\"h\"", "\"hadamard\"", 1);
        match circuit_from_json(&bad).unwrap_err() {
            Error::Parse { path, .. } => assert_eq!(path, "instructions[1].name"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validation_errors_keep_their_variant() {
        let bad = CAT.replace("\"value\": 0", "\"value\": 64");
        assert!(matches!(circuit_from_json(&bad), Err(Error::FockOutOfRange { .. })));
    }

    #[test]
    fn amplitude_initialisation() {
        let text = r#"{ "registers": { "qumodes": 1, "qubits_per_mode": 2 },
          "instructions": [ { "op": "initialize", "qumode": 0, "value": [[1,0],[0,1]] } ] }"#;
        let c = circuit_from_json(text).unwrap();
        match &c.instructions()[0] {
            Instruction::Initialize {
                value: FockInit::Amplitudes(a),
                ..
            } => assert_eq!(a[1], C64::new(0.0, 1.0)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
