//! Gate generators on the minimal local space.
//!
//! Local index layout: the first target qumode occupies the low-order bits,
//! the second target the next `k` bits, and a control qubit (if any) is the
//! most-significant bit. That matches the wire list `targets ++ controls`
//! handed to the engine.

use std::f64::consts::PI;

use super::{GateKind, GateSpec, QubitOp};
use crate::error::{Error, Result};
use crate::fock::{annihilation, creation, number, FockSpace};
use crate::linalg::{is_unitary, matexp, ComplexMatrix, C64, DEFAULT_TOL, I, ONE, ZERO};

fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[ONE, -ONE])
}

/// `op_a` on the first mode, `op_b` on the second.
fn two_mode(op_a: &ComplexMatrix, op_b: &ComplexMatrix) -> ComplexMatrix {
    op_b.kron(op_a)
}

fn controlled(g: &ComplexMatrix) -> ComplexMatrix {
    sigma_z().kron(g)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Fock-label exchange `|n_a, n_b⟩ → |n_b, n_a⟩`.
pub fn swap_matrix(space: FockSpace) -> ComplexMatrix {
    let d = space.cutoff();
    let mut s = ComplexMatrix::zeros(d * d);
    for na in 0..d {
        for nb in 0..d {
            s.set(nb + d * na, na + d * nb, ONE);
        }
    }
    s
}

/// Generator of a standard qubit gate on its local wires (`targets ++ controls`).
pub fn qubit_generator(op: QubitOp, params: &[C64]) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let x = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]]).unwrap();
    let y = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
    let z = sigma_z();
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let h = ComplexMatrix::from_rows(&[vec![real(s2), real(s2)], vec![real(s2), real(-s2)]]).unwrap();
    // exp(iπ(I − U)/2) = U for a Hermitian involution U.
    let involution = |u: &ComplexMatrix| (&id - u).scale(I * (PI / 2.0));
    let theta = params.first().map_or(0.0, |p| p.re);
    match op {
        QubitOp::H => involution(&h),
        QubitOp::X => involution(&x),
        QubitOp::Y => involution(&y),
        QubitOp::Z => involution(&z),
        QubitOp::S => (&id - &z).scale(I * (PI / 4.0)),
        QubitOp::Sdg => (&id - &z).scale(-I * (PI / 4.0)),
        QubitOp::T => (&id - &z).scale(I * (PI / 8.0)),
        QubitOp::Rx => x.scale(-I * (theta / 2.0)),
        QubitOp::Ry => y.scale(-I * (theta / 2.0)),
        QubitOp::Rz => z.scale(-I * (theta / 2.0)),
        QubitOp::Cx => {
            // iπ·|1⟩⟨1|_c ⊗ (I − X)/2 on wires [target, control].
            let p1 = ComplexMatrix::from_diag(&[ZERO, ONE]);
            p1.kron(&(&id - &x)).scale(I * (PI / 2.0))
        }
    }
}

/// Skew-Hermitian generator `G` with gate `= exp(G)`, on the local space of
/// `spec` (see module docs for the index layout).
pub fn gate_generator(spec: &GateSpec, space: FockSpace) -> Result<ComplexMatrix> {
    spec.validate_for(space)?;
    let a = annihilation(space);
    let ad = creation(space);
    let n = number(space);
    let d = space.cutoff();
    let p = |i: usize| spec.params[i];

    let displacement = |alpha: C64| &ad.scale(alpha) - &a.scale(alpha.conj());
    let beamsplitter = |theta: C64| {
        &two_mode(&ad, &a).scale(theta) - &two_mode(&a, &ad).scale(theta.conj())
    };
    let rotation = |theta: f64| n.scale(I * theta);

    let g = match &spec.kind {
        GateKind::Rotation => rotation(spec.real_param(0)),
        GateKind::Displacement => displacement(p(0)),
        GateKind::Squeeze1 => {
            let theta = p(0);
            (&a.matmul(&a).scale(theta.conj()) - &ad.matmul(&ad).scale(theta)).scale(real(0.5))
        }
        GateKind::Squeeze2 => {
            let theta = p(0);
            &two_mode(&a, &a).scale(theta.conj()) - &two_mode(&ad, &ad).scale(theta)
        }
        GateKind::Beamsplitter => beamsplitter(p(0)),
        GateKind::CondRotation => controlled(&rotation(spec.real_param(0))),
        GateKind::CondDisplacement => controlled(&displacement(p(0))),
        GateKind::CondBeamsplitter => controlled(&beamsplitter(p(0))),
        GateKind::Snap => {
            let mut diag = vec![ZERO; d];
            for (level, phase) in spec.params.iter().enumerate() {
                diag[level] = I * phase.re;
            }
            let g = ComplexMatrix::from_diag(&diag);
            if spec.controls.is_empty() {
                g
            } else {
                controlled(&g)
            }
        }
        GateKind::Eswap => swap_matrix(space).scale(I * (spec.real_param(0) / 2.0)),
        GateKind::CondParity => {
            let sz_plus_i = &sigma_z() + &ComplexMatrix::identity(2);
            sz_plus_i.kron(&n).scale(I * (PI / 2.0))
        }
        GateKind::Qubit(op) => qubit_generator(*op, &spec.params),
        GateKind::Custom(g) => (**g).clone(),
    };
    Ok(g)
}

/// `exp(generator)`, checked for unitarity.
pub fn gate_unitary(spec: &GateSpec, space: FockSpace) -> Result<ComplexMatrix> {
    let g = gate_generator(spec, space)?;
    let u = matexp(&g).map_err(|e| match (&spec.kind, e) {
        (GateKind::Custom(_), Error::NonSkewHermitian { .. }) => Error::NonUnitaryGate(spec.kind.to_string()),
        (_, e) => e,
    })?;
    if !is_unitary(&u, DEFAULT_TOL * u.dim() as f64) || !u.is_finite() {
        return Err(Error::NonUnitaryGate(spec.kind.to_string()));
    }
    Ok(u)
}
