//! Circuit builders for dispersive Jaynes–Cummings and Bose–Hubbard dynamics.

use std::fmt::Write as _;

use crate::circuit::{Circuit, ClassicalRegister, GateSpec, QubitOp, QubitRegister, QumodeRegister};
use crate::engine::{CompiledCircuit, SimOptions, StateVector, WireLayout};
use crate::error::{Error, Result};
use crate::fock::{number, FockSpace};
use crate::linalg::{matexp, ComplexMatrix, C64, I, ONE, ZERO};

/// `H = ω_R n̂ + (ω_Q/2)σ^z + (χ/2)σ^z n̂`, evolved for time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcParams {
    pub omega_r: f64,
    pub omega_q: f64,
    pub chi: f64,
    pub t: f64,
}

impl JcParams {
    fn check(&self) -> Result<()> {
        if !(self.t >= 0.0) {
            return Err(Error::InvalidModel(format!("evolution time must be ≥ 0, got {}", self.t)));
        }
        if ![self.omega_r, self.omega_q, self.chi, self.t].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        Ok(())
    }
}

/// Gates realising `e^{−iHt}` on qumode `qumode` and qubit `qubit`.
pub fn jc_gates(p: &JcParams, qumode: usize, qubit: usize) -> Vec<GateSpec> {
    vec![
        GateSpec::rotation(-p.omega_r * p.t, qumode),
        GateSpec::qubit_rotation(QubitOp::Rz, p.omega_q * p.t, qubit),
        GateSpec::cond_rotation(-p.chi * p.t / 2.0, qumode, qubit),
    ]
}

/// One qumode, one qubit, three commuting-term gates.
pub fn jc_circuit(p: &JcParams, space: FockSpace) -> Result<Circuit> {
    p.check()?;
    let mut c = Circuit::new(
        QumodeRegister::new(1, space.qubits_per_mode())?,
        Some(QubitRegister { num_qubits: 1 }),
        None,
    );
    for g in jc_gates(p, 0, 0) {
        c.append_gate(g)?;
    }
    Ok(c)
}

/// Dense JC Hamiltonian; qumode on the low index bits, qubit on the high bit.
pub fn jc_hamiltonian(p: &JcParams, space: FockSpace) -> ComplexMatrix {
    let n = number(space);
    let id_q = ComplexMatrix::identity(2);
    let id_m = ComplexMatrix::identity(space.cutoff());
    let sz = ComplexMatrix::from_diag(&[ONE, -ONE]);
    let real = |x: f64| C64::new(x, 0.0);
    let h = &id_q.kron(&n).scale(real(p.omega_r)) + &sz.kron(&id_m).scale(real(p.omega_q / 2.0));
    &h + &sz.kron(&n).scale(real(p.chi / 2.0))
}

/// One sample of a JC trajectory.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JcSample {
    pub time: f64,
    pub qubit_x: f64,
    pub qubit_y: f64,
    pub qumode_re: f64,
    pub qumode_im: f64,
}

/// Evolves `initial` (one qumode, one qubit) and samples `⟨σ^x⟩, ⟨σ^y⟩, ⟨a⟩`
/// at `samples + 1` evenly spaced times in `[0, p.t]`.
pub fn jc_trajectory(p: &JcParams, space: FockSpace, initial: &StateVector, samples: usize) -> Result<Vec<JcSample>> {
    p.check()?;
    let layout = initial.layout();
    if layout != WireLayout::new(1, space.qubits_per_mode(), 1) {
        return Err(Error::LayoutMismatch("trajectory needs one qumode and one qubit".into()));
    }
    let samples = samples.max(1);
    let k = space.qubits_per_mode() as usize;
    let qumode_wires: Vec<usize> = (0..k).collect();
    let a = crate::fock::annihilation(space);
    let sx = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])?;
    let sy = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]])?;
    (0..=samples)
        .map(|j| {
            let time = p.t * j as f64 / samples as f64;
            let c = jc_circuit(&JcParams { t: time, ..*p }, space)?;
            let mut s = initial.clone();
            CompiledCircuit::new(&c, space, &SimOptions::default())?.apply_unitaries(&mut s)?;
            let alpha = s.expectation(&a, &qumode_wires)?;
            Ok(JcSample {
                time,
                qubit_x: s.expectation(&sx, &[k])?.re,
                qubit_y: s.expectation(&sy, &[k])?.re,
                qumode_re: alpha.re,
                qumode_im: alpha.im,
            })
        })
        .collect()
}

pub fn jc_trajectory_csv(samples: &[JcSample]) -> String {
    let mut out = String::from("time,qubit_x,qubit_y,qumode_re,qumode_im\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}",
            s.time, s.qubit_x, s.qubit_y, s.qumode_re, s.qumode_im
        );
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OnsiteMethod {
    #[default]
    Snap,
    Bch,
}

/// `H = −J Σ(a_i†a_{i+1} + h.c.) + (U/2) Σ n̂_i(n̂_i − 1) − μ Σ n̂_i` on an open chain.
#[derive(Clone, Debug, PartialEq)]
pub struct BhParams {
    pub sites: usize,
    pub hop: f64,
    pub onsite: f64,
    pub mu: f64,
    pub dt: f64,
    pub steps: usize,
    pub onsite_method: OnsiteMethod,
    /// Initial Fock occupation per site; empty means vacuum.
    pub initial: Vec<u64>,
}

impl BhParams {
    /// One boson on the central site.
    pub fn central_boson(sites: usize, hop: f64, onsite: f64, mu: f64, dt: f64, steps: usize) -> Self {
        let mut initial = vec![0; sites];
        if sites > 0 {
            initial[sites / 2] = 1;
        }
        Self {
            sites,
            hop,
            onsite,
            mu,
            dt,
            steps,
            onsite_method: OnsiteMethod::Snap,
            initial,
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.sites < 2 {
            return Err(Error::InvalidModel(format!("need at least 2 sites, got {}", self.sites)));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidModel(format!("dt must be positive, got {}", self.dt)));
        }
        if self.steps == 0 {
            return Err(Error::InvalidModel("need at least one step".into()));
        }
        if ![self.hop, self.onsite, self.mu].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        if !self.initial.is_empty() && self.initial.len() != self.sites {
            return Err(Error::InvalidModel(format!(
                "{} initial occupations for {} sites",
                self.initial.len(),
                self.sites
            )));
        }
        if self.onsite_method == OnsiteMethod::Bch && self.onsite * self.dt < 0.0 {
            return Err(Error::NegativeUdt(self.onsite * self.dt));
        }
        Ok(())
    }

    pub fn total_time(&self) -> f64 {
        self.dt * self.steps as f64
    }
}

fn bch_theta(u: f64, dt: f64) -> Result<f64> {
    let udt = u * dt;
    if udt < 0.0 || !udt.is_finite() {
        return Err(Error::NegativeUdt(udt));
    }
    Ok((udt / 4.0).sqrt())
}

fn sigma_n_generator(sigma: &ComplexMatrix, theta: f64, space: FockSpace) -> ComplexMatrix {
    sigma.kron(&number(space)).scale(I * theta)
}

/// `e^{iθσ^x n̂} e^{iθσ^y n̂} e^{−iθσ^x n̂} e^{−iθσ^y n̂}` with `θ = √(U dt/4)`, on
/// ancilla ⊗ qumode (qumode on the low index bits).
pub fn bch_onsite_gate(u: f64, dt: f64, space: FockSpace) -> Result<ComplexMatrix> {
    let theta = bch_theta(u, dt)?;
    let sx = ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])?;
    let sy = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]])?;
    let ex = |s: f64| matexp(&sigma_n_generator(&sx, s * theta, space));
    let ey = |s: f64| matexp(&sigma_n_generator(&sy, s * theta, space));
    Ok(ex(1.0)?.matmul(&ey(1.0)?).matmul(&ex(-1.0)?).matmul(&ey(-1.0)?))
}

/// Gate sequence (time order) equal to [`bch_onsite_gate`] followed by the
/// rotation `e^{i(U dt/2)n̂}`, i.e. `e^{−i(U dt/2)n̂(n̂−1)}` on ancilla `|0⟩` up to O(θ³).
pub fn bch_onsite_gates(u: f64, dt: f64, qumode: usize, ancilla: usize) -> Result<Vec<GateSpec>> {
    let theta = bch_theta(u, dt)?;
    let cr = |t: f64| GateSpec::cond_rotation(t, qumode, ancilla);
    let q = |op: QubitOp| GateSpec::qubit(op, ancilla);
    // σ^x = H σ^z H and σ^y = S H σ^z H S†.
    let about_y = |t: f64| vec![q(QubitOp::Sdg), q(QubitOp::H), cr(t), q(QubitOp::H), q(QubitOp::S)];
    let about_x = |t: f64| vec![q(QubitOp::H), cr(t), q(QubitOp::H)];
    let mut gates = about_y(-theta);
    gates.extend(about_x(-theta));
    gates.extend(about_y(theta));
    gates.extend(about_x(theta));
    gates.push(GateSpec::rotation(u * dt / 2.0, qumode));
    Ok(gates)
}

/// Appends one first-order Trotter step: hopping on even bonds, then odd
/// bonds, then on-site terms, then the chemical potential.
pub fn append_bh_step(c: &mut Circuit, p: &BhParams) -> Result<()> {
    p.check()?;
    if c.num_qumodes() != p.sites {
        return Err(Error::InvalidModel(format!(
            "circuit has {} qumodes for {} sites",
            c.num_qumodes(),
            p.sites
        )));
    }
    if p.onsite_method == OnsiteMethod::Bch && c.num_qubits() == 0 {
        return Err(Error::AncillaMissing);
    }
    let hop = C64::new(0.0, -p.hop * p.dt);
    for parity in [0, 1] {
        for i in (parity..p.sites - 1).step_by(2) {
            c.append_gate(GateSpec::beamsplitter(hop, i, i + 1))?;
        }
    }
    if p.onsite != 0.0 {
        for i in 0..p.sites {
            match p.onsite_method {
                OnsiteMethod::Snap => {
                    let half = p.onsite * p.dt / 2.0;
                    let phases: Vec<f64> = (0..c.space().cutoff())
                        .map(|n| -half * (n * n.saturating_sub(1)) as f64)
                        .collect();
                    c.append_gate(GateSpec::snap(&phases, i))?;
                }
                OnsiteMethod::Bch => {
                    for g in bch_onsite_gates(p.onsite, p.dt, i, 0)? {
                        c.append_gate(g)?;
                    }
                }
            }
        }
    }
    if p.mu != 0.0 {
        for i in 0..p.sites {
            c.append_gate(GateSpec::rotation(p.mu * p.dt, i))?;
        }
    }
    Ok(())
}

fn bh_register(p: &BhParams, space: FockSpace) -> Result<Circuit> {
    let qubits = (p.onsite_method == OnsiteMethod::Bch).then_some(QubitRegister { num_qubits: 1 });
    Ok(Circuit::new(
        QumodeRegister::new(p.sites, space.qubits_per_mode())?,
        qubits,
        Some(ClassicalRegister { num_bits: 0 }),
    ))
}

/// Full Trotterised evolution: initial occupations, then `steps` steps.
pub fn bh_circuit(p: &BhParams, space: FockSpace) -> Result<Circuit> {
    p.check()?;
    let mut c = bh_register(p, space)?;
    for (i, &n) in p.initial.iter().enumerate().filter(|(_, &n)| n > 0) {
        c.initialize(i, crate::circuit::FockInit::Fock(n))?;
    }
    for _ in 0..p.steps {
        append_bh_step(&mut c, p)?;
    }
    Ok(c)
}

/// Dense Hamiltonian of the chain, sites in wire order.
pub fn bh_hamiltonian(p: &BhParams, space: FockSpace) -> Result<ComplexMatrix> {
    let layout = WireLayout::new(p.sites, space.qubits_per_mode(), 0);
    let k = space.qubits_per_mode() as usize;
    let dim = layout.dim();
    let cutoff = space.cutoff();
    let mut h = ComplexMatrix::zeros(dim);
    for idx in 0..dim {
        let occ: Vec<usize> = (0..p.sites).map(|i| layout.fock_of(idx, i) as usize).collect();
        let diag: f64 = occ
            .iter()
            .map(|&n| p.onsite / 2.0 * (n * n.saturating_sub(1)) as f64 - p.mu * n as f64)
            .sum();
        h.set(idx, idx, C64::new(diag, 0.0));
        // a_i† a_{i+1} and its conjugate.
        for i in 0..p.sites - 1 {
            let (ni, nj) = (occ[i], occ[i + 1]);
            if nj > 0 && ni + 1 < cutoff {
                let to = idx + (1 << (i * k)) - (1 << ((i + 1) * k));
                let amp = -p.hop * ((ni + 1) as f64 * nj as f64).sqrt();
                h.set(to, idx, h.get(to, idx) + amp);
                h.set(idx, to, h.get(idx, to) + amp);
            }
        }
    }
    Ok(h)
}

/// Per-step site occupations of a Trotterised run.
#[derive(Clone, Debug, PartialEq)]
pub struct BhDynamics {
    pub dt: f64,
    /// `occupations[step][site]`, steps `0..=p.steps`.
    pub occupations: Vec<Vec<f64>>,
    /// Largest ancilla excitation probability seen after any step.
    pub max_ancilla_leakage: f64,
}

impl BhDynamics {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,time,site,occupation\n");
        for (step, row) in self.occupations.iter().enumerate() {
            for (site, n) in row.iter().enumerate() {
                let _ = writeln!(out, "{step},{:.8e},{site},{n:.8e}", step as f64 * self.dt);
            }
        }
        out
    }

    pub fn totals(&self) -> Vec<f64> {
        self.occupations.iter().map(|r| r.iter().sum()).collect()
    }
}

/// Runs the chain step by step, reading `⟨n̂_i⟩` from the statevector.
pub fn bh_dynamics(p: &BhParams, space: FockSpace) -> Result<BhDynamics> {
    p.check()?;
    let mut step = bh_register(p, space)?;
    append_bh_step(&mut step, p)?;
    let compiled = CompiledCircuit::new(&step, space, &SimOptions::default())?;
    let layout = compiled.layout();
    let initial: Vec<u64> = if p.initial.is_empty() { vec![0; p.sites] } else { p.initial.clone() };
    if let Some(&n) = initial.iter().find(|&&n| n as usize >= space.cutoff()) {
        return Err(Error::FockOutOfRange {
            level: n,
            cutoff: space.cutoff() as u64,
        });
    }
    let bits = vec![false; layout.num_qubits];
    let mut state = StateVector::basis(layout, &initial, &bits);
    let read = |s: &StateVector| (0..p.sites).map(|i| s.mean_number(i)).collect::<Vec<_>>();
    let mut occupations = vec![read(&state)];
    let mut leakage: f64 = 0.0;
    for _ in 0..p.steps {
        compiled.apply_unitaries(&mut state)?;
        occupations.push(read(&state));
        if layout.num_qubits > 0 {
            let excited: f64 = state
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(i, _)| layout.qubit_of(*i, 0))
                .map(|(_, a)| a.norm_sqr())
                .sum();
            leakage = leakage.max(excited);
        }
    }
    Ok(BhDynamics {
        dt: p.dt,
        occupations,
        max_ancilla_leakage: leakage,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::gate_unitary;
    use crate::linalg::embed;

    fn space(k: u32) -> FockSpace {
        FockSpace::new(k).unwrap()
    }

    /// Product of all gate unitaries of a purely unitary circuit.
    fn circuit_unitary(c: &Circuit, sp: FockSpace) -> ComplexMatrix {
        let layout = WireLayout::of(c, sp);
        let mut u = ComplexMatrix::identity(layout.dim());
        for inst in c.instructions() {
            if let crate::circuit::Instruction::Gate(g) = inst {
                let full = embed(&gate_unitary(g, sp).unwrap(), &layout.gate_wires(g), layout.total_wires()).unwrap();
                u = full.matmul(&u);
            }
        }
        u
    }

    #[test]
    fn zero_jc_is_identity() {
        let p = JcParams {
            omega_r: 0.0,
            omega_q: 0.0,
            chi: 0.0,
            t: 1.0,
        };
        let u = circuit_unitary(&jc_circuit(&p, space(2)).unwrap(), space(2));
        assert!((&u - &ComplexMatrix::identity(8)).frobenius_norm() < 1e-14);
    }

    #[test]
    fn jc_matches_dense_exponential() {
        let p = JcParams {
            omega_r: 1.0,
            omega_q: 2.0,
            chi: 0.1,
            t: 3.0,
        };
        let sp = space(3);
        let u = circuit_unitary(&jc_circuit(&p, sp).unwrap(), sp);
        let exact = matexp(&jc_hamiltonian(&p, sp).scale(C64::new(0.0, -p.t))).unwrap();
        assert!((&u - &exact).frobenius_norm() < 1e-10);
    }

    #[test]
    fn negative_time_rejected() {
        let p = JcParams {
            omega_r: 1.0,
            omega_q: 1.0,
            chi: 1.0,
            t: -1.0,
        };
        assert!(matches!(jc_circuit(&p, space(2)), Err(Error::InvalidModel(_))));
    }

    #[test]
    fn bch_zero_is_identity_and_negative_rejected() {
        let sp = space(2);
        let g = bch_onsite_gate(0.0, 0.1, sp).unwrap();
        assert!((&g - &ComplexMatrix::identity(8)).frobenius_norm() < 1e-14);
        assert_eq!(bch_onsite_gate(-1.0, 0.1, sp).unwrap_err(), Error::NegativeUdt(-0.1));
    }

    #[test]
    fn bch_gate_sequence_matches_matrix_product() {
        let sp = space(3);
        let (u, dt) = (0.8, 0.05);
        let mut c = Circuit::new(QumodeRegister::new(1, 3).unwrap(), Some(QubitRegister { num_qubits: 1 }), None);
        for g in bch_onsite_gates(u, dt, 0, 0).unwrap() {
            c.append_gate(g).unwrap();
        }
        let from_gates = circuit_unitary(&c, sp);
        let rot = matexp(&ComplexMatrix::identity(2).kron(&number(sp)).scale(I * (u * dt / 2.0))).unwrap();
        let want = rot.matmul(&bch_onsite_gate(u, dt, sp).unwrap());
        let diff = (&from_gates - &want).frobenius_norm();
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn bch_requires_ancilla() {
        let mut p = BhParams::central_boson(3, 1.0, 0.1, 0.0, 0.1, 1);
        p.onsite_method = OnsiteMethod::Bch;
        let mut c = Circuit::new(QumodeRegister::new(3, 2).unwrap(), None, None);
        assert_eq!(append_bh_step(&mut c, &p).unwrap_err(), Error::AncillaMissing);
    }

    #[test]
    fn free_chain_is_identity() {
        let p = BhParams::central_boson(3, 0.0, 0.0, 0.0, 0.1, 4);
        let d = bh_dynamics(&p, space(2)).unwrap();
        for row in &d.occupations {
            assert_eq!(row, &vec![0.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn two_site_hopping_single_step_is_exact() {
        let (j, dt) = (1.0, 0.7);
        let mut p = BhParams::central_boson(2, j, 0.0, 0.0, dt, 1);
        p.initial = vec![1, 0];
        let d = bh_dynamics(&p, space(2)).unwrap();
        assert!((d.occupations[1][0] - (j * dt).cos().powi(2)).abs() < 1e-12);
        assert!((d.occupations[1][1] - (j * dt).sin().powi(2)).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let p = BhParams::central_boson(3, 1.0, 0.1, 0.1, 0.1, 2);
        let csv = bh_dynamics(&p, space(2)).unwrap().to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "step,time,site,occupation");
        assert_eq!(lines.len(), 1 + 3 * 3);
        assert!(lines[5].starts_with("1,1.00000000e-1,1,"));
    }
}
