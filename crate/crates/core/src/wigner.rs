//! Wigner quasiprobability on phase-space grids.
//!
//! Quadratures follow `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`, so the vacuum
//! peaks at `W(0, 0) = 1/π`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuit::{gate_generator, Circuit, Instruction};
use crate::engine::{partial_trace, DensityMatrix, LocalGate, StateVector, Subsystem, WireLayout};
use crate::error::{Error, Result};
use crate::fock::FockSpace;
use crate::linalg::{matexp, ComplexMatrix, C64, ZERO};

/// Uniform rectangular grid over `(x, p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub num_points: usize,
}

impl PhaseSpaceGrid {
    pub fn new(x_min: f64, x_max: f64, p_min: f64, p_max: f64, num_points: usize) -> Result<Self> {
        let ok = |lo: f64, hi: f64| lo.is_finite() && hi.is_finite() && hi > lo;
        if !ok(x_min, x_max) || !ok(p_min, p_max) {
            return Err(Error::InvalidGrid("axis maximum must exceed minimum".into()));
        }
        if num_points < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points per axis, got {num_points}")));
        }
        Ok(Self {
            x_min,
            x_max,
            p_min,
            p_max,
            num_points,
        })
    }

    /// Same range on both axes.
    pub fn square(min: f64, max: f64, num_points: usize) -> Result<Self> {
        Self::new(min, max, min, max, num_points)
    }

    fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let step = (hi - lo) / (n - 1) as f64;
        (0..n).map(|i| lo + step * i as f64).collect()
    }

    pub fn xs(&self) -> Vec<f64> {
        Self::axis(self.x_min, self.x_max, self.num_points)
    }

    pub fn ps(&self) -> Vec<f64> {
        Self::axis(self.p_min, self.p_max, self.num_points)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.num_points - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.num_points - 1) as f64
    }
}

impl Default for PhaseSpaceGrid {
    fn default() -> Self {
        Self {
            x_min: -6.0,
            x_max: 6.0,
            p_min: -6.0,
            p_max: 6.0,
            num_points: 200,
        }
    }
}

/// Parses `min:max:points`, applied to both axes.
impl FromStr for PhaseSpaceGrid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(Error::InvalidGrid(format!("expected min:max:points, got {s:?}")));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidGrid(format!("not a number: {t:?}")))
        };
        let n = n
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::InvalidGrid(format!("not a point count: {n:?}")))?;
        Self::square(num(lo)?, num(hi)?, n)
    }
}

/// `W(x_i, p_j)` stored with `x` as the outer index.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub grid: PhaseSpaceGrid,
    pub values: Vec<f64>,
}

impl WignerGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.num_points + j]
    }

    /// Value at the grid point nearest `(x, p)`.
    pub fn nearest(&self, x: f64, p: f64) -> f64 {
        let idx = |v: f64, lo: f64, step: f64| {
            (((v - lo) / step).round().max(0.0) as usize).min(self.grid.num_points - 1)
        };
        self.get(
            idx(x, self.grid.x_min, self.grid.dx()),
            idx(p, self.grid.p_min, self.grid.dp()),
        )
    }

    /// `Σ W dx dp`.
    pub fn riemann_sum(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx() * self.grid.dp()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Coordinates and value of the largest entry.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let (k, &w) = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid has at least 4 points");
        let n = self.grid.num_points;
        (self.grid.xs()[k / n], self.grid.ps()[k % n], w)
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,p,w\n");
        let (xs, ps) = (self.grid.xs(), self.grid.ps());
        for (i, x) in xs.iter().enumerate() {
            for (j, p) in ps.iter().enumerate() {
                let _ = writeln!(out, "{x:.8e},{p:.8e},{:.8e}", self.get(i, j));
            }
        }
        out
    }

    /// Parses the CSV written by [`WignerGrid::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let bad = |line: usize, msg: &str| Error::Parse {
            path: format!("line {line}"),
            message: msg.to_string(),
        };
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("x,p,w") {
            return Err(bad(1, "expected header x,p,w"));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(i + 2, "non-numeric field"))?;
            let [x, p, w] = cols[..] else {
                return Err(bad(i + 2, "expected 3 fields"));
            };
            rows.push((x, p, w));
        }
        let n = (rows.len() as f64).sqrt().round() as usize;
        if n < 2 || n * n != rows.len() {
            return Err(bad(rows.len() + 1, "row count is not a square grid"));
        }
        let grid = PhaseSpaceGrid::new(rows[0].0, rows[n * n - 1].0, rows[0].1, rows[n - 1].1, n)?;
        Ok(Self {
            grid,
            values: rows.into_iter().map(|r| r.2).collect(),
        })
    }

    pub fn write_csv(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_csv())
    }

    /// Binary PPM heatmap; `x` runs left to right, `p` bottom to top.
    /// Red is positive, blue negative, white zero; scale is symmetric.
    pub fn to_ppm(&self) -> Vec<u8> {
        let n = self.grid.num_points;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut out = format!("P6\n{n} {n}\n255\n").into_bytes();
        for j in (0..n).rev() {
            for i in 0..n {
                let v = (self.get(i, j) / scale).clamp(-1.0, 1.0);
                let fade = (255.0 * (1.0 - v.abs())).round() as u8;
                out.extend_from_slice(&if v >= 0.0 { [255, fade, fade] } else { [fade, fade, 255] });
            }
        }
        out
    }

    pub fn write_ppm(&self, path: &Path) -> std::io::Result<()> {
        std::fs::File::create(path)?.write_all(&self.to_ppm())
    }
}

/// Per-point evaluator of the Fock-basis Wigner kernel.
struct Kernel {
    cutoff: usize,
    ln_fact: Vec<f64>,
}

const RESCALE: f64 = 1e150;

impl Kernel {
    fn new(cutoff: usize) -> Self {
        let mut ln_fact = vec![0.0; cutoff + 1];
        for j in 1..=cutoff {
            ln_fact[j] = ln_fact[j - 1] + (j as f64).ln();
        }
        Self { cutoff, ln_fact }
    }

    /// Calls `f(n, d, w)` with `w = W_{|n+d⟩⟨n|}(x, p)` for every pair in the cutoff.
    fn for_each(&self, x: f64, p: f64, mut f: impl FnMut(usize, usize, C64)) {
        let r = x * x + p * p;
        let z = 2.0 * r;
        let phase = C64::from_polar(1.0, -p.atan2(x));
        let mut rot = C64::new(1.0, 0.0);
        let ln_z = z.ln();
        for d in 0..self.cutoff {
            // z^{d/2} e^{-z/2} / sqrt(d!) carried in log space.
            let ln_pref = if d == 0 {
                -r
            } else if z > 0.0 {
                0.5 * d as f64 * ln_z - r - 0.5 * self.ln_fact[d]
            } else {
                f64::NEG_INFINITY
            };
            // sqrt(d! k!/(k+d)!) L_k^{(d)}(z) by a normalised three-term recurrence.
            let (mut prev, mut cur) = (0.0, 1.0);
            let mut ln_scale = 0.0;
            for n in 0..self.cutoff - d {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let mag = sign * cur * (ln_pref + ln_scale).exp();
                f(n, d, rot * (mag / std::f64::consts::PI));
                let k = n as f64;
                let dd = d as f64;
                let next = ((2.0 * k + 1.0 + dd - z) * cur - (k * (k + dd)).sqrt() * prev)
                    / ((k + 1.0) * (k + 1.0 + dd)).sqrt();
                prev = cur;
                cur = next;
                if cur.abs() > RESCALE {
                    cur /= RESCALE;
                    prev /= RESCALE;
                    ln_scale += RESCALE.ln();
                }
            }
            rot *= phase;
        }
    }
}

/// `W_{|m⟩⟨n|}(x, p)` for a single Fock-basis operator.
pub fn fock_kernel(m: usize, n: usize, x: f64, p: f64) -> C64 {
    let (hi, lo) = (m.max(n), m.min(n));
    let mut out = ZERO;
    Kernel::new(hi + 1).for_each(x, p, |k, d, w| {
        if k == lo && d == hi - lo {
            out = w;
        }
    });
    if m >= n {
        out
    } else {
        out.conj()
    }
}

/// Wigner function of a single-qumode density matrix given as raw entries.
pub fn wigner_matrix(rho: &ComplexMatrix, grid: &PhaseSpaceGrid) -> Result<WignerGrid> {
    let dim = rho.dim();
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::NotAQumodeDensityMatrix(format!("dimension {dim} is not 2^k with k ≥ 1")));
    }
    if !rho.is_finite() {
        return Err(Error::NonHermitianInput);
    }
    let tol = 1e-10 * rho.frobenius_norm().max(1.0);
    if !rho.is_hermitian(tol) {
        return Err(Error::NonHermitianInput);
    }
    let kernel = Kernel::new(dim);
    let xs = grid.xs();
    let ps = grid.ps();
    let n = grid.num_points;
    let values = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let mut w = 0.0;
            kernel.for_each(xs[idx / n], ps[idx % n], |k, d, kern| {
                let term = (rho.get(k + d, k) * kern).re;
                w += if d == 0 { term } else { 2.0 * term };
            });
            w
        })
        .collect();
    Ok(WignerGrid { grid: *grid, values })
}

/// Wigner function of a reduced single-qumode state.
pub fn wigner(rho: &DensityMatrix, grid: &PhaseSpaceGrid) -> Result<WignerGrid> {
    if !rho.is_single_qumode() {
        return Err(Error::NotAQumodeDensityMatrix(format!(
            "subsystem keeps qumodes {:?} and qubits {:?}",
            rho.subsystem.qumodes, rho.subsystem.qubits
        )));
    }
    if rho.dim() != 1usize << rho.qubits_per_mode {
        return Err(Error::NotAQumodeDensityMatrix(format!(
            "dimension {} does not match cutoff {}",
            rho.dim(),
            1usize << rho.qubits_per_mode
        )));
    }
    wigner_matrix(&rho.matrix, grid)
}

/// Reduces `state` to `qumode` and evaluates its Wigner function.
pub fn wigner_of_state(state: &StateVector, qumode: usize, grid: &PhaseSpaceGrid) -> Result<WignerGrid> {
    wigner(&partial_trace(state, &Subsystem::qumode(qumode))?, grid)
}

/// Wigner function of the sample-mean statevector. Each state is first
/// rotated so its largest-magnitude amplitude is real and positive.
pub fn wigner_mle(states: &[StateVector], qumode: usize, grid: &PhaseSpaceGrid) -> Result<WignerGrid> {
    let first = states.first().ok_or(Error::EmptyInput)?;
    let layout = first.layout();
    if let Some(s) = states.iter().find(|s| s.layout() != layout) {
        return Err(Error::LayoutMismatch(format!(
            "states mix layouts {:?} and {:?}",
            layout,
            s.layout()
        )));
    }
    let mut mean = vec![ZERO; layout.dim()];
    for s in states {
        let amps = s.amplitudes();
        let pivot = amps
            .iter()
            .max_by(|a, b| a.norm_sqr().total_cmp(&b.norm_sqr()))
            .copied()
            .unwrap_or(ZERO);
        let align = if pivot.norm() > 0.0 { pivot.conj() / pivot.norm() } else { C64::new(1.0, 0.0) };
        for (m, a) in mean.iter_mut().zip(amps) {
            *m += a * align;
        }
    }
    let inv = 1.0 / states.len() as f64;
    let mean = StateVector::from_amplitudes(layout, mean.into_iter().map(|a| a * inv).collect())?;
    wigner_of_state(&mean, qumode, grid)
}

/// Wigner frames as each gate is applied in `frames_per_gate` equal slices
/// of its generator. Frame 0 is the initial vacuum. Initialize instructions
/// take effect at once and add no frames.
pub fn animate_frames(
    circuit: &Circuit,
    space: FockSpace,
    qumode: usize,
    frames_per_gate: usize,
    grid: &PhaseSpaceGrid,
) -> Result<Vec<WignerGrid>> {
    if frames_per_gate == 0 {
        return Err(Error::InvalidParameter {
            kind: "frames_per_gate".into(),
            reason: "must be at least 1".into(),
        });
    }
    if circuit.has_measurement() {
        return Err(Error::MeasurementInAnimation);
    }
    let circuit = if circuit.space() == space {
        circuit.clone()
    } else {
        circuit.with_qubits_per_mode(space.qubits_per_mode())?
    };
    circuit.validate_for(space)?;
    let layout = WireLayout::of(&circuit, space);
    if layout.total_wires() > crate::engine::DEFAULT_WIRE_CAP {
        return Err(Error::WireCapExceeded {
            wires: layout.total_wires(),
            cap: crate::engine::DEFAULT_WIRE_CAP,
        });
    }
    if qumode >= layout.num_qumodes {
        return Err(Error::IndexOutOfRange {
            what: "qumode",
            index: qumode,
            size: layout.num_qumodes,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut state = StateVector::vacuum(layout);
    let mut frames = vec![wigner_of_state(&state, qumode, grid)?];
    for inst in circuit.instructions() {
        match inst {
            Instruction::Initialize { qumode: m, value } => {
                state.reset_qumode(*m, &value.amplitudes(space.cutoff())?, &mut rng)?;
            }
            Instruction::Gate(spec) => {
                let g = gate_generator(spec, space)?;
                let wires = layout.gate_wires(spec);
                let step = matexp(&g.scale(C64::new(1.0 / frames_per_gate as f64, 0.0)))?;
                let gate = LocalGate::new(std::sync::Arc::new(step), wires, layout.total_wires())?;
                for _ in 0..frames_per_gate {
                    state.apply_gate(&gate);
                    frames.push(wigner_of_state(&state, qumode, grid)?);
                }
            }
            Instruction::Measure { .. } => return Err(Error::MeasurementInAnimation),
        }
    }
    Ok(frames)
}
