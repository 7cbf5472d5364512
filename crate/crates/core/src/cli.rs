//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input or parse error, 2 domain or validation error.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::circuit::{circuit_from_json, Circuit, GateSpec, QubitOp, QubitRegister, QumodeRegister};
use crate::engine::{
    condition_on_outcome, run_shots_with, simulate_with, state_records, stateread, MeasureBasis, SimOptions,
    StateVector,
};
use crate::error::Error;
use crate::fock::FockSpace;
use crate::hamiltonians::{bh_dynamics, jc_trajectory, jc_trajectory_csv, BhParams, JcParams, OnsiteMethod};
use crate::linalg::C64;
use crate::wigner::{animate_frames, wigner_mle, wigner_of_state, PhaseSpaceGrid, WignerGrid};

#[derive(Parser, Debug)]
#[command(name = "bosonic", version, about = "Hybrid qubit–qumode circuit simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run shots and write measurement counts.
    Run(RunArgs),
    /// Simulate once and write the Wigner function of one qumode.
    Wigner(WignerArgs),
    /// Write Wigner frames while gates are applied in slices.
    Animate(AnimateArgs),
    /// Built-in demonstrations.
    #[command(subcommand)]
    Demo(Demo),
}

#[derive(Args, Debug)]
pub struct CircuitArgs {
    /// Circuit JSON file.
    pub circuit: PathBuf,
    /// Override the circuit's qubits per qumode.
    #[arg(long)]
    pub qubits_per_mode: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for shots (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EndiannessArg {
    #[default]
    Little,
    Big,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    #[arg(long, default_value_t = 1024)]
    pub shots: u64,
    #[arg(long, value_enum, default_value_t = EndiannessArg::Little)]
    pub endianness: EndiannessArg,
    /// Counts JSON destination (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the last shot's final statevector as JSON records.
    #[arg(long)]
    pub statevector: Option<PathBuf>,
    /// Print the last shot's statevector as text.
    #[arg(long)]
    pub stateread: bool,
    /// Amplitudes at or below this magnitude are omitted from statevector output.
    #[arg(long, default_value_t = 1e-10)]
    pub threshold: f64,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    /// Phase-space grid as min:max:points, used for both axes.
    #[arg(long, default_value = "-6:6:200", allow_hyphen_values = true)]
    pub grid: String,
    /// Optional PPM heatmap destination.
    #[arg(long)]
    pub image: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WignerArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    #[arg(long, default_value_t = 0)]
    pub qumode: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Project a qubit instead of sampling trailing measurements, as
    /// QUBIT:OUTCOME with OUTCOME one of 0, 1, +, -.
    #[arg(long)]
    pub condition: Option<String>,
    /// Average this many shots (seeds seed, seed+1, ...) before evaluating.
    #[arg(long)]
    pub mle_shots: Option<u64>,
    #[arg(long, default_value = "wigner.csv")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct AnimateArgs {
    #[command(flatten)]
    pub circuit: CircuitArgs,
    #[arg(long, default_value_t = 0)]
    pub qumode: usize,
    #[arg(long, default_value_t = 10)]
    pub frames_per_gate: usize,
    /// Phase-space grid as min:max:points, used for both axes.
    #[arg(long, default_value = "-6:6:100", allow_hyphen_values = true)]
    pub grid: String,
    /// Also write frame_NNNN.ppm heatmaps.
    #[arg(long)]
    pub images: bool,
    /// Output directory, created if absent.
    #[arg(long, default_value = "frames")]
    pub out: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Snap,
    Bch,
}

#[derive(Subcommand, Debug)]
pub enum Demo {
    /// Conditional cat states from a qubit-controlled displacement.
    Cat {
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 6)]
        k: u32,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "-6:6:200", allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        images: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Dispersive qubit–resonator phase trajectories.
    JaynesCummings {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        omega_r: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        omega_q: f64,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        chi: f64,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Real coherent amplitude of the initial resonator state.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, default_value_t = 5)]
        k: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Trotterised Bose–Hubbard chain with one boson on the central site.
    BoseHubbard {
        #[arg(long, default_value_t = 5)]
        sites: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 0.05)]
        dt: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hop: f64,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        onsite: f64,
        #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Snap)]
        method: MethodArg,
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Displaced vacuum at a small and a large cutoff.
    Cutoff {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha_re: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        alpha_im: f64,
        #[arg(long, default_value = "-6:6:200", allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        images: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(msg: impl Display) -> Self {
        Self {
            code: 1,
            message: msg.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse { .. } | Error::InvalidGrid(_) => 1,
            _ => 2,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serialises");
    s.push('\n');
    s
}

fn load(args: &CircuitArgs) -> CliResult<(Circuit, FockSpace)> {
    let text = std::fs::read_to_string(&args.circuit).map_err(|e| io_err(&args.circuit, e))?;
    let circuit = circuit_from_json(&text).map_err(|e| match e {
        Error::Parse { path, message } => CliError::input(format!(
            "{}: parse error at {path}: {message}",
            args.circuit.display()
        )),
        other => CliError::from(other),
    })?;
    let space = match args.qubits_per_mode {
        Some(k) => FockSpace::new(k)?,
        None => circuit.space(),
    };
    Ok((circuit, space))
}

fn opts(threads: Option<usize>) -> SimOptions {
    SimOptions {
        threads,
        ..SimOptions::default()
    }
}

fn parse_grid(s: &str) -> CliResult<PhaseSpaceGrid> {
    Ok(s.parse::<PhaseSpaceGrid>()?)
}

fn parse_condition(s: &str) -> CliResult<(usize, bool, MeasureBasis)> {
    let bad = || CliError::input(format!("condition must be QUBIT:OUTCOME with OUTCOME in 0,1,+,-; got {s:?}"));
    let (q, o) = s.split_once(':').ok_or_else(bad)?;
    let qubit = q.trim().parse::<usize>().map_err(|_| bad())?;
    let (outcome, basis) = match o.trim() {
        "0" => (false, MeasureBasis::Z),
        "1" => (true, MeasureBasis::Z),
        "+" => (false, MeasureBasis::X),
        "-" => (true, MeasureBasis::X),
        _ => return Err(bad()),
    };
    Ok((qubit, outcome, basis))
}

fn write_grid(w: &WignerGrid, csv: &Path, image: Option<&Path>) -> CliResult {
    write_file(csv, w.to_csv())?;
    if let Some(img) = image {
        write_file(img, w.to_ppm())?;
    }
    Ok(())
}

fn cmd_run(a: &RunArgs, out: &mut dyn Write) -> CliResult {
    let (circuit, space) = load(&a.circuit)?;
    let (mut result, last) = run_shots_with(&circuit, space, a.shots, a.circuit.seed, &opts(a.circuit.threads))?;
    let big = a.endianness == EndiannessArg::Big;
    if big {
        result = result.reversed();
    }
    let counts = to_json(&result.counts);
    match &a.out {
        Some(path) => write_file(path, counts)?,
        None => out.write_all(counts.as_bytes()).map_err(CliError::input)?,
    }
    if let Some(path) = &a.statevector {
        write_file(path, to_json(&state_records(&last, big, a.threshold)))?;
    }
    if a.stateread {
        out.write_all(stateread(&last, big, a.threshold).as_bytes())
            .map_err(CliError::input)?;
    }
    Ok(())
}

fn cmd_wigner(a: &WignerArgs, out: &mut dyn Write) -> CliResult {
    let (circuit, space) = load(&a.circuit)?;
    let grid = parse_grid(&a.grid.grid)?;
    let condition = a.condition.as_deref().map(parse_condition).transpose()?;
    let circuit = if condition.is_some() {
        circuit.without_trailing_measurements()
    } else {
        circuit
    };
    let o = opts(a.circuit.threads);
    let prepare = |seed: u64| -> CliResult<StateVector> {
        let (state, _) = simulate_with(&circuit, space, seed, &o)?;
        Ok(match condition {
            Some((q, outcome, basis)) => condition_on_outcome(&state, q, outcome, basis)?.0,
            None => state,
        })
    };
    let w = match a.mle_shots {
        Some(n) if n > 1 => {
            let states = (0..n)
                .map(|i| prepare(a.circuit.seed.wrapping_add(i)))
                .collect::<CliResult<Vec<_>>>()?;
            wigner_mle(&states, a.qumode, &grid)?
        }
        _ => wigner_of_state(&prepare(a.circuit.seed)?, a.qumode, &grid)?,
    };
    write_grid(&w, &a.out, a.grid.image.as_deref())?;
    let (x, p, v) = w.argmax();
    writeln!(out, "wrote {} (max W = {v:.6} at x = {x:.4}, p = {p:.4})", a.out.display()).map_err(CliError::input)?;
    Ok(())
}

fn cmd_animate(a: &AnimateArgs, out: &mut dyn Write) -> CliResult {
    let (circuit, space) = load(&a.circuit)?;
    let grid = parse_grid(&a.grid)?;
    let frames = animate_frames(&circuit, space, a.qumode, a.frames_per_gate, &grid)?;
    std::fs::create_dir_all(&a.out).map_err(|e| io_err(&a.out, e))?;
    for (i, f) in frames.iter().enumerate() {
        let csv = a.out.join(format!("frame_{i:04}.csv"));
        let img = a.images.then(|| a.out.join(format!("frame_{i:04}.ppm")));
        write_grid(f, &csv, img.as_deref())?;
    }
    writeln!(out, "wrote {} frames to {}", frames.len(), a.out.display()).map_err(CliError::input)?;
    Ok(())
}

/// Qubit-controlled displacement between two Hadamards, then a qubit readout.
pub fn cat_circuit(alpha: f64, k: u32) -> crate::Result<Circuit> {
    let mut c = Circuit::new(
        QumodeRegister::new(1, k)?,
        Some(QubitRegister { num_qubits: 1 }),
        Some(crate::circuit::ClassicalRegister { num_bits: 1 }),
    );
    c.append_gate(GateSpec::qubit(QubitOp::H, 0))?
        .append_gate(GateSpec::cond_displacement(C64::new(alpha, 0.0), 0, 0))?
        .append_gate(GateSpec::qubit(QubitOp::H, 0))?
        .measure(&[crate::circuit::Operand::Qubit(0)], &[0])?;
    Ok(c)
}

fn image_path(images: bool, dir: &Path, stem: &str) -> Option<PathBuf> {
    images.then(|| dir.join(format!("{stem}.ppm")))
}

fn cmd_demo(d: &Demo, out: &mut dyn Write) -> CliResult {
    let say = |out: &mut dyn Write, line: String| writeln!(out, "{line}").map_err(CliError::input);
    match d {
        Demo::Cat {
            alpha,
            k,
            shots,
            seed,
            grid,
            images,
            out: dir,
        } => {
            let grid = parse_grid(grid)?;
            let space = FockSpace::new(*k)?;
            let circuit = cat_circuit(*alpha, *k)?;
            let (counts, _) = run_shots_with(&circuit, space, *shots, *seed, &SimOptions::default())?;
            write_file(&dir.join("cat_counts.json"), to_json(&counts.counts))?;
            let (state, _) = simulate_with(&circuit.without_trailing_measurements(), space, *seed, &SimOptions::default())?;
            for (outcome, name) in [(false, "cat_even"), (true, "cat_odd")] {
                let (branch, p) = condition_on_outcome(&state, 0, outcome, MeasureBasis::Z)?;
                let w = wigner_of_state(&branch, 0, &grid)?;
                let csv = dir.join(format!("{name}.csv"));
                write_grid(&w, &csv, image_path(*images, dir, name).as_deref())?;
                say(
                    out,
                    format!(
                        "{name}: probability {p:.6}, W(0,0) = {:.6}, wrote {}",
                        w.nearest(0.0, 0.0),
                        csv.display()
                    ),
                )?;
            }
            let zeros = counts.counts.get("0").copied().unwrap_or(0);
            say(out, format!("qubit outcomes over {shots} shots: 0 -> {zeros}, 1 -> {}", shots - zeros))?;
        }
        Demo::JaynesCummings {
            omega_r,
            omega_q,
            chi,
            t,
            samples,
            alpha,
            k,
            out: dir,
        } => {
            let space = FockSpace::new(*k)?;
            let mut prep = Circuit::new(QumodeRegister::new(1, *k)?, Some(QubitRegister { num_qubits: 1 }), None);
            prep.append_gate(GateSpec::qubit(QubitOp::H, 0))?
                .append_gate(GateSpec::displacement(C64::new(*alpha, 0.0), 0))?;
            let (initial, _) = simulate_with(&prep, space, 0, &SimOptions::default())?;
            let p = JcParams {
                omega_r: *omega_r,
                omega_q: *omega_q,
                chi: *chi,
                t: *t,
            };
            let traj = jc_trajectory(&p, space, &initial, *samples)?;
            let path = dir.join("jc_trajectory.csv");
            write_file(&path, jc_trajectory_csv(&traj))?;
            say(out, format!("wrote {} samples to {}", traj.len(), path.display()))?;
        }
        Demo::BoseHubbard {
            sites,
            steps,
            dt,
            hop,
            onsite,
            mu,
            method,
            k,
            out: dir,
        } => {
            let mut p = BhParams::central_boson(*sites, *hop, *onsite, *mu, *dt, *steps);
            p.onsite_method = match method {
                MethodArg::Snap => OnsiteMethod::Snap,
                MethodArg::Bch => OnsiteMethod::Bch,
            };
            let dynamics = bh_dynamics(&p, FockSpace::new(*k)?)?;
            let path = dir.join("bh_occupations.csv");
            write_file(&path, dynamics.to_csv())?;
            let drift = dynamics.totals().iter().fold(0.0f64, |m, t| m.max((t - 1.0).abs()));
            say(out, format!("wrote {} (total number drift {drift:.3e})", path.display()))?;
            if p.onsite_method == OnsiteMethod::Bch {
                say(out, format!("max ancilla leakage {:.3e}", dynamics.max_ancilla_leakage))?;
            }
        }
        Demo::Cutoff {
            alpha_re,
            alpha_im,
            grid,
            images,
            out: dir,
        } => {
            let grid = parse_grid(grid)?;
            let alpha = C64::new(*alpha_re, *alpha_im);
            let mut grids = Vec::new();
            for k in [2u32, 6] {
                let mut c = Circuit::new(QumodeRegister::new(1, k)?, None, None);
                c.append_gate(GateSpec::displacement(alpha, 0))?;
                let space = FockSpace::new(k)?;
                let (state, _) = simulate_with(&c, space, 0, &SimOptions::default())?;
                let w = wigner_of_state(&state, 0, &grid)?;
                let name = format!("cutoff_k{k}");
                write_grid(&w, &dir.join(format!("{name}.csv")), image_path(*images, dir, &name).as_deref())?;
                grids.push(w);
            }
            say(
                out,
                format!("max |W_k2 - W_k6| = {:.6}", grids[0].max_abs_diff(&grids[1])),
            )?;
        }
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult {
    match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Wigner(a) => cmd_wigner(a, out),
        Command::Animate(a) => cmd_animate(a, out),
        Command::Demo(d) => cmd_demo(d, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
