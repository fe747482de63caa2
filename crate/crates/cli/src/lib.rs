//! The `lds` command-line tool.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success; for `check`, consistent |
//! | 1 | parse, validation or usage error |
//! | 2 | inconsistent |
//! | 3 | consistent at the sampled points only |
//! | 4 | dimension cap exceeded |
//! | 5 | inconclusive (`check --method structural` when the condition fails) |

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use lds_core::algebra::ProbabilityVector;
use lds_core::consistency::{
    check_consistency_exact, check_consistency_sampled, check_corollary_matrix,
    check_structural_sufficient, h_apply_power, h_apply_reduced, ConsistencyStatus,
    ConsistencyVerdict, HOperator, Method,
};
use lds_core::evolution::{
    compare_models, monte_carlo_oracle, simulate_deterministic, simulate_stochastic, Initial, Mode,
    SimulationOptions, StochasticTrajectory,
};
use lds_core::limits::{dimension_cap, set_dimension_cap};
use lds_core::model::{state_decode, GlobalSystem, NetworkModel};

pub mod init;
pub mod model_file;
pub mod output;

use init::{parse_init, InitSpec};
use model_file::ModelFile;
use output::{dec4, matrix_csv, sig17, trajectory_csv, vector4};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INCONSISTENT: i32 = 2;
pub const EXIT_AT_SAMPLES: i32 = 3;
pub const EXIT_DIMENSION_CAP: i32 = 4;
pub const EXIT_INCONCLUSIVE: i32 = 5;

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Io(String),
    Invalid(Vec<String>),
    Usage(String),
    Core(lds_core::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Invalid(v) => write!(f, "{}", v.join("\n")),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<lds_core::Error> for CliError {
    fn from(e: lds_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_dimension_cap() => EXIT_DIMENSION_CAP,
            _ => EXIT_INVALID,
        }
    }
}

type CliResult = Result<i32, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "lds",
    version,
    about = "Assemble, simulate and compare logical dynamic system models"
)]
pub struct Cli {
    /// Admit stochastic matrices whose columns do not sum to one.
    #[arg(long, global = true)]
    pub allow_substochastic: bool,

    /// Largest row or column count any matrix may have.
    #[arg(long, global = true, value_name = "N")]
    pub max_dim: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file and list every problem found.
    Validate { model: PathBuf },

    /// Print the global transition matrix; with --out, also write it and the
    /// lifted per-node matrices as CSV files.
    Assemble {
        model: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },

    /// Write a trajectory as CSV (to OUTPUT, or stdout).
    Simulate {
        model: PathBuf,
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: SimMode,
        /// State, per-node distributions ("0.4,0.6;0.5,0.5"), joint
        /// distribution, or a file holding one of those.
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// Stationarity tolerance on successive distributions.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 5)]
        window: usize,
    },

    /// Per-step L1 distance between the independence and the
    /// conditional-independence model, as CSV "t,d".
    Compare {
        model: PathBuf,
        output: Option<PathBuf>,
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },

    /// Decide whether the two stochastic models coincide.
    Check {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = CheckMethod::All)]
        method: CheckMethod,
        /// Point for --method point.
        #[arg(long)]
        at: Option<String>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMode {
    Det,
    Independent,
    Conditional,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckMethod {
    Structural,
    Exact,
    Sampled,
    All,
    Point,
}

/// Runs one invocation; data goes to `out`, diagnostics to `err`. Returns
/// the process exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let previous_cap = cli.max_dim.map(set_dimension_cap);
    let result = dispatch(&cli, out, err);
    if let Some(cap) = previous_cap {
        set_dimension_cap(cap);
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let allow = cli.allow_substochastic;
    match &cli.command {
        Command::Validate { model } => validate(model, allow, out),
        Command::Assemble { model, out: dir } => {
            assemble(&load(model, allow)?, dir.as_deref(), out)
        }
        Command::Simulate {
            model,
            output,
            mode,
            init,
            steps,
            seed,
            samples,
            tol,
            window,
        } => {
            let network = load(model, allow)?;
            let opts = SimulationOptions {
                t_max: *steps,
                tol: *tol,
                window: *window,
                stop_at_stationary: false,
            };
            let csv = simulate(
                &network,
                *mode,
                &parse_init(init)?,
                opts,
                *samples,
                *seed,
                err,
            )?;
            emit(output.as_deref(), &csv, out)
        }
        Command::Compare {
            model,
            output,
            init,
            steps,
        } => {
            let csv = compare(&load(model, allow)?, &parse_init(init)?, *steps)?;
            emit(output.as_deref(), &csv, out)
        }
        Command::Check {
            model,
            method,
            at,
            samples,
            tol,
            seed,
        } => check(
            &load(model, allow)?,
            *method,
            at.as_deref(),
            *samples,
            *tol,
            *seed,
            out,
        ),
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn load(path: &Path, allow: bool) -> Result<NetworkModel, CliError> {
    let file = ModelFile::read(path)?;
    let violations = file.violations(allow);
    if !violations.is_empty() {
        // a file that only fails on size is a cap problem, not a bad file
        return match file.build(allow) {
            Err(e @ CliError::Core(_)) if e.exit_code() == EXIT_DIMENSION_CAP => Err(e),
            _ => Err(CliError::Invalid(violations)),
        };
    }
    file.build(allow)
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CliResult {
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?
        }
        None => out.write_all(text.as_bytes()).map_err(io_error)?,
    }
    Ok(EXIT_OK)
}

fn validate(path: &Path, allow: bool, out: &mut dyn Write) -> CliResult {
    let file = ModelFile::read(path)?;
    let violations = file.violations(allow);
    if violations.is_empty() {
        let model = file.build(allow)?;
        writeln!(
            out,
            "ok: {} nodes, {} global states, {}",
            model.node_count(),
            model.state_count(),
            if model.is_deterministic() {
                "deterministic"
            } else {
                "stochastic"
            }
        )
        .map_err(io_error)?;
        if model.is_substochastic() {
            writeln!(
                out,
                "note: non-stochastic input admitted with the substochastic override"
            )
            .map_err(io_error)?;
        }
        return Ok(EXIT_OK);
    }
    if let Err(e @ CliError::Core(_)) = file.build(allow) {
        if e.exit_code() == EXIT_DIMENSION_CAP {
            return Err(e);
        }
    }
    Err(CliError::Invalid(violations))
}

fn assemble(model: &NetworkModel, dir: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let system = model.assemble()?;
    let (stdout_text, global_csv, lifted): (String, String, Vec<String>) = match &system {
        GlobalSystem::Deterministic {
            transition, lifted, ..
        } => (
            format!("{transition}\n"),
            matrix_csv(&transition.to_dense()),
            lifted.iter().map(|m| matrix_csv(&m.to_dense())).collect(),
        ),
        GlobalSystem::Stochastic {
            transition, lifted, ..
        } => {
            let csv = matrix_csv(transition.matrix());
            (
                csv.clone(),
                csv,
                lifted.iter().map(|q| matrix_csv(q.matrix())).collect(),
            )
        }
    };
    out.write_all(stdout_text.as_bytes()).map_err(io_error)?;
    if let Some(dir) = dir {
        let write = |name: String, text: &str| {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        };
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        write("global.csv".into(), &global_csv)?;
        if let GlobalSystem::Deterministic { transition, .. } = &system {
            write("global.delta".into(), &format!("{transition}\n"))?;
        }
        for (i, csv) in lifted.iter().enumerate() {
            write(format!("lifted_{}.csv", i + 1), csv)?;
        }
    }
    Ok(EXIT_OK)
}

fn distribution_rows(traj: &StochasticTrajectory) -> Vec<Vec<String>> {
    traj.joint
        .iter()
        .map(|p| p.as_slice().iter().map(|&v| sig17(v)).collect())
        .collect()
}

fn simulate(
    model: &NetworkModel,
    mode: SimMode,
    init: &InitSpec,
    opts: SimulationOptions,
    samples: usize,
    seed: u64,
    err: &mut dyn Write,
) -> Result<String, CliError> {
    let system = model.assemble()?;
    let alphabets = system.alphabets().to_vec();
    let k = system.state_count();
    let steps = opts.t_max;
    match (mode, &system) {
        (SimMode::Det, GlobalSystem::Deterministic { transition, .. }) => {
            let traj = simulate_deterministic(transition, init.state(k)?, steps)?;
            let rows = (0..=steps).map(|t| {
                let x = traj
                    .state_at(t)
                    .expect("a cycle is always found within k steps");
                state_decode(x, &alphabets)
                    .expect("states stay in range")
                    .into_iter()
                    .map(|v| v.to_string())
            });
            let mut csv = trajectory_csv("x", alphabets.len(), rows);
            if let (Some(start), Some(len)) = (traj.transient, traj.cycle_length) {
                csv.push_str(&format!(
                    "# attractor of length {len} entered at t={start}\n"
                ));
            }
            Ok(csv)
        }
        (SimMode::Det, _) => Err(CliError::Usage(
            "--mode det needs a deterministic model".into(),
        )),
        (_, GlobalSystem::Deterministic { .. }) => Err(CliError::Usage(
            "stochastic modes need a stochastic model; use --mode det".into(),
        )),
        (SimMode::Mc, GlobalSystem::Stochastic { lifted, .. }) => {
            let traj = monte_carlo_oracle(lifted, &init.joint(&alphabets)?, steps, samples, seed)?;
            let mut csv = trajectory_csv("s", k, distribution_rows(&traj));
            csv.push_str(&format!("# monte carlo: {samples} samples, seed {seed}\n"));
            Ok(csv)
        }
        (SimMode::Independent | SimMode::Conditional, _) => {
            let (initial, mode) = if mode == SimMode::Independent {
                (
                    Initial::Factors(init.factors(&alphabets)?),
                    Mode::Independent,
                )
            } else {
                (Initial::Joint(init.joint(&alphabets)?), Mode::Conditional)
            };
            let traj = simulate_stochastic(&system, initial, mode, opts)?;
            if !traj.renormalized_at.is_empty() {
                let _ = writeln!(
                    err,
                    "warning: renormalized drifting distributions at {} steps (first t={})",
                    traj.renormalized_at.len(),
                    traj.renormalized_at[0]
                );
            }
            let mut csv = trajectory_csv("s", k, distribution_rows(&traj));
            match traj.stationary_at {
                Some(t) => csv.push_str(&format!(
                    "# stationary from t={t} (tol {:e}, window {})\n",
                    opts.tol, opts.window
                )),
                None => csv.push_str(&format!(
                    "# not stationary within {steps} steps (tol {:e}, window {})\n",
                    opts.tol, opts.window
                )),
            }
            Ok(csv)
        }
    }
}

fn stochastic_parts(model: &NetworkModel) -> Result<GlobalSystem, CliError> {
    let system = model.assemble()?;
    if system.is_deterministic() {
        return Err(CliError::Core(lds_core::Error::Mode(
            "this command needs a stochastic model".into(),
        )));
    }
    Ok(system)
}

fn compare(model: &NetworkModel, init: &InitSpec, steps: usize) -> Result<String, CliError> {
    let system = stochastic_parts(model)?;
    let GlobalSystem::Stochastic { lifted, .. } = &system else {
        unreachable!("checked above")
    };
    let report = compare_models(lifted, &init.factors(system.alphabets())?, steps)?;
    let mut csv = String::from("t,d\n");
    for (t, &d) in report.distances.iter().enumerate() {
        csv.push_str(&format!("{t},{}\n", sig17(d)));
    }
    csv.push_str(&format!(
        "# max d={} at t={}\n",
        sig17(report.max),
        report.argmax
    ));
    Ok(csv)
}

fn status_name(status: ConsistencyStatus) -> &'static str {
    match status {
        ConsistencyStatus::Consistent => "consistent",
        ConsistencyStatus::Inconsistent => "inconsistent",
        ConsistencyStatus::ConsistentAtSamples => "consistent at the sampled points",
    }
}

fn method_name(method: Method) -> &'static str {
    match method {
        Method::Structural => "structural",
        Method::Exact => "exact",
        Method::Sampled => "sampled",
    }
}

fn exit_for(status: ConsistencyStatus) -> i32 {
    match status {
        ConsistencyStatus::Consistent => EXIT_OK,
        ConsistencyStatus::Inconsistent => EXIT_INCONSISTENT,
        ConsistencyStatus::ConsistentAtSamples => EXIT_AT_SAMPLES,
    }
}

fn report_verdict(v: &ConsistencyVerdict, out: &mut dyn Write) -> CliResult {
    let mut text = format!(
        "verdict: {}\nmethod: {}\n",
        status_name(v.status),
        method_name(v.method)
    );
    match v.method {
        Method::Exact => text.push_str(&format!("coefficient groups compared: {}\n", v.samples)),
        Method::Sampled => text.push_str(&format!("points evaluated: {}\n", v.samples)),
        Method::Structural => {}
    }
    if v.status == ConsistencyStatus::Inconsistent {
        if let Some(w) = &v.witness {
            text.push_str(&format!(
                "residual: {} ({:.4e})\n",
                dec4(v.residual),
                v.residual
            ));
            let full: Vec<String> = w.as_slice().iter().map(|&x| sig17(x)).collect();
            text.push_str(&format!("witness: {}\n", full.join(",")));
        }
    } else if v.method == Method::Sampled {
        text.push_str(&format!("max residual: {:.4e}\n", v.residual));
    }
    text.push_str(&format!("tolerance: {:e}\n", v.tolerance));
    if v.non_stochastic_input {
        text.push_str("note: non-stochastic input admitted with the substochastic override\n");
    }
    out.write_all(text.as_bytes()).map_err(io_error)?;
    Ok(exit_for(v.status))
}

#[allow(clippy::too_many_arguments)]
fn check(
    model: &NetworkModel,
    method: CheckMethod,
    at: Option<&str>,
    samples: usize,
    tol: f64,
    seed: u64,
    out: &mut dyn Write,
) -> CliResult {
    let system = stochastic_parts(model)?;
    let h = HOperator::from_system(&system)?;
    let w = |out: &mut dyn Write, s: String| out.write_all(s.as_bytes()).map_err(io_error);
    match method {
        CheckMethod::Point => {
            let at = at.ok_or_else(|| CliError::Usage("--method point needs --at".into()))?;
            let p: ProbabilityVector = parse_init(at)?.joint(system.alphabets())?;
            let power = h_apply_power(&h, &p)?;
            let reduced = h_apply_reduced(&h, &p)?;
            let residual = power.linf_distance(&reduced);
            let holds = residual <= tol;
            w(
                out,
                format!(
                    "p: {}\nindependence   H p^n     = {}\nconditional    H R^(n-1) p = {}\nresidual: {:.4e}\nidentity {} at p (tolerance {tol:e})\n",
                    vector4(p.as_slice()),
                    vector4(power.as_slice()),
                    vector4(reduced.as_slice()),
                    residual,
                    if holds { "holds" } else { "fails" },
                ),
            )?;
            if h.is_substochastic() {
                w(
                    out,
                    "note: non-stochastic input admitted with the substochastic override\n".into(),
                )?;
            }
            Ok(if holds { EXIT_OK } else { EXIT_INCONSISTENT })
        }
        CheckMethod::Structural => {
            let s = check_structural_sufficient(
                h.lifted(),
                lds_core::consistency::STRUCTURAL_TOLERANCE,
            );
            w(out, structural_line(&s))?;
            match s.to_verdict(&h) {
                Some(v) => report_verdict(&v, out),
                None => {
                    w(
                        out,
                        "verdict: inconclusive (the condition is sufficient, not necessary)\n"
                            .into(),
                    )?;
                    Ok(EXIT_INCONCLUSIVE)
                }
            }
        }
        CheckMethod::Exact => report_verdict(&check_consistency_exact(&h, tol)?, out),
        CheckMethod::Sampled => {
            report_verdict(&check_consistency_sampled(&h, samples, tol, seed)?, out)
        }
        CheckMethod::All => {
            let s = check_structural_sufficient(
                h.lifted(),
                lds_core::consistency::STRUCTURAL_TOLERANCE,
            );
            w(out, structural_line(&s))?;
            if h.n() >= 2 && (h.k() as u128).pow(2) <= dimension_cap() as u128 {
                let c = check_corollary_matrix(&h, samples.min(200), tol, seed)?;
                w(
                    out,
                    format!(
                        "matrix condition H R_k^(n-1) = H p^(n-1): {} (max difference {:.4e})\n",
                        if c.holds {
                            "holds at the sampled points"
                        } else {
                            "fails"
                        },
                        c.residual
                    ),
                )?;
            }
            if let Some(v) = s.to_verdict(&h) {
                return report_verdict(&v, out);
            }
            match check_consistency_exact(&h, tol) {
                Ok(v) => report_verdict(&v, out),
                Err(e) if e.is_dimension_cap() => {
                    w(out, format!("exact: skipped ({e})\n"))?;
                    report_verdict(&check_consistency_sampled(&h, samples, tol, seed)?, out)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

fn structural_line(s: &lds_core::consistency::StructuralVerdict) -> String {
    format!(
        "structural: nodes with identical columns {:?}; condition {}\n",
        s.constant_column_nodes,
        if s.sufficient { "met" } else { "not met" }
    )
}
