//! Command-line front end. Every subcommand reads one problem file and writes
//! an output bundle (`manifest.json` plus CSV tables) to `--out`.
//!
//! Exit status: 0 when the run's checks pass, 1 when a certification or bound
//! check fails, 2 on usage, parse or admissibility errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{continuity_study, epsilon_sweep};
use crate::fixed_point::{picard_solve, verify_contraction, ResidualReport, SolveReport};
use crate::io::{format_f64, parse_problem_str, sha256_hex, CsvTable, ProblemFile};
use crate::linear::{solve_linear, LinearSolution};
use crate::model::{ContractionConstants, Problem};

const DEFAULT_SWEEP_FRACTIONS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
const DEFAULT_ALPHA_OFFSETS: [f64; 2] = [0.05, 0.01];

/// Relative residual accepted by `residual`.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Parser)]
#[command(
    name = "loglap",
    version,
    about = "Log-Laplacian systems with drift: solver and checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Problem file (TOML).
    pub problem: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Overrides `[solver] seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `[solver] tol`.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Overrides `[solver] max_iter`.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Run with epsilon above the admissibility threshold; certification off.
    #[arg(long)]
    pub override_eps: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print C, K, M, epsilon, sigma and the admissibility threshold.
    Constants(CommonArgs),
    /// Solve the linear system (epsilon = 0).
    SolveLinear(CommonArgs),
    /// Picard iteration for the full system.
    Solve(CommonArgs),
    /// Lipschitz ratios of T_g on random pairs of the ball.
    ContractionProbe {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
    },
    /// Perturbation size against the maximal kernel strength.
    SweepEps {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated epsilon values; replaces the `[sweep]` block.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Solution distance against nonlinearity distance.
    Continuity {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated amplitude offsets; replaces the `[continuity]` block.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha_offsets: Option<Vec<f64>>,
    },
    /// Solve and report the equation residual.
    Residual(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::SolveLinear(_) => "solve-linear",
            Command::Solve(_) => "solve",
            Command::ContractionProbe { .. } => "contraction-probe",
            Command::SweepEps { .. } => "sweep-eps",
            Command::Continuity { .. } => "continuity",
            Command::Residual(_) => "residual",
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Constants(c)
            | Command::SolveLinear(c)
            | Command::Solve(c)
            | Command::Residual(c)
            | Command::ContractionProbe { common: c, .. }
            | Command::SweepEps { common: c, .. }
            | Command::Continuity { common: c, .. } => c,
        }
    }
}

#[derive(Serialize)]
struct ConstantsRecord {
    c: f64,
    kernel: f64,
    gradient: f64,
    epsilon: f64,
    sigma: f64,
    threshold: f64,
    u0_norm: f64,
    rho: f64,
    admissible: bool,
}

impl From<&ContractionConstants> for ConstantsRecord {
    fn from(k: &ContractionConstants) -> Self {
        Self {
            c: k.c,
            kernel: k.kernel,
            gradient: k.gradient,
            epsilon: k.epsilon,
            sigma: k.sigma,
            threshold: k.threshold,
            u0_norm: k.u0_norm,
            rho: k.rho,
            admissible: k.admissible,
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    input: String,
    input_sha256: String,
    seed: u64,
    tol: f64,
    max_iter: usize,
    override_eps: bool,
    constants: ConstantsRecord,
    pass: bool,
    files: Vec<String>,
}

/// Resolved run settings.
struct Run<'a> {
    command: &'a Command,
    file: ProblemFile,
    input_hash: String,
    seed: u64,
    tol: f64,
    max_iter: usize,
}

struct Outcome {
    pass: bool,
    constants: ContractionConstants,
    tables: Vec<(&'static str, CsvTable)>,
    summary: Vec<(String, String)>,
}

pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(&cli))
}

/// Execute a parsed command line and return the exit status.
pub fn run(cli: &Cli) -> u8 {
    match execute(&cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidProblem(_)
        | Error::Toml(_)
        | Error::InvalidArgument(_)
        | Error::EpsilonAboveThreshold { .. }
        | Error::EmptySweep
        | Error::DriftRequired
        | Error::DegenerateConstants(_)
        | Error::InvalidGrid(_)
        | Error::IncompatibleNonlinearities(_) => 2,
        _ => 1,
    }
}

fn execute(command: &Command) -> Result<bool> {
    let common = command.common();
    let text = fs::read_to_string(&common.problem).map_err(|e| {
        Error::InvalidArgument(format!("cannot read {}: {e}", common.problem.display()))
    })?;
    let file = parse_problem_str(&text)?;
    let tol = common.tol.unwrap_or(file.solver.tol);
    let max_iter = common.max_iter.unwrap_or(file.solver.max_iter);
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "--tol must be positive, got {tol}"
        )));
    }
    if max_iter == 0 {
        return Err(Error::InvalidArgument(
            "--max-iter must be at least 1".into(),
        ));
    }
    let run = Run {
        command,
        seed: common.seed.unwrap_or(file.solver.seed),
        input_hash: sha256_hex(text.as_bytes()),
        file,
        tol,
        max_iter,
    };

    let problem = Problem::new(&run.file.spec)?;
    let outcome = match command {
        Command::Constants(_) => constants(&problem)?,
        Command::SolveLinear(_) => linear_only(&problem)?,
        Command::Solve(c) => solve(&problem, &run, c.override_eps)?,
        Command::Residual(c) => residual_only(&problem, &run, c.override_eps)?,
        Command::ContractionProbe { common, pairs } => {
            probe(&problem, &run, common.override_eps, *pairs)?
        }
        Command::SweepEps { common, eps } => sweep(&problem, &run, common.override_eps, eps)?,
        Command::Continuity {
            common,
            alpha_offsets,
        } => continuity(&problem, &run, common.override_eps, alpha_offsets)?,
    };

    write_bundle(&common.out, &run, &outcome)?;
    for (k, v) in &outcome.summary {
        println!("{k} = {v}");
    }
    Ok(outcome.pass)
}

fn write_bundle(dir: &Path, run: &Run, outcome: &Outcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for (name, table) in &outcome.tables {
        let name = format!("{name}.csv");
        table.write_file(dir.join(&name))?;
        files.push(name);
    }
    let common = run.command.common();
    let manifest = Manifest {
        command: run.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        input: common.problem.display().to_string(),
        input_sha256: run.input_hash.clone(),
        seed: run.seed,
        tol: run.tol,
        max_iter: run.max_iter,
        override_eps: common.override_eps,
        constants: (&outcome.constants).into(),
        pass: outcome.pass,
        files,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}

fn constants_table(k: &ContractionConstants) -> CsvTable {
    let mut t = CsvTable::new(["name", "value"]);
    for (name, v) in [
        ("C", k.c),
        ("K", k.kernel),
        ("M", k.gradient),
        ("epsilon", k.epsilon),
        ("sigma", k.sigma),
        ("threshold", k.threshold),
        ("u0_norm", k.u0_norm),
        ("rho", k.rho),
    ] {
        t.push_fields(vec![name.into(), format_f64(v)]);
    }
    t.push_fields(vec!["admissible".into(), k.admissible.to_string()]);
    t
}

fn constants_summary(k: &ContractionConstants) -> Vec<(String, String)> {
    vec![
        ("C".into(), format_f64(k.c)),
        ("K".into(), format_f64(k.kernel)),
        ("M".into(), format_f64(k.gradient)),
        ("epsilon".into(), format_f64(k.epsilon)),
        ("sigma".into(), format_f64(k.sigma)),
        ("threshold".into(), format_f64(k.threshold)),
        ("admissible".into(), k.admissible.to_string()),
    ]
}

/// Refuse `epsilon > threshold` unless overridden.
fn admissibility_gate(k: &ContractionConstants, override_eps: bool) -> Result<()> {
    if k.epsilon > k.threshold {
        if override_eps {
            log::warn!(
                "epsilon {:e} exceeds threshold {:e}; running with certification off",
                k.epsilon,
                k.threshold
            );
        } else {
            return Err(Error::EpsilonAboveThreshold {
                eps: k.epsilon,
                threshold: k.threshold,
            });
        }
    }
    Ok(())
}

fn constants(problem: &Problem) -> Result<Outcome> {
    let linear = solve_linear(problem)?;
    let k = problem.constants(linear.norm())?;
    Ok(Outcome {
        pass: true,
        constants: k,
        tables: vec![("constants", constants_table(&k))],
        summary: constants_summary(&k),
    })
}

fn linear_solution_table(problem: &Problem, linear: &LinearSolution) -> CsvTable {
    let n = problem.len();
    let mut header = vec!["x".to_string()];
    header.extend((1..=n).map(|m| format!("u0_{m}")));
    let mut t = CsvTable::new(header);
    for (j, x) in problem.grid().nodes().into_iter().enumerate() {
        let mut row = vec![x];
        row.extend(linear.u0.point(j));
        t.push_numbers(&row);
    }
    t
}

fn linear_only(problem: &Problem) -> Result<Outcome> {
    let linear = solve_linear(problem)?;
    let k = problem.constants(linear.norm())?;
    let mut bounds = CsvTable::new([
        "component",
        "u0_hat_norm",
        "f_hat_norm_over_c",
        "zero_mode_defect",
    ]);
    let mut pass = true;
    for m in 0..problem.len() {
        let lhs = linear.spectra[m].l2_norm();
        let rhs = problem.source_hats()[m].l2_norm() / k.c;
        pass &= lhs <= rhs + 1e-12;
        bounds.push_fields(vec![
            (m + 1).to_string(),
            format_f64(lhs),
            format_f64(rhs),
            format_f64(linear.zero_mode_defect[m]),
        ]);
    }
    if !pass {
        eprintln!("a-priori bound |u0_hat| <= |f_hat|/C violated");
    }
    let mut summary = vec![("u0_norm".to_string(), format_f64(linear.norm()))];
    summary.push(("C".into(), format_f64(k.c)));
    Ok(Outcome {
        pass,
        constants: k,
        tables: vec![
            ("solution", linear_solution_table(problem, &linear)),
            ("linear_bound", bounds),
            ("constants", constants_table(&k)),
        ],
        summary,
    })
}

fn iterations_table(r: &SolveReport) -> CsvTable {
    let mut t = CsvTable::new(["iter", "diff_norm", "rate"]);
    for (i, d) in r.diff_norms.iter().enumerate() {
        let rate = if i > 0 && r.diff_norms[i - 1] > 0.0 {
            format_f64(d / r.diff_norms[i - 1])
        } else {
            String::new()
        };
        t.push_fields(vec![(i + 1).to_string(), format_f64(*d), rate]);
    }
    t
}

fn solution_table(problem: &Problem, r: &SolveReport) -> CsvTable {
    let n = problem.len();
    let mut header = vec!["x".to_string()];
    for m in 1..=n {
        header.extend([format!("u0_{m}"), format!("up_{m}"), format!("u_{m}")]);
    }
    let mut t = CsvTable::new(header);
    for (j, x) in problem.grid().nodes().into_iter().enumerate() {
        let (a, b, c) = (r.u0.point(j), r.u_p.point(j), r.u_cumulative.point(j));
        let mut row = vec![x];
        for m in 0..n {
            row.extend([a[m], b[m], c[m]]);
        }
        t.push_numbers(&row);
    }
    t
}

fn residual_table(r: &ResidualReport) -> CsvTable {
    let mut t = CsvTable::new(["component", "relative_residual", "zero_mode_defect"]);
    for (m, (res, zm)) in r
        .component_residuals
        .iter()
        .zip(&r.zero_mode_defect)
        .enumerate()
    {
        t.push_fields(vec![(m + 1).to_string(), format_f64(*res), format_f64(*zm)]);
    }
    t.push_fields(vec!["all".into(), format_f64(r.relative), String::new()]);
    t
}

fn solve_pass(r: &SolveReport, override_eps: bool) -> bool {
    r.converged && (override_eps || r.certified || r.constants.epsilon == 0.0)
}

fn solve_summary(r: &SolveReport) -> Vec<(String, String)> {
    let mut s = constants_summary(&r.constants);
    s.extend([
        ("iterations".into(), r.iterations.to_string()),
        ("converged".into(), r.converged.to_string()),
        ("certified".into(), r.certified.to_string()),
        ("u0_norm".into(), format_f64(r.u0.l2_norm())),
        ("up_norm".into(), format_f64(r.u_p.l2_norm())),
        ("relative_residual".into(), format_f64(r.residual.relative)),
    ]);
    s
}

fn checked_constants(problem: &Problem, override_eps: bool) -> Result<ContractionConstants> {
    let k = problem.constants(solve_linear(problem)?.norm())?;
    admissibility_gate(&k, override_eps)?;
    Ok(k)
}

fn solve(problem: &Problem, run: &Run, override_eps: bool) -> Result<Outcome> {
    checked_constants(problem, override_eps)?;
    let r = picard_solve(problem, run.tol, run.max_iter)?;
    let pass = solve_pass(&r, override_eps);
    if !pass {
        eprintln!(
            "solve not certified: converged = {}, admissible = {}, certified = {}",
            r.converged, r.constants.admissible, r.certified
        );
    }
    Ok(Outcome {
        pass,
        constants: r.constants,
        tables: vec![
            ("iterations", iterations_table(&r)),
            ("solution", solution_table(problem, &r)),
            ("residual", residual_table(&r.residual)),
            ("constants", constants_table(&r.constants)),
        ],
        summary: solve_summary(&r),
    })
}

fn residual_only(problem: &Problem, run: &Run, override_eps: bool) -> Result<Outcome> {
    checked_constants(problem, override_eps)?;
    let r = picard_solve(problem, run.tol, run.max_iter)?;
    let pass = r.converged && r.residual.relative <= RESIDUAL_TOL;
    if !pass {
        eprintln!(
            "relative residual {:e} (tolerance {RESIDUAL_TOL:e}), converged = {}",
            r.residual.relative, r.converged
        );
    }
    Ok(Outcome {
        pass,
        constants: r.constants,
        tables: vec![("residual", residual_table(&r.residual))],
        summary: solve_summary(&r),
    })
}

fn probe(problem: &Problem, run: &Run, override_eps: bool, pairs: usize) -> Result<Outcome> {
    let linear = solve_linear(problem)?;
    let k = problem.constants(linear.norm())?;
    admissibility_gate(&k, override_eps)?;
    let r = verify_contraction(problem, &linear.u0, pairs, run.seed)?;
    let mut t = CsvTable::new(["pair", "ratio"]);
    for (i, ratio) in r.ratios.iter().enumerate() {
        t.push_fields(vec![(i + 1).to_string(), format_f64(*ratio)]);
    }
    let pass = r.pass || override_eps;
    if !r.pass {
        eprintln!(
            "max Lipschitz ratio {:e} exceeds sigma {:e}",
            r.max_ratio, r.sigma
        );
    }
    let mut summary = constants_summary(&k);
    summary.extend([
        ("pairs".into(), r.pairs.to_string()),
        ("skipped".into(), r.skipped.to_string()),
        ("max_ratio".into(), format_f64(r.max_ratio)),
    ]);
    Ok(Outcome {
        pass,
        constants: k,
        tables: vec![("contraction", t), ("constants", constants_table(&k))],
        summary,
    })
}

fn sweep(
    problem: &Problem,
    run: &Run,
    override_eps: bool,
    eps: &Option<Vec<f64>>,
) -> Result<Outcome> {
    let linear = solve_linear(problem)?;
    let k = problem.constants(linear.norm())?;
    let values = match (eps, &run.file.sweep) {
        (Some(v), _) => v.clone(),
        (None, Some(s)) => match (&s.eps, &s.threshold_fractions) {
            (Some(v), _) => v.clone(),
            (None, Some(f)) => f.iter().map(|f| f * k.threshold).collect(),
            (None, None) => unreachable!("validated at parse time"),
        },
        (None, None) => DEFAULT_SWEEP_FRACTIONS
            .iter()
            .map(|f| f * k.threshold)
            .collect(),
    };
    let r = epsilon_sweep(problem, &values, run.tol, run.max_iter, override_eps)?;
    let mut t = CsvTable::new(["eps", "up_norm", "bound"]);
    for p in &r.points {
        t.push_numbers(&[p.epsilon, p.up_norm, p.bound]);
    }
    if !r.pass {
        eprintln!("sweep check failed (bound, monotonicity or linear trend)");
    }
    let mut summary = constants_summary(&k);
    if let Some(s) = r.slope {
        summary.push(("slope".into(), format_f64(s)));
    }
    Ok(Outcome {
        pass: r.pass,
        constants: k,
        tables: vec![("sweep", t), ("constants", constants_table(&k))],
        summary,
    })
}

fn continuity(
    problem: &Problem,
    run: &Run,
    override_eps: bool,
    offsets: &Option<Vec<f64>>,
) -> Result<Outcome> {
    let k = checked_constants(problem, override_eps)?;
    let offsets = match (offsets, &run.file.continuity) {
        (Some(v), _) => v.clone(),
        (None, Some(c)) => c.alpha_offsets.clone(),
        (None, None) => DEFAULT_ALPHA_OFFSETS.to_vec(),
    };
    let st = continuity_study(problem, &offsets, run.tol, run.max_iter)?;
    let mut t = CsvTable::new(["grad_distance", "solution_distance", "bound"]);
    for r in &st.reports {
        t.push_numbers(&[r.grad_distance, r.solution_distance, r.distance_bound]);
    }
    if !st.pass {
        eprintln!(
            "continuity check failed (bound or linear scaling); slope = {:?}",
            st.slope
        );
    }
    let mut summary = constants_summary(&k);
    if let Some(s) = st.slope {
        summary.push(("slope".into(), format_f64(s)));
    }
    Ok(Outcome {
        pass: st.pass,
        constants: k,
        tables: vec![("continuity", t), ("constants", constants_table(&k))],
        summary,
    })
}
