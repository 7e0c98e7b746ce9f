use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tucker_rtr::solver::{ModelKind, Termination};
use tucker_rtr::{HessianModel, SolverConfig};
use tucker_rtr_cli::experiments::{
    ingest_and_report, run_convergence, run_model_order, run_solver, ModelOrderConfig, SolverKind,
};
use tucker_rtr_cli::{
    generate_problem, read_tensor_path, write_tensor_file, write_trace, CliError, CliResult, Problem, ProblemSpec,
    TraceRow, TruthKind,
};

#[derive(Parser)]
#[command(name = "tucker-rtr", version, about = "Riemannian trust-region tensor completion on the Tucker manifold")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic sampled tensor.
    Synth {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Output file (stdout if absent).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the full ground truth as a fully sampled file.
        #[arg(long)]
        truth_output: Option<PathBuf>,
    },
    /// Complete a tensor from a file or a synthetic problem.
    Complete {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long = "solver", id = "solver_kind", value_name = "SOLVER", value_enum, default_value = "rtr")]
        solver_kind: SolverChoice,
        /// Read the samples from this file instead of generating them.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Write the iteration trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Record wall-clock times in the trace instead of zeros.
        #[arg(long)]
        wall_time: bool,
    },
    /// Empirical order of the SD, Newton and Gauss–Newton models.
    ModelOrder {
        #[arg(long, value_delimiter = ',', default_value = "10,10,10")]
        dims: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "3,3,3")]
        rank: Vec<usize>,
        /// Sample counts |Ω|.
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        samples: Vec<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 10)]
        j_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ratio table as CSV (stdout if absent).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run several solvers on one synthetic instance.
    Convergence {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Comma-separated subset of rtr-exact, rtr-gn, rtr-fd, rcg, sd.
        #[arg(long, value_delimiter = ',', default_value = "rtr-exact,rtr-gn,rtr-fd,rcg,sd")]
        solvers: Vec<SolverKind>,
        /// Directory receiving one `<solver>.csv` trace per solver.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        wall_time: bool,
    },
    /// Singular spectra of a sampled tensor and a held-out completion test.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        /// Completion rank; no completion run if absent.
        #[arg(long, value_delimiter = ',')]
        rank: Option<Vec<usize>>,
        /// Fraction of the samples held out for scoring.
        #[arg(long, default_value_t = 0.5)]
        held_out: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long, value_delimiter = ',', default_value = "20,20,20")]
    dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,2,2")]
    rank: Vec<usize>,
    /// Fraction of entries sampled.
    #[arg(long, default_value_t = 0.5)]
    fraction: f64,
    /// Standard deviation of Gaussian noise added to a low-rank truth.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Dense uniform ground truth instead of a low-rank one.
    #[arg(long, conflicts_with = "noise")]
    full_rank: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ProblemArgs {
    fn spec(&self) -> ProblemSpec {
        let truth = if self.full_rank {
            TruthKind::FullRank
        } else if self.noise != 0.0 {
            TruthKind::LowRankPlusNoise(self.noise)
        } else {
            TruthKind::LowRank
        };
        ProblemSpec::new(&self.dims, &self.rank, self.fraction, truth, self.seed)
    }
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, value_enum, default_value = "exact")]
    hessian: HessianChoice,
    /// Stop once ‖grad‖/‖grad_0‖ reaches this.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 500)]
    max_iter: usize,
    /// Weight μ of the (μ/2)‖X‖² regularization.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
}

impl SolverArgs {
    fn config(&self, seed: u64) -> SolverConfig {
        let mut c = SolverConfig::default().with_hessian(self.hessian.into());
        c.stopping.grad_rel_tol = self.tol;
        c.stopping.max_outer_iters = self.max_iter;
        c.mu = self.mu;
        c.rng_seed = seed;
        c
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum HessianChoice {
    Exact,
    Gn,
    Fd,
}

impl From<HessianChoice> for HessianModel {
    fn from(h: HessianChoice) -> Self {
        match h {
            HessianChoice::Exact => Self::Exact,
            HessianChoice::Gn => Self::GaussNewton,
            HessianChoice::Fd => Self::FiniteDifference,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverChoice {
    Rtr,
    Rcg,
    Sd,
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn synth(problem: &ProblemArgs, out: Option<&Path>, truth_out: Option<&Path>) -> CliResult<()> {
    let p = generate_problem(&problem.spec())?;
    write_tensor_file(output(out)?, &p.data)?;
    if let Some(path) = truth_out {
        let all: Vec<Vec<usize>> = (0..p.truth.len())
            .map(|l| tucker_rtr_cli::problem::unravel(p.truth.dims(), l))
            .collect();
        write_tensor_file(create(path)?, &tucker_rtr::sample_project(&p.truth, &all)?)?;
    }
    Ok(())
}

fn complete(
    problem: &ProblemArgs,
    solver: &SolverArgs,
    kind: SolverChoice,
    input: Option<&Path>,
    trace: Option<&Path>,
    wall_time: bool,
) -> CliResult<()> {
    let (p, truth) = match input {
        Some(path) => {
            let data = read_tensor_path(path)?;
            let x0 = tucker_rtr::solver::random_initial_point(data.dims(), &problem.rank, problem.seed)?;
            (Problem { truth: data.to_dense(), data, x0 }, false)
        }
        None => (generate_problem(&problem.spec())?, true),
    };
    let kind = match kind {
        SolverChoice::Rtr => SolverKind::TrustRegion(solver.hessian.into()),
        SolverChoice::Rcg => SolverKind::NonlinearCg,
        SolverChoice::Sd => SolverKind::SteepestDescent,
    };
    let out = run_solver(kind, &p, &problem.rank, &solver.config(problem.seed))?;
    if let Some(path) = trace {
        write_trace(create(path)?, &TraceRow::from_trace(&out.trace, wall_time))?;
    }
    let last = out.trace.final_record();
    println!("solver      {kind}");
    println!("samples     {}", p.data.len());
    println!("iterations  {}", out.trace.iterations());
    println!("termination {}", out.trace.termination);
    println!("f           {:.6e}", last.f);
    println!("grad_rel    {:.6e}", last.grad_rel);
    if truth {
        let x = out.point.tucker().to_full();
        let err = x.sub(&p.truth)?.norm() / p.truth.norm();
        println!("truth_rel   {err:.6e}");
    }
    match out.trace.termination {
        Termination::Failed(e) => Err(CliError::Solver(e)),
        _ => Ok(()),
    }
}

fn model_order(cfg: ModelOrderConfig, out: Option<&Path>) -> CliResult<()> {
    let cases = run_model_order(&cfg)?;
    let mut w = csv::Writer::from_writer(output(out)?);
    w.write_record(["scenario", "samples", "model", "j", "ratio", "zero_flags"])?;
    for c in &cases {
        for r in &c.ratios {
            for s in &r.by_j {
                w.write_record([
                    c.scenario.name().to_string(),
                    c.samples.to_string(),
                    r.model.name().to_string(),
                    s.j.to_string(),
                    format!("{:?}", s.geo_mean),
                    s.zero_flags.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    for c in &cases {
        let summary: Vec<String> = ModelKind::ALL
            .iter()
            .map(|&k| {
                let (lo, hi) = c.model(k).range(3..=8);
                format!("{k} [{lo:.3}, {hi:.3}]")
            })
            .collect();
        eprintln!(
            "{:<20} |Ω|={:<5} f={:.3e} ‖grad‖={:.1e}  {}",
            c.scenario.name(),
            c.samples,
            c.cost,
            c.grad_norm,
            summary.join("  ")
        );
    }
    Ok(())
}

fn convergence(
    problem: &ProblemArgs,
    solver: &SolverArgs,
    solvers: &[SolverKind],
    trace_dir: Option<&Path>,
    wall_time: bool,
) -> CliResult<()> {
    let p = generate_problem(&problem.spec())?;
    let runs = run_convergence(&p, &problem.rank, solvers, &solver.config(problem.seed));
    if let Some(dir) = trace_dir {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
    }
    println!("solver     iterations  f              grad_rel       termination");
    let mut setup_error = None;
    for run in runs {
        match run.outcome {
            Ok(out) => {
                if let Some(dir) = trace_dir {
                    let path = dir.join(format!("{}.csv", run.kind));
                    write_trace(create(&path)?, &TraceRow::from_trace(&out.trace, wall_time))?;
                }
                let last = out.trace.final_record();
                print!(
                    "{:<10} {:<11} {:<14.6e} {:<14.6e} {}",
                    run.kind.label(),
                    out.trace.iterations(),
                    last.f,
                    last.grad_rel,
                    out.trace.termination
                );
                if wall_time {
                    print!("  ({:.1} ms)", run.elapsed.as_secs_f64() * 1e3);
                }
                println!();
            }
            Err(e) => {
                println!("{:<10} error: {e}", run.kind.label());
                setup_error.get_or_insert(e);
            }
        }
    }
    setup_error.map_or(Ok(()), |e| Err(e.into()))
}

fn spectrum(
    input: &Path,
    rank: Option<&[usize]>,
    held_out: f64,
    seed: u64,
    solver: &SolverArgs,
) -> CliResult<()> {
    let data = read_tensor_path(input)?;
    let report = ingest_and_report(&data, rank, held_out, &solver.config(seed), seed)?;
    println!("dims     {:?}", report.dims);
    println!("samples  {}", report.samples);
    match &report.spectra {
        Some(spectra) => {
            for (i, s) in spectra.iter().enumerate() {
                let vals: Vec<String> = s.iter().map(|v| format!("{v:.6e}")).collect();
                println!("mode {}   {}", i + 1, vals.join(" "));
            }
        }
        None => println!("spectra  skipped (not fully sampled)"),
    }
    if let Some(c) = &report.completion {
        println!("rank     {:?}", c.ranks);
        println!("train    {}", c.train);
        println!("held_out {}", c.held_out);
        println!("iters    {} ({})", c.trace.iterations(), c.trace.termination);
        println!("rel_err  {:.6e}", c.rel_error);
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Synth {
            problem,
            output,
            truth_output,
        } => synth(&problem, output.as_deref(), truth_output.as_deref()),
        Command::Complete {
            problem,
            solver,
            solver_kind,
            input,
            trace,
            wall_time,
        } => complete(&problem, &solver, solver_kind, input.as_deref(), trace.as_deref(), wall_time),
        Command::ModelOrder {
            dims,
            rank,
            samples,
            trials,
            j_max,
            seed,
            output,
        } => model_order(
            ModelOrderConfig {
                dims,
                ranks: rank,
                sample_sizes: samples,
                trials,
                j_max,
                seed,
                ..ModelOrderConfig::default()
            },
            output.as_deref(),
        ),
        Command::Convergence {
            problem,
            solver,
            solvers,
            trace,
            wall_time,
        } => convergence(&problem, &solver, &solvers, trace.as_deref(), wall_time),
        Command::Spectrum {
            input,
            rank,
            held_out,
            seed,
            solver,
        } => spectrum(&input, rank.as_deref(), held_out, seed, &solver),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
