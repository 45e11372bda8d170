use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use hdg_core::analysis::error_report;
use hdg_core::hdg::{flux_residual, solve};
use hdg_core::study::{
    compare_methods, emit_study, format_sci, run_study, OutputFormat, StudyConfig,
};
use hdg_core::{DiscretizationConfig, Mesh, MethodVariant, Problem};

#[derive(Parser)]
#[command(
    name = "hdg",
    version,
    about = "HDG solvers and convergence studies for the 2D Poisson problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Std,
    Ls,
    Proj,
}

impl From<Method> for MethodVariant {
    fn from(m: Method) -> Self {
        match m {
            Method::Std => MethodVariant::Std,
            Method::Ls => MethodVariant::Ls,
            Method::Proj => MethodVariant::Proj,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Md,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Md => OutputFormat::Md,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve once and print the error norms.
    Solve {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
        /// Structured mesh with n x n squares.
        #[arg(long, required_unless_present = "mesh")]
        n: Option<usize>,
        /// Import a mesh (`V C` header, vertex lines, cell lines) instead.
        #[arg(long, conflicts_with = "n")]
        mesh: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        tau_coeff: f64,
        #[arg(long, default_value = "paper-sin")]
        problem: String,
    },
    /// Run a convergence study from a JSON config.
    Study {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare finest-pair orders across variants; exits 2 if any is flagged.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HDG_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("HDG_THREADS must be a positive integer, got `{v}`"))?;
        if n == 0 {
            bail!("HDG_THREADS must be a positive integer, got `0`");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve {
            method,
            k,
            l,
            n,
            mesh,
            tau_coeff,
            problem,
        } => {
            let problem: Problem = problem.parse()?;
            let variant = MethodVariant::from(method);
            let config = DiscretizationConfig::new(k, l).with_tau_coeff(tau_coeff);
            let (mesh, level) = match (mesh, n) {
                (Some(path), _) => (Mesh::read(&path)?, 0),
                (None, Some(n)) => (Mesh::generate_structured(n)?, n),
                (None, None) => unreachable!("clap requires --n or --mesh"),
            };
            let solution = solve(&mesh, &config, variant, |x| problem.f(x), |x| problem.g(x))?;
            let report = error_report(level, &mesh, &config, &solution, &problem);
            let residual = flux_residual(&solution, &mesh, &config, variant);
            println!("problem    {problem}");
            println!("method     {variant} k={k} l={l} tau={tau_coeff}/h");
            println!(
                "mesh       {} cells, {} faces, h = {}",
                mesh.num_cells(),
                mesh.num_faces(),
                format_sci(mesh.h_global)
            );
            println!("err_q      {}", format_sci(report.err_q));
            println!("err_u      {}", format_sci(report.err_u));
            println!("err_jump   {}", format_sci(report.err_jump));
            println!("flux_res   {residual:.3e}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Study {
            config,
            format,
            out,
        } => {
            let mut cfg = StudyConfig::read(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            if let Some(f) = format {
                cfg.format = f.into();
            }
            if out.is_some() {
                cfg.output = out;
            }
            let records = run_study(&cfg)?;
            let text = emit_study(&records, cfg.format)?;
            match &cfg.output {
                Some(path) => std::fs::write(path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { config } => {
            let cfg = StudyConfig::read(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let cmp = compare_methods(&cfg)?;
            print!("{}", cmp.text);
            Ok(if cmp.flagged() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| run(cli));
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
