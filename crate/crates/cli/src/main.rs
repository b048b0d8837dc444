use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use kernel_dynamics::criteria::CriteriaConfig;
use kernel_dynamics::seq::SequenceSpec;
use kernel_dynamics_cli::analyze::analyze;
use kernel_dynamics_cli::demo::{counterexample, DEFAULT_DEMO_ORDER};
use kernel_dynamics_cli::output::{sibling, write_atomic};
use kernel_dynamics_cli::simulate::{orbit_csv, periodic_csv, simulate, SimConfig, VectorArg};
use kernel_dynamics_cli::spec::load_spec;
use kernel_dynamics_cli::verify::{self, Suite};

/// Dynamics of the adjoint of multiplication by z on analytic reproducing
/// kernel spaces of the unit disc.
#[derive(Parser)]
#[command(name = "kdyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every applicable criterion and structural check on a kernel spec.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
        /// Truncation order; defaults to the spec's `order`, then 256.
        #[arg(long)]
        order: Option<usize>,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace an orbit of M_z^* and optionally build periodic points.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Basis index `n` (the vector K_n), or coordinates `1,0.5` / `1:0.5,0:-1`.
        #[arg(long)]
        vector: VectorArg,
        #[arg(long, default_value_t = 16)]
        steps: usize,
        /// Periods for the periodic-point table, e.g. `1,2,4,8`.
        #[arg(long, value_delimiter = ',')]
        periods: Vec<usize>,
        /// Truncation order; defaults to the spec's `order`, then 64.
        #[arg(long)]
        order: Option<usize>,
        /// Orbit CSV path; the periodic table goes to `<stem>_periodic.csv`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Worked examples.
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
    /// Run a built-in verification suite; exits nonzero on any failure.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// A hypercyclic shift whose conjugated kernel fails the diagonal condition.
    Counterexample {
        /// Family name (`dirichlet`, `power(-1)`, ..) or expression in `n`.
        #[arg(long)]
        beta: String,
        #[arg(long, default_value_t = DEFAULT_DEMO_ORDER)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Analyze { spec, order, out } => {
            let s = load_spec(&spec)?;
            let report = analyze(&s, order).with_context(|| format!("analyzing {}", spec.display()))?;
            emit(out.as_ref(), &report.to_json())?;
        }
        Command::Simulate {
            spec,
            vector,
            steps,
            periods,
            order,
            out,
        } => {
            let s = load_spec(&spec)?;
            if periods.contains(&0) {
                bail!("periods must be positive");
            }
            let sim = simulate(
                &s,
                &SimConfig {
                    vector,
                    steps,
                    periods,
                    order,
                },
            )
            .with_context(|| format!("simulating {}", spec.display()))?;
            write_atomic(&out, &orbit_csv(&sim.orbit)?).with_context(|| format!("writing {}", out.display()))?;
            if !sim.periodic.is_empty() {
                let p = sibling(&out, "periodic");
                write_atomic(&p, &periodic_csv(&sim.periodic)?).with_context(|| format!("writing {}", p.display()))?;
            }
        }
        Command::Demo {
            which: Demo::Counterexample { beta, order, out },
        } => {
            let b: SequenceSpec = beta.parse().with_context(|| format!("parsing --beta `{beta}`"))?;
            let report = counterexample(&b, order, &CriteriaConfig::default())?;
            let mut text = serde_json::to_string_pretty(&report)?;
            text.push('\n');
            emit(out.as_ref(), &text)?;
        }
        Command::Verify { suite } => {
            let results = verify::run(suite);
            let failed = results.iter().filter(|r| !r.passed).count();
            for r in &results {
                println!("{r}");
            }
            println!("{} checks, {} failed", results.len(), failed);
            if failed > 0 {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
