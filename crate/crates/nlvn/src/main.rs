use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use nlvn::figure::parse_grid;
use nlvn::run::resolve_out_dir;
use nlvn::sweep::{parse_range, sweep};
use nlvn::{run_scenario, verify_suite, CliError, CliResult, FigureJob, Level, Scenario, VerifyOptions};

#[derive(Parser)]
#[command(name = "nlvn", version, about = "Exact solutions and checks for i dρ/dt = [H, f(ρ)]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file and write one CSV per output.
    Run {
        scenario: PathBuf,
        /// Output directory (overrides NLVN_OUT_DIR and the file's output_path).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the long-format grid behind one figure.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=6))]
        id: u8,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Samples per axis as NxM (default 201x201).
        #[arg(long)]
        grid: Option<String>,
    },
    /// Run the self-check suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// Re-run a scenario for each value of one parameter.
    Sweep {
        #[arg(long)]
        param: String,
        /// Values as A:B:STEP.
        #[arg(long, allow_hyphen_values = true)]
        range: String,
        scenario: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, conflicts_with = "full")]
    quick: bool,
    /// Denser sampling plus the integrator convergence checks.
    #[arg(long)]
    full: bool,
    /// Perturb the organism closed form to show that its checks catch it.
    #[arg(long)]
    inject_fault: bool,
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { scenario, out } => {
            let s = Scenario::load(&scenario)?;
            let dir = resolve_out_dir(out.as_deref(), s.output_path.as_deref());
            let summary = run_scenario(&s, &dir)?;
            for f in &summary.files {
                println!("wrote {}", f.display());
            }
            println!("samples {}  max relative drift {:.3e}", summary.samples, summary.drift.max());
            Ok(())
        }
        Command::Figure { id, out, grid } => {
            let grid = grid.as_deref().map(parse_grid).transpose()?;
            let job = FigureJob::new(id, grid)?;
            let dir = resolve_out_dir(out.as_deref(), None);
            let start = Instant::now();
            let path = job.write(&dir)?;
            println!("wrote {} ({:.2} s)", path.display(), start.elapsed().as_secs_f64());
            Ok(())
        }
        Command::Verify(args) => {
            let level = if args.full { Level::Full } else { Level::Quick };
            let start = Instant::now();
            let report = verify_suite(VerifyOptions { level, inject_fault: args.inject_fault });
            print!("{}", report.render());
            println!("elapsed {:.2} s", start.elapsed().as_secs_f64());
            report.status()
        }
        Command::Sweep { param, range, scenario, out } => {
            let s = Scenario::load(&scenario)?;
            let values = parse_range(&range)?;
            let dir = resolve_out_dir(out.as_deref(), s.output_path.as_deref());
            let summary = sweep(&s, &param, &values, &dir)?;
            for (v, r) in &summary.runs {
                println!("{param} = {v:?}: {} files, max relative drift {:.3e}", r.files.len(), r.drift.max());
            }
            println!("wrote {}", summary.summary_file.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { CliError::EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlvn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
