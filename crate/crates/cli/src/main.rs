use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ntlim_cli::config::OUT_DIR_ENV;
use ntlim_cli::{emit_reports, run, CliError, Completion, Overrides, ReportBundle, Scenario};

/// Boundary limits of kernel convolutions of measures.
///
/// Exit codes: 0 when every verdict is definitive, 2 when some verdict is
/// inconclusive, 1 on errors.
#[derive(Parser)]
#[command(name = "ntlim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the task named in the scenario file.
    Run(Flags),
    /// Kernel oracles: L1 norm, layer cake, decay, comparison constant.
    KernelCheck(Flags),
    /// Evaluate the convolution; without a convolve task in the file,
    /// along the ladder heights above --point.
    Convolve(Flags),
    /// Run every point detector at --point.
    Classify(Flags),
    /// Nontangential limit along cone paths at --point.
    ConeProbe(Flags),
    /// Limits along a fan of rays at --point.
    RayFan(Flags),
    /// Heat extension along parabolic paths at --point.
    ParabolicProbe(Flags),
}

#[derive(Args)]
struct Flags {
    /// Scenario file (JSON).
    config: PathBuf,
    /// Comma-separated coordinates of the base point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<f64>>,
    #[arg(long)]
    aperture: Option<f64>,
    /// Ladder depth (number of scales minus one).
    #[arg(long)]
    depth: Option<usize>,
    /// Limit agreement for detectors and probes, quadrature tolerance for convolve.
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

fn execute(task: Option<&str>, flags: Flags) -> Result<(ReportBundle, Vec<PathBuf>), CliError> {
    let mut scenario = Scenario::load(&flags.config)?;
    scenario.apply(&Overrides {
        task: task.map(str::to_string),
        point: flags.point,
        aperture: flags.aperture,
        depth: flags.depth,
        tol: flags.tol,
        out_dir: flags.out.map(|p| p.display().to_string()),
    })?;
    let bundle = run(&scenario)?;
    let dir = scenario.output_dir();
    let written = emit_reports(&bundle, Path::new(&dir), &scenario.outputs.formats)?;
    Ok((bundle, written))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (task, flags) = match cli.command {
        Command::Run(f) => (None, f),
        Command::KernelCheck(f) => (Some("kernel-check"), f),
        Command::Convolve(f) => (Some("convolve"), f),
        Command::Classify(f) => (Some("classify"), f),
        Command::ConeProbe(f) => (Some("cone-probe"), f),
        Command::RayFan(f) => (Some("ray-fan"), f),
        Command::ParabolicProbe(f) => (Some("parabolic-probe"), f),
    };
    match execute(task, flags) {
        Ok((bundle, written)) => {
            let completion = bundle.completion();
            let status = match completion {
                Completion::Definitive => "definitive",
                Completion::Inconclusive => "inconclusive",
            };
            println!(
                "{}: {status} ({:.3}s)",
                bundle.scenario.task.name(),
                bundle.elapsed.as_secs_f64()
            );
            for path in written {
                println!("  wrote {}", path.display());
            }
            ExitCode::from(completion.exit_code())
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
