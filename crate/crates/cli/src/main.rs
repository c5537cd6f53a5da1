use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cloudcover_cli::plot::{emit_plot_data, PlotSpec};
use cloudcover_cli::report::Report;
use cloudcover_cli::scene::{parse_resolved, TaskKind};
use cloudcover_cli::tasks::Overrides;
use cloudcover_cli::run_scene;

/// Exact cloud constructions and checks driven by scene files.
#[derive(Parser)]
#[command(name = "cloudcover", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scene's extend tasks.
    Extend(Common),
    /// Run the scene's collineate tasks.
    Collineate(Common),
    /// Run the scene's projective tasks.
    Projective(Common),
    /// Run the scene's schmerl tasks.
    Schmerl(Common),
    /// Run the scene's decompose tasks.
    Decompose(Common),
    /// Run every task in the scene.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// Scene file.
    #[arg(long)]
    scene: PathBuf,
    /// Seed for every sampled check; overrides the scene.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample count for every sampled check; overrides the scene.
    #[arg(long)]
    samples: Option<usize>,
    /// Directory for report.json, report.csv and plot files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Also write plot_<cloud>.csv for every planar or spatial cloud.
    #[arg(long)]
    plot: bool,
}

const INPUT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, only, args) = match cli.command {
        Command::Extend(a) => ("extend", Some(TaskKind::Extend), a),
        Command::Collineate(a) => ("collineate", Some(TaskKind::Collineate), a),
        Command::Projective(a) => ("projective", Some(TaskKind::Projective), a),
        Command::Schmerl(a) => ("schmerl", Some(TaskKind::Schmerl), a),
        Command::Decompose(a) => ("decompose", Some(TaskKind::Decompose), a),
        Command::Verify(a) => ("verify", None, a),
    };
    match run(name, only, &args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn run(name: &str, only: Option<TaskKind>, args: &Common) -> anyhow::Result<ExitCode> {
    let text = std::fs::read_to_string(&args.scene)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", args.scene.display()))?;
    let (scene, resolved) = match parse_resolved(&text) {
        Ok(r) => r,
        Err(errors) => {
            for e in &errors {
                eprintln!("{}:{e}", args.scene.display());
            }
            return Ok(ExitCode::from(INPUT_ERROR));
        }
    };
    let overrides = Overrides { seed: args.seed, samples: args.samples };
    let results = run_scene(&scene, &resolved, only, overrides);
    if results.is_empty() {
        eprintln!("{}: no {name} tasks", args.scene.display());
        return Ok(ExitCode::from(INPUT_ERROR));
    }
    for (record, elapsed) in &results {
        let ok = record.checks.iter().filter(|c| c.passed).count();
        let status = if record.passed { "PASS" } else { "FAIL" };
        println!("task {} {}: {status} ({ok}/{} checks)", record.index, record.kind, record.checks.len());
        for c in record.checks.iter().filter(|c| !c.passed) {
            println!("  {}: {} [{}]", c.name, c.detail, c.witness.as_deref().unwrap_or(""));
        }
        eprintln!("task {} {}: {:.3} s", record.index, record.kind, elapsed.as_secs_f64());
    }
    let records = results.into_iter().map(|(r, _)| r).collect();
    let report = Report::new(name, args.scene.display().to_string(), args.seed, args.samples, records);
    let (json, csv) = report.write(&args.out)?;
    println!("wrote {} and {}", json.display(), csv.display());
    if args.plot {
        write_plots(&resolved.env.clouds, &args.out);
    }
    Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn write_plots(clouds: &std::collections::BTreeMap<String, cloudcover::Cloud>, out: &Path) {
    for (name, cloud) in clouds {
        match emit_plot_data(out, name, cloud, PlotSpec::default()) {
            Ok(path) => println!("wrote {}", path.display()),
            Err(e) => eprintln!("no plot for {name}: {e:#}"),
        }
    }
}
