//! Command-line front end: run scenarios, compare logs, sweep directories,
//! check gap clearance.
//!
//! Exit codes: 0 success, 1 other failure, 2 configuration error, 3 divergence.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use morphquad::harness::{self, ScenarioConfig};
use morphquad::morphology::MorphGeometry;
use morphquad::parallel::Execution;
use morphquad::Error;

#[derive(Parser)]
#[command(name = "morphquad", version, about = "Folding-quadrotor simulation and control harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Toggle {
    On,
    Off,
}

#[derive(clap::Args, Clone)]
struct Overrides {
    /// Disturbance seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Observer feedforward (overrides the config).
    #[arg(long, value_enum)]
    observer: Option<Toggle>,
    /// Output directory for logs and metrics.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(o) = self.observer {
            cfg.observer = matches!(o, Toggle::On);
        }
    }

    fn out_dir(&self, cfg: Option<&ScenarioConfig>) -> PathBuf {
        self.out
            .clone()
            .or_else(|| cfg.and_then(|c| c.output.clone()))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario (a TOML file or a bundled scenario name).
    Run {
        config: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Compare two logs: per-axis RMS and max-error ratios (A / B) and settling times.
    Compare {
        log_a: PathBuf,
        log_b: PathBuf,
        /// Position-error band for settling times [m].
        #[arg(long, default_value_t = 0.02)]
        band: f64,
    },
    /// Run every *.toml scenario in a directory.
    Sweep {
        config_dir: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
        /// Run scenarios one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// Whether the vehicle at a fold angle fits through a gap.
    Clearance {
        /// Fold angle [deg].
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        /// Gap width [m].
        #[arg(long)]
        gap: f64,
        /// Safety margin [m].
        #[arg(long, default_value_t = 0.03)]
        margin: f64,
    },
    /// List the bundled scenarios.
    List,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ConfigParse(_) | Error::Config { .. } => 2,
        Error::Divergence { .. } => 3,
        _ => 1,
    }
}

fn resolve(config: &str) -> morphquad::Result<ScenarioConfig> {
    let path = Path::new(config);
    if !path.exists() && harness::config::bundled_source(config).is_some() {
        return harness::bundled(config);
    }
    harness::load_config(path)
}

fn run(config: &str, overrides: &Overrides) -> morphquad::Result<()> {
    let mut cfg = resolve(config)?;
    overrides.apply(&mut cfg);
    let out = overrides.out_dir(Some(&cfg));
    let (files, outcome) = harness::run_scenario(&cfg, &out)?;
    let m = &outcome.metrics;
    println!("scenario   {} (seed {}, observer {})", cfg.name, cfg.seed, if cfg.observer { "on" } else { "off" });
    println!("log        {}", files.log.display());
    println!("metrics    {}", files.metrics.display());
    println!("ticks      {}", m.ticks);
    println!("rms error  x {:.5}  y {:.5}  z {:.5} m", m.rms_error[0], m.rms_error[1], m.rms_error[2]);
    println!("max error  {:.5} m", m.max_error);
    println!("saturated  {} ticks", m.saturation_ticks);
    println!("Vdot       [{:.3e}, {:.3e}]", m.vdot_min, m.vdot_max);
    println!("mhat end   {:.5} kg", outcome.diagnostics.final_mass_estimate);
    if let Some(g) = &outcome.diagnostics.gap {
        println!("gap margin {:.4} m at fold {:.1} deg", g.min_margin, g.alpha_at_min.to_degrees());
    }
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("never".to_string(), |v| format!("{v:.3} s"))
}

fn compare(a: &Path, b: &Path, band: f64) -> morphquad::Result<()> {
    let c = harness::compare_runs(a, b, band)?;
    println!("rms ratio  x {:.4}  y {:.4}  z {:.4}", c.rms_ratio[0], c.rms_ratio[1], c.rms_ratio[2]);
    println!("max ratio  x {:.4}  y {:.4}  z {:.4}", c.max_axis_ratio[0], c.max_axis_ratio[1], c.max_axis_ratio[2]);
    println!("max error ratio {:.4}", c.max_error_ratio);
    if !c.settling.is_empty() {
        println!("{:>10}  {:>10}  {:>10}", "event", "A", "B");
        for s in &c.settling {
            println!("{:>8.3} s  {:>10}  {:>10}", s.event_time, fmt_opt(s.a), fmt_opt(s.b));
        }
    }
    Ok(())
}

fn sweep(dir: &Path, overrides: &Overrides, sequential: bool) -> morphquad::Result<u8> {
    let mode = if sequential { Execution::Sequential } else { Execution::default() };
    let out = overrides.out_dir(None);
    let entries = harness::sweep_dir(dir, &out, mode, |cfg| overrides.apply(cfg))?;
    if entries.is_empty() {
        return Err(Error::ConfigParse(format!("no *.toml scenarios in {}", dir.display())));
    }
    let mut code = 0;
    for e in &entries {
        match &e.result {
            Ok(m) => println!(
                "ok    {}  rms [{:.4}, {:.4}, {:.4}] m  max {:.4} m",
                e.source.display(),
                m.rms_error[0],
                m.rms_error[1],
                m.rms_error[2],
                m.max_error
            ),
            Err(err) => {
                println!("fail  {}  {err}", e.source.display());
                code = code.max(exit_code(err));
            }
        }
    }
    Ok(code)
}

fn clearance(alpha_deg: f64, gap: f64, margin: f64) -> morphquad::Result<()> {
    let c = harness::gap_clearance(alpha_deg.to_radians(), &MorphGeometry::default(), gap, margin).map_err(|e| match e {
        Error::Domain(message) => Error::Config { path: "clearance".into(), message },
        other => other,
    })?;
    println!("total width {:.4} m  clearance {:.4} m  margin {:.4} m  {}", c.total_width, c.clearance, margin, if c.pass { "PASS" } else { "FAIL" });
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, overrides } => run(config, overrides).map(|_| 0),
        Command::Compare { log_a, log_b, band } => compare(log_a, log_b, *band).map(|_| 0),
        Command::Sweep { config_dir, overrides, sequential } => sweep(config_dir, overrides, *sequential),
        Command::Clearance { alpha, gap, margin } => clearance(*alpha, *gap, *margin).map(|_| 0),
        Command::List => {
            for name in harness::bundled_names() {
                println!("{name}");
            }
            Ok(0)
        }
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
