use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use nsac_core::output::{self, write_profile};
use nsac_core::profiles::{PostComposite, PreComposite};
use nsac_core::report::{report, ReportKind};
use nsac_core::scenario::ScenarioConfig;
use nsac_core::{Error, Result};

#[derive(Parser)]
#[command(name = "nsac", version, about = "Shock interaction experiments for the Navier-Stokes/Allen-Cahn system")]
struct Cli {
    /// Only print errors.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the wave fan of the scenario and print it as JSON.
    Riemann {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write `riemann.json` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the viscous shock profiles and write them as CSV.
    Profile {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "profiles")]
        out: PathBuf,
    },
    /// Run one scenario and write its run directory.
    Simulate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "runs")]
        out: PathBuf,
    },
    /// Run the scenario for every epsilon in the ladder.
    SweepEps {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma separated, e.g. `0.1,0.05,0.025`.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
    },
    /// Summarize a run (`run`) or sweep (`sweep`) directory.
    Report {
        kind: String,
        dir: PathBuf,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(config: Option<&Path>) -> Result<ScenarioConfig> {
    match config {
        Some(p) => ScenarioConfig::from_path(p),
        None => Ok(ScenarioConfig::default()),
    }
}

fn threads() -> Result<Option<usize>> {
    match std::env::var("NSAC_THREADS") {
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("NSAC_THREADS must be a positive integer, got `{s}`"))),
        },
        Err(_) => Ok(None),
    }
}

fn cmd_riemann(config: Option<&Path>, out: Option<&Path>) -> Result<()> {
    let cfg = load(config)?;
    let fan = cfg.fan()?;
    let law = fan.law;
    let incoming: Vec<_> = fan
        .incoming
        .iter()
        .map(|s| {
            let (mass, momentum) = s.rh_residuals(&law);
            json!({ "shock": s, "rh_residuals": [mass, momentum], "lax": s.satisfies_lax(&law) })
        })
        .collect();
    let report = json!({
        "trivial": fan.is_trivial(),
        "end_states": fan.end_states,
        "incoming": incoming,
        "interaction": fan.interaction,
        "v_m": fan.v_m,
        "u_m": fan.u_m,
        "outgoing_rarefaction": fan.outgoing_rarefaction,
        "outgoing_shock": fan.outgoing_shock,
        "strengths": fan.strengths,
    });
    let text = serde_json::to_string_pretty(&report)?;
    println!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("riemann.json"), &text)?;
    }
    Ok(())
}

fn cmd_profile(config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg = load(config)?;
    let fan = cfg.fan()?;
    let tol = cfg.profiles.tail_tol;
    fs::create_dir_all(out)?;
    let pre = PreComposite::from_fan(&fan, tol)?;
    let post = PostComposite::from_fan(&fan, cfg.profiles.ell, tol)?;
    let mut summary = Vec::new();
    for (name, p) in [("incoming_rear", &pre.rear), ("incoming_front", &pre.front), ("outgoing_shock", &post.shock)] {
        let file = format!("{name}.csv");
        write_profile(&out.join(&file), p)?;
        summary.push(json!({
            "name": name,
            "file": file,
            "left": p.left,
            "right": p.right,
            "speed": p.speed,
            "strength": p.strength(),
            "support": p.support(),
            "nodes": p.tabulation().0.len(),
            "max_residual": p.max_residual(),
        }));
        log::info!("{name}: {} nodes, max residual {:.2e}", p.tabulation().0.len(), p.max_residual());
    }
    fs::write(out.join("profiles.json"), serde_json::to_string_pretty(&summary)?)?;
    println!("{}", out.display());
    Ok(())
}

fn cmd_simulate(config: Option<&Path>, out: &Path) -> Result<()> {
    let cfg = load(config)?;
    let (dir, m) = output::simulate(cfg, out, &mut |r| {
        log::debug!("tau {:.3}: perturbation sup {:.3e}, X {:.3e}", r.tau, r.perturbation_sup, r.x);
    })?;
    log::info!("{} steps in {:.1} s", m.steps, m.wall_clock_seconds);
    println!("{}", dir.display());
    Ok(())
}

fn cmd_sweep(config: Option<&Path>, eps: &[f64], out: &Path) -> Result<()> {
    let cfg = load(config)?;
    let summary = output::sweep_eps(&cfg, eps, out, threads()?)?;
    for r in &summary.rows {
        match &r.error {
            None => log::info!("epsilon {}: sup error {:?}", r.epsilon, r.sup_error),
            Some(e) => log::warn!("epsilon {} failed: {e}", r.epsilon),
        }
    }
    println!("{}", out.join(output::SUMMARY_FILE).display());
    Ok(())
}

fn cmd_report(kind: &str, dir: &Path, out: Option<&Path>) -> Result<()> {
    let text = report(kind.parse::<ReportKind>()?, dir)?;
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.quiet { log::LevelFilter::Error } else { log::LevelFilter::Info };
    env_logger::Builder::new().filter_level(level).parse_env("NSAC_LOG").init();
    let result = match &cli.command {
        Command::Riemann { config, out } => cmd_riemann(config.as_deref(), out.as_deref()),
        Command::Profile { config, out } => cmd_profile(config.as_deref(), out),
        Command::Simulate { config, out } => cmd_simulate(config.as_deref(), out),
        Command::SweepEps { config, eps, out } => cmd_sweep(config.as_deref(), eps, out),
        Command::Report { kind, dir, out } => cmd_report(kind, dir, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Integration { snapshot: Some(p), .. } = &e {
                eprintln!("state snapshot: {}", p.display());
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
