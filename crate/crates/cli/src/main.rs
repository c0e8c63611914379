use std::io::{self, BufWriter, Write};
use std::net::{Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use hpa_sim_core::analysis::{match_mismatch_report, LabeledTrace};
use hpa_sim_core::model::{default_params, HumanProfile, ParadigmKind, RobotProfileKind, StimulusSource};
use hpa_sim_core::paradigm::{generate_stimuli, run_session, simulate};
use hpa_sim_core::trace_io::{
    load_stimuli, load_trace, save_stimuli, save_trace, write_match_report, write_metrics, write_trace, MetricsReport,
    StimulusSet,
};
use hpa_sim_core::{Config, Trace};
use hpa_sim_service::{ServeOptions, SessionService};

/// Cortisol-inspired robot motivation simulator.
#[derive(Debug, Parser)]
#[command(name = "hpa-sim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic caretaker stimulus stream.
    GenStimuli {
        #[arg(long)]
        human: HumanProfile,
        #[arg(long)]
        paradigm: ParadigmKind,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a robot profile over a stimulus stream and write the trace.
    Simulate {
        #[arg(long)]
        profile: RobotProfileKind,
        /// Stimulus file written by gen-stimuli.
        #[arg(long, conflicts_with_all = ["human", "paradigm"])]
        stimuli: Option<PathBuf>,
        #[arg(long, requires = "paradigm", required_unless_present = "stimuli")]
        human: Option<HumanProfile>,
        #[arg(long, requires = "human")]
        paradigm: Option<ParadigmKind>,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Re-run the dynamics on the stimuli recorded in a trace.
    Replay {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        profile: RobotProfileKind,
        /// Output trace; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print interaction metrics for each trace, one JSON line per trace.
    Analyze {
        #[arg(long, num_args = 1.., required = true)]
        trace: Vec<PathBuf>,
    },
    /// Run both profiles over every stimulus file in a directory and report
    /// over-threshold time for matched and mismatched couplings.
    Compare {
        #[arg(long)]
        stimuli_set: PathBuf,
        /// Report file; defaults to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Host a live caretaker session over WebSocket.
    Serve {
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "anxious")]
        profile: RobotProfileKind,
        #[arg(long, default_value = "sf")]
        paradigm: ParadigmKind,
        /// Where to write the session trace.
        #[arg(long, default_value = "session.jsonl")]
        out: PathBuf,
        #[arg(long, default_value_t = hpa_sim_core::model::DEFAULT_TICK_HZ)]
        tick_hz: u32,
        /// Clock speed-up factor.
        #[arg(long, default_value_t = 1.0)]
        speed: f64,
    },
}

#[derive(Debug, Args)]
struct SeedArg {
    #[arg(long = "seed", env = "HPA_SIM_SEED")]
    value: Option<u64>,
}

impl SeedArg {
    fn require(&self) -> u64 {
        self.value.unwrap_or_else(|| {
            Cli::command()
                .error(
                    ErrorKind::MissingRequiredArgument,
                    "a seed is required (--seed or HPA_SIM_SEED)",
                )
                .exit()
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::GenStimuli {
            human,
            paradigm,
            seed,
            out,
        } => {
            let seed = seed.require();
            let config = Config::new(
                paradigm,
                default_params(RobotProfileKind::Anxious),
                StimulusSource::Synthetic { human, seed },
            );
            let frames = generate_stimuli(human, paradigm, &config, seed)?;
            let set = StimulusSet::synthetic(human, paradigm, seed, config.tick_hz, config.durations, frames);
            save_stimuli(&set, &out).with_context(|| format!("writing {}", out.display()))
        }
        Command::Simulate {
            profile,
            stimuli,
            human,
            paradigm,
            seed,
            out,
        } => {
            let trace = match (stimuli, human, paradigm) {
                (Some(path), _, _) => simulate_file(&path, profile)?,
                (None, Some(human), Some(paradigm)) => {
                    let seed = seed.require();
                    run_session(&Config::new(
                        paradigm,
                        default_params(profile),
                        StimulusSource::Synthetic { human, seed },
                    ))?
                }
                _ => unreachable!("clap enforces --stimuli or --human with --paradigm"),
            };
            save_trace(&trace, &out).with_context(|| format!("writing {}", out.display()))
        }
        Command::Replay { trace, profile, out } => {
            let recorded = load_trace::<f64>(&trace).with_context(|| format!("reading {}", trace.display()))?;
            let mut config = recorded.config.clone();
            config.robot_profile = default_params(profile);
            config.stimulus_source = StimulusSource::Replay { path: trace.clone() };
            let replayed = simulate(&config, &recorded.frames())?;
            if profile == recorded.config.robot_profile.kind && recorded.config.robot_profile == config.robot_profile {
                let identical = replayed.records == recorded.records;
                log::info!(
                    "cortisol series {} the recording",
                    if identical { "reproduces" } else { "differs from" }
                );
            }
            emit_trace(&replayed, out.as_deref())
        }
        Command::Analyze { trace } => {
            let mut stdout = BufWriter::new(io::stdout().lock());
            for path in &trace {
                let t = load_trace::<f64>(path).with_context(|| format!("reading {}", path.display()))?;
                let report = MetricsReport::from_trace(path.display().to_string(), &t)
                    .with_context(|| format!("analysing {}", path.display()))?;
                write_metrics(&report, &mut stdout)?;
            }
            stdout.flush()?;
            Ok(())
        }
        Command::Compare { stimuli_set, out } => compare(&stimuli_set, out.as_deref()),
        Command::Serve {
            port,
            profile,
            paradigm,
            out,
            tick_hz,
            speed,
        } => {
            let mut config = Config::new(paradigm, default_params(profile), StimulusSource::Live);
            config.tick_hz = tick_hz;
            let opts = ServeOptions {
                config,
                out: Some(out),
                speed,
            };
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let service = SessionService::bind(SocketAddr::from((Ipv4Addr::UNSPECIFIED, port)), opts).await?;
                log::info!("waiting for a caretaker on ws://{}", service.local_addr()?);
                let summary = service
                    .run_until(async {
                        let _ = tokio::signal::ctrl_c().await;
                    })
                    .await?;
                match &summary.saved_to {
                    Some(path) => log::info!(
                        "session {:?}: {} records written to {}",
                        summary.reason,
                        summary.trace.records.len(),
                        path.display()
                    ),
                    None => log::info!("session {:?} with no records", summary.reason),
                }
                Ok(())
            })
        }
    }
}

fn simulate_file(path: &Path, profile: RobotProfileKind) -> Result<Trace> {
    let set = load_stimuli::<f64>(path).with_context(|| format!("reading {}", path.display()))?;
    let config = set.session_config(
        default_params(profile),
        StimulusSource::Replay {
            path: path.to_path_buf(),
        },
    );
    Ok(simulate(&config, &set.frames)?)
}

fn emit_trace(trace: &Trace, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => save_trace(trace, path).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = BufWriter::new(io::stdout().lock());
            write_trace(trace, &mut stdout)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn compare(dir: &Path, out: Option<&Path>) -> Result<()> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    files.retain(|p| p.extension().is_some_and(|x| x == "jsonl"));
    files.sort();
    if files.is_empty() {
        bail!("no .jsonl stimulus files in {}", dir.display());
    }

    let mut runs: Vec<(String, Trace)> = Vec::new();
    for path in &files {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        for profile in RobotProfileKind::ALL {
            runs.push((id.clone(), simulate_file(path, profile)?));
        }
    }
    let labeled: Vec<LabeledTrace<'_, f64>> = runs
        .iter()
        .map(|(id, trace)| LabeledTrace { set_id: id, trace })
        .collect();
    let report = match_mismatch_report(&labeled)?;

    for pair in &report.pairs {
        eprintln!(
            "{:<20} {:<4} interactive={:<5} match({})={:6.2}%  mismatch={:6.2}%",
            pair.set_id, pair.paradigm, pair.interactive, pair.match_profile, pair.match_pct, pair.mismatch_pct
        );
    }
    let w = &report.wilcoxon;
    eprintln!("signed-rank: n={} z={:.4} p={:.4}", w.n_effective, w.z, w.p_normal);

    match out {
        Some(path) => {
            let file = std::fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
            let mut file = BufWriter::new(file);
            write_match_report(&report, &mut file)?;
            file.flush()?;
        }
        None => {
            let mut stdout = BufWriter::new(io::stdout().lock());
            write_match_report(&report, &mut stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
