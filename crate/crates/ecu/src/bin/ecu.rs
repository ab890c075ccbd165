//! `ecu`: expected contextual utility toolkit.

use std::fs;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ecu::content::Content;
use ecu::model_file::{self, ModelFile};
use ecu::service::Engine;
use ecu::simulate::{self, Population};
use ecu::store::Store;
use ecu::{dataset, plot, render, transcript};
use ecu_core::audit::{audit, sample_lotteries, AuditGrids};
use ecu_core::geometry::{gul_curve, triangle_map, TriangleSpec, DEFAULT_STEP};
use ecu_core::reference::verify_all;
use ecu_core::stats::pilot::embedded_sessions;
use ecu_core::stats::report::{main_report, pilot_report};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "ecu", version, about = "Expected contextual utility: models, audits, experiments and analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Main,
    Pilot,
}

#[derive(Subcommand)]
enum Command {
    /// Run the participant session service.
    Serve {
        /// Experiment content file; the built-in content when omitted.
        #[arg(long)]
        content: Option<PathBuf>,
        /// Store directory for the event log and snapshots.
        #[arg(long, env = "ECU_STORE")]
        store: PathBuf,
        #[arg(long, env = "ECU_BIND", default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Bearer token required by /export.csv; export is disabled without it.
        #[arg(long, env = "ECU_OPERATOR_TOKEN", hide_env_values = true)]
        operator_token: Option<String>,
        #[arg(long, default_value_t = ecu::store::DEFAULT_SNAPSHOT_EVERY)]
        snapshot_every: u64,
    },
    /// Simulate participants and write their transcript CSV.
    Simulate {
        #[arg(long)]
        agents: usize,
        /// Give every agent this model; otherwise draw a population.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "mixed")]
        population: Population,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        content: Option<PathBuf>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute every published claim about the reference models.
    VerifyExamples {
        #[arg(long)]
        json: bool,
    },
    /// Summarize a transcript CSV (main) or raw choice matrices (pilot).
    Analyze {
        /// Input CSV; the pilot suite falls back to the embedded data.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        json: bool,
    },
    /// Trace indifference curves in a probability triangle.
    Triangle {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "H")]
        high: f64,
        #[arg(long = "M")]
        mid: f64,
        #[arg(long = "L")]
        low: f64,
        /// Comma-separated utility levels.
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        /// Also trace the two-prize curve with this probability on `x`.
        #[arg(long)]
        gul_p: Option<f64>,
        #[arg(long)]
        gul_level: Option<f64>,
        /// Output prefix; writes PREFIX.csv, PREFIX.svg and PREFIX.json.
        #[arg(long)]
        out: PathBuf,
    },
    /// Audit a model's preferences against the representation axioms.
    Audit {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        grid_step: f64,
        #[arg(long, default_value_t = 20)]
        alpha_steps: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Write the built-in experiment content file.
    InitContent {
        #[arg(long)]
        out: PathBuf,
    },
    /// Write an embedded reference model file.
    ExampleModel {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(model_file::EXAMPLE_NAMES))]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_content(path: Option<&Path>) -> Result<Content> {
    match path {
        Some(p) => Content::load(p).with_context(|| format!("loading content {}", p.display())),
        None => Ok(Content::default()),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Serve { content, store, bind, operator_token, snapshot_every } => {
            let content = load_content(content.as_deref())?;
            let (store, recovery) = Store::open(&store, &content).with_context(|| format!("opening store {}", store.display()))?;
            if recovery.truncated_bytes > 0 {
                eprintln!("cut {} bytes of a partial final log line", recovery.truncated_bytes);
            }
            eprintln!("resumed {} session(s); listening on {bind}", recovery.sessions.len());
            let engine = Engine::with_store(content, store.with_snapshot_every(snapshot_every), recovery.sessions).operator_token(operator_token);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(ecu::service::serve(Arc::new(engine), bind))?;
        }
        Command::Simulate { agents, model, population, seed, content, out } => {
            let content = load_content(content.as_deref())?;
            let agents = match model {
                Some(p) => simulate::clones(&ModelFile::load(&p)?.model, agents, seed),
                None => simulate::population(population, agents, seed, &content.config),
            };
            let runs = agents.iter().map(|a| simulate::run_offline(a, &content.config)).collect::<Result<Vec<_>, _>>()?;
            emit(out.as_deref(), &simulate::offline_transcript(&agents, &runs))?;
        }
        Command::VerifyExamples { json } => {
            let reports = verify_all();
            if json {
                println!("{}", render::json(&reports));
            } else {
                print!("{}", render::examples_text(&reports));
            }
        }
        Command::Analyze { input, suite, json } => match suite {
            Suite::Main => {
                let Some(path) = input else { bail!("--input is required for the main suite") };
                let file = fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                let records = transcript::records(file)?;
                let report = main_report(&records);
                if json {
                    println!("{}", render::json(&report));
                } else {
                    print!("{}", render::main_text(&report));
                }
            }
            Suite::Pilot => {
                let sessions = match input {
                    Some(path) => dataset::read_pilot(fs::File::open(&path).with_context(|| format!("opening {}", path.display()))?)?,
                    None => embedded_sessions(),
                };
                let report = pilot_report(&sessions);
                if json {
                    println!("{}", render::json(&report));
                } else {
                    print!("{}", render::pilot_text(&report));
                }
            }
        },
        Command::Triangle { model, high, mid, low, levels, step, gul_p, gul_level, out } => {
            let m = ModelFile::load(&model)?.model;
            let spec = TriangleSpec::new(high, mid, low, m.space)?;
            let map = triangle_map(&m, &spec, &levels, step)?;
            let with_ext = |ext: &str| {
                let mut p = out.clone().into_os_string();
                p.push(ext);
                PathBuf::from(p)
            };
            let mut csv = plot::triangle_csv(&map);
            let mut doc = serde_json::json!({ "triangle": map, "note": plot::CONTEXT_NOTE });
            if let (Some(p), Some(level)) = (gul_p, gul_level) {
                let (w, b) = (m.space.worst(), m.space.best());
                let grid: Vec<f64> = (0..=400).map(|i| w + (b - w) * i as f64 / 400.0).collect();
                let g = gul_curve(&m, p, level, &grid)?;
                csv += plot::curves_csv(&[("two_prize".into(), &g.curve)]).split_once('\n').map_or("", |(_, rest)| rest);
                fs::write(with_ext("-two-prize.svg"), plot::curve_svg("two-prize indifference curve", &g.curve))?;
                doc["two_prize"] = serde_json::to_value(&g)?;
            }
            fs::write(with_ext(".csv"), csv)?;
            fs::write(with_ext(".svg"), plot::triangle_svg(&map))?;
            fs::write(with_ext(".json"), serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Audit { model, grid_step, alpha_steps, samples, tol, seed, json } => {
            let m = ModelFile::load(&model)?.model;
            let grids = AuditGrids::uniform(m.space, grid_step, alpha_steps, tol);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (w, b) = (m.space.worst(), m.space.best());
            let prizes: Vec<f64> = (0..=20).map(|i| w + (b - w) * i as f64 / 20.0).collect();
            let sample = sample_lotteries(&mut rng, m.space, &prizes, 4, 100, samples);
            let report = audit(&m, &grids, &sample)?;
            if json {
                println!("{}", serde_json::to_string_pretty(&render::audit_json(&report))?);
            } else {
                print!("{}", render::audit_text(&report));
            }
            if !report.passed() {
                std::process::exit(1);
            }
        }
        Command::InitContent { out } => emit(Some(&out), &Content::default().to_json())?,
        Command::ExampleModel { name, out } => emit(out.as_deref(), &(model_file::example(&name)?.to_json() + "\n"))?,
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(2);
    }
}
