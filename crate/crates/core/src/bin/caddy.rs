use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use caddy::ncmf::{self, Dataset, Forest, ForestParams};
use caddy::segmenter::segment;
use caddy::wire::encode_message;
use caddy::{check, parse_scenario, parse_token_file, run_scenario, Config, ParserEvent};

#[derive(Parser)]
#[command(name = "caddy", version, about = "Diver gesture command pipeline for AUV missions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve a live session to tablets over WebSocket.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Directory served at `/`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
    /// Check every phrase in a token file; one JSON verdict per line.
    Parse { tokens: PathBuf },
    /// Run a scripted scenario offline.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        config: PathBuf,
        /// Override `noise.error_rate`.
        #[arg(long)]
        noise: Option<f64>,
        #[arg(long, value_enum)]
        report: Option<ReportFormat>,
        /// Write the feedback message log here, one JSON object per line.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Nearest class mean forest.
    Ncmf {
        #[command(subcommand)]
        op: NcmfOp,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
}

#[derive(Subcommand)]
enum NcmfOp {
    /// Train on the whole file; report training accuracy.
    Train {
        #[command(flatten)]
        args: NcmfArgs,
        /// Save the trained forest as JSON.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Evaluate a saved forest, or train and test on a seeded half split.
    Eval {
        #[command(flatten)]
        args: NcmfArgs,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

#[derive(Args)]
struct NcmfArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 8)]
    trees: usize,
    #[arg(long, default_value_t = 6)]
    depth: usize,
    /// Classes sampled per node.
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    min_leaf: usize,
}

impl NcmfArgs {
    fn params(&self) -> ForestParams {
        ForestParams {
            n_trees: self.trees,
            max_depth: self.depth,
            min_leaf: self.min_leaf,
            classes_per_node: self.k,
            seed: self.seed,
        }
    }

    fn dataset(&self) -> Result<Dataset> {
        let text = read(&self.data)?;
        Ok(ncmf::parse_dataset(&text)?)
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, assets } => {
            let cfg = Config::load(&config)?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(caddy::server::run_session(cfg, assets))?;
            Ok(())
        }
        Command::Parse { tokens } => parse(&tokens),
        Command::Simulate {
            scenario,
            config,
            noise,
            report,
            log,
        } => {
            let mut cfg = Config::load(&config)?;
            if let Some(p) = noise {
                cfg.noise.error_rate = p;
                cfg.validate()?;
            }
            let steps = parse_scenario(&read(&scenario)?)?;
            let out = run_scenario(&steps, &cfg)?;
            if let Some(path) = log {
                let mut text = String::new();
                for m in &out.messages {
                    text.push_str(&encode_message(m));
                    text.push('\n');
                }
                std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
            }
            let r = &out.report;
            match report {
                Some(ReportFormat::Json) => println!("{}", serde_json::to_string(r)?),
                None => {
                    println!("gestures sent       {}", r.gestures_sent);
                    println!("events recognized   {}", r.events_recognized);
                    println!("event error rate    {:.4}", r.event_error_rate);
                    println!("commands validated  {}", r.commands_validated);
                    println!("commands rejected   {}", r.commands_rejected);
                    println!("missions completed  {}", r.missions_completed);
                    println!(
                        "final pose          ({:.2}, {:.2}, {:.2})",
                        r.final_auv.x_m, r.final_auv.y_m, r.final_auv.z_m
                    );
                }
            }
            Ok(())
        }
        Command::Ncmf { op } => match op {
            NcmfOp::Train { args, model } => {
                let data = args.dataset()?;
                let forest = ncmf::train(&data, &args.params())?;
                if let Some(path) = model {
                    std::fs::write(&path, serde_json::to_string(&forest)?)
                        .with_context(|| format!("writing {}", path.display()))?;
                }
                let eval = ncmf::evaluate(&forest, &data)?;
                println!(
                    "{}",
                    json!({"split": "train", "samples": eval.samples, "accuracy": eval.accuracy, "confusion": eval.confusion})
                );
                Ok(())
            }
            NcmfOp::Eval { args, model } => {
                let data = args.dataset()?;
                let (forest, test) = match model {
                    Some(path) => {
                        let forest: Forest = serde_json::from_str(&read(&path)?)
                            .with_context(|| format!("decoding model {}", path.display()))?;
                        (forest, data)
                    }
                    None => {
                        let (train, test) = split_half(&data, args.seed)?;
                        (ncmf::train(&train, &args.params())?, test)
                    }
                };
                let eval = ncmf::evaluate(&forest, &test)?;
                println!(
                    "{}",
                    json!({"split": "test", "samples": eval.samples, "accuracy": eval.accuracy, "confusion": eval.confusion})
                );
                Ok(())
            }
        },
    }
}

fn split_half(data: &Dataset, seed: u64) -> Result<(Dataset, Dataset)> {
    if data.len() < 2 {
        bail!("need at least two samples to split");
    }
    let mut samples = data.samples().to_vec();
    samples.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let test = samples.split_off(samples.len() / 2);
    Ok((
        Dataset::new(data.dims().to_vec(), samples)?,
        Dataset::new(data.dims().to_vec(), test)?,
    ))
}

fn parse(path: &Path) -> Result<()> {
    let text = read(path)?;
    let tokens = parse_token_file(&text)
        .map_err(|(line, e)| anyhow::anyhow!("{}:{line}: {e}", path.display()))?;
    let mut phrase_index = 0usize;
    let mut verdict = |result: serde_json::Value| {
        let mut line = json!({"phrase_index": phrase_index});
        line.as_object_mut()
            .expect("object")
            .extend(result.as_object().expect("object").clone());
        println!("{line}");
        phrase_index += 1;
    };
    for event in segment(&tokens) {
        let phrase = match event {
            ParserEvent::PhraseComplete { tokens, .. } => Some(tokens),
            ParserEvent::EmptyPhrase { .. } => Some(Vec::new()),
            ParserEvent::StrayToken { token } => {
                eprintln!("warning: `{token}` outside any phrase ignored");
                None
            }
            ParserEvent::Emergency => {
                eprintln!("warning: out_of_air in token file");
                None
            }
        };
        if let Some(phrase) = phrase {
            match check(&phrase) {
                Ok(cmd) => verdict(json!({"ok": true, "command": cmd.to_string(), "error": null})),
                Err(e) => verdict(json!({
                    "ok": false,
                    "command": null,
                    "error": {"code": e.code.as_str(), "position": e.position},
                })),
            }
        }
    }
    let mut tail = caddy::SegmenterState::new();
    tokens.iter().for_each(|&t| {
        tail.feed(t);
    });
    if tail.is_open() {
        eprintln!("warning: file ends inside an unterminated phrase");
    }
    Ok(())
}
