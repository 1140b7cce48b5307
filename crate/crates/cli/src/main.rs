//! Command-line surface for the reputation filter.
//!
//! Every command is a client of the HTTP service: with `--server` it talks
//! to a running `repfilter-server`, otherwise it spins up an in-process
//! instance on an ephemeral port for the duration of the invocation.
//!
//! Exit codes: 0 success, 2 input/IO error, 3 no trust available
//! (`trust` only).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use repfilter_client::{Client, ClientError};
use repfilter_core::api::TrustResponse;
use repfilter_core::{
    parse_events_jsonl, render_decisions_jsonl, render_events_jsonl, Basis, EngineConfig,
    ProfileId, SimConfig, SocialGraph,
};
use repfilter_service::AppState;

#[derive(Parser)]
#[command(
    name = "repfilter",
    about = "Reputation-based interaction filter",
    version
)]
struct Cli {
    /// Base URL of a running server (e.g. http://127.0.0.1:8080).
    /// Without it, an in-process server is used.
    #[arg(long, global = true)]
    server: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay an event log; writes decisions.jsonl and snapshot.json
    Replay {
        /// Event log (JSON Lines)
        events_path: PathBuf,
        /// Output directory (created if absent)
        out_dir: PathBuf,
        #[command(flatten)]
        config: ConfigOpts,
    },
    /// Run a scenario; writes events.jsonl, decisions.jsonl, metrics.csv,
    /// and snapshot.json
    Simulate {
        /// Scenario file (JSON)
        scenario_path: PathBuf,
        /// Output directory (created if absent)
        out_dir: PathBuf,
        /// Print the scenario's effective engine config before running
        #[arg(long)]
        print_config: bool,
    },
    /// Print x's trust in y from a snapshot (exit 3 when neither direct nor
    /// inferred trust exists)
    Trust {
        snapshot_path: PathBuf,
        x: String,
        y: String,
        #[command(flatten)]
        config: ConfigOpts,
    },
    /// Print one line of graph totals from a snapshot
    Stats { snapshot_path: PathBuf },
    /// Export the weighted-edge view as CSV (src,dst,trust)
    #[command(name = "export-weights")]
    ExportWeights {
        snapshot_path: PathBuf,
        /// Output CSV path
        out_path: PathBuf,
        #[command(flatten)]
        config: ConfigOpts,
    },
}

#[derive(Args)]
struct ConfigOpts {
    /// Engine config file (JSON); omitted fields use the defaults
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the effective engine config before running
    #[arg(long)]
    print_config: bool,
}

struct Failure {
    exit: u8,
    message: Option<String>,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            exit: 2,
            message: Some(message.into()),
        }
    }

    fn silent(exit: u8) -> Self {
        Failure {
            exit,
            message: None,
        }
    }
}

impl From<ClientError> for Failure {
    fn from(err: ClientError) -> Self {
        Failure::input(err.to_string())
    }
}

#[tokio::main]
async fn main() -> ExitCode {
    let cli = Cli::parse();

    let (client, _server) = match &cli.server {
        Some(url) => (Client::new(url.clone()), None),
        None => {
            let state = AppState::new(EngineConfig::default());
            match repfilter_service::spawn_ephemeral(state).await {
                Ok((addr, handle)) => (Client::new(format!("http://{addr}")), Some(handle)),
                Err(err) => {
                    eprintln!("repfilter: cannot start in-process server: {err}");
                    return ExitCode::from(2);
                }
            }
        }
    };

    match run(cli.command, &client).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if let Some(message) = failure.message {
                eprintln!("repfilter: {message}");
            }
            ExitCode::from(failure.exit)
        }
    }
}

async fn run(command: Command, client: &Client) -> Result<(), Failure> {
    match command {
        Command::Replay {
            events_path,
            out_dir,
            config,
        } => replay_cmd(client, &events_path, &out_dir, &config).await,
        Command::Simulate {
            scenario_path,
            out_dir,
            print_config,
        } => simulate_cmd(client, &scenario_path, &out_dir, print_config).await,
        Command::Trust {
            snapshot_path,
            x,
            y,
            config,
        } => trust_cmd(client, &snapshot_path, &x, &y, &config).await,
        Command::Stats { snapshot_path } => stats_cmd(client, &snapshot_path).await,
        Command::ExportWeights {
            snapshot_path,
            out_path,
            config,
        } => export_weights_cmd(client, &snapshot_path, &out_path, &config).await,
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|err| Failure::input(format!("cannot read {}: {err}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|err| {
                Failure::input(format!("cannot create {}: {err}", parent.display()))
            })?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|err| Failure::input(format!("cannot write {}: {err}", path.display())))
}

fn load_engine_config(opts: &ConfigOpts) -> Result<EngineConfig, Failure> {
    let config = match &opts.config {
        None => EngineConfig::default(),
        Some(path) => {
            let text = read_file(path)?;
            serde_json::from_str(&text).map_err(|err| {
                Failure::input(format!("invalid config {}: {err}", path.display()))
            })?
        }
    };
    if opts.print_config {
        print_engine_config(&config);
    }
    Ok(config)
}

fn print_engine_config(config: &EngineConfig) {
    println!(
        "{}",
        serde_json::to_string(config).expect("config serialization cannot fail")
    );
}

fn load_snapshot_value(path: &Path) -> Result<Value, Failure> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .map_err(|err| Failure::input(format!("invalid snapshot {}: {err}", path.display())))
}

fn parse_profile_id(raw: &str) -> Result<ProfileId, Failure> {
    ProfileId::new(raw).map_err(|err| Failure::input(format!("invalid profile id: {err}")))
}

async fn replay_cmd(
    client: &Client,
    events_path: &Path,
    out_dir: &Path,
    config: &ConfigOpts,
) -> Result<(), Failure> {
    let text = read_file(events_path)?;
    let events = parse_events_jsonl(&text)
        .map_err(|err| Failure::input(format!("{}: {err}", events_path.display())))?;
    let config = load_engine_config(config)?;
    let resp = client.replay(events, config).await?;
    let graph = SocialGraph::from_snapshot_value(&resp.snapshot)
        .map_err(|err| Failure::input(format!("service returned an invalid snapshot: {err}")))?;
    write_file(
        &out_dir.join("decisions.jsonl"),
        &render_decisions_jsonl(&resp.decisions),
    )?;
    write_file(&out_dir.join("snapshot.json"), &graph.to_snapshot())?;
    Ok(())
}

async fn simulate_cmd(
    client: &Client,
    scenario_path: &Path,
    out_dir: &Path,
    print_config: bool,
) -> Result<(), Failure> {
    let text = read_file(scenario_path)?;
    let scenario: SimConfig = serde_json::from_str(&text).map_err(|err| {
        Failure::input(format!(
            "invalid scenario {}: {err}",
            scenario_path.display()
        ))
    })?;
    if print_config {
        print_engine_config(&scenario.engine);
    }
    let resp = client.simulate(scenario).await?;
    let graph = SocialGraph::from_snapshot_value(&resp.snapshot)
        .map_err(|err| Failure::input(format!("service returned an invalid snapshot: {err}")))?;
    write_file(
        &out_dir.join("events.jsonl"),
        &render_events_jsonl(&resp.events),
    )?;
    write_file(
        &out_dir.join("decisions.jsonl"),
        &render_decisions_jsonl(&resp.decisions),
    )?;
    write_file(&out_dir.join("metrics.csv"), &resp.metrics.to_csv())?;
    write_file(&out_dir.join("snapshot.json"), &graph.to_snapshot())?;
    Ok(())
}

async fn trust_cmd(
    client: &Client,
    snapshot_path: &Path,
    x: &str,
    y: &str,
    config: &ConfigOpts,
) -> Result<(), Failure> {
    let snapshot = load_snapshot_value(snapshot_path)?;
    let x = parse_profile_id(x)?;
    let y = parse_profile_id(y)?;
    let config = load_engine_config(config)?;
    let resp = client.trust(snapshot, x, y, config.trust).await?;
    print_trust_line(&resp);
    match resp.basis {
        Basis::Fallback => Err(Failure::silent(3)),
        _ => Ok(()),
    }
}

fn print_trust_line(resp: &TrustResponse) {
    match resp.basis {
        Basis::Direct => println!("direct {}", resp.value.expect("direct trust has a value")),
        Basis::Default => println!("default {}", resp.value.expect("default trust has a value")),
        Basis::Inferred => println!(
            "inferred via {} {}",
            resp.via
                .as_ref()
                .expect("inferred trust names its intermediary"),
            resp.value.expect("inferred trust has a value"),
        ),
        Basis::Fallback => println!("fallback"),
    }
}

async fn stats_cmd(client: &Client, snapshot_path: &Path) -> Result<(), Failure> {
    let snapshot = load_snapshot_value(snapshot_path)?;
    let stats = client.stats(snapshot).await?;
    println!(
        "profiles={} edges={} rows={} accepted_interactions={} rejected_interactions={}",
        stats.profiles,
        stats.edges,
        stats.rows,
        stats.accepted_interactions,
        stats.rejected_interactions,
    );
    Ok(())
}

async fn export_weights_cmd(
    client: &Client,
    snapshot_path: &Path,
    out_path: &Path,
    config: &ConfigOpts,
) -> Result<(), Failure> {
    let snapshot = load_snapshot_value(snapshot_path)?;
    let config = load_engine_config(config)?;
    let csv = client.weights_csv(snapshot, config.trust).await?;
    write_file(out_path, &csv)?;
    Ok(())
}
