//! Standalone server binary.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tokio::net::TcpListener;

use repfilter_core::EngineConfig;
use repfilter_service::AppState;

#[derive(Parser)]
#[command(name = "repfilter-server", about = "Reputation filter HTTP service")]
struct Args {
    /// Address to listen on
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,

    /// Engine config file (JSON) for the live stream lane
    #[arg(long)]
    config: Option<PathBuf>,

    /// Print the effective engine config and continue
    #[arg(long)]
    print_config: bool,
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .init();

    let args = Args::parse();
    let config: EngineConfig = match &args.config {
        None => EngineConfig::default(),
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(text) => text,
                Err(err) => {
                    eprintln!("repfilter-server: cannot read {}: {err}", path.display());
                    return ExitCode::from(2);
                }
            };
            match serde_json::from_str(&text) {
                Ok(config) => config,
                Err(err) => {
                    eprintln!("repfilter-server: invalid config {}: {err}", path.display());
                    return ExitCode::from(2);
                }
            }
        }
    };
    if args.print_config {
        println!(
            "{}",
            serde_json::to_string(&config).expect("config serializes")
        );
    }

    let listener = match TcpListener::bind(args.addr).await {
        Ok(listener) => listener,
        Err(err) => {
            eprintln!("repfilter-server: cannot bind {}: {err}", args.addr);
            return ExitCode::from(2);
        }
    };
    match listener.local_addr() {
        Ok(addr) => tracing::info!("listening on {addr}"),
        Err(err) => tracing::warn!("listening (local_addr unavailable: {err})"),
    }
    if let Err(err) = repfilter_service::serve(listener, AppState::new(config)).await {
        eprintln!("repfilter-server: {err}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
