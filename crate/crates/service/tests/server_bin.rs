//! Tests against the actual `repfilter-server` binary.

use std::process::Stdio;
use std::time::Duration;

use tokio::io::{AsyncBufReadExt, BufReader};
use tokio::process::{Child, Command};

use repfilter_client::Client;
use repfilter_core::FallbackPolicy;

async fn spawn_server(extra_args: &[&str]) -> (Child, String) {
    let mut child = Command::new(env!("CARGO_BIN_EXE_repfilter-server"))
        .args(["--addr", "127.0.0.1:0"])
        .args(extra_args)
        .stdout(Stdio::piped())
        .kill_on_drop(true)
        .spawn()
        .expect("failed to launch repfilter-server");
    let stdout = child.stdout.take().unwrap();
    let mut lines = BufReader::new(stdout).lines();
    let addr = loop {
        let line = tokio::time::timeout(Duration::from_secs(10), lines.next_line())
            .await
            .expect("server did not announce its address in time")
            .expect("failed to read server stdout")
            .expect("server exited before announcing its address");
        if let Some(rest) = line.split("listening on ").nth(1) {
            break rest.trim().to_string();
        }
    };
    (child, format!("http://{addr}"))
}

#[tokio::test]
async fn binary_serves_health_with_defaults() {
    let (mut child, base) = spawn_server(&[]).await;
    let client = Client::new(base);
    let health = client.health().await.unwrap();
    assert_eq!(health.status, "ok");
    let config = client.server_config().await.unwrap();
    assert_eq!(config, repfilter_core::EngineConfig::default());
    child.kill().await.unwrap();
}

#[tokio::test]
async fn binary_loads_a_config_file() {
    let dir = scratch_dir();
    let path = dir.join("engine.json");
    std::fs::write(
        &path,
        r#"{"fallback_policy": "reject", "trust": {"threshold": "3/4"}}"#,
    )
    .unwrap();
    let (mut child, base) = spawn_server(&["--config", path.to_str().unwrap()]).await;
    let client = Client::new(base);
    let config = client.server_config().await.unwrap();
    assert_eq!(config.fallback_policy, FallbackPolicy::Reject);
    assert_eq!(
        config.trust.threshold(),
        repfilter_core::Rational::new(3, 4).unwrap()
    );
    child.kill().await.unwrap();
    std::fs::remove_dir_all(dir).ok();
}

fn scratch_dir() -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("repfilter-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
