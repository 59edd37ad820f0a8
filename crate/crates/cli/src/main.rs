mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use config::{Command, ConfigErrors, Overrides};
use output::{write_json, ArtifactWriter};

/// Correlation-function dynamics of dissipatively cooled spin lattices.
///
/// Settings are layered: built-in defaults, then the `--config` TOML file, then
/// `SPINCOOL__SECTION__KEY` environment variables, then `--set section.key=value`,
/// then the dedicated flags below (which also read `SPINCOOL_OUT`, `SPINCOOL_THREADS`
/// and `SPINCOOL_SEED`).
#[derive(Debug, Parser)]
#[command(name = "spincool", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML run configuration.
    #[arg(long, env = "SPINCOOL_CONFIG")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "SPINCOOL_OUT")]
    out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "SPINCOOL_THREADS")]
    threads: Option<usize>,
    /// Seed for random initial states and random closure samples.
    #[arg(long, env = "SPINCOOL_SEED")]
    seed: Option<u64>,
    /// Override a config key, e.g. `--set lattice.extent=32`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn fail(kind: &str, messages: Vec<String>, out: Option<&PathBuf>, code: u8) -> ExitCode {
    let body = json!({ "status": "error", "kind": kind, "errors": messages });
    eprintln!("{}", serde_json::to_string_pretty(&body).expect("json"));
    if let Some(dir) = out {
        if std::fs::create_dir_all(dir).is_ok() {
            let _ = write_json(&dir.join("error.json"), &body);
        }
    }
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let overrides = Overrides { sets: cli.sets, out: cli.out.clone(), threads: cli.threads, seed: cli.seed };
    let cfg = match config::resolve(cli.command, cli.config.as_deref(), std::env::vars(), &overrides) {
        Ok(cfg) => cfg,
        Err(ConfigErrors(errors)) => return fail("config", errors, cli.out.as_ref(), 2),
    };
    let out_dir = cfg.output.directory.clone();

    // Dense kernels stay sequential so results do not depend on the thread count.
    faer::set_global_parallelism(faer::Par::Seq);
    let threads = if cfg.output.threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        cfg.output.threads
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        return fail("runtime", vec![e.to_string()], Some(&out_dir), 1);
    }

    let started = Instant::now();
    let mut writer = match ArtifactWriter::new(&out_dir) {
        Ok(w) => w,
        Err(e) => return fail("io", vec![format!("{}: {e}", out_dir.display())], None, 1),
    };
    let summary = match commands::run(&cfg, &mut writer) {
        Ok(s) => s,
        Err(e) => return fail("runtime", e.chain().map(|c| c.to_string()).collect(), Some(&out_dir), 1),
    };
    let manifest = json!({
        "status": "ok",
        "command": cfg.command,
        "versions": { "spincool": env!("CARGO_PKG_VERSION"), "spincool_core": spincool_core::VERSION },
        "config": cfg,
        "threads": threads,
        "float_format": "shortest round-trip decimal",
        "wall_time_s": started.elapsed().as_secs_f64(),
        "artifacts": writer.artifacts,
        "summary": summary,
    });
    if let Err(e) = write_json(&writer.dir().join("manifest.json"), &manifest) {
        return fail("io", vec![e.to_string()], None, 1);
    }
    // A closed stdout (e.g. piped into `head`) is not a failure; the artifacts are on disk.
    let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&manifest["summary"]).expect("json"));
    ExitCode::SUCCESS
}
