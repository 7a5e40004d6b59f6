//! `ctfactor`: one binary over every ctfactor-core module.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 usage error, 3 timeout or
//! undecided. With `--out-dir`, the result document and `manifest.json` are
//! written there; the manifest digests every input and output file.

pub mod args;
pub mod commands;
pub mod manifest;

use std::path::Path;
use std::time::{Duration, Instant};

use clap::Parser;

use args::Cli;
use commands::{CliError, Ctx, EXIT_OK, EXIT_USAGE};
use manifest::{sha256_hex, versions, FileDigest, RunManifest};

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let start = Instant::now();
    let mut ctx = Ctx {
        seed: cli.seed,
        budget: cli.budget_ms.map(Duration::from_millis),
        format: cli.format,
        inputs: Vec::new(),
        master_seed: cli.seed.unwrap_or(0),
    };
    match run(&cli, &mut ctx, &argv, start) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run(cli: &Cli, ctx: &mut Ctx, argv: &[std::ffi::OsString], start: Instant) -> Result<i32, CliError> {
    let outcome = commands::run(&cli.command, ctx)?;
    if !outcome.summary.is_empty() {
        println!("{}", outcome.summary);
    }
    let mut written = Vec::new();
    if let Some(output) = &outcome.output {
        let digest = |name: String| FileDigest {
            file: name,
            sha256: sha256_hex(&output.bytes),
        };
        if let Some(dir) = &cli.out_dir {
            write(&dir.join(output.file_name()), &output.bytes)?;
            written.push(digest(output.file_name()));
        }
        if let Some(path) = &outcome.out_path {
            write(path, &output.bytes)?;
            written.push(digest(path.display().to_string()));
        }
        if written.is_empty() && outcome.echo {
            print!("{}", String::from_utf8_lossy(&output.bytes));
        }
    }
    let manifest_dir = cli
        .out_dir
        .clone()
        .or_else(|| outcome.out_path.as_ref().and_then(|p| p.parent().map(Path::to_path_buf)));
    if let Some(dir) = manifest_dir.filter(|_| !written.is_empty()) {
        let mut hashed = serde_json::to_vec(&cli.command).expect("serializable");
        for input in &ctx.inputs {
            hashed.extend_from_slice(input.sha256.as_bytes());
        }
        let manifest = RunManifest {
            command_line: argv.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
            config_hash: sha256_hex(&hashed),
            master_seed: ctx.master_seed,
            versions: versions(),
            wall_time_ms: start.elapsed().as_millis() as u64,
            exit_code: outcome.code,
            inputs: ctx.inputs.clone(),
            outputs: written,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("serializable");
        bytes.push(b'\n');
        write(&dir.join("manifest.json"), &bytes)?;
    }
    Ok(outcome.code)
}
