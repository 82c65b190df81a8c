//! Batch front-end for `ainf-core`: JSON documents in, plain-text reports and JSON companions out.

pub mod commands;
pub mod error;
pub mod schema;
pub mod workspace;

use std::path::{Path, PathBuf};

use serde_json::json;

pub use commands::{Command, Config, Outcome};
pub use error::{CliError, CliResult};

/// Default output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "AINF_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Clone, Debug)]
pub enum Job {
    Input { command: Command, path: PathBuf },
    Trees { count: Option<usize>, list: Option<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finished {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn render(command: &str, input: &str, outcome: &Outcome) -> String {
    let mut s = format!("## {command} {input}\n");
    for l in &outcome.lines {
        s.push_str(l);
        s.push('\n');
    }
    for r in &outcome.reports {
        s.push('\n');
        s.push_str(&r.to_text());
    }
    s.push_str(&format!("\nstatus: {}\n", if outcome.ok() { "ok" } else { "failed" }));
    s
}

pub fn companion(command: &str, input: &str, cfg: &Config, outcome: &Outcome) -> String {
    workspace::to_json(&json!({
        "command": command,
        "input": input,
        "a_max": cfg.a_max,
        "k_max": cfg.k_max,
        "ok": outcome.ok(),
        "data": outcome.data,
        "reports": outcome.reports,
    }))
}

fn write_outputs(dir: &Path, stem: &str, text: &str, json: &str, outcome: &Outcome) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.display().to_string(), message: e.to_string() })?;
    workspace::write_file(&dir.join(format!("{stem}.txt")), text)?;
    workspace::write_file(&dir.join(format!("{stem}.json")), json)?;
    for (name, contents) in &outcome.artifacts {
        workspace::write_file(&dir.join(name), contents)?;
    }
    Ok(())
}

fn attempt(job: &Job, cfg: &Config, out: Option<&Path>) -> CliResult<(Outcome, String)> {
    let (command, input, outcome, text) = match job {
        Job::Trees { count, list } => {
            let outcome = commands::trees(*count, *list)?;
            let text: String = outcome.lines.iter().map(|l| format!("{l}\n")).collect();
            ("trees", "trees".to_string(), outcome, text)
        }
        Job::Input { command, path } => {
            let ws = workspace::load_path(path)?;
            let outcome = commands::execute(command, &ws, cfg)?;
            let text = render(command.name(), &ws.name, &outcome);
            (command.name(), ws.name, outcome, text)
        }
    };
    if let Some(dir) = out {
        let json = companion(command, &input, cfg, &outcome);
        write_outputs(dir, &format!("{input}.{command}"), &text, &json, &outcome)?;
    }
    Ok((outcome, text))
}

/// Runs one job; exit code 0 on success, 1 when a check fails, 2 on bad input.
pub fn run(job: &Job, cfg: &Config, out: Option<&Path>) -> Finished {
    match attempt(job, cfg, out) {
        Ok((outcome, stdout)) => match outcome.first_failure() {
            None => Finished { code: EXIT_OK, stdout, stderr: String::new() },
            Some(r) => Finished { code: EXIT_CHECK_FAILED, stdout, stderr: format!("check failed:\n{}", r.to_text()) },
        },
        Err(e) => Finished { code: EXIT_INPUT_ERROR, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
