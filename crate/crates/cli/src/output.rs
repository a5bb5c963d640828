use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::commands::{CliError, Report};
use crate::Common;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_VAR: &str = "SUR_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    config: &'a Value,
    results: &'a [Value],
    summary: &'a Value,
    version: &'a str,
    seed: u64,
}

pub fn render(report: &Report, common: &Common) -> Result<Vec<u8>, CliError> {
    match common.format {
        Format::Json => {
            let env = Envelope {
                command: report.command,
                config: &report.config,
                results: &report.results,
                summary: &report.summary,
                version: env!("CARGO_PKG_VERSION"),
                seed: common.seed,
            };
            let mut out = serde_json::to_vec_pretty(&env)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => csv_rows(&report.results),
    }
}

/// One row per result; nested values are written as compact JSON.
fn csv_rows(results: &[Value]) -> Result<Vec<u8>, CliError> {
    let mut header: Vec<String> = Vec::new();
    for row in results {
        if let Value::Object(map) = row {
            for k in map.keys() {
                if !header.contains(k) {
                    header.push(k.clone());
                }
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for row in results {
        let cells = header.iter().map(|k| match row.get(k) {
            None | Some(Value::Null) => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => v.to_string(),
        });
        w.write_record(cells)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn emit(report: &Report, common: &Common) -> Result<(), CliError> {
    let bytes = render(report, common)?;
    let path = common.output.clone().or_else(|| {
        std::env::var_os(OUTPUT_DIR_VAR)
            .map(|dir| PathBuf::from(dir).join(format!("{}.{}", report.command, common.format.extension())))
    });
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(p, bytes)?;
        }
        None => io::stdout().lock().write_all(&bytes)?,
    }
    Ok(())
}
