use std::fs;
use std::path::PathBuf;

use serde::Serialize;
use treepolymer::{SCHEMA_VERSION, TOOL_VERSION};

use crate::config::{RunConfig, Runtime};
use crate::CliError;

/// Comment lines that open every CSV and SVG file.
pub fn header(config: &RunConfig) -> Vec<String> {
    vec![
        format!("{TOOL_VERSION} schema_version={SCHEMA_VERSION}"),
        format!("command={}", config.command),
        format!("config={}", config.to_json()),
    ]
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    tool_version: &'a str,
    config: &'a RunConfig,
    report: &'a T,
}

/// Pretty JSON document wrapping `report` with the config and versions.
pub fn json<T: Serialize>(config: &RunConfig, report: &T) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(&Envelope {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        config,
        report,
    })
    .expect("reports serialize");
    text.push('\n');
    text.into_bytes()
}

/// Writes `bytes` to `<out>/<name>` and prints the path.
pub fn write(runtime: &Runtime, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(&runtime.out)
        .map_err(|e| CliError::from(e).context(&format!("creating {}", runtime.out.display())))?;
    let path = runtime.out.join(name);
    fs::write(&path, bytes).map_err(|e| CliError::from(e).context(&format!("writing {}", path.display())))?;
    println!("{}", path.display());
    Ok(path)
}

/// Runs a CSV writer into a buffer.
pub fn csv_bytes<F>(write: F) -> Vec<u8>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf).expect("writing to memory");
    buf
}

impl CliError {
    fn context(mut self, what: &str) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }
}
