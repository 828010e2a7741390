use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::{CliError, CliResult, Input, InputKind, Report};
use lcomplete::towers::GradedModule;
use lcomplete::{FpModule, FpMorphism};

/// Parses `text` as `T`, reporting the line and column of the first problem.
pub fn parse_json<T: DeserializeOwned>(source_name: &str, text: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        source_name: source_name.into(),
        line: e.line(),
        column: e.column(),
        message: strip_position(&e.to_string()),
    })
}

/// serde_json appends " at line L column C"; the position is reported
/// separately.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load_input(path: &Path, kind: InputKind) -> CliResult<Input> {
    let name = path.display().to_string();
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Io { path: name.clone(), message: e.to_string() })?;
    Ok(match kind {
        InputKind::Module => Input::Module(parse_json::<FpModule>(&name, &text)?),
        InputKind::Morphism => Input::Morphism(parse_json::<FpMorphism>(&name, &text)?),
        InputKind::Graded => Input::GradedModule(parse_json::<GradedModule>(&name, &text)?),
        InputKind::Report => Input::Report(Box::new(parse_json::<Report>(&name, &text)?)),
        InputKind::ModuleOrGraded => {
            let value: serde_json::Value = parse_json(&name, &text)?;
            if value.get("components").is_some() {
                Input::GradedModule(parse_json::<GradedModule>(&name, &text)?)
            } else {
                Input::Module(parse_json::<FpModule>(&name, &text)?)
            }
        }
    })
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so readers never observe a partial report.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let io_err = |e: std::io::Error| CliError::Io { path: path.display().to_string(), message: e.to_string() };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
