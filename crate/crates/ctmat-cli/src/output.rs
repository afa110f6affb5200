//! Output formatting: 17-significant-digit numbers (round-trip safe for
//! doubles), CSV with `#`-prefixed config echo lines, and the JSON mirror.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// 17 significant digits, locale-independent.
pub fn g17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Echoed resolved configuration: sorted key -> rendered value.
pub type ConfigEcho = BTreeMap<String, String>;

pub fn echo_f64(echo: &mut ConfigEcho, key: &str, value: f64) {
    echo.insert(key.to_string(), g17(value));
}

pub fn echo_str(echo: &mut ConfigEcho, key: &str, value: impl ToString) {
    echo.insert(key.to_string(), value.to_string());
}

pub fn echo_f64_list(echo: &mut ConfigEcho, key: &str, values: &[f64]) {
    let rendered: Vec<String> = values.iter().map(|v| g17(*v)).collect();
    echo.insert(key.to_string(), rendered.join(","));
}

/// Assemble a CSV document: `# key = value` echo lines, a header row, then
/// the data rows.
pub fn csv_document(tool_line: &str, echo: &ConfigEcho, header: &str, rows: &[String]) -> String {
    let mut out = String::new();
    out.push_str("# ");
    out.push_str(tool_line);
    out.push('\n');
    for (key, value) in echo {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

/// JSON mirror: `config` object, `rows` array, `summary` object.
pub fn json_document<R: Serialize, S: Serialize>(
    echo: &ConfigEcho,
    rows: &[R],
    summary: &S,
) -> Result<String, CliError> {
    #[derive(Serialize)]
    struct Document<'a, R, S> {
        config: &'a ConfigEcho,
        rows: &'a [R],
        summary: &'a S,
    }
    let mut text = serde_json::to_string_pretty(&Document {
        config: echo,
        rows,
        summary,
    })
    .map_err(|e| CliError::Io(format!("JSON encoding failed: {e}")))?;
    text.push('\n');
    Ok(text)
}

/// Write to the path, or to stdout when no path is given.
pub fn emit(output: Option<&Path>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}
