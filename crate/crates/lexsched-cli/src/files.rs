use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::{invalid, CliError};

/// Reads a file, or stdin for `-`.
pub fn read_text(path: &Path) -> Result<String, CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

/// Writes to a file, or stdout when `path` is `None`.
pub fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
            }
            std::fs::write(p, bytes).map_err(|source| CliError::Io { path: p.display().to_string(), source })
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|source| CliError::Io { path: "<stdout>".into(), source })
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(value).expect("serializable");
    s.push(b'\n');
    s
}

/// Expands glob patterns in order; each pattern must match at least one file.
pub fn expand(patterns: &[String]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for pat in patterns {
        if pat == "-" {
            out.push(PathBuf::from("-"));
            continue;
        }
        let paths = glob::glob(pat).map_err(|e| invalid(format!("bad pattern {pat:?}: {e}")))?;
        let before = out.len();
        for p in paths {
            out.push(p.map_err(|e| CliError::Io { path: e.path().display().to_string(), source: e.into() })?);
        }
        if out.len() == before {
            return Err(CliError::Io {
                path: pat.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no file matches"),
            });
        }
    }
    Ok(out)
}

/// File name without extension, used as the instance id in reports.
pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "stdin".into())
}

/// Serializes CSV rows after a header line, with LF endings. The header is
/// written even when there are no rows.
pub fn csv_bytes<R: Serialize>(header: &[&str], rows: &[R]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(|e| invalid(format!("csv: {e}")))?;
    for r in rows {
        w.serialize(r).map_err(|e| invalid(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| invalid(format!("csv: {e}")))
}
