//! Serialization of result rows and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::args::{Format, OutputArgs};
use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "AZRBF_OUTPUT_DIR";

/// Where the rows go.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Destination {
    Stdout,
    File(PathBuf),
}

/// Resolve format and destination. `stem` names the file created under
/// `$AZRBF_OUTPUT_DIR` when no explicit path is given.
pub fn resolve(out: &OutputArgs, stem: &str) -> (Format, Destination) {
    let inferred = out
        .output
        .as_deref()
        .and_then(|p| p.extension())
        .and_then(|e| match e.to_str() {
            Some("json") => Some(Format::Json),
            Some("csv") => Some(Format::Csv),
            _ => None,
        });
    let format = out.format.or(inferred).unwrap_or(Format::Csv);
    let dest = match &out.output {
        Some(p) => Destination::File(p.clone()),
        None => match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                Destination::File(PathBuf::from(dir).join(format!("{stem}.{}", format.extension())))
            }
            _ => Destination::Stdout,
        },
    };
    (format, dest)
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Write `bytes` through a temporary file in the target directory followed
/// by a rename, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

pub fn emit(dest: &Destination, bytes: &[u8]) -> Result<(), CliError> {
    match dest {
        Destination::Stdout => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
        Destination::File(p) => write_atomic(p, bytes),
    }
}

/// Sibling path for the singular value profile of a rank scan:
/// `ranks.csv` becomes `ranks_profile.csv`.
pub fn profile_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_profile.{}", ext.to_string_lossy()),
        None => format!("{stem}_profile"),
    };
    path.with_file_name(name)
}
