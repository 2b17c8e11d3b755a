use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};
use piecevalue::config::{file_sha256, hex_sha256};
use piecevalue::report::ArtifactHeader;

/// Settings and input contents hashed together, so reruns on equal inputs
/// get the same hash wherever the files live.
pub fn run_hash<S: Serialize>(settings: &S, inputs: &[&Path]) -> CliResult<String> {
    let mut text = serde_json::to_string(settings)?;
    for p in inputs {
        let digest = file_sha256(p).map_err(|e| CliError::data(p.display(), e))?;
        text.push('\n');
        text.push_str(&digest);
    }
    Ok(hex_sha256(text.as_bytes()))
}

pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::data(dir.display(), e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::data(path.display(), e))
}

pub fn open(path: &Path) -> CliResult<std::io::BufReader<File>> {
    File::open(path)
        .map(std::io::BufReader::new)
        .map_err(|e| CliError::data(path.display(), e))
}

#[derive(Serialize)]
struct Artifact<'a, T: Serialize> {
    header: &'a ArtifactHeader,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with the header as its first field.
pub fn write_json<T: Serialize>(path: &Path, header: &ArtifactHeader, body: &T) -> CliResult {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, &Artifact { header, body })?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    serde_json::from_reader(open(path)?).map_err(|e| CliError::data(path.display(), e))
}

pub fn write_tsv(path: &Path, header: &ArtifactHeader, columns: &[&str], rows: &[Vec<String>]) -> CliResult {
    let mut w = create(path)?;
    piecevalue::report::write_tsv(&mut w, header, columns, rows)?;
    w.flush()?;
    Ok(())
}

/// Aligned plain-text table for the terminal.
pub fn print_table(columns: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = columns.iter().map(|c| c.len()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        println!("{}", parts.join("  "));
    };
    line(columns.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
}

pub fn path_in(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}
