use std::collections::BTreeSet;
use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GameEnd, MatchSpec, Removal};

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("ledger i/o: {0}")]
    Io(#[from] io::Error),
    #[error("ledger line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error("{0}")]
    Spec(String),
}

/// One line of the ledger: a played or voided game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LedgerEntry {
    pub spec_hash: String,
    pub game: u32,
    pub white_strength: u32,
    pub black_strength: u32,
    pub removed: Vec<Removal>,
    /// White's score, or `None` for a voided game.
    pub outcome: Option<f64>,
    pub plies: u32,
    pub note: String,
}

impl LedgerEntry {
    pub fn new(spec: &MatchSpec, hash: &str, game: u32, end: &GameEnd) -> LedgerEntry {
        let (outcome, plies, note) = match end {
            GameEnd::Finished { score, plies, reason } => (Some(*score), *plies, reason.to_string()),
            GameEnd::Void { reason, plies } => (None, *plies, reason.clone()),
        };
        LedgerEntry {
            spec_hash: hash.to_string(),
            game,
            white_strength: spec.white_strength,
            black_strength: spec.black_strength,
            removed: spec.ablation.clone(),
            outcome,
            plies,
            note,
        }
    }
}

/// Append-only JSON-lines file of game results.
#[derive(Debug)]
pub struct Ledger {
    path: PathBuf,
    entries: Vec<LedgerEntry>,
    file: File,
}

impl Ledger {
    /// Opens or creates the ledger at `path`. A partial final line, left by
    /// an interrupted write, is cut off; any other bad line is an error.
    pub fn open(path: &Path) -> Result<Ledger, LedgerError> {
        let text = match std::fs::read(path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e.into()),
        };
        let complete = text.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
        let mut entries = parse_ledger(&text[..complete])?;
        let tail = &text[complete..];
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if !tail.is_empty() {
            match serde_json::from_slice::<LedgerEntry>(tail) {
                Ok(e) => {
                    entries.push(e);
                    file.write_all(b"\n")?;
                }
                Err(_) => {
                    log::warn!("dropping truncated final ledger line");
                    file.set_len(complete as u64)?;
                }
            }
        }
        Ok(Ledger {
            path: path.to_path_buf(),
            entries,
            file,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    /// Game numbers already recorded for a spec, voided games included.
    pub fn recorded_games(&self, spec_hash: &str) -> BTreeSet<u32> {
        self.entries
            .iter()
            .filter(|e| e.spec_hash == spec_hash)
            .map(|e| e.game)
            .collect()
    }

    pub fn append(&mut self, entry: &LedgerEntry) -> Result<(), LedgerError> {
        let mut line = serde_json::to_string(entry).map_err(|e| LedgerError::Spec(e.to_string()))?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        self.entries.push(entry.clone());
        Ok(())
    }
}

/// Parses ledger text without touching the filesystem; used by the fuzzer.
pub fn parse_ledger(text: &[u8]) -> Result<Vec<LedgerEntry>, LedgerError> {
    let mut out = Vec::new();
    for (i, line) in text.split(|b| *b == b'\n').enumerate() {
        if line.iter().all(u8::is_ascii_whitespace) {
            continue;
        }
        out.push(serde_json::from_slice(line).map_err(|e| LedgerError::Corrupt {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(game: u32) -> LedgerEntry {
        LedgerEntry {
            spec_hash: "abc".into(),
            game,
            white_strength: 1600,
            black_strength: 2000,
            removed: vec![],
            outcome: Some(0.5),
            plies: 40,
            note: "move cap".into(),
        }
    }

    #[test]
    fn truncated_tail_is_dropped_and_appends_continue() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.jsonl");
        {
            let mut l = Ledger::open(&path).unwrap();
            l.append(&entry(0)).unwrap();
            l.append(&entry(1)).unwrap();
        }
        let mut text = std::fs::read(&path).unwrap();
        let full = text.len();
        text.extend_from_slice(br#"{"spec_hash":"abc","ga"#);
        std::fs::write(&path, &text).unwrap();
        let mut l = Ledger::open(&path).unwrap();
        assert_eq!(l.recorded_games("abc").len(), 2);
        assert_eq!(std::fs::metadata(&path).unwrap().len() as usize, full);
        l.append(&entry(2)).unwrap();
        drop(l);
        assert_eq!(Ledger::open(&path).unwrap().entries().len(), 3);
    }

    #[test]
    fn corrupt_middle_line_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ledger.jsonl");
        let good = serde_json::to_string(&entry(0)).unwrap();
        std::fs::write(&path, format!("{good}\nnot json\n{good}\n")).unwrap();
        assert!(matches!(Ledger::open(&path), Err(LedgerError::Corrupt { line: 2, .. })));
    }
}
