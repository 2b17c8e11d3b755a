//! Snapshot feature rows and their on-disk table.
//!
//! The table is tab-separated with a header line. Column order:
//!
//! | column | meaning |
//! |---|---|
//! | `game` | ordinal of the game in the filtered stream |
//! | `variant` | variant name |
//! | `snapshot_ply` | plies applied before the snapshot |
//! | `total_ply` | plies in the game |
//! | `delta_rating` | white minus black pre-game rating, in rating points (not rescaled) |
//! | `tempo` | `1` when white is to move, `-1` otherwise |
//! | `d_pawn` .. `d_queen` | white-minus-black piece counts |
//! | `d_king` | king difference; Antichess only, empty elsewhere |
//! | `d_passed_2_4` .. `d_passed_7` | passed-pawn bucket differences; empty for Horde |
//! | `outcome` | `1`, `0.5` or `0` from white's point of view |

use std::io::{Read, Write};
use std::str::FromStr;

use piecevalue_rules::Variant;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ELO_LOGIT;

pub const TABLE_COLUMNS: [&str; 17] = [
    "game",
    "variant",
    "snapshot_ply",
    "total_ply",
    "delta_rating",
    "tempo",
    "d_pawn",
    "d_knight",
    "d_bishop",
    "d_rook",
    "d_queen",
    "d_king",
    "d_passed_2_4",
    "d_passed_5",
    "d_passed_6",
    "d_passed_7",
    "outcome",
];

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub game: u64,
    pub variant: Variant,
    pub snapshot_ply: u32,
    pub total_ply: u32,
    /// White minus black rating, in rating points.
    pub delta_rating: f64,
    pub tempo: i8,
    pub pawn: i32,
    pub knight: i32,
    pub bishop: i32,
    pub rook: i32,
    pub queen: i32,
    pub king: Option<i32>,
    pub passed: Option<[i32; 4]>,
    pub outcome: f64,
}

impl FeatureRow {
    pub fn rescaled_delta_rating(&self) -> f64 {
        ELO_LOGIT * self.delta_rating
    }
}

/// A regression term over [`FeatureRow`]s.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    WhiteAdv,
    DeltaRating,
    Tempo,
    Pawn,
    Knight,
    Bishop,
    Rook,
    Queen,
    King,
    Passed24,
    Passed5,
    Passed6,
    Passed7,
}

impl Term {
    pub const ALL: [Term; 13] = [
        Term::WhiteAdv,
        Term::DeltaRating,
        Term::Tempo,
        Term::Pawn,
        Term::Knight,
        Term::Bishop,
        Term::Rook,
        Term::Queen,
        Term::King,
        Term::Passed24,
        Term::Passed5,
        Term::Passed6,
        Term::Passed7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Term::WhiteAdv => "white_adv",
            Term::DeltaRating => "delta_rating",
            Term::Tempo => "tempo",
            Term::Pawn => "pawn",
            Term::Knight => "knight",
            Term::Bishop => "bishop",
            Term::Rook => "rook",
            Term::Queen => "queen",
            Term::King => "king",
            Term::Passed24 => "passed_2_4",
            Term::Passed5 => "passed_5",
            Term::Passed6 => "passed_6",
            Term::Passed7 => "passed_7",
        }
    }

    /// Design-matrix value for a row; `None` when the row does not carry the term.
    pub fn value(self, row: &FeatureRow) -> Option<f64> {
        Some(match self {
            Term::WhiteAdv => 1.0,
            Term::DeltaRating => row.rescaled_delta_rating(),
            Term::Tempo => f64::from(row.tempo),
            Term::Pawn => f64::from(row.pawn),
            Term::Knight => f64::from(row.knight),
            Term::Bishop => f64::from(row.bishop),
            Term::Rook => f64::from(row.rook),
            Term::Queen => f64::from(row.queen),
            Term::King => f64::from(row.king?),
            Term::Passed24 => f64::from(row.passed?[0]),
            Term::Passed5 => f64::from(row.passed?[1]),
            Term::Passed6 => f64::from(row.passed?[2]),
            Term::Passed7 => f64::from(row.passed?[3]),
        })
    }

    /// Terms of the compact model: intercept, rating, tempo and the five piece kinds.
    pub fn compact() -> Vec<Term> {
        vec![
            Term::WhiteAdv,
            Term::DeltaRating,
            Term::Tempo,
            Term::Pawn,
            Term::Knight,
            Term::Bishop,
            Term::Rook,
            Term::Queen,
        ]
    }

    /// Compact model plus the four passed-pawn buckets.
    pub fn expanded() -> Vec<Term> {
        let mut t = Term::compact();
        t.extend([Term::Passed24, Term::Passed5, Term::Passed6, Term::Passed7]);
        t
    }

    /// Default term set for a variant's regressions.
    pub fn default_for(variant: Variant) -> Vec<Term> {
        let mut t = Term::compact();
        if variant == Variant::Antichess {
            t.push(Term::King);
        }
        t
    }

    pub fn parse_list(text: &str) -> Result<Vec<Term>, String> {
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(Term::from_str)
            .collect()
    }
}

impl FromStr for Term {
    type Err = String;

    fn from_str(s: &str) -> Result<Term, String> {
        Term::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown term {s:?}"))
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("feature table i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("feature table csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("feature table header does not match the expected column order")]
    Header,
    #[error("feature table line {line}: {message}")]
    Row { line: u64, message: String },
}

fn fmt_opt(v: Option<i32>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Formats a float so that it parses back to the same value.
pub(crate) fn fmt_f64(v: f64) -> String {
    let s = format!("{v}");
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

pub fn write_table<W: Write>(out: W, rows: &[FeatureRow]) -> Result<(), TableError> {
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(out);
    w.write_record(TABLE_COLUMNS)?;
    for r in rows {
        let passed = |i: usize| fmt_opt(r.passed.map(|p| p[i]));
        w.write_record([
            r.game.to_string(),
            r.variant.to_string(),
            r.snapshot_ply.to_string(),
            r.total_ply.to_string(),
            fmt_f64(r.delta_rating),
            r.tempo.to_string(),
            r.pawn.to_string(),
            r.knight.to_string(),
            r.bishop.to_string(),
            r.rook.to_string(),
            r.queen.to_string(),
            fmt_opt(r.king),
            passed(0),
            passed(1),
            passed(2),
            passed(3),
            fmt_f64(r.outcome),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a table written by [`write_table`]; lines starting with `#` are skipped.
pub fn read_table<R: Read>(input: R) -> Result<Vec<FeatureRow>, TableError> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(true)
        .comment(Some(b'#'))
        .from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(TABLE_COLUMNS.iter().copied()) {
        return Err(TableError::Header);
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        rows.push(parse_record(&rec).map_err(|message| TableError::Row { line, message })?);
    }
    Ok(rows)
}

fn parse_record(rec: &csv::StringRecord) -> Result<FeatureRow, String> {
    if rec.len() != TABLE_COLUMNS.len() {
        return Err(format!("expected {} fields, got {}", TABLE_COLUMNS.len(), rec.len()));
    }
    fn num<T: FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, String> {
        rec[i]
            .parse()
            .map_err(|_| format!("bad {} value {:?}", TABLE_COLUMNS[i], &rec[i]))
    }
    fn opt(rec: &csv::StringRecord, i: usize) -> Result<Option<i32>, String> {
        if rec[i].is_empty() {
            Ok(None)
        } else {
            num(rec, i).map(Some)
        }
    }
    let passed_cells = [opt(rec, 12)?, opt(rec, 13)?, opt(rec, 14)?, opt(rec, 15)?];
    let passed = match passed_cells {
        [Some(a), Some(b), Some(c), Some(d)] => Some([a, b, c, d]),
        [None, None, None, None] => None,
        _ => return Err("passed-pawn columns must be all present or all empty".into()),
    };
    let tempo: i8 = num(rec, 5)?;
    if tempo != 1 && tempo != -1 {
        return Err(format!("tempo must be 1 or -1, got {tempo}"));
    }
    let outcome: f64 = num(rec, 16)?;
    if outcome != 0.0 && outcome != 0.5 && outcome != 1.0 {
        return Err(format!("outcome must be 0, 0.5 or 1, got {outcome}"));
    }
    let delta_rating: f64 = num(rec, 4)?;
    if !delta_rating.is_finite() {
        return Err("delta_rating must be finite".into());
    }
    Ok(FeatureRow {
        game: num(rec, 0)?,
        variant: rec[1].parse()?,
        snapshot_ply: num(rec, 2)?,
        total_ply: num(rec, 3)?,
        delta_rating,
        tempo,
        pawn: num(rec, 6)?,
        knight: num(rec, 7)?,
        bishop: num(rec, 8)?,
        rook: num(rec, 9)?,
        queen: num(rec, 10)?,
        king: opt(rec, 11)?,
        passed,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row() -> FeatureRow {
        FeatureRow {
            game: 7,
            variant: Variant::Antichess,
            snapshot_ply: 12,
            total_ply: 40,
            delta_rating: -37.5,
            tempo: -1,
            pawn: 1,
            knight: 0,
            bishop: -1,
            rook: 0,
            queen: 2,
            king: Some(-1),
            passed: Some([0, 1, 0, -1]),
            outcome: 0.5,
        }
    }

    #[test]
    fn table_round_trip() {
        let mut rows = vec![row()];
        let mut r2 = row();
        r2.variant = Variant::Horde;
        r2.king = None;
        r2.passed = None;
        r2.delta_rating = 0.1 + 0.2;
        rows.push(r2);
        let mut buf = Vec::new();
        write_table(&mut buf, &rows).unwrap();
        let back = read_table(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn term_values() {
        let r = row();
        assert_eq!(Term::WhiteAdv.value(&r), Some(1.0));
        assert!((Term::DeltaRating.value(&r).unwrap() - (-37.5 * ELO_LOGIT)).abs() < 1e-15);
        assert_eq!(Term::King.value(&r), Some(-1.0));
        assert_eq!(Term::Passed7.value(&r), Some(-1.0));
        let mut h = r.clone();
        h.passed = None;
        assert_eq!(Term::Passed5.value(&h), None);
        assert_eq!(Term::parse_list("white_adv, delta_rating,queen").unwrap().len(), 3);
        assert!(Term::parse_list("bogus").is_err());
    }

    #[test]
    fn rejects_bad_rows() {
        let mut buf = Vec::new();
        write_table(&mut buf, &[row()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let bad = text.replace("\t0.5\n", "\t0.25\n");
        assert!(matches!(read_table(bad.as_bytes()), Err(TableError::Row { .. })));
        let bad = text.replacen("game", "gam", 1);
        assert!(matches!(read_table(bad.as_bytes()), Err(TableError::Header)));
    }
}
