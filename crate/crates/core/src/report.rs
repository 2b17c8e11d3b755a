//! Tables built from fitted coefficients: values relative to a pawn,
//! rounded handicap values, per-ply curves and historical value systems.
//! Every artifact starts with an [`ArtifactHeader`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::glm::RegressionFit;
use crate::simex::CalibratedFit;
use piecevalue_rules::Variant;

/// Relative values are refused when the pawn is worth less than this (Elo).
pub const PAWN_NEAR_ZERO: f64 = 1.0;
pub const EQUALIZER_STEP: f64 = 25.0;
/// Terms divided by the pawn in relative tables, in display order.
pub const RELATIVE_TERMS: [&str; 5] = ["knight", "bishop", "rook", "queen", "king"];
pub const PIECE_TERMS: [&str; 6] = ["pawn", "knight", "bishop", "rook", "queen", "king"];

pub const EQUALIZER_CAVEAT: &str = "Handicapping with these values ignores any positional imbalance the removal causes; \
removing a pawn, for instance, frees lines for other pieces. Prefer removing pieces other than pawns, and only when the \
skill gap is large.";
pub const NEGATIVE_PAWN_NOTE: &str = "The pawn coefficient is negative, so ratios divide by a negative number: a \
positive ratio means the piece hurts its owner about as a pawn does.";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("no pawn term in the fit")]
    NoPawn,
    #[error("pawn coefficient {pawn:.3} is too close to zero for ratios")]
    PawnNearZero { pawn: f64 },
    #[error("need at least {needed} ranged fits, got {got}")]
    TooFewRanges { needed: usize, got: usize },
}

/// Named coefficients in quoted units.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Coefficients {
    pub terms: Vec<String>,
    pub values: Vec<f64>,
}

impl Coefficients {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, f64)>) -> Coefficients {
        let (terms, values) = pairs.into_iter().map(|(t, v)| (t.into(), v)).unzip();
        Coefficients { terms, values }
    }

    pub fn get(&self, term: &str) -> Option<f64> {
        self.terms.iter().position(|t| t == term).map(|i| self.values[i])
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Linear predictor (Elo) at the covariate values given; absent terms count as zero.
    pub fn evaluate(&self, at: &[(&str, f64)]) -> f64 {
        at.iter().map(|(t, x)| self.get(t).unwrap_or(0.0) * x).sum()
    }
}

impl From<&CalibratedFit> for Coefficients {
    fn from(fit: &CalibratedFit) -> Coefficients {
        Coefficients {
            terms: fit.terms.clone(),
            values: fit.coefficients.clone(),
        }
    }
}

impl From<&RegressionFit> for Coefficients {
    fn from(fit: &RegressionFit) -> Coefficients {
        Coefficients {
            terms: fit.terms.clone(),
            values: fit.coefficients.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeRow {
    pub term: String,
    pub raw: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeTable {
    pub pawn: f64,
    pub rows: Vec<RelativeRow>,
    pub notes: Vec<String>,
}

impl RelativeTable {
    pub fn ratio(&self, term: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.term == term).map(|r| r.ratio)
    }
}

/// Piece coefficients divided by the pawn coefficient, sign kept.
pub fn relative_values(fit: &Coefficients, variant: Variant) -> Result<RelativeTable, ReportError> {
    let pawn = fit.get("pawn").ok_or(ReportError::NoPawn)?;
    if pawn.abs() < PAWN_NEAR_ZERO {
        return Err(ReportError::PawnNearZero { pawn });
    }
    let rows = RELATIVE_TERMS
        .iter()
        .filter_map(|t| {
            fit.get(t).map(|raw| RelativeRow {
                term: t.to_string(),
                raw,
                ratio: raw / pawn,
            })
        })
        .collect();
    let mut notes = Vec::new();
    if pawn < 0.0 {
        notes.push(NEGATIVE_PAWN_NOTE.to_string());
    }
    if variant == Variant::Antichess {
        notes.push("In Antichess the aim is to lose all material, so piece values are mostly negative.".to_string());
    }
    Ok(RelativeTable { pawn, rows, notes })
}

/// Rounds to the nearest multiple of `step`, halves away from zero.
pub fn round_to(value: f64, step: f64) -> f64 {
    (value / step).round() * step
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualizerRow {
    pub term: String,
    pub raw: f64,
    pub rounded: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EqualizerTable {
    pub rows: Vec<EqualizerRow>,
    pub caveat: &'static str,
}

/// Piece values rounded to 25 points, for handicapping mismatched players.
pub fn equalizers(early: &Coefficients) -> EqualizerTable {
    let rows = PIECE_TERMS
        .iter()
        .filter_map(|t| {
            early.get(t).map(|raw| EqualizerRow {
                term: t.to_string(),
                raw,
                rounded: round_to(raw, EQUALIZER_STEP),
            })
        })
        .collect();
    EqualizerTable {
        rows,
        caveat: EQUALIZER_CAVEAT,
    }
}

/// One fit over a ply range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangedFit {
    pub lo: f64,
    pub hi: f64,
    pub mean_ply: f64,
    pub rows: usize,
    pub coefficients: Coefficients,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlyCurveRow {
    pub lo: f64,
    pub hi: f64,
    pub mean_ply: f64,
    pub term: String,
    pub raw: f64,
    /// Raw value over the absolute pawn value of the same range.
    pub relative: Option<f64>,
}

/// Long-format table of every term across ranges, raw and relative to |pawn|.
pub fn ply_curves(fits: &[RangedFit]) -> Vec<PlyCurveRow> {
    let mut out = Vec::new();
    for f in fits {
        let pawn = f.coefficients.get("pawn").map(f64::abs).filter(|p| *p >= PAWN_NEAR_ZERO);
        for (term, raw) in f.coefficients.terms.iter().zip(&f.coefficients.values) {
            out.push(PlyCurveRow {
                lo: f.lo,
                hi: f.hi,
                mean_ply: f.mean_ply,
                term: term.clone(),
                raw: *raw,
                relative: pawn.map(|p| raw / p),
            });
        }
    }
    out
}

/// Covariates of the Horde starting position: white has 28 more pawns,
/// black has two knights, bishops and rooks and a queen, and white moves.
pub const HORDE_OPENING: [(&str, f64); 7] = [
    ("white_adv", 1.0),
    ("tempo", 1.0),
    ("pawn", 28.0),
    ("knight", -2.0),
    ("bishop", -2.0),
    ("rook", -2.0),
    ("queen", -1.0),
];

/// A historical value system, in pawns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistoricalSystem {
    pub source: &'static str,
    pub year: Option<u16>,
    /// Knight, bishop, rook, queen.
    pub values: [f64; 4],
}

const fn hist(source: &'static str, year: u16, n: f64, b: f64, r: f64, q: f64) -> HistoricalSystem {
    HistoricalSystem {
        source,
        year: if year == 0 { None } else { Some(year) },
        values: [n, b, r, q],
    }
}

pub const HISTORICAL_SYSTEMS: [HistoricalSystem; 28] = [
    hist("Mobility", 0, 3.00, 5.00, 8.00, 13.00),
    hist("Modenese", 1750, 3.00, 3.00, 5.00, 9.00),
    hist("Sarratt", 1813, 3.10, 3.30, 5.00, 7.90),
    hist("Philidor", 1817, 3.05, 3.50, 5.48, 9.94),
    hist("Peter Pratt", 1833, 3.00, 3.00, 5.00, 10.00),
    hist("Bilguer", 1843, 3.50, 3.50, 5.70, 10.30),
    hist("Tomlinson", 1845, 3.05, 3.50, 5.48, 9.94),
    hist("Lasker", 1934, 3.00, 3.00, 5.00, 9.50),
    hist("Maizelis", 1936, 3.50, 3.50, 5.00, 9.75),
    hist("Fine", 1942, 3.00, 3.00, 5.00, 9.00),
    hist("Euwe", 1944, 3.50, 3.50, 5.50, 10.00),
    hist("Lasker", 1947, 3.50, 3.50, 5.00, 8.50),
    hist("Horowitz", 1951, 3.00, 3.10, 5.00, 9.00),
    hist("Turing", 1953, 3.00, 3.50, 5.00, 10.00),
    hist("Evans", 1958, 3.50, 3.62, 5.00, 10.00),
    hist("Styeklov", 1961, 3.50, 3.50, 5.00, 9.50),
    hist("Fischer", 1972, 3.00, 3.25, 5.00, 9.00),
    hist("Euwe", 1974, 3.00, 3.00, 4.25, 8.50),
    hist("Kasparov", 1986, 3.00, 3.15, 4.50, 9.00),
    hist("Soviet chess encyclopedia", 1990, 3.00, 3.00, 5.00, 9.50),
    hist("Hooper and Whyld", 1992, 4.00, 3.50, 7.00, 13.50),
    hist("Berliner", 1999, 3.20, 3.33, 5.10, 8.80),
    hist("Kaufman", 1999, 3.25, 3.25, 5.00, 9.75),
    hist("Kaufman", 2011, 3.50, 3.50, 5.25, 10.00),
    hist("Kurzdorfer", 2003, 3.50, 3.50, 5.00, 9.00),
    hist("Soltis", 2004, 3.00, 3.00, 4.50, 9.00),
    hist("Yevgeny Gik", 2004, 2.40, 4.00, 6.40, 10.40),
    hist("AlphaZero", 2020, 3.05, 3.33, 5.63, 9.50),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub source: String,
    pub year: Option<u16>,
    pub values: [f64; 4],
}

/// Historical systems, preceded by the fitted ratios when there are any.
pub fn compare_historical(fitted: Option<(&str, &RelativeTable)>) -> Vec<ComparisonRow> {
    let mut rows = Vec::with_capacity(HISTORICAL_SYSTEMS.len() + 1);
    if let Some((label, table)) = fitted {
        let v = |t: &str| table.ratio(t).unwrap_or(f64::NAN);
        if !table.rows.is_empty() {
            rows.push(ComparisonRow {
                source: label.to_string(),
                year: None,
                values: [v("knight"), v("bishop"), v("rook"), v("queen")],
            });
        }
    }
    rows.extend(HISTORICAL_SYSTEMS.iter().map(|h| ComparisonRow {
        source: h.source.to_string(),
        year: h.year,
        values: h.values,
    }));
    rows
}

/// Provenance written at the top of every artifact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArtifactHeader {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub row_counts: BTreeMap<String, u64>,
}

impl ArtifactHeader {
    pub fn new(config_hash: &str, seed: u64) -> ArtifactHeader {
        ArtifactHeader {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config_hash.to_string(),
            seed,
            row_counts: BTreeMap::new(),
        }
    }

    pub fn with_rows(mut self, name: &str, count: u64) -> ArtifactHeader {
        self.row_counts.insert(name.to_string(), count);
        self
    }

    /// `#`-prefixed lines; deterministic for equal headers.
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {} {}", self.tool, self.version);
        let _ = writeln!(s, "# config_hash: {}", self.config_hash);
        let _ = writeln!(s, "# seed: {}", self.seed);
        for (k, v) in &self.row_counts {
            let _ = writeln!(s, "# rows.{k}: {v}");
        }
        s
    }
}

/// Formats a float for delimited output: fixed significant digits, no `-0`.
pub fn fmt_value(v: f64) -> String {
    if !v.is_finite() {
        return "NA".to_string();
    }
    let v = if v == 0.0 { 0.0 } else { v };
    let digits = if v.abs() >= 1.0 { 6 } else { 8 };
    let s = format!("{v:.digits$}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Writes a tab-separated table after the header.
pub fn write_tsv<W: Write>(mut out: W, header: &ArtifactHeader, columns: &[&str], rows: &[Vec<String>]) -> io::Result<()> {
    out.write_all(header.render().as_bytes())?;
    writeln!(out, "{}", columns.join("\t"))?;
    for r in rows {
        writeln!(out, "{}", r.join("\t"))?;
    }
    Ok(())
}

pub fn relative_rows(table: &RelativeTable) -> Vec<Vec<String>> {
    table
        .rows
        .iter()
        .map(|r| vec![r.term.clone(), fmt_value(r.raw), fmt_value(r.ratio)])
        .collect()
}

pub fn equalizer_rows(table: &EqualizerTable) -> Vec<Vec<String>> {
    table
        .rows
        .iter()
        .map(|r| vec![r.term.clone(), fmt_value(r.raw), fmt_value(r.rounded)])
        .collect()
}

pub fn ply_curve_rows(rows: &[PlyCurveRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            vec![
                fmt_value(r.lo),
                fmt_value(r.hi),
                fmt_value(r.mean_ply),
                r.term.clone(),
                fmt_value(r.raw),
                r.relative.map_or_else(|| "NA".to_string(), fmt_value),
            ]
        })
        .collect()
}

pub fn comparison_rows(rows: &[ComparisonRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            let mut v = vec![r.source.clone(), r.year.map_or_else(String::new, |y| y.to_string())];
            v.extend(r.values.iter().map(|x| fmt_value(*x)));
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_random() -> Coefficients {
        Coefficients::new([
            ("pawn", 67.6),
            ("knight", 195.0),
            ("bishop", 214.0),
            ("rook", 311.0),
            ("queen", 650.0),
        ])
    }

    #[test]
    fn ratio_times_pawn_is_raw() {
        let t = relative_values(&standard_random(), Variant::Standard).unwrap();
        for r in &t.rows {
            assert!((r.ratio * t.pawn - r.raw).abs() < 1e-9);
        }
        assert!(t.notes.is_empty());
    }

    #[test]
    fn equal_coefficients_give_unit_ratios() {
        let c = Coefficients::new(PIECE_TERMS.map(|t| (t, 80.0)));
        let t = relative_values(&c, Variant::Standard).unwrap();
        assert!(t.rows.iter().all(|r| r.ratio == 1.0));
    }

    #[test]
    fn small_pawn_is_refused() {
        let c = Coefficients::new([("pawn", 0.5), ("knight", 100.0)]);
        assert!(matches!(relative_values(&c, Variant::Standard), Err(ReportError::PawnNearZero { .. })));
        assert!(matches!(
            relative_values(&Coefficients::new([("knight", 1.0)]), Variant::Standard),
            Err(ReportError::NoPawn)
        ));
    }

    #[test]
    fn rounding_boundary() {
        assert_eq!(round_to(112.4, 25.0), 100.0);
        assert_eq!(round_to(112.6, 25.0), 125.0);
        assert_eq!(round_to(-37.4, 25.0), -25.0);
    }

    #[test]
    fn single_range_curve_has_one_row_per_term() {
        let f = RangedFit {
            lo: 10.0,
            hi: 19.5,
            mean_ply: 14.3,
            rows: 100,
            coefficients: standard_random(),
        };
        let rows = ply_curves(std::slice::from_ref(&f));
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].relative, Some(1.0));
    }

    #[test]
    fn header_is_deterministic() {
        let h = ArtifactHeader::new("abc", 7).with_rows("games", 3).with_rows("fit", 2);
        assert_eq!(h.render(), h.clone().render());
        assert!(h.render().contains("# rows.fit: 2\n# rows.games: 3\n"));
    }

    #[test]
    fn value_formatting() {
        assert_eq!(fmt_value(-0.0), "0");
        assert_eq!(fmt_value(2.5), "2.5");
        assert_eq!(fmt_value(f64::NAN), "NA");
        assert_eq!(fmt_value(1.0 / 3.0), "0.33333333");
    }

    #[test]
    fn comparison_without_fit_is_the_historical_table() {
        assert_eq!(compare_historical(None).len(), 28);
    }
}
