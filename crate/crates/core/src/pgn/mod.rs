//! Game records from PGN archives in the Lichess export dialect.
//!
//! [`stream_games`] reads concatenated PGN, replays every game to validate its
//! movetext, and yields [`GameRecord`]s. Games that fail to parse or replay
//! are skipped and tallied in [`StreamStats`]; only I/O errors end the stream.

mod filter;
mod history;
mod reader;

use std::fmt;
use std::str::FromStr;

use piecevalue_rules::{parse_san, Move, Position, Variant};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use filter::{filter_games, FilterPolicy, FilterReport, GameFilter, Predicate, PolicyError};
pub use history::{HistoryError, PlayerHistoryIndex};
pub use reader::{stream_games, GameStream, RawGame, RawGameReader, StreamStats, MAX_MOVETEXT_BYTES};

/// Calendar month of play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearMonth {
    pub year: u16,
    pub month: u8,
}

impl YearMonth {
    pub fn new(year: u16, month: u8) -> Option<YearMonth> {
        (1..=12).contains(&month).then_some(YearMonth { year, month })
    }

    /// Months since January of year 0.
    pub fn ordinal(self) -> u32 {
        u32::from(self.year) * 12 + u32::from(self.month) - 1
    }

    pub fn from_ordinal(ordinal: u32) -> Option<YearMonth> {
        let year = u16::try_from(ordinal / 12).ok()?;
        Some(YearMonth {
            year,
            month: (ordinal % 12) as u8 + 1,
        })
    }

    /// Parses the date part of a PGN `Date`/`UTCDate` tag (`YYYY.MM.DD`).
    pub fn from_pgn_date(text: &str) -> Option<YearMonth> {
        let mut parts = text.split('.');
        let year = parts.next()?.parse().ok()?;
        let month = parts.next()?.parse().ok()?;
        YearMonth::new(year, month)
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = String;

    fn from_str(s: &str) -> Result<YearMonth, String> {
        let (y, m) = s.split_once('-').ok_or_else(|| format!("bad year-month {s:?}"))?;
        let year = y.parse().map_err(|_| format!("bad year in {s:?}"))?;
        let month = m.parse().map_err(|_| format!("bad month in {s:?}"))?;
        YearMonth::new(year, month).ok_or_else(|| format!("bad month in {s:?}"))
    }
}

impl TryFrom<String> for YearMonth {
    type Error = String;

    fn try_from(s: String) -> Result<YearMonth, String> {
        s.parse()
    }
}

impl From<YearMonth> for String {
    fn from(ym: YearMonth) -> String {
        ym.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Normal,
    TimeForfeit,
    Abandoned,
    Other,
}

impl Termination {
    pub fn from_tag(text: &str) -> Termination {
        match text.trim().to_ascii_lowercase().as_str() {
            "normal" => Termination::Normal,
            "time forfeit" => Termination::TimeForfeit,
            "abandoned" => Termination::Abandoned,
            _ => Termination::Other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameResult {
    WhiteWin,
    BlackWin,
    Draw,
}

impl GameResult {
    pub fn from_tag(text: &str) -> Option<GameResult> {
        match text.trim() {
            "1-0" => Some(GameResult::WhiteWin),
            "0-1" => Some(GameResult::BlackWin),
            "1/2-1/2" => Some(GameResult::Draw),
            _ => None,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            GameResult::WhiteWin => "1-0",
            GameResult::BlackWin => "0-1",
            GameResult::Draw => "1/2-1/2",
        }
    }

    /// Score from white's point of view.
    pub fn white_score(self) -> f64 {
        match self {
            GameResult::WhiteWin => 1.0,
            GameResult::BlackWin => 0.0,
            GameResult::Draw => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeControl {
    pub initial_seconds: u32,
    pub increment_seconds: u32,
}

impl TimeControl {
    /// Parses `"300+0"`. Correspondence games (`"-"`) have no clock and yield `None`.
    pub fn from_tag(text: &str) -> Option<TimeControl> {
        let (a, b) = text.trim().split_once('+')?;
        Some(TimeControl {
            initial_seconds: a.parse().ok()?,
            increment_seconds: b.parse().ok()?,
        })
    }
}

pub(crate) mod variant_serde {
    use piecevalue_rules::Variant;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Variant, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Variant, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One parsed and replay-validated game.
///
/// Serialized as one JSON object per line; field names are stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRecord {
    #[serde(with = "variant_serde")]
    pub variant: Variant,
    pub white: String,
    pub black: String,
    pub white_rating: u32,
    pub black_rating: u32,
    /// Post-game rating changes, when the archive records them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub white_rating_diff: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub black_rating_diff: Option<i32>,
    pub time_control: Option<TimeControl>,
    pub termination: Termination,
    pub result: GameResult,
    /// Starting FEN when the game did not start from the variant's standard position.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_fen: Option<String>,
    pub moves: Vec<String>,
    pub total_ply: u32,
    pub utc_month: YearMonth,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("missing tag {0}")]
    MissingTag(&'static str),
    #[error("invalid {tag} tag {value:?}")]
    BadTag { tag: &'static str, value: String },
    #[error("game is for variant {found:?}, expected {expected}")]
    VariantMismatch { found: String, expected: Variant },
    #[error("result tag {tag} disagrees with movetext result {movetext}")]
    ResultMismatch { tag: String, movetext: String },
    #[error("unfinished game")]
    Unfinished,
    #[error("bad starting position: {0}")]
    Fen(String),
    #[error("movetext: {0}")]
    Movetext(String),
    #[error("ply {ply}: {message}")]
    Replay { ply: u32, message: String },
}

impl ParseError {
    /// Short stable label for tallies.
    pub fn kind(&self) -> &'static str {
        match self {
            ParseError::MissingTag(_) => "missing_tag",
            ParseError::BadTag { .. } => "bad_tag",
            ParseError::VariantMismatch { .. } => "variant_mismatch",
            ParseError::ResultMismatch { .. } => "result_mismatch",
            ParseError::Unfinished => "unfinished",
            ParseError::Fen(_) => "bad_fen",
            ParseError::Movetext(_) => "movetext",
            ParseError::Replay { .. } => "replay",
        }
    }
}

impl GameRecord {
    /// Validates a raw game against the expected variant and replays its moves.
    pub fn from_raw(raw: &RawGame, variant: Variant) -> Result<GameRecord, ParseError> {
        if let Some(e) = &raw.syntax_error {
            return Err(ParseError::Movetext(e.clone()));
        }
        let found = raw.tag("Variant").unwrap_or("Standard");
        if Variant::from_pgn_name(found) != Some(variant) {
            return Err(ParseError::VariantMismatch {
                found: found.to_string(),
                expected: variant,
            });
        }
        let rating = |tag: &'static str| -> Result<u32, ParseError> {
            let v = raw.tag(tag).ok_or(ParseError::MissingTag(tag))?;
            v.trim()
                .parse::<u32>()
                .ok()
                .filter(|r| *r > 0)
                .ok_or_else(|| ParseError::BadTag {
                    tag,
                    value: v.to_string(),
                })
        };
        let diff = |tag: &'static str| -> Result<Option<i32>, ParseError> {
            raw.tag(tag)
                .map(|v| {
                    v.trim().parse::<i32>().map_err(|_| ParseError::BadTag {
                        tag,
                        value: v.to_string(),
                    })
                })
                .transpose()
        };
        let result_tag = raw.tag("Result").ok_or(ParseError::MissingTag("Result"))?;
        let result = match GameResult::from_tag(result_tag) {
            Some(r) => r,
            None if result_tag.trim() == "*" => return Err(ParseError::Unfinished),
            None => {
                return Err(ParseError::BadTag {
                    tag: "Result",
                    value: result_tag.to_string(),
                })
            }
        };
        if let Some(mt) = &raw.movetext_result {
            if mt != result.tag() {
                return Err(ParseError::ResultMismatch {
                    tag: result_tag.to_string(),
                    movetext: mt.clone(),
                });
            }
        }
        let date = raw
            .tag("UTCDate")
            .or_else(|| raw.tag("Date"))
            .ok_or(ParseError::MissingTag("UTCDate"))?;
        let utc_month = YearMonth::from_pgn_date(date).ok_or_else(|| ParseError::BadTag {
            tag: "UTCDate",
            value: date.to_string(),
        })?;
        let time_control = raw.tag("TimeControl").and_then(TimeControl::from_tag);
        let termination = raw
            .tag("Termination")
            .map(Termination::from_tag)
            .unwrap_or(Termination::Other);

        let start_fen = raw.tag("FEN").map(|s| s.trim().to_string());
        if variant == Variant::Chess960 && start_fen.is_none() {
            return Err(ParseError::MissingTag("FEN"));
        }
        let record = GameRecord {
            variant,
            white: raw.tag("White").unwrap_or("?").to_string(),
            black: raw.tag("Black").unwrap_or("?").to_string(),
            white_rating: rating("WhiteElo")?,
            black_rating: rating("BlackElo")?,
            white_rating_diff: diff("WhiteRatingDiff")?,
            black_rating_diff: diff("BlackRatingDiff")?,
            time_control,
            termination,
            result,
            start_fen,
            total_ply: u32::try_from(raw.moves.len())
                .map_err(|_| ParseError::Movetext("too many moves".into()))?,
            moves: raw.moves.clone(),
            utc_month,
        };
        record.replay()?;
        Ok(record)
    }

    pub fn start_position(&self) -> Result<Position, ParseError> {
        match &self.start_fen {
            Some(fen) => Position::from_fen(fen, self.variant).map_err(|e| ParseError::Fen(e.to_string())),
            None => Ok(Position::start(self.variant)),
        }
    }

    /// Replays the movetext, returning each position before its move.
    pub fn replay(&self) -> Result<Vec<(Position, Move)>, ParseError> {
        let mut pos = self.start_position()?;
        let mut out = Vec::with_capacity(self.moves.len());
        for (i, san) in self.moves.iter().enumerate() {
            let ply = i as u32 + 1;
            let mv = parse_san(&pos, san).map_err(|e| ParseError::Replay {
                ply,
                message: e.to_string(),
            })?;
            let next = pos.play(&mv).map_err(|e| ParseError::Replay {
                ply,
                message: e.to_string(),
            })?;
            out.push((pos, mv));
            pos = next;
        }
        Ok(out)
    }

    pub fn white_score(&self) -> f64 {
        self.result.white_score()
    }

    /// White minus black pre-game rating.
    pub fn delta_rating(&self) -> f64 {
        f64::from(self.white_rating) - f64::from(self.black_rating)
    }
}

/// Reads newline-delimited game records.
pub fn read_records<R: std::io::BufRead>(input: R) -> impl Iterator<Item = Result<GameRecord, String>> {
    input.lines().enumerate().filter_map(|(i, line)| match line {
        Err(e) => Some(Err(e.to_string())),
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(serde_json::from_str(&l).map_err(|e| format!("record line {}: {e}", i + 1))),
    })
}

pub fn write_record<W: std::io::Write>(mut out: W, record: &GameRecord) -> std::io::Result<()> {
    serde_json::to_writer(&mut out, record)?;
    out.write_all(b"\n")
}

fn escape_tag(value: &str) -> String {
    value.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Writes a record as PGN with Lichess-style headers.
pub fn write_pgn<W: std::io::Write>(mut out: W, record: &GameRecord) -> std::io::Result<()> {
    let date = format!("{:04}.{:02}.01", record.utc_month.year, record.utc_month.month);
    let mut tags: Vec<(&str, String)> = vec![
        ("Event", "Rated game".into()),
        ("Site", "?".into()),
        ("White", escape_tag(&record.white)),
        ("Black", escape_tag(&record.black)),
        ("Result", record.result.tag().into()),
        ("UTCDate", date),
        ("WhiteElo", record.white_rating.to_string()),
        ("BlackElo", record.black_rating.to_string()),
    ];
    if let Some(d) = record.white_rating_diff {
        tags.push(("WhiteRatingDiff", format!("{d:+}")));
    }
    if let Some(d) = record.black_rating_diff {
        tags.push(("BlackRatingDiff", format!("{d:+}")));
    }
    tags.push(("Variant", record.variant.pgn_name().into()));
    tags.push((
        "TimeControl",
        record
            .time_control
            .map_or("-".into(), |tc| format!("{}+{}", tc.initial_seconds, tc.increment_seconds)),
    ));
    tags.push((
        "Termination",
        match record.termination {
            Termination::Normal => "Normal",
            Termination::TimeForfeit => "Time forfeit",
            Termination::Abandoned => "Abandoned",
            Termination::Other => "Rules infraction",
        }
        .into(),
    ));
    if let Some(fen) = &record.start_fen {
        tags.push(("FEN", escape_tag(fen)));
        tags.push(("SetUp", "1".into()));
    }
    for (k, v) in tags {
        writeln!(out, "[{k} \"{v}\"]")?;
    }
    writeln!(out)?;
    let black_first = record
        .start_position()
        .map(|p| p.turn() == piecevalue_rules::Color::Black)
        .unwrap_or(false);
    let mut line = String::new();
    for (i, san) in record.moves.iter().enumerate() {
        let ply = i + usize::from(black_first);
        if ply % 2 == 0 {
            line.push_str(&format!("{}. ", ply / 2 + 1));
        } else if i == 0 {
            line.push_str(&format!("{}... ", ply / 2 + 1));
        }
        line.push_str(san);
        line.push(' ');
        if line.len() > 72 {
            writeln!(out, "{}", line.trim_end())?;
            line.clear();
        }
    }
    line.push_str(record.result.tag());
    writeln!(out, "{line}")?;
    writeln!(out)
}
