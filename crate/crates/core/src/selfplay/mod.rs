//! Engine self-play from ablated openings.
//!
//! A [`MatchSpec`] fixes the opening, the pieces removed from it and the
//! nominal strengths of both engines. [`run_matches`] plays the games,
//! appending each result to a [`Ledger`] as it finishes; [`fit_selfplay`]
//! regresses outcomes on strength settings and material.

mod engine;
mod ledger;

use std::collections::{BTreeSet, HashMap};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::glm::{self, Design, GlmError, Quote, RegressionFit};
use piecevalue_rules::{parse_uci, Color, Outcome, Piece, Position, Role, Square, Variant};

pub use engine::{serve_uci, Engine, EngineError, MockEngine, MockPolicy, SearchLimits, UciEngine};
pub use ledger::{parse_ledger, Ledger, LedgerEntry, LedgerError};

/// Nominal engine strengths; the first is the implicit base level.
pub const STRENGTHS: [u32; 4] = [1600, 2000, 2400, 2800];
/// Games longer than this are adjudicated drawn.
pub const DEFAULT_MAX_PLY: u32 = 400;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("spec file: {0}")]
    Parse(String),
    #[error("invalid spec: {0}")]
    Invalid(String),
}

/// A piece taken off the opening position, e.g. `b1` / `N`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Removal {
    pub square: String,
    /// FEN letter: upper case for white.
    pub piece: char,
}

impl Removal {
    pub fn parse(square: &str, piece: char) -> Result<(Square, Piece), SpecError> {
        let sq: Square = square
            .parse()
            .map_err(|_| SpecError::Invalid(format!("bad square {square:?}")))?;
        let p = Piece::from_fen_char(piece).ok_or_else(|| SpecError::Invalid(format!("bad piece letter {piece:?}")))?;
        Ok((sq, p))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchSpec {
    /// `standard` or `chess960`.
    #[serde(with = "crate::pgn::variant_serde")]
    pub variant: Variant,
    /// Chess960 starting position number (0..=959); ignored for standard chess.
    #[serde(default)]
    pub opening: u16,
    #[serde(default)]
    pub ablation: Vec<Removal>,
    pub white_strength: u32,
    pub black_strength: u32,
    #[serde(default = "default_move_time")]
    pub move_time_secs: f64,
    #[serde(default = "default_depth")]
    pub depth: u32,
    pub games: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_max_ply")]
    pub max_ply: u32,
}

fn default_move_time() -> f64 {
    5.0
}

fn default_depth() -> u32 {
    7
}

fn default_max_ply() -> u32 {
    DEFAULT_MAX_PLY
}

impl MatchSpec {
    pub fn from_toml_str(text: &str) -> Result<MatchSpec, SpecError> {
        let spec: MatchSpec = toml::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn base_position(&self) -> Result<Position, SpecError> {
        match self.variant {
            Variant::Standard => Ok(Position::start(Variant::Standard)),
            Variant::Chess960 => {
                Position::chess960(self.opening).ok_or_else(|| SpecError::Invalid(format!("opening {} out of range", self.opening)))
            }
            v => Err(SpecError::Invalid(format!("self-play supports standard and chess960, not {v}"))),
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        let base = self.base_position()?;
        for s in [self.white_strength, self.black_strength] {
            if !STRENGTHS.contains(&s) {
                return Err(SpecError::Invalid(format!("strength {s} not one of {STRENGTHS:?}")));
            }
        }
        if !(self.move_time_secs > 0.0 && self.move_time_secs.is_finite()) || self.depth == 0 || self.max_ply == 0 {
            return Err(SpecError::Invalid("move time, depth and max ply must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        for r in &self.ablation {
            let (sq, p) = Removal::parse(&r.square, r.piece)?;
            if p.role == Role::King {
                return Err(SpecError::Invalid(format!("cannot remove the king on {sq}")));
            }
            if base.piece_at(sq) != Some(p) {
                return Err(SpecError::Invalid(format!("{} is not on {sq} in the opening", r.piece)));
            }
            if !seen.insert(sq) {
                return Err(SpecError::Invalid(format!("{sq} removed twice")));
            }
        }
        Ok(())
    }

    /// The opening with the ablated pieces removed.
    pub fn opening_position(&self) -> Result<Position, SpecError> {
        self.validate()?;
        let mut pos = self.base_position()?;
        for r in &self.ablation {
            let (sq, _) = Removal::parse(&r.square, r.piece)?;
            pos.remove_piece(sq);
        }
        Ok(pos)
    }

    /// Hex SHA-256 of the canonical JSON form; keys ledger entries.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.ablation.sort();
        if canonical.variant != Variant::Chess960 {
            canonical.opening = 0;
        }
        let json = serde_json::to_string(&canonical).expect("spec serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn limits(&self) -> SearchLimits {
        SearchLimits {
            move_time: Duration::from_secs_f64(self.move_time_secs),
            depth: self.depth,
        }
    }
}

/// How a game ended.
#[derive(Debug, Clone, PartialEq)]
pub enum GameEnd {
    Finished { score: f64, plies: u32, reason: &'static str },
    Void { reason: String, plies: u32 },
}

/// Plays one game between two engines from `start`.
pub fn play_game(start: &Position, white: &mut dyn Engine, black: &mut dyn Engine, limits: &SearchLimits, max_ply: u32) -> GameEnd {
    let variant = start.variant();
    if let Err(err) = white.new_game(variant).and_then(|_| black.new_game(variant)) {
        return GameEnd::Void {
            reason: err.to_string(),
            plies: 0,
        };
    }
    let start_fen = start.to_fen();
    let mut pos = *start;
    let mut moves: Vec<String> = Vec::new();
    let mut seen: HashMap<String, u32> = HashMap::new();
    *seen.entry(pos.short_fen()).or_default() += 1;
    let plies = |m: &Vec<String>| m.len() as u32;
    loop {
        if let Some(outcome) = pos.outcome() {
            let score = match outcome {
                Outcome::Decisive { winner: Color::White } => 1.0,
                Outcome::Decisive { winner: Color::Black } => 0.0,
                Outcome::Draw => 0.5,
            };
            let reason = if score == 0.5 { "stalemate" } else { "checkmate" };
            return GameEnd::Finished {
                score,
                plies: plies(&moves),
                reason,
            };
        }
        let draw = if pos.halfmove_clock() >= 100 {
            Some("fifty-move rule")
        } else if seen.get(&pos.short_fen()).copied().unwrap_or(0) >= 3 {
            Some("threefold repetition")
        } else if pos.insufficient_material() {
            Some("insufficient material")
        } else if plies(&moves) >= max_ply {
            Some("move cap")
        } else {
            None
        };
        if let Some(reason) = draw {
            return GameEnd::Finished {
                score: 0.5,
                plies: plies(&moves),
                reason,
            };
        }
        let engine: &mut dyn Engine = if pos.turn() == Color::White { &mut *white } else { &mut *black };
        let text = match engine.best_move(&start_fen, &moves, limits) {
            Ok(t) => t,
            Err(e) => {
                return GameEnd::Void {
                    reason: e.to_string(),
                    plies: plies(&moves),
                }
            }
        };
        let next = parse_uci(&pos, &text)
            .map_err(|e| e.to_string())
            .and_then(|mv| pos.play_strict(&mv).map_err(|e| e.to_string()));
        match next {
            Ok(p) => pos = p,
            Err(e) => {
                return GameEnd::Void {
                    reason: format!("illegal engine move {text}: {e}"),
                    plies: plies(&moves),
                }
            }
        }
        moves.push(text);
        *seen.entry(pos.short_fen()).or_default() += 1;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunSummary {
    pub scheduled: u32,
    /// Games already in the ledger and skipped.
    pub resumed: u32,
    pub played: u32,
    pub voided: u32,
}

/// Plays the spec's games, appending every result to `ledger`. Games already
/// recorded for this spec are skipped, so an interrupted run can be resumed.
pub fn run_matches(spec: &MatchSpec, white: &mut dyn Engine, black: &mut dyn Engine, ledger: &mut Ledger) -> Result<RunSummary, LedgerError> {
    let start = spec.opening_position().map_err(|e| LedgerError::Spec(e.to_string()))?;
    let hash = spec.hash();
    let done = ledger.recorded_games(&hash);
    let limits = spec.limits();
    let mut summary = RunSummary {
        scheduled: spec.games,
        ..RunSummary::default()
    };
    for game in 0..spec.games {
        if done.contains(&game) {
            summary.resumed += 1;
            continue;
        }
        let end = play_game(&start, white, black, &limits, spec.max_ply);
        let entry = LedgerEntry::new(spec, &hash, game, &end);
        if entry.outcome.is_none() {
            log::warn!("game {game} voided: {}", entry.note);
            summary.voided += 1;
        } else {
            summary.played += 1;
        }
        ledger.append(&entry)?;
    }
    Ok(summary)
}

/// One finished game as regression input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfPlayRow {
    pub outcome: f64,
    pub white_strength: u32,
    pub black_strength: u32,
    /// Material differences, white minus black: pawn, knight, bishop, rook, queen.
    pub material: [i32; 5],
    /// Removed opening pieces.
    pub removed: Vec<Removal>,
}

impl SelfPlayRow {
    /// Strength variables for 2000, 2400 and 2800: white indicator minus black indicator.
    pub fn strength_vars(&self) -> [f64; 3] {
        let ind = |s: u32, level: u32| f64::from(u8::from(s == level));
        [2000, 2400, 2800].map(|l| ind(self.white_strength, l) - ind(self.black_strength, l))
    }

    /// Per-square variable: −1 if a white piece was removed from `square`,
    /// +1 for a black piece, 0 otherwise.
    pub fn square_var(&self, square: &str) -> f64 {
        self.removed
            .iter()
            .find(|r| r.square == square)
            .map_or(0.0, |r| if r.piece.is_ascii_uppercase() { -1.0 } else { 1.0 })
    }

    pub fn from_entry(entry: &LedgerEntry) -> Option<SelfPlayRow> {
        let outcome = entry.outcome?;
        let mut material = [0i32; 5];
        for r in &entry.removed {
            let p = Piece::from_fen_char(r.piece)?;
            let idx = match p.role {
                Role::Pawn => 0,
                Role::Knight => 1,
                Role::Bishop => 2,
                Role::Rook => 3,
                Role::Queen => 4,
                Role::King => return None,
            };
            material[idx] += if p.color == Color::White { -1 } else { 1 };
        }
        Some(SelfPlayRow {
            outcome,
            white_strength: entry.white_strength,
            black_strength: entry.black_strength,
            material,
            removed: entry.removed.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitShape {
    /// White advantage and strength variables.
    EngineOnly,
    /// White advantage and material, equal-strength games only.
    EqualEnginesPieces,
    /// White advantage, strength variables and material.
    Full,
    /// White advantage, strength variables and one variable per ablated square.
    PerSquare,
}

impl std::str::FromStr for FitShape {
    type Err = String;

    fn from_str(s: &str) -> Result<FitShape, String> {
        Ok(match s {
            "engine-only" | "engine_only" => FitShape::EngineOnly,
            "equal-engines-pieces" | "equal_engines_pieces" => FitShape::EqualEnginesPieces,
            "full" => FitShape::Full,
            "per-square" | "per_square" => FitShape::PerSquare,
            _ => return Err(format!("unknown fit shape {s:?}")),
        })
    }
}

#[derive(Debug, Error)]
pub enum SelfPlayFitError {
    #[error("term {0} does not vary across the rows")]
    InsufficientVariation(String),
    #[error(transparent)]
    Glm(#[from] GlmError),
}

const PIECE_TERMS: [&str; 5] = ["pawn", "knight", "bishop", "rook", "queen"];
const STRENGTH_TERMS: [&str; 3] = ["elo2000", "elo2400", "elo2800"];

/// Design matrix for a shape; rows not used by the shape are left out.
pub fn selfplay_design(rows: &[SelfPlayRow], shape: FitShape) -> Result<Design, SelfPlayFitError> {
    let rows: Vec<&SelfPlayRow> = match shape {
        FitShape::EqualEnginesPieces => rows.iter().filter(|r| r.white_strength == r.black_strength).collect(),
        _ => rows.iter().collect(),
    };
    let squares: Vec<String> = if shape == FitShape::PerSquare {
        let set: BTreeSet<(u8, String)> = rows
            .iter()
            .flat_map(|r| r.removed.iter())
            .filter_map(|r| r.square.parse::<Square>().ok().map(|sq| (sq.index() as u8, r.square.clone())))
            .collect();
        set.into_iter().map(|(_, s)| s).collect()
    } else {
        Vec::new()
    };
    let mut names = vec!["white_adv".to_string()];
    if shape != FitShape::EqualEnginesPieces {
        names.extend(STRENGTH_TERMS.iter().map(|s| s.to_string()));
    }
    if matches!(shape, FitShape::EqualEnginesPieces | FitShape::Full) {
        names.extend(PIECE_TERMS.iter().map(|s| s.to_string()));
    }
    names.extend(squares.iter().map(|s| format!("sq_{s}")));
    let mut design = Design::new(names.clone(), vec![Quote::Elo; names.len()]);
    let mut x = Vec::with_capacity(names.len());
    for r in &rows {
        x.clear();
        x.push(1.0);
        if shape != FitShape::EqualEnginesPieces {
            x.extend(r.strength_vars());
        }
        if matches!(shape, FitShape::EqualEnginesPieces | FitShape::Full) {
            x.extend(r.material.iter().map(|v| f64::from(*v)));
        }
        x.extend(squares.iter().map(|s| r.square_var(s)));
        design.push(&x, r.outcome)?;
    }
    for (j, name) in names.iter().enumerate().skip(1) {
        let col = design.column(j);
        if col.windows(2).all(|w| w[0] == w[1]) {
            return Err(SelfPlayFitError::InsufficientVariation(name.clone()));
        }
    }
    Ok(design)
}

pub fn fit_selfplay(rows: &[SelfPlayRow], shape: FitShape) -> Result<RegressionFit, SelfPlayFitError> {
    Ok(glm::fit(&selfplay_design(rows, shape)?)?)
}


/// Ground truth for [`synthetic_rows`], all in Elo. Defaults follow the
/// full-shape fit on standard-chess engine games.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSelfPlay {
    pub games: usize,
    pub white_advantage: f64,
    /// Effects of the 2000, 2400 and 2800 settings over 1600.
    pub strength_effects: [f64; 3],
    /// Pawn, knight, bishop, rook and queen values.
    pub piece_values: [f64; 5],
    pub draw_rate: f64,
    pub seed: u64,
}

impl Default for SyntheticSelfPlay {
    fn default() -> SyntheticSelfPlay {
        SyntheticSelfPlay {
            games: 100_000,
            white_advantage: 14.0,
            strength_effects: [251.0, 520.0, 658.0],
            piece_values: [93.0, 250.0, 274.0, 333.0, 460.0],
            draw_rate: 0.2,
            seed: 0,
        }
    }
}

/// Removals used by [`synthetic_rows`]: one piece of each type per side.
const SYNTHETIC_REMOVALS: [(&str, char); 10] = [
    ("e2", 'P'),
    ("b1", 'N'),
    ("c1", 'B'),
    ("a1", 'R'),
    ("d1", 'Q'),
    ("e7", 'p'),
    ("b8", 'n'),
    ("c8", 'b'),
    ("a8", 'r'),
    ("d8", 'q'),
];

/// Self-play rows with outcomes drawn from a known logistic model, for
/// checking the regression without an engine.
pub fn synthetic_rows(cfg: &SyntheticSelfPlay) -> Vec<SelfPlayRow> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.games)
        .map(|_| {
            let white_strength = STRENGTHS[rng.random_range(0..STRENGTHS.len())];
            let black_strength = STRENGTHS[rng.random_range(0..STRENGTHS.len())];
            let removed: Vec<Removal> = SYNTHETIC_REMOVALS
                .iter()
                .filter(|_| rng.random_bool(0.15))
                .map(|(sq, p)| Removal {
                    square: sq.to_string(),
                    piece: *p,
                })
                .collect();
            let entry = LedgerEntry {
                spec_hash: String::new(),
                game: 0,
                white_strength,
                black_strength,
                removed,
                outcome: Some(0.0),
                plies: 0,
                note: String::new(),
            };
            let mut row = SelfPlayRow::from_entry(&entry).expect("valid removal");
            let s = row.strength_vars();
            let edge = cfg.white_advantage
                + s.iter().zip(&cfg.strength_effects).map(|(a, b)| a * b).sum::<f64>()
                + row.material.iter().zip(&cfg.piece_values).map(|(m, v)| f64::from(*m) * v).sum::<f64>();
            let p = glm::logistic(crate::ELO_LOGIT * edge);
            let draw = cfg.draw_rate.min(2.0 * p.min(1.0 - p));
            let u: f64 = rng.random();
            row.outcome = if u < p - draw / 2.0 {
                1.0
            } else if u < p + draw / 2.0 {
                0.5
            } else {
                0.0
            };
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(ablation: Vec<Removal>) -> MatchSpec {
        MatchSpec {
            variant: Variant::Standard,
            opening: 0,
            ablation,
            white_strength: 2000,
            black_strength: 1600,
            move_time_secs: 5.0,
            depth: 7,
            games: 10,
            seed: 0,
            max_ply: 100,
        }
    }

    #[test]
    fn validation() {
        let ok = spec(vec![Removal {
            square: "b1".into(),
            piece: 'N',
        }]);
        ok.validate().unwrap();
        let pos = ok.opening_position().unwrap();
        assert_eq!(pos.material_counts().delta().knight, -1);
        let king = spec(vec![Removal {
            square: "e1".into(),
            piece: 'K',
        }]);
        assert!(king.validate().is_err());
        let empty = spec(vec![Removal {
            square: "e4".into(),
            piece: 'P',
        }]);
        assert!(empty.validate().is_err());
        let mut bad = spec(vec![]);
        bad.white_strength = 1800;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn removing_a_rook_drops_its_castling_right() {
        let s = spec(vec![Removal {
            square: "h1".into(),
            piece: 'R',
        }]);
        let fen = s.opening_position().unwrap().to_fen();
        assert!(fen.contains(" Qkq "), "{fen}");
    }

    #[test]
    fn hash_ignores_ablation_order() {
        let a = spec(vec![
            Removal {
                square: "b1".into(),
                piece: 'N',
            },
            Removal {
                square: "a7".into(),
                piece: 'p',
            },
        ]);
        let mut b = a.clone();
        b.ablation.reverse();
        assert_eq!(a.hash(), b.hash());
        let mut c = a.clone();
        c.games = 11;
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn strength_encoding_sums_to_zero() {
        for w in STRENGTHS {
            for b in STRENGTHS {
                let r = SelfPlayRow {
                    outcome: 0.5,
                    white_strength: w,
                    black_strength: b,
                    material: [0; 5],
                    removed: vec![],
                };
                let v = r.strength_vars();
                let base = f64::from(u8::from(w == 1600)) - f64::from(u8::from(b == 1600));
                assert_eq!(v.iter().sum::<f64>() + base, 0.0);
            }
        }
    }

    #[test]
    fn mock_games_finish_and_resume() {
        let mut s = spec(vec![]);
        s.games = 3;
        s.max_ply = 60;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("l.jsonl");
        let mut w = MockEngine::new(MockPolicy::Random { seed: 1 });
        let mut b = MockEngine::new(MockPolicy::FirstLegal);
        let mut ledger = Ledger::open(&path).unwrap();
        let first = run_matches(&s, &mut w, &mut b, &mut ledger).unwrap();
        assert_eq!(first.played, 3);
        for e in ledger.entries() {
            assert!(e.plies <= 60);
            assert!(e.outcome.is_some());
        }
        s.games = 5;
        drop(ledger);
        let mut ledger = Ledger::open(&path).unwrap();
        let again = run_matches(&s, &mut w, &mut b, &mut ledger).unwrap();
        // A different game count is a different spec.
        assert_eq!(again.resumed, 0);
        let third = run_matches(&s, &mut w, &mut b, &mut ledger).unwrap();
        assert_eq!((third.resumed, third.played), (5, 0));
    }

    struct Illegal;

    impl Engine for Illegal {
        fn new_game(&mut self, _: Variant) -> Result<(), EngineError> {
            Ok(())
        }

        fn best_move(&mut self, _: &str, _: &[String], _: &SearchLimits) -> Result<String, EngineError> {
            Ok("e2e5".into())
        }
    }

    #[test]
    fn illegal_move_voids_the_game() {
        let start = Position::start(Variant::Standard);
        let limits = spec(vec![]).limits();
        let end = play_game(&start, &mut Illegal, &mut MockEngine::new(MockPolicy::FirstLegal), &limits, 10);
        assert!(matches!(end, GameEnd::Void { plies: 0, .. }), "{end:?}");
    }

    #[test]
    fn synthetic_rows_recover_piece_values() {
        let cfg = SyntheticSelfPlay {
            games: 20_000,
            ..SyntheticSelfPlay::default()
        };
        let fit = fit_selfplay(&synthetic_rows(&cfg), FitShape::Full).unwrap();
        let knight = fit.coefficient("knight").unwrap();
        let se = fit.standard_error("knight").unwrap();
        assert!((knight - cfg.piece_values[1]).abs() < 4.0 * se, "{knight} ({se})");
    }
}
