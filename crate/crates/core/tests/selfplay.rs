use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use piecevalue::rules::Variant;
use piecevalue::selfplay::{
    fit_selfplay, run_matches, Engine, EngineError, FitShape, Ledger, LedgerEntry, MatchSpec, MockEngine, MockPolicy,
    Removal, SearchLimits, SelfPlayRow, STRENGTHS,
};
use piecevalue::ELO_LOGIT;

proptest! {
    #[test]
    fn strength_variables_cancel_for_equal_settings(w in 0usize..4, b in 0usize..4) {
        let row = SelfPlayRow {
            outcome: 0.5,
            white_strength: STRENGTHS[w],
            black_strength: STRENGTHS[b],
            material: [0; 5],
            removed: vec![],
        };
        let s = row.strength_vars();
        let swapped = SelfPlayRow { white_strength: STRENGTHS[b], black_strength: STRENGTHS[w], ..row.clone() };
        for (a, c) in s.iter().zip(swapped.strength_vars()) {
            prop_assert_eq!(*a, -c);
        }
        prop_assert!(s.iter().all(|v| v.abs() <= 1.0));
        if w == b {
            prop_assert!(s.iter().all(|v| *v == 0.0));
        }
        // Only non-baseline settings get an indicator.
        prop_assert_eq!(s.iter().filter(|v| **v != 0.0).count(), usize::from(w != b && w > 0) + usize::from(w != b && b > 0));
    }
}

/// Mock engine that refuses every `every`-th game.
struct Flaky {
    inner: MockEngine,
    games: u32,
    every: u32,
}

impl Engine for Flaky {
    fn new_game(&mut self, variant: Variant) -> Result<(), EngineError> {
        self.games += 1;
        if self.games.is_multiple_of(self.every) {
            return Err(EngineError::Protocol("refused".into()));
        }
        self.inner.new_game(variant)
    }

    fn best_move(&mut self, start_fen: &str, moves: &[String], limits: &SearchLimits) -> Result<String, EngineError> {
        self.inner.best_move(start_fen, moves, limits)
    }
}

fn spec(games: u32) -> MatchSpec {
    MatchSpec::from_toml_str(&format!(
        "variant = \"standard\"\nwhite_strength = 2000\nblack_strength = 1600\ngames = {games}\nmax_ply = 60\n\
         [[ablation]]\nsquare = \"b8\"\npiece = \"n\"\n"
    ))
    .unwrap()
}

#[test]
fn voided_games_never_reach_the_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ledger.jsonl");
    let spec = spec(12);
    let mut white = Flaky { inner: MockEngine::new(MockPolicy::Random { seed: 1 }), games: 0, every: 4 };
    let mut black = MockEngine::new(MockPolicy::Random { seed: 2 });
    let mut ledger = Ledger::open(&path).unwrap();
    let summary = run_matches(&spec, &mut white, &mut black, &mut ledger).unwrap();
    assert_eq!(summary.played + summary.voided, summary.scheduled);
    assert_eq!(summary.voided, 3);
    let rows: Vec<SelfPlayRow> = ledger.entries().iter().filter_map(SelfPlayRow::from_entry).collect();
    assert_eq!(rows.len() as u32, summary.played);
    assert!(rows.iter().all(|r| r.material == [0, 1, 0, 0, 0]));

    // Resuming plays nothing new, voided games included.
    drop(ledger);
    let mut ledger = Ledger::open(&path).unwrap();
    let again = run_matches(&spec, &mut white, &mut black, &mut ledger).unwrap();
    assert_eq!((again.resumed, again.played, again.voided), (12, 0, 0));
}

/// One removal square per piece type, so per-square columns equal material columns.
const ONE_PER_KIND: [(&str, char); 5] = [("e2", 'P'), ("b8", 'n'), ("c1", 'B'), ("a8", 'r'), ("d1", 'Q')];

#[test]
fn per_square_matches_full_with_one_square_per_kind() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let values = [90.0, 250.0, 280.0, 330.0, 450.0];
    let rows: Vec<SelfPlayRow> = (0..6000)
        .map(|_| {
            let removed: Vec<Removal> = ONE_PER_KIND
                .iter()
                .filter(|_| rng.random_bool(0.3))
                .map(|(s, p)| Removal { square: s.to_string(), piece: *p })
                .collect();
            let entry = LedgerEntry {
                spec_hash: String::new(),
                game: 0,
                white_strength: STRENGTHS[rng.random_range(0..4)],
                black_strength: STRENGTHS[rng.random_range(0..4)],
                removed,
                outcome: Some(0.0),
                plies: 0,
                note: String::new(),
            };
            let mut row = SelfPlayRow::from_entry(&entry).unwrap();
            let edge: f64 = 20.0
                + row.strength_vars().iter().zip([200.0, 400.0, 550.0]).map(|(a, b)| a * b).sum::<f64>()
                + row.material.iter().zip(values).map(|(m, v)| f64::from(*m) * v).sum::<f64>();
            let p = piecevalue::glm::logistic(ELO_LOGIT * edge);
            row.outcome = if rng.random::<f64>() < p { 1.0 } else { 0.0 };
            row
        })
        .collect();
    let full = fit_selfplay(&rows, FitShape::Full).unwrap();
    let per_square = fit_selfplay(&rows, FitShape::PerSquare).unwrap();
    for t in ["white_adv", "elo2000", "elo2400", "elo2800"] {
        let (a, b) = (full.coefficient(t).unwrap(), per_square.coefficient(t).unwrap());
        assert!((a - b).abs() < 1e-6, "{t}: {a} vs {b}");
    }
    // A white removal is coded −1 per square and −1 in material; a black one +1 in both.
    for ((square, _), piece) in ONE_PER_KIND.iter().zip(["pawn", "knight", "bishop", "rook", "queen"]) {
        let a = full.coefficient(piece).unwrap();
        let b = per_square.coefficient(&format!("sq_{square}")).unwrap();
        assert!((a - b).abs() < 1e-6, "{piece}: {a} vs {b}");
    }
}

#[test]
fn fit_shapes_reject_constant_columns() {
    let row = |w, b| SelfPlayRow { outcome: 1.0, white_strength: w, black_strength: b, material: [0; 5], removed: vec![] };
    let rows = vec![row(1600, 1600), row(2000, 2000)];
    assert!(fit_selfplay(&rows, FitShape::EqualEnginesPieces).is_err());
}
