use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_piecevalue");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes_follow_the_failure_class() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["fit", "--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["fit", "--no-such-flag"]), 1);
    assert_eq!(code(&["no-such-command"]), 1);
    assert_eq!(code(&["simex", "--rows", "x.tsv", "--out", "y.json", "--grid", "geom:1:0:3"]), 1);
    assert_eq!(code(&["fit", "--rows", "/nonexistent/rows.tsv"]), 2);
    assert_eq!(code(&["elo-noise", "--k", "200"]), 3);
    assert_eq!(code(&["elo-noise", "--k", "20", "--p", "1.5"]), 1);
}

#[test]
fn elo_noise_prints_the_closed_form() {
    let out = ok(&["elo-noise", "--k", "20"]);
    // Symmetric case: k / (c (1 - kc/4)) under the square root.
    let c = std::f64::consts::LN_10 / 400.0;
    let se = (20.0 / (c * (1.0 - 20.0 * c / 4.0))).sqrt();
    assert!(out.contains(&format!("{se:.2}")), "{out}\nwant {se:.2}");
}

#[test]
fn reruns_are_byte_identical_with_provenance_headers() {
    let dir = tempfile::tempdir().unwrap();
    let outputs: Vec<(Vec<u8>, Vec<u8>)> = ["a", "b"]
        .iter()
        .map(|name| {
            let d = dir.path().join(name);
            let pgn = d.join("games.pgn");
            let ingested = d.join("ingest");
            let table = d.join("rows.tsv");
            let policy = d.join("policy.toml");
            std::fs::create_dir_all(&d).unwrap();
            std::fs::write(&policy, "min_history_games = 1\nmin_clock_seconds = 60\n").unwrap();
            ok(&["mc", "archive", "--games", "300", "--seed", "7", "--out", s(&pgn)]);
            ok(&["ingest", "--variant", "standard", "--input", s(&pgn), "--policy", s(&policy), "--out", s(&ingested)]);
            let games = ingested.join("games.ndjson");
            ok(&["snapshot", "--games", s(&games), "--policy", s(&policy), "--seed", "3", "--out", s(&table)]);
            (std::fs::read(&pgn).unwrap(), std::fs::read(&table).unwrap())
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    let table = String::from_utf8(outputs[0].1.clone()).unwrap();
    let version = env!("CARGO_PKG_VERSION");
    assert!(table.lines().next().unwrap().contains(version), "{table:.200}");
    assert!(table.contains("# config_hash: "));
    assert!(table.contains("# seed: 3"));
    let data_rows = table.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert!(data_rows > 50, "{data_rows}");
    assert!(table.contains(&format!("# rows.rows: {data_rows}")));
    let meta = std::fs::read_to_string(dir.path().join("a/rows.json")).unwrap();
    assert!(meta.contains("\"config_hash\""));
}

#[test]
fn mock_engine_speaks_uci() {
    let mut child = Command::new(BIN)
        .args(["mock-engine", "--policy", "first-legal"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"uci\nisready\nucinewgame\nposition startpos moves e2e4\ngo depth 1\nquit\n")
        .unwrap();
    let out = child.wait_with_output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.contains(&"uciok"));
    assert!(lines.contains(&"readyok"));
    let best = lines.iter().find_map(|l| l.strip_prefix("bestmove ")).unwrap();
    assert_eq!(best.len(), 4, "{best}");
    assert!(best.starts_with(|c: char| ('a'..='h').contains(&c)));
}

#[test]
fn selfplay_through_uci_matches_the_in_process_engine() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    std::fs::write(
        &spec,
        "variant = \"standard\"\nwhite_strength = 2400\nblack_strength = 1600\ngames = 4\nmax_ply = 40\n\
         move_time_secs = 1.0\n[[ablation]]\nsquare = \"d8\"\npiece = \"q\"\n",
    )
    .unwrap();
    let direct = dir.path().join("direct.jsonl");
    let uci = dir.path().join("uci.jsonl");
    ok(&["selfplay", "run", "--spec", s(&spec), "--ledger", s(&direct), "--mock", "random:5"]);
    ok(&[
        "selfplay", "run", "--spec", s(&spec), "--ledger", s(&uci), "--engine", BIN,
        "--engine-arg", "mock-engine", "--engine-arg", "--policy", "--engine-arg", "random:5",
    ]);
    let a = std::fs::read(&direct).unwrap();
    assert_eq!(a.iter().filter(|b| **b == b'\n').count(), 4);
    assert_eq!(a, std::fs::read(&uci).unwrap());

    // Resuming a complete ledger plays nothing.
    ok(&["selfplay", "run", "--spec", s(&spec), "--ledger", s(&direct), "--mock", "random:5"]);
    assert_eq!(a, std::fs::read(&direct).unwrap());
}

#[test]
fn selfplay_fit_reads_the_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let ledger = dir.path().join("ledger.jsonl");
    for (i, (w, b, sq, piece)) in [(2000, 1600, "b1", "N"), (1600, 2400, "b8", "n"), (2800, 2000, "g8", "n")].iter().enumerate() {
        let spec = dir.path().join(format!("spec{i}.toml"));
        std::fs::write(
            &spec,
            format!(
                "variant = \"standard\"\nwhite_strength = {w}\nblack_strength = {b}\ngames = 6\nmax_ply = 30\n\
                 [[ablation]]\nsquare = \"{sq}\"\npiece = \"{piece}\"\n"
            ),
        )
        .unwrap();
        ok(&["selfplay", "run", "--spec", s(&spec), "--ledger", s(&ledger), "--mock", &format!("random:{i}")]);
    }
    let out = dir.path().join("fit.json");
    let result = run(&["selfplay", "fit", "--ledger", s(&ledger), "--shape", "engine-only", "--out", s(&out)]);
    // Random movers may separate the data; a fit either succeeds or fails numerically.
    match result.status.code().unwrap() {
        0 => assert!(std::fs::read_to_string(&out).unwrap().contains("elo2000")),
        c => assert_eq!(c, 3, "{}", String::from_utf8_lossy(&result.stderr)),
    }
    assert_eq!(code(&["selfplay", "fit", "--ledger", s(&ledger), "--shape", "bogus"]), 1);
    // Every game has unequal engines, so the equal-engine shape has nothing to fit.
    assert_eq!(code(&["selfplay", "fit", "--ledger", s(&ledger), "--shape", "equal-engines-pieces"]), 2);
}
