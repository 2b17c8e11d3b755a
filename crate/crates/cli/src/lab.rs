use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::{ArchiveArgs, CalibrationArgs, EloNoiseArgs, ImpliedKArgs, KnightArgs, OutOfRangeArg};
use crate::error::{CliError, CliResult};
use crate::output::{self, print_table, run_hash, write_json};
use piecevalue::glm::{Design, Quote};
use piecevalue::lab::{self, ArchiveConfig, DeltaSource, EloNoiseParams, KnightExperimentConfig, OutOfRange};
use piecevalue::pgn::{self, GameRecord};
use piecevalue::report::{fmt_value, ArtifactHeader};
use piecevalue::simex::{self, SimexSettings};
use piecevalue::stats;
use piecevalue::ELO_LOGIT;

fn read_deltas(path: &Path) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in output::open(path)?.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let v: f64 = t
            .parse()
            .map_err(|_| CliError::Data(format!("{} line {}: bad number {t:?}", path.display(), i + 1)))?;
        if !v.is_finite() {
            return Err(CliError::Data(format!("{} line {}: non-finite value", path.display(), i + 1)));
        }
        out.push(v);
    }
    Ok(out)
}

pub fn knight(a: KnightArgs) -> CliResult {
    let source = match &a.deltas {
        Some(p) => DeltaSource::Empirical(read_deltas(p)?),
        None => DeltaSource::Gaussian {
            mean: a.source_mean,
            sd: a.source_sd,
        },
    };
    let config = KnightExperimentConfig {
        n_games: a.n,
        sigma0: a.sigma0,
        grid: simex::parse_grid(&a.grid, a.sigma0).map_err(CliError::Usage)?,
        replicates: a.replicates,
        source,
        out_of_range: match a.out_of_range {
            OutOfRangeArg::Clamp => OutOfRange::Clamp,
            OutOfRangeArg::Drop => OutOfRange::Drop,
        },
        seed: a.seed,
        ..KnightExperimentConfig::default()
    };
    config.validate().map_err(CliError::Usage)?;
    let report = lab::run_knight_experiment(&config)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    let first = &report.curve.points[0].fit;
    let rows: Vec<Vec<String>> = report
        .truth
        .iter()
        .map(|(term, truth)| {
            let naive = first.coefficient(term).map_or("NA".into(), fmt_value);
            let cal = report.calibrated.coefficient(term).map_or("NA".into(), fmt_value);
            vec![term.clone(), fmt_value(*truth), naive, cal]
        })
        .collect();
    print_table(&["term", "truth", "at_sigma0", "calibrated"], &rows);
    println!();
    let mut curve_rows = Vec::new();
    for p in &report.curve.points {
        let mut r = vec![fmt_value(p.sigma_total)];
        r.extend(p.fit.coefficients.iter().map(|c| fmt_value(*c)));
        curve_rows.push(r);
    }
    let mut cols = vec!["sigma_total"];
    cols.extend(report.curve.terms().iter().map(String::as_str));
    print_table(&cols, &curve_rows);
    if let Some(out) = &a.out {
        let inputs: Vec<&Path> = a.deltas.iter().map(|p| p.as_path()).collect();
        #[derive(Serialize)]
        struct Settings<'a> {
            command: &'static str,
            config: &'a KnightExperimentConfig,
        }
        // The empirical deltas are hashed as a file, not inline.
        let mut hashed = config.clone();
        if let DeltaSource::Empirical(v) = &mut hashed.source {
            v.clear();
        }
        let hash = run_hash(
            &Settings {
                command: "mc knight",
                config: &hashed,
            },
            &inputs,
        )?;
        let header = ArtifactHeader::new(&hash, a.seed).with_rows("games", a.n as u64);
        write_json(out, &header, &report)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct AttenuationRow {
    sigma: f64,
    ratio: f64,
    inverse_ratio: f64,
}

pub fn calibration(a: CalibrationArgs) -> CliResult {
    if a.n == 0 || !(a.sd > 0.0) {
        return Err(CliError::Usage("--n and --sd must be positive".into()));
    }
    let (deltas, outcomes) = lab::synthetic_rating_games(a.n, a.sd, 0.0, a.seed);
    let mut design = Design::new(
        vec!["white_adv".into(), "delta_rating".into()],
        vec![Quote::Elo, Quote::Ratio],
    );
    for (d, y) in deltas.iter().zip(&outcomes) {
        design.push(&[1.0, ELO_LOGIT * d], *y)?;
    }
    let settings = SimexSettings {
        sigma0: 0.0,
        grid: simex::parse_grid(&a.grid, 58.0).map_err(CliError::Usage)?,
        replicates: a.replicates,
        seed: a.seed.wrapping_add(1),
    };
    let curve = simex::simex_sweep(&design, "delta_rating", &settings)?;
    let rows: Vec<AttenuationRow> = curve
        .series("delta_rating")
        .into_iter()
        .map(|(sigma, ratio)| AttenuationRow {
            sigma,
            ratio,
            inverse_ratio: 1.0 / ratio,
        })
        .collect();
    let x: Vec<f64> = rows.iter().flat_map(|r| [1.0, r.sigma * r.sigma]).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.inverse_ratio).collect();
    let ls = stats::least_squares(&x, 2, &y).ok_or_else(|| CliError::Numerical("attenuation fit failed".into()))?;
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![fmt_value(r.sigma), fmt_value(r.ratio), fmt_value(r.inverse_ratio)])
        .collect();
    print_table(&["sigma", "ratio", "inverse_ratio"], &table);
    println!(
        "1/ratio = {} + {} * sigma^2  (R^2 = {}; theory slope {})",
        fmt_value(ls.coefficients[0]),
        fmt_value(ls.coefficients[1]),
        fmt_value(ls.r_squared),
        fmt_value(1.0 / (a.sd * a.sd))
    );
    Ok(())
}

fn load_archive_config(path: &Path) -> CliResult<ArchiveConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::data(path.display(), e))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn archive(a: ArchiveArgs) -> CliResult {
    let mut config = match &a.config {
        Some(p) => load_archive_config(p)?,
        None => ArchiveConfig::default(),
    };
    if let Some(v) = a.variant {
        config.variant = v;
    }
    if let Some(n) = a.games {
        config.n_games = n;
    }
    if let Some(s) = a.seed {
        config.seed = s;
    }
    if config.n_games == 0 || config.n_players < 2 {
        return Err(CliError::Usage("need at least one game and two players".into()));
    }
    let games = lab::synthetic_archive(&config);
    let mut w = output::create(&a.out)?;
    for g in &games {
        pgn::write_pgn(&mut w, g)?;
    }
    w.flush()?;
    eprintln!("archive: {} {} games written to {}", games.len(), config.variant, a.out.display());
    Ok(())
}

pub fn elo_noise(a: EloNoiseArgs) -> CliResult {
    let params = EloNoiseParams {
        k: a.k,
        delta_a: a.da,
        p_draw: a.p,
    };
    let n = lab::elo_noise_se(&params)?;
    let mut rows = vec![
        vec!["g".to_string(), fmt_value(n.g)],
        vec!["g_prime".into(), fmt_value(n.g_prime)],
        vec!["score_variance".into(), fmt_value(n.score_variance)],
        vec!["variance".into(), fmt_value(n.variance)],
        vec!["se".into(), fmt_value(n.se)],
    ];
    if let Some(steps) = a.simulate {
        if steps < 2 {
            return Err(CliError::Usage("--simulate needs at least two steps".into()));
        }
        let sim = lab::simulate_rating_error(&params, steps, steps / 10, a.seed)?;
        rows.push(vec!["simulated_se".into(), fmt_value(sim)]);
        rows.push(vec!["relative_error".into(), fmt_value((sim - n.se).abs() / n.se)]);
    }
    print_table(&["quantity", "value"], &rows);
    Ok(())
}

fn load_games_for_k(a: &ImpliedKArgs) -> CliResult<Vec<GameRecord>> {
    match (&a.games, &a.pgn) {
        (Some(p), None) => crate::pipeline::read_games(p),
        (None, Some(p)) => {
            let mut out = Vec::new();
            for g in pgn::stream_games(output::open(p)?, a.variant) {
                out.push(g.map_err(|e| CliError::data(p.display(), e))?);
            }
            Ok(out)
        }
        _ => Err(CliError::Usage("give exactly one of --games or --pgn".into())),
    }
}

pub fn implied_k(a: ImpliedKArgs) -> CliResult {
    if a.bins == 0 || !(a.hi > a.lo) {
        return Err(CliError::Usage("need --bins > 0 and --hi > --lo".into()));
    }
    let games = load_games_for_k(&a)?;
    let k = lab::implied_k(&games);
    if k.values.is_empty() {
        return Err(CliError::Data("no games carry rating-change tags".into()));
    }
    println!(
        "# games {}  used {}  missing {}  near_zero {}  median {}",
        games.len(),
        k.values.len(),
        k.missing,
        k.near_zero,
        fmt_value(k.median)
    );
    let rows: Vec<Vec<String>> = k
        .density(a.lo, a.hi, a.bins)
        .into_iter()
        .map(|(c, d)| vec![fmt_value(c), fmt_value(d)])
        .collect();
    print_table(&["k", "density"], &rows);
    Ok(())
}
