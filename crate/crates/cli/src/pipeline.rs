use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::args::{BootstrapArgs, FitArgs, IngestArgs, ModelArgs, NoiseArgs, ReportArgs, SimexArgs, SnapshotArgs};
use crate::error::{CliError, CliResult};
use crate::output::{self, path_in, print_table, run_hash, write_json, write_tsv};
use piecevalue::config::RunConfig;
use piecevalue::features::{read_table, write_table, FeatureRow, Term};
use piecevalue::glm::{self, Design, RegressionFit};
use piecevalue::pgn::{self, stream_games, FilterPolicy, GameFilter, GameRecord, PlayerHistoryIndex, StreamStats};
use piecevalue::report::{self, fmt_value, ArtifactHeader, Coefficients, RangedFit};
use piecevalue::rules::Variant;
use piecevalue::simex::{self, CalibratedFit, McConfig, Sigma0Estimate, SimexCurve, SimexSettings};
use piecevalue::snapshot::{snapshot_games, snapshot_ranges, SnapshotScheme, SnapshotStats};

/// The nine ranges 10–19.5, 20–29.5, …, 90–99.5.
pub fn standard_ranges() -> Vec<(f64, f64)> {
    (1..10).map(|i| (f64::from(i) * 10.0, f64::from(i) * 10.0 + 9.5)).collect()
}

fn parse_range(text: &str) -> CliResult<(f64, f64)> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| CliError::Usage(format!("range {text:?} must be LO:HI")))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("bad range bound {s:?}")))
    };
    let (lo, hi) = (num(lo)?, num(hi)?);
    if !(lo <= hi && lo >= 0.0) {
        return Err(CliError::Usage(format!("range {text:?} must satisfy 0 <= LO <= HI")));
    }
    Ok((lo, hi))
}

pub fn parse_ranges(text: &str) -> CliResult<Vec<(f64, f64)>> {
    if text.trim() == "standard" {
        return Ok(standard_ranges());
    }
    text.split(',').map(parse_range).collect()
}

fn load_policy(path: Option<&Path>) -> CliResult<FilterPolicy> {
    match path {
        None => Ok(FilterPolicy::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::data(p.display(), e))?;
            Ok(FilterPolicy::from_toml_str(&text)?)
        }
    }
}

#[derive(Serialize)]
struct IngestSettings<'a> {
    command: &'static str,
    variant: String,
    policy: &'a FilterPolicy,
}

#[derive(Serialize)]
struct IngestSummary {
    variant: String,
    inputs: Vec<InputStats>,
    history_entries: usize,
    filter: pgn::FilterReport,
}

#[derive(Serialize)]
struct InputStats {
    file: String,
    stream: StreamStats,
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

pub fn ingest(a: IngestArgs) -> CliResult {
    let (variant, inputs, policy, out) = match &a.config {
        Some(path) => {
            let c = RunConfig::load(path)?;
            c.validate()?;
            (c.variant, c.input_paths()?, c.filter.clone(), c.output_path()?)
        }
        None => {
            let variant = a.variant.ok_or_else(|| CliError::Usage("--variant or --config is required".into()))?;
            let out = a.out.clone().ok_or_else(|| CliError::Usage("--out or --config is required".into()))?;
            (variant, a.inputs.clone(), load_policy(a.policy.as_deref())?, out)
        }
    };
    if inputs.is_empty() {
        return Err(CliError::Usage("no input files".into()));
    }
    policy.validate()?;

    // First pass: monthly game counts per player over every parsed game.
    let mut index = PlayerHistoryIndex::new();
    let mut input_stats = Vec::new();
    for p in &inputs {
        let mut stream = stream_games(output::open(p)?, variant);
        for g in stream.by_ref() {
            index.add_game(&g.map_err(|e| CliError::data(p.display(), e))?);
        }
        input_stats.push(InputStats {
            file: file_name(p),
            stream: stream.stats().clone(),
        });
    }
    // Second pass: filter and write.
    let games_path = path_in(&out, "games.ndjson");
    let mut w = output::create(&games_path)?;
    let mut filter = GameFilter::new(&index, &policy);
    for p in &inputs {
        for g in stream_games(output::open(p)?, variant) {
            let g = g.map_err(|e| CliError::data(p.display(), e))?;
            if let Some(kept) = filter.apply(g) {
                pgn::write_record(&mut w, &kept)?;
            }
        }
    }
    w.flush()?;
    let report = filter.into_report();
    let mut idx = output::create(&path_in(&out, "history.idx"))?;
    index.write_to(&mut idx)?;
    idx.flush()?;

    let input_refs: Vec<&Path> = inputs.iter().map(PathBuf::as_path).collect();
    let settings = IngestSettings {
        command: "ingest",
        variant: variant.to_string(),
        policy: &policy,
    };
    let header = ArtifactHeader::new(&run_hash(&settings, &input_refs)?, 0)
        .with_rows("games_seen", input_stats.iter().map(|s| s.stream.games_seen).sum())
        .with_rows("games_kept", report.output);
    eprintln!(
        "ingest: {} games parsed, {} kept; {}",
        input_stats.iter().map(|s| s.stream.records).sum::<u64>(),
        report.output,
        games_path.display()
    );
    write_json(
        &path_in(&out, "ingest.json"),
        &header,
        &IngestSummary {
            variant: variant.to_string(),
            inputs: input_stats,
            history_entries: index.len(),
            filter: report,
        },
    )
}

pub fn read_games(path: &Path) -> CliResult<Vec<GameRecord>> {
    let reader = output::open(path)?;
    let mut games = Vec::new();
    for (i, r) in pgn::read_records(reader).enumerate() {
        games.push(r.map_err(|e| CliError::Data(format!("{} record {}: {e}", path.display(), i + 1)))?);
    }
    Ok(games)
}

#[derive(Serialize)]
struct SnapshotSettings<'a> {
    command: &'static str,
    scheme: String,
    depth: u8,
    seed: u64,
    ranges: Option<&'a [(f64, f64)]>,
    policy: &'a FilterPolicy,
}

#[derive(Serialize)]
struct SnapshotSummary {
    stats: SnapshotStats,
    mean_ply: f64,
}

#[derive(Serialize, Deserialize)]
struct RangeEntry {
    lo: f64,
    hi: f64,
    file: String,
    rows: u64,
    mean_ply: f64,
}

fn write_rows(path: &Path, header: &ArtifactHeader, rows: &[FeatureRow]) -> CliResult {
    let mut w = output::create(path)?;
    w.write_all(header.render().as_bytes())?;
    write_table(&mut w, rows)?;
    w.flush()?;
    Ok(())
}

pub fn snapshot(a: SnapshotArgs) -> CliResult {
    let policy = load_policy(a.policy.as_deref())?;
    let games = read_games(&a.games)?;
    let ranges = a.ranges.as_deref().map(parse_ranges).transpose()?;
    let settings = SnapshotSettings {
        command: "snapshot",
        scheme: a.scheme.to_string(),
        depth: a.depth,
        seed: a.seed,
        ranges: ranges.as_deref(),
        policy: &policy,
    };
    let hash = run_hash(&settings, &[&a.games])?;
    match ranges {
        None => {
            let scheme = SnapshotScheme {
                kind: a.scheme,
                no_capture_depth: a.depth,
                seed: a.seed,
            };
            scheme.validate().map_err(CliError::Usage)?;
            let (rows, stats) = snapshot_games(&games, &scheme, &policy);
            let header = ArtifactHeader::new(&hash, a.seed)
                .with_rows("games", stats.games)
                .with_rows("rows", stats.rows);
            write_rows(&a.out, &header, &rows)?;
            eprintln!("snapshot: {} rows from {} games", stats.rows, stats.games);
            let summary = SnapshotSummary {
                mean_ply: SnapshotStats::mean_ply(&rows),
                stats,
            };
            write_json(&a.out.with_extension("json"), &header, &summary)
        }
        Some(ranges) => {
            let results = snapshot_ranges(&games, &ranges, a.depth, a.seed, &policy);
            let mut entries = Vec::new();
            for ((lo, hi), (rows, stats)) in ranges.iter().zip(results) {
                let file = format!("range_{}_{}.tsv", fmt_value(*lo), fmt_value(*hi));
                let header = ArtifactHeader::new(&hash, a.seed)
                    .with_rows("games", stats.games)
                    .with_rows("rows", stats.rows);
                write_rows(&path_in(&a.out, &file), &header, &rows)?;
                entries.push(RangeEntry {
                    lo: *lo,
                    hi: *hi,
                    file,
                    rows: stats.rows,
                    mean_ply: SnapshotStats::mean_ply(&rows),
                });
            }
            let header = ArtifactHeader::new(&hash, a.seed).with_rows("ranges", entries.len() as u64);
            let table: Vec<Vec<String>> = entries
                .iter()
                .map(|e| vec![fmt_value(e.lo), fmt_value(e.hi), e.rows.to_string(), fmt_value(e.mean_ply)])
                .collect();
            print_table(&["lo", "hi", "rows", "mean_ply"], &table);
            #[derive(Serialize)]
            struct Ranges {
                ranges: Vec<RangeEntry>,
            }
            write_json(&path_in(&a.out, "ranges.json"), &header, &Ranges { ranges: entries })
        }
    }
}

struct Model {
    rows: Vec<FeatureRow>,
    terms: Vec<Term>,
    variant: Variant,
}

fn load_model(m: &ModelArgs) -> CliResult<Model> {
    let rows = read_table(output::open(&m.rows)?)?;
    let variant = rows
        .first()
        .map(|r| r.variant)
        .ok_or_else(|| CliError::Data(format!("{} has no rows", m.rows.display())))?;
    if rows.iter().any(|r| r.variant != variant) {
        return Err(CliError::Data("feature table mixes variants".into()));
    }
    let terms = match m.terms.as_deref() {
        None => Term::default_for(variant),
        Some("compact") => Term::compact(),
        Some("expanded") => Term::expanded(),
        Some(list) => Term::parse_list(list).map_err(CliError::Usage)?,
    };
    Ok(Model { rows, terms, variant })
}

fn fit_rows(fit: &RegressionFit) -> Vec<Vec<String>> {
    fit.terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let se = fit.standard_errors.as_ref().map_or("NA".to_string(), |s| fmt_value(s[i]));
            vec![t.clone(), fmt_value(fit.coefficients[i]), se]
        })
        .collect()
}

#[derive(Serialize)]
struct ModelSettings<'a> {
    command: &'static str,
    terms: Vec<&'static str>,
    noise: Option<&'a NoiseSettings>,
}

#[derive(Debug, Clone, Serialize)]
struct NoiseSettings {
    sigma0: Option<f64>,
    grid: String,
    replicates: usize,
    seed: u64,
    extra: String,
}

impl NoiseSettings {
    fn from(n: &NoiseArgs, extra: String) -> NoiseSettings {
        NoiseSettings {
            sigma0: n.sigma0,
            grid: n.grid.clone(),
            replicates: n.replicates,
            seed: n.seed,
            extra,
        }
    }
}

fn model_hash(command: &'static str, model: &Model, noise: Option<&NoiseSettings>, rows_path: &Path) -> CliResult<String> {
    let settings = ModelSettings {
        command,
        terms: model.terms.iter().map(|t| t.name()).collect(),
        noise,
    };
    run_hash(&settings, &[rows_path])
}

pub fn fit(a: FitArgs) -> CliResult {
    let model = load_model(&a.model)?;
    let fit = glm::fit_logistic(&model.rows, &model.terms)?;
    print_table(&["term", "estimate", "std_error"], &fit_rows(&fit));
    if let Some(out) = &a.out {
        let header = ArtifactHeader::new(&model_hash("fit", &model, None, &a.model.rows)?, 0)
            .with_rows("rows", model.rows.len() as u64);
        #[derive(Serialize)]
        struct FitOut<'a> {
            variant: String,
            fit: &'a RegressionFit,
        }
        write_json(
            out,
            &header,
            &FitOut {
                variant: model.variant.to_string(),
                fit: &fit,
            },
        )?;
    }
    Ok(())
}

/// Output of `simex`, read back by `report`.
#[derive(Debug, Serialize, Deserialize)]
pub struct SimexOutput {
    pub variant: String,
    pub rows: usize,
    pub mean_ply: f64,
    pub range: Option<(f64, f64)>,
    pub sigma0: f64,
    #[serde(skip_deserializing)]
    pub sigma0_estimate: Option<Sigma0Estimate>,
    pub curve: SimexCurve,
    pub calibrated: CalibratedFit,
}

fn parse_candidates(text: &str) -> CliResult<Vec<f64>> {
    simex::parse_grid(text, 58.0).map_err(CliError::Usage)
}

/// Grid syntax is checked before any data is read.
fn check_grid(grid: &str) -> CliResult {
    simex::parse_grid(grid, 1.0).map(drop).map_err(CliError::Usage)
}

pub fn simex(a: SimexArgs) -> CliResult {
    check_grid(&a.noise.grid)?;
    if a.noise.sigma0.is_none() {
        parse_candidates(&a.candidates)?;
    }
    let model = load_model(&a.model)?;
    let range = a.range.as_deref().map(parse_range).transpose()?;
    let design = Design::from_rows(&model.rows, &model.terms)?;
    let (sigma0, estimate) = match a.noise.sigma0 {
        Some(s) => (s, None),
        None => {
            let candidates = parse_candidates(&a.candidates)?;
            let mid = piecevalue::stats::median(&candidates);
            let mc = McConfig {
                grid: simex::parse_grid(&a.noise.grid, mid).map_err(CliError::Usage)?,
                replicates: a.noise.replicates,
                seed: a.noise.seed,
            };
            let deltas: Vec<f64> = model.rows.iter().map(|r| r.delta_rating).collect();
            let outcomes: Vec<f64> = model.rows.iter().map(|r| r.outcome).collect();
            let est = simex::estimate_sigma0(&deltas, &outcomes, &candidates, &mc)?;
            eprintln!("simex: estimated sigma0 = {}", fmt_value(est.sigma0));
            (est.sigma0, Some(est))
        }
    };
    let settings = SimexSettings {
        sigma0,
        grid: simex::parse_grid(&a.noise.grid, sigma0).map_err(CliError::Usage)?,
        replicates: a.noise.replicates,
        seed: a.noise.seed,
    };
    let curve = simex::simex_sweep(&design, Term::DeltaRating.name(), &settings)?;
    let calibrated = simex::calibrate(&curve, sigma0)?;
    let rows: Vec<Vec<String>> = calibrated
        .terms
        .iter()
        .zip(&calibrated.coefficients)
        .map(|(t, v)| {
            let naive = curve.points.first().and_then(|p| p.fit.coefficient(t));
            vec![t.clone(), naive.map_or("NA".into(), fmt_value), fmt_value(*v)]
        })
        .collect();
    print_table(&["term", "at_sigma0", "calibrated"], &rows);
    let noise = NoiseSettings::from(&a.noise, format!("{}|{:?}", a.candidates, range));
    let header = ArtifactHeader::new(&model_hash("simex", &model, Some(&noise), &a.model.rows)?, a.noise.seed)
        .with_rows("rows", model.rows.len() as u64)
        .with_rows("curve_points", curve.points.len() as u64);
    write_json(
        &a.out,
        &header,
        &SimexOutput {
            variant: model.variant.to_string(),
            rows: model.rows.len(),
            mean_ply: SnapshotStats::mean_ply(&model.rows),
            range,
            sigma0,
            sigma0_estimate: estimate,
            curve,
            calibrated,
        },
    )
}

pub fn bootstrap(a: BootstrapArgs) -> CliResult {
    check_grid(&a.noise.grid)?;
    let sigma0 = a
        .noise
        .sigma0
        .ok_or_else(|| CliError::Usage("bootstrap needs --sigma0".into()))?;
    let model = load_model(&a.model)?;
    let design = Design::from_rows(&model.rows, &model.terms)?;
    let settings = SimexSettings {
        sigma0,
        grid: simex::parse_grid(&a.noise.grid, sigma0).map_err(CliError::Usage)?,
        replicates: a.noise.replicates,
        seed: a.noise.seed,
    };
    let result = simex::bootstrap(&design, Term::DeltaRating.name(), &settings, a.b, a.noise.seed)?;
    let rows: Vec<Vec<String>> = result
        .intervals
        .iter()
        .map(|i| vec![i.term.clone(), fmt_value(i.estimate), fmt_value(i.lower), fmt_value(i.upper)])
        .collect();
    print_table(&["term", "estimate", "lower_2.5", "upper_97.5"], &rows);
    if !result.failures.is_empty() {
        eprintln!("bootstrap: {} of {} replicates failed", result.failures.len(), a.b);
    }
    if let Some(out) = &a.out {
        let noise = NoiseSettings::from(&a.noise, format!("b={}", a.b));
        let header = ArtifactHeader::new(&model_hash("bootstrap", &model, Some(&noise), &a.model.rows)?, a.noise.seed)
            .with_rows("rows", model.rows.len() as u64)
            .with_rows("replicates", result.replicates.len() as u64);
        write_json(out, &header, &result)?;
    }
    Ok(())
}

#[derive(Deserialize)]
struct SimexFile {
    header: ReadHeader,
    #[serde(flatten)]
    body: SimexOutput,
}

#[derive(Deserialize)]
struct ReadHeader {
    config_hash: String,
}

#[derive(Serialize)]
struct ReportSummary {
    variant: String,
    relative: Option<report::RelativeTable>,
    relative_refused: Option<String>,
    equalizers: Option<report::EqualizerTable>,
    ply_curves: Vec<report::PlyCurveRow>,
    historical: Vec<report::ComparisonRow>,
}

pub fn report(a: ReportArgs) -> CliResult {
    if a.simex.is_none() && a.ranged.is_empty() {
        return Err(CliError::Usage("give --simex, --ranged or both".into()));
    }
    let mut hashes = Vec::new();
    let main = match &a.simex {
        Some(p) => {
            let f: SimexFile = output::read_json(p)?;
            hashes.push(f.header.config_hash);
            Some(f.body)
        }
        None => None,
    };
    let mut ranged = Vec::new();
    for p in &a.ranged {
        let f: SimexFile = output::read_json(p)?;
        hashes.push(f.header.config_hash);
        let (lo, hi) = f
            .body
            .range
            .ok_or_else(|| CliError::Data(format!("{} was not produced with --range", p.display())))?;
        ranged.push(RangedFit {
            lo,
            hi,
            mean_ply: f.body.mean_ply,
            rows: f.body.rows,
            coefficients: Coefficients::from(&f.body.calibrated),
        });
    }
    ranged.sort_by(|x, y| x.lo.total_cmp(&y.lo).then(x.hi.total_cmp(&y.hi)));

    let seed = main.as_ref().map_or(0, |m| m.curve.seed);
    let mut header = ArtifactHeader::new(&piecevalue::config::hex_sha256(hashes.join("\n").as_bytes()), seed);
    if let Some(m) = &main {
        header = header.with_rows("rows", m.rows as u64);
    }
    header = header.with_rows("ranges", ranged.len() as u64);

    let mut summary = ReportSummary {
        variant: a.variant.to_string(),
        relative: None,
        relative_refused: None,
        equalizers: None,
        ply_curves: Vec::new(),
        historical: Vec::new(),
    };
    if let Some(m) = &main {
        let coefs = Coefficients::from(&m.calibrated);
        match report::relative_values(&coefs, a.variant) {
            Ok(t) => {
                write_tsv(
                    &path_in(&a.out, "relative.tsv"),
                    &header,
                    &["term", "raw", "ratio"],
                    &report::relative_rows(&t),
                )?;
                print_table(&["term", "raw", "ratio"], &report::relative_rows(&t));
                for n in &t.notes {
                    println!("note: {n}");
                }
                summary.relative = Some(t);
            }
            Err(e @ report::ReportError::PawnNearZero { .. }) => {
                log::warn!("{e}; writing absolute values only");
                let rows: Vec<Vec<String>> = coefs
                    .terms
                    .iter()
                    .zip(&coefs.values)
                    .map(|(t, v)| vec![t.clone(), fmt_value(*v)])
                    .collect();
                write_tsv(&path_in(&a.out, "absolute.tsv"), &header, &["term", "raw"], &rows)?;
                summary.relative_refused = Some(e.to_string());
            }
            Err(e) => return Err(e.into()),
        }
    }
    let early = ranged
        .first()
        .map(|r| r.coefficients.clone())
        .or_else(|| main.as_ref().map(|m| Coefficients::from(&m.calibrated)));
    if let Some(early) = early {
        let eq = report::equalizers(&early);
        write_tsv(
            &path_in(&a.out, "equalizers.tsv"),
            &header,
            &["term", "raw", "rounded"],
            &report::equalizer_rows(&eq),
        )?;
        summary.equalizers = Some(eq);
    }
    if !ranged.is_empty() {
        let curves = report::ply_curves(&ranged);
        write_tsv(
            &path_in(&a.out, "ply_curves.tsv"),
            &header,
            &["lo", "hi", "mean_ply", "term", "raw", "relative"],
            &report::ply_curve_rows(&curves),
        )?;
        summary.ply_curves = curves;
    }
    let label = format!("fit ({})", a.variant);
    let historical = report::compare_historical(summary.relative.as_ref().map(|t| (label.as_str(), t)));
    write_tsv(
        &path_in(&a.out, "historical.tsv"),
        &header,
        &["source", "year", "knight", "bishop", "rook", "queen"],
        &report::comparison_rows(&historical),
    )?;
    summary.historical = historical;
    write_json(&path_in(&a.out, "summary.json"), &header, &summary)?;
    let mut counts = BTreeMap::new();
    counts.insert("ranges", ranged.len());
    log::info!("report written to {} ({counts:?})", a.out.display());
    Ok(())
}
