use std::io::{self, BufWriter};

use serde::Serialize;

use crate::args::{MockEngineArgs, SelfplayFitArgs, SelfplayRunArgs};
use crate::error::{CliError, CliResult};
use crate::output::{print_table, run_hash, write_json};
use piecevalue::glm::RegressionFit;
use piecevalue::report::{fmt_value, ArtifactHeader};
use piecevalue::selfplay::{
    fit_selfplay, run_matches, serve_uci, Engine, Ledger, MatchSpec, MockEngine, MockPolicy, SelfPlayRow, UciEngine,
};

fn parse_policy(text: &str) -> CliResult<MockPolicy> {
    match text.trim() {
        "first-legal" => Ok(MockPolicy::FirstLegal),
        t => t
            .strip_prefix("random:")
            .and_then(|s| s.parse().ok())
            .map(|seed| MockPolicy::Random { seed })
            .ok_or_else(|| CliError::Usage(format!("unknown mock policy {t:?}; use first-legal or random:SEED"))),
    }
}

pub fn run(a: SelfplayRunArgs) -> CliResult {
    let text = std::fs::read_to_string(&a.spec).map_err(|e| CliError::data(a.spec.display(), e))?;
    let spec = MatchSpec::from_toml_str(&text)?;
    spec.validate()?;
    let mut ledger = Ledger::open(&a.ledger)?;
    let (mut white, mut black): (Box<dyn Engine>, Box<dyn Engine>) = match (&a.engine, &a.mock) {
        (Some(program), None) => {
            let spawn = |strength| {
                UciEngine::spawn(program, &a.engine_args, Some(strength))
                    .map_err(|e| CliError::Data(format!("engine {program}: {e}")))
            };
            (Box::new(spawn(spec.white_strength)?), Box::new(spawn(spec.black_strength)?))
        }
        (None, Some(policy)) => {
            let p = parse_policy(policy)?;
            (Box::new(MockEngine::new(p)), Box::new(MockEngine::new(p)))
        }
        _ => return Err(CliError::Usage("give exactly one of --engine or --mock".into())),
    };
    let summary = run_matches(&spec, white.as_mut(), black.as_mut(), &mut ledger)?;
    println!(
        "spec {}: scheduled {}, resumed {}, played {}, voided {}",
        &spec.hash()[..12],
        summary.scheduled,
        summary.resumed,
        summary.played,
        summary.voided
    );
    Ok(())
}

#[derive(Serialize)]
struct FitOut<'a> {
    shape: String,
    games: usize,
    voided: usize,
    fit: &'a RegressionFit,
}

pub fn fit(a: SelfplayFitArgs) -> CliResult {
    let ledger = Ledger::open(&a.ledger)?;
    let rows: Vec<SelfPlayRow> = ledger.entries().iter().filter_map(SelfPlayRow::from_entry).collect();
    let voided = ledger.entries().len() - rows.len();
    let fit = fit_selfplay(&rows, a.shape)?;
    let table: Vec<Vec<String>> = fit
        .terms
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let se = fit.standard_errors.as_ref().map_or("NA".to_string(), |s| fmt_value(s[i]));
            vec![t.clone(), fmt_value(fit.coefficients[i]), se]
        })
        .collect();
    print_table(&["term", "estimate", "std_error"], &table);
    if let Some(out) = &a.out {
        #[derive(Serialize)]
        struct Settings {
            command: &'static str,
            shape: String,
        }
        let settings = Settings {
            command: "selfplay fit",
            shape: format!("{:?}", a.shape),
        };
        let header = ArtifactHeader::new(&run_hash(&settings, &[&a.ledger])?, 0)
            .with_rows("games", rows.len() as u64)
            .with_rows("voided", voided as u64);
        write_json(
            out,
            &header,
            &FitOut {
                shape: format!("{:?}", a.shape),
                games: rows.len(),
                voided,
                fit: &fit,
            },
        )?;
    }
    Ok(())
}

pub fn mock_engine(a: MockEngineArgs) -> CliResult {
    let policy = parse_policy(&a.policy)?;
    serve_uci(io::stdin().lock(), BufWriter::new(io::stdout().lock()), policy)?;
    Ok(())
}
