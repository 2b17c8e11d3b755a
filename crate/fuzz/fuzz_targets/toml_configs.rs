#![no_main]

use libfuzzer_sys::fuzz_target;
use piecevalue::config::RunConfig;
use piecevalue::lab::ArchiveConfig;
use piecevalue::pgn::FilterPolicy;
use piecevalue::selfplay::MatchSpec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = RunConfig::from_toml_str(text);
    let _ = FilterPolicy::from_toml_str(text);
    if let Ok(spec) = MatchSpec::from_toml_str(text) {
        let _ = spec.opening_position();
        let _ = spec.hash();
    }
    let _ = toml::from_str::<ArchiveConfig>(text);
});
