//! Declarative run configuration, one TOML file per run.
//!
//! Paths may reference environment variables as `$NAME` or `${NAME}`; no
//! other setting is read from the environment.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::pgn::FilterPolicy;
use crate::simex::{self, DEFAULT_REPLICATES};
use crate::snapshot::{SchemeKind, SnapshotScheme};
use piecevalue_rules::Variant;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config: {0}")]
    Parse(String),
    #[error("config: {0}")]
    Invalid(String),
    #[error("config: environment variable {0} is not set")]
    MissingEnv(String),
    #[error("config: {0} does not exist")]
    MissingPath(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimexConfig {
    /// Fixed rating noise; estimated from the data when absent.
    pub sigma0: Option<f64>,
    /// `default`, `geom:LO:HI:N` or a comma list.
    pub grid: String,
    pub replicates: usize,
}

impl Default for SimexConfig {
    fn default() -> SimexConfig {
        SimexConfig {
            sigma0: None,
            grid: "default".into(),
            replicates: DEFAULT_REPLICATES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(with = "crate::pgn::variant_serde")]
    pub variant: Variant,
    pub inputs: Vec<String>,
    #[serde(default)]
    pub filter: FilterPolicy,
    #[serde(default = "default_scheme")]
    pub snapshot: SnapshotScheme,
    #[serde(default)]
    pub simex: SimexConfig,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: String,
}

fn default_scheme() -> SnapshotScheme {
    SnapshotScheme {
        kind: SchemeKind::UniformRandom,
        no_capture_depth: 1,
        seed: 0,
    }
}

/// Expands `$NAME` and `${NAME}` from the environment.
pub fn expand_env(text: &str) -> Result<String, ConfigError> {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(i) = rest.find('$') {
        out.push_str(&rest[..i]);
        let after = &rest[i + 1..];
        let (name, tail) = if let Some(body) = after.strip_prefix('{') {
            let end = body
                .find('}')
                .ok_or_else(|| ConfigError::Invalid(format!("unclosed ${{ in {text:?}")))?;
            (&body[..end], &body[end + 1..])
        } else {
            let end = after
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                .unwrap_or(after.len());
            (&after[..end], &after[end..])
        };
        if name.is_empty() {
            return Err(ConfigError::Invalid(format!("empty variable name in {text:?}")));
        }
        out.push_str(&std::env::var(name).map_err(|_| ConfigError::MissingEnv(name.to_string()))?);
        rest = tail;
    }
    out.push_str(rest);
    Ok(out)
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<RunConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
        RunConfig::from_toml_str(&text)
    }

    /// Input paths with environment variables expanded.
    pub fn input_paths(&self) -> Result<Vec<PathBuf>, ConfigError> {
        self.inputs.iter().map(|p| expand_env(p).map(PathBuf::from)).collect()
    }

    pub fn output_path(&self) -> Result<PathBuf, ConfigError> {
        expand_env(&self.output_dir).map(PathBuf::from)
    }

    pub fn grid(&self, sigma0: f64) -> Result<Vec<f64>, ConfigError> {
        simex::parse_grid(&self.simex.grid, sigma0).map_err(ConfigError::Invalid)
    }

    /// Checks settings and that every input exists.
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.filter.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.snapshot.validate().map_err(ConfigError::Invalid)?;
        if self.inputs.is_empty() {
            return Err(ConfigError::Invalid("no inputs".into()));
        }
        if let Some(s) = self.simex.sigma0 {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(ConfigError::Invalid(format!("sigma0 {s} must be finite and non-negative")));
            }
        }
        if self.simex.replicates == 0 {
            return Err(ConfigError::Invalid("replicates must be positive".into()));
        }
        self.grid(self.simex.sigma0.unwrap_or(0.0))?;
        for p in self.input_paths()? {
            if !p.exists() {
                return Err(ConfigError::MissingPath(p));
            }
        }
        self.output_path()?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex_sha256(json.as_bytes())
    }
}

pub fn hex_sha256(bytes: &[u8]) -> String {
    hex(&Sha256::digest(bytes))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Hex SHA-256 of a file's contents, read in chunks.
pub fn file_sha256(path: &Path) -> std::io::Result<String> {
    use std::io::Read;
    let mut f = std::fs::File::open(path)?;
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        h.update(&buf[..n]);
    }
    Ok(hex(&h.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
variant = "standard"
inputs = ["games.pgn"]
output_dir = "out"
"#;

    #[test]
    fn defaults_and_hash() {
        let c = RunConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.simex.replicates, DEFAULT_REPLICATES);
        assert_eq!(c.filter, FilterPolicy::default());
        assert_eq!(c.hash(), RunConfig::from_toml_str(MINIMAL).unwrap().hash());
        let mut d = c.clone();
        d.seed = 1;
        assert_ne!(c.hash(), d.hash());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_toml_str(&format!("{MINIMAL}\nbogus = 1\n")).is_err());
    }

    #[test]
    fn missing_input_fails_validation() {
        let c = RunConfig::from_toml_str(MINIMAL).unwrap();
        assert!(matches!(c.validate(), Err(ConfigError::MissingPath(_))));
    }

    #[test]
    fn env_expansion() {
        let home = std::env::var("PATH").unwrap();
        assert_eq!(expand_env("$PATH/x").unwrap(), format!("{home}/x"));
        assert_eq!(expand_env("a${PATH}b").unwrap(), format!("a{home}b"));
        assert!(matches!(
            expand_env("$PIECEVALUE_SURELY_UNSET_VAR"),
            Err(ConfigError::MissingEnv(_))
        ));
        assert_eq!(expand_env("plain").unwrap(), "plain");
    }
}
