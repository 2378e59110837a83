use std::path::{Path, PathBuf};

use qecsplit::analysis::Readout;
use qecsplit::geometry::ErrorKind;
use serde::{Deserialize, Serialize};

/// Environment variable naming the root for relative output directories.
pub const OUTPUT_ROOT_VAR: &str = "QECSPLIT_OUTPUT";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    Mc,
    SplitUp,
    SplitDown,
    /// Monte Carlo at and above `p*`, splitting below.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorPolicy {
    /// Closed-form low-rate value (noiseless readout only).
    Asymptotic,
    /// Direct Monte Carlo at the first ladder rate.
    Mc,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    /// Defect separation; `4r` when absent.
    pub s: Option<usize>,
    /// Buffer to the outer boundary; `4r` when absent.
    pub b: Option<usize>,
    /// Readout cycles for noisy readout; `4r` when absent.
    pub t: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplittingConfig {
    /// Boundary between Monte Carlo and splitting; per-setting default.
    pub p_star: Option<f64>,
    /// First ladder rate; 0.1% upward, `p*` downward by default.
    pub p_start: Option<f64>,
    /// Anchor at the first ladder rate; asymptotic for noiseless upward
    /// ladders, Monte Carlo otherwise.
    pub anchor: Option<AnchorPolicy>,
    /// Metropolis steps per rate.
    pub steps: u64,
    /// Recorded samples per rate; one per `n` steps when absent.
    pub samples: Option<u64>,
    pub max_doublings: u32,
    pub tolerance: Option<f64>,
}

impl Default for SplittingConfig {
    fn default() -> Self {
        Self {
            p_star: None,
            p_start: None,
            anchor: None,
            steps: 1_000_000,
            samples: None,
            max_doublings: 1,
            tolerance: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub trials: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { trials: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub readout: Readout,
    pub error_kind: ErrorKind,
    pub r: Vec<usize>,
    pub rates: Vec<f64>,
    #[serde(default = "default_method")]
    pub method: MethodChoice,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub splitting: SplittingConfig,
    #[serde(default)]
    pub mc: McConfig,
}

fn default_method() -> MethodChoice {
    MethodChoice::Auto
}

fn default_workers() -> usize {
    1
}

fn default_output() -> PathBuf {
    PathBuf::from("qecsplit-out")
}

impl ExperimentConfig {
    pub fn new(readout: Readout, error_kind: ErrorKind) -> Self {
        Self {
            readout,
            error_kind,
            r: vec![2],
            rates: Vec::new(),
            method: default_method(),
            seed: 0,
            workers: default_workers(),
            output: default_output(),
            geometry: GeometryConfig::default(),
            splitting: SplittingConfig::default(),
            mc: McConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::new("", e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("--config", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| ConfigError {
            message: format!("{}: {}", path.display(), e.message),
            ..e
        })
    }

    pub fn s(&self, r: usize) -> usize {
        self.geometry.s.unwrap_or(4 * r)
    }

    pub fn b(&self, r: usize) -> usize {
        self.geometry.b.unwrap_or(4 * r)
    }

    pub fn t(&self, r: usize) -> usize {
        self.geometry.t.unwrap_or(4 * r)
    }

    /// Junction between Monte Carlo and splitting: 5% / 3% (loop / path)
    /// with noiseless readout, 0.5% / 0.3% with noisy readout.
    pub fn p_star(&self) -> f64 {
        self.splitting
            .p_star
            .unwrap_or(match (self.readout, self.error_kind) {
                (Readout::Noiseless, ErrorKind::Loop) => 0.05,
                (Readout::Noiseless, ErrorKind::Path) => 0.03,
                (Readout::Noisy, ErrorKind::Loop) => 0.005,
                (Readout::Noisy, ErrorKind::Path) => 0.003,
            })
    }

    /// The method used at rate `p`.
    pub fn method_at(&self, p: f64) -> MethodChoice {
        match self.method {
            MethodChoice::Auto if p >= self.p_star() => MethodChoice::Mc,
            MethodChoice::Auto => match self.readout {
                Readout::Noiseless => MethodChoice::SplitUp,
                Readout::Noisy => MethodChoice::SplitDown,
            },
            m => m,
        }
    }

    pub fn p_start(&self, method: MethodChoice) -> f64 {
        self.splitting.p_start.unwrap_or(match method {
            MethodChoice::SplitDown => self.p_star(),
            _ => 0.001,
        })
    }

    pub fn anchor(&self, method: MethodChoice) -> AnchorPolicy {
        self.splitting
            .anchor
            .unwrap_or(match (self.readout, method) {
                (Readout::Noiseless, MethodChoice::SplitUp) => AnchorPolicy::Asymptotic,
                _ => AnchorPolicy::Mc,
            })
    }

    /// The output directory, under `$QECSPLIT_OUTPUT` when it is relative.
    pub fn output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_ROOT_VAR) {
            Some(root) if self.output.is_relative() => PathBuf::from(root).join(&self.output),
            _ => self.output.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.r.is_empty() {
            return Err(ConfigError::new("r", "at least one defect size"));
        }
        if let Some(&r) = self.r.iter().find(|&&r| r == 0) {
            return Err(ConfigError::new(
                "r",
                format!("defect size {r} must be positive"),
            ));
        }
        for (i, &p) in self.rates.iter().enumerate() {
            if !(p > 0.0 && p < 0.5) {
                return Err(ConfigError::new(
                    format!("rates[{i}]"),
                    format!("{p} is not in (0, 0.5)"),
                ));
            }
        }
        if self.workers == 0 {
            return Err(ConfigError::new("workers", "must be at least 1"));
        }
        if self.mc.trials == 0 {
            return Err(ConfigError::new("mc.trials", "must be positive"));
        }
        let sp = &self.splitting;
        if sp.steps == 0 {
            return Err(ConfigError::new("splitting.steps", "must be positive"));
        }
        if let Some(n) = sp.samples {
            if n == 0 || n > sp.steps {
                return Err(ConfigError::new(
                    "splitting.samples",
                    "must be between 1 and splitting.steps",
                ));
            }
        }
        for (key, v) in [
            ("splitting.p_star", sp.p_star),
            ("splitting.p_start", sp.p_start),
        ] {
            if let Some(p) = v {
                if !(p > 0.0 && p < 0.5) {
                    return Err(ConfigError::new(key, format!("{p} is not in (0, 0.5)")));
                }
            }
        }
        if let Some(t) = sp.tolerance {
            if !(t > 0.0) {
                return Err(ConfigError::new("splitting.tolerance", "must be positive"));
            }
        }
        if self.readout == Readout::Noisy && sp.anchor == Some(AnchorPolicy::Asymptotic) {
            return Err(ConfigError::new(
                "splitting.anchor",
                "the closed-form anchor only holds for noiseless readout",
            ));
        }
        if self.geometry.t == Some(0) {
            return Err(ConfigError::new("geometry.t", "need at least one cycle"));
        }
        Ok(())
    }
}

/// A configuration problem, located by its key path.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.field.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.field, self.message)
        }
    }
}

impl std::error::Error for ConfigError {}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
readout = "noisy"
error_kind = "path"
r = [2, 3]
rates = [0.001, 0.002]
method = "split-down"
seed = 7

[geometry]
t = 5

[splitting]
steps = 1000
samples = 100

[mc]
trials = 50000
"#;

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::from_toml(EXAMPLE).unwrap();
        assert_eq!(c.geometry.t, Some(5));
        assert_eq!(c.t(3), 5);
        assert_eq!(c.s(3), 12);
        let again = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let bad = EXAMPLE.replace("steps = 1000", "stepz = 1000");
        let e = ExperimentConfig::from_toml(&bad).unwrap_err();
        assert!(e.message.contains("stepz"), "{e}");
        let mut c = ExperimentConfig::from_toml(EXAMPLE).unwrap();
        c.rates.push(0.7);
        assert_eq!(c.validate().unwrap_err().field, "rates[2]");
        c.rates.pop();
        c.splitting.anchor = Some(AnchorPolicy::Asymptotic);
        assert_eq!(c.validate().unwrap_err().field, "splitting.anchor");
    }

    #[test]
    fn auto_method_uses_the_junction() {
        let c = ExperimentConfig::new(Readout::Noiseless, ErrorKind::Loop);
        assert_eq!(c.method_at(0.05), MethodChoice::Mc);
        assert_eq!(c.method_at(0.01), MethodChoice::SplitUp);
        assert_eq!(c.anchor(MethodChoice::SplitUp), AnchorPolicy::Asymptotic);
        let c = ExperimentConfig::new(Readout::Noisy, ErrorKind::Path);
        assert_eq!(c.p_star(), 0.003);
        assert_eq!(c.method_at(0.001), MethodChoice::SplitDown);
        assert_eq!(c.p_start(MethodChoice::SplitDown), 0.003);
        assert_eq!(c.anchor(MethodChoice::SplitDown), AnchorPolicy::Mc);
    }
}
