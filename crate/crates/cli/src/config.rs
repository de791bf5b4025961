//! Experiment configuration: a sectioned TOML file (JSON is accepted too).
//!
//! ```toml
//! experiment = "lyapunov"
//! seed = 7
//!
//! [model]
//! potential = "cos2d"          # or grid = "v.csv" with grid_alpha
//! dynamics = "skew"            # "shift" takes two frequencies
//! omega = "golden"             # number or named constant
//! lambda = 100.0
//!
//! [scan]
//! n = 1000
//! samples = 200
//! energy = 0.0
//!
//! [params]
//! kappa = 0.2
//!
//! [output]
//! dir = "out/lyapunov"
//! formats = ["csv", "json"]
//! ```
//!
//! Every section rejects unknown keys. After defaults are filled in, the
//! resolved configuration is written next to the results and can be run
//! again as is.

use std::path::{Path, PathBuf};

use cocycle_core::diophantine::NamedFrequency;
use cocycle_core::experiments::{linspace, spectral_grid, Setup};
use cocycle_core::potential::Potential;
use cocycle_core::Dynamics;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Lyapunov,
    ScaleConvergence,
    DeterminantLdt,
    UniformUpper,
    Resonance,
    GreenDecay,
    Localization,
    LargeDisorder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DynamicsKind {
    Shift,
    Skew,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frequency {
    Value(f64),
    Named(String),
}

impl Frequency {
    fn value(&self) -> Result<f64, String> {
        match self {
            Frequency::Value(v) => Ok(*v),
            Frequency::Named(n) => NamedFrequency::parse(n)
                .map(|f| f.value())
                .ok_or_else(|| format!("unknown frequency name `{n}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Frequencies {
    One(Frequency),
    Many(Vec<Frequency>),
}

/// A list of reals, an equally spaced range, or the spectral range
/// `[−λB₀ − 2, λB₀ + 2]` with a point count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    List(Vec<f64>),
    Range(RangeSpec),
    Spectral(SpectralSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub from: f64,
    pub to: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralSpec {
    pub spectral: usize,
}

impl GridSpec {
    pub fn points(&self, setup: &Setup) -> Vec<f64> {
        match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range(r) => linspace(r.from, r.to, r.count),
            GridSpec::Spectral(s) => spectral_grid(setup, s.spectral),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum L0Spec {
    Fixed(f64),
    /// `"lyapunov"`: half the measured exponent at each energy.
    Policy(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Model {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_alpha: Option<f64>,
    pub dynamics: DynamicsKind,
    pub omega: Frequencies,
    pub lambda: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nbar: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_box: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample_sup: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_r2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l0: Option<L0Spec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lyapunov_samples: Option<usize>,
    /// `"potential"` or `"eigenvalue"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigen_index: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub model: Model,
    #[serde(default)]
    pub scan: Scan,
    #[serde(default)]
    pub params: Params,
    #[serde(default)]
    pub output: Output,
}

/// A configuration problem, reported with exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| ConfigError(e.to_string()))
        } else {
            Self::parse(&text)
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }

    pub fn potential(&self, base: &Path) -> Result<Potential, ConfigError> {
        match (&self.model.potential, &self.model.grid) {
            (Some(spec), None) => Potential::parse(spec).map_err(|e| ConfigError(e.to_string())),
            (None, Some(grid)) => {
                let alpha = self
                    .model
                    .grid_alpha
                    .ok_or_else(|| ConfigError("model.grid needs model.grid_alpha".into()))?;
                let path = if grid.is_absolute() { grid.clone() } else { base.join(grid) };
                Potential::load_grid(&path, alpha).map_err(|e| ConfigError(e.to_string()))
            }
            (Some(_), Some(_)) => Err(ConfigError("give either model.potential or model.grid, not both".into())),
            (None, None) => Err(ConfigError("missing model.potential (or model.grid)".into())),
        }
    }

    pub fn dynamics(&self) -> Result<Dynamics, ConfigError> {
        let freqs: Vec<f64> = match &self.model.omega {
            Frequencies::One(f) => vec![f.value().map_err(ConfigError)?],
            Frequencies::Many(v) => v.iter().map(|f| f.value().map_err(ConfigError)).collect::<Result<_, _>>()?,
        };
        match (self.model.dynamics, freqs.as_slice()) {
            (DynamicsKind::Skew, [w]) => Ok(Dynamics::skew_shift(*w)),
            (DynamicsKind::Shift, [w1, w2]) => Ok(Dynamics::shift(*w1, *w2)),
            (DynamicsKind::Skew, _) => Err(ConfigError("skew dynamics takes one frequency".into())),
            (DynamicsKind::Shift, _) => Err(ConfigError("shift dynamics takes two frequencies".into())),
        }
    }

    /// Fills every default the chosen experiment reads, so the echoed
    /// configuration is complete.
    pub fn resolve(&mut self, seed_override: Option<u64>) {
        use ExperimentKind::*;
        let kind = self.experiment;
        if let Some(s) = seed_override {
            self.seed = Some(s);
        }
        self.seed.get_or_insert(cocycle_core::verify::DEFAULT_SEED);
        let s = &mut self.scan;
        let p = &mut self.params;
        let default_n = match kind {
            DeterminantLdt => 400,
            GreenDecay => 100,
            Resonance => 200,
            LargeDisorder => 50,
            _ => 1000,
        };
        match kind {
            Lyapunov => {
                s.n.get_or_insert(default_n);
                s.samples.get_or_insert(100);
                s.energy.get_or_insert(0.0);
            }
            ScaleConvergence => {
                s.scales.get_or_insert_with(|| vec![50, 100, 200, 400]);
                s.samples.get_or_insert(100);
                s.energy.get_or_insert(0.0);
            }
            DeterminantLdt => {
                s.n.get_or_insert(default_n);
                s.samples.get_or_insert(1000);
                s.energy.get_or_insert(0.0);
                p.kappa.get_or_insert(0.2);
            }
            UniformUpper => {
                s.n.get_or_insert(default_n);
                s.sample_sup.get_or_insert(1000);
                s.energy.get_or_insert(0.0);
                p.kappa.get_or_insert(0.1);
            }
            Resonance => {
                s.n.get_or_insert(default_n);
                s.nbar.get_or_insert_with(|| vec![100_000, 1_000_000]);
                s.x0.get_or_insert([0.0, 0.0]);
                s.xi.get_or_insert(GridSpec::Spectral(SpectralSpec { spectral: 101 }));
                p.kappa.get_or_insert(0.2);
                p.beta.get_or_insert(0.5);
                let target = p.target.get_or_insert_with(|| "potential".into()).clone();
                p.quadrature.get_or_insert(if target == "eigenvalue" { 128 } else { 1024 });
                if target == "eigenvalue" {
                    p.eigen_index.get_or_insert(0);
                }
            }
            GreenDecay => {
                s.n.get_or_insert(default_n);
                s.nbar.get_or_insert_with(|| vec![20_000]);
                s.x0.get_or_insert([0.0, 0.0]);
                s.energies.get_or_insert(GridSpec::Spectral(SpectralSpec { spectral: 201 }));
                p.l0.get_or_insert(L0Spec::Policy("lyapunov".into()));
                p.lyapunov_n.get_or_insert(200);
                p.lyapunov_samples.get_or_insert(10);
            }
            Localization => {
                s.n_box.get_or_insert(300);
                s.x0.get_or_insert([0.0, 0.0]);
                p.rho.get_or_insert(0.5);
                p.min_r2.get_or_insert(0.8);
                p.mass_level.get_or_insert(0.99);
                p.width.get_or_insert(60);
                p.lyapunov_n.get_or_insert(200);
                p.lyapunov_samples.get_or_insert(10);
            }
            LargeDisorder => {
                s.n.get_or_insert(default_n);
                s.samples.get_or_insert(1000);
                s.energies.get_or_insert(GridSpec::Spectral(SpectralSpec { spectral: 201 }));
                p.lambda0.get_or_insert(20.0);
            }
        }
        self.output.formats.get_or_insert_with(|| vec![Format::Csv, Format::Json]);
    }

    pub fn writes(&self, f: &Format) -> bool {
        self.output.formats.as_ref().is_none_or(|v| v.contains(f))
    }
}
