use serde::Deserialize;
use serde_json::Value;

use resource_kan::pcat::Variance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Reach,
    Collapse,
    Extend,
    Verify,
    Lorenz,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Reduction,
    Monotonicity,
    Optimality,
    HlpAgreement,
    DataProcessing,
    Coincidence,
}

impl Property {
    pub fn name(self) -> &'static str {
        match self {
            Property::Reduction => "reduction",
            Property::Monotonicity => "monotonicity",
            Property::Optimality => "optimality",
            Property::HlpAgreement => "hlp_agreement",
            Property::DataProcessing => "data_processing",
            Property::Coincidence => "coincidence",
        }
    }
}

/// Source objects to range over when computing an extension.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CandidateSpec {
    /// Explicit objects of the source theory.
    List {
        items: Vec<Value>,
        /// The list provably attains the extension.
        #[serde(default)]
        complete: bool,
    },
    /// Every distribution on `dim` outcomes with weights in multiples of `step`.
    Grid { step: f64, dim: usize },
    /// The spectrum of each (density-matrix) target.
    Spectral,
}

/// One run of the tool, read from a single JSON document.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub theory: Option<String>,
    pub source_theory: Option<String>,
    pub target_theory: Option<String>,
    pub functor: Option<String>,
    pub monotone: Option<String>,
    pub variance: Option<Variance>,
    pub from: Option<Value>,
    pub to: Option<Value>,
    pub objects: Option<Vec<Value>>,
    pub format: Option<String>,
    pub candidates: Option<CandidateSpec>,
    pub targets: Option<Vec<Value>>,
    pub property: Option<Property>,
    pub samples: Option<usize>,
    /// Reduction only: add the sampled objects to the candidates (default true).
    pub include_samples: Option<bool>,
    pub dim: Option<usize>,
    pub step: Option<f64>,
    pub bases: Option<usize>,
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
}

pub const MIN_GRID_STEP: f64 = 0.01;
pub const MAX_GRID_STEP: f64 = 0.25;

pub fn check_grid_step(step: f64) -> anyhow::Result<()> {
    if !(MIN_GRID_STEP - 1e-12..=MAX_GRID_STEP + 1e-12).contains(&step) {
        anyhow::bail!("grid step {step} outside [{MIN_GRID_STEP}, {MAX_GRID_STEP}]");
    }
    Ok(())
}
