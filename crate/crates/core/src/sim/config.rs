//! TOML configuration and its validation into runnable plans.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::code::NestedLatticeCode;
use crate::gaussian::{build_sum_codebook, GaussianDecoder, SumCodebook};
use crate::lattice::Lattice;

use super::trials::{trial_rng, FadingDecoder};

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_TARGET_ERRORS: u64 = 100;
pub const DEFAULT_BATCH: u64 = 2048;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: PathBuf, reason: String },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    #[serde(rename = "fading-1d")]
    Fading1d,
    GaussianMap,
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Fading1d => "fading-1d",
            ScenarioKind::GaussianMap => "gaussian-map",
        }
    }
}

/// Either an explicit list or an inclusive `start..=stop` range.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum SnrGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl SnrGrid {
    pub fn values(&self) -> Result<Vec<f64>, ConfigError> {
        let v = match self {
            SnrGrid::List(v) => v.clone(),
            SnrGrid::Range { start, stop, step } => {
                if !(*step > 0.0) || !(stop >= start) {
                    return invalid("snr range needs step > 0 and stop >= start");
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                (0..=n).map(|i| start + step * i as f64).collect()
            }
        };
        if v.is_empty() {
            return invalid("snr grid is empty");
        }
        if v.iter().any(|x| !x.is_finite()) {
            return invalid("snr grid has non-finite values");
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FadingSection {
    pub s_m: i64,
    /// Keep `h` fixed for the whole sweep.
    #[serde(default)]
    pub slow: bool,
    /// Fixed fading for slow mode; drawn from the seed when absent.
    pub h: Option<[f64; 2]>,
    /// Restricts the network code vector search to `|aᵢ| ≤ a_bound`.
    pub a_bound: Option<i64>,
}

/// Coarse lattice as `c·I` or as explicit generator rows.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum CoarseSpec {
    Scale(f64),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeSection {
    /// Fine generator rows (basis vectors are columns).
    pub fine: Vec<Vec<f64>>,
    pub coarse: CoarseSpec,
    pub power: Option<f64>,
    #[serde(default = "default_sources")]
    pub sources: usize,
}

fn default_sources() -> usize {
    2
}

impl CodeSection {
    pub fn build(&self) -> Result<NestedLatticeCode, ConfigError> {
        let fine = Lattice::from_rows(&self.fine).map_err(|e| ConfigError::Invalid(format!("fine lattice: {e}")))?;
        let coarse = match &self.coarse {
            CoarseSpec::Scale(c) => Lattice::scaled_identity(fine.ambient_dim(), *c),
            CoarseSpec::Rows(r) => Lattice::from_rows(r),
        }
        .map_err(|e| ConfigError::Invalid(format!("coarse lattice: {e}")))?;
        NestedLatticeCode::new(fine, coarse, self.power).map_err(|e| ConfigError::Invalid(format!("code: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub h: Vec<f64>,
    pub snr_db: f64,
    pub a: Option<Vec<i64>>,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    pub s_m: i64,
    pub x: [i64; 2],
    pub h: [f64; 2],
    pub snr_db: f64,
    pub a: Option<[i64; 2]>,
    /// Noise realization added to the observation.
    #[serde(default)]
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scenario: Option<ScenarioKind>,
    #[serde(default)]
    pub seed: u64,
    pub snr_db: Option<SnrGrid>,
    /// Trial cap per SNR point.
    pub trials: Option<u64>,
    /// Stop a point once every decoder has this many errors; 0 disables.
    pub target_errors: Option<u64>,
    pub batch: Option<u64>,
    pub decoders: Option<Vec<String>>,
    pub output: Option<PathBuf>,
    pub fading: Option<FadingSection>,
    pub code: Option<CodeSection>,
    pub channel: Option<ChannelSection>,
    pub profile: Option<ProfileSection>,
}

impl SimConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        toml::from_str(s).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.to_path_buf(), reason: e.to_string() })?;
        Self::from_toml_str(&s)
    }

    fn expect_scenario(&self, kind: ScenarioKind) -> Result<(), ConfigError> {
        match self.scenario {
            Some(k) if k != kind => invalid(format!("scenario is {}, expected {}", k.name(), kind.name())),
            _ => Ok(()),
        }
    }

    fn run_settings(&self) -> Result<RunSettings, ConfigError> {
        let snr_db = self.snr_db.as_ref().map_or_else(|| invalid("missing snr_db"), SnrGrid::values)?;
        let max_trials = self.trials.unwrap_or(DEFAULT_TRIALS);
        if max_trials == 0 {
            return invalid("trials must be at least 1");
        }
        if max_trials >= 1 << 32 {
            return invalid("trials must be below 2^32");
        }
        let batch = self.batch.unwrap_or(DEFAULT_BATCH);
        if batch == 0 {
            return invalid("batch must be at least 1");
        }
        if snr_db.len() >= u32::MAX as usize {
            return invalid("snr grid too long");
        }
        let decoders = self.decoders.clone().unwrap_or_default();
        if decoders.is_empty() {
            return invalid("decoder list is empty");
        }
        Ok(RunSettings {
            seed: self.seed,
            snr_db,
            max_trials,
            target_errors: self.target_errors.unwrap_or(DEFAULT_TARGET_ERRORS),
            batch,
            decoders,
        })
    }

    pub fn fading_plan(&self) -> Result<FadingPlan, ConfigError> {
        self.expect_scenario(ScenarioKind::Fading1d)?;
        let rs = self.run_settings()?;
        let sec = self.fading.as_ref().ok_or_else(|| ConfigError::Invalid("missing [fading] table".into()))?;
        if sec.s_m < 1 {
            return invalid("s_m must be at least 1");
        }
        if sec.a_bound.is_some_and(|b| b < 1) {
            return invalid("a_bound must be at least 1");
        }
        let decoders = parse_decoders::<FadingDecoder>(&rs.decoders)?;
        let fixed_h = match (sec.slow, sec.h) {
            (false, Some(_)) => return invalid("fading.h requires slow = true"),
            (false, None) => None,
            (true, Some(h)) => Some(h),
            (true, None) => {
                use rand::Rng;
                use rand_distr::StandardNormal;
                let mut rng = trial_rng(rs.seed, u32::MAX, 0);
                Some([rng.sample(StandardNormal), rng.sample(StandardNormal)])
            }
        };
        Ok(FadingPlan {
            s_m: sec.s_m,
            seed: rs.seed,
            snr_db: rs.snr_db,
            max_trials: rs.max_trials,
            target_errors: rs.target_errors,
            batch: rs.batch,
            decoders,
            fixed_h,
            a_bound: sec.a_bound,
        })
    }

    pub fn gaussian_plan(&self) -> Result<GaussianPlan, ConfigError> {
        self.expect_scenario(ScenarioKind::GaussianMap)?;
        let rs = self.run_settings()?;
        let sec = self.code.as_ref().ok_or_else(|| ConfigError::Invalid("missing [code] table".into()))?;
        if sec.sources == 0 {
            return invalid("sources must be at least 1");
        }
        let decoders = parse_decoders::<GaussianDecoder>(&rs.decoders)?;
        let code = sec.build()?;
        let sum = build_sum_codebook(&code, sec.sources).map_err(|e| ConfigError::Invalid(format!("sum codebook: {e}")))?;
        Ok(GaussianPlan {
            code,
            sum,
            seed: rs.seed,
            snr_db: rs.snr_db,
            max_trials: rs.max_trials,
            target_errors: rs.target_errors,
            batch: rs.batch,
            decoders,
        })
    }
}

struct RunSettings {
    seed: u64,
    snr_db: Vec<f64>,
    max_trials: u64,
    target_errors: u64,
    batch: u64,
    decoders: Vec<String>,
}

fn parse_decoders<D>(names: &[String]) -> Result<Vec<D>, ConfigError>
where
    D: std::str::FromStr<Err = String> + PartialEq,
{
    let mut out = Vec::new();
    for n in names {
        let d: D = n.parse().map_err(ConfigError::Invalid)?;
        if out.contains(&d) {
            return invalid(format!("decoder `{n}` listed twice"));
        }
        out.push(d);
    }
    Ok(out)
}

/// Validated fading sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingPlan {
    pub s_m: i64,
    pub seed: u64,
    pub snr_db: Vec<f64>,
    pub max_trials: u64,
    pub target_errors: u64,
    pub batch: u64,
    pub decoders: Vec<FadingDecoder>,
    pub fixed_h: Option<[f64; 2]>,
    pub a_bound: Option<i64>,
}

impl FadingPlan {
    /// Second moment of the uniform constellation `[-S_m, S_m]`.
    pub fn power(&self) -> f64 {
        (self.s_m * (self.s_m + 1)) as f64 / 3.0
    }
}

/// Validated Gaussian-MAC sweep.
#[derive(Debug, Clone)]
pub struct GaussianPlan {
    pub code: NestedLatticeCode,
    pub sum: SumCodebook,
    pub seed: u64,
    pub snr_db: Vec<f64>,
    pub max_trials: u64,
    pub target_errors: u64,
    pub batch: u64,
    pub decoders: Vec<GaussianDecoder>,
}

impl GaussianPlan {
    /// Per-dimension noise variance `σ² = σ_x² / ρ`.
    pub fn noise_var(&self, snr_db: f64) -> f64 {
        self.code.second_moment() / crate::selection::db_to_linear(snr_db)
    }
}
