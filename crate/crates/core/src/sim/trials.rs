//! Single seeded trials. Each trial owns a ChaCha stream selected by
//! `(point << 32) | trial`, so any trial can be replayed in isolation.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{LatticeError, Result};
use crate::fading::{conventional_decode_1d, exhaustive_ml_decode, ida_decode, LikelihoodGeometry, ScaledObservation};
use crate::gaussian::{GaussianDecoder, GaussianReceiver};
use crate::selection::{optimal_alpha, optimal_coefficients, optimal_coefficients_within, ChannelRealization};

use super::config::{FadingPlan, GaussianPlan};

/// Stream id of a trial.
pub fn stream_id(point: u32, trial: u64) -> u64 {
    assert!(trial < 1 << 32, "trial index exceeds the stream layout");
    ((point as u64) << 32) | trial
}

pub fn trial_rng(seed: u64, point: u32, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(point, trial));
    rng
}

/// Decoders for `t = a₁x₁ + a₂x₂` on the fading MAC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FadingDecoder {
    Conventional,
    Ida,
    Ml,
}

impl FadingDecoder {
    pub const ALL: [FadingDecoder; 3] = [FadingDecoder::Conventional, FadingDecoder::Ida, FadingDecoder::Ml];

    pub fn name(&self) -> &'static str {
        match self {
            FadingDecoder::Conventional => "conventional",
            FadingDecoder::Ida => "ida",
            FadingDecoder::Ml => "ml",
        }
    }
}

impl fmt::Display for FadingDecoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FadingDecoder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown fading decoder `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderOutcome {
    pub decoder: &'static str,
    pub decision: Option<Vec<i64>>,
    pub correct: bool,
    pub error: Option<LatticeError>,
}

impl DecoderOutcome {
    fn new(decoder: &'static str, decision: Result<Vec<i64>>, target: &[i64]) -> Self {
        match decision {
            Ok(d) => DecoderOutcome { decoder, correct: d == target, decision: Some(d), error: None },
            Err(e) => DecoderOutcome { decoder, decision: None, correct: false, error: Some(e) },
        }
    }
}

/// Everything drawn and decided in one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub stream: u64,
    /// Transmitted symbols, one vector per source.
    pub symbols: Vec<Vec<i64>>,
    pub fading: Vec<f64>,
    pub noise: Vec<f64>,
    /// What the receiver must recover: `t` for fading, the sum coefficients otherwise.
    pub target: Vec<i64>,
    /// Network code vector used by the fading receiver.
    pub code_vector: Vec<i64>,
    pub outcomes: Vec<DecoderOutcome>,
}

impl TrialRecord {
    pub fn errors(&self) -> impl Iterator<Item = bool> + '_ {
        self.outcomes.iter().map(|o| !o.correct)
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform symbols on `[-S_m, S_m]`, fresh `h ~ N(0, I)` unless the plan fixes
/// it, noise at `σ² = σ_x²/ρ`; the receiver picks the shortest-vector `a` and
/// MMSE `α`.
pub fn run_fading_trial(plan: &FadingPlan, point: u32, trial: u64) -> TrialRecord {
    let mut rng = trial_rng(plan.seed, point, trial);
    let s = plan.s_m;
    let x = [rng.random_range(-s..=s), rng.random_range(-s..=s)];
    let h = match plan.fixed_h {
        Some(h) => h,
        None => [normal(&mut rng), normal(&mut rng)],
    };
    let power = plan.power();
    let noise_var = power / crate::selection::db_to_linear(plan.snr_db[point as usize]);
    let z = noise_var.sqrt() * normal(&mut rng);
    let y = h[0] * x[0] as f64 + h[1] * x[1] as f64 + z;

    let mut record = TrialRecord {
        stream: stream_id(point, trial),
        symbols: vec![vec![x[0]], vec![x[1]]],
        fading: h.to_vec(),
        noise: vec![z],
        target: Vec::new(),
        code_vector: Vec::new(),
        outcomes: Vec::new(),
    };
    let setup = ChannelRealization::new(h.to_vec(), noise_var, power).and_then(|ch| {
        let a = match plan.a_bound {
            Some(b) => optimal_coefficients_within(&ch, b)?,
            None => optimal_coefficients(&ch)?,
        };
        let alpha = optimal_alpha(&ch, &a)?;
        Ok((a, alpha))
    });
    let (a, alpha) = match setup {
        Ok(v) => v,
        Err(e) => {
            record.outcomes = plan
                .decoders
                .iter()
                .map(|d| DecoderOutcome { decoder: d.name(), decision: None, correct: false, error: Some(e.clone()) })
                .collect();
            return record;
        }
    };
    let t = a.as_slice()[0] * x[0] + a.as_slice()[1] * x[1];
    record.target = vec![t];
    record.code_vector = a.as_slice().to_vec();
    let obs = ScaledObservation::new(y, h, noise_var, alpha);
    record.outcomes = plan
        .decoders
        .iter()
        .map(|&d| {
            let decision = match d {
                FadingDecoder::Conventional => conventional_decode_1d(&obs, &a, s),
                FadingDecoder::Ida => LikelihoodGeometry::new(&obs, &a, s)
                    .and_then(|g| ida_decode(&obs, &g).map(|r| r.t))
                    .or_else(|e| match e {
                        LatticeError::DegenerateGeometry(_) => exhaustive_ml_decode(&obs, &a, s).map(|m| m.t),
                        e => Err(e),
                    }),
                FadingDecoder::Ml => exhaustive_ml_decode(&obs, &a, s).map(|m| m.t),
            };
            DecoderOutcome::new(d.name(), decision.map(|t| vec![t]), &record.target)
        })
        .collect();
    record
}

/// `N` uniform codewords, `y = Σ xᵢ + z`; an error is any decision other than
/// the unreduced sum.
pub fn run_gaussian_trial(plan: &GaussianPlan, receiver: &GaussianReceiver<'_>, point: u32, trial: u64) -> TrialRecord {
    let mut rng = trial_rng(plan.seed, point, trial);
    let code = &plan.code;
    let n = code.dim();
    let symbols: Vec<Vec<i64>> = (0..plan.sum.sources())
        .map(|_| code.coefficients()[rng.random_range(0..code.len())].clone())
        .collect();
    let mut target = vec![0i64; n];
    for s in &symbols {
        for (t, v) in target.iter_mut().zip(s) {
            *t += v;
        }
    }
    let sigma = plan.noise_var(plan.snr_db[point as usize]).sqrt();
    let lambda = code.fine().point(&target);
    let noise: Vec<f64> = (0..lambda.len()).map(|_| sigma * normal(&mut rng)).collect();
    let y: Vec<f64> = lambda.iter().zip(&noise).map(|(a, b)| a + b).collect();
    let outcomes = plan
        .decoders
        .iter()
        .map(|&d: &GaussianDecoder| DecoderOutcome::new(d.name(), receiver.decode(d, &y).map(|r| r.coeffs), &target))
        .collect();
    TrialRecord {
        stream: stream_id(point, trial),
        symbols,
        fading: vec![1.0; plan.sum.sources()],
        noise,
        target,
        code_vector: vec![1; plan.sum.sources()],
        outcomes,
    }
}
