//! Decoding `t = a₁x₁ + a₂x₂` over the real two-user fading MAC with the 1-D
//! integer constellation `[-S_m, S_m]`.
//!
//! After MMSE scaling the observation is `ỹ = αy`. Solving `a₁x₁ + a₂x₂ = t`
//! (coprime `a`) through `x₁ = u₁t + a₂k`, `x₂ = u₂t − a₁k` turns the ML
//! likelihood into
//!
//! ```text
//! φ(t) = Σ_k exp(−(ỹ − γt + βk)² / 2σ̃²),   γ = h̃₁u₁ + h̃₂u₂,  β = a₁h̃₂ − a₂h̃₁,
//! ```
//!
//! where `k` runs over the finitely many values keeping `(x₁, x₂)` inside the
//! constellation. The near-ML decoder keeps only the dominant term, which is the
//! inhomogeneous diophantine approximation problem
//! `min |β′k − t − y′|` with `β′ = β/γ`, `y′ = −ỹ/γ`.

use crate::diophantine::{bounded_family, ceil_div, extended_gcd, floor_div, PairSolutionFamily};
use crate::error::{LatticeError, Result};
use crate::lattice::{IntegerBox, TIE_TOLERANCE};
use crate::selection::NetworkCodeVector;

/// Below this `|γ|` the IDA reduction is undefined.
pub const GAMMA_EPSILON: f64 = 1e-9;
/// Default cap on `|𝒜|²` for the exhaustive ML oracle.
pub const ML_PAIR_CAP: u128 = 10_000_000;

/// Scaled channel output of one two-user MAC use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledObservation {
    pub y: f64,
    pub h: [f64; 2],
    pub noise_var: f64,
    pub alpha: f64,
}

impl ScaledObservation {
    pub fn new(y: f64, h: [f64; 2], noise_var: f64, alpha: f64) -> Self {
        ScaledObservation { y, h, noise_var, alpha }
    }

    /// `ỹ = αy`.
    pub fn y_tilde(&self) -> f64 {
        self.alpha * self.y
    }

    /// `h̃ᵢ = αhᵢ`.
    pub fn h_tilde(&self) -> [f64; 2] {
        [self.alpha * self.h[0], self.alpha * self.h[1]]
    }

    /// `σ̃² = α²σ²`.
    pub fn noise_var_tilde(&self) -> f64 {
        self.alpha * self.alpha * self.noise_var
    }
}

fn pair(a: &NetworkCodeVector) -> Result<(i64, i64)> {
    match a.as_slice() {
        &[a1, a2] => Ok((a1, a2)),
        other => Err(LatticeError::DimensionMismatch { expected: 2, got: other.len() }),
    }
}

/// Range of `t = a₁x₁ + a₂x₂` over `[-S_m, S_m]²`.
pub fn candidate_set(a: &NetworkCodeVector, s_m: i64) -> Result<IntegerBox> {
    let (a1, a2) = pair(a)?;
    let r = (a1.abs() + a2.abs()) * s_m;
    IntegerBox::new(vec![(-r, r)])
}

/// Geometry of the likelihood for a coprime `a`.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodGeometry {
    pub a: [i64; 2],
    pub s_m: i64,
    pub u: [i64; 2],
    /// `γ = h̃₁u₁ + h̃₂u₂`.
    pub gamma: f64,
    /// `β = a₁h̃₂ − a₂h̃₁`.
    pub beta: f64,
    /// Admissible `t`.
    pub t_range: (i64, i64),
}

impl LikelihoodGeometry {
    pub fn new(obs: &ScaledObservation, a: &NetworkCodeVector, s_m: i64) -> Result<Self> {
        let (a1, a2) = pair(a)?;
        let (g, u1, u2) = extended_gcd(a1, a2)?;
        if g != 1 {
            return Err(LatticeError::NotCoprime(vec![a1, a2]));
        }
        let [h1, h2] = obs.h_tilde();
        let tb = candidate_set(a, s_m)?;
        Ok(LikelihoodGeometry {
            a: [a1, a2],
            s_m,
            u: [u1, u2],
            gamma: h1 * u1 as f64 + h2 * u2 as f64,
            beta: a1 as f64 * h2 - a2 as f64 * h1,
            t_range: tb.bounds()[0],
        })
    }

    /// `β′ = β/γ`.
    pub fn beta_prime(&self) -> f64 {
        self.beta / self.gamma
    }

    /// `y′ = −ỹ/γ`.
    pub fn y_prime(&self, obs: &ScaledObservation) -> f64 {
        -obs.y_tilde() / self.gamma
    }

    pub fn family(&self, t: i64) -> PairSolutionFamily {
        PairSolutionFamily { a1: self.a[0], a2: self.a[1], t, g: 1, u1: self.u[0], u2: self.u[1] }
    }

    pub fn symbol_box(&self) -> IntegerBox {
        IntegerBox::symmetric(2, self.s_m)
    }

    /// Admissible `(k, x₁, x₂)` for a given `t`.
    pub fn admissible(&self, t: i64) -> Vec<(i64, i64, i64)> {
        bounded_family(&self.family(t), &self.symbol_box())
    }

    /// Range of `k = u₂x₁ − u₁x₂` over the constellation.
    pub fn k_range(&self) -> (i64, i64) {
        let r = (self.u[0].abs() + self.u[1].abs()) * self.s_m;
        (-r, r)
    }

    /// Admissible `t` for a fixed `k`, intersected with `t_range`.
    pub fn t_interval(&self, k: i64) -> Option<(i64, i64)> {
        let s = self.s_m;
        let (mut lo, mut hi) = self.t_range;
        // x₁ = u₁t + a₂k, x₂ = u₂t − a₁k
        for (c, d) in [(self.u[0], self.a[1] * k), (self.u[1], -self.a[0] * k)] {
            if c == 0 {
                if d.abs() > s {
                    return None;
                }
                continue;
            }
            let (a, b) = if c > 0 {
                (ceil_div(-s - d, c), floor_div(s - d, c))
            } else {
                (ceil_div(s - d, c), floor_div(-s - d, c))
            };
            lo = lo.max(a);
            hi = hi.min(b);
        }
        (lo <= hi).then_some((lo, hi))
    }
}

/// Exponent terms `−(ỹ − γt + βk)²/2σ̃²` over the admissible `k`.
fn exponents(t: i64, geom: &LikelihoodGeometry, obs: &ScaledObservation) -> Vec<f64> {
    let yt = obs.y_tilde();
    let s2 = obs.noise_var_tilde();
    geom.admissible(t)
        .into_iter()
        .map(|(k, _, _)| {
            let r = yt - geom.gamma * t as f64 + geom.beta * k as f64;
            -r * r / (2.0 * s2)
        })
        .collect()
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `φ(t)` summed over the shaping-admissible `k`.
pub fn likelihood(t: i64, geom: &LikelihoodGeometry, obs: &ScaledObservation) -> f64 {
    exponents(t, geom, obs).iter().map(|e| e.exp()).sum()
}

/// `ln φ(t)`, stable at high SNR; `-∞` when no `k` is admissible.
pub fn log_likelihood(t: i64, geom: &LikelihoodGeometry, obs: &ScaledObservation) -> f64 {
    log_sum_exp(&exponents(t, geom, obs))
}

/// `(t, φ(t))` over an inclusive range of `t`.
pub fn likelihood_profile(
    geom: &LikelihoodGeometry,
    obs: &ScaledObservation,
    t_range: (i64, i64),
) -> Vec<(i64, f64)> {
    (t_range.0..=t_range.1).map(|t| (t, likelihood(t, geom, obs))).collect()
}

/// Whether `t` beats `best_t` when their scores tie: smaller `|t|`, then smaller `t`.
fn t_precedes(t: i64, best_t: i64) -> bool {
    (t.abs(), t) < (best_t.abs(), best_t)
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_TOLERANCE * a.abs().max(b.abs())
}

/// Solution of the shaped IDA problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdaDecision {
    pub t: i64,
    pub k: i64,
    /// `F(t, k) = |β′k − t − y′|`.
    pub residual: f64,
}

/// `F(t, k) = |β′k − t − y′|`.
pub fn ida_residual(beta_prime: f64, y_prime: f64, t: i64, k: i64) -> f64 {
    (beta_prime * k as f64 - t as f64 - y_prime).abs()
}

/// Near-ML decision `argmin_{t ∈ 𝒜_t, k admissible} |β′k − t − y′|`.
///
/// For each `k` in the constellation's `k` range the admissible `t` form an
/// interval, and `F` is convex in `t`, so the best `t` is the nearest integer
/// to `β′k − y′` clamped into that interval. Ties go to smaller `|t|`, then
/// smaller `t`, then smaller `k`.
pub fn ida_decode(obs: &ScaledObservation, geom: &LikelihoodGeometry) -> Result<IdaDecision> {
    if !(geom.gamma.abs() >= GAMMA_EPSILON) {
        return Err(LatticeError::DegenerateGeometry(geom.gamma.abs()));
    }
    let bp = geom.beta_prime();
    let yp = geom.y_prime(obs);
    let (k_lo, k_hi) = geom.k_range();
    let mut best: Option<IdaDecision> = None;
    for k in k_lo..=k_hi {
        let Some((t_lo, t_hi)) = geom.t_interval(k) else {
            continue;
        };
        let target = bp * k as f64 - yp;
        let fl = target.floor();
        let below = (fl as i64).clamp(t_lo, t_hi);
        let above = (fl as i64 + 1).clamp(t_lo, t_hi);
        for t in [below, above] {
            let f = ida_residual(bp, yp, t, k);
            let better = match &best {
                None => true,
                Some(b) => {
                    f < b.residual - TIE_TOLERANCE * f.max(b.residual)
                        || (tied(f, b.residual) && (t_precedes(t, b.t) || (t == b.t && k < b.k)))
                }
            };
            if better {
                best = Some(IdaDecision { t, k, residual: f });
            }
        }
    }
    best.ok_or(LatticeError::EmptyConstraint)
}

/// Conventional CF decision: `round(ỹ)` clamped to `𝒜_t`.
pub fn conventional_decode_1d(obs: &ScaledObservation, a: &NetworkCodeVector, s_m: i64) -> Result<i64> {
    let (lo, hi) = candidate_set(a, s_m)?.bounds()[0];
    let r = obs.y_tilde().round();
    Ok(if r <= lo as f64 {
        lo
    } else if r >= hi as f64 {
        hi
    } else {
        r as i64
    })
}

/// Exact ML decision and its log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlDecision {
    pub t: i64,
    pub log_phi: f64,
}

/// `ln φ(t)` for every reachable `t`, computed by the direct pair sum over
/// `(x₁, x₂) ∈ [-S_m, S_m]²` with `a₁x₁ + a₂x₂ = t`.
pub fn pair_log_likelihoods(obs: &ScaledObservation, a: &NetworkCodeVector, s_m: i64) -> Result<Vec<(i64, f64)>> {
    let (a1, a2) = pair(a)?;
    let side = (2 * s_m + 1) as u128;
    if side * side > ML_PAIR_CAP {
        return Err(LatticeError::TooLarge { size: side * side, cap: ML_PAIR_CAP });
    }
    let yt = obs.y_tilde();
    let [h1, h2] = obs.h_tilde();
    let s2 = obs.noise_var_tilde();
    let (lo, hi) = candidate_set(a, s_m)?.bounds()[0];
    let mut terms: Vec<Vec<f64>> = vec![Vec::new(); (hi - lo + 1) as usize];
    for x1 in -s_m..=s_m {
        for x2 in -s_m..=s_m {
            let t = a1 * x1 + a2 * x2;
            let r = yt - h1 * x1 as f64 - h2 * x2 as f64;
            terms[(t - lo) as usize].push(-r * r / (2.0 * s2));
        }
    }
    Ok(terms
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_empty())
        .map(|(i, v)| (lo + i as i64, log_sum_exp(v)))
        .collect())
}

/// Exhaustive ML decoding over the finite constellation.
pub fn exhaustive_ml_decode(obs: &ScaledObservation, a: &NetworkCodeVector, s_m: i64) -> Result<MlDecision> {
    let table = pair_log_likelihoods(obs, a, s_m)?;
    let mut best: Option<MlDecision> = None;
    for (t, lp) in table {
        let better = match &best {
            None => true,
            Some(b) => lp > b.log_phi && !tied(lp, b.log_phi) || (tied(lp, b.log_phi) && t_precedes(t, b.t)),
        };
        if better {
            best = Some(MlDecision { t, log_phi: lp });
        }
    }
    best.ok_or(LatticeError::EmptyConstraint)
}
