//! Likelihood profiles `φ(t)` for a single fixed observation.

use crate::error::Result;
use crate::fading::{log_likelihood, LikelihoodGeometry, ScaledObservation};
use crate::selection::{optimal_alpha, optimal_coefficients, ChannelRealization, NetworkCodeVector};

use super::config::ProfileSection;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub t: i64,
    pub phi: f64,
    pub log_phi: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodProfile {
    pub a: [i64; 2],
    pub alpha: f64,
    pub y: f64,
    pub y_tilde: f64,
    /// `a₁x₁ + a₂x₂` for the transmitted symbols.
    pub t_true: i64,
    pub rows: Vec<ProfileRow>,
}

impl LikelihoodProfile {
    /// Rows sorted by decreasing likelihood.
    pub fn ranked(&self) -> Vec<&ProfileRow> {
        let mut r: Vec<&ProfileRow> = self.rows.iter().filter(|r| r.log_phi.is_finite()).collect();
        r.sort_by(|a, b| b.log_phi.total_cmp(&a.log_phi).then(a.t.abs().cmp(&b.t.abs())).then(a.t.cmp(&b.t)));
        r
    }

    pub fn argmax(&self) -> Option<i64> {
        self.ranked().first().map(|r| r.t)
    }

    /// `1 − φ(second)/φ(first)`, the relative gap between the two largest values.
    pub fn top_gap(&self) -> Option<f64> {
        let r = self.ranked();
        (r.len() >= 2).then(|| 1.0 - (r[1].log_phi - r[0].log_phi).exp())
    }

    /// Every `t` whose likelihood is within `rel` of the maximum.
    pub fn near_ties(&self, rel: f64) -> Vec<i64> {
        let r = self.ranked();
        let Some(top) = r.first().map(|r| r.log_phi) else {
            return Vec::new();
        };
        let mut t: Vec<i64> = r.iter().filter(|x| 1.0 - (x.log_phi - top).exp() < rel).map(|x| x.t).collect();
        t.sort();
        t
    }
}

/// Builds the observation `y = h·x + z` at `σ² = σ_x²/ρ` and evaluates `φ(t)`
/// over the whole candidate set.
pub fn likelihood_profile_for(sec: &ProfileSection) -> Result<LikelihoodProfile> {
    let s = sec.s_m;
    let power = (s * (s + 1)) as f64 / 3.0;
    let ch = ChannelRealization::from_snr_db(sec.h.to_vec(), sec.snr_db, power)?;
    let a = match sec.a {
        Some(a) => NetworkCodeVector::new(a.to_vec())?,
        None => optimal_coefficients(&ch)?,
    };
    let alpha = optimal_alpha(&ch, &a)?;
    let y = sec.h[0] * sec.x[0] as f64 + sec.h[1] * sec.x[1] as f64 + sec.z;
    let obs = ScaledObservation::new(y, sec.h, ch.noise_var(), alpha);
    let geom = LikelihoodGeometry::new(&obs, &a, s)?;
    let rows = (geom.t_range.0..=geom.t_range.1)
        .map(|t| {
            let lp = log_likelihood(t, &geom, &obs);
            ProfileRow { t, phi: lp.exp(), log_phi: lp }
        })
        .collect();
    let av = [a.as_slice()[0], a.as_slice()[1]];
    Ok(LikelihoodProfile {
        a: av,
        alpha,
        y,
        y_tilde: obs.y_tilde(),
        t_true: av[0] * sec.x[0] + av[1] * sec.x[1],
        rows,
    })
}
