//! Receiver parameter selection: computation rate, MMSE scaling and the
//! optimal network-code vector.

use nalgebra::DMatrix;

use crate::error::{LatticeError, Result};
use crate::lattice::{shortest_vector, shortest_vector_within};

/// Converts an SNR in dB to the linear ratio `ρ = 10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// One use of the real fading MAC: `y = Σ hᵢ xᵢ + z`, `z ~ N(0, σ²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: Vec<f64>,
    noise_var: f64,
    power: f64,
}

impl ChannelRealization {
    pub fn new(h: Vec<f64>, noise_var: f64, power: f64) -> Result<Self> {
        if h.is_empty() {
            return Err(LatticeError::InvalidChannel("no sources".into()));
        }
        if !(noise_var > 0.0) || !(power > 0.0) {
            return Err(LatticeError::InvalidChannel(format!(
                "noise variance {noise_var} and power {power} must be positive"
            )));
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(LatticeError::InvalidChannel("non-finite fading".into()));
        }
        Ok(ChannelRealization { h, noise_var, power })
    }

    /// Channel at `snr_db` for a given power: `σ² = P / ρ`.
    pub fn from_snr_db(h: Vec<f64>, snr_db: f64, power: f64) -> Result<Self> {
        Self::new(h, power / db_to_linear(snr_db), power)
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn sources(&self) -> usize {
        self.h.len()
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    /// `ρ = P / σ²`.
    pub fn snr(&self) -> f64 {
        self.power / self.noise_var
    }
}

/// Integer coefficients `a` of the decoded combination `Σ aᵢ xᵢ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NetworkCodeVector(Vec<i64>);

impl NetworkCodeVector {
    pub fn new(a: Vec<i64>) -> Result<Self> {
        if a.is_empty() || a.iter().all(|&v| v == 0) {
            return Err(LatticeError::ZeroCodeVector);
        }
        Ok(NetworkCodeVector(a))
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn gcd(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &v| num_integer::gcd(g, v))
    }

    pub fn norm2(&self) -> f64 {
        self.0.iter().map(|&v| (v * v) as f64).sum()
    }
}

impl From<NetworkCodeVector> for Vec<i64> {
    fn from(a: NetworkCodeVector) -> Self {
        a.0
    }
}

fn check_len(ch: &ChannelRealization, a: &NetworkCodeVector) -> Result<()> {
    if a.len() != ch.sources() {
        return Err(LatticeError::DimensionMismatch { expected: ch.sources(), got: a.len() });
    }
    Ok(())
}

/// `R = ½ log₂⁺(ρ / (α² + ρ‖αh − a‖²))` in bits per real dimension.
pub fn computation_rate(ch: &ChannelRealization, a: &NetworkCodeVector, alpha: f64) -> Result<f64> {
    check_len(ch, a)?;
    let rho = ch.snr();
    let mismatch: f64 = ch
        .h()
        .iter()
        .zip(a.as_slice())
        .map(|(&h, &ai)| (alpha * h - ai as f64).powi(2))
        .sum();
    let arg = rho / (alpha * alpha + rho * mismatch);
    Ok(if arg > 1.0 { 0.5 * arg.log2() } else { 0.0 })
}

/// MMSE scaling `α = ρ hᵗa / (1 + ρ‖h‖²)`.
pub fn optimal_alpha(ch: &ChannelRealization, a: &NetworkCodeVector) -> Result<f64> {
    check_len(ch, a)?;
    let rho = ch.snr();
    let ha: f64 = ch.h().iter().zip(a.as_slice()).map(|(&h, &ai)| h * ai as f64).sum();
    let hh: f64 = ch.h().iter().map(|h| h * h).sum();
    Ok(rho * ha / (1.0 + rho * hh))
}

/// `G = I − ρ/(1 + ρ‖h‖²)·hhᵗ`.
pub fn coefficient_gram(ch: &ChannelRealization) -> DMatrix<f64> {
    let n = ch.sources();
    let rho = ch.snr();
    let hh: f64 = ch.h().iter().map(|h| h * h).sum();
    let c = rho / (1.0 + rho * hh);
    let h = ch.h();
    DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - c * h[i] * h[j])
}

/// Shortest vector of [`coefficient_gram`], sign normalized.
pub fn optimal_coefficients(ch: &ChannelRealization) -> Result<NetworkCodeVector> {
    let sv = shortest_vector(&coefficient_gram(ch))?;
    NetworkCodeVector::new(sv.coeffs)
}

/// [`optimal_coefficients`] over `|aᵢ| ≤ bound`.
pub fn optimal_coefficients_within(ch: &ChannelRealization, bound: i64) -> Result<NetworkCodeVector> {
    let sv = shortest_vector_within(&coefficient_gram(ch), Some(bound))?;
    NetworkCodeVector::new(sv.coeffs)
}
