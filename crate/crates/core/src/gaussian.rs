//! MAP decoding of the sum `λ_s = Σ xᵢ` of `N` uniform codewords over the
//! Gaussian MAC `y = λ_s + z`.
//!
//! Modelling `λ_s` as a discrete Gaussian of variance `σ_s² = N·σ_x²` turns the
//! MAP rule into `argmin ‖y − λ‖² + β²‖λ‖²` with `β = σ/σ_s`, which is a
//! closest-point query in the stacked lattice `[M; βM]`, or equivalently in `BM`
//! after the MMSE-GDFE filters `(F, B)`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::code::{NestedLatticeCode, CODEBOOK_CAP};
use crate::error::{LatticeError, Result};
use crate::lattice::{closest_point, closest_point_shaped, CoefficientSet, Lattice, Shaping, TIE_TOLERANCE};

/// Support and exact distribution of the `N`-fold sum of i.i.d. uniform codewords.
#[derive(Debug, Clone)]
pub struct SumCodebook {
    sources: usize,
    coeffs: Vec<Vec<i64>>,
    points: Vec<Vec<f64>>,
    counts: Vec<u128>,
    total: u128,
    pmf: Vec<f64>,
    sigma_s2: f64,
    index: HashMap<Vec<i64>, usize>,
    set: CoefficientSet,
}

impl SumCodebook {
    pub fn sources(&self) -> usize {
        self.sources
    }

    pub fn dim(&self) -> usize {
        self.set.dim()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Fine-lattice coordinates of the support, sorted lexicographically.
    pub fn coefficients(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Number of `N`-tuples producing each support point.
    pub fn counts(&self) -> &[u128] {
        &self.counts
    }

    /// `|C|^N`.
    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Model variance `N·σ_x²`.
    pub fn sigma_s2(&self) -> f64 {
        self.sigma_s2
    }

    /// The exact coefficient support as a shaping set.
    pub fn shaping(&self) -> &CoefficientSet {
        &self.set
    }

    pub fn index_of(&self, coeffs: &[i64]) -> Option<usize> {
        self.index.get(coeffs).copied()
    }

    pub fn probability(&self, coeffs: &[i64]) -> f64 {
        self.index_of(coeffs).map_or(0.0, |i| self.pmf[i])
    }
}

/// Exact sum codebook by iterated convolution of the codeword distribution.
pub fn build_sum_codebook(code: &NestedLatticeCode, sources: usize) -> Result<SumCodebook> {
    build_sum_codebook_capped(code, sources, CODEBOOK_CAP)
}

pub fn build_sum_codebook_capped(code: &NestedLatticeCode, sources: usize, cap: u128) -> Result<SumCodebook> {
    if sources == 0 {
        return Err(LatticeError::InvalidParameter("at least one source is required".into()));
    }
    if code.is_empty() {
        return Err(LatticeError::EmptyCodebook);
    }
    let n = code.dim();
    let mut dist: BTreeMap<Vec<i64>, u128> = BTreeMap::new();
    dist.insert(vec![0; n], 1);
    for _ in 0..sources {
        let mut next: BTreeMap<Vec<i64>, u128> = BTreeMap::new();
        for (s, &c) in &dist {
            for w in code.coefficients() {
                let key: Vec<i64> = s.iter().zip(w).map(|(a, b)| a + b).collect();
                *next.entry(key).or_insert(0) += c;
            }
        }
        if next.len() as u128 > cap {
            return Err(LatticeError::TooLarge { size: next.len() as u128, cap });
        }
        dist = next;
    }
    let total = (code.len() as u128).pow(sources as u32);
    let (coeffs, counts): (Vec<Vec<i64>>, Vec<u128>) = dist.into_iter().unzip();
    let pmf = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let points = coeffs.iter().map(|s| code.fine().point(s)).collect();
    let index = coeffs.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let set = CoefficientSet::new(n, &coeffs)?;
    Ok(SumCodebook {
        sources,
        points,
        counts,
        total,
        pmf,
        sigma_s2: sources as f64 * code.second_moment(),
        index,
        set,
        coeffs,
    })
}

/// `β = σ/σ_s`. Zero is the noiseless limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRatio(f64);

impl NoiseRatio {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(LatticeError::InvalidParameter(format!("noise ratio {beta} must be finite and nonnegative")));
        }
        Ok(NoiseRatio(beta))
    }

    /// `β = √(σ²/σ_s²)`.
    pub fn from_variances(noise_var: f64, sigma_s2: f64) -> Result<Self> {
        if !(sigma_s2 > 0.0) {
            return Err(LatticeError::InvalidParameter("sum variance must be positive".into()));
        }
        Self::new((noise_var / sigma_s2).sqrt())
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `‖y − λ‖² + β²‖λ‖²`.
pub fn map_metric(lambda: &[f64], y: &[f64], beta: NoiseRatio) -> f64 {
    let b = beta.value();
    dist2(y, lambda) + b * b * norm2(lambda)
}

/// A decided sum codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct SumDecision {
    pub coeffs: Vec<i64>,
    pub point: Vec<f64>,
}

impl SumDecision {
    fn from_closest(c: crate::lattice::ClosestPoint, fine: &Lattice) -> Self {
        SumDecision { point: fine.point(&c.coeffs), coeffs: c.coeffs }
    }
}

/// MAP decoding as a shaped closest-point query in `[M; βM]` at `[y; 0]`.
pub fn map_decode_augmented(y: &[f64], code: &NestedLatticeCode, sum: &SumCodebook, beta: NoiseRatio) -> Result<SumDecision> {
    let aug = code.fine().stacked(beta.value())?;
    map_decode_augmented_with(y, code.fine(), &aug, sum)
}

fn map_decode_augmented_with(y: &[f64], fine: &Lattice, aug: &Lattice, sum: &SumCodebook) -> Result<SumDecision> {
    let mut target = y.to_vec();
    target.resize(aug.ambient_dim(), 0.0);
    let c = closest_point_shaped(aug, &target, Shaping::Set(sum.shaping()))?;
    Ok(SumDecision::from_closest(c, fine))
}

/// Forward and backward filters of the MMSE-GDFE front end.
#[derive(Debug, Clone, PartialEq)]
pub struct GdfeFilters {
    pub forward: DMatrix<f64>,
    pub backward: DMatrix<f64>,
}

/// `B = √(1+β²)·I`, `F = B/(1+β²)`.
///
/// The constraints `BᵗB = (1+β²)I` and `FᵗB = I` fix `B` only up to an
/// orthogonal factor, which cannot change any decision; the scalar choice is
/// canonical.
pub fn mmse_gdfe_filters(beta: NoiseRatio, n: usize) -> GdfeFilters {
    let s = 1.0 + beta.value() * beta.value();
    let backward = DMatrix::identity(n, n) * s.sqrt();
    let forward = &backward / s;
    GdfeFilters { forward, backward }
}

impl GdfeFilters {
    pub fn dim(&self) -> usize {
        self.forward.nrows()
    }

    /// `Γ(y) = yᵗ(I − FᵗF)y`, the λ-independent gap between the MAP metric
    /// and `‖Fy − Bλ‖²`.
    pub fn offset(&self, y: &[f64]) -> f64 {
        let yv = DVector::from_column_slice(y);
        let n = self.dim();
        let m = DMatrix::identity(n, n) - self.forward.transpose() * &self.forward;
        (yv.transpose() * m * &yv)[(0, 0)]
    }

    /// `‖Fy − Bλ‖²`.
    pub fn filtered_distance(&self, y: &[f64], lambda: &[f64]) -> f64 {
        let fy = &self.forward * DVector::from_column_slice(y);
        let bl = &self.backward * DVector::from_column_slice(lambda);
        (fy - bl).norm_squared()
    }

    /// `‖(F − B)λ + Fz‖² / n`, one sample of the effective noise power.
    pub fn effective_noise(&self, lambda: &[f64], z: &[f64]) -> f64 {
        let e = (&self.forward - &self.backward) * DVector::from_column_slice(lambda)
            + &self.forward * DVector::from_column_slice(z);
        e.norm_squared() / self.dim() as f64
    }
}

/// MAP decoding as shaped minimum-distance decoding of `Fy` in `BΛ_F`.
pub fn map_decode_gdfe(y: &[f64], code: &NestedLatticeCode, sum: &SumCodebook, filters: &GdfeFilters) -> Result<SumDecision> {
    let lat = code.fine().transformed(&filters.backward)?;
    map_decode_gdfe_with(y, code.fine(), &lat, sum, filters)
}

fn map_decode_gdfe_with(
    y: &[f64],
    fine: &Lattice,
    filtered: &Lattice,
    sum: &SumCodebook,
    filters: &GdfeFilters,
) -> Result<SumDecision> {
    if y.len() != filters.dim() {
        return Err(LatticeError::DimensionMismatch { expected: filters.dim(), got: y.len() });
    }
    let fy = &filters.forward * DVector::from_column_slice(y);
    let c = closest_point_shaped(filtered, fy.as_slice(), Shaping::Set(sum.shaping()))?;
    Ok(SumDecision::from_closest(c, fine))
}

/// Exact MAP over the support: `argmin −ln p(λ) + ‖y − λ‖²/2σ²`.
pub fn exhaustive_map_decode(y: &[f64], sum: &SumCodebook, noise_var: f64) -> Result<SumDecision> {
    let mut best: Option<(usize, f64)> = None;
    for (i, (p, w)) in sum.points().iter().zip(sum.pmf()).enumerate() {
        let m = -w.ln() + dist2(y, p) / (2.0 * noise_var);
        // support is sorted, so keeping the first of tied metrics is the
        // lexicographic tie-break
        let better = match best {
            None => true,
            Some((_, b)) => m < b - TIE_TOLERANCE * m.abs().max(b.abs()),
        };
        if better {
            best = Some((i, m));
        }
    }
    let (i, _) = best.ok_or(LatticeError::EmptyCodebook)?;
    Ok(SumDecision { coeffs: sum.coefficients()[i].clone(), point: sum.points()[i].clone() })
}

/// MMSE scaling for the sum channel (`h = a = 1`): `α = Nρ/(1 + Nρ) = σ_s²/(σ_s² + σ²)`.
pub fn conventional_alpha(sum: &SumCodebook, noise_var: f64) -> f64 {
    sum.sigma_s2() / (sum.sigma_s2() + noise_var)
}

/// Conventional CF decoding: MMSE scaling, then the nearest fine-lattice point.
pub fn conventional_decode(y: &[f64], code: &NestedLatticeCode, alpha: f64) -> Result<SumDecision> {
    let target: Vec<f64> = y.iter().map(|v| alpha * v).collect();
    let c = closest_point(code.fine(), &target, None)?;
    Ok(SumDecision::from_closest(c, code.fine()))
}

/// Conventional decoding restricted to the sum support.
pub fn conventional_decode_constrained(
    y: &[f64],
    code: &NestedLatticeCode,
    sum: &SumCodebook,
    alpha: f64,
) -> Result<SumDecision> {
    let target: Vec<f64> = y.iter().map(|v| alpha * v).collect();
    let c = closest_point_shaped(code.fine(), &target, Shaping::Set(sum.shaping()))?;
    Ok(SumDecision::from_closest(c, code.fine()))
}

/// `Q(x) = ½ erfc(x/√2)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `Q(‖Δ‖/2σ + (σ/‖Δ‖)·ln(p/p̂))`: probability that `λ̂` beats the transmitted
/// `λ` under the MAP rule with prior `p`.
pub fn pairwise_error_prob(lambda: &[f64], lambda_hat: &[f64], sigma: f64, p: f64, p_hat: f64) -> Result<f64> {
    if !(p > 0.0) || !(p_hat > 0.0) {
        return Err(LatticeError::ZeroProbability);
    }
    let d = dist2(lambda, lambda_hat).sqrt();
    if d == 0.0 {
        return Err(LatticeError::IdenticalPair);
    }
    Ok(q_function(d / (2.0 * sigma) + sigma * (p / p_hat).ln() / d))
}

/// `½ ΣΣ p(λ)·erfc(√A + B/√A)` with `A = d²/8σ²`, `B = ¼ ln(p(λ)/p(λ̂))`, the
/// inner sum running over every other support point.
pub fn union_bound(sum: &SumCodebook, d_min: f64, sigma: f64) -> f64 {
    let a = d_min * d_min / (8.0 * sigma * sigma);
    let sa = a.sqrt();
    let logs: Vec<f64> = sum.pmf().iter().map(|p| p.ln()).collect();
    let mut total = 0.0;
    for (i, &p) in sum.pmf().iter().enumerate() {
        let inner: f64 = logs
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &lq)| libm::erfc(sa + 0.25 * (logs[i] - lq) / sa))
            .sum();
        total += p * inner;
    }
    0.5 * total
}

/// Gaussian-MAC decoders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GaussianDecoder {
    /// Augmented-lattice MAP.
    Map,
    /// MMSE-GDFE MAP.
    MapGdfe,
    /// Exact MAP by support scan.
    ExhaustiveMap,
    /// MMSE scaling plus unconstrained nearest-point decoding.
    Conventional,
    /// MMSE scaling plus nearest-point decoding inside the sum support.
    ConventionalConstrained,
}

impl GaussianDecoder {
    pub const ALL: [GaussianDecoder; 5] = [
        GaussianDecoder::Map,
        GaussianDecoder::MapGdfe,
        GaussianDecoder::ExhaustiveMap,
        GaussianDecoder::Conventional,
        GaussianDecoder::ConventionalConstrained,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            GaussianDecoder::Map => "map",
            GaussianDecoder::MapGdfe => "map-gdfe",
            GaussianDecoder::ExhaustiveMap => "exhaustive-map",
            GaussianDecoder::Conventional => "conventional",
            GaussianDecoder::ConventionalConstrained => "conventional-constrained",
        }
    }
}

impl fmt::Display for GaussianDecoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GaussianDecoder {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown gaussian decoder `{s}`"))
    }
}

/// Everything the decoders need at one noise level, prepared once and shared.
#[derive(Debug, Clone)]
pub struct GaussianReceiver<'a> {
    code: &'a NestedLatticeCode,
    sum: &'a SumCodebook,
    noise_var: f64,
    beta: NoiseRatio,
    alpha: f64,
    augmented: Lattice,
    filters: GdfeFilters,
    filtered: Lattice,
}

impl<'a> GaussianReceiver<'a> {
    pub fn new(code: &'a NestedLatticeCode, sum: &'a SumCodebook, noise_var: f64) -> Result<Self> {
        let beta = NoiseRatio::from_variances(noise_var, sum.sigma_s2())?;
        let filters = mmse_gdfe_filters(beta, code.fine().ambient_dim());
        Ok(GaussianReceiver {
            code,
            sum,
            noise_var,
            beta,
            alpha: conventional_alpha(sum, noise_var),
            augmented: code.fine().stacked(beta.value())?,
            filtered: code.fine().transformed(&filters.backward)?,
            filters,
        })
    }

    pub fn beta(&self) -> NoiseRatio {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn filters(&self) -> &GdfeFilters {
        &self.filters
    }

    pub fn decode(&self, decoder: GaussianDecoder, y: &[f64]) -> Result<SumDecision> {
        let fine = self.code.fine();
        match decoder {
            GaussianDecoder::Map => map_decode_augmented_with(y, fine, &self.augmented, self.sum),
            GaussianDecoder::MapGdfe => map_decode_gdfe_with(y, fine, &self.filtered, self.sum, &self.filters),
            GaussianDecoder::ExhaustiveMap => exhaustive_map_decode(y, self.sum, self.noise_var),
            GaussianDecoder::Conventional => conventional_decode(y, self.code, self.alpha),
            GaussianDecoder::ConventionalConstrained => {
                conventional_decode_constrained(y, self.code, self.sum, self.alpha)
            }
        }
    }
}
