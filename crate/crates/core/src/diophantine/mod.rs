//! Exact integer machinery: extended gcd, the two-variable solution family of
//! `a₁x₁ + a₂x₂ = t`, and the Hermite-normal-form solver for the vector system
//! `t = Σ aᵢ xᵢ`.

mod hnf;

pub use hnf::{
    bareiss_determinant, column_hnf, hermite_decompose, hnf_solve, DiophantineSolution,
    HnfDecomposition,
};

use crate::error::{LatticeError, Result};
use crate::lattice::IntegerBox;

/// `(g, u₁, u₂)` with `g = gcd(a₁, a₂) ≥ 1` and `a₁u₁ + a₂u₂ = g`.
///
/// Among all Bézout pairs the one with the smallest `|u₁|` is returned
/// (positive `u₁` on a tie). When `a₂ = 0` the pair is `(sign a₁, 0)`.
pub fn extended_gcd(a1: i64, a2: i64) -> Result<(i64, i64, i64)> {
    if a1 == 0 && a2 == 0 {
        return Err(LatticeError::BothZero);
    }
    let (mut r0, mut r1) = (a1 as i128, a2 as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    if r0 < 0 {
        (r0, s0) = (-r0, -s0);
    }
    let g = r0;
    let (a1w, a2w) = (a1 as i128, a2 as i128);
    let (u1, u2) = if a2 == 0 {
        (a1w.signum(), 0)
    } else {
        // u₁ moves in steps of a₂/g; pick the representative closest to zero.
        let step = (a2w / g).abs();
        let mut u1 = s0.rem_euclid(step);
        if 2 * u1 > step {
            u1 -= step;
        }
        let u2 = (g - a1w * u1) / a2w;
        (u1, u2)
    };
    debug_assert_eq!(a1w * u1 + a2w * u2, g);
    Ok((g as i64, u1 as i64, u2 as i64))
}

/// All integer solutions of `a₁x₁ + a₂x₂ = t`:
/// `x₁ = (u₁/g)t + (a₂/g)k`, `x₂ = (u₂/g)t − (a₁/g)k`, `k ∈ ℤ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSolutionFamily {
    pub a1: i64,
    pub a2: i64,
    pub t: i64,
    pub g: i64,
    pub u1: i64,
    pub u2: i64,
}

impl PairSolutionFamily {
    /// The solution with parameter `k`.
    pub fn at(&self, k: i64) -> (i64, i64) {
        let q = self.t / self.g;
        (self.u1 * q + (self.a2 / self.g) * k, self.u2 * q - (self.a1 / self.g) * k)
    }

    /// Same coefficients, different right-hand side.
    pub fn with_target(&self, t: i64) -> Result<Self> {
        if t % self.g != 0 {
            return Err(LatticeError::NoSolution { gcd: self.g, target: t });
        }
        Ok(PairSolutionFamily { t, ..*self })
    }

    /// Inclusive range of `k` for which the solution lies in `bounds`, if any.
    pub fn k_range(&self, bounds: &IntegerBox) -> Option<(i64, i64)> {
        let q = self.t / self.g;
        let c1 = self.u1 * q;
        let c2 = self.u2 * q;
        let (lo1, hi1) = bounds.bounds()[0];
        let (lo2, hi2) = bounds.bounds()[1];
        let mut lo = i64::MIN;
        let mut hi = i64::MAX;
        // c + s·k ∈ [l, h]
        for (c, s, l, h) in [(c1, self.a2 / self.g, lo1, hi1), (c2, -self.a1 / self.g, lo2, hi2)] {
            if s == 0 {
                if c < l || c > h {
                    return None;
                }
                continue;
            }
            let (a, b) = if s > 0 {
                (ceil_div(l - c, s), floor_div(h - c, s))
            } else {
                (ceil_div(h - c, s), floor_div(l - c, s))
            };
            lo = lo.max(a);
            hi = hi.min(b);
        }
        (lo <= hi).then_some((lo, hi))
    }
}

pub(crate) fn floor_div(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    -floor_div(-a, b)
}

/// Solution family of `a₁x₁ + a₂x₂ = t`, or `NoSolution` when `g ∤ t`.
pub fn solve_pair(a1: i64, a2: i64, t: i64) -> Result<PairSolutionFamily> {
    let (g, u1, u2) = extended_gcd(a1, a2)?;
    if t % g != 0 {
        return Err(LatticeError::NoSolution { gcd: g, target: t });
    }
    Ok(PairSolutionFamily { a1, a2, t, g, u1, u2 })
}

/// Every `(k, x₁, x₂)` of the family with `(x₁, x₂)` inside `bounds`, in
/// increasing `k`.
pub fn bounded_family(family: &PairSolutionFamily, bounds: &IntegerBox) -> Vec<(i64, i64, i64)> {
    assert_eq!(bounds.dim(), 2, "pair families live in a 2-D box");
    match family.k_range(bounds) {
        None => Vec::new(),
        Some((lo, hi)) => (lo..=hi)
            .map(|k| {
                let (x1, x2) = family.at(k);
                (k, x1, x2)
            })
            .collect(),
    }
}
