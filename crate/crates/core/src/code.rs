//! Nested lattice codes `C = {[λ_F] mod Λ_C}`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::diophantine::column_hnf;
use crate::error::{LatticeError, Result};
use crate::lattice::{mod_lattice, Lattice};

/// Default cap on the number of codewords materialized.
pub const CODEBOOK_CAP: u128 = 1_000_000;
/// Integrality tolerance for the nesting check.
pub const NESTING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct NestedLatticeCode {
    fine: Lattice,
    coarse: Lattice,
    codewords: Vec<Vec<f64>>,
    coeffs: Vec<Vec<i64>>,
    second_moment: f64,
    power: Option<f64>,
}

impl NestedLatticeCode {
    /// Enumerates the codebook. When `power` is given the per-dimension second
    /// moment must not exceed it.
    pub fn new(fine: Lattice, coarse: Lattice, power: Option<f64>) -> Result<Self> {
        Self::with_cap(fine, coarse, power, CODEBOOK_CAP)
    }

    pub fn with_cap(fine: Lattice, coarse: Lattice, power: Option<f64>, cap: u128) -> Result<Self> {
        let coeffs = codebook_coefficients(&fine, &coarse, cap)?;
        let codewords: Vec<Vec<f64>> = coeffs.iter().map(|s| fine.point(s)).collect();
        let n = fine.dim();
        let second_moment = second_moment(&codewords, n)?;
        if let Some(p) = power {
            if second_moment > p * (1.0 + 1e-12) {
                return Err(LatticeError::PowerExceeded { moment: second_moment, power: p });
            }
        }
        Ok(NestedLatticeCode { fine, coarse, codewords, coeffs, second_moment, power })
    }

    /// The 1-D integer constellation `[-S_m, S_m]` viewed as `ℤ / 2S_mℤ`.
    pub fn integer_interval(s_m: u32) -> Result<Self> {
        let fine = Lattice::integer(1)?;
        let coarse = Lattice::scaled_identity(1, 2.0 * s_m as f64)?;
        Self::new(fine, coarse, None)
    }

    pub fn dim(&self) -> usize {
        self.fine.dim()
    }

    pub fn fine(&self) -> &Lattice {
        &self.fine
    }

    pub fn coarse(&self) -> &Lattice {
        &self.coarse
    }

    pub fn codewords(&self) -> &[Vec<f64>] {
        &self.codewords
    }

    /// Fine-lattice coordinates of each codeword.
    pub fn coefficients(&self) -> &[Vec<i64>] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    /// `σ_x² = (1/n)·mean ‖λ‖²`.
    pub fn second_moment(&self) -> f64 {
        self.second_moment
    }

    pub fn power(&self) -> Option<f64> {
        self.power
    }
}

/// Integer matrix `K` with `coarse = fine·K`, or `NotNested`.
fn nesting_matrix(fine: &Lattice, coarse: &Lattice) -> Result<Vec<Vec<i64>>> {
    let n = fine.dim();
    if coarse.dim() != n || coarse.ambient_dim() != fine.ambient_dim() {
        return Err(LatticeError::DimensionMismatch { expected: n, got: coarse.dim() });
    }
    let mut k = vec![vec![0i64; n]; n];
    for j in 0..n {
        let col: Vec<f64> = coarse.basis().column(j).iter().copied().collect();
        let c = fine.coordinates(&col)?;
        for i in 0..n {
            let r = c[i].round();
            if (c[i] - r).abs() > NESTING_TOLERANCE {
                return Err(LatticeError::NotNested);
            }
            k[i][j] = r as i64;
        }
    }
    Ok(k)
}

/// Nesting index `|det Λ_C| / |det Λ_F|`.
pub fn nesting_index(fine: &Lattice, coarse: &Lattice) -> Result<u128> {
    let k = nesting_matrix(fine, coarse)?;
    let kb: Vec<Vec<BigInt>> = k.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let (h, _) = column_hnf(&kb).map_err(|_| LatticeError::NotNested)?;
    let mut idx = 1u128;
    for (i, row) in h.iter().enumerate() {
        idx = idx.saturating_mul(row[i].to_u128().ok_or(LatticeError::NotNested)?);
    }
    Ok(idx)
}

/// Fine coordinates of the codebook `{[λ_F] mod Λ_C}`.
///
/// Coset representatives come from the HNF `K·U = H` of the nesting matrix:
/// `{s : 0 ≤ sᵢ < Hᵢᵢ}` is a complete residue system of `ℤⁿ / Kℤⁿ`. Each
/// representative is then reduced into the Voronoi region of `Λ_C`.
fn codebook_coefficients(fine: &Lattice, coarse: &Lattice, cap: u128) -> Result<Vec<Vec<i64>>> {
    let k = nesting_matrix(fine, coarse)?;
    let n = k.len();
    let kb: Vec<Vec<BigInt>> = k.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let (h, _) = column_hnf(&kb).map_err(|_| LatticeError::NotNested)?;
    let diag: Vec<i64> = (0..n)
        .map(|i| h[i][i].to_i64().ok_or(LatticeError::NotNested))
        .collect::<Result<_>>()?;
    let size = diag.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
    if size > cap {
        return Err(LatticeError::TooLarge { size, cap });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut s = vec![0i64; n];
    loop {
        let p = fine.point(&s);
        let reduced = mod_lattice(&p, coarse)?;
        let c = fine.coordinates(&reduced)?;
        out.push(c.iter().map(|v| v.round() as i64).collect());
        let mut i = n;
        loop {
            if i == 0 {
                out.sort();
                out.dedup();
                return Ok(out);
            }
            i -= 1;
            s[i] += 1;
            if s[i] < diag[i] {
                break;
            }
            s[i] = 0;
        }
    }
}

/// Materialized codebook of `fine` nested in `coarse`.
pub fn enumerate_codebook(fine: &Lattice, coarse: &Lattice) -> Result<Vec<Vec<f64>>> {
    Ok(codebook_coefficients(fine, coarse, CODEBOOK_CAP)?
        .iter()
        .map(|s| fine.point(s))
        .collect())
}

/// `(1/n)·mean ‖λ‖²` over a codebook.
pub fn second_moment(codebook: &[Vec<f64>], n: usize) -> Result<f64> {
    if codebook.is_empty() {
        return Err(LatticeError::EmptyCodebook);
    }
    let total: f64 = codebook.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>()).sum();
    Ok(total / (codebook.len() as f64 * n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::in_voronoi;

    fn eleven_point_code() -> NestedLatticeCode {
        let fine = Lattice::from_rows(&[vec![2.0, 3.0], vec![3.0, -1.0]]).unwrap();
        let coarse = Lattice::scaled_identity(2, 11.0).unwrap();
        NestedLatticeCode::new(fine, coarse, None).unwrap()
    }

    #[test]
    fn interval_codebook_has_ten_points() {
        let code = NestedLatticeCode::integer_interval(5).unwrap();
        assert_eq!(code.len(), 10);
        for c in code.codewords() {
            assert!(in_voronoi(c, code.coarse()).unwrap());
        }
    }

    #[test]
    fn index_one_nesting_is_trivial() {
        let fine = Lattice::integer(2).unwrap();
        let cb = enumerate_codebook(&fine, &fine).unwrap();
        assert_eq!(cb, vec![vec![0.0, 0.0]]);
    }

    #[test]
    fn eleven_point_code_has_eleven_codewords() {
        let code = eleven_point_code();
        assert_eq!(code.len(), 11);
        assert_eq!(nesting_index(code.fine(), code.coarse()).unwrap(), 11);
        for c in code.codewords() {
            assert!(in_voronoi(c, code.coarse()).unwrap());
        }
        // Exhaustive coset check: the 11 fine points with coordinates in
        // [-5, 5]² are pairwise incongruent mod 11ℤ².
        let mut seen = std::collections::HashSet::new();
        for c in code.codewords() {
            let key: Vec<i64> = c.iter().map(|v| (v.round() as i64).rem_euclid(11)).collect();
            assert!(seen.insert(key));
        }
    }

    #[test]
    fn second_moment_by_enumeration() {
        // The codebook is {(x, 7x mod 11)} centred on [-5, 5]²; both coordinates
        // run over all residues, so E‖x‖² = 2·110/11 = 20 and σ_x² = 10.
        let code = eleven_point_code();
        assert!((code.second_moment() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn second_moment_examples() {
        assert_eq!(second_moment(&[vec![0.0]], 1).unwrap(), 0.0);
        assert_eq!(second_moment(&[vec![-1.0], vec![1.0]], 1).unwrap(), 1.0);
        assert_eq!(second_moment(&[], 1), Err(LatticeError::EmptyCodebook));
    }

    #[test]
    fn non_nested_pair_is_rejected() {
        let fine = Lattice::scaled_identity(1, 2.0).unwrap();
        let coarse = Lattice::scaled_identity(1, 3.0).unwrap();
        assert_eq!(enumerate_codebook(&fine, &coarse).unwrap_err(), LatticeError::NotNested);
    }

    #[test]
    fn cap_is_enforced() {
        let fine = Lattice::integer(2).unwrap();
        let coarse = Lattice::scaled_identity(2, 100.0).unwrap();
        let err = NestedLatticeCode::with_cap(fine, coarse, None, 1000).unwrap_err();
        assert_eq!(err, LatticeError::TooLarge { size: 10_000, cap: 1000 });
    }

    #[test]
    fn power_bound_is_checked() {
        let fine = Lattice::integer(4).unwrap();
        let coarse = Lattice::scaled_identity(4, 3.0).unwrap();
        let code = NestedLatticeCode::new(fine.clone(), coarse.clone(), Some(1.0)).unwrap();
        assert!((code.second_moment() - 2.0 / 3.0).abs() < 1e-12);
        assert!(matches!(
            NestedLatticeCode::new(fine, coarse, Some(0.5)),
            Err(LatticeError::PowerExceeded { .. })
        ));
    }
}
