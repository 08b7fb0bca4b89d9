use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{LatticeError, Result};

/// Row-major integer matrix.
pub type IntMatrix = Vec<Vec<BigInt>>;

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(BigInt::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

/// Replaces columns `(p, q)` of every matrix in `mats` by
/// `(s·p + t·q, u·p + v·q)`.
fn combine_columns(mats: &mut [&mut IntMatrix], p: usize, q: usize, coef: [&BigInt; 4]) {
    let [s, t, u, v] = coef;
    for m in mats.iter_mut() {
        for row in m.iter_mut() {
            let cp = s * &row[p] + t * &row[q];
            let cq = u * &row[p] + v * &row[q];
            row[p] = cp;
            row[q] = cq;
        }
    }
}

/// Column-style Hermite normal form of a full-row-rank `n × c` matrix `A`
/// (`c ≥ n`): returns `(H, U)` with `A·U = H = [0 | B]`, `U` unimodular and
/// `B` lower triangular with positive diagonal and `0 ≤ B[i][k] < B[i][i]`
/// for `k < i`.
pub fn column_hnf(a: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    let n = a.len();
    let c = a.first().map_or(0, Vec::len);
    if n == 0 || c < n || a.iter().any(|r| r.len() != c) {
        return Err(LatticeError::BlockLayout(format!("expected n x c with c >= n, got {n} x {c}")));
    }
    let mut h = a.clone();
    let mut u = identity(c);
    let offset = c - n;
    for i in 0..n {
        let p = offset + i;
        let active = (0..offset).chain(p + 1..c);
        for j in active {
            if h[i][j].is_zero() {
                continue;
            }
            let x = h[i][p].clone();
            let y = h[i][j].clone();
            let e = x.extended_gcd(&y);
            let g = e.gcd;
            let minus_y = -(&y / &g);
            let x_over = &x / &g;
            combine_columns(&mut [&mut h, &mut u], p, j, [&e.x, &e.y, &minus_y, &x_over]);
        }
        if h[i][p].is_zero() {
            return Err(LatticeError::RankDeficient(0.0));
        }
        if h[i][p].is_negative() {
            for m in [&mut h, &mut u] {
                for row in m.iter_mut() {
                    row[p] = -&row[p];
                }
            }
        }
        let pivot = h[i][p].clone();
        for k in offset..p {
            let f = h[i][k].div_floor(&pivot);
            if f.is_zero() {
                continue;
            }
            let one = BigInt::one();
            let zero = BigInt::zero();
            let neg = -f;
            // col_k ← col_k − f·col_p
            combine_columns(&mut [&mut h, &mut u], k, p, [&one, &neg, &zero, &one]);
        }
    }
    Ok((h, u))
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// `M̃·U = [0 | B]` together with the per-source row blocks of `U`.
///
/// `U` is `nN × nN`. Rows `i·n .. (i+1)·n` belong to source `i`; within them
/// the first `n(N−1)` columns form `Uᵢ` and the last `n` columns form `Vᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HnfDecomposition {
    pub mtilde: IntMatrix,
    pub u: IntMatrix,
    pub b: IntMatrix,
    pub n: usize,
    pub sources: usize,
}

impl HnfDecomposition {
    /// `Uᵢ ∈ ℤ^{n × n(N−1)}`.
    pub fn u_block(&self, i: usize) -> IntMatrix {
        let w = self.n * (self.sources - 1);
        self.u[i * self.n..(i + 1) * self.n].iter().map(|r| r[..w].to_vec()).collect()
    }

    /// `Vᵢ ∈ ℤ^{n × n}`.
    pub fn v_block(&self, i: usize) -> IntMatrix {
        let w = self.n * (self.sources - 1);
        self.u[i * self.n..(i + 1) * self.n].iter().map(|r| r[w..].to_vec()).collect()
    }

    /// `M̃·U` recomputed from scratch.
    pub fn product(&self) -> IntMatrix {
        mat_mul(&self.mtilde, &self.u)
    }
}

/// Decomposes an `n × nN` matrix, verifying `M̃U = [0 | B]` entry-exactly and
/// `|det U| = 1`.
pub fn hermite_decompose(mtilde: &IntMatrix, sources: usize) -> Result<HnfDecomposition> {
    let n = mtilde.len();
    let c = mtilde.first().map_or(0, Vec::len);
    if sources == 0 || c != n * sources {
        return Err(LatticeError::BlockLayout(format!(
            "M~ is {n} x {c}, expected {n} x {}",
            n * sources
        )));
    }
    let (h, u) = column_hnf(mtilde)?;
    let w = n * (sources - 1);
    let b: IntMatrix = h.iter().map(|r| r[w..].to_vec()).collect();
    let dec = HnfDecomposition { mtilde: mtilde.clone(), u, b, n, sources };
    let prod = dec.product();
    let layout_ok = prod.iter().zip(&h).all(|(p, q)| p == q)
        && prod.iter().all(|r| r[..w].iter().all(Zero::is_zero));
    if !layout_ok {
        return Err(LatticeError::BlockLayout("M~U differs from [0 | B]".into()));
    }
    if bareiss_determinant(&dec.u).abs() != BigInt::one() {
        return Err(LatticeError::BlockLayout("U is not unimodular".into()));
    }
    if bareiss_determinant(&dec.b).is_zero() {
        return Err(LatticeError::RankDeficient(0.0));
    }
    Ok(dec)
}

fn to_big(m: &[Vec<i64>]) -> IntMatrix {
    m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

/// Solves `A·x = b` over the rationals; `None` if `A` is singular.
fn solve_rational(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigRational>> {
    let n = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|v| BigRational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, piv);
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for k in col..=n {
                    let v = &m[col][k] * &f;
                    m[r][k] -= v;
                }
            }
        }
    }
    Some((0..n).map(|i| &m[i][n] / &m[i][i]).collect())
}

fn mat_vec_rational(m: &IntMatrix, x: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(x)
                .fold(BigRational::zero(), |acc, (a, b)| acc + BigRational::from_integer(a.clone()) * b)
        })
        .collect()
}

/// Complete solution of `Σ aᵢ xᵢ = t` with every `xᵢ` in the fine lattice:
/// `xᵢ = vᵢ + M Uᵢ w` for a common integer vector `w ∈ ℤ^{n(N−1)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiophantineSolution {
    /// `vᵢ = M Vᵢ B⁻¹ t`.
    pub particular: Vec<Vec<BigRational>>,
    /// Generator `M Uᵢ` of each homogeneous part (`n × n(N−1)`).
    pub generators: Vec<IntMatrix>,
    pub decomposition: HnfDecomposition,
}

impl DiophantineSolution {
    pub fn free_dim(&self) -> usize {
        self.decomposition.n * (self.decomposition.sources - 1)
    }

    /// The solution `xᵢ = vᵢ + dᵢ` with `dᵢ = M Uᵢ w`.
    pub fn solution(&self, w: &[BigInt]) -> Vec<Vec<BigRational>> {
        assert_eq!(w.len(), self.free_dim());
        let wq: Vec<BigRational> = w.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        self.particular
            .iter()
            .zip(&self.generators)
            .map(|(v, g)| {
                let d = mat_vec_rational(g, &wq);
                v.iter().zip(d).map(|(a, b)| a + b).collect()
            })
            .collect()
    }

    /// Homogeneous offsets `dᵢ = M Uᵢ w`.
    pub fn offsets(&self, w: &[BigInt]) -> Vec<Vec<BigRational>> {
        let wq: Vec<BigRational> = w.iter().map(|v| BigRational::from_integer(v.clone())).collect();
        self.generators.iter().map(|g| mat_vec_rational(g, &wq)).collect()
    }
}

/// Solves `t = Σ aᵢ xᵢ` for fine-lattice points `xᵢ = M sᵢ` through the HNF of
/// `M̃ = [a₁M … a_N M]`.
pub fn hnf_solve(m: &[Vec<i64>], a: &[i64], t: &[i64]) -> Result<DiophantineSolution> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(LatticeError::DimensionMismatch { expected: n, got: m.first().map_or(0, Vec::len) });
    }
    if t.len() != n {
        return Err(LatticeError::DimensionMismatch { expected: n, got: t.len() });
    }
    if a.is_empty() || a.iter().all(|&v| v == 0) {
        return Err(LatticeError::ZeroCodeVector);
    }
    let mb = to_big(m);
    if bareiss_determinant(&mb).is_zero() {
        return Err(LatticeError::RankDeficient(0.0));
    }
    let tb: Vec<BigInt> = t.iter().map(|&v| BigInt::from(v)).collect();
    let coords = solve_rational(&mb, &tb).ok_or(LatticeError::RankDeficient(0.0))?;
    if coords.iter().any(|c| !c.is_integer()) {
        return Err(LatticeError::NotInLattice);
    }
    let sources = a.len();
    let mtilde: IntMatrix = mb
        .iter()
        .map(|row| a.iter().flat_map(|&ai| row.iter().map(move |v| v * ai)).collect())
        .collect();
    let dec = hermite_decompose(&mtilde, sources)?;
    // B is lower triangular; B w = t exactly over ℚ.
    let w2 = solve_rational(&dec.b, &tb).ok_or(LatticeError::RankDeficient(0.0))?;
    if w2.iter().any(|c| !c.is_integer()) {
        return Err(LatticeError::NotInLattice);
    }
    let mut particular = Vec::with_capacity(sources);
    let mut generators = Vec::with_capacity(sources);
    for i in 0..sources {
        let vi = dec.v_block(i);
        let ui = dec.u_block(i);
        particular.push(mat_vec_rational(&mb, &mat_vec_rational(&vi, &w2)));
        generators.push(if ui.first().is_some_and(|r| !r.is_empty()) {
            mat_mul(&mb, &ui)
        } else {
            vec![Vec::new(); n]
        });
    }
    Ok(DiophantineSolution { particular, generators, decomposition: dec })
}
