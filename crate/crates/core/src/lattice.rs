//! Real lattices and the sphere-enumeration engine behind every decoder.
//!
//! A [`Lattice`] is the set `{M s : s ∈ ℤⁿ}` for a real generator `M` with
//! column convention. `M` may be tall (`m × n`, `m ≥ n`), which is how the
//! augmented MAP lattice is represented. Closest and shortest vector queries
//! run a depth-first Schnorr-Euchner enumeration on the triangular factor of
//! `M`, seeded by the (shaping-aware) Babai point, and shrink the radius on
//! every improvement. Coefficient shaping is applied level by level inside the
//! enumeration, so constrained answers are exact.
//!
//! Ties between candidates whose metrics agree to a relative `1e-12` are
//! resolved by the lexicographically smallest coefficient vector.

use nalgebra::{Cholesky, DMatrix};

use crate::error::{LatticeError, Result};

/// Smallest accepted `|det M|` (or `sqrt(det MᵗM)` for tall generators).
pub const RANK_TOLERANCE: f64 = 1e-10;
/// Relative slack under which two metric values count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;
/// Largest dimension accepted by [`minimum_distance`].
pub const ENUMERATION_DIM_CAP: usize = 16;

// Pruning is deliberately looser than the tie slack so that a tied leaf is
// always reached and handed to the tie-break.
const PRUNE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Lattice {
    basis: DMatrix<f64>,
    gram: DMatrix<f64>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
    volume: f64,
}

impl Lattice {
    /// Builds a lattice from an `m × n` generator whose columns are basis vectors.
    pub fn new(basis: DMatrix<f64>) -> Result<Self> {
        let (m, n) = basis.shape();
        if n == 0 || m < n {
            return Err(LatticeError::DimensionMismatch { expected: n.max(1), got: m });
        }
        if basis.iter().any(|v| !v.is_finite()) {
            return Err(LatticeError::RankDeficient(f64::NAN));
        }
        let gram = basis.transpose() * &basis;
        let volume = if m == n {
            basis.determinant().abs()
        } else {
            gram.determinant().max(0.0).sqrt()
        };
        if !(volume > RANK_TOLERANCE) {
            return Err(LatticeError::RankDeficient(volume));
        }
        let qr = basis.clone().qr();
        let q = qr.q();
        let r = qr.r();
        Ok(Lattice { basis, gram, q, r, volume })
    }

    /// Builds a lattice from the generator written row by row, e.g.
    /// `[[2, 3], [3, -1]]`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(LatticeError::DimensionMismatch { expected: n, got: bad.len() });
        }
        Self::new(DMatrix::from_fn(m, n, |i, j| rows[i][j]))
    }

    pub fn integer(n: usize) -> Result<Self> {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, scale: f64) -> Result<Self> {
        Self::new(DMatrix::identity(n, n) * scale)
    }

    /// The lattice `c·Λ`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.basis * c)
    }

    /// The lattice generated by `T·M`.
    pub fn transformed(&self, t: &DMatrix<f64>) -> Result<Self> {
        if t.ncols() != self.basis.nrows() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.basis.nrows(),
                got: t.ncols(),
            });
        }
        Self::new(t * &self.basis)
    }

    /// The stacked lattice `[M; w·M]`.
    pub fn stacked(&self, weight: f64) -> Result<Self> {
        let (m, n) = self.basis.shape();
        let mut aug = DMatrix::zeros(2 * m, n);
        aug.view_mut((0, 0), (m, n)).copy_from(&self.basis);
        aug.view_mut((m, 0), (m, n)).copy_from(&(&self.basis * weight));
        Self::new(aug)
    }

    /// Rank of the lattice.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Dimension of the ambient space the points live in.
    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `|det M|`, the volume of the fundamental region.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn point(&self, coeffs: &[i64]) -> Vec<f64> {
        let (m, n) = self.basis.shape();
        debug_assert_eq!(coeffs.len(), n);
        (0..m)
            .map(|i| (0..n).map(|j| self.basis[(i, j)] * coeffs[j] as f64).sum())
            .collect()
    }

    /// Real coordinates of `x` in the basis (least squares for tall generators).
    pub fn coordinates(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_target(x)?;
        let n = self.dim();
        let qtx = self.project(x);
        let mut s = vec![0.0; n];
        for i in (0..n).rev() {
            let mut acc = qtx[i];
            for j in i + 1..n {
                acc -= self.r[(i, j)] * s[j];
            }
            s[i] = acc / self.r[(i, i)];
        }
        Ok(s)
    }

    /// Squared distance `‖x − M s‖²` evaluated directly in the ambient space.
    pub fn distance2(&self, x: &[f64], coeffs: &[i64]) -> f64 {
        let (m, n) = self.basis.shape();
        let mut total = 0.0;
        for i in 0..m {
            let mut acc = 0.0;
            for j in 0..n {
                acc += self.basis[(i, j)] * coeffs[j] as f64;
            }
            let d = x[i] - acc;
            total += d * d;
        }
        total
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        let (m, n) = self.q.shape();
        (0..n).map(|j| (0..m).map(|i| self.q[(i, j)] * x[i]).sum()).collect()
    }

    fn check_target(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.ambient_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Inclusive per-coordinate bounds on a coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerBox {
    bounds: Vec<(i64, i64)>,
}

impl IntegerBox {
    pub fn new(bounds: Vec<(i64, i64)>) -> Result<Self> {
        if bounds.iter().any(|&(lo, hi)| lo > hi) {
            return Err(LatticeError::EmptyConstraint);
        }
        Ok(IntegerBox { bounds })
    }

    /// The cube `[-s, s]ⁿ`.
    pub fn symmetric(n: usize, s: i64) -> Self {
        IntegerBox { bounds: vec![(-s, s); n] }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(i64, i64)] {
        &self.bounds
    }

    pub fn lower(&self, i: usize) -> i64 {
        self.bounds[i].0
    }

    pub fn upper(&self, i: usize) -> i64 {
        self.bounds[i].1
    }

    pub fn contains(&self, s: &[i64]) -> bool {
        s.len() == self.bounds.len()
            && s.iter().zip(&self.bounds).all(|(&v, &(lo, hi))| lo <= v && v <= hi)
    }

    /// Number of integer vectors in the box.
    pub fn size(&self) -> u128 {
        self.bounds
            .iter()
            .map(|&(lo, hi)| (hi - lo) as u128 + 1)
            .fold(1u128, |acc, w| acc.saturating_mul(w))
    }

    /// All members in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let n = self.bounds.len();
        let mut cur: Option<Vec<i64>> = Some(self.bounds.iter().map(|b| b.0).collect());
        std::iter::from_fn(move || {
            let out = cur.clone()?;
            let mut next = out.clone();
            let mut i = n;
            loop {
                if i == 0 {
                    cur = None;
                    break;
                }
                i -= 1;
                if next[i] < self.bounds[i].1 {
                    next[i] += 1;
                    for j in i + 1..n {
                        next[j] = self.bounds[j].0;
                    }
                    cur = Some(next);
                    break;
                }
            }
            Some(out)
        })
    }
}

/// An explicit finite set of admissible coefficient vectors, stored as a trie
/// keyed from the last coordinate to the first (the enumeration order).
#[derive(Debug, Clone)]
pub struct CoefficientSet {
    dim: usize,
    nodes: Vec<TrieNode>,
    len: usize,
}

#[derive(Debug, Clone, Default)]
struct TrieNode {
    keys: Vec<i64>,
    children: Vec<usize>,
}

impl CoefficientSet {
    pub fn new<I>(dim: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[i64]>,
    {
        let mut set = CoefficientSet { dim, nodes: vec![TrieNode::default()], len: 0 };
        for v in vectors {
            let v = v.as_ref();
            if v.len() != dim {
                return Err(LatticeError::DimensionMismatch { expected: dim, got: v.len() });
            }
            set.insert(v);
        }
        if set.len == 0 {
            return Err(LatticeError::EmptyConstraint);
        }
        Ok(set)
    }

    fn insert(&mut self, v: &[i64]) {
        let mut node = 0;
        let mut fresh = false;
        for level in (0..self.dim).rev() {
            let key = v[level];
            node = match self.nodes[node].keys.binary_search(&key) {
                Ok(pos) => self.nodes[node].children[pos],
                Err(pos) => {
                    fresh = true;
                    let id = self.nodes.len();
                    self.nodes.push(TrieNode::default());
                    self.nodes[node].keys.insert(pos, key);
                    self.nodes[node].children.insert(pos, id);
                    id
                }
            };
        }
        if fresh {
            self.len += 1;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.dim {
            return false;
        }
        let mut node = 0;
        for level in (0..self.dim).rev() {
            match self.nodes[node].keys.binary_search(&v[level]) {
                Ok(pos) => node = self.nodes[node].children[pos],
                Err(_) => return false,
            }
        }
        true
    }
}

/// Which coefficient vectors an enumeration may return.
#[derive(Debug, Clone, Copy)]
pub enum Shaping<'a> {
    Free,
    Box(&'a IntegerBox),
    Set(&'a CoefficientSet),
}

impl Shaping<'_> {
    fn dim(&self) -> Option<usize> {
        match self {
            Shaping::Free => None,
            Shaping::Box(b) => Some(b.dim()),
            Shaping::Set(s) => Some(s.dim()),
        }
    }

    /// Admissible values at `level` within `[lo, hi]`, with their trie children.
    fn values(&self, level: usize, node: usize, lo: i64, hi: i64, out: &mut Vec<(i64, usize)>) {
        out.clear();
        match self {
            Shaping::Free => out.extend((lo..=hi).map(|v| (v, 0))),
            Shaping::Box(b) => {
                let lo = lo.max(b.lower(level));
                let hi = hi.min(b.upper(level));
                if lo <= hi {
                    out.extend((lo..=hi).map(|v| (v, 0)));
                }
            }
            Shaping::Set(s) => {
                let n = &s.nodes[node];
                let start = n.keys.partition_point(|&k| k < lo);
                let end = n.keys.partition_point(|&k| k <= hi);
                out.extend((start..end).map(|p| (n.keys[p], n.children[p])));
            }
        }
    }

    /// Admissible value nearest to `center` (ties to the smaller value).
    fn nearest(&self, level: usize, node: usize, center: f64) -> (i64, usize) {
        let rounded = round_to_i64(center);
        match self {
            Shaping::Free => (rounded, 0),
            Shaping::Box(b) => (rounded.clamp(b.lower(level), b.upper(level)), 0),
            Shaping::Set(s) => {
                let n = &s.nodes[node];
                let p = n.keys.partition_point(|&k| (k as f64) < center);
                let pick = if p == 0 {
                    0
                } else if p == n.keys.len() {
                    p - 1
                } else {
                    let below = center - n.keys[p - 1] as f64;
                    let above = n.keys[p] as f64 - center;
                    if above < below {
                        p
                    } else {
                        p - 1
                    }
                };
                (n.keys[pick], n.children[pick])
            }
        }
    }
}

fn round_to_i64(x: f64) -> i64 {
    let r = x.round();
    if r >= i64::MAX as f64 {
        i64::MAX
    } else if r <= i64::MIN as f64 {
        i64::MIN
    } else {
        r as i64
    }
}

/// `true` when `d` beats the incumbent `best`, using the tie slack and `precedes`.
fn improves(d: f64, cand: &[i64], best: Option<&(Vec<i64>, f64)>, precedes: impl Fn(&[i64], &[i64]) -> bool) -> bool {
    match best {
        None => true,
        Some((bc, bd)) => {
            let tol = TIE_TOLERANCE * bd.abs().max(d.abs());
            d < bd - tol || (d <= bd + tol && precedes(cand, bc))
        }
    }
}

/// Depth-first enumeration of `Σ_i (c_i − Σ_{j≥i} R_ij s_j)² + resid` over
/// shaped integer vectors. Leaves are scored by an exact `metric` closure so
/// that the reported value does not depend on the triangularization.
struct Enumerator<'a, M, A, P> {
    r: &'a DMatrix<f64>,
    rhs: Vec<f64>,
    resid: f64,
    shaping: Shaping<'a>,
    metric: M,
    accept: A,
    precedes: P,
    best: Option<(Vec<i64>, f64)>,
    coeffs: Vec<i64>,
    nodes: u64,
    scratch: Vec<Vec<(i64, usize)>>,
}

impl<M, A, P> Enumerator<'_, M, A, P>
where
    M: Fn(&[i64]) -> f64,
    A: Fn(&[i64]) -> bool,
    P: Fn(&[i64], &[i64]) -> bool,
{
    fn budget(&self) -> f64 {
        match &self.best {
            None => f64::INFINITY,
            Some((_, b)) => b * (1.0 + PRUNE_SLACK) + 1e-12 - self.resid,
        }
    }

    fn center(&self, level: usize) -> f64 {
        let n = self.r.ncols();
        let mut acc = self.rhs[level];
        for j in level + 1..n {
            acc -= self.r[(level, j)] * self.coeffs[j] as f64;
        }
        acc / self.r[(level, level)]
    }

    fn offer(&mut self) {
        if !(self.accept)(&self.coeffs) {
            return;
        }
        let d = (self.metric)(&self.coeffs);
        if improves(d, &self.coeffs, self.best.as_ref(), &self.precedes) {
            self.best = Some((self.coeffs.clone(), d));
        }
    }

    /// Greedy successive rounding restricted to the shaping.
    fn seed_babai(&mut self) {
        let n = self.r.ncols();
        let mut node = 0;
        for level in (0..n).rev() {
            let c = self.center(level);
            let (v, child) = self.shaping.nearest(level, node, c);
            self.coeffs[level] = v;
            node = child;
        }
        self.offer();
    }

    fn descend(&mut self, level: usize, node: usize, partial: f64) {
        let rll = self.r[(level, level)].abs();
        let center = self.center(level);
        let budget = self.budget() - partial;
        if budget < 0.0 {
            return;
        }
        let width = budget.sqrt() / rll;
        let lo = (center - width).ceil();
        let hi = (center + width).floor();
        if !(lo <= hi) {
            return;
        }
        let mut cands = std::mem::take(&mut self.scratch[level]);
        self.shaping.values(level, node, round_to_i64(lo), round_to_i64(hi), &mut cands);
        cands.sort_by(|a, b| {
            let da = (a.0 as f64 - center).abs();
            let db = (b.0 as f64 - center).abs();
            da.total_cmp(&db).then(a.0.cmp(&b.0))
        });
        for &(v, child) in &cands {
            let d = rll * (v as f64 - center);
            let part = partial + d * d;
            if part > self.budget() {
                break;
            }
            self.nodes += 1;
            self.coeffs[level] = v;
            if level == 0 {
                self.offer();
            } else {
                self.descend(level - 1, child, part);
            }
        }
        self.scratch[level] = cands;
    }
}

/// Result of a closest-vector query.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestPoint {
    pub point: Vec<f64>,
    pub coeffs: Vec<i64>,
    pub dist2: f64,
    /// Enumeration nodes visited.
    pub nodes: u64,
}

/// Closest lattice point to `target`, optionally restricted to a coefficient box.
pub fn closest_point(
    lattice: &Lattice,
    target: &[f64],
    constraint: Option<&IntegerBox>,
) -> Result<ClosestPoint> {
    let shaping = constraint.map_or(Shaping::Free, Shaping::Box);
    closest_point_shaped(lattice, target, shaping)
}

/// Closest lattice point to `target` among coefficient vectors admitted by `shaping`.
pub fn closest_point_shaped(
    lattice: &Lattice,
    target: &[f64],
    shaping: Shaping<'_>,
) -> Result<ClosestPoint> {
    lattice.check_target(target)?;
    let n = lattice.dim();
    if let Some(d) = shaping.dim() {
        if d != n {
            return Err(LatticeError::DimensionMismatch { expected: n, got: d });
        }
    }
    let rhs = lattice.project(target);
    let total: f64 = target.iter().map(|v| v * v).sum();
    let projected: f64 = rhs.iter().map(|v| v * v).sum();
    let mut e = Enumerator {
        r: &lattice.r,
        rhs,
        resid: (total - projected).max(0.0),
        shaping,
        metric: |s: &[i64]| lattice.distance2(target, s),
        accept: |_: &[i64]| true,
        precedes: |a: &[i64], b: &[i64]| a < b,
        best: None,
        coeffs: vec![0; n],
        nodes: 0,
        scratch: vec![Vec::new(); n],
    };
    e.seed_babai();
    e.descend(n - 1, 0, 0.0);
    let nodes = e.nodes;
    let (coeffs, dist2) = e.best.ok_or(LatticeError::EmptyConstraint)?;
    Ok(ClosestPoint { point: lattice.point(&coeffs), coeffs, dist2, nodes })
}

/// `[x] mod Λ = x − Q_Λ(x)`, the representative of `x` in the fundamental
/// Voronoi region.
pub fn mod_lattice(x: &[f64], coarse: &Lattice) -> Result<Vec<f64>> {
    let q = closest_point(coarse, x, None)?;
    Ok(x.iter().zip(&q.point).map(|(a, b)| a - b).collect())
}

/// Whether `x` quantizes to the origin of `lattice`.
pub fn in_voronoi(x: &[f64], lattice: &Lattice) -> Result<bool> {
    Ok(closest_point(lattice, x, None)?.coeffs.iter().all(|&c| c == 0))
}

/// A shortest nonzero vector of a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortVector {
    pub coeffs: Vec<i64>,
    pub norm2: f64,
}

fn first_nonzero(a: &[i64]) -> Option<usize> {
    a.iter().position(|&v| v != 0)
}

/// Order used to pick among tied shortest vectors: the vector whose leading
/// nonzero coordinate comes first, then lexicographic. With the sign
/// normalization this makes `e₁` the answer for `G = I`.
fn svp_precedes(a: &[i64], b: &[i64]) -> bool {
    (first_nonzero(a), a) < (first_nonzero(b), b)
}

/// Nonzero integer `a` minimizing `aᵗ G a`, with the first nonzero entry positive.
pub fn shortest_vector(gram: &DMatrix<f64>) -> Result<ShortVector> {
    shortest_vector_within(gram, None)
}

/// [`shortest_vector`] restricted to a symmetric coefficient box `|aᵢ| ≤ bound`.
pub fn shortest_vector_within(gram: &DMatrix<f64>, bound: Option<i64>) -> Result<ShortVector> {
    let n = gram.nrows();
    if bound.is_some_and(|b| b < 1) {
        return Err(LatticeError::EmptyConstraint);
    }
    let bounds = bound.map(|b| IntegerBox::symmetric(n, b));
    if n == 0 || gram.ncols() != n {
        return Err(LatticeError::NotPositiveDefinite);
    }
    let scale = gram.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        for j in 0..i {
            if (gram[(i, j)] - gram[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(LatticeError::NotPositiveDefinite);
            }
        }
    }
    let chol = Cholesky::new(gram.clone()).ok_or(LatticeError::NotPositiveDefinite)?;
    let r = chol.l().transpose();
    if (0..n).any(|i| !(r[(i, i)] > 0.0)) {
        return Err(LatticeError::NotPositiveDefinite);
    }
    let quad = |a: &[i64]| {
        let mut total = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += gram[(i, j)] * a[j] as f64;
            }
            total += a[i] as f64 * row;
        }
        total
    };
    let mut e = Enumerator {
        r: &r,
        rhs: vec![0.0; n],
        resid: 0.0,
        shaping: bounds.as_ref().map_or(Shaping::Free, Shaping::Box),
        metric: quad,
        accept: |a: &[i64]| first_nonzero(a).is_some_and(|i| a[i] > 0),
        precedes: svp_precedes,
        best: None,
        coeffs: vec![0; n],
        nodes: 0,
        scratch: vec![Vec::new(); n],
    };
    for i in 0..n {
        let mut unit = vec![0; n];
        unit[i] = 1;
        let d = gram[(i, i)];
        if improves(d, &unit, e.best.as_ref(), svp_precedes) {
            e.best = Some((unit, d));
        }
    }
    e.descend(n - 1, 0, 0.0);
    let (coeffs, norm2) = e.best.ok_or(LatticeError::NotPositiveDefinite)?;
    Ok(ShortVector { coeffs, norm2 })
}

/// Minimum distance of a lattice, `√(min aᵗ MᵗM a)`.
pub fn minimum_distance(lattice: &Lattice) -> Result<f64> {
    if lattice.dim() > ENUMERATION_DIM_CAP {
        return Err(LatticeError::TooLarge {
            size: lattice.dim() as u128,
            cap: ENUMERATION_DIM_CAP as u128,
        });
    }
    Ok(shortest_vector(lattice.gram())?.norm2.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew_lattice() -> Lattice {
        Lattice::from_rows(&[vec![2.0, 3.0], vec![3.0, -1.0]]).unwrap()
    }

    #[test]
    fn rounding_on_integer_lattice() {
        let z2 = Lattice::integer(2).unwrap();
        let q = closest_point(&z2, &[0.2, -0.4], None).unwrap();
        assert_eq!(q.coeffs, vec![0, 0]);
        assert!((q.dist2 - 0.2).abs() < 1e-12);
    }

    #[test]
    fn lattice_member_maps_to_itself() {
        let l = skew_lattice();
        let q = closest_point(&l, &[5.0, 2.0], None).unwrap();
        assert_eq!(q.coeffs, vec![1, 1]);
        assert_eq!(q.point, vec![5.0, 2.0]);
        assert!(q.dist2.abs() < 1e-20);
    }

    #[test]
    fn brute_force_minimizer_for_fixed_target() {
        let l = skew_lattice();
        let target = [1.1, 0.7];
        let mut best = (vec![0i64, 0], f64::INFINITY);
        for s in IntegerBox::symmetric(2, 5).iter() {
            let p = l.point(&s);
            let d = (p[0] - target[0]).powi(2) + (p[1] - target[1]).powi(2);
            if d < best.1 - 1e-12 {
                best = (s, d);
            }
        }
        let q = closest_point(&l, &target, None).unwrap();
        assert_eq!(q.coeffs, best.0);
        assert!((q.dist2 - best.1).abs() < 1e-12);
    }

    #[test]
    fn ties_resolve_to_smallest_coefficients() {
        let z = Lattice::integer(1).unwrap();
        assert_eq!(closest_point(&z, &[0.5], None).unwrap().coeffs, vec![0]);
        assert_eq!(closest_point(&z, &[-0.5], None).unwrap().coeffs, vec![-1]);
    }

    #[test]
    fn box_constraint_is_respected() {
        let z2 = Lattice::integer(2).unwrap();
        let b = IntegerBox::new(vec![(-1, 1), (2, 3)]).unwrap();
        let q = closest_point(&z2, &[7.2, -4.0], Some(&b)).unwrap();
        assert_eq!(q.coeffs, vec![1, 2]);
    }

    #[test]
    fn empty_box_is_rejected() {
        assert_eq!(IntegerBox::new(vec![(1, 0)]), Err(LatticeError::EmptyConstraint));
    }

    #[test]
    fn rank_deficient_generator_is_rejected() {
        let err = Lattice::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap_err();
        assert!(matches!(err, LatticeError::RankDeficient(_)));
    }

    #[test]
    fn coefficient_set_restricts_search() {
        let z2 = Lattice::integer(2).unwrap();
        let set = CoefficientSet::new(2, [[0i64, 0], [3, 3], [-2, 1]]).unwrap();
        assert_eq!(set.len(), 3);
        let q = closest_point_shaped(&z2, &[2.0, 2.1], Shaping::Set(&set)).unwrap();
        assert_eq!(q.coeffs, vec![3, 3]);
        let q = closest_point_shaped(&z2, &[-5.0, 0.0], Shaping::Set(&set)).unwrap();
        assert_eq!(q.coeffs, vec![-2, 1]);
        assert!(set.contains(&[-2, 1]));
        assert!(!set.contains(&[1, -2]));
    }

    #[test]
    fn modulo_examples() {
        let c = Lattice::scaled_identity(2, 11.0).unwrap();
        assert_eq!(mod_lattice(&[0.0, 0.0], &c).unwrap(), vec![0.0, 0.0]);
        let r = mod_lattice(&[11.3, 0.3], &c).unwrap();
        assert!((r[0] - 0.3).abs() < 1e-12 && (r[1] - 0.3).abs() < 1e-12);
        assert_eq!(mod_lattice(&[6.0, 0.0], &c).unwrap(), vec![-5.0, 0.0]);
    }

    #[test]
    fn shortest_vector_examples() {
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(shortest_vector(&id).unwrap().coeffs, vec![1, 0, 0]);
        let g = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 1.0]);
        let sv = shortest_vector(&g).unwrap();
        assert_eq!(sv.coeffs, vec![0, 1]);
        assert_eq!(sv.norm2, 1.0);
    }

    #[test]
    fn shortest_vector_rejects_indefinite() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_eq!(shortest_vector(&g), Err(LatticeError::NotPositiveDefinite));
    }

    #[test]
    fn minimum_distance_examples() {
        assert!((minimum_distance(&Lattice::integer(3).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        let two = Lattice::scaled_identity(4, 2.0).unwrap();
        assert!((minimum_distance(&two).unwrap() - 2.0).abs() < 1e-12);
        // brute force over [-10, 10]²
        let l = skew_lattice();
        let mut best = f64::INFINITY;
        for s in IntegerBox::symmetric(2, 10).iter() {
            if s != [0, 0] {
                let p = l.point(&s);
                best = best.min(p[0] * p[0] + p[1] * p[1]);
            }
        }
        assert!((minimum_distance(&l).unwrap() - best.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn tall_generator_closest_point() {
        let l = skew_lattice().stacked(0.5).unwrap();
        assert_eq!(l.ambient_dim(), 4);
        let y = [5.0, 2.0, 0.0, 0.0];
        let q = closest_point(&l, &y, None).unwrap();
        let mut best = (vec![0i64, 0], f64::INFINITY);
        for s in IntegerBox::symmetric(2, 6).iter() {
            let d = l.distance2(&y, &s);
            if d < best.1 {
                best = (s, d);
            }
        }
        assert_eq!(q.coeffs, best.0);
    }

    #[test]
    fn box_iteration_is_lexicographic() {
        let b = IntegerBox::new(vec![(0, 1), (-1, 0)]).unwrap();
        let all: Vec<_> = b.iter().collect();
        assert_eq!(all, vec![vec![0, -1], vec![0, 0], vec![1, -1], vec![1, 0]]);
        assert_eq!(b.size(), 4);
    }
}
