//! Brute-force reference implementations. Every decoder in the crate is
//! checked against one of these direct scans.
#![allow(dead_code)]

use cf_lattice::fading::{ida_residual, IdaDecision, LikelihoodGeometry, ScaledObservation};
use cf_lattice::gaussian::{map_metric, NoiseRatio, SumCodebook};
use cf_lattice::lattice::{IntegerBox, Lattice};
use nalgebra::DMatrix;
use rand::Rng;

pub const TIE: f64 = 1e-12;

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE * a.abs().max(b.abs())
}

fn beats(d: f64, best: f64) -> bool {
    d < best - TIE * d.abs().max(best.abs())
}

/// Closest point by scanning the box in lexicographic order; ties keep the
/// lexicographically smallest coefficients.
pub fn brute_cvp(lattice: &Lattice, target: &[f64], bounds: &IntegerBox) -> (Vec<i64>, f64) {
    brute_cvp_over(lattice, target, bounds.iter())
}

pub fn brute_cvp_over<I: IntoIterator<Item = Vec<i64>>>(lattice: &Lattice, target: &[f64], candidates: I) -> (Vec<i64>, f64) {
    let mut best: Option<(Vec<i64>, f64)> = None;
    for s in candidates {
        let d = lattice.distance2(target, &s);
        let better = match &best {
            None => true,
            Some((bs, b)) => beats(d, *b) || (tied(d, *b) && s < *bs),
        };
        if better {
            best = Some((s, d));
        }
    }
    best.expect("nonempty candidate set")
}

fn first_nonzero(a: &[i64]) -> Option<usize> {
    a.iter().position(|&v| v != 0)
}

/// Shortest nonzero vector of a Gram matrix within `[-r, r]ⁿ`, restricted to
/// vectors whose first nonzero entry is positive.
pub fn brute_svp(gram: &DMatrix<f64>, r: i64) -> (Vec<i64>, f64) {
    let n = gram.nrows();
    let mut best: Option<(Vec<i64>, f64)> = None;
    for a in IntegerBox::symmetric(n, r).iter() {
        let Some(i) = first_nonzero(&a) else { continue };
        if a[i] < 0 {
            continue;
        }
        let v = nalgebra::DVector::from_iterator(n, a.iter().map(|&x| x as f64));
        let q = (v.transpose() * gram * &v)[(0, 0)];
        let key = |s: &[i64]| (first_nonzero(s), s.to_vec());
        let better = match &best {
            None => true,
            Some((bs, b)) => beats(q, *b) || (tied(q, *b) && key(&a) < key(bs)),
        };
        if better {
            best = Some((a, q));
        }
    }
    best.unwrap()
}

/// `argmin F(t, k)` over every admissible pair of the constellation.
pub fn brute_ida(geom: &LikelihoodGeometry, obs: &ScaledObservation) -> IdaDecision {
    let bp = geom.beta_prime();
    let yp = geom.y_prime(obs);
    let [a1, a2] = geom.a;
    let [u1, u2] = geom.u;
    let s = geom.s_m;
    let mut best: Option<IdaDecision> = None;
    for x1 in -s..=s {
        for x2 in -s..=s {
            let t = a1 * x1 + a2 * x2;
            let k = u2 * x1 - u1 * x2;
            let f = ida_residual(bp, yp, t, k);
            let better = match &best {
                None => true,
                Some(b) => {
                    beats(f, b.residual)
                        || (tied(f, b.residual) && ((t.abs(), t, k) < (b.t.abs(), b.t, b.k)))
                }
            };
            if better {
                best = Some(IdaDecision { t, k, residual: f });
            }
        }
    }
    best.unwrap()
}

/// `argmin ‖y − λ‖² + β²‖λ‖²` over the sum support (sorted, so the first
/// minimum is the lexicographic tie-break).
pub fn brute_map(sum: &SumCodebook, y: &[f64], beta: NoiseRatio) -> Vec<i64> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in sum.points().iter().enumerate() {
        let m = map_metric(p, y, beta);
        if best.is_none_or(|(_, b)| beats(m, b)) {
            best = Some((i, m));
        }
    }
    sum.coefficients()[best.unwrap().0].clone()
}

/// A random well-conditioned square basis with entries in `[-2, 2]`.
pub fn random_basis<R: Rng>(rng: &mut R, n: usize) -> Lattice {
    loop {
        let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
        if m.determinant().abs() > 0.3 {
            return Lattice::new(m).unwrap();
        }
    }
}

pub fn eleven_point_code() -> cf_lattice::NestedLatticeCode {
    let fine = Lattice::from_rows(&[vec![2.0, 3.0], vec![3.0, -1.0]]).unwrap();
    cf_lattice::NestedLatticeCode::new(fine, Lattice::scaled_identity(2, 11.0).unwrap(), None).unwrap()
}

pub fn cube_code() -> cf_lattice::NestedLatticeCode {
    cf_lattice::NestedLatticeCode::new(Lattice::integer(4).unwrap(), Lattice::scaled_identity(4, 3.0).unwrap(), Some(1.0))
        .unwrap()
}
