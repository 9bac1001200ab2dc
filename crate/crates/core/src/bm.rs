//! Upper bounds on the Banach–Mazur distance `‖L‖·‖L⁻¹‖` of a linear isomorphism
//! `L: ℝ^m_p → ℝ^m_p`.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(PNorm::Infinity)
        } else if p.is_finite() && p >= 1.0 {
            Ok(PNorm::Finite(p))
        } else {
            Err(Error::Parameter(format!("p must be >= 1, got {p}")))
        }
    }

    fn norm(self, v: &[f64]) -> f64 {
        match self {
            PNorm::Infinity => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            PNorm::Finite(p) => {
                let s: f64 = v.iter().map(|x| x.abs().powf(p)).sum();
                s.powf(1.0 / p)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormEstimate {
    /// Largest `‖Ax‖/‖x‖` actually attained by a sampled or constructed `x`.
    pub lower: f64,
    /// Analytic upper bound (equal to `lower` when `exact`).
    pub upper: f64,
    pub exact: bool,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmBound {
    /// Reported bound: the product of the two upper bounds, never below one.
    pub value: f64,
    pub lower: f64,
    pub forward: OperatorNormEstimate,
    pub inverse: OperatorNormEstimate,
}

#[derive(Debug, Clone)]
pub struct BmOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for BmOptions {
    fn default() -> Self {
        Self { restarts: 32, iterations: 200, seed: 0 }
    }
}

fn is_diagonal(a: &DMatrix<f64>) -> bool {
    (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| i == j || a[(i, j)] == 0.0))
}

fn max_col_sum(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn max_row_sum(a: &DMatrix<f64>) -> f64 {
    (0..a.nrows())
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Sign-preserving `|v|^e`.
fn signed_pow(v: f64, e: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v.signum() * v.abs().powf(e)
    }
}

/// Power iteration for `‖A‖_{p→p}` started at `x`: alternates `A`, the duality map
/// of `ℓ^p`, `Aᵀ` and the duality map of `ℓ^q`. Returns the best ratio seen.
fn power_ascent(a: &DMatrix<f64>, p: f64, mut x: Vec<f64>, iterations: usize) -> f64 {
    let q = p / (p - 1.0);
    let norm_p = PNorm::Finite(p);
    let nx = norm_p.norm(&x);
    if nx == 0.0 {
        return 0.0;
    }
    x.iter_mut().for_each(|v| *v /= nx);
    let mut best = 0.0f64;
    for _ in 0..iterations {
        let y = a * nalgebra::DVector::from_column_slice(&x);
        let ny = norm_p.norm(y.as_slice());
        best = best.max(ny);
        if ny == 0.0 {
            break;
        }
        let s: Vec<f64> = y.iter().map(|v| signed_pow(*v / ny, p - 1.0)).collect();
        let z = a.transpose() * nalgebra::DVector::from_column_slice(&s);
        let nz = PNorm::Finite(q).norm(z.as_slice());
        if nz == 0.0 {
            break;
        }
        let next: Vec<f64> = z.iter().map(|v| signed_pow(*v / nz, q - 1.0)).collect();
        let moved = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = next;
        if moved < 1e-14 {
            break;
        }
    }
    let y = a * nalgebra::DVector::from_column_slice(&x);
    best.max(norm_p.norm(y.as_slice()) / norm_p.norm(&x))
}

/// Estimates `‖A‖_{p→p}`.
///
/// Exact for diagonal matrices, `p ∈ {1, 2, ∞}`. Otherwise the lower value comes
/// from seeded random-restart power ascent and the upper one from Riesz–Thorin,
/// `‖A‖_p ≤ ‖A‖_1^{1/p} ‖A‖_∞^{1-1/p}`.
pub fn operator_norm(a: &DMatrix<f64>, p: PNorm, options: &BmOptions) -> OperatorNormEstimate {
    let exact = |v: f64, method: &str| OperatorNormEstimate {
        lower: v,
        upper: v,
        exact: true,
        method: method.into(),
    };
    if is_diagonal(a) {
        let v = (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)].abs()).fold(0.0, f64::max);
        return exact(v, "diagonal");
    }
    let p = match p {
        PNorm::Infinity => return exact(max_row_sum(a), "max-row-sum"),
        PNorm::Finite(p) if p == 1.0 => return exact(max_col_sum(a), "max-column-sum"),
        PNorm::Finite(p) if p == 2.0 => {
            let v = a.clone().svd(false, false).singular_values.max();
            return exact(v, "singular-value");
        }
        PNorm::Finite(p) => p,
    };
    let m = a.ncols();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut lower = 0.0f64;
    for j in 0..m {
        let mut e = vec![0.0; m];
        e[j] = 1.0;
        lower = lower.max(power_ascent(a, p, e, options.iterations));
    }
    for _ in 0..options.restarts {
        let start: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        lower = lower.max(power_ascent(a, p, start, options.iterations));
    }
    let upper = max_col_sum(a).powf(1.0 / p) * max_row_sum(a).powf(1.0 - 1.0 / p);
    OperatorNormEstimate {
        lower,
        upper: upper.max(lower),
        exact: false,
        method: "power-ascent/riesz-thorin".into(),
    }
}

fn combine(forward: OperatorNormEstimate, inverse: OperatorNormEstimate) -> BmBound {
    // ‖L‖‖L⁻¹‖ >= ‖LL⁻¹‖ = 1; the clamp only absorbs rounding
    let value = (forward.upper * inverse.upper).max(1.0);
    let lower = (forward.lower * inverse.lower).min(value);
    BmBound { value, lower, forward, inverse }
}

fn square_f64(l: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = l.len();
    if m == 0 || l.iter().any(|r| r.len() != m) {
        return Err(Error::Parameter("matrix must be square and non-empty".into()));
    }
    Ok(DMatrix::from_fn(m, m, |i, j| l[i][j]))
}

/// Bound for a rational matrix. Singularity is decided and the inverse computed in
/// exact arithmetic.
pub fn bm_distance_bound(l: &[Vec<BigRational>], p: PNorm, options: &BmOptions) -> Result<BmBound> {
    let m = l.len();
    if m == 0 || l.iter().any(|r| r.len() != m) {
        return Err(Error::Parameter("matrix must be square and non-empty".into()));
    }
    let inv = exact_inverse(l)?;
    let to_f = |rows: &[Vec<BigRational>]| DMatrix::from_fn(m, m, |i, j| rows[i][j].to_f64());
    let forward = operator_norm(&to_f(l), p, options);
    let inverse = operator_norm(&to_f(&inv), p, options);
    Ok(combine(forward, inverse))
}

/// Bound for a floating-point matrix.
pub fn bm_distance_bound_f64(l: &[Vec<f64>], p: PNorm, options: &BmOptions) -> Result<BmBound> {
    let a = square_f64(l)?;
    let inv = a.clone().try_inverse().ok_or(Error::Singular)?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(combine(operator_norm(&a, p, options), operator_norm(&inv, p, options)))
}

/// Gauss–Jordan elimination over the rationals.
pub fn exact_inverse(l: &[Vec<BigRational>]) -> Result<Vec<Vec<BigRational>>> {
    let m = l.len();
    let mut a: Vec<Vec<BigRational>> = l.to_vec();
    let mut inv: Vec<Vec<BigRational>> = (0..m)
        .map(|i| (0..m).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero()).ok_or(Error::Singular)?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pv = a[col][col].clone();
        for j in 0..m {
            a[col][j] = &a[col][j] / &pv;
            inv[col][j] = &inv[col][j] / &pv;
        }
        for r in 0..m {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..m {
                let t = &factor * &a[col][j];
                a[r][j] -= t;
                let t = &factor * &inv[col][j];
                inv[r][j] -= t;
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn ints(rows: &[&[i64]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect()
    }

    #[test]
    fn identity_is_one() {
        for p in [PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Finite(3.0), PNorm::Infinity] {
            let b = bm_distance_bound(&ints(&[&[1, 0], &[0, 1]]), p, &BmOptions::default()).unwrap();
            assert_eq!(b.value, 1.0);
        }
    }

    #[test]
    fn diagonal_example() {
        let l = vec![vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(1, 2)]];
        let b = bm_distance_bound(&l, PNorm::Finite(2.0), &BmOptions::default()).unwrap();
        assert_eq!(b.value, 4.0);
        assert!(b.forward.exact && b.inverse.exact);
    }

    #[test]
    fn permutations_are_isometries() {
        let perm = ints(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
        for p in [1.0, 1.5, 2.0, 3.0, 7.0] {
            let b = bm_distance_bound(&perm, PNorm::Finite(p), &BmOptions::default()).unwrap();
            assert!((b.value - 1.0).abs() < 1e-12, "p={p}: {b:?}");
        }
    }

    #[test]
    fn singular_rejected() {
        let l = ints(&[&[1, 2], &[2, 4]]);
        assert_eq!(bm_distance_bound(&l, PNorm::Finite(2.0), &BmOptions::default()).unwrap_err(), Error::Singular);
        assert!(bm_distance_bound_f64(&[vec![0.0, 0.0], vec![0.0, 1.0]], PNorm::Finite(3.0), &BmOptions::default()).is_err());
    }

    #[test]
    fn exact_inverse_round_trip() {
        let l = vec![vec![q(2, 1), q(1, 3)], vec![q(-1, 2), q(5, 1)]];
        let inv = exact_inverse(&l).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s: BigRational = (0..2).map(|k| &l[i][k] * &inv[k][j]).sum();
                assert_eq!(s, if i == j { q(1, 1) } else { q(0, 1) });
            }
        }
    }

    #[test]
    fn lower_never_exceeds_upper() {
        let l = ints(&[&[1, 2, 0], &[0, 1, -1], &[3, 0, 1]]);
        for p in [1.5, 3.0, 4.0] {
            let b = bm_distance_bound(&l, PNorm::Finite(p), &BmOptions::default()).unwrap();
            assert!(b.lower <= b.value + 1e-12);
            assert!(b.forward.lower <= b.forward.upper + 1e-12);
            assert!(b.value >= 1.0);
        }
    }

    #[test]
    fn ascent_matches_exact_norm_at_two() {
        // power ascent at p = 2 must find the top singular value
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let exact = operator_norm(&a, PNorm::Finite(2.0), &BmOptions::default()).lower;
        let mut best = 0.0f64;
        for start in [[1.0, 0.0], [0.3, 0.7], [-1.0, 2.0]] {
            best = best.max(power_ascent(&a, 2.0, start.to_vec(), 500));
        }
        assert!((best - exact).abs() < 1e-9, "{best} vs {exact}");
    }
}
