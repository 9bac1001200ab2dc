#![allow(dead_code)]

use std::sync::Arc;

use lpforge_core::{Exponent, MeasureSpace, Scalar, SimpleFunction};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub mod corpus;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Σ w |f|^p`, computed directly from the atoms.
pub fn norm_pow_exact(f: &SimpleFunction<BigRational>, p: u32) -> BigRational {
    f.space()
        .weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| w * num_traits::pow(v.abs(), p as usize))
        .fold(BigRational::zero(), |a, b| a + b)
}

pub fn norm_f64(f: &SimpleFunction<f64>, p: f64) -> f64 {
    let s: f64 = f
        .space()
        .weights()
        .iter()
        .zip(f.values())
        .map(|(w, v)| Scalar::to_f64(w) * v.abs().powf(p))
        .sum();
    s.powf(1.0 / p)
}

pub fn random_space(rng: &mut ChaCha8Rng, max_atoms: usize) -> Arc<MeasureSpace> {
    let k = rng.gen_range(1..=max_atoms);
    let weights = (0..k).map(|_| q(rng.gen_range(1..=8), rng.gen_range(1..=8))).collect();
    Arc::new(MeasureSpace::with_weights(weights).unwrap())
}

pub fn random_function(rng: &mut ChaCha8Rng, space: &Arc<MeasureSpace>) -> SimpleFunction<BigRational> {
    let values = (0..space.len())
        .map(|_| {
            if rng.gen_bool(0.15) {
                BigRational::zero()
            } else {
                q(rng.gen_range(-12..=12), rng.gen_range(1..=12))
            }
        })
        .collect();
    SimpleFunction::new(space.clone(), values).unwrap()
}

/// Shrinks `f` by an integer factor until `‖f‖^p < 1`.
pub fn into_open_ball(f: SimpleFunction<BigRational>, p: u32) -> SimpleFunction<BigRational> {
    let pow = norm_pow_exact(&f, p);
    if pow < BigRational::one() {
        return f;
    }
    let k = pow.ceil() + BigRational::one();
    f.scale(&(BigRational::one() / k))
}

/// A random instance of the rational suite: space, inputs of norm below one, n, N, p.
pub struct Instance {
    pub space: Arc<MeasureSpace>,
    pub inputs: Vec<SimpleFunction<BigRational>>,
    pub n_grid: u64,
    pub p: u32,
}

pub fn random_instance(seed: u64) -> Instance {
    let mut r = rng(seed);
    let space = random_space(&mut r, 12);
    let p = r.gen_range(1..=3u32);
    let n = r.gen_range(1..=3usize);
    let n_grid = r.gen_range(1..=6u64);
    let inputs = (0..n)
        .map(|_| into_open_ball(random_function(&mut r, &space), p))
        .collect();
    Instance { space, inputs, n_grid, p }
}

pub fn exponent(p: u32) -> Exponent {
    Exponent::integer(p).unwrap()
}

/// A random point of the closed unit ball in floating arithmetic.
pub fn random_ball_point(rng: &mut ChaCha8Rng, space: &Arc<MeasureSpace>, p: f64) -> SimpleFunction<f64> {
    let values: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f = SimpleFunction::new(space.clone(), values).unwrap();
    let n = norm_f64(&f, p);
    let r: f64 = rng.gen_range(0.3..=1.0);
    if n > 0.0 {
        f.scale(&(r / n))
    } else {
        f
    }
}
