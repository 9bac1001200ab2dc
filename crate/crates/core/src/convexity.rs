//! Uniform convexity of `L^p`, `p ≥ 2`, derived through finite-dimensional
//! approximation.
//!
//! The modulus is `η(ε) = 1 - (1 - (ε/2)^p)^{1/p}`. [`certify_uniform_convexity`]
//! replays the argument on concrete inputs: approximate `x_1, x_2` within `δ` by
//! `y_1, y_2` in an `ℓ^p`-isometric subspace, apply the coordinatewise Clarkson
//! inequality there, and transfer the midpoint bound back with the `σ` slack.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::approx::{verify_axiom_instance, Verdict, VerifyOptions};
use crate::error::{Error, Result};
use crate::measure::SimpleFunction;
use crate::scalar::Exponent;
use crate::tol;

fn require_p(p: f64) -> Result<Exponent> {
    Exponent::new(p)?.require_convex_regime()
}

fn require_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps <= 2.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("ε must lie in (0, 2], got {eps}")))
    }
}

fn require_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// `(1 - t^p)^{1/p}` for `t ∈ [0, 1]`, the height of the unit sphere of `ℝ²_p` above `t`.
fn complement(t: f64, p: Exponent) -> f64 {
    p.root((1.0 - p.powf(t)).max(0.0))
}

/// The modulus of uniform convexity `η(ε) = 1 - (1 - (ε/2)^p)^{1/p}`.
pub fn eta(eps: f64, p: f64) -> Result<f64> {
    let p = require_p(p)?;
    require_eps(eps)?;
    Ok(1.0 - complement(eps / 2.0, p))
}

/// `σ(a, d) = a - (1 - ((1 - a^p)^{1/p} + d)^p)^{1/p}`, or `a` when
/// `(1 - a^p)^{1/p} + d ≥ 1`.
pub fn sigma(a: f64, d: f64, p: f64) -> Result<f64> {
    let p = require_p(p)?;
    require_open_unit("a", a)?;
    require_open_unit("d", d)?;
    Ok(sigma_raw(a, d, p))
}

/// As [`sigma`], additionally admitting `a = 1` (needed for `ε = 2`).
fn sigma_raw(a: f64, d: f64, p: Exponent) -> f64 {
    let r = complement(a, p) + d;
    if r >= 1.0 {
        a
    } else {
        a - complement(r, p)
    }
}

fn le_rel(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + tol::RELATIVE * rhs.abs().max(f64::MIN_POSITIVE)
}

/// `x_1^p + x_2^p ≤ (x_1² + x_2²)^{p/2}` up to relative slack.
pub fn check_power_inequality(x1: f64, x2: f64, p: f64) -> Result<bool> {
    let p = require_p(p)?;
    if x1 < 0.0 || x2 < 0.0 {
        return Err(Error::Parameter("arguments must be non-negative".into()));
    }
    let lhs = p.powf(x1) + p.powf(x2);
    let rhs = (x1 * x1 + x2 * x2).powf(p.value() / 2.0);
    Ok(le_rel(lhs, rhs))
}

/// `|(a+b)/2|^p + |(a-b)/2|^p ≤ (|a|^p + |b|^p)/2` up to relative slack.
pub fn check_clarkson(a: f64, b: f64, p: f64) -> Result<bool> {
    let p = require_p(p)?;
    let lhs = p.powf((a + b) / 2.0) + p.powf((a - b) / 2.0);
    let rhs = (p.powf(a) + p.powf(b)) / 2.0;
    Ok(le_rel(lhs, rhs))
}

/// `(1 - (a-δ)^p)^{1/p} ≤ (1 - a^p)^{1/p} + d` for `δ ∈ (0, σ(a, d))`.
pub fn check_sigma_bound(a: f64, d: f64, delta: f64, p: f64) -> Result<bool> {
    let s = sigma(a, d, p)?;
    if !(delta > 0.0 && delta < s) {
        return Err(Error::Precondition(format!("δ = {delta} not in (0, σ = {s})")));
    }
    let p = require_p(p)?;
    Ok(le_rel(complement(a - delta, p), complement(a, p) + d))
}

/// `δ = min{c/2, σ(ε/2, c/2)/2}`.
pub fn delta_for(eps: f64, c: f64, p: f64) -> Result<f64> {
    let pe = require_p(p)?;
    require_eps(eps)?;
    require_open_unit("c", c)?;
    let delta = (c / 2.0).min(sigma_raw(eps / 2.0, c / 2.0, pe) / 2.0);
    if !(delta > 0.0 && delta < eps / 2.0) {
        return Err(Error::Parameter(format!("δ = {delta} degenerate for ε = {eps}, c = {c}")));
    }
    Ok(delta)
}

/// One evaluated inequality `lhs ≤ rhs` (or `<` when `strict`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainStep {
    pub step: String,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
    pub slack: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityCertificate {
    pub p: f64,
    pub eps: f64,
    pub c: f64,
    pub delta: f64,
    pub sigma: f64,
    pub rho: f64,
    pub eta: f64,
    /// Grid parameter handed to the approximation, `⌈1/δ⌉`.
    pub n_grid: u64,
    pub dimension: usize,
    pub witness_verdict: Verdict,
    pub chain: Vec<ChainStep>,
    pub passed: bool,
    pub first_failure: Option<String>,
}

struct Chain(Vec<ChainStep>);

impl Chain {
    fn le(&mut self, step: &str, lhs: f64, rhs: f64, slack: f64) {
        let holds = lhs <= rhs + slack;
        self.0.push(ChainStep { step: step.into(), lhs, rhs, strict: false, slack, holds });
    }

    fn lt(&mut self, step: &str, lhs: f64, rhs: f64) {
        self.0.push(ChainStep { step: step.into(), lhs, rhs, strict: true, slack: 0.0, holds: lhs < rhs });
    }

    fn rel(&mut self, step: &str, lhs: f64, rhs: f64) {
        self.le(step, lhs, rhs, tol::RELATIVE * rhs.abs().max(1.0));
    }
}

/// Replays the convexity argument on `x1, x2` and records every inequality.
///
/// Requires `‖x_k‖ ≤ 1`, `‖x1 - x2‖ ≥ ε` (both up to relative slack) and
/// `c ∈ (0, 1)`. A failed inequality does not produce an error; it is reported in
/// the returned chain.
pub fn certify_uniform_convexity(
    x1: &SimpleFunction<f64>,
    x2: &SimpleFunction<f64>,
    eps: f64,
    c: f64,
    p: f64,
    options: &VerifyOptions,
) -> Result<ConvexityCertificate> {
    let pe = require_p(p)?;
    require_eps(eps)?;
    require_open_unit("c", c)?;
    x1.check_same_space(x2)?;
    for (k, x) in [x1, x2].iter().enumerate() {
        let norm = x.lp_norm(pe)?;
        if norm > 1.0 + tol::RELATIVE {
            return Err(Error::Precondition(format!("‖x{}‖ = {norm} > 1", k + 1)));
        }
    }
    let dist = x1.sub(x2)?.lp_norm(pe)?;
    if dist < eps * (1.0 - tol::RELATIVE) {
        return Err(Error::Precondition(format!("‖x1 - x2‖ = {dist} < ε = {eps}")));
    }

    let delta = delta_for(eps, c, p)?;
    let sig = sigma_raw(eps / 2.0, c / 2.0, pe);
    let n_grid = (1.0 / delta).ceil() as u64;
    let check = verify_axiom_instance(&[x1.clone(), x2.clone()], n_grid, pe, options)?;
    let w = &check.witness;
    let y1 = w.approximant(0)?;
    let y2 = w.approximant(1)?;

    let mut chain = Chain(Vec::new());
    let bound = options.tolerances.bound;
    chain.lt("delta-positive", 0.0, delta);
    chain.lt("delta-below-sigma", delta, sig);
    chain.lt("delta-below-half-eps", delta, eps / 2.0);
    chain.le("witness-verified", if check.verdict.passed { 0.0 } else { 1.0 }, 0.0, 0.0);
    chain.le("grid-accuracy", 1.0 / n_grid as f64, delta, 0.0);
    for (k, (x, y)) in [(x1, &y1), (x2, &y2)].into_iter().enumerate() {
        chain.le(&format!("approximation-error-{}", k + 1), x.sub(y)?.lp_norm(pe)?, delta, bound);
        chain.le(&format!("approximant-norm-{}", k + 1), y.lp_norm(pe)?, 1.0, bound);
    }

    let mu1 = w.unit_coords(0);
    let mu2 = w.unit_coords(1);
    let (mut half_sum, mut half_diff, mut avg) = (0.0, 0.0, 0.0);
    for (a, b) in mu1.iter().zip(&mu2) {
        half_sum += pe.powf((a + b) / 2.0);
        half_diff += pe.powf((a - b) / 2.0);
        avg += (pe.powf(*a) + pe.powf(*b)) / 2.0;
    }
    chain.rel("clarkson-coordinates", half_sum + half_diff, avg);
    chain.le("coordinate-average", avg, 1.0, bound);

    let mid_y = y1.add(&y2)?.scale(&0.5);
    let half_gap_y = y1.sub(&y2)?.scale(&0.5);
    let mid_y_pow = mid_y.lp_norm_pow(pe)?;
    chain.le("clarkson-norms", mid_y_pow + half_gap_y.lp_norm_pow(pe)?, 1.0, bound);

    let rho = eps - 2.0 * delta;
    chain.lt("rho-positive", 0.0, rho);
    chain.le("separation", rho, y1.sub(&y2)?.lp_norm(pe)?, bound);
    let mid_y_norm = pe.root(mid_y_pow);
    let midpoint_bound = complement(rho / 2.0, pe);
    chain.le("midpoint-bound", mid_y_norm, midpoint_bound, bound);

    let mid_x_norm = x1.add(x2)?.scale(&0.5).lp_norm(pe)?;
    chain.le("transfer", mid_x_norm, mid_y_norm + delta, bound);
    let target = complement(eps / 2.0, pe);
    chain.rel("sigma-step", midpoint_bound, target + c / 2.0);
    chain.le("conclusion", mid_x_norm, target + c, bound);

    let first_failure = chain.0.iter().find(|s| !s.holds).map(|s| s.step.clone());
    Ok(ConvexityCertificate {
        p,
        eps,
        c,
        delta,
        sigma: sig,
        rho,
        eta: 1.0 - target,
        n_grid,
        dimension: w.dimension(),
        witness_verdict: check.verdict,
        passed: first_failure.is_none(),
        first_failure,
        chain: chain.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusEstimate {
    pub p: f64,
    pub dim: usize,
    pub eps: f64,
    pub eta: f64,
    /// Smallest `1 - ‖(u+v)/2‖` found over all admissible pairs examined.
    pub oracle: f64,
    /// Value on the deterministic pair `(s, ±ε/2)`.
    pub extremal: f64,
    pub accepted: usize,
}

#[derive(Debug, Clone)]
pub struct ModulusOptions {
    pub samples: usize,
    pub seed: u64,
    /// Pairs refined by local search at the end of each shard.
    pub refine: usize,
    pub refine_steps: usize,
}

impl Default for ModulusOptions {
    fn default() -> Self {
        Self { samples: 100_000, seed: 0, refine: 4, refine_steps: 400 }
    }
}

const SHARDS: u64 = 16;

fn norm_p(v: &[f64], p: Exponent) -> f64 {
    p.root(v.iter().map(|x| p.powf(*x)).sum())
}

fn objective(u: &[f64], v: &[f64], p: Exponent) -> f64 {
    let mid: Vec<f64> = u.iter().zip(v).map(|(a, b)| (a + b) / 2.0).collect();
    1.0 - norm_p(&mid, p)
}

fn admissible(u: &[f64], v: &[f64], eps: f64, p: Exponent) -> bool {
    let diff: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - b).collect();
    norm_p(u, p) <= 1.0 && norm_p(v, p) <= 1.0 && norm_p(&diff, p) >= eps
}

fn random_ball_point<R: Rng>(rng: &mut R, m: usize, p: Exponent) -> Vec<f64> {
    loop {
        let g: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let n = norm_p(&g, p);
        if n < 1e-9 {
            continue;
        }
        let r: f64 = if rng.gen_bool(0.5) { 1.0 } else { rng.gen::<f64>().powf(1.0 / m as f64) };
        return g.into_iter().map(|x| x * r / n).collect();
    }
}

fn clamp_to_ball(v: &mut [f64], p: Exponent) {
    let n = norm_p(v, p);
    if n > 1.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

/// Sample admissible pairs, spreading `v` from `u` when they are too close.
fn sample_pair<R: Rng>(rng: &mut R, m: usize, eps: f64, p: Exponent) -> Option<(Vec<f64>, Vec<f64>)> {
    let u = random_ball_point(rng, m, p);
    let mut v = if rng.gen_bool(0.5) {
        random_ball_point(rng, m, p)
    } else {
        // near-antipodal partner, useful for ε close to 2
        let mut v: Vec<f64> = u.iter().map(|x| -x + rng.gen_range(-0.2..=0.2)).collect();
        clamp_to_ball(&mut v, p);
        v
    };
    let diff: Vec<f64> = v.iter().zip(&u).map(|(a, b)| a - b).collect();
    let d = norm_p(&diff, p);
    if d < eps && d > 0.0 {
        v = u.iter().zip(&diff).map(|(a, dd)| a + dd * eps / d).collect();
    }
    admissible(&u, &v, eps, p).then_some((u, v))
}

fn refine<R: Rng>(rng: &mut R, u: &mut Vec<f64>, v: &mut Vec<f64>, eps: f64, p: Exponent, steps: usize) -> f64 {
    let mut best = objective(u, v, p);
    let mut step = 0.05;
    for _ in 0..steps {
        let mut cu: Vec<f64> = u.iter().map(|x| x + rng.gen_range(-step..=step)).collect();
        let mut cv: Vec<f64> = v.iter().map(|x| x + rng.gen_range(-step..=step)).collect();
        clamp_to_ball(&mut cu, p);
        clamp_to_ball(&mut cv, p);
        if admissible(&cu, &cv, eps, p) {
            let val = objective(&cu, &cv, p);
            if val < best {
                best = val;
                *u = cu;
                *v = cv;
                continue;
            }
        }
        step = (step * 0.97).max(1e-7);
    }
    best
}

/// `1 - ‖(u+v)/2‖` for `u = (s, ε/2, 0..)`, `v = (s, -ε/2, 0..)`, `s = (1-(ε/2)^p)^{1/p}`.
pub fn extremal_pair_value(eps: f64, p: f64, dim: usize) -> Result<f64> {
    let pe = require_p(p)?;
    require_eps(eps)?;
    let t = eps / 2.0;
    let s = complement(t, pe);
    let mut u = vec![0.0; dim.max(2)];
    let mut v = u.clone();
    u[0] = s;
    v[0] = s;
    u[1] = t;
    v[1] = -t;
    Ok(objective(&u, &v, pe))
}

/// Smallest `1 - ‖(u+v)/2‖_p` over sampled pairs in the unit ball of `ℝ^dim_p`
/// with `‖u - v‖_p ≥ ε`, together with the deterministic extremal pair.
///
/// Sampling is split into fixed seeded shards, so the result does not depend on
/// the number of worker threads.
pub fn brute_force_modulus(p: f64, dim: usize, eps: f64, options: &ModulusOptions) -> Result<ModulusEstimate> {
    let pe = require_p(p)?;
    require_eps(eps)?;
    if !(2..=3).contains(&dim) {
        return Err(Error::Parameter(format!("dimension must be 2 or 3, got {dim}")));
    }
    let extremal = extremal_pair_value(eps, p, dim)?;
    let per_shard = options.samples.div_ceil(SHARDS as usize);
    let (oracle, accepted) = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(shard);
            let mut best: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
            let mut accepted = 0usize;
            for _ in 0..per_shard * 4 {
                if accepted >= per_shard {
                    break;
                }
                if let Some((u, v)) = sample_pair(&mut rng, dim, eps, pe) {
                    accepted += 1;
                    let val = objective(&u, &v, pe);
                    if best.len() < options.refine.max(1) || val < best.last().map_or(f64::INFINITY, |b| b.0) {
                        best.push((val, u, v));
                        best.sort_by(|a, b| a.0.total_cmp(&b.0));
                        best.truncate(options.refine.max(1));
                    }
                }
            }
            let mut min = best.first().map_or(f64::INFINITY, |b| b.0);
            for (_, mut u, mut v) in best.into_iter().take(options.refine) {
                min = min.min(refine(&mut rng, &mut u, &mut v, eps, pe, options.refine_steps));
            }
            (min, accepted)
        })
        .reduce(|| (f64::INFINITY, 0), |a, b| (a.0.min(b.0), a.1 + b.1));
    Ok(ModulusEstimate {
        p,
        dim,
        eps,
        eta: eta(eps, p)?,
        oracle: oracle.min(extremal),
        extremal,
        accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::MeasureSpace;
    use std::sync::Arc;

    #[test]
    fn eta_values() {
        for p in [2.0, 3.0, 4.5] {
            assert_eq!(eta(2.0, p).unwrap(), 1.0);
        }
        assert!((eta(1.0, 2.0).unwrap() - 0.1339745962155614).abs() < 1e-12);
        assert!((eta(2f64.sqrt(), 2.0).unwrap() - 0.2928932188134524).abs() < 1e-12);
        assert!(eta(0.0, 2.0).is_err());
        assert!(eta(2.5, 2.0).is_err());
        assert!(eta(1.0, 1.5).is_err());
    }

    #[test]
    fn sigma_values() {
        // independent step-by-step evaluation: 0.5 - sqrt(1 - (sqrt(0.75) + 0.1)^2)
        assert!((sigma(0.5, 0.1, 2.0).unwrap() - 0.2415528695397985).abs() < 1e-12);
        assert_eq!(sigma(0.9, 0.9, 2.0).unwrap(), 0.9);
        assert!(sigma(0.0, 0.5, 2.0).is_err());
        assert!(sigma(0.5, 1.0, 2.0).is_err());
    }

    #[test]
    fn power_inequality_examples() {
        assert!(check_power_inequality(3.0, 0.0, 3.0).unwrap());
        assert!(check_power_inequality(1.0, 1.0, 2.0).unwrap());
        assert!(check_power_inequality(1.0, 1.0, 4.0).unwrap());
        assert!(check_power_inequality(-1.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn clarkson_examples() {
        assert!(check_clarkson(1.0, 1.0, 3.0).unwrap());
        assert!(check_clarkson(1.0, -1.0, 3.0).unwrap());
        assert!(check_clarkson(1.0, 0.0, 2.0).unwrap());
    }

    #[test]
    fn sigma_bound_examples() {
        assert!(check_sigma_bound(0.5, 0.1, 1e-15, 2.0).unwrap());
        assert!(check_sigma_bound(0.5, 0.1, 0.12, 2.0).unwrap());
        assert!(matches!(check_sigma_bound(0.5, 0.1, 0.3, 2.0), Err(Error::Precondition(_))));
        assert!(matches!(check_sigma_bound(0.5, 0.1, 0.0, 2.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_for(1.0, 0.5, 2.0).unwrap(), 0.25);
        // σ(1/2, 1/20) ≈ 0.0988797 so σ/2 < c/2
        let d = delta_for(1.0, 0.1, 2.0).unwrap();
        assert!((d - 0.04943987209470316).abs() < 1e-12, "{d}");
        let d = delta_for(2.0, 0.25, 3.0).unwrap();
        assert!(d > 0.0 && d < 1.0);
    }

    #[test]
    fn orthogonal_pair_certificate() {
        let s = Arc::new(MeasureSpace::uniform(2));
        let x1 = SimpleFunction::new(s.clone(), vec![1.0, 0.0]).unwrap();
        let x2 = SimpleFunction::new(s, vec![0.0, 1.0]).unwrap();
        let cert = certify_uniform_convexity(&x1, &x2, 2f64.sqrt(), 0.01, 2.0, &VerifyOptions::default()).unwrap();
        assert!(cert.passed, "{:?}", cert.first_failure);
        let last = cert.chain.last().unwrap();
        assert!((last.lhs - 0.5f64.sqrt()).abs() < 1e-12);
        assert!((last.rhs - (0.5f64.sqrt() + 0.01)).abs() < 1e-12);
    }

    #[test]
    fn coincident_inputs_rejected() {
        let s = Arc::new(MeasureSpace::uniform(2));
        let x = SimpleFunction::new(s, vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            certify_uniform_convexity(&x, &x, 0.1, 0.5, 2.0, &VerifyOptions::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn extremal_family_hits_eta() {
        for p in [2.0, 3.0, 4.0] {
            for eps in [0.1, 1.0, 1.9] {
                let e = eta(eps, p).unwrap();
                assert!((extremal_pair_value(eps, p, 3).unwrap() - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn small_oracle_run() {
        let opts = ModulusOptions { samples: 4000, ..Default::default() };
        let est = brute_force_modulus(2.0, 2, 1.0, &opts).unwrap();
        assert!((est.oracle - 0.1339745962155614).abs() < 1e-6, "{est:?}");
        let near_two = brute_force_modulus(2.0, 2, 1.999, &opts).unwrap();
        assert!(near_two.oracle > 0.95);
        let p4 = brute_force_modulus(4.0, 2, 1.0, &opts).unwrap();
        assert!(p4.oracle >= p4.eta - 1e-6 && p4.extremal <= p4.eta + 1e-3);
        assert!(brute_force_modulus(2.0, 4, 1.0, &opts).is_err());
    }
}
