use serde::Serialize;

/// Result of regularizing a sequence: the chosen source index for each output position.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CauchyHat<P> {
    pub points: Vec<P>,
    pub indices: Vec<usize>,
    /// Least `k` whose guard failed, if any.
    pub first_failure: Option<usize>,
    /// Effective horizon after clamping to the supplied points.
    pub horizon: usize,
}

/// Guard for step `k`: an approximation of `d` from a grid of mesh `2^{-(k+1)}`, taken
/// from below but never more than one mesh below, compared against `6·2^{-(k+1)}`.
pub fn guard_passes(d: f64, k: usize) -> bool {
    if !d.is_finite() {
        return false;
    }
    let scaled = d.next_up() * 2f64.powi((k as i32).saturating_add(1).min(1000));
    scaled.floor() < 6.0
}

/// `x̂_n = x_n` while every guard `k < n` passes, else `x_k` for the least failing `k`.
/// Outputs are produced for `n = 0..=horizon`; the horizon is clamped to `x.len() - 1`.
pub fn cauchy_hat<P: Clone>(x: &[P], metric: impl Fn(&P, &P) -> f64, horizon: usize) -> CauchyHat<P> {
    if x.is_empty() {
        return CauchyHat { points: vec![], indices: vec![], first_failure: None, horizon: 0 };
    }
    let h = horizon.min(x.len() - 1);
    let first_failure = (0..h).find(|&k| !guard_passes(metric(&x[k], &x[k + 1]), k));
    let indices: Vec<usize> = (0..=h)
        .map(|n| match first_failure {
            Some(k) if k < n => k,
            _ => n,
        })
        .collect();
    CauchyHat {
        points: indices.iter().map(|&i| x[i].clone()).collect(),
        indices,
        first_failure,
        horizon: h,
    }
}

/// Largest ratio `d(x̂_n, x̂_m) / 2^{-min(n,m)+3}` over all pairs; at most 1 when the
/// rate holds.
pub fn rate_violation<P>(points: &[P], metric: impl Fn(&P, &P) -> f64) -> f64 {
    let mut worst = 0f64;
    for n in 0..points.len() {
        for m in n + 1..points.len() {
            let bound = 2f64.powi(3 - n as i32);
            worst = worst.max(metric(&points[n], &points[m]) / bound);
        }
    }
    worst
}
