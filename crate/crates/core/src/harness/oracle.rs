//! Brute-force reference implementations used to cross-check the library.

use rand::Rng;

use crate::measures::{trace_distance, Dichotomy, Spectrum};

/// Tolerance shared with the Lorenz-curve decision.
pub const ORACLE_SLACK: f64 = 1e-12;

/// `E_t(p, s) = sum_i max(p_i - t s_i, 0)`.
pub fn hypothesis_testing(d: &Dichotomy, t: f64) -> f64 {
    d.p()
        .values()
        .iter()
        .zip(d.s().values())
        .map(|(&p, &s)| (p - t * s).max(0.0))
        .sum()
}

/// Decides `a ≻ b` by comparing `E_t` at `t = 0` and at every ratio
/// `p_i / s_i` of either pair. Returns the decision and the smallest margin.
pub fn hypothesis_testing_dominates(a: &Dichotomy, b: &Dichotomy) -> (bool, f64) {
    let mut ts = vec![0.0];
    ts.extend((0..a.dim()).map(|i| a.ratio(i)));
    ts.extend((0..b.dim()).map(|i| b.ratio(i)));
    let worst = ts
        .into_iter()
        .map(|t| hypothesis_testing(a, t) - hypothesis_testing(b, t))
        .fold(f64::INFINITY, f64::min);
    (worst >= -ORACLE_SLACK, worst)
}

/// Classical majorization by partial sums of the sorted entries; the shorter
/// vector is padded with zeros.
pub fn partial_sum_majorizes(p: &[f64], q: &[f64]) -> (bool, f64) {
    let mut a = p.to_vec();
    let mut b = q.to_vec();
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    let n = a.len().max(b.len());
    let (mut sa, mut sb) = (0.0, 0.0);
    let mut worst = 0.0f64;
    for k in 0..n {
        sa += a.get(k).copied().unwrap_or(0.0);
        sb += b.get(k).copied().unwrap_or(0.0);
        worst = worst.min(sa - sb);
    }
    (worst >= -ORACLE_SLACK, worst)
}

/// Smoothed max relative entropy as `log min { λ >= 1 : sum (p_i - λ s_i)^+ <= eps }`,
/// located by bisection.
pub fn smax_eps_bisection(d: &Dichotomy, eps: f64) -> f64 {
    let excess = |lambda: f64| hypothesis_testing(d, lambda);
    if excess(1.0) <= eps {
        return 0.0;
    }
    let (mut lo, mut hi) = (1.0, 1.0);
    while excess(hi) > eps {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi.log2()
}

/// A random state within trace distance `eps` of `p`, placed on a random
/// segment towards a Dirichlet draw.
pub fn ball_sample<R: Rng + ?Sized>(rng: &mut R, p: &Spectrum, eps: f64) -> Spectrum {
    let q = super::sampling::random_spectrum(rng, p.dim(), 0.5);
    let dist = trace_distance(p, &q).expect("same dimension");
    if dist == 0.0 {
        return p.clone();
    }
    let u: f64 = if rng.random_bool(0.3) { 1.0 } else { rng.random() };
    let t = (eps * u / dist).min(1.0);
    Spectrum::from_raw(
        p.values()
            .iter()
            .zip(q.values())
            .map(|(a, b)| (1.0 - t) * a + t * b)
            .collect(),
    )
}
