//! Flat and steep approximations within a trace-distance ball, and the
//! smoothed min/max relative entropies derived from them.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{measures, trace_distance_slices, Dichotomy, Spectrum};

/// Largest dimension for which the exact smoothed min-entropy is searched.
pub const EXACT_SEARCH_LIMIT: usize = 16;

/// Feasibility slack for the excluded mass in the exact subset search.
const EXCLUDED_MASS_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproxKind {
    Flat,
    Steep,
}

/// Construction data of an approximation, with 1-based sigma-order indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ApproxIndices {
    /// The state was replaced by the reference (flat) or a point mass
    /// (steep), or left untouched because the dimension is one.
    Saturated,
    /// Head block `1..=m` and tail block `n..=d` were rescaled.
    Flat { m: usize, n: usize },
    /// Entries beyond `r` were removed; `tail_mass` is their total.
    Steep { r: usize, tail_mass: f64 },
}

/// An approximating state in the original index order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxState {
    pub spectrum: Spectrum,
    pub eps: f64,
    pub kind: ApproxKind,
    pub indices: ApproxIndices,
}

impl ApproxState {
    /// The approximation paired with the original reference.
    pub fn dichotomy(&self, d: &Dichotomy) -> Dichotomy {
        d.with_state(self.spectrum.clone())
            .expect("approximation has the reference's dimension")
    }
}

fn check_closed_eps(eps: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

fn check_open_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

fn unsort(order: &[usize], sorted: &[f64]) -> Spectrum {
    let mut values = vec![0.0; order.len()];
    for (k, &i) in order.iter().enumerate() {
        values[i] = sorted[k];
    }
    Spectrum::from_raw(values)
}

/// The flattest state within trace distance `eps` of `d.p()`: every state in
/// the ball majorizes it relative to `d.s()`.
pub fn flat_approximation(d: &Dichotomy, eps: f64) -> Result<ApproxState> {
    check_closed_eps(eps)?;
    let state = |spectrum, indices| ApproxState {
        spectrum,
        eps,
        kind: ApproxKind::Flat,
        indices,
    };
    let dim = d.dim();
    if dim == 1 {
        return Ok(state(d.p().clone(), ApproxIndices::Saturated));
    }
    let distance = trace_distance_slices(d.p().values(), d.s().values())?;
    if distance < eps {
        return Ok(state(d.s().clone(), ApproxIndices::Saturated));
    }
    let (p, s) = d.ordered();
    let mut head_p = vec![0.0; dim + 1];
    let mut head_s = vec![0.0; dim + 1];
    for k in 0..dim {
        head_p[k + 1] = head_p[k] + p[k];
        head_s[k + 1] = head_s[k] + s[k];
    }
    let mut tail_p = vec![0.0; dim + 2];
    let mut tail_s = vec![0.0; dim + 2];
    for k in (1..=dim).rev() {
        tail_p[k] = tail_p[k + 1] + p[k - 1];
        tail_s[k] = tail_s[k + 1] + s[k - 1];
    }
    // 1-based: head sums over 1..=m, tail sums over n..=d
    let m = (1..dim)
        .find(|&m| eps <= head_p[m] - p[m] / s[m] * head_s[m])
        .unwrap_or(dim - 1);
    let n = (2..=dim)
        .rev()
        .find(|&n| eps <= p[n - 2] / s[n - 2] * tail_s[n] - tail_p[n])
        .unwrap_or(2);
    if m >= n {
        // only reachable through round-off at eps = D(p, s), where the
        // flattest state is the reference itself
        return Ok(state(d.s().clone(), ApproxIndices::Saturated));
    }
    let head_scale = (head_p[m] - eps) / head_s[m];
    let tail_scale = (tail_p[n] + eps) / tail_s[n];
    let mut out = p.clone();
    for k in 0..m {
        out[k] = s[k] * head_scale;
    }
    for k in (n - 1)..dim {
        out[k] = s[k] * tail_scale;
    }
    Ok(state(
        unsort(d.sigma_order(), &out),
        ApproxIndices::Flat { m, n },
    ))
}

/// A state within trace distance `eps` of `d.p()` that majorizes it: mass
/// `eps` is moved from the lowest-ratio entries onto the highest-ratio one.
pub fn steep_approximation(d: &Dichotomy, eps: f64) -> Result<ApproxState> {
    check_closed_eps(eps)?;
    let state = |spectrum, indices| ApproxState {
        spectrum,
        eps,
        kind: ApproxKind::Steep,
        indices,
    };
    let dim = d.dim();
    let (p, _) = d.ordered();
    let top = d.sigma_order()[0];
    if eps > 1.0 - p[0] {
        let point = Spectrum::point_mass(dim, top)?;
        return Ok(state(point, ApproxIndices::Saturated));
    }
    if dim == 1 {
        return Ok(state(d.p().clone(), ApproxIndices::Saturated));
    }
    let mut tail = vec![0.0; dim + 2];
    for k in (1..=dim).rev() {
        tail[k] = tail[k + 1] + p[k - 1];
    }
    let r = (2..=dim).rev().find(|&r| tail[r] >= eps).unwrap_or(2);
    let removed = tail[r + 1];
    let mut out = p.clone();
    out[0] += eps;
    out[r - 1] = (out[r - 1] - (eps - removed)).max(0.0);
    for v in out.iter_mut().skip(r) {
        *v = 0.0;
    }
    Ok(state(
        unsort(d.sigma_order(), &out),
        ApproxIndices::Steep {
            r,
            tail_mass: removed,
        },
    ))
}

/// `sqrt(V (1/eps - 1))`, the Cantelli deviation at confidence `eps`.
pub fn f_sigma(variance: f64, eps: f64) -> f64 {
    (variance * (1.0 / eps - 1.0)).max(0.0).sqrt()
}

/// Envelope slopes `2^(S - f)` and `2^(S + f)`: the steep approximation's
/// curve lies above `min(r_st x, 1)` and the flat one's below `min(r_fl x, 1)`.
pub fn cantelli_envelopes(d: &Dichotomy, eps: f64) -> Result<(f64, f64)> {
    check_open_eps(eps)?;
    let m = measures(d);
    let f = f_sigma(m.variance, eps);
    Ok((
        (m.relative_entropy - f).exp2(),
        (m.relative_entropy + f).exp2(),
    ))
}

/// Smoothed divergences of one dichotomy at smoothing `eps`, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothedBounds {
    /// Max relative entropy of the flat approximation.
    pub smax_eps: f64,
    /// Min relative entropy of the steep approximation.
    pub smin_eps_lower: f64,
    /// Exact smoothed min relative entropy, for small dimensions.
    pub smin_eps_exact: Option<f64>,
    pub f_sigma: f64,
}

/// Computes the smoothed bounds; the exact min-entropy search runs when the
/// dimension is at most [`EXACT_SEARCH_LIMIT`].
pub fn smoothed_divergences(d: &Dichotomy, eps: f64) -> Result<SmoothedBounds> {
    check_open_eps(eps)?;
    let flat = flat_approximation(d, eps)?.dichotomy(d);
    let steep = steep_approximation(d, eps)?.dichotomy(d);
    let exact = if d.dim() <= EXACT_SEARCH_LIMIT {
        Some(smin_eps_exact(d, eps)?)
    } else {
        None
    };
    Ok(SmoothedBounds {
        smax_eps: measures(&flat).smax,
        smin_eps_lower: measures(&steep).smin,
        smin_eps_exact: exact,
        f_sigma: f_sigma(measures(d).variance, eps),
    })
}

/// Maximizes `-log sum_{i in A} s_i` over nonempty supports `A` whose
/// complement carries at most `eps` of the mass of `p`.
pub fn smin_eps_exact(d: &Dichotomy, eps: f64) -> Result<f64> {
    check_open_eps(eps)?;
    let dim = d.dim();
    if dim > EXACT_SEARCH_LIMIT {
        return Err(Error::ExactSearchTooLarge(dim));
    }
    let p = d.p().values();
    let s = d.s().values();
    let best = (1u32..(1u32 << dim))
        .into_par_iter()
        .filter_map(|mask| {
            let mut excluded = 0.0;
            let mut weight = 0.0;
            for i in 0..dim {
                if mask & (1 << i) != 0 {
                    weight += s[i];
                } else {
                    excluded += p[i];
                }
            }
            (excluded <= eps + EXCLUDED_MASS_SLACK).then_some(weight)
        })
        .min_by(f64::total_cmp)
        .expect("the full support is always feasible");
    Ok(-best.min(1.0).log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorenz::{dominates, lorenz_curve};
    use crate::measures::trace_distance;

    fn unital(p: &[f64]) -> Dichotomy {
        Dichotomy::unital(Spectrum::new(p.to_vec()).unwrap()).unwrap()
    }

    fn close(a: &[f64], b: &[f64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn zero_eps_is_identity() {
        let d = Dichotomy::from_vecs(vec![0.2, 0.5, 0.3], vec![0.3, 0.3, 0.4]).unwrap();
        let f = flat_approximation(&d, 0.0).unwrap();
        let s = steep_approximation(&d, 0.0).unwrap();
        assert!(close(f.spectrum.values(), d.p().values()));
        assert!(close(s.spectrum.values(), d.p().values()));
    }

    #[test]
    fn flat_returns_reference_inside_ball() {
        let d = unital(&[0.4, 0.35, 0.25]);
        let f = flat_approximation(&d, 0.2).unwrap();
        assert_eq!(f.spectrum, *d.s());
        assert_eq!(f.indices, ApproxIndices::Saturated);
    }

    #[test]
    fn flat_worked_example() {
        let d = unital(&[0.7, 0.2, 0.1]);
        let f = flat_approximation(&d, 0.05).unwrap();
        assert_eq!(f.indices, ApproxIndices::Flat { m: 1, n: 3 });
        assert!(close(f.spectrum.values(), &[0.65, 0.2, 0.15]));
        assert!(dominates(&lorenz_curve(&d), &lorenz_curve(&f.dichotomy(&d))).decision);
        assert!((trace_distance(&f.spectrum, d.p()).unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn flat_keeps_original_index_order() {
        let d = unital(&[0.1, 0.2, 0.7]);
        let f = flat_approximation(&d, 0.05).unwrap();
        assert!(close(f.spectrum.values(), &[0.15, 0.2, 0.65]));
    }

    #[test]
    fn steep_worked_example() {
        let d = unital(&[0.7, 0.2, 0.1]);
        let s = steep_approximation(&d, 0.1).unwrap();
        assert!(close(s.spectrum.values(), &[0.8, 0.2, 0.0]));
        assert_eq!(
            s.indices,
            ApproxIndices::Steep {
                r: 3,
                tail_mass: 0.0
            }
        );
    }

    #[test]
    fn steep_saturates_to_point_mass() {
        let d = unital(&[0.2, 0.7, 0.1]);
        let s = steep_approximation(&d, 0.4).unwrap();
        assert_eq!(s.spectrum.values(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn eps_range_is_checked() {
        let d = unital(&[0.7, 0.3]);
        assert_eq!(flat_approximation(&d, 1.5).unwrap_err(), Error::InvalidEpsilon(1.5));
        assert_eq!(steep_approximation(&d, -0.1).unwrap_err(), Error::InvalidEpsilon(-0.1));
        assert!(cantelli_envelopes(&d, 0.0).is_err());
        assert!(smoothed_divergences(&d, 1.0).is_err());
    }

    #[test]
    fn envelopes_collapse_for_flat_states() {
        let d = unital(&[0.5, 0.5, 0.0, 0.0]);
        let (lo, hi) = cantelli_envelopes(&d, 0.3).unwrap();
        assert!((lo - 2.0).abs() < 1e-12 && (hi - 2.0).abs() < 1e-12);
        let d = unital(&[0.6, 0.3, 0.1]);
        let (lo, hi) = cantelli_envelopes(&d, 1.0 - 1e-15).unwrap();
        assert!((lo - hi).abs() < 1e-6);
    }

    #[test]
    fn exact_smin_subset_example() {
        let d = unital(&[0.5, 0.25, 0.25]);
        let v = smin_eps_exact(&d, 0.25).unwrap();
        assert!((v + (2.0f64 / 3.0).log2()).abs() < 1e-12);
        let b = smoothed_divergences(&d, 0.25).unwrap();
        assert!(b.smin_eps_exact.unwrap() >= b.smin_eps_lower - 1e-9);
    }

    #[test]
    fn exact_search_is_capped() {
        let d = unital(&[1.0 / 17.0; 17]);
        assert_eq!(smin_eps_exact(&d, 0.1), Err(Error::ExactSearchTooLarge(17)));
        assert_eq!(smoothed_divergences(&d, 0.1).unwrap().smin_eps_exact, None);
    }

    #[test]
    fn small_eps_recovers_unsmoothed_values() {
        let d = Dichotomy::from_vecs(vec![0.6, 0.3, 0.1, 0.0], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let m = measures(&d);
        let b = smoothed_divergences(&d, 1e-12).unwrap();
        assert!((b.smax_eps - m.smax).abs() < 1e-9);
        assert!((b.smin_eps_lower - m.smin).abs() < 1e-9);
        assert!((b.smin_eps_exact.unwrap() - m.smin).abs() < 1e-9);
    }
}
