//! Transition criteria and bounds: sufficient conditions, entropy
//! production, marginal budgets, Landauer erasure, catalysts and i.i.d. rates.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::approx::{f_sigma, flat_approximation, steep_approximation};
use crate::error::{Error, Result};
use crate::lorenz::{dominates, exact_transition, lorenz_curve, TransitionVerdict};
use crate::measures::{
    marginals, measures, monotone_m, monotone_m_unital, mutual_information, shannon_entropy,
    varentropy, Dichotomy, Spectrum, DEFAULT_DIM_CAP,
};

/// Outcome of the variance-based sufficient condition for an approximate
/// transition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SufficiencyVerdict {
    pub sufficient: bool,
    /// `S(from) - f_from`.
    pub lhs: f64,
    /// `S(to) + f_to`.
    pub rhs: f64,
    /// `min(1, 2 (sqrt V + sqrt V')^2 / delta^2)` when the entropy gap
    /// `delta` is positive.
    pub certified_eps: Option<f64>,
}

fn check_open_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

/// Tests `S(from) - f_from >= S(to) + f_to` with `f = sqrt(V (2/eps - 1))`.
pub fn sufficient_condition(from: &Dichotomy, to: &Dichotomy, eps: f64) -> Result<SufficiencyVerdict> {
    check_open_eps(eps)?;
    let (a, b) = (measures(from), measures(to));
    // 2/eps - 1 = 1/(eps/2) - 1
    let lhs = a.relative_entropy - f_sigma(a.variance, eps / 2.0);
    let rhs = b.relative_entropy + f_sigma(b.variance, eps / 2.0);
    let delta = a.relative_entropy - b.relative_entropy;
    let certified_eps = (delta > 0.0).then(|| {
        let spread = a.variance.sqrt() + b.variance.sqrt();
        (2.0 * spread * spread / (delta * delta)).min(1.0)
    });
    Ok(SufficiencyVerdict {
        sufficient: lhs >= rhs,
        lhs,
        rhs,
        certified_eps,
    })
}

/// The constructive certificate behind [`sufficient_condition`]: the steep
/// approximation of `from` against the flat approximation of `to`, both at
/// `eps / 2`.
pub fn sufficiency_certificate(from: &Dichotomy, to: &Dichotomy, eps: f64) -> Result<TransitionVerdict> {
    check_open_eps(eps)?;
    let steep = steep_approximation(from, eps / 2.0)?.dichotomy(from);
    let flat = flat_approximation(to, eps / 2.0)?.dichotomy(to);
    Ok(dominates(&lorenz_curve(&steep), &lorenz_curve(&flat)))
}

/// Error bound `2 (sqrt V + sqrt V')^2 / (n dS^2)` for `n` i.i.d. copies,
/// clipped to `[0, 1]`.
pub fn iid_error_bound(from: &Dichotomy, to: &Dichotomy, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::ZeroCopies);
    }
    let (a, b) = (measures(from), measures(to));
    let gap = a.relative_entropy - b.relative_entropy;
    if gap <= 0.0 {
        return Err(Error::NonpositiveEntropyGap(gap));
    }
    let spread = a.variance.sqrt() + b.variance.sqrt();
    Ok((2.0 * spread * spread / (n as f64 * gap * gap)).clamp(0.0, 1.0))
}

/// Second-order rate bound for `n` copies at error `eps_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateReport {
    pub n: usize,
    pub eps_n: f64,
    /// Square of the positive root of `M^2 + sqrt(k') M - (r - sqrt k)`.
    pub rate_lower: f64,
    /// `-sqrt(k) + sqrt(r k')`.
    pub resonance_gap: f64,
    pub k: f64,
    pub k_prime: f64,
}

/// Lower bound on the achievable rate `from^n -> to^(R n)` under a shared
/// reference.
pub fn iid_rate_bound(from: &Dichotomy, to: &Dichotomy, n: usize, eps_n: f64) -> Result<RateReport> {
    check_open_eps(eps_n)?;
    if n == 0 {
        return Err(Error::ZeroCopies);
    }
    if from.s() != to.s() {
        return Err(Error::DifferentReferences);
    }
    let (a, b) = (measures(from), measures(to));
    if b.relative_entropy <= 0.0 {
        return Err(Error::ZeroTargetEntropy);
    }
    let scale = (2.0 - eps_n) / (eps_n * n as f64) / (b.relative_entropy * b.relative_entropy);
    let k = scale * a.variance;
    let k_prime = scale * b.variance;
    let r = a.relative_entropy / b.relative_entropy;
    let sqrt_k = k.sqrt();
    if r <= sqrt_k {
        return Err(Error::QuadraticInfeasible { ratio: r, sqrt_k });
    }
    let root = 0.5 * (-k_prime.sqrt() + (k_prime + 4.0 * (r - sqrt_k)).sqrt());
    Ok(RateReport {
        n,
        eps_n,
        rate_lower: root * root,
        resonance_gap: -sqrt_k + (r * k_prime).sqrt(),
        k,
        k_prime,
    })
}

/// `dV / (2 sqrt M_{s_min}(from))` with `dV = V(from) - V(to)`: a lower bound
/// on the relative-entropy drop whenever `from` majorizes `to`.
pub fn entropy_production_bound(from: &Dichotomy, to: &Dichotomy) -> f64 {
    let dv = measures(from).variance - measures(to).variance;
    let m = monotone_m(from, from.s_min()).expect("reference eigenvalues lie in (0, 1]");
    dv / (2.0 * m.sqrt())
}

/// `max(sqrt x, x^(1/4))`.
pub fn correction_shape(x: f64) -> f64 {
    let x = x.max(0.0);
    x.sqrt().max(x.sqrt().sqrt())
}

/// `sqrt(2 ln 2) (12 + log^2 s_min + 8 log^2 d)`.
pub fn subadditivity_constant(s_min: f64, dim: usize) -> f64 {
    let ls = s_min.log2();
    let ld = (dim as f64).log2();
    (2.0 * LN_2).sqrt() * (12.0 + ls * ls + 8.0 * ld * ld)
}

/// `8 log^2 d + log d + 2 log^2 s_min - 4 ln2 log s_min + 15`.
pub fn continuity_constant(s_min: f64, dim: usize) -> f64 {
    let ls = s_min.log2();
    let ld = (dim as f64).log2();
    8.0 * ld * ld + ld + 2.0 * ls * ls - 4.0 * LN_2 * ls + 15.0
}

/// Both sides of the marginal entropy-production inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarginalBudget {
    /// `dS_S + dS_E`.
    pub lhs: f64,
    /// `(dV_S + dV_E - K f(I)) / (2 sqrt M)`.
    pub rhs: f64,
    pub mutual_information: f64,
    pub k: f64,
}

impl MarginalBudget {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

/// Evaluates the marginal budget of a bipartite process taking
/// `from_s ⊗ from_e` to the row-major `joint_final`, whose marginals are
/// measured against `to_refs`.
pub fn marginal_budget(
    joint_final: &Spectrum,
    dims: (usize, usize),
    from_s: &Dichotomy,
    from_e: &Dichotomy,
    to_refs: (&Spectrum, &Spectrum),
) -> Result<MarginalBudget> {
    let (ds, de) = dims;
    if from_s.dim() != ds {
        return Err(Error::DimensionMismatch {
            expected: ds,
            found: from_s.dim(),
        });
    }
    if from_e.dim() != de {
        return Err(Error::DimensionMismatch {
            expected: de,
            found: from_e.dim(),
        });
    }
    let (final_s, final_e) = marginals(joint_final, dims)?;
    let to_s = Dichotomy::new(final_s, to_refs.0.clone())?;
    let to_e = Dichotomy::new(final_e, to_refs.1.clone())?;
    let (a_s, a_e) = (measures(from_s), measures(from_e));
    let (b_s, b_e) = (measures(&to_s), measures(&to_e));
    let lhs = (a_s.relative_entropy - b_s.relative_entropy)
        + (a_e.relative_entropy - b_e.relative_entropy);
    let dv = (a_s.variance - b_s.variance) + (a_e.variance - b_e.variance);
    let information = mutual_information(joint_final, dims)?;
    // the correction is applied to the final joint state, so the smaller
    // eigenvalue of either product reference enters the constant
    let s_min = (from_s.s_min() * from_e.s_min()).min(to_s.s_min() * to_e.s_min());
    let k = subadditivity_constant(s_min, ds * de);
    let product = Dichotomy::new(
        from_s.p().kron(from_e.p()),
        from_s.s().kron(from_e.s()),
    )?;
    let m = monotone_m(&product, product.s_min())?;
    Ok(MarginalBudget {
        lhs,
        rhs: (dv - k * correction_shape(information)) / (2.0 * m.sqrt()),
        mutual_information: information,
        k,
    })
}

/// Battery size for erasing a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LandauerReport {
    /// Smallest number of fresh bits that suffices, or `None` if no
    /// `n <= n_max` does.
    pub n_exact: Option<usize>,
    /// `H(p) + V(p) / (2 sqrt M(p))`.
    pub n_bound: f64,
}

/// Exact and variance-corrected erasure cost of `p` under unital processes.
pub fn landauer(p: &Spectrum, n_max: usize) -> Result<LandauerReport> {
    landauer_capped(p, n_max, DEFAULT_DIM_CAP)
}

pub fn landauer_capped(p: &Spectrum, n_max: usize, cap: usize) -> Result<LandauerReport> {
    let dim = p.dim();
    let requested = u32::try_from(n_max)
        .ok()
        .and_then(|n| 1usize.checked_shl(n))
        .and_then(|b| b.checked_mul(dim))
        .unwrap_or(usize::MAX);
    if requested > cap {
        return Err(Error::DimensionCapExceeded { requested, cap });
    }
    let h = shannon_entropy(p);
    let n_bound = h + varentropy(p) / (2.0 * monotone_m_unital(p).sqrt());
    let mut n_exact = None;
    for n in 0..=n_max {
        let battery = 1usize << n;
        let total = dim * battery;
        let mut initial = vec![0.0; total];
        for (i, &v) in p.values().iter().enumerate() {
            initial[i * battery] = v;
        }
        let mut target = vec![0.0; total];
        for v in target.iter_mut().take(battery) {
            *v = 1.0 / battery as f64;
        }
        let from = Dichotomy::unital(Spectrum::from_raw(initial))?;
        let to = Dichotomy::unital(Spectrum::from_raw(target))?;
        if exact_transition(&from, &to).decision {
            n_exact = Some(n);
            break;
        }
    }
    Ok(LandauerReport { n_exact, n_bound })
}

/// `2 sqrt(M) delta + K f(delta)` with the unital constant for
/// `d_S * d_E` dimensions.
pub fn catalyst_bound(delta: f64, d_s: usize, d_e: usize, m_from: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidDelta(delta));
    }
    if d_s == 0 || d_e == 0 {
        return Err(Error::DimensionTooSmall(d_s.min(d_e)));
    }
    let dim = d_s * d_e;
    let k = subadditivity_constant(1.0 / dim as f64, dim);
    Ok(2.0 * m_from.max(0.0).sqrt() * delta + k * correction_shape(delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::relative_entropy;

    fn unital(p: &[f64]) -> Dichotomy {
        Dichotomy::unital(Spectrum::new(p.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn sufficient_against_fixed_point() {
        let from = unital(&[0.7, 0.2, 0.1]);
        let to = unital(&[1.0 / 3.0; 3]);
        let v = sufficient_condition(&from, &to, 0.5).unwrap();
        let m = measures(&from);
        let f = (m.variance * (2.0 / 0.5 - 1.0)).sqrt();
        assert_eq!(v.sufficient, m.relative_entropy >= f);
        assert!((v.rhs - 0.0).abs() < 1e-12);
    }

    #[test]
    fn flat_states_compare_entropies() {
        let from = unital(&[0.5, 0.5, 0.0, 0.0]);
        let to = unital(&[0.25, 0.25, 0.25, 0.25]);
        for eps in [0.01, 0.5, 0.99] {
            assert!(sufficient_condition(&from, &to, eps).unwrap().sufficient);
            assert!(!sufficient_condition(&to, &from, eps).unwrap().sufficient);
        }
        let v = sufficient_condition(&from, &to, 0.3).unwrap();
        assert_eq!(v.certified_eps, Some(0.0));
        assert!(sufficiency_certificate(&from, &to, 0.3).unwrap().decision);
    }

    #[test]
    fn iid_error_examples() {
        let from = unital(&[0.8, 0.15, 0.05]);
        let to = unital(&[0.5, 0.3, 0.2]);
        let b1 = iid_error_bound(&from, &to, 1000).unwrap();
        let b2 = iid_error_bound(&from, &to, 2000).unwrap();
        assert!((b1 - 2.0 * b2).abs() < 1e-15);
        assert!(iid_error_bound(&from, &to, 1 << 40).unwrap() < 1e-9);
        let flat_a = unital(&[1.0, 0.0]);
        let flat_b = unital(&[0.5, 0.5]);
        assert_eq!(iid_error_bound(&flat_a, &flat_b, 3).unwrap(), 0.0);
        assert!(matches!(
            iid_error_bound(&to, &from, 10),
            Err(Error::NonpositiveEntropyGap(_))
        ));
    }

    #[test]
    fn rate_without_variance_is_ratio() {
        let from = unital(&[1.0, 0.0, 0.0, 0.0]);
        let to = unital(&[0.5, 0.5, 0.0, 0.0]);
        let r = iid_rate_bound(&from, &to, 10, 0.1).unwrap();
        assert_eq!(r.k, 0.0);
        assert!((r.rate_lower - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rate_errors() {
        let from = unital(&[0.8, 0.2]);
        let to = Dichotomy::from_vecs(vec![0.6, 0.4], vec![0.3, 0.7]).unwrap();
        assert_eq!(iid_rate_bound(&from, &to, 10, 0.1), Err(Error::DifferentReferences));
        let fixed = unital(&[0.5, 0.5]);
        assert_eq!(iid_rate_bound(&from, &fixed, 10, 0.1), Err(Error::ZeroTargetEntropy));
        assert!(matches!(
            iid_rate_bound(&from, &unital(&[0.9, 0.1]), 1, 0.01),
            Err(Error::QuadraticInfeasible { .. })
        ));
        assert!(iid_rate_bound(&from, &from, 10, 1.0).is_err());
    }

    #[test]
    fn production_examples() {
        let d = Dichotomy::from_vecs(vec![0.6, 0.3, 0.1], vec![0.2, 0.5, 0.3]).unwrap();
        assert_eq!(entropy_production_bound(&d, &d), 0.0);
        let fixed = d.reference_pair();
        let bound = entropy_production_bound(&d, &fixed);
        assert!(bound <= relative_entropy(&d));
    }

    #[test]
    fn identity_process_budget() {
        let s = Dichotomy::from_vecs(vec![0.7, 0.3], vec![0.4, 0.6]).unwrap();
        let e = Dichotomy::from_vecs(vec![0.2, 0.5, 0.3], vec![0.3, 0.3, 0.4]).unwrap();
        let joint = s.p().kron(e.p());
        let b = marginal_budget(&joint, (2, 3), &s, &e, (s.s(), e.s())).unwrap();
        assert!(b.lhs.abs() < 1e-12);
        assert!(b.mutual_information < 1e-12);
        assert!(b.rhs.abs() < 1e-12);
        assert!(b.holds() || b.lhs >= b.rhs - 1e-12);
        assert!(marginal_budget(&joint, (3, 2), &s, &e, (s.s(), e.s())).is_err());
    }

    #[test]
    fn landauer_examples() {
        let pure = Spectrum::point_mass(3, 0).unwrap();
        let r = landauer(&pure, 4).unwrap();
        assert_eq!(r.n_exact, Some(0));
        assert_eq!(r.n_bound, 0.0);
        let mixed = Spectrum::uniform(2).unwrap();
        let r = landauer(&mixed, 12).unwrap();
        assert_eq!(r.n_exact, Some(1));
        assert!((r.n_bound - 1.0).abs() < 1e-15);
        let p = Spectrum::new(vec![0.5, 0.3, 0.2]).unwrap();
        let r = landauer(&p, 12).unwrap();
        assert_eq!(r.n_exact, Some(2));
        assert!(r.n_exact.unwrap() as f64 >= r.n_bound);
        assert!(matches!(
            landauer_capped(&p, 12, 1000),
            Err(Error::DimensionCapExceeded { requested: 12288, cap: 1000 })
        ));
    }

    #[test]
    fn catalyst_examples() {
        assert_eq!(catalyst_bound(0.0, 2, 2, 3.0).unwrap(), 0.0);
        let a = catalyst_bound(0.01, 2, 2, 3.0).unwrap();
        let b = catalyst_bound(0.02, 2, 2, 3.0).unwrap();
        let c = catalyst_bound(0.01, 2, 4, 3.0).unwrap();
        assert!(b > a && c > a);
        assert_eq!(catalyst_bound(1.5, 2, 2, 3.0), Err(Error::InvalidDelta(1.5)));
    }

    #[test]
    fn constants_at_small_dimension() {
        // d = 2, s_min = 1/2: log d = 1, log s_min = -1
        let k = continuity_constant(0.5, 2);
        assert!((k - (8.0 + 1.0 + 2.0 + 4.0 * LN_2 + 15.0)).abs() < 1e-12);
        let kp = subadditivity_constant(0.5, 2);
        assert!((kp - (2.0 * LN_2).sqrt() * 21.0).abs() < 1e-12);
        assert_eq!(correction_shape(0.0625), 0.5);
        assert_eq!(correction_shape(4.0), 2.0);
    }
}
