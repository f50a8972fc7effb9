//! Spectra, dichotomies and the scalar information measures built on them.
//!
//! All logarithms are base 2. A [`Dichotomy`] pairs a state spectrum `p` with a
//! full-rank reference spectrum `s` expressed in a common eigenbasis; the
//! relative surprisal `log(p_i / s_i)` is the random variable whose mean is the
//! relative entropy and whose variance is the relative variance.

use std::f64::consts::LN_2;

use serde::Serialize;

use crate::error::{Error, Result};

/// Absolute tolerance on the normalization of a spectrum.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Default cap on the number of entries a tensor product may produce.
pub const DEFAULT_DIM_CAP: usize = 1 << 20;

/// `1 / ln 2`, the offset appearing in the monotone `M`.
pub const INV_LN2: f64 = 1.0 / LN_2;

/// A probability vector: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Validates `values` with the default normalization tolerance.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        validate_spectrum(&values, NORMALIZATION_TOLERANCE)
    }

    /// The maximally mixed spectrum of dimension `dim`.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(Spectrum {
            values: vec![1.0 / dim as f64; dim],
        })
    }

    /// A pure spectrum: all mass on `index`.
    pub fn point_mass(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyInput);
        }
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut values = vec![0.0; dim];
        values[index] = 1.0;
        Ok(Spectrum { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Number of strictly positive entries.
    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|&&v| v > 0.0).count()
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Entries sorted in non-increasing order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Kronecker product, row-major over `(self, other)`.
    pub fn kron(&self, other: &Spectrum) -> Spectrum {
        let mut values = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.values {
            for &b in &other.values {
                values.push(a * b);
            }
        }
        Spectrum { values }
    }

    /// Builds a spectrum from values already known to be a valid
    /// distribution up to round-off; small negative values are clamped and
    /// the result is renormalized.
    pub(crate) fn from_raw(mut values: Vec<f64>) -> Spectrum {
        for v in values.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = values.iter().sum();
        if sum > 0.0 && sum != 1.0 {
            for v in values.iter_mut() {
                *v /= sum;
            }
        }
        Spectrum { values }
    }
}

/// Checks that `values` form a probability vector within `tolerance`.
///
/// Entries in `[-tolerance, 0)` are treated as round-off and clamped to zero;
/// a sum within `tolerance` of one is renormalized exactly.
pub fn validate_spectrum(values: &[f64], tolerance: f64) -> Result<Spectrum> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut clamped = Vec::with_capacity(values.len());
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < -tolerance {
            return Err(Error::NegativeEntry { index, value });
        }
        clamped.push(value.max(0.0));
    }
    let sum: f64 = clamped.iter().sum();
    if (sum - 1.0).abs() > tolerance {
        return Err(Error::NotNormalized { sum });
    }
    for v in clamped.iter_mut() {
        *v /= sum;
    }
    Ok(Spectrum { values: clamped })
}

/// Half the l1 distance between two spectra of equal dimension.
pub fn trace_distance(a: &Spectrum, b: &Spectrum) -> Result<f64> {
    trace_distance_slices(a.values(), b.values())
}

pub(crate) fn trace_distance_slices(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    Ok((0.5 * d).min(1.0))
}

/// A state spectrum together with a full-rank reference spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct Dichotomy {
    p: Spectrum,
    s: Spectrum,
    order: Vec<usize>,
}

impl Dichotomy {
    pub fn new(p: Spectrum, s: Spectrum) -> Result<Self> {
        if p.dim() != s.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: s.dim(),
            });
        }
        if let Some(index) = s.values().iter().position(|&v| v <= 0.0) {
            return Err(Error::ReferenceNotFullRank { index });
        }
        let ratios: Vec<f64> = p
            .values()
            .iter()
            .zip(s.values())
            .map(|(a, b)| a / b)
            .collect();
        let mut order: Vec<usize> = (0..p.dim()).collect();
        // stable: ties keep ascending original index
        order.sort_by(|&i, &j| ratios[j].total_cmp(&ratios[i]));
        Ok(Dichotomy { p, s, order })
    }

    /// A state measured against the maximally mixed reference.
    pub fn unital(p: Spectrum) -> Result<Self> {
        let s = Spectrum::uniform(p.dim())?;
        Dichotomy::new(p, s)
    }

    /// Convenience constructor validating both vectors.
    pub fn from_vecs(p: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        Dichotomy::new(Spectrum::new(p)?, Spectrum::new(s)?)
    }

    pub fn p(&self) -> &Spectrum {
        &self.p
    }

    pub fn s(&self) -> &Spectrum {
        &self.s
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    /// Indices sorted by non-increasing ratio `p_i / s_i`.
    pub fn sigma_order(&self) -> &[usize] {
        &self.order
    }

    pub fn ratio(&self, i: usize) -> f64 {
        self.p.values()[i] / self.s.values()[i]
    }

    /// Smallest reference eigenvalue.
    pub fn s_min(&self) -> f64 {
        self.s.min_entry()
    }

    /// `p` and `s` permuted into sigma order.
    pub fn ordered(&self) -> (Vec<f64>, Vec<f64>) {
        let p = self.order.iter().map(|&i| self.p.values()[i]).collect();
        let s = self.order.iter().map(|&i| self.s.values()[i]).collect();
        (p, s)
    }

    /// The reference paired with itself: the minimum of the pre-order.
    pub fn reference_pair(&self) -> Dichotomy {
        Dichotomy::new(self.s.clone(), self.s.clone()).expect("reference is full rank")
    }

    /// Replaces the state while keeping the reference.
    pub fn with_state(&self, p: Spectrum) -> Result<Dichotomy> {
        Dichotomy::new(p, self.s.clone())
    }
}

/// Relative entropy, relative variance, second moment and the min/max
/// relative entropies of one dichotomy, all in bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureSet {
    pub relative_entropy: f64,
    pub variance: f64,
    pub second_moment: f64,
    pub smin: f64,
    pub smax: f64,
}

/// Computes every scalar measure of `d`. Entries with `p_i = 0` contribute
/// nothing to the moments.
pub fn measures(d: &Dichotomy) -> MeasureSet {
    let mut s_rel = 0.0;
    let mut second = 0.0;
    let mut support_ref = 0.0;
    let mut max_ratio = 0.0f64;
    for (&p, &s) in d.p.values().iter().zip(d.s.values()) {
        if p > 0.0 {
            let x = (p / s).log2();
            s_rel += p * x;
            second += p * x * x;
            support_ref += s;
            max_ratio = max_ratio.max(p / s);
        }
    }
    // centred sum avoids cancellation in L - S^2
    let variance = d
        .p
        .values()
        .iter()
        .zip(d.s.values())
        .filter(|(&p, _)| p > 0.0)
        .map(|(&p, &s)| {
            let dx = (p / s).log2() - s_rel;
            p * dx * dx
        })
        .sum::<f64>()
        .max(0.0);
    MeasureSet {
        relative_entropy: s_rel,
        variance,
        second_moment: second,
        smin: 0.0 - support_ref.min(1.0).log2(),
        smax: max_ratio.log2(),
    }
}

pub fn relative_entropy(d: &Dichotomy) -> f64 {
    measures(d).relative_entropy
}

pub fn relative_variance(d: &Dichotomy) -> f64 {
    measures(d).variance
}

/// Shannon entropy in bits.
pub fn shannon_entropy(p: &Spectrum) -> f64 {
    p.values().iter().map(|&v| eta(v)).sum()
}

/// Variance of the surprisal `-log p_i` (varentropy).
pub fn varentropy(p: &Spectrum) -> f64 {
    let h = shannon_entropy(p);
    p.values()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| {
            let dx = -v.log2() - h;
            v * dx * dx
        })
        .sum::<f64>()
        .max(0.0)
}

/// `-x log x`, extended continuously to `x = 0`.
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// `x log^2(x / q)`, extended continuously to `x = 0`.
pub fn chi(x: f64, q: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        let l = (x / q).log2();
        x * l * l
    }
}

/// Rényi entropy of order `alpha` in bits. `alpha = 0`, `1` and
/// `f64::INFINITY` give the Hartley, Shannon and min-entropy respectively.
pub fn renyi_entropy(p: &Spectrum, alpha: f64) -> Result<f64> {
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::NegativeAlpha(alpha));
    }
    if alpha == 0.0 {
        return Ok((p.support_size() as f64).log2());
    }
    if alpha == 1.0 {
        return Ok(shannon_entropy(p));
    }
    if alpha.is_infinite() {
        return Ok(-p.max_entry().log2());
    }
    // scaled by the largest entry so that large orders do not underflow
    let top = p.max_entry();
    let power_sum: f64 = p
        .values()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| (v / top).powf(alpha))
        .sum();
    Ok((alpha * top.log2() + power_sum.log2()) / (1.0 - alpha))
}

/// Cumulants `κ^(1..=max_order)` of the surprisal `-log p_i` under `p`.
///
/// `κ^(1)` is the Shannon entropy and `κ^(2)` the varentropy. These are the
/// ordinary cumulants of the surprisal measured in bits; the base-2
/// cumulant-generating function `log2 E[2^{tX}]` has derivatives
/// `ln(2)^(n-1) κ^(n)` (see [`renyi_taylor`]).
pub fn surprisal_cumulants(p: &Spectrum, max_order: usize) -> Vec<f64> {
    if max_order == 0 {
        return Vec::new();
    }
    let mean = shannon_entropy(p);
    // raw moments of the centred surprisal; index k holds E[(X - mean)^k]
    let mut moments = vec![0.0; max_order + 1];
    moments[0] = 1.0;
    for &v in p.values().iter().filter(|&&v| v > 0.0) {
        let dx = -v.log2() - mean;
        let mut pow = 1.0;
        for m in moments.iter_mut().skip(1) {
            pow *= dx;
            *m += v * pow;
        }
    }
    moments[1] = 0.0;
    let mut kappa = vec![0.0; max_order + 1];
    for n in 2..=max_order {
        let mut acc = moments[n];
        let mut binom = 1.0; // C(n-1, m-1), starting at m = 1
        for m in 1..n {
            acc -= binom * kappa[m] * moments[n - m];
            binom = binom * (n - m) as f64 / m as f64;
        }
        kappa[n] = acc;
    }
    kappa[1] = mean;
    kappa.remove(0);
    kappa
}

/// Partial sum of the cumulant expansion of the Rényi curve around `alpha = 1`
/// using the first `cumulants.len()` terms.
///
/// With base-2 cumulant-generating function the `n`-th term reads
/// `ln(2)^(n-1) κ^(n) (1 - alpha)^(n-1) / n!`.
pub fn renyi_taylor(cumulants: &[f64], alpha: f64) -> f64 {
    let t = (1.0 - alpha) * LN_2;
    let mut sum = 0.0;
    let mut factor = 1.0; // t^(n-1) / n!
    for (idx, &k) in cumulants.iter().enumerate() {
        let n = idx + 1;
        factor /= n as f64;
        sum += k * factor;
        factor *= t;
    }
    sum
}

/// The monotone `M_x = V + (1/ln 2 - log x - S)^2` evaluated at `x = smin_ref`.
pub fn monotone_m(d: &Dichotomy, smin_ref: f64) -> Result<f64> {
    if !(smin_ref > 0.0 && smin_ref <= 1.0) {
        return Err(Error::InvalidReferenceEigenvalue(smin_ref));
    }
    let m = measures(d);
    let offset = INV_LN2 - smin_ref.log2() - m.relative_entropy;
    Ok(m.variance + offset * offset)
}

/// `M` at the smallest eigenvalue of the dichotomy's own reference.
pub fn monotone_m_default(d: &Dichotomy) -> f64 {
    monotone_m(d, d.s_min()).expect("reference eigenvalues lie in (0, 1]")
}

/// The unital monotone `V(p) + (1/ln 2 + H(p))^2`.
pub fn monotone_m_unital(p: &Spectrum) -> f64 {
    let h = shannon_entropy(p);
    let offset = INV_LN2 + h;
    varentropy(p) + offset * offset
}

const SHARP_RESIDUAL: f64 = 1e-10;

fn sharp_residual(r: f64, dm1: f64) -> f64 {
    (1.0 - 2.0 * r) * (((1.0 - r) / r) * dm1).ln() - 2.0
}

/// Solves `(1 - 2r) ln(((1 - r)/r)(d - 1)) = 2` for the tail weight `r` of the
/// maximal-varentropy spectrum in dimension `dim`.
pub fn max_variance_weight(dim: usize) -> Result<f64> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    let dm1 = (dim - 1) as f64;
    let (mut lo, mut hi) = (1e-15, 0.5 - 1e-15);
    // the residual is decreasing on the bracket
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let f = sharp_residual(mid, dm1);
        if f.abs() <= SHARP_RESIDUAL * 1e-3 || hi - lo < 1e-17 {
            break;
        }
        if f > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

/// Residual of the defining equation at `r`, exposed for verification.
pub fn max_variance_residual(dim: usize, r: f64) -> f64 {
    sharp_residual(r, (dim - 1) as f64)
}

/// The spectrum `(1 - r, r/(d-1), ..., r/(d-1))` of maximal varentropy.
pub fn max_variance_spectrum(dim: usize) -> Result<Spectrum> {
    let r = max_variance_weight(dim)?;
    let mut values = vec![r / (dim - 1) as f64; dim];
    values[0] = 1.0 - r;
    Ok(Spectrum::from_raw(values))
}

/// Tensor product of two dichotomies under the default dimension cap.
pub fn tensor(a: &Dichotomy, b: &Dichotomy) -> Result<Dichotomy> {
    tensor_capped(a, b, DEFAULT_DIM_CAP)
}

pub fn tensor_capped(a: &Dichotomy, b: &Dichotomy, cap: usize) -> Result<Dichotomy> {
    let requested = a.dim().saturating_mul(b.dim());
    if requested > cap {
        return Err(Error::DimensionCapExceeded { requested, cap });
    }
    Dichotomy::new(a.p.kron(&b.p), a.s.kron(&b.s))
}

/// `n`-fold tensor power under the default dimension cap.
pub fn iid_power(d: &Dichotomy, n: usize) -> Result<Dichotomy> {
    iid_power_capped(d, n, DEFAULT_DIM_CAP)
}

pub fn iid_power_capped(d: &Dichotomy, n: usize, cap: usize) -> Result<Dichotomy> {
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let exp = u32::try_from(n).unwrap_or(u32::MAX);
    let requested = d.dim().checked_pow(exp).unwrap_or(usize::MAX);
    if requested > cap {
        return Err(Error::DimensionCapExceeded { requested, cap });
    }
    let mut acc = d.clone();
    for _ in 1..n {
        acc = tensor_capped(&acc, d, cap)?;
    }
    Ok(acc)
}

/// Marginals of a row-major joint spectrum over `dims = (d1, d2)`.
pub fn marginals(joint: &Spectrum, dims: (usize, usize)) -> Result<(Spectrum, Spectrum)> {
    let (d1, d2) = dims;
    if d1 == 0 || d2 == 0 || d1.saturating_mul(d2) != joint.dim() {
        return Err(Error::DimensionMismatch {
            expected: d1.saturating_mul(d2),
            found: joint.dim(),
        });
    }
    let mut a = vec![0.0; d1];
    let mut b = vec![0.0; d2];
    for i in 0..d1 {
        for j in 0..d2 {
            let v = joint.values()[i * d2 + j];
            a[i] += v;
            b[j] += v;
        }
    }
    Ok((Spectrum::from_raw(a), Spectrum::from_raw(b)))
}

/// Mutual information `H(A) + H(B) - H(AB)` of a row-major joint spectrum.
pub fn mutual_information(joint: &Spectrum, dims: (usize, usize)) -> Result<f64> {
    let (a, b) = marginals(joint, dims)?;
    let i = shannon_entropy(&a) + shannon_entropy(&b) - shannon_entropy(joint);
    Ok(i.max(0.0))
}
