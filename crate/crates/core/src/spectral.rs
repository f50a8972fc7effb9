//! Recovering a spectrum from its integer-order Rényi entropies.
//!
//! The entropies fix the power sums, Newton's identities turn those into the
//! elementary symmetric polynomials, and the eigenvalues are the roots of the
//! resulting characteristic polynomial.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::Spectrum;

/// Imaginary parts and range violations up to this size are treated as noise.
pub const ROOT_SLACK: f64 = 1e-7;
/// Normalization slack when two recovered eigenvalues are closer than
/// [`CLUSTER_GAP`]; clustered roots are only accurate to about this level.
pub const CLUSTER_SLACK: f64 = 1e-5;
pub const CLUSTER_GAP: f64 = 1e-3;

/// Roots closer than this are always treated as one cluster; merging two
/// distinct eigenvalues this close moves each by at most half the distance.
const MERGE_DISTANCE: f64 = 2e-5;
const MAX_ITERATIONS: usize = 10_000;
const RESIDUAL_TOLERANCE: f64 = 1e-12;
const STEP_TOLERANCE: f64 = 1e-15;

/// Power sums `sum_i p_i^k` for `k = 1..=d`; index `k - 1` holds order `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerSums {
    pub sums: Vec<f64>,
}

impl PowerSums {
    pub fn dim(&self) -> usize {
        self.sums.len()
    }

    /// The power sum of order `k >= 1`.
    pub fn order(&self, k: usize) -> f64 {
        self.sums[k - 1]
    }
}

/// Monic characteristic polynomial; `coefficients[k]` multiplies `λ^(d-k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharPoly {
    pub coefficients: Vec<f64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// The `order`-th derivative (not normalized to be monic).
    fn derivative(&self, order: usize) -> CharPoly {
        let d = self.degree();
        let mut coefficients = Vec::with_capacity(d + 1 - order.min(d));
        for (k, &c) in self.coefficients.iter().enumerate().take(d + 1 - order.min(d)) {
            let power = d - k;
            let falling: f64 = (0..order).map(|j| (power - j) as f64).product();
            coefficients.push(c * falling);
        }
        CharPoly { coefficients }
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        for &c in &self.coefficients {
            deriv = deriv * z + value;
            value = value * z + c;
        }
        (value, deriv)
    }
}

/// Power sums from Rényi entropies (bits) of orders `2..=d`.
pub fn power_sums_from_renyi(renyi_values: &[f64]) -> Result<PowerSums> {
    if renyi_values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sums = Vec::with_capacity(renyi_values.len() + 1);
    sums.push(1.0);
    for (idx, &h) in renyi_values.iter().enumerate() {
        if !h.is_finite() {
            return Err(Error::NonFinite { index: idx });
        }
        let k = (idx + 2) as f64;
        sums.push(((1.0 - k) * h).exp2());
    }
    Ok(PowerSums { sums })
}

/// Elementary symmetric polynomials `e_0..=e_d` from power sums.
pub fn elementary_symmetric(ps: &PowerSums) -> Vec<f64> {
    let d = ps.dim();
    let mut e = vec![0.0; d + 1];
    e[0] = 1.0;
    for k in 1..=d {
        let mut acc = 0.0;
        for i in 1..=k {
            let term = e[k - i] * ps.order(i);
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e[k] = acc / k as f64;
    }
    e
}

/// The monic polynomial with coefficients `(-1)^k e_k`.
pub fn newton_girard(ps: &PowerSums) -> CharPoly {
    let coefficients = elementary_symmetric(ps)
        .into_iter()
        .enumerate()
        .map(|(k, e)| if k % 2 == 0 { e } else { -e })
        .collect();
    CharPoly { coefficients }
}

/// All roots of `cp` by simultaneous (Weierstrass) iteration, polished by
/// Newton steps. Returns them in no particular order.
pub fn complex_roots(cp: &CharPoly) -> Result<Vec<Complex64>> {
    let d = cp.degree();
    if d == 0 {
        return Ok(Vec::new());
    }
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|j| seed.powu(j as u32)).collect();
    let mut iterations = 0;
    let (mut best_step, mut stalled) = (f64::INFINITY, 0);
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut max_step = 0.0f64;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(f64::EPSILON, 0.0);
            }
            let step = cp.eval(z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < STEP_TOLERANCE {
            break;
        }
        // rounding keeps the steps from reaching the tolerance; stop once
        // they have stalled and the roots are accurate
        if max_step < best_step {
            best_step = max_step;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 32 && z.iter().all(|&r| cp.eval(r).norm() < RESIDUAL_TOLERANCE) {
                break;
            }
        }
    }
    for root in z.iter_mut() {
        for _ in 0..3 {
            let (v, dv) = cp.eval_with_derivative(*root);
            if dv.norm() == 0.0 {
                break;
            }
            let next = *root - v / dv;
            if cp.eval(next).norm() < v.norm() {
                *root = next;
            } else {
                break;
            }
        }
    }
    let residual = z.iter().map(|&r| cp.eval(r).norm()).fold(0.0, f64::max);
    if !(residual < RESIDUAL_TOLERANCE) {
        return Err(Error::NoConvergence {
            iterations,
            residual,
        });
    }
    Ok(z)
}

/// Merges roots that belong to one multiple root. A cluster of `m` roots is
/// replaced by `m` copies of its centroid once its spread is consistent with
/// the `1/m`-power loss of accuracy at a multiple root.
fn merge_clusters(cp: &CharPoly, roots: &[Complex64]) -> Vec<Complex64> {
    let d = roots.len();
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let reach = (4.0 * roots[i].im.abs().max(roots[j].im.abs())).max(MERGE_DISTANCE);
            if (roots[i] - roots[j]).norm() <= reach {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut out = roots.to_vec();
    for i in 0..d {
        let root = find(&mut parent, i);
        let members: Vec<usize> = (0..d).filter(|&j| find(&mut parent, j) == root).collect();
        let m = members.len();
        if m < 2 || members[0] != i {
            continue;
        }
        let centroid = members.iter().map(|&j| roots[j]).sum::<Complex64>() / m as f64;
        let radius = members
            .iter()
            .map(|&j| (roots[j] - centroid).norm())
            .fold(0.0, f64::max);
        if radius <= 1e-9f64.powf(1.0 / m as f64) {
            // a root of multiplicity m is a simple root of the (m-1)-th derivative
            let q = cp.derivative(m - 1);
            let mut x = Complex64::new(centroid.re, 0.0);
            for _ in 0..8 {
                let (v, dv) = q.eval_with_derivative(x);
                if dv.norm() == 0.0 {
                    break;
                }
                let step = v / dv;
                if !(step.norm() < radius.max(1e-14)) {
                    break;
                }
                x -= step;
            }
            // a refinement that wandered off belongs to a different critical point
            if (x - centroid).norm() > radius {
                x = Complex64::new(centroid.re, 0.0);
            }
            for &j in &members {
                out[j] = Complex64::new(x.re, 0.0);
            }
        }
    }
    out
}

/// Real roots in `[0, 1]` of a characteristic polynomial, sorted descending.
pub fn poly_roots(cp: &CharPoly) -> Result<Vec<f64>> {
    let merged = merge_clusters(cp, &complex_roots(cp)?);
    let mut out = Vec::with_capacity(merged.len());
    for z in merged {
        if z.im.abs() > ROOT_SLACK {
            return Err(Error::ComplexRoots { re: z.re, im: z.im });
        }
        if z.re < -ROOT_SLACK || z.re > 1.0 + ROOT_SLACK {
            return Err(Error::RootOutOfRange(z.re));
        }
        out.push(z.re.clamp(0.0, 1.0));
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Reconstructs the spectrum of dimension `dim` whose Rényi entropies of
/// orders `2..=dim` are `renyi_values`.
pub fn spectrum_from_renyi(renyi_values: &[f64], dim: usize) -> Result<Spectrum> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall(dim));
    }
    if renyi_values.len() != dim - 1 {
        return Err(Error::DimensionMismatch {
            expected: dim - 1,
            found: renyi_values.len(),
        });
    }
    let ps = power_sums_from_renyi(renyi_values)?;
    let roots = poly_roots(&newton_girard(&ps))?;
    let sum: f64 = roots.iter().sum();
    let clustered = roots.windows(2).any(|w| w[0] - w[1] < CLUSTER_GAP);
    let slack = if clustered { CLUSTER_SLACK } else { ROOT_SLACK };
    if (sum - 1.0).abs() > slack {
        return Err(Error::NotNormalized { sum });
    }
    Ok(Spectrum::from_raw(roots))
}

/// Rényi entropies of orders `2..=dim` of `p`, the input format of
/// [`spectrum_from_renyi`].
pub fn renyi_profile(p: &Spectrum) -> Vec<f64> {
    (2..=p.dim())
        .map(|k| crate::measures::renyi_entropy(p, k as f64).expect("positive order"))
        .collect()
}
