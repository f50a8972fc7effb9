//! Seeded random spectra, dichotomies and stochastic matrices.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::measures::{Dichotomy, Spectrum};

/// A row-major matrix whose rows are probability vectors.
pub type Matrix = Vec<Vec<f64>>;

/// The generator for trial `offset` of a run seeded with `seed`. Every trial
/// owns an independent stream, so trials can be replayed in isolation.
pub fn trial_rng(seed: u64, offset: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(offset);
    rng
}

/// Draws from the symmetric Dirichlet distribution on `dim` entries.
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, dim: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("positive concentration");
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| gamma.sample(rng)).collect();
        let total: f64 = v.iter().sum();
        if total > 0.0 && total.is_finite() {
            for x in v.iter_mut() {
                *x /= total;
            }
            return v;
        }
    }
}

/// A Dirichlet-distributed spectrum.
pub fn random_spectrum<R: Rng + ?Sized>(rng: &mut R, dim: usize, concentration: f64) -> Spectrum {
    Spectrum::from_raw(dirichlet(rng, dim, concentration))
}

/// A full-rank spectrum whose smallest entry is at least `floor`, obtained by
/// mixing a Dirichlet draw with the uniform spectrum.
pub fn random_reference<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    concentration: f64,
    floor: f64,
) -> Spectrum {
    let weight = (floor * dim as f64).min(1.0);
    let v = dirichlet(rng, dim, concentration);
    Spectrum::from_raw(
        v.into_iter()
            .map(|x| (1.0 - weight) * x + weight / dim as f64)
            .collect(),
    )
}

/// A random state paired with a random full-rank reference.
pub fn random_dichotomy<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    concentration: f64,
    floor: f64,
) -> Dichotomy {
    let s = random_reference(rng, dim, concentration, floor);
    let p = random_spectrum(rng, dim, concentration);
    Dichotomy::new(p, s).expect("reference is full rank")
}

/// A random state whose support is a random subset of at least one index.
pub fn random_sparse_spectrum<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    concentration: f64,
) -> Spectrum {
    let keep = rng.random_range(1..=dim);
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.shuffle(rng);
    let w = dirichlet(rng, keep, concentration);
    let mut v = vec![0.0; dim];
    for (k, &i) in idx.iter().take(keep).enumerate() {
        v[i] = w[k];
    }
    Spectrum::from_raw(v)
}

/// A `rows x cols` right-stochastic matrix with Dirichlet rows.
pub fn random_stochastic<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    concentration: f64,
) -> Matrix {
    (0..rows).map(|_| dirichlet(rng, cols, concentration)).collect()
}

/// A doubly stochastic matrix: a Dirichlet-weighted mixture of `k`
/// uniformly random permutation matrices.
pub fn random_bistochastic<R: Rng + ?Sized>(rng: &mut R, dim: usize, k: usize) -> Matrix {
    let weights = dirichlet(rng, k.max(1), 1.0);
    let mut m = vec![vec![0.0; dim]; dim];
    for &w in &weights {
        let mut perm: Vec<usize> = (0..dim).collect();
        perm.shuffle(rng);
        for (i, &j) in perm.iter().enumerate() {
            m[i][j] += w;
        }
    }
    m
}

/// The row vector `v M`.
pub fn push_forward(v: &[f64], m: &Matrix) -> Vec<f64> {
    let cols = m.first().map_or(0, Vec::len);
    let mut out = vec![0.0; cols];
    for (x, row) in v.iter().zip(m) {
        for (o, &e) in out.iter_mut().zip(row) {
            *o += x * e;
        }
    }
    out
}

/// Pushes a dichotomy through a stochastic matrix; the result is majorized by
/// the input by construction.
pub fn push_dichotomy(d: &Dichotomy, m: &Matrix) -> Dichotomy {
    let p = Spectrum::from_raw(push_forward(d.p().values(), m));
    let s = Spectrum::from_raw(push_forward(d.s().values(), m));
    Dichotomy::new(p, s).expect("stochastic image of a full-rank reference")
}

/// Kronecker product of two matrices.
pub fn kron_matrix(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for ra in a {
        for rb in b {
            let mut row = Vec::with_capacity(ra.len() * rb.len());
            for &x in ra {
                for &y in rb {
                    row.push(x * y);
                }
            }
            out.push(row);
        }
    }
    out
}
