//! Lorenz curves of dichotomies and the majorization decisions they support.

use serde::Serialize;

use crate::approx::flat_approximation;
use crate::error::{Error, Result};
use crate::fmt::g17;
use crate::measures::Dichotomy;

/// Slack under which one curve still counts as dominating another.
pub const DOMINATION_SLACK: f64 = 1e-12;

/// A concave piecewise-linear curve from `(0, 0)` to `(1, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LorenzCurve {
    points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// The diagonal `y = x`.
    pub fn diagonal() -> Self {
        LorenzCurve {
            points: vec![(0.0, 0.0), (1.0, 1.0)],
        }
    }

    /// Value of the curve at `x`, interpolating linearly between breakpoints.
    pub fn eval_at(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange(x));
        }
        Ok(self.eval_clamped(x))
    }

    fn eval_clamped(&self, x: f64) -> f64 {
        let pts = &self.points;
        let k = pts.partition_point(|&(px, _)| px < x);
        if k == 0 {
            return pts[0].1;
        }
        if k == pts.len() {
            return pts[k - 1].1;
        }
        let (x1, y1) = pts[k];
        if x1 == x {
            return y1;
        }
        let (x0, y0) = pts[k - 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Two-column text export with header `x,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for &(x, y) in &self.points {
            out.push_str(&g17(x));
            out.push(',');
            out.push_str(&g17(y));
            out.push('\n');
        }
        out
    }
}

/// Outcome of a domination test between two curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionVerdict {
    pub decision: bool,
    /// Minimum of `a(x) - b(x)` over the evaluation points.
    pub worst_gap: f64,
    /// Abscissa where `worst_gap` is attained.
    pub witness_x: f64,
}

/// Lorenz curve of `d`: prefix sums of `(s, p)` taken in sigma order.
pub fn lorenz_curve(d: &Dichotomy) -> LorenzCurve {
    let mut points = Vec::with_capacity(d.dim() + 1);
    points.push((0.0, 0.0));
    let (mut x, mut y) = (0.0, 0.0);
    for &i in d.sigma_order() {
        x += d.s().values()[i];
        y += d.p().values()[i];
        points.push((x, y));
    }
    let last = points.len() - 1;
    points[last] = (1.0, 1.0);
    // round-off near the end must not break monotonicity
    for k in (1..last).rev() {
        points[k].0 = points[k].0.min(points[k + 1].0);
        points[k].1 = points[k].1.min(points[k + 1].1);
    }
    LorenzCurve { points }
}

/// Checks `a(x) >= b(x)` at every breakpoint abscissa of either curve.
pub fn dominates(a: &LorenzCurve, b: &LorenzCurve) -> TransitionVerdict {
    let mut worst_gap = f64::INFINITY;
    let mut witness_x = 0.0;
    let xs = a.points.iter().chain(&b.points).map(|&(x, _)| x);
    let mut xs: Vec<f64> = xs.collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    for x in xs {
        let gap = a.eval_clamped(x) - b.eval_clamped(x);
        if gap < worst_gap {
            worst_gap = gap;
            witness_x = x;
        }
    }
    TransitionVerdict {
        decision: worst_gap >= -DOMINATION_SLACK,
        worst_gap,
        witness_x,
    }
}

/// Decides whether `from` can be converted into `to` exactly.
pub fn exact_transition(from: &Dichotomy, to: &Dichotomy) -> TransitionVerdict {
    dominates(&lorenz_curve(from), &lorenz_curve(to))
}

/// Decides whether `from` can reach some state within trace distance `eps`
/// of `to`'s state, by comparing against the flat approximation of `to`.
pub fn approx_transition(from: &Dichotomy, to: &Dichotomy, eps: f64) -> Result<TransitionVerdict> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidEpsilon(eps));
    }
    let flat = flat_approximation(to, eps)?;
    let target = to.with_state(flat.spectrum)?;
    Ok(exact_transition(from, &target))
}

/// Smallest and largest ratio `p_i / s_i` over the support of `p`.
pub fn slope_bounds(d: &Dichotomy) -> (f64, f64) {
    let mut r_min = f64::INFINITY;
    let mut r_max = 0.0f64;
    for i in 0..d.dim() {
        if d.p().values()[i] > 0.0 {
            let r = d.ratio(i);
            r_min = r_min.min(r);
            r_max = r_max.max(r);
        }
    }
    (r_min, r_max)
}

/// The envelope line `min(c x, 1)`.
pub fn envelope(c: f64, x: f64) -> f64 {
    (c * x).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{max_variance_spectrum, measures, Spectrum};

    fn unital(p: &[f64]) -> Dichotomy {
        Dichotomy::unital(Spectrum::new(p.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn equal_pair_gives_diagonal() {
        let p = Spectrum::new(vec![0.1, 0.6, 0.3]).unwrap();
        let c = lorenz_curve(&Dichotomy::new(p.clone(), p).unwrap());
        for &(x, y) in c.breakpoints() {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn pure_qubit_curve() {
        let c = lorenz_curve(&unital(&[1.0, 0.0]));
        assert_eq!(c.breakpoints(), &[(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)]);
        assert_eq!(c.eval_at(0.25).unwrap(), 0.5);
        assert_eq!(c.eval_at(0.0).unwrap(), 0.0);
        assert_eq!(c.eval_at(1.0).unwrap(), 1.0);
        assert_eq!(c.eval_at(1.5), Err(Error::OutOfRange(1.5)));
        assert_eq!(LorenzCurve::diagonal().eval_at(0.3).unwrap(), 0.3);
    }

    #[test]
    fn ties_give_the_same_curve() {
        let a = lorenz_curve(&unital(&[0.4, 0.3, 0.3]));
        let b = lorenz_curve(&unital(&[0.3, 0.3, 0.4]));
        for x in [0.1, 0.3, 0.5, 0.7, 0.9] {
            assert!((a.eval_at(x).unwrap() - b.eval_at(x).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn hardy_littlewood_polya_example() {
        let p = lorenz_curve(&unital(&[0.5, 0.3, 0.2]));
        let q = lorenz_curve(&unital(&[0.6, 0.3, 0.1]));
        assert!(dominates(&q, &p).decision);
        let back = dominates(&p, &q);
        assert!(!back.decision);
        assert!((back.worst_gap + 0.1).abs() < 1e-12);
    }

    #[test]
    fn reflexive_and_minimum() {
        let d = Dichotomy::from_vecs(vec![0.2, 0.5, 0.3], vec![0.3, 0.3, 0.4]).unwrap();
        let v = exact_transition(&d, &d);
        assert!(v.decision);
        assert_eq!(v.worst_gap, 0.0);
        let target = Dichotomy::from_vecs(vec![0.1, 0.9], vec![0.1, 0.9]).unwrap();
        assert!(exact_transition(&d, &target).decision);
        let sharp = Dichotomy::unital(max_variance_spectrum(5).unwrap()).unwrap();
        assert!(exact_transition(&sharp, &unital(&[0.2; 5])).decision);
    }

    #[test]
    fn approx_examples() {
        let from = unital(&[0.5, 0.3, 0.2]);
        let to = unital(&[0.6, 0.3, 0.1]);
        assert!(!exact_transition(&from, &to).decision);
        let a = approx_transition(&from, &to, 0.0).unwrap();
        let e = exact_transition(&from, &to);
        assert_eq!(a.decision, e.decision);
        assert!((a.worst_gap - e.worst_gap).abs() < 1e-15);
        assert!(approx_transition(&from, &to, 0.1).unwrap().decision);
        assert!(approx_transition(&from, &to, 1.0).is_err());
    }

    #[test]
    fn slopes_and_envelopes() {
        let d = Dichotomy::from_vecs(vec![0.6, 0.0, 0.4], vec![0.2, 0.3, 0.5]).unwrap();
        let (lo, hi) = slope_bounds(&d);
        assert!((hi - 3.0).abs() < 1e-15);
        assert!((lo - 0.8).abs() < 1e-15);
        assert!((hi - measures(&d).smax.exp2()).abs() < 1e-12);
        let c = lorenz_curve(&d);
        for &(x, y) in c.breakpoints() {
            assert!(envelope(lo, x) <= y + 1e-15);
            assert!(y <= envelope(hi, x) + 1e-15);
        }
        let p = Spectrum::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(slope_bounds(&Dichotomy::new(p.clone(), p).unwrap()), (1.0, 1.0));
    }

    #[test]
    fn csv_export() {
        let c = lorenz_curve(&unital(&[1.0, 0.0]));
        assert_eq!(c.to_csv(), "x,y\n0,0\n0.5,1\n1,1\n");
    }
}
