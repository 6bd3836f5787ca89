//! Least-squares polynomial smoothing (degree at most 3) and closed-form
//! maximisation of the fitted curve on an interval.
//!
//! The fit solves the Vandermonde least-squares problem with a Householder
//! QR factorisation rather than the normal equations, which squares the
//! condition number.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFit {
    /// Coefficients in ascending powers of x.
    pub coeffs: Vec<f64>,
    /// Euclidean norm of the residual vector.
    pub residual_norm: f64,
}

/// Horner evaluation of ascending-power coefficients.
pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn residual_norm(points: &[(f64, f64)], coeffs: &[f64]) -> f64 {
    points
        .iter()
        .map(|&(x, y)| (y - eval_poly(coeffs, x)).powi(2))
        .sum::<f64>()
        .sqrt()
}

pub fn fit_polynomial(points: &[(f64, f64)], degree: usize) -> Result<PolyFit> {
    if degree > MAX_DEGREE {
        return Err(Error::input(format!(
            "degree {degree} exceeds {MAX_DEGREE}"
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::input("fit points must be finite"));
    }
    let cols = degree + 1;
    let mut xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < cols {
        return Err(Error::RankDeficient(format!(
            "degree {degree} needs {cols} distinct x values, got {}",
            xs.len()
        )));
    }

    let rows = points.len();
    // column-major Vandermonde matrix
    let mut a = vec![0.0; rows * cols];
    let mut b: Vec<f64> = points.iter().map(|p| p.1).collect();
    for (i, &(x, _)) in points.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..cols {
            a[j * rows + i] = p;
            p *= x;
        }
    }

    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for j in 0..cols {
        let norm = (j..rows)
            .map(|i| a[j * rows + i].powi(2))
            .sum::<f64>()
            .sqrt();
        if norm <= scale * 1e-13 {
            return Err(Error::RankDeficient(format!("column {j} is dependent")));
        }
        let alpha = if a[j * rows + j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..rows).map(|i| a[j * rows + i]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for k in j..cols {
            let dot: f64 = (j..rows).map(|i| v[i - j] * a[k * rows + i]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..rows {
                a[k * rows + i] -= f * v[i - j];
            }
        }
        let dot: f64 = (j..rows).map(|i| v[i - j] * b[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in j..rows {
            b[i] -= f * v[i - j];
        }
    }

    let r_max = (0..cols).fold(0.0f64, |m, j| m.max(a[j * rows + j].abs()));
    let mut coeffs = vec![0.0; cols];
    for j in (0..cols).rev() {
        let d = a[j * rows + j];
        if d.abs() <= r_max * 1e-12 {
            return Err(Error::RankDeficient(format!("pivot {j} vanishes")));
        }
        let s: f64 = (j + 1..cols).map(|k| a[k * rows + j] * coeffs[k]).sum();
        coeffs[j] = (b[j] - s) / d;
    }

    Ok(PolyFit {
        residual_norm: residual_norm(points, &coeffs),
        coeffs,
    })
}

/// Real roots of `c0 + c1 x + c2 x^2` (fewer when the leading terms vanish).
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
    let q = if c1 == 0.0 { 0.5 * disc.sqrt() } else { q };
    let mut roots = vec![q / c2];
    if q != 0.0 {
        roots.push(c0 / q);
    } else {
        roots.push(-q / c2);
    }
    roots
}

/// Maximiser of the polynomial on `[lo, hi]`, from the critical points of
/// its derivative and the two endpoints. Ties go to the smallest x.
pub fn argmax_on_interval(coeffs: &[f64], lo: f64, hi: f64) -> Result<(f64, f64)> {
    // also rejects NaN bounds
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) {
        return Err(Error::input(format!("empty interval [{lo}, {hi}]")));
    }
    if coeffs.len() > MAX_DEGREE + 1 {
        return Err(Error::input("argmax supports degree at most 3"));
    }
    let c = |i: usize| coeffs.get(i).copied().unwrap_or(0.0);
    // derivative: c1 + 2 c2 x + 3 c3 x^2
    let mut candidates = vec![lo, hi];
    candidates.extend(
        quadratic_roots(c(1), 2.0 * c(2), 3.0 * c(3))
            .into_iter()
            .filter(|x| x.is_finite() && *x > lo && *x < hi),
    );
    candidates.sort_by(f64::total_cmp);
    let mut best = (lo, eval_poly(coeffs, lo));
    for &x in &candidates {
        let y = eval_poly(coeffs, x);
        if y > best.1 {
            best = (x, y);
        }
    }
    Ok(best)
}

/// True when the maximiser on `[lo, hi]` lies strictly inside the interval.
pub fn has_interior_max(coeffs: &[f64], lo: f64, hi: f64) -> Result<bool> {
    let (x, _) = argmax_on_interval(coeffs, lo, hi)?;
    Ok(x > lo && x < hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_parabola() {
        let pts: Vec<(f64, f64)> = (-2..=2).map(|x| (x as f64, (x * x) as f64)).collect();
        let f = fit_polynomial(&pts, 2).unwrap();
        for (got, want) in f.coeffs.iter().zip([0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-9, "{:?}", f.coeffs);
        }
        assert!(f.residual_norm < 1e-9);
    }

    #[test]
    fn exact_line() {
        let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        let f = fit_polynomial(&pts, 1).unwrap();
        assert!((f.coeffs[0] - 1.0).abs() < 1e-12);
        assert!((f.coeffs[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency() {
        assert!(matches!(
            fit_polynomial(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)], 1),
            Err(Error::RankDeficient(_))
        ));
        assert!(matches!(
            fit_polynomial(&[(0.0, 1.0), (1.0, 2.0)], 3),
            Err(Error::RankDeficient(_))
        ));
        assert!(fit_polynomial(&[(0.0, 1.0)], 4).is_err());
    }

    #[test]
    fn noisy_cubic_is_locally_optimal() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let pts: Vec<(f64, f64)> = (0..50)
            .map(|i| {
                let x = i as f64 / 5.0;
                let y = 0.3 + 0.2 * x - 0.05 * x * x
                    + 0.002 * x.powi(3)
                    + rng.random_range(-0.05..0.05);
                (x, y)
            })
            .collect();
        let f = fit_polynomial(&pts, 3).unwrap();
        for j in 0..4 {
            for delta in [-1e-3, 1e-3] {
                let mut c = f.coeffs.clone();
                c[j] += delta;
                assert!(f.residual_norm <= residual_norm(&pts, &c));
            }
        }
    }

    #[test]
    fn argmax_examples() {
        assert_eq!(
            argmax_on_interval(&[0.0, 0.0, -1.0], -2.0, 2.0).unwrap(),
            (0.0, 0.0)
        );
        assert_eq!(
            argmax_on_interval(&[0.0, 1.0], 0.0, 10.0).unwrap(),
            (10.0, 10.0)
        );
        let (x, y) = argmax_on_interval(&[0.0, 3.0, 0.0, -1.0], 0.0, 2.0).unwrap();
        assert!((x - 1.0).abs() < 1e-12 && (y - 2.0).abs() < 1e-12);
        assert!(argmax_on_interval(&[1.0], 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn exact_cubic_is_reproduced(c in prop::array::uniform4(-3.0f64..3.0)) {
            let pts: Vec<(f64, f64)> = (0..12).map(|i| {
                let x = i as f64 * 0.5 - 2.0;
                (x, eval_poly(&c, x))
            }).collect();
            let f = fit_polynomial(&pts, 3).unwrap();
            for (a, b) in f.coeffs.iter().zip(c) {
                prop_assert!((a - b).abs() < 1e-8);
            }
        }

        #[test]
        fn constant_shift_moves_intercept_only(
            c in prop::array::uniform4(-3.0f64..3.0),
            shift in -10.0f64..10.0,
        ) {
            let pts: Vec<(f64, f64)> = (0..15).map(|i| {
                let x = i as f64 * 0.4;
                (x, eval_poly(&c, x) + ((i * 7919) % 13) as f64 * 0.01)
            }).collect();
            let shifted: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x, y + shift)).collect();
            let a = fit_polynomial(&pts, 3).unwrap();
            let b = fit_polynomial(&shifted, 3).unwrap();
            prop_assert!((b.coeffs[0] - a.coeffs[0] - shift).abs() < 1e-8);
            for j in 1..4 {
                prop_assert!((b.coeffs[j] - a.coeffs[j]).abs() < 1e-8);
            }
        }

        #[test]
        fn argmax_agrees_with_grid_scan(
            c in prop::array::uniform4(-5.0f64..5.0),
            lo in -5.0f64..5.0,
            width in 0.1f64..10.0,
        ) {
            let hi = lo + width;
            let (x, y) = argmax_on_interval(&c, lo, hi).unwrap();
            let steps = 10_000;
            let h = (hi - lo) / steps as f64;
            let (gx, gy) = (0..=steps)
                .map(|i| {
                    let x = lo + i as f64 * h;
                    (x, eval_poly(&c, x))
                })
                .fold((lo, f64::NEG_INFINITY), |b, p| if p.1 > b.1 { p } else { b });
            prop_assert!(y >= gy - 1e-9);
            // near-equal maxima at distinct x are allowed to disagree
            prop_assert!((gx - x).abs() <= h || (gy - y).abs() < 1e-6);
        }
    }
}
