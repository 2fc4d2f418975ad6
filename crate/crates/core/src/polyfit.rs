//! Least-squares polynomial fitting of `v = p(u)` through the normal
//! equations.
//!
//! The abscissae are centered and scaled to `[-1, 1]` before the monomial
//! expansion so the Gram matrix stays well conditioned for RGB-sized
//! ranges; coefficients are converted back to the raw `u` basis afterwards.

use crate::eigen::jacobi;
use crate::error::{Error, Result};

/// Condition estimate of the normal equations above which a fit is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coefficients: Vec<f64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * u + c)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyFit {
    pub polynomial: Polynomial,
    pub rms_residual: f64,
    pub max_residual: f64,
    /// Ratio of extreme eigenvalues of the (scaled) normal-equation matrix.
    pub condition: f64,
}

/// Fits a polynomial of `degree` (0..=3) to `(us, vs)`, optionally weighted.
pub fn fit_polynomial(
    us: &[f64],
    vs: &[f64],
    degree: usize,
    weights: Option<&[f64]>,
) -> Result<PolyFit> {
    if us.len() != vs.len() || weights.is_some_and(|w| w.len() != us.len()) {
        return Err(Error::MismatchedDimensions {
            expected: format!("{} samples", us.len()),
            found: format!(
                "{} ordinates / {:?} weights",
                vs.len(),
                weights.map(<[f64]>::len)
            ),
        });
    }
    if degree > 3 {
        return Err(Error::InvalidParameter(format!(
            "degree {degree} exceeds 3"
        )));
    }
    if us.iter().chain(vs).any(|x| !x.is_finite()) {
        return Err(Error::InvalidParameter("non-finite sample".into()));
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let mut distinct: Vec<f64> = (0..us.len())
        .filter(|&i| w(i) > 0.0)
        .map(|i| us[i])
        .collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < degree + 1 {
        return Err(Error::DegenerateInput(format!(
            "degree {degree} fit needs {} distinct abscissae, got {}",
            degree + 1,
            distinct.len()
        )));
    }
    let total: f64 = (0..us.len()).map(w).sum();
    let center = (0..us.len()).map(|i| w(i) * us[i]).sum::<f64>() / total;
    let scale = us.iter().map(|u| (u - center).abs()).fold(0.0, f64::max);
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let ts: Vec<f64> = us.iter().map(|u| (u - center) / scale).collect();

    let (scaled, condition) = match degree {
        0 => solve_normal::<1>(&ts, vs, &w)?,
        1 => solve_normal::<2>(&ts, vs, &w)?,
        2 => solve_normal::<3>(&ts, vs, &w)?,
        _ => solve_normal::<4>(&ts, vs, &w)?,
    };
    let polynomial = Polynomial::new(unscale(&scaled, center, scale));

    let (mut ss, mut max_residual) = (0.0, 0.0f64);
    for i in 0..us.len() {
        let r = vs[i] - polynomial.eval(us[i]);
        ss += w(i) * r * r;
        if w(i) > 0.0 {
            max_residual = max_residual.max(r.abs());
        }
    }
    Ok(PolyFit {
        polynomial,
        rms_residual: (ss / total).sqrt(),
        max_residual,
        condition,
    })
}

fn solve_normal<const N: usize>(
    ts: &[f64],
    vs: &[f64],
    w: &dyn Fn(usize) -> f64,
) -> Result<(Vec<f64>, f64)> {
    let mut gram = [[0.0; N]; N];
    let mut rhs = [0.0; N];
    for (i, (&t, &v)) in ts.iter().zip(vs).enumerate() {
        let wi = w(i);
        let mut pow = [1.0; N];
        for k in 1..N {
            pow[k] = pow[k - 1] * t;
        }
        for r in 0..N {
            rhs[r] += wi * pow[r] * v;
            for c in 0..N {
                gram[r][c] += wi * pow[r] * pow[c];
            }
        }
    }
    let (eigs, _) = jacobi(gram);
    let hi = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned {
            condition,
            limit: MAX_CONDITION,
        });
    }
    let l = cholesky(&gram).ok_or(Error::IllConditioned {
        condition,
        limit: MAX_CONDITION,
    })?;
    let mut x = cholesky_solve(&l, &rhs);
    // one step of iterative refinement
    let mut resid = rhs;
    for r in 0..N {
        for c in 0..N {
            resid[r] -= gram[r][c] * x[c];
        }
    }
    let dx = cholesky_solve(&l, &resid);
    for k in 0..N {
        x[k] += dx[k];
    }
    Ok((x.to_vec(), condition))
}

fn cholesky<const N: usize>(a: &[[f64; N]; N]) -> Option<[[f64; N]; N]> {
    let mut l = [[0.0; N]; N];
    for i in 0..N {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if d <= 0.0 {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Some(l)
}

fn cholesky_solve<const N: usize>(l: &[[f64; N]; N], b: &[f64; N]) -> [f64; N] {
    let mut y = [0.0; N];
    for i in 0..N {
        let s: f64 = (0..i).map(|k| l[i][k] * y[k]).sum();
        y[i] = (b[i] - s) / l[i][i];
    }
    let mut x = [0.0; N];
    for i in (0..N).rev() {
        let s: f64 = (i + 1..N).map(|k| l[k][i] * x[k]).sum();
        x[i] = (y[i] - s) / l[i][i];
    }
    x
}

/// Rewrites `Σ c_k ((u − center)/scale)^k` in powers of `u`.
fn unscale(c: &[f64], center: f64, scale: f64) -> Vec<f64> {
    let n = c.len();
    let mut out = vec![0.0; n];
    for (k, ck) in c.iter().enumerate() {
        let ck = ck / scale.powi(k as i32);
        let mut binom = 1.0;
        for j in 0..=k {
            // term: C(k, j) u^j (−center)^(k−j)
            out[j] += ck * binom * (-center).powi((k - j) as i32);
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_cubic() {
        let a = [5.0, 1.0, -0.01, 0.0001];
        let p = Polynomial::new(a.to_vec());
        let us: Vec<f64> = (0..64).map(|i| -100.0 + 200.0 * i as f64 / 63.0).collect();
        let vs: Vec<f64> = us.iter().map(|u| p.eval(*u)).collect();
        let fit = fit_polynomial(&us, &vs, 3, None).unwrap();
        for (got, want) in fit.polynomial.coefficients.iter().zip(a) {
            assert!(((got - want) / want).abs() < 1e-6, "{got} vs {want}");
        }
        assert!(fit.max_residual < 1e-6);
    }

    #[test]
    fn off_center_abscissae() {
        let p = Polynomial::new(vec![-3.0, 0.5, 0.002, -1e-5]);
        let us: Vec<f64> = (0..40).map(|i| 60.0 + 3.0 * i as f64).collect();
        let vs: Vec<f64> = us.iter().map(|u| p.eval(*u)).collect();
        let fit = fit_polynomial(&us, &vs, 3, None).unwrap();
        assert!(fit.max_residual < 1e-8);
    }

    #[test]
    fn too_few_distinct_abscissae() {
        let us = [1.0, 1.0, 2.0, 2.0, 3.0];
        let vs = [0.0; 5];
        assert!(matches!(
            fit_polynomial(&us, &vs, 3, None),
            Err(Error::DegenerateInput(_))
        ));
        assert!(fit_polynomial(&us, &vs, 2, None).is_ok());
    }

    #[test]
    fn clustered_abscissae_are_ill_conditioned() {
        // three tight clusters plus one far point: the cubic column is nearly
        // a combination of the others
        let mut us = vec![0.0, 1e-7, 2e-7, 1.0];
        us.extend([0.5, 0.5 + 1e-7]);
        let vs: Vec<f64> = us.iter().map(|u| u * u).collect();
        assert!(matches!(
            fit_polynomial(&us, &vs, 3, None),
            Err(Error::IllConditioned { .. })
        ));
    }

    #[test]
    fn unscale_matches_direct_expansion() {
        let c = [1.0, -2.0, 0.5, 0.25];
        let (m, s) = (3.0, 2.0);
        let raw = Polynomial::new(unscale(&c, m, s));
        let scaled = Polynomial::new(c.to_vec());
        for u in [-4.0, 0.0, 1.5, 7.0] {
            assert!((raw.eval(u) - scaled.eval((u - m) / s)).abs() < 1e-12);
        }
    }
}
