//! Small dense Levenberg-Marquardt solver for the handful of low-dimensional
//! curve fits the analysis needs (Lorentzian multiplets, Ramsey fringes,
//! single-parameter linewidth fits). Jacobians are taken by forward
//! differences; the normal equations are solved by Gaussian elimination with
//! partial pivoting.

use crate::error::{CoreError, Result};

const MAX_ITERATIONS: usize = 200;
const REL_STEP_TOL: f64 = 1e-8;

/// Outcome of a least-squares fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub params: Vec<f64>,
    /// Parameter covariance, `sigma^2 (J^T J)^{-1}`, row-major.
    pub covariance: Vec<Vec<f64>>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    /// One-sigma uncertainty of parameter `i`.
    pub fn sigma(&self, i: usize) -> f64 {
        self.covariance[i][i].max(0.0).sqrt()
    }
}

fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

fn invert(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_linear(a.to_vec(), e)?);
    }
    let mut inv = vec![vec![0.0; n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

fn residuals<F: Fn(&[f64], f64) -> f64>(
    model: &F,
    xs: &[f64],
    ys: &[f64],
    params: &[f64],
) -> Vec<f64> {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| y - model(params, x))
        .collect()
}

fn clamp_into(params: &mut [f64], bounds: Option<&[(f64, f64)]>) {
    if let Some(bounds) = bounds {
        for (p, &(lo, hi)) in params.iter_mut().zip(bounds) {
            *p = p.clamp(lo, hi);
        }
    }
}

/// Fit `ys ~ model(params, xs)` in the least-squares sense, starting from
/// `initial`, with optional box bounds (enforced by projection).
pub fn fit_least_squares<F>(
    model: F,
    xs: &[f64],
    ys: &[f64],
    initial: &[f64],
    bounds: Option<&[(f64, f64)]>,
) -> Result<FitResult>
where
    F: Fn(&[f64], f64) -> f64,
{
    let np = initial.len();
    if xs.len() != ys.len() {
        return Err(CoreError::InvalidParameter(format!(
            "x and y lengths differ: {} vs {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < np + 2 {
        return Err(CoreError::TooShort {
            got: xs.len(),
            need: np + 2,
        });
    }
    if let Some(b) = bounds {
        if b.len() != np {
            return Err(CoreError::InvalidParameter(format!(
                "bounds length {} does not match parameter count {np}",
                b.len()
            )));
        }
    }

    let mut params = initial.to_vec();
    clamp_into(&mut params, bounds);
    let mut r = residuals(&model, xs, ys, &params);
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let mut jtj_last: Option<Vec<Vec<f64>>> = None;

    for iter in 0..MAX_ITERATIONS {
        iterations = iter + 1;
        // forward-difference Jacobian of the residual vector
        let mut jac = vec![vec![0.0; np]; xs.len()];
        for j in 0..np {
            let h = 1e-7 * params[j].abs().max(1e-7);
            let mut pp = params.clone();
            pp[j] += h;
            let rp = residuals(&model, xs, ys, &pp);
            for (i, (rpi, ri)) in rp.iter().zip(&r).enumerate() {
                jac[i][j] = (rpi - ri) / h;
            }
        }
        let mut jtj = vec![vec![0.0; np]; np];
        let mut jtr = vec![0.0; np];
        for i in 0..xs.len() {
            for a in 0..np {
                jtr[a] -= jac[i][a] * r[i];
                for b in 0..np {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        jtj_last = Some(jtj.clone());

        let mut accepted = false;
        for _ in 0..20 {
            let mut damped = jtj.clone();
            for a in 0..np {
                damped[a][a] += lambda * jtj[a][a].max(1e-30);
            }
            let Some(step) = solve_linear(damped, jtr.clone()) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial: Vec<f64> = params.iter().zip(&step).map(|(p, s)| p + s).collect();
            clamp_into(&mut trial, bounds);
            let rt = residuals(&model, xs, ys, &trial);
            let ct: f64 = rt.iter().map(|v| v * v).sum();
            if ct.is_finite() && ct <= cost {
                let rel_step = params
                    .iter()
                    .zip(&trial)
                    .map(|(p, t)| (p - t).abs() / p.abs().max(1e-12))
                    .fold(0.0_f64, f64::max);
                params = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if rel_step < REL_STEP_TOL {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged || !accepted {
            converged = converged || !accepted; // stalled at a minimum
            break;
        }
    }

    if !converged {
        return Err(CoreError::FitDiverged {
            iterations,
            residual: cost.sqrt(),
        });
    }

    let dof = (xs.len() as f64 - np as f64).max(1.0);
    let sigma2 = cost / dof;
    let covariance = jtj_last
        .as_deref()
        .and_then(invert)
        .map(|inv| {
            inv.into_iter()
                .map(|row| row.into_iter().map(|v| v * sigma2).collect())
                .collect()
        })
        .unwrap_or_else(|| vec![vec![f64::NAN; np]; np]);

    Ok(FitResult {
        params,
        covariance,
        residual_norm: cost.sqrt(),
        iterations,
        converged,
    })
}
