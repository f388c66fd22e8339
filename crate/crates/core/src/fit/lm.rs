use nalgebra::{DMatrix, DVector};

pub const MAX_ITERATIONS: usize = 200;
const STEP_TOLERANCE: f64 = 1e-10;
const LAMBDA_INIT: f64 = 1e-3;
const LAMBDA_MAX: f64 = 1e16;

/// A least-squares problem with an analytic Jacobian.
pub(crate) trait Problem {
    fn n_residuals(&self) -> usize;
    fn n_params(&self) -> usize;
    fn residuals(&self, p: &[f64], out: &mut [f64]);
    /// Row i, column j: ∂r_i/∂p_j.
    fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>);
}

#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub params: Vec<f64>,
    /// Standard errors; `None` where the normal matrix is singular.
    pub sigmas: Vec<Option<f64>>,
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Solution {
    pub fn rms(&self, n: usize) -> f64 {
        (self.cost / n as f64).sqrt()
    }
}

fn cost_at(problem: &impl Problem, p: &[f64], r: &mut [f64]) -> f64 {
    problem.residuals(p, r);
    let c: f64 = r.iter().map(|v| v * v).sum();
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

/// Levenberg–Marquardt with Marquardt diagonal scaling.
///
/// Returns `None` if the residuals at `init` are not finite.
pub(crate) fn solve(problem: &impl Problem, init: &[f64]) -> Option<Solution> {
    let m = problem.n_residuals();
    let n = problem.n_params();
    let mut p = init.to_vec();
    let mut r = vec![0.0; m];
    let mut r_trial = vec![0.0; m];
    let mut cost = cost_at(problem, &p, &mut r);
    if !cost.is_finite() {
        return None;
    }
    let mut jac = DMatrix::zeros(m, n);
    let mut lambda = LAMBDA_INIT;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS && !converged {
        iterations += 1;
        if cost == 0.0 {
            converged = true;
            break;
        }
        problem.jacobian(&p, &mut jac);
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.tr_mul(&jac);
        let grad = jac.tr_mul(&rv);
        let diag: Vec<f64> = (0..n).map(|i| jtj[(i, i)].max(1e-300)).collect();

        loop {
            let mut a = jtj.clone();
            for (i, d) in diag.iter().enumerate() {
                a[(i, i)] += lambda * d;
            }
            let step = a.cholesky().map(|c| c.solve(&(-&grad)));
            let Some(step) = step else {
                lambda *= 10.0;
                if lambda > LAMBDA_MAX {
                    converged = true;
                    break;
                }
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let trial_cost = cost_at(problem, &trial, &mut r_trial);
            let small_step = p
                .iter()
                .zip(step.iter())
                .all(|(x, dx)| dx.abs() <= STEP_TOLERANCE * (x.abs() + STEP_TOLERANCE));
            if trial_cost < cost {
                p = trial;
                std::mem::swap(&mut r, &mut r_trial);
                cost = trial_cost;
                lambda = (lambda / 10.0).max(1e-12);
                if small_step {
                    converged = true;
                }
                break;
            }
            // No descent left: either the step has collapsed or damping is saturated.
            if small_step {
                converged = true;
                break;
            }
            lambda *= 10.0;
            if lambda > LAMBDA_MAX {
                converged = true;
                break;
            }
        }
    }

    let sigmas = covariance_sigmas(problem, &p, &mut jac, cost, m, n);
    Some(Solution {
        params: p,
        sigmas,
        cost,
        iterations,
        converged,
    })
}

fn covariance_sigmas(
    problem: &impl Problem,
    p: &[f64],
    jac: &mut DMatrix<f64>,
    cost: f64,
    m: usize,
    n: usize,
) -> Vec<Option<f64>> {
    problem.jacobian(p, jac);
    let dof = m.saturating_sub(n);
    let s2 = if dof > 0 { cost / dof as f64 } else { 0.0 };
    match jac.tr_mul(jac).try_inverse() {
        Some(inv) => (0..n)
            .map(|i| {
                let v = s2 * inv[(i, i)];
                (v.is_finite() && v >= 0.0).then(|| v.sqrt())
            })
            .collect(),
        None => vec![None; n],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y = a·exp(b·x), the classic Misra-style toy problem.
    struct Exp {
        x: Vec<f64>,
        y: Vec<f64>,
    }

    impl Problem for Exp {
        fn n_residuals(&self) -> usize {
            self.x.len()
        }
        fn n_params(&self) -> usize {
            2
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            for (i, (x, y)) in self.x.iter().zip(&self.y).enumerate() {
                out[i] = p[0] * (p[1] * x).exp() - y;
            }
        }
        fn jacobian(&self, p: &[f64], jac: &mut DMatrix<f64>) {
            for (i, x) in self.x.iter().enumerate() {
                let e = (p[1] * x).exp();
                jac[(i, 0)] = e;
                jac[(i, 1)] = p[0] * x * e;
            }
        }
    }

    #[test]
    fn recovers_exact_parameters() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y = x.iter().map(|x| 2.5 * (-1.3 * x).exp()).collect();
        let sol = solve(&Exp { x, y }, &[1.0, 0.0]).unwrap();
        assert!(sol.converged);
        assert!((sol.params[0] - 2.5).abs() < 1e-9);
        assert!((sol.params[1] + 1.3).abs() < 1e-9);
        assert!(sol.cost < 1e-20);
    }

    #[test]
    fn deterministic() {
        let x: Vec<f64> = (0..15).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x.iter().enumerate().map(|(i, x)| (0.7 * x).exp() + 0.01 * (i as f64).sin()).collect();
        let p = Exp { x, y };
        let a = solve(&p, &[0.5, 0.5]).unwrap();
        let b = solve(&p, &[0.5, 0.5]).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.iterations, b.iterations);
        assert!(a.sigmas.iter().all(|s| s.unwrap() > 0.0));
    }

    #[test]
    fn non_finite_start_is_rejected() {
        let p = Exp {
            x: vec![0.0, 1.0],
            y: vec![1.0, 2.0],
        };
        assert!(solve(&p, &[1.0, f64::NAN]).is_none());
    }
}
