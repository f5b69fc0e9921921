//! Strongly convex box QP
//! `min x^T Q x - 2 b^T x + alpha/2 |x - x_prev|^2` over `[0, 1]^M`.
//!
//! Projected Newton (exact solve on the free coordinates, Armijo search along
//! the projection arc). If that stalls, accelerated projected gradient plus
//! an active-set polish takes over.

use crate::decomposition::LinearizedObjective;
use crate::error::{Error, Result};
use crate::linalg::{RMat, RVec};

/// Projected-gradient norm every returned point satisfies.
pub const KKT_TOLERANCE: f64 = 1e-6;
const PG_TOLERANCE: f64 = 1e-10;
const MAX_PG_ITERS: usize = 20_000;
const MAX_POLISH_ROUNDS: usize = 8;
const MAX_NEWTON_ITERS: usize = 100;
const NEWTON_TOLERANCE: f64 = 1e-11;
const ARMIJO: f64 = 1e-4;
const BINDING_WIDTH: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxQp {
    /// Real symmetric quadratic term `Q`.
    pub q: RMat,
    pub b: RVec,
    pub alpha: f64,
    pub x_prev: RVec,
}

impl BoxQp {
    pub fn value(&self, x: &RVec) -> f64 {
        let d = x - &self.x_prev;
        x.dot(&(&self.q * x)) - 2.0 * self.b.dot(x) + 0.5 * self.alpha * d.norm_squared()
    }

    pub fn gradient(&self, x: &RVec) -> RVec {
        (&self.q * x) * 2.0 - &self.b * 2.0 + (x - &self.x_prev) * self.alpha
    }

    /// `|x - P(x - grad f(x))|`, zero exactly at the minimizer.
    pub fn kkt_residual(&self, x: &RVec) -> f64 {
        let g = self.gradient(x);
        (x - project(&(x - g))).norm()
    }
}

pub fn project(x: &RVec) -> RVec {
    x.map(|v| v.clamp(0.0, 1.0))
}

fn lipschitz(q: &RMat, alpha: f64) -> f64 {
    let gershgorin = q.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    2.0 * q.norm().min(gershgorin) + alpha
}

/// Minimizer of the proximal subproblem for the linearized objective.
pub fn solve_box_qp(obj: &LinearizedObjective, x_prev: &RVec, alpha: f64) -> Result<RVec> {
    let qp = BoxQp { q: obj.quadratic(), b: obj.b_vec.clone(), alpha, x_prev: x_prev.clone() };
    solve(&qp)
}

pub fn solve(qp: &BoxQp) -> Result<RVec> {
    let m = qp.b.len();
    if qp.q.shape() != (m, m) || qp.x_prev.len() != m {
        return Err(Error::Contract("box QP dimensions disagree".into()));
    }
    if !(qp.alpha > 0.0) {
        return Err(Error::Contract(format!("proximal weight must be positive, got {}", qp.alpha)));
    }
    if qp.q.iter().chain(qp.b.iter()).chain(qp.x_prev.iter()).any(|v| !v.is_finite()) || !qp.alpha.is_finite() {
        return Err(Error::Contract("non-finite box QP data".into()));
    }

    if let Some(x) = projected_newton(qp) {
        return Ok(x);
    }

    let x = accelerated_gradient(qp);
    let residual = qp.kkt_residual(&x);
    debug_assert!(residual < KKT_TOLERANCE, "box QP KKT residual {residual}");
    if residual >= KKT_TOLERANCE {
        return Err(Error::Numerical(format!("box QP KKT residual {residual} above tolerance")));
    }
    Ok(x)
}

fn accelerated_gradient(qp: &BoxQp) -> RVec {
    let l = lipschitz(&qp.q, qp.alpha);
    let kappa = l / qp.alpha;
    let momentum = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);
    let mut x = project(&qp.x_prev);
    let mut y = x.clone();
    for _ in 0..MAX_PG_ITERS {
        let x_next = project(&(&y - qp.gradient(&y) / l));
        let step = (&x_next - &x).norm();
        y = &x_next + (&x_next - &x) * momentum;
        x = x_next;
        if step * l <= PG_TOLERANCE {
            break;
        }
    }

    polish(qp, x)
}

fn hessian(qp: &BoxQp) -> RMat {
    let m = qp.b.len();
    &qp.q * 2.0 + RMat::identity(m, m) * qp.alpha
}

/// Coordinates within `width` of a bound whose gradient pushes outward.
fn binding(x: &RVec, g: &RVec, width: f64) -> Vec<bool> {
    (0..x.len()).map(|k| (x[k] <= width && g[k] > 0.0) || (x[k] >= 1.0 - width && g[k] < 0.0)).collect()
}

fn projected_newton(qp: &BoxQp) -> Option<RVec> {
    let m = qp.b.len();
    let hess = hessian(qp);
    let mut x = project(&qp.x_prev);
    let mut fx = qp.value(&x);
    for _ in 0..MAX_NEWTON_ITERS {
        let g = qp.gradient(&x);
        let w = (&x - project(&(&x - &g))).norm();
        if w <= NEWTON_TOLERANCE {
            return Some(x);
        }
        let bound = binding(&x, &g, BINDING_WIDTH.min(w));
        let free: Vec<usize> = (0..m).filter(|&k| !bound[k]).collect();
        // Newton on the free block, scaled gradient on the binding ones
        let mut d = RVec::from_fn(m, |k, _| if bound[k] { -g[k] / hess[(k, k)] } else { 0.0 });
        if !free.is_empty() {
            let h_ff = RMat::from_fn(free.len(), free.len(), |r, s| hess[(free[r], free[s])]);
            let g_f = RVec::from_fn(free.len(), |r, _| g[free[r]]);
            let step = h_ff.cholesky()?.solve(&g_f);
            for (r, &k) in free.iter().enumerate() {
                d[k] = -step[r];
            }
        }
        let mut t = 1.0;
        loop {
            let cand = project(&(&x + &d * t));
            let fc = qp.value(&cand);
            // near the optimum f is flat to rounding; then progress is judged by the residual
            let flat = fc <= fx + 1e-14 * (1.0 + fx.abs()) && qp.kkt_residual(&cand) < w;
            if fc <= fx + ARMIJO * g.dot(&(&cand - &x)) || flat {
                x = cand;
                fx = fc;
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return (w < KKT_TOLERANCE).then_some(x);
            }
        }
    }
    (qp.kkt_residual(&x) < KKT_TOLERANCE).then_some(x)
}

/// Fixes the coordinates at a bound with outward gradient and solves the
/// remaining equality-constrained problem exactly; repeated while it helps.
fn polish(qp: &BoxQp, mut x: RVec) -> RVec {
    let m = x.len();
    let hess = hessian(qp);
    for _ in 0..MAX_POLISH_ROUNDS {
        let g = qp.gradient(&x);
        let free: Vec<usize> = (0..m)
            .filter(|&k| !((x[k] <= 0.0 && g[k] >= 0.0) || (x[k] >= 1.0 && g[k] <= 0.0)))
            .collect();
        if free.is_empty() {
            break;
        }
        // H_ff x_f = -(g_f - H_ff x_f) keeps fixed coordinates in place
        let h_ff = RMat::from_fn(free.len(), free.len(), |r, s| hess[(free[r], free[s])]);
        let rhs = RVec::from_fn(free.len(), |r, _| {
            let k = free[r];
            free.iter().map(|&s| hess[(k, s)] * x[s]).sum::<f64>() - g[k]
        });
        let Some(sol) = h_ff.cholesky().map(|c| c.solve(&rhs)) else { break };
        let mut cand = x.clone();
        for (r, &k) in free.iter().enumerate() {
            cand[k] = sol[r];
        }
        let cand = project(&cand);
        if qp.kkt_residual(&cand) < qp.kkt_residual(&x) {
            x = cand;
        } else {
            break;
        }
        if qp.kkt_residual(&x) <= PG_TOLERANCE {
            break;
        }
    }
    x
}
