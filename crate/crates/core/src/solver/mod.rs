//! Relaxation solver: proximal successive convex approximation from random
//! starts, followed by rounding to a binary split.

use rand::Rng as _;

use crate::channel::ChannelRealization;
use crate::config::{Rounding, SystemConfig};
use crate::decomposition::{build_linearized, build_quadratic_terms};
use crate::error::Result;
use crate::linalg::RVec;
use crate::mse::{evaluate, sum_mse_with_filters, AntennaAssignment, MseReport, ReceiveFilters};
use crate::rng::{stream, STREAM_RESTART_BASE};

pub mod qp;

pub use qp::solve_box_qp;

/// Outer-loop state of one restart.
#[derive(Debug, Clone, PartialEq)]
pub struct PscaState {
    pub x_current: RVec,
    pub iteration: usize,
    /// Sum MSE at each iterate with the MMSE filters of that iterate.
    pub objective_trace: Vec<f64>,
    /// Successive-iterate distances.
    pub step_trace: Vec<f64>,
    /// Filters computed at the last anchor.
    pub filters: ReceiveFilters,
    pub converged: bool,
}

/// Outcome of [`rlx_prox`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub x_binary: AntennaAssignment,
    pub sum_mse: f64,
    pub sum_se: f64,
    pub report: MseReport,
    pub restart_index: usize,
    pub iterations_used: usize,
    pub converged: bool,
    /// Relaxed sum MSE of every restart, in restart order.
    pub restart_mse: Vec<f64>,
}

/// Runs the convexify/solve/step loop from `x_init` until the step drops to
/// `cfg.epsilon` or `cfg.max_iters` is reached.
pub fn psca_run(ch: &ChannelRealization, cfg: &SystemConfig, x_init: &RVec) -> Result<PscaState> {
    let mut x = x_init.clone();
    let mut state = PscaState {
        x_current: x.clone(),
        iteration: 0,
        objective_trace: Vec::new(),
        step_trace: Vec::new(),
        filters: ReceiveFilters::zeros(ch.num_antennas(), ch.num_ul(), ch.num_dl()),
        converged: false,
    };
    while state.iteration < cfg.max_iters {
        let anchor = AntennaAssignment::relaxed(x.clone())?;
        let (filters, report) = evaluate(ch, &anchor)?;
        let terms = build_quadratic_terms(ch, &filters);
        let model = build_linearized(&anchor, &terms, ch);
        let x_hat = solve_box_qp(&model, &x, cfg.alpha)?;
        let x_next = (&x + (&x_hat - &x) * cfg.rho).map(|v| v.clamp(0.0, 1.0));
        let step = (&x_next - &x).norm();

        state.iteration += 1;
        state.objective_trace.push(report.sum_mse);
        state.step_trace.push(step);
        state.filters = filters;
        x = x_next;
        if step <= cfg.epsilon {
            state.converged = true;
            break;
        }
    }
    state.x_current = x;
    Ok(state)
}

/// Nearest binary point (ties go to uplink). If every antenna lands on the
/// same side, the coordinate closest to 0.5 is flipped so that both
/// directions keep at least one antenna.
pub fn round_assignment(x: &RVec) -> AntennaAssignment {
    let mut bits: Vec<bool> = x.iter().map(|&v| v >= 0.5).collect();
    let all_same = bits.iter().all(|&b| b == bits[0]);
    if bits.len() >= 2 && all_same {
        let mut closest = 0;
        for k in 1..x.len() {
            if (x[k] - 0.5).abs() < (x[closest] - 0.5).abs() {
                closest = k;
            }
        }
        bits[closest] = !bits[closest];
    }
    AntennaAssignment::binary(&bits)
}

/// Sorts the coordinates by decreasing relaxed value (ties keep index order)
/// and evaluates the `M - 1` splits that put the top `k` antennas on the
/// uplink; returns the one with the lowest sum MSE (smallest `k` on ties).
/// The 0.5-threshold rounding is one of the candidates whenever it is not
/// degenerate.
pub fn round_by_sweep(ch: &ChannelRealization, x: &RVec) -> Result<(AntennaAssignment, MseReport)> {
    let m = x.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| x[b].total_cmp(&x[a]));
    let mut best: Option<(AntennaAssignment, MseReport)> = None;
    for k in 1..m.max(2) {
        let mut bits = vec![false; m];
        for &i in order.iter().take(k) {
            bits[i] = true;
        }
        let cand = AntennaAssignment::binary(&bits);
        let (_, report) = evaluate(ch, &cand)?;
        if best.as_ref().is_none_or(|(_, b)| report.sum_mse < b.sum_mse) {
            best = Some((cand, report));
        }
    }
    Ok(best.expect("at least one candidate"))
}

/// Solver with the restart streams derived from `cfg.seed`.
pub fn rlx_prox(ch: &ChannelRealization, cfg: &SystemConfig) -> Result<SolveResult> {
    rlx_prox_seeded(ch, cfg, cfg.seed)
}

/// Solver with restart `l` drawing its start point from stream
/// `STREAM_RESTART_BASE + l` of `seed`.
pub fn rlx_prox_seeded(ch: &ChannelRealization, cfg: &SystemConfig, seed: u64) -> Result<SolveResult> {
    let m = ch.num_antennas();
    let mut best: Option<(usize, f64, PscaState)> = None;
    let mut restart_mse = Vec::with_capacity(cfg.num_restarts);
    for l in 0..cfg.num_restarts {
        let mut rng = stream(seed, STREAM_RESTART_BASE + l as u64);
        let x0 = RVec::from_fn(m, |_, _| rng.random::<f64>());
        let state = psca_run(ch, cfg, &x0)?;
        let relaxed = AntennaAssignment::relaxed(state.x_current.clone())?;
        let mse = sum_mse_with_filters(ch, &relaxed, &state.filters);
        restart_mse.push(mse);
        if best.as_ref().is_none_or(|(_, b, _)| mse < *b) {
            best = Some((l, mse, state));
        }
    }
    let (restart_index, _, state) = best.expect("at least one restart");
    let (x_binary, report) = match cfg.rounding {
        Rounding::Threshold => {
            let x = round_assignment(&state.x_current);
            let (_, report) = evaluate(ch, &x)?;
            (x, report)
        }
        Rounding::Sweep => round_by_sweep(ch, &state.x_current)?,
    };
    Ok(SolveResult {
        sum_mse: report.sum_mse,
        sum_se: report.sum_se,
        x_binary,
        report,
        restart_index,
        iterations_used: state.iteration,
        converged: state.converged,
        restart_mse,
    })
}
