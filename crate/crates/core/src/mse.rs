//! Effective channels, interference-plus-noise statistics, MMSE receivers and
//! per-user mean squared errors for a given antenna assignment.
//!
//! All expressions accept relaxed assignments (entries in `[0, 1]`) as well as
//! binary ones: `X^u = diag(x)` and `X^d = I - X^u` simply scale rows and
//! columns of the channels. The downlink indicator is never stored.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::linalg::{gram, masked_hpd_solve, scale_cols, scale_rows, CMat, CVec, RVec};

/// Antennas with `x_ul` at or below this level are treated as switched off
/// when the uplink covariance is inverted.
pub const ACTIVE_THRESHOLD: f64 = 1e-9;

/// Slack tolerated above 1 for an MMSE mean squared error before it counts as
/// a contract violation.
const MSE_UPPER_SLACK: f64 = 1e-9;

/// UL/DL split of the base station antennas, stored as the uplink indicator.
#[derive(Debug, Clone, PartialEq)]
pub struct AntennaAssignment {
    x_ul: RVec,
}

impl AntennaAssignment {
    /// Relaxed assignment; every entry must lie in `[0, 1]`.
    pub fn relaxed(x_ul: RVec) -> Result<Self> {
        if let Some(v) = x_ul.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Contract(format!("assignment entry {v} outside [0, 1]")));
        }
        Ok(Self { x_ul })
    }

    pub fn binary(bits: &[bool]) -> Self {
        Self { x_ul: RVec::from_iterator(bits.len(), bits.iter().map(|&b| if b { 1.0 } else { 0.0 })) }
    }

    /// Binary assignment whose bit `k` of `code` marks antenna `k` as uplink.
    pub fn from_code(code: u64, num_antennas: usize) -> Self {
        Self { x_ul: RVec::from_fn(num_antennas, |k, _| ((code >> k) & 1) as f64) }
    }

    pub fn all_ul(num_antennas: usize) -> Self {
        Self { x_ul: RVec::from_element(num_antennas, 1.0) }
    }

    pub fn all_dl(num_antennas: usize) -> Self {
        Self { x_ul: RVec::zeros(num_antennas) }
    }

    pub fn len(&self) -> usize {
        self.x_ul.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_ul.is_empty()
    }

    pub fn x_ul(&self) -> &RVec {
        &self.x_ul
    }

    /// `1 - x_ul`.
    pub fn x_dl(&self) -> RVec {
        self.x_ul.map(|v| 1.0 - v)
    }

    pub fn is_binary(&self) -> bool {
        self.x_ul.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// Bit encoding of a binary assignment (antenna `k` is bit `k`).
    pub fn code(&self) -> Option<u64> {
        if !self.is_binary() || self.len() > 64 {
            return None;
        }
        Some(self.x_ul.iter().enumerate().filter(|(_, &v)| v == 1.0).map(|(k, _)| 1u64 << k).sum())
    }

    pub fn num_ul_antennas(&self) -> usize {
        self.x_ul.iter().filter(|&&v| v > ACTIVE_THRESHOLD).count()
    }
}

/// Linear receivers: one column per uplink user, one scalar per downlink user.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiveFilters {
    pub r_ul: CMat,
    pub r_dl: CVec,
}

impl ReceiveFilters {
    pub fn zeros(num_antennas: usize, num_ul: usize, num_dl: usize) -> Self {
        Self { r_ul: CMat::zeros(num_antennas, num_ul), r_dl: CVec::zeros(num_dl) }
    }
}

/// Per-user and aggregate figures of one assignment under MMSE receivers.
#[derive(Debug, Clone, PartialEq)]
pub struct MseReport {
    pub mse_ul: Vec<f64>,
    pub mse_dl: Vec<f64>,
    pub sum_mse: f64,
    /// Sum spectral efficiency, bits/s/Hz.
    pub sum_se: f64,
}

impl MseReport {
    pub fn from_mses(mse_ul: Vec<f64>, mse_dl: Vec<f64>) -> Result<Self> {
        let sum_se = sum_spectral_efficiency(&mse_ul, &mse_dl)?;
        let sum_mse = mse_ul.iter().chain(&mse_dl).sum();
        Ok(Self { mse_ul, mse_dl, sum_mse, sum_se })
    }
}

/// Channels seen through the assignment: `X^u H^u`, `X^d H^d`, `X^u H_SI X^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    pub h_ul: CMat,
    pub h_dl: CMat,
    pub h_si: CMat,
}

fn check_dims(ch: &ChannelRealization, x: &AntennaAssignment) {
    assert_eq!(
        ch.num_antennas(),
        x.len(),
        "assignment length {} does not match {} antennas",
        x.len(),
        ch.num_antennas()
    );
}

pub fn effective_channels(ch: &ChannelRealization, x: &AntennaAssignment) -> EffectiveChannels {
    check_dims(ch, x);
    let xu = x.x_ul();
    let xd = x.x_dl();
    EffectiveChannels {
        h_ul: scale_rows(&ch.h_ul, xu),
        h_dl: scale_rows(&ch.h_dl, &xd),
        h_si: scale_cols(&scale_rows(&ch.h_si, xu), &xd),
    }
}

/// Per-antenna transmit power of the beamformers, `diag(sum_j W_j W_j^H)`.
pub(crate) fn tx_power_per_antenna(w: &CMat) -> RVec {
    RVec::from_fn(w.nrows(), |k, _| w.row(k).iter().map(|z| z.norm_sqr()).sum())
}

/// Covariance of everything the base station receives on the uplink,
/// `q_i H_i H_i^H + Psi_i` (identical for every user).
fn total_ul_cov(ch: &ChannelRealization, x: &AntennaAssignment, eff: &EffectiveChannels) -> CMat {
    let m = ch.num_antennas();
    let (kappa, beta) = (ch.kappa, ch.beta);

    // users: (1 + kappa) sum q H H^H + beta diag(sum q H H^H)
    let hq = scale_cols(&eff.h_ul, &ch.q_ul.map(f64::sqrt));
    let users = gram(&hq);

    // self-interference through X^u H_SI X^d
    let a = &eff.h_si * &ch.w_dl;
    let si = gram(&a);
    let p_tx = tx_power_per_antenna(&ch.w_dl);
    let b = scale_cols(&eff.h_si, &p_tx.map(f64::sqrt));
    let si_tx_dist = gram(&b);

    let mut c = users.scale(1.0 + kappa) + &si + si_tx_dist.scale(kappa);
    for k in 0..m {
        c[(k, k)] += beta * (users[(k, k)].re + si[(k, k)].re) + ch.noise_var_bs * x.x_ul()[k];
    }
    c
}

/// Interference-plus-noise covariance of uplink user `i` (zero based).
pub fn interference_cov_ul(ch: &ChannelRealization, x: &AntennaAssignment, i: usize) -> CMat {
    assert!(i < ch.num_ul(), "uplink user {i} out of range");
    let eff = effective_channels(ch, x);
    let mut psi = total_ul_cov(ch, x, &eff);
    let h = eff.h_ul.column(i);
    psi -= (h * h.adjoint()).scale(ch.q_ul[i]);
    psi
}

/// `h_j^H X^d W_m` for every DL user `j` (rows) and beamformer `m` (columns).
fn dl_gains(ch: &ChannelRealization, eff: &EffectiveChannels) -> CMat {
    eff.h_dl.adjoint() * &ch.w_dl
}

fn dl_interference(ch: &ChannelRealization, eff: &EffectiveChannels, gains: &CMat, j: usize) -> f64 {
    let (kappa, beta) = (ch.kappa, ch.beta);
    let all: f64 = gains.row(j).iter().map(|z| z.norm_sqr()).sum();
    let others = all - gains[(j, j)].norm_sqr();
    let p_tx = tx_power_per_antenna(&ch.w_dl);
    let tx_dist: f64 = eff.h_dl.column(j).iter().zip(p_tx.iter()).map(|(h, p)| h.norm_sqr() * p).sum();
    let ue_to_ue: f64 = (0..ch.num_ul()).map(|i| ch.g_ue[(i, j)].norm_sqr() * ch.q_ul[i]).sum();
    others + kappa * tx_dist + ue_to_ue * (kappa + beta + 1.0) + beta * all + ch.noise_var_ue
}

/// Interference-plus-noise variance of downlink user `j` (zero based).
pub fn interference_var_dl(ch: &ChannelRealization, x: &AntennaAssignment, j: usize) -> f64 {
    assert!(j < ch.num_dl(), "downlink user {j} out of range");
    let eff = effective_channels(ch, x);
    let gains = dl_gains(ch, &eff);
    dl_interference(ch, &eff, &gains, j)
}

/// MMSE receivers for the assignment. The uplink inverse only involves
/// antennas with `x_ul > ACTIVE_THRESHOLD`; filter rows of the others are zero.
pub fn mmse_filters(ch: &ChannelRealization, x: &AntennaAssignment) -> Result<ReceiveFilters> {
    let eff = effective_channels(ch, x);
    let c = total_ul_cov(ch, x, &eff);
    mmse_filters_from(ch, x, &eff, &c)
}

fn mmse_filters_from(
    ch: &ChannelRealization,
    x: &AntennaAssignment,
    eff: &EffectiveChannels,
    c: &CMat,
) -> Result<ReceiveFilters> {
    let active: Vec<usize> = (0..x.len()).filter(|&k| x.x_ul()[k] > ACTIVE_THRESHOLD).collect();
    let rhs = scale_cols(&eff.h_ul, &ch.q_ul.map(f64::sqrt));
    let r_ul = masked_hpd_solve(c, &active, &rhs)?;

    let gains = dl_gains(ch, eff);
    let r_dl = DVector::from_fn(ch.num_dl(), |j, _| {
        let a = gains[(j, j)];
        let psi = dl_interference(ch, eff, &gains, j);
        a / (a.norm_sqr() + psi)
    });
    Ok(ReceiveFilters { r_ul, r_dl })
}

fn ul_mse(q: f64, r: &CVec, h: &CVec, psi_quad: f64) -> f64 {
    let gain = (r.adjoint() * h)[(0, 0)] * q.sqrt();
    (gain - 1.0).norm_sqr() + psi_quad
}

fn quad_form(r: &CVec, m: &CMat) -> f64 {
    (r.adjoint() * m * r)[(0, 0)].re
}

/// `|sqrt(q_i) R_i^H H_i - 1|^2 + R_i^H Psi_i R_i` for any filter.
pub fn user_mse_ul(ch: &ChannelRealization, x: &AntennaAssignment, filters: &ReceiveFilters, i: usize) -> f64 {
    let psi = interference_cov_ul(ch, x, i);
    let eff_h: CVec = scale_rows(&ch.h_ul, x.x_ul()).column(i).into_owned();
    let r: CVec = filters.r_ul.column(i).into_owned();
    ul_mse(ch.q_ul[i], &r, &eff_h, quad_form(&r, &psi))
}

/// `|r_j^* H_j^H X^d W_j - 1|^2 + |r_j|^2 Psi_j` for any filter.
pub fn user_mse_dl(ch: &ChannelRealization, x: &AntennaAssignment, filters: &ReceiveFilters, j: usize) -> f64 {
    assert!(j < ch.num_dl(), "downlink user {j} out of range");
    let eff = effective_channels(ch, x);
    let gains = dl_gains(ch, &eff);
    let r = filters.r_dl[j];
    (r.conj() * gains[(j, j)] - 1.0).norm_sqr() + r.norm_sqr() * dl_interference(ch, &eff, &gains, j)
}

/// Per-user MSEs for arbitrary filters, sharing the covariance work across users.
pub fn user_mses(ch: &ChannelRealization, x: &AntennaAssignment, filters: &ReceiveFilters) -> (Vec<f64>, Vec<f64>) {
    let eff = effective_channels(ch, x);
    let c = total_ul_cov(ch, x, &eff);
    user_mses_from(ch, &eff, &c, filters)
}

fn user_mses_from(
    ch: &ChannelRealization,
    eff: &EffectiveChannels,
    c: &CMat,
    filters: &ReceiveFilters,
) -> (Vec<f64>, Vec<f64>) {
    let ul = (0..ch.num_ul())
        .map(|i| {
            let r: CVec = filters.r_ul.column(i).into_owned();
            let h: CVec = eff.h_ul.column(i).into_owned();
            let proj = (r.adjoint() * &h)[(0, 0)];
            // R^H Psi_i R = R^H C R - q_i |R^H H_i|^2
            let psi_quad = quad_form(&r, c) - ch.q_ul[i] * proj.norm_sqr();
            ul_mse(ch.q_ul[i], &r, &h, psi_quad)
        })
        .collect();
    let gains = dl_gains(ch, eff);
    let dl = (0..ch.num_dl())
        .map(|j| {
            let r: Complex64 = filters.r_dl[j];
            (r.conj() * gains[(j, j)] - 1.0).norm_sqr() + r.norm_sqr() * dl_interference(ch, eff, &gains, j)
        })
        .collect();
    (ul, dl)
}

/// Sum MSE of the assignment with the given (possibly stale) filters.
pub fn sum_mse_with_filters(ch: &ChannelRealization, x: &AntennaAssignment, filters: &ReceiveFilters) -> f64 {
    let (ul, dl) = user_mses(ch, x, filters);
    ul.iter().chain(&dl).sum()
}

/// Sum of `log2(1 / MSE)` over all users.
pub fn sum_spectral_efficiency(mse_ul: &[f64], mse_dl: &[f64]) -> Result<f64> {
    mse_ul
        .iter()
        .chain(mse_dl)
        .map(|&e| {
            if !(e > 0.0) || e > 1.0 + MSE_UPPER_SLACK {
                Err(Error::Contract(format!("MSE {e} outside (0, 1]")))
            } else {
                Ok(-e.min(1.0).log2())
            }
        })
        .sum()
}

/// MMSE receivers for `x` together with the resulting per-user MSEs.
pub fn evaluate(ch: &ChannelRealization, x: &AntennaAssignment) -> Result<(ReceiveFilters, MseReport)> {
    let eff = effective_channels(ch, x);
    let c = total_ul_cov(ch, x, &eff);
    let filters = mmse_filters_from(ch, x, &eff, &c)?;
    let (ul, dl) = user_mses_from(ch, &eff, &c, &filters);
    let report = MseReport::from_mses(ul, dl)?;
    Ok((filters, report))
}
