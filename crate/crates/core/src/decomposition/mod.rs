//! Sum MSE as an explicit function of the uplink indicator.
//!
//! With the receive filters held fixed, the sum MSE splits into
//!
//! * `f^u(x)   = x^T Lambda^u x - 2 A^u . x` (uplink signal, multi-user and noise terms),
//! * `f^d(x_d) = x_d^T Lambda^d x_d - 2 A^d . x_d` (downlink terms),
//! * `f^{u,d}` the self-interference term, quadratic in `X^u` and in `X^d` jointly,
//!
//! plus a constant. [`build_linearized`] replaces `f^{u,d}` by its tangent at an
//! anchor point and folds everything into one quadratic `x^T Lambda x - 2 B . x`.

use num_complex::Complex64;

use crate::channel::ChannelRealization;
use crate::linalg::{gram, hermitian_part, rel_frobenius_err, scale_cols, scale_rows, CMat, RMat, RVec};
use crate::mse::{tx_power_per_antenna, AntennaAssignment, ReceiveFilters};

pub mod identities;
pub use identities::{identity_suite, IdentityCheck};

/// Matrices and vectors of the quadratic/biquadratic split, built from one
/// set of receive filters.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionTerms {
    pub lambda_ul: CMat,
    pub lambda_dl: CMat,
    pub a_ul: RVec,
    pub a_dl: RVec,
    /// `sum_j W_j W_j^H`.
    pub sigma_dl: CMat,
    /// `Sigma^d + kappa diag(Sigma^d)`.
    pub w_mat: CMat,
    /// `sum_i R_i R_i^H`.
    pub r_mat: CMat,
    /// Uplink filters the terms were built from (factor of `r_mat`).
    pub r_ul: CMat,
    /// `sum_l q_l {(kappa + 1) H_l H_l^H + beta diag(H_l H_l^H)}`.
    pub gamma_ul: CMat,
    /// `sum_j |r_j|^2 {(beta + 1) H_j H_j^H + kappa diag(H_j H_j^H)}`, shared by all beamformers.
    pub theta_dl: CMat,
}

/// `sum_n diag(v_n^*) M diag(v_n)` over the columns `v_n` of `v`.
fn diag_sandwich_sum(m: &CMat, v: &CMat) -> CMat {
    let n = m.nrows();
    let mut out = CMat::zeros(n, n);
    for col in v.column_iter() {
        for l in 0..n {
            for k in 0..n {
                out[(k, l)] += col[k].conj() * m[(k, l)] * col[l];
            }
        }
    }
    out
}

/// Weighted `sum w (1+a) h h^H + b diag(h h^H)` over the columns of `h`.
fn gram_with_diag(h: &CMat, weights: &RVec, full: f64, diag: f64) -> CMat {
    let hw = scale_cols(h, &weights.map(f64::sqrt));
    let g = gram(&hw);
    let mut out = g.scale(full);
    for k in 0..out.nrows() {
        out[(k, k)] += g[(k, k)] * diag;
    }
    out
}

pub fn build_quadratic_terms(ch: &ChannelRealization, filters: &ReceiveFilters) -> DecompositionTerms {
    let m = ch.num_antennas();
    let (kappa, beta) = (ch.kappa, ch.beta);
    let r_ul = &filters.r_ul;

    let gamma_ul = gram_with_diag(&ch.h_ul, &ch.q_ul, 1.0 + kappa, beta);
    let lambda_ul = diag_sandwich_sum(&gamma_ul, r_ul);
    let a_ul = RVec::from_fn(m, |k, _| {
        (0..ch.num_ul())
            .map(|i| {
                let r = r_ul[(k, i)];
                ch.q_ul[i].sqrt() * (r.conj() * ch.h_ul[(k, i)]).re - 0.5 * ch.noise_var_bs * r.norm_sqr()
            })
            .sum()
    });

    let r_dl_pow = filters.r_dl.map(|r| r.norm_sqr());
    let theta_dl = gram_with_diag(&ch.h_dl, &r_dl_pow, 1.0 + beta, kappa);
    let lambda_dl = diag_sandwich_sum(&theta_dl, &ch.w_dl);
    let a_dl = RVec::from_fn(m, |k, _| {
        (0..ch.num_dl())
            .map(|j| (filters.r_dl[j].conj() * ch.h_dl[(k, j)].conj() * ch.w_dl[(k, j)]).re)
            .sum()
    });

    let sigma_dl = gram(&ch.w_dl);
    let mut w_mat = sigma_dl.clone();
    for k in 0..m {
        w_mat[(k, k)] += sigma_dl[(k, k)] * kappa;
    }
    let r_mat = gram(r_ul);

    DecompositionTerms { lambda_ul, lambda_dl, a_ul, a_dl, sigma_dl, w_mat, r_mat, r_ul: r_ul.clone(), gamma_ul, theta_dl }
}

/// `x^T M x` for real `x` and Hermitian `M`.
pub fn real_quadratic(m: &CMat, x: &RVec) -> f64 {
    let mut acc = 0.0;
    for l in 0..x.len() {
        for k in 0..x.len() {
            acc += x[k] * m[(k, l)].re * x[l];
        }
    }
    acc
}

/// `f^u` evaluated at the uplink indicator.
pub fn f_ul_value(x_ul: &RVec, terms: &DecompositionTerms) -> f64 {
    real_quadratic(&terms.lambda_ul, x_ul) - 2.0 * terms.a_ul.dot(x_ul)
}

/// `f^d` evaluated at the downlink indicator.
pub fn f_dl_value(x_dl: &RVec, terms: &DecompositionTerms) -> f64 {
    real_quadratic(&terms.lambda_dl, x_dl) - 2.0 * terms.a_dl.dot(x_dl)
}

/// Self-interference term
/// `Tr{X^u H X^d W^d X^d H^H X^u R^u} + beta Tr{X^u H X^d Sigma^d X^d H^H X^u diag(R^u)}`.
pub fn f_ud_value(x: &AntennaAssignment, terms: &DecompositionTerms, ch: &ChannelRealization) -> f64 {
    let s = scale_cols(&scale_rows(&ch.h_si, x.x_ul()), &x.x_dl());
    let pw = &s * &terms.w_mat * s.adjoint();
    let ps = &s * &terms.sigma_dl * s.adjoint();
    let mut acc = crate::linalg::trace_of_product(&pw, &terms.r_mat).re;
    for k in 0..x.len() {
        acc += ch.beta * ps[(k, k)].re * terms.r_mat[(k, k)].re;
    }
    acc
}

/// `f^u(x) + f^d(1 - x) + f^{u,d}(x)`: the sum MSE up to a filter-dependent constant.
pub fn decomposed_objective(x: &AntennaAssignment, terms: &DecompositionTerms, ch: &ChannelRealization) -> f64 {
    f_ul_value(x.x_ul(), terms) + f_dl_value(&x.x_dl(), terms) + f_ud_value(x, terms, ch)
}

/// Matrix gradient of `f^{u,d}` with respect to `X^u`, eight summands, using
/// the non-conjugate convention `[grad]_{kl} = d f / d X_{kl}`.
pub fn grad_f_ud(x: &AntennaAssignment, terms: &DecompositionTerms, ch: &ChannelRealization) -> CMat {
    let m = x.len();
    let xu = CMat::from_diagonal(&x.x_ul().map(|v| Complex64::new(v, 0.0)));
    let xd = CMat::from_diagonal(&x.x_dl().map(|v| Complex64::new(v, 0.0)));
    let h_t = ch.h_si.transpose();
    let h_c = ch.h_si.conjugate();
    let r_t = terms.r_mat.transpose();
    let w_t = terms.w_mat.transpose();
    let s_t = terms.sigma_dl.transpose();
    let b = CMat::from_diagonal(&terms.r_mat.diagonal().map(|z| z * ch.beta));

    // shared chains
    let hc_d_wt_d_ht = &h_c * &xd * &w_t * &xd * &h_t;
    let hc_d_st_d_ht = &h_c * &xd * &s_t * &xd * &h_t;
    let ht_x_rt_x_hc = &h_t * &xu * &r_t * &xu * &h_c;
    let ht_x_b_x_hc = &h_t * &xu * &b * &xu * &h_c;

    let positive = &r_t * &xu * &hc_d_wt_d_ht
        + &hc_d_wt_d_ht * &xu * &r_t
        + &b * &xu * &hc_d_st_d_ht
        + &hc_d_st_d_ht * &xu * &b;
    let negative = &ht_x_rt_x_hc * &xd * &w_t
        + &w_t * &xd * &ht_x_rt_x_hc
        + &ht_x_b_x_hc * &xd * &s_t
        + &s_t * &xd * &ht_x_b_x_hc;
    debug_assert_eq!(positive.shape(), (m, m));
    positive - negative
}

/// Real part of the diagonal of a gradient matrix.
pub fn gradient_diagonal(grad: &CMat) -> RVec {
    RVec::from_fn(grad.nrows(), |k, _| grad[(k, k)].re)
}

/// `Re diag` of [`grad_f_ud`] without forming the full matrix; this is the
/// only part the linearization needs. `R^u` and `Sigma^d` are used through
/// their rank-`I` and rank-`J` factors, so the cost is `O(M^2 (I + J))`.
pub fn grad_f_ud_diag(x: &AntennaAssignment, terms: &DecompositionTerms, ch: &ChannelRealization) -> RVec {
    let m = x.len();
    let xu = x.x_ul();
    let xd = x.x_dl();
    let (kappa, beta) = (ch.kappa, ch.beta);
    let r = &terms.r_ul;
    let w = &ch.w_dl;
    let p_tx = tx_power_per_antenna(w);
    let r_diag = RVec::from_fn(m, |k, _| r.row(k).iter().map(|z| z.norm_sqr()).sum());

    // G D W^d D G^H X R^u = A (A^H X R) + kappa U (U^H X R), A = G D W, U = G D P^{1/2}
    let gd = scale_cols(&ch.h_si, &xd);
    let a = &gd * w;
    let u = scale_cols(&gd, &p_tx.map(f64::sqrt));
    let xr = scale_rows(r, xu);
    let s_xr = &a * (a.adjoint() * &xr) + (&u * (u.adjoint() * &xr)).scale(kappa);

    // G^H X R^u X G = Y Y^H with Y = G^H X R
    let y = ch.h_si.adjoint() * &xr;
    let wwy = w * (w.adjoint() * scale_rows(&y, &xd));

    // G^H X diag(beta R^u) X G = Z^H Z
    let z = scale_rows(&ch.h_si, &RVec::from_fn(m, |k, _| xu[k] * (beta * r_diag[k]).sqrt()));
    let wwz = w * (&z * scale_rows(w, &xd)).adjoint();

    RVec::from_fn(m, |k, _| {
        let mut up = Complex64::new(0.0, 0.0);
        let mut down = Complex64::new(0.0, 0.0);
        for i in 0..r.ncols() {
            up += s_xr[(k, i)] * r[(k, i)].conj();
            down += wwy[(k, i)] * y[(k, i)].conj();
        }
        let a_k: f64 = a.row(k).iter().map(|v| v.norm_sqr()).sum();
        let y_k: f64 = y.row(k).iter().map(|v| v.norm_sqr()).sum();
        let mut acc = up.re + beta * a_k * xu[k] * r_diag[k] - down.re - kappa * p_tx[k] * xd[k] * y_k;
        for n in 0..m {
            acc -= (wwz[(k, n)] * z[(n, k)]).re;
        }
        2.0 * acc
    })
}

/// Quadratic model `x^T Lambda x - 2 B . x` of the sum MSE around an anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizedObjective {
    /// `Lambda^u + Lambda^d`, Hermitian.
    pub lambda_total: CMat,
    pub b_vec: RVec,
    pub anchor: RVec,
    /// Relative size of the anti-Hermitian part removed from `lambda_total`.
    pub symmetrization_residual: f64,
}

impl LinearizedObjective {
    /// Real symmetric matrix of the quadratic form on real vectors.
    pub fn quadratic(&self) -> RMat {
        self.lambda_total.map(|z| z.re)
    }

    pub fn value(&self, x: &RVec) -> f64 {
        real_quadratic(&self.lambda_total, x) - 2.0 * self.b_vec.dot(x)
    }
}

pub fn build_linearized(
    anchor: &AntennaAssignment,
    terms: &DecompositionTerms,
    ch: &ChannelRealization,
) -> LinearizedObjective {
    let grad = grad_f_ud_diag(anchor, terms, ch);
    linearize_with_gradient(anchor, terms, &grad)
}

/// Same as [`build_linearized`] with a precomputed gradient diagonal.
pub fn linearize_with_gradient(anchor: &AntennaAssignment, terms: &DecompositionTerms, grad_diag: &RVec) -> LinearizedObjective {
    let raw = &terms.lambda_ul + &terms.lambda_dl;
    let lambda_total = hermitian_part(&raw);
    let symmetrization_residual = rel_frobenius_err(&raw, &lambda_total);
    let m = anchor.len();
    let lambda_dl = hermitian_part(&terms.lambda_dl);
    let b_vec = RVec::from_fn(m, |k, _| {
        let row_sum: f64 = (0..m).map(|l| lambda_dl[(k, l)].re).sum();
        terms.a_ul[k] + row_sum - terms.a_dl[k] - 0.5 * grad_diag[k]
    });
    LinearizedObjective { lambda_total, b_vec, anchor: anchor.x_ul().clone(), symmetrization_residual }
}
