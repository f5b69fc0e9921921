//! Test-only oracles, written from the signal model rather than from the
//! library's internals.
#![allow(dead_code)]

use fdsplit::linalg::{cn01_matrix, CMat, CVec, RVec};
use fdsplit::{AntennaAssignment, ChannelRealization};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Unit-scale random instance with visible interference and distortion.
pub fn instance(m: usize, i: usize, j: usize, kappa: f64, beta: f64, seed: u64) -> ChannelRealization {
    let mut r = rng(seed);
    let q = RVec::from_fn(i, |_, _| 0.5 + r.random::<f64>());
    ChannelRealization {
        h_ul: cn01_matrix(m, i, &mut r),
        h_dl: cn01_matrix(m, j, &mut r),
        h_si: cn01_matrix(m, m, &mut r).scale(0.4),
        g_ue: cn01_matrix(i, j, &mut r).scale(0.3),
        q_ul: q,
        w_dl: cn01_matrix(m, j, &mut r).scale(0.5),
        noise_var_bs: 0.1 + 0.1 * r.random::<f64>(),
        noise_var_ue: 0.1 + 0.1 * r.random::<f64>(),
        kappa,
        beta,
    }
}

pub fn random_relaxed(m: usize, r: &mut ChaCha8Rng) -> AntennaAssignment {
    AntennaAssignment::relaxed(RVec::from_fn(m, |_, _| r.random::<f64>())).unwrap()
}

pub fn random_binary(m: usize, r: &mut ChaCha8Rng) -> AntennaAssignment {
    let bits: Vec<bool> = (0..m).map(|_| r.random::<bool>()).collect();
    AntennaAssignment::binary(&bits)
}

pub fn rel_frob(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn outer(u: &CVec, v: &CVec) -> CMat {
    u * v.adjoint()
}

fn diag_of(m: &CMat) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |r, c| if r == c { m[(r, c)] } else { Complex64::new(0.0, 0.0) })
}

fn x_matrices(x: &AntennaAssignment) -> (CMat, CMat) {
    let m = x.len();
    let xu = CMat::from_fn(m, m, |r, c| if r == c { Complex64::new(x.x_ul()[r], 0.0) } else { Complex64::new(0.0, 0.0) });
    let xd = CMat::identity(m, m) - &xu;
    (xu, xd)
}

/// Uplink interference-plus-noise covariance, summed term by term with
/// explicit diagonal masking matrices.
pub fn oracle_psi_ul(ch: &ChannelRealization, x: &AntennaAssignment, i: usize) -> CMat {
    let m = x.len();
    let (xu, xd) = x_matrices(x);
    let hs = &xu * &ch.h_si * &xd;
    let ht: Vec<CVec> = (0..ch.q_ul.len()).map(|l| &xu * ch.h_ul.column(l)).collect();
    let mut psi = CMat::zeros(m, m);
    for (l, h) in ht.iter().enumerate() {
        let hh = outer(h, h).scale(ch.q_ul[l]);
        if l != i {
            psi += &hh;
        }
        psi += hh.scale(ch.kappa);
        psi += diag_of(&hh).scale(ch.beta);
    }
    for j in 0..ch.w_dl.ncols() {
        let w: CVec = ch.w_dl.column(j).into_owned();
        let ww = outer(&w, &w);
        psi += &hs * (&ww + diag_of(&ww).scale(ch.kappa)) * hs.adjoint();
        psi += diag_of(&(&hs * &ww * hs.adjoint())).scale(ch.beta);
    }
    psi + xu.scale(ch.noise_var_bs)
}

/// Downlink interference-plus-noise variance of user `j`.
pub fn oracle_psi_dl(ch: &ChannelRealization, x: &AntennaAssignment, j: usize) -> f64 {
    let (_, xd) = x_matrices(x);
    let h: CVec = &xd * ch.h_dl.column(j);
    let mut psi = 0.0;
    for n in 0..ch.w_dl.ncols() {
        let w: CVec = ch.w_dl.column(n).into_owned();
        let g = (h.adjoint() * &w)[(0, 0)].norm_sqr();
        if n != j {
            psi += g;
        }
        psi += ch.beta * g;
        let ww = outer(&w, &w);
        psi += ch.kappa * (h.adjoint() * diag_of(&ww) * &h)[(0, 0)].re;
    }
    for i in 0..ch.q_ul.len() {
        psi += ch.g_ue[(i, j)].norm_sqr() * ch.q_ul[i] * (ch.kappa + ch.beta + 1.0);
    }
    psi + ch.noise_var_ue
}

/// Sample mean and its standard error of `|r^H y - s|^2`, drawing every
/// symbol, distortion and noise term of the received signals. `x` must be
/// binary so that masking a noise vector and scaling its variance agree.
pub struct McEstimate {
    pub mean_ul: Vec<f64>,
    pub se_ul: Vec<f64>,
    pub mean_dl: Vec<f64>,
    pub se_dl: Vec<f64>,
}

fn cn(r: &mut ChaCha8Rng, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let (a, b): (f64, f64) = (r.sample(rand_distr::StandardNormal), r.sample(rand_distr::StandardNormal));
    Complex64::new(a * s, b * s)
}

fn qpsk(r: &mut ChaCha8Rng) -> Complex64 {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Complex64::new(if r.random() { h } else { -h }, if r.random() { h } else { -h })
}

pub fn monte_carlo(
    ch: &ChannelRealization,
    x: &AntennaAssignment,
    r_ul: &CMat,
    r_dl: &CVec,
    samples: usize,
    seed: u64,
) -> McEstimate {
    assert!(x.is_binary());
    let (m, ni, nj) = (x.len(), ch.q_ul.len(), ch.w_dl.ncols());
    let (xu, xd) = x_matrices(x);
    let hu = &xu * &ch.h_ul;
    let hd = &xd * &ch.h_dl;
    let hs = &xu * &ch.h_si * &xd;
    let w = &ch.w_dl;
    let p_ant: Vec<f64> = (0..m).map(|k| w.row(k).iter().map(|z| z.norm_sqr()).sum()).collect();
    // receiver distortion variances are fixed by the signal statistics
    let si_w = &hs * w;
    let rx_var_bs: Vec<f64> = (0..m)
        .map(|k| {
            let users: f64 = (0..ni).map(|l| ch.q_ul[l] * hu[(k, l)].norm_sqr()).sum();
            let si: f64 = si_w.row(k).iter().map(|z| z.norm_sqr()).sum();
            ch.beta * (users + si)
        })
        .collect();
    let gains = hd.adjoint() * w;
    let rx_var_ue: Vec<f64> = (0..nj)
        .map(|j| {
            let bs: f64 = gains.row(j).iter().map(|z| z.norm_sqr()).sum();
            let ue: f64 = (0..ni).map(|i| ch.g_ue[(i, j)].norm_sqr() * ch.q_ul[i]).sum();
            ch.beta * (bs + ue)
        })
        .collect();

    let mut r = rng(seed);
    let mut acc_ul = vec![(0.0, 0.0); ni];
    let mut acc_dl = vec![(0.0, 0.0); nj];
    let mut s_ul = vec![Complex64::default(); ni];
    let mut c_ul = vec![Complex64::default(); ni];
    let mut s_dl = vec![Complex64::default(); nj];
    let mut tx = vec![Complex64::default(); m];
    let mut y = vec![Complex64::default(); m];
    for _ in 0..samples {
        for i in 0..ni {
            s_ul[i] = qpsk(&mut r);
            c_ul[i] = cn(&mut r, ch.kappa * ch.q_ul[i]);
        }
        for s in s_dl.iter_mut() {
            *s = qpsk(&mut r);
        }
        // base station transmit vector: beamformed symbols plus distortion
        for k in 0..m {
            let mut v = cn(&mut r, ch.kappa * p_ant[k]);
            for n in 0..nj {
                v += w[(k, n)] * s_dl[n];
            }
            tx[k] = v;
        }
        for k in 0..m {
            let mut v = Complex64::default();
            for l in 0..ni {
                v += hu[(k, l)] * (ch.q_ul[l].sqrt() * s_ul[l] + c_ul[l]);
            }
            for n in 0..m {
                v += hs[(k, n)] * tx[n];
            }
            if x.x_ul()[k] > 0.0 {
                v += cn(&mut r, ch.noise_var_bs) + cn(&mut r, rx_var_bs[k]);
            }
            y[k] = v;
        }
        for i in 0..ni {
            let mut est = Complex64::default();
            for k in 0..m {
                est += r_ul[(k, i)].conj() * y[k];
            }
            let e = (est - s_ul[i]).norm_sqr();
            acc_ul[i].0 += e;
            acc_ul[i].1 += e * e;
        }
        for j in 0..nj {
            let mut v = Complex64::default();
            for k in 0..m {
                v += hd[(k, j)].conj() * tx[k];
            }
            for i in 0..ni {
                v += ch.g_ue[(i, j)] * (ch.q_ul[i].sqrt() * s_ul[i] + c_ul[i]);
            }
            v += cn(&mut r, ch.noise_var_ue) + cn(&mut r, rx_var_ue[j]);
            let e = (r_dl[j].conj() * v - s_dl[j]).norm_sqr();
            acc_dl[j].0 += e;
            acc_dl[j].1 += e * e;
        }
    }
    let n = samples as f64;
    let stats = |acc: &[(f64, f64)]| -> (Vec<f64>, Vec<f64>) {
        acc.iter()
            .map(|&(s, s2)| {
                let mean = s / n;
                let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
                (mean, (var / n).sqrt())
            })
            .unzip()
    };
    let (mean_ul, se_ul) = stats(&acc_ul);
    let (mean_dl, se_dl) = stats(&acc_dl);
    McEstimate { mean_ul, se_ul, mean_dl, se_dl }
}

/// Minimizes `|sqrt(q) r^H h - 1|^2 + r^H Psi r` by steepest descent with
/// exact line search; returns the minimum value.
pub fn brute_force_ul_mse(q: f64, h: &CVec, psi: &CMat) -> f64 {
    let m = h.len();
    // E(r) = r^H A r - 2 Re(r^H b) + 1 with A = q h h^H + Psi, b = sqrt(q) h
    let a = outer(h, h).scale(q) + psi;
    let b = h.scale(q.sqrt());
    let value = |r: &CVec| (r.adjoint() * &a * r)[(0, 0)].re - 2.0 * (r.adjoint() * &b)[(0, 0)].re + 1.0;
    let mut r = CVec::zeros(m);
    for _ in 0..200_000 {
        let g = &a * &r - &b;
        let gg = g.norm_squared();
        if gg < 1e-30 {
            break;
        }
        let curv = (g.adjoint() * &a * &g)[(0, 0)].re;
        r -= g.scale(gg / curv);
    }
    value(&r)
}
