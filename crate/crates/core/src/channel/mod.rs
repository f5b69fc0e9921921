//! Scenario realizations: user geometry, large-scale gains, small-scale
//! fading, the Rician self-interference channel, uplink powers and the fixed
//! random downlink beamformers.
//!
//! Every link is `sqrt(large-scale gain) x CN(0, 1)`: the small-scale term has
//! zero mean and unit variance and the pico-cell path loss plus shadowing sets
//! its power.

pub mod pathloss;

use std::hash::Hasher;

use rand::Rng;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::{cn01, cn01_matrix, CMat, RVec};
use crate::rng;

pub use pathloss::{link_gain, LinkModel, LosMode, Propagation};

/// A node position in meters; the base station sits at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// User positions of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub ul: Vec<Point>,
    pub dl: Vec<Point>,
}

/// Places `I + J` users uniformly in the cell disc, no closer than
/// `min_distance` to the base station (closer draws are pushed out radially).
pub fn draw_positions<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Layout {
    let mut place = || {
        let u: f64 = rng.random();
        let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let r = (cfg.cell_radius * u.sqrt()).max(cfg.min_distance);
        Point { x: r * theta.cos(), y: r * theta.sin() }
    };
    let ul = (0..cfg.num_ul).map(|_| place()).collect();
    let dl = (0..cfg.num_dl).map(|_| place()).collect();
    Layout { ul, dl }
}

/// One Monte Carlo draw of every channel and transmit parameter.
///
/// Dimensions: `h_ul` is M x I, `h_dl` M x J, `h_si` M x M, `g_ue` I x J,
/// `w_dl` M x J. Powers and noise variances are in watts.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_ul: CMat,
    pub h_dl: CMat,
    pub h_si: CMat,
    pub g_ue: CMat,
    pub q_ul: RVec,
    pub w_dl: CMat,
    pub noise_var_bs: f64,
    pub noise_var_ue: f64,
    /// Transmitter distortion level (linear).
    pub kappa: f64,
    /// Receiver distortion level (linear).
    pub beta: f64,
}

impl ChannelRealization {
    pub fn num_antennas(&self) -> usize {
        self.h_ul.nrows()
    }

    pub fn num_ul(&self) -> usize {
        self.h_ul.ncols()
    }

    pub fn num_dl(&self) -> usize {
        self.h_dl.ncols()
    }

    /// Checks dimensional consistency and finiteness.
    pub fn validate(&self) -> Result<()> {
        let m = self.num_antennas();
        let (i, j) = (self.num_ul(), self.num_dl());
        let dims_ok = self.h_dl.nrows() == m
            && self.h_si.shape() == (m, m)
            && self.g_ue.shape() == (i, j)
            && self.q_ul.len() == i
            && self.w_dl.shape() == (m, j);
        if !dims_ok {
            return Err(Error::Contract("channel realization dimensions are inconsistent".into()));
        }
        let finite = [&self.h_ul, &self.h_dl, &self.h_si, &self.g_ue, &self.w_dl]
            .iter()
            .all(|mat| mat.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
            && self.q_ul.iter().all(|q| q.is_finite() && *q >= 0.0);
        if !finite {
            return Err(Error::Contract("channel realization has non-finite entries".into()));
        }
        if !(self.noise_var_bs > 0.0 && self.noise_var_ue > 0.0) {
            return Err(Error::Contract("noise variances must be positive".into()));
        }
        Ok(())
    }

    /// Hash of every stored number, used to prove that methods compared at one
    /// sweep point saw the same draw.
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::default();
        for mat in [&self.h_ul, &self.h_dl, &self.h_si, &self.g_ue, &self.w_dl] {
            h.write_usize(mat.nrows());
            h.write_usize(mat.ncols());
            for z in mat.iter() {
                h.write_u64(z.re.to_bits());
                h.write_u64(z.im.to_bits());
            }
        }
        for q in self.q_ul.iter() {
            h.write_u64(q.to_bits());
        }
        for v in [self.noise_var_bs, self.noise_var_ue, self.kappa, self.beta] {
            h.write_u64(v.to_bits());
        }
        h.finish()
    }
}

#[derive(Default)]
struct Fnv1a(u64);

impl Hasher for Fnv1a {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        if self.0 == 0 {
            self.0 = 0xcbf2_9ce4_8422_2325;
        }
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// Knobs of the channel generator. The defaults are the reference scenario;
/// the others exist for limit cases and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub link: LinkModel,
    /// When false the small-scale term is replaced by 1.
    pub small_scale_fading: bool,
}

impl Default for ChannelModel {
    fn default() -> Self {
        Self { link: LinkModel::default(), small_scale_fading: true }
    }
}

impl ChannelModel {
    fn fading<R: Rng + ?Sized>(&self, rng: &mut R) -> num_complex::Complex64 {
        let z = cn01(rng);
        if self.small_scale_fading {
            z
        } else {
            crate::linalg::ONE
        }
    }

    pub fn draw_channels<R: Rng + ?Sized>(
        &self,
        cfg: &SystemConfig,
        layout: &Layout,
        rng: &mut R,
    ) -> Result<ChannelRealization> {
        let m = cfg.num_antennas;
        let origin = Point { x: 0.0, y: 0.0 };
        let bs_link = |users: &[Point], rng: &mut R| -> Result<CMat> {
            let mut h = CMat::zeros(m, users.len());
            for (c, p) in users.iter().enumerate() {
                let amp = self.link.gain(p.distance(&origin).max(cfg.min_distance), rng)?.sqrt();
                for r in 0..m {
                    h[(r, c)] = self.fading(rng) * amp;
                }
            }
            Ok(h)
        };
        let h_ul = bs_link(&layout.ul, rng)?;
        let h_dl = bs_link(&layout.dl, rng)?;

        let mut g_ue = CMat::zeros(layout.ul.len(), layout.dl.len());
        for (i, pu) in layout.ul.iter().enumerate() {
            for (j, pd) in layout.dl.iter().enumerate() {
                let amp = self.link.gain(pu.distance(pd).max(cfg.min_distance), rng)?.sqrt();
                g_ue[(i, j)] = self.fading(rng) * amp;
            }
        }

        let h_si = draw_si_channel(cfg, rng);
        let w_dl = draw_beamformers(cfg, rng);
        let ch = ChannelRealization {
            h_ul,
            h_dl,
            h_si,
            g_ue,
            q_ul: RVec::from_element(layout.ul.len(), cfg.p_ul_watts()),
            w_dl,
            noise_var_bs: cfg.noise_bs_watts(),
            noise_var_ue: cfg.noise_ue_watts(),
            kappa: cfg.kappa(),
            beta: cfg.beta(),
        };
        ch.validate()?;
        Ok(ch)
    }
}

/// Draws every channel of one drop with the reference model.
pub fn draw_channels<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    layout: &Layout,
    rng: &mut R,
) -> Result<ChannelRealization> {
    ChannelModel::default().draw_channels(cfg, layout, rng)
}

/// Rician self-interference channel: every entry is
/// `sqrt(s K/(1+K)) + sqrt(s/(1+K)) CN(0,1)` with `s` the residual SI level.
pub fn draw_si_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> CMat {
    let s = cfg.sigma_si2();
    let k = cfg.rician_k;
    let (mean, std) = if k.is_infinite() {
        (s.sqrt(), 0.0)
    } else {
        ((s * k / (1.0 + k)).sqrt(), (s / (1.0 + k)).sqrt())
    };
    let m = cfg.num_antennas;
    cn01_matrix(m, m, rng).map(|z| z * std + mean)
}

/// Random downlink beamformers normalized to the base station sum power.
pub fn draw_beamformers<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> CMat {
    let w = cn01_matrix(cfg.num_antennas, cfg.num_dl, rng);
    let power: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    w.scale((cfg.p_dl_watts() / power).sqrt())
}

/// Draws the whole realization identified by `seed`.
pub fn draw_realization(cfg: &SystemConfig, seed: u64) -> Result<ChannelRealization> {
    let mut rng = rng::stream(seed, rng::STREAM_CHANNEL);
    let layout = draw_positions(cfg, &mut rng);
    draw_channels(cfg, &layout, &mut rng)
}
