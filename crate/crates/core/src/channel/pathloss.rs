//! Pico-cell large-scale propagation (3GPP TR 36.828, Table 6.2-1, pico to UE).
//!
//! | quantity              | value                                                      |
//! |-----------------------|------------------------------------------------------------|
//! | LOS path loss         | `103.8 + 20.9 log10(R)` dB, R in km                        |
//! | NLOS path loss        | `145.4 + 37.5 log10(R)` dB, R in km                        |
//! | LOS probability       | `0.5 - min(0.5, 5 e^{-0.156/R}) + min(0.5, 5 e^{-R/0.03})` |
//! | shadowing std (LOS)   | 3 dB                                                       |
//! | shadowing std (NLOS)  | 4 dB                                                       |
//!
//! Reference point: at R = 100 m the LOS loss is 82.9 dB and the NLOS loss 107.9 dB.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const LOS_INTERCEPT_DB: f64 = 103.8;
pub const LOS_SLOPE_DB: f64 = 20.9;
pub const NLOS_INTERCEPT_DB: f64 = 145.4;
pub const NLOS_SLOPE_DB: f64 = 37.5;
pub const SHADOWING_LOS_DB: f64 = 3.0;
pub const SHADOWING_NLOS_DB: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Los,
    Nlos,
}

/// How the LOS/NLOS state of a link is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LosMode {
    /// Drawn from the distance-dependent LOS probability.
    #[default]
    Random,
    Forced(Propagation),
}

/// Probability that a link of length `distance_m` is line of sight.
pub fn los_probability(distance_m: f64) -> f64 {
    let r_km = distance_m / 1000.0;
    0.5 - f64::min(0.5, 5.0 * (-0.156 / r_km).exp()) + f64::min(0.5, 5.0 * (-r_km / 0.03).exp())
}

/// Distance-dependent path loss in dB.
pub fn path_loss_db(distance_m: f64, prop: Propagation) -> f64 {
    let lg = (distance_m / 1000.0).log10();
    match prop {
        Propagation::Los => LOS_INTERCEPT_DB + LOS_SLOPE_DB * lg,
        Propagation::Nlos => NLOS_INTERCEPT_DB + NLOS_SLOPE_DB * lg,
    }
}

pub fn shadowing_std_db(prop: Propagation) -> f64 {
    match prop {
        Propagation::Los => SHADOWING_LOS_DB,
        Propagation::Nlos => SHADOWING_NLOS_DB,
    }
}

/// Large-scale gain model of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    pub los: LosMode,
    pub shadowing: bool,
}

impl Default for LinkModel {
    fn default() -> Self {
        Self { los: LosMode::Random, shadowing: true }
    }
}

impl LinkModel {
    /// Linear power gain `10^(-(PL + S)/10)` of a link of length `distance_m`.
    ///
    /// Always consumes one uniform and one normal variate, so the random stream
    /// stays aligned whatever the options.
    pub fn gain<R: Rng + ?Sized>(&self, distance_m: f64, rng: &mut R) -> Result<f64> {
        if !(distance_m > 0.0) || !distance_m.is_finite() {
            return Err(Error::Domain(format!("link distance must be positive, got {distance_m}")));
        }
        let u: f64 = rng.random();
        let z: f64 = rng.sample(StandardNormal);
        let prop = match self.los {
            LosMode::Random if u < los_probability(distance_m) => Propagation::Los,
            LosMode::Random => Propagation::Nlos,
            LosMode::Forced(p) => p,
        };
        let shadow = if self.shadowing { z * shadowing_std_db(prop) } else { 0.0 };
        Ok(10f64.powf(-(path_loss_db(distance_m, prop) + shadow) / 10.0))
    }
}

/// Gain of a link under the default model (random LOS state, shadowing on).
pub fn link_gain<R: Rng + ?Sized>(distance_m: f64, rng: &mut R) -> Result<f64> {
    LinkModel::default().gain(distance_m, rng)
}
