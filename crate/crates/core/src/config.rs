//! Scenario and algorithm constants.
//!
//! Quantities quoted in dB or dBm are stored in those units and converted to
//! linear values by the accessors; everything downstream works in watts and
//! linear ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// How the selected relaxed point is turned into a binary split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    /// Per-coordinate threshold at 0.5, ties to uplink, degenerate result repaired.
    Threshold,
    /// Best (by sum MSE) of the `M - 1` non-degenerate threshold roundings
    /// obtained by sorting the relaxed coordinates.
    #[default]
    Sweep,
}

/// All scenario and optimizer constants of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    /// Antennas at the base station (M).
    pub num_antennas: usize,
    /// Uplink users (I).
    pub num_ul: usize,
    /// Downlink users (J).
    pub num_dl: usize,
    /// Cell radius in meters.
    pub cell_radius: f64,
    /// Minimum distance between any two nodes, meters.
    pub min_distance: f64,
    /// Carrier frequency in Hz.
    pub carrier_freq: f64,
    /// System bandwidth in Hz.
    pub bandwidth: f64,
    /// Thermal noise density, dBm/Hz.
    pub noise_psd: f64,
    pub noise_figure_bs: f64,
    pub noise_figure_ue: f64,
    /// Transmitter distortion level (kappa), dB.
    pub tx_distortion_db: f64,
    /// Receiver distortion level (beta), dB.
    pub rx_distortion_db: f64,
    /// Residual self-interference level after cancellation, dB.
    pub si_cancellation_db: f64,
    /// Rician factor of the self-interference channel. `inf` gives a pure LOS channel.
    pub rician_k: f64,
    /// Base station sum transmit power, dBm.
    pub p_dl_max: f64,
    /// Uplink user transmit power, dBm.
    pub p_ul_max: f64,
    /// Convergence tolerance on the successive-iterate distance.
    pub epsilon: f64,
    /// Proximal weight.
    pub alpha: f64,
    /// Step size in (0, 1].
    pub rho: f64,
    /// Random restarts per solve.
    pub num_restarts: usize,
    /// Iteration cap for one restart.
    pub max_iters: usize,
    pub rounding: Rounding,
    /// Drop the all-UL and all-DL assignments from exhaustive search.
    pub exh_exclude_degenerate: bool,
    pub seed: u64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            num_antennas: 8,
            num_ul: 4,
            num_dl: 4,
            cell_radius: 40.0,
            min_distance: 3.0,
            carrier_freq: 2.0e9,
            bandwidth: 10.0e6,
            noise_psd: -174.4,
            noise_figure_bs: 13.0,
            noise_figure_ue: 9.0,
            tx_distortion_db: -120.0,
            rx_distortion_db: -120.0,
            si_cancellation_db: -100.0,
            rician_k: 1.0,
            p_dl_max: 30.0,
            p_ul_max: 23.0,
            epsilon: 1e-3,
            alpha: 1.0,
            rho: 0.9,
            num_restarts: 20,
            max_iters: 500,
            rounding: Rounding::Sweep,
            exh_exclude_degenerate: false,
            seed: 1,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.num_antennas < 2 {
            return fail(format!("num_antennas must be >= 2, got {}", self.num_antennas));
        }
        if self.num_ul < 1 || self.num_dl < 1 {
            return fail("num_ul and num_dl must be >= 1".into());
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return fail(format!("rho must lie in (0, 1], got {}", self.rho));
        }
        if !(self.alpha > 0.0) || !(self.epsilon > 0.0) {
            return fail("alpha and epsilon must be positive".into());
        }
        if self.num_restarts < 1 || self.max_iters < 1 {
            return fail("num_restarts and max_iters must be >= 1".into());
        }
        if !(self.cell_radius >= 0.0) || !(self.min_distance > 0.0) {
            return fail("cell_radius must be >= 0 and min_distance > 0".into());
        }
        if !(self.rician_k >= 0.0) {
            return fail("rician_k must be >= 0".into());
        }
        if !(self.bandwidth > 0.0 && self.carrier_freq > 0.0) {
            return fail("bandwidth and carrier_freq must be positive".into());
        }
        let finite = [
            self.noise_psd,
            self.noise_figure_bs,
            self.noise_figure_ue,
            self.tx_distortion_db,
            self.rx_distortion_db,
            self.si_cancellation_db,
            self.p_dl_max,
            self.p_ul_max,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("dB quantities must be finite".into());
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        db_to_linear(self.tx_distortion_db)
    }

    pub fn beta(&self) -> f64 {
        db_to_linear(self.rx_distortion_db)
    }

    pub fn sigma_si2(&self) -> f64 {
        db_to_linear(self.si_cancellation_db)
    }

    pub fn p_dl_watts(&self) -> f64 {
        dbm_to_watts(self.p_dl_max)
    }

    pub fn p_ul_watts(&self) -> f64 {
        dbm_to_watts(self.p_ul_max)
    }

    /// Noise power at the base station receiver, watts.
    pub fn noise_bs_watts(&self) -> f64 {
        dbm_to_watts(self.noise_psd + 10.0 * self.bandwidth.log10() + self.noise_figure_bs)
    }

    /// Noise power at a user receiver, watts.
    pub fn noise_ue_watts(&self) -> f64 {
        dbm_to_watts(self.noise_psd + 10.0 * self.bandwidth.log10() + self.noise_figure_ue)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_the_reference_scenario() {
        let c = SystemConfig::default();
        c.validate().unwrap();
        assert_eq!((c.num_ul, c.num_dl), (4, 4));
        assert_eq!(c.cell_radius, 40.0);
        assert_eq!((c.epsilon, c.alpha, c.rho, c.num_restarts), (1e-3, 1.0, 0.9, 20));
        assert_eq!((c.p_dl_max, c.p_ul_max), (30.0, 23.0));
        assert!((c.kappa() - 1e-12).abs() < 1e-24);
        assert!((c.beta() - 1e-12).abs() < 1e-24);
        assert!((c.p_dl_watts() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_budget() {
        let c = SystemConfig::default();
        // -174.4 + 70 + 13 = -91.4 dBm
        let expect = 10f64.powf((-91.4 - 30.0) / 10.0);
        assert!((c.noise_bs_watts() / expect - 1.0).abs() < 1e-12);
        let expect_ue = 10f64.powf((-95.4 - 30.0) / 10.0);
        assert!((c.noise_ue_watts() / expect_ue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_values() {
        let bad = [
            SystemConfig { num_antennas: 1, ..Default::default() },
            SystemConfig { rho: 0.0, ..Default::default() },
            SystemConfig { rho: 1.5, ..Default::default() },
            SystemConfig { alpha: 0.0, ..Default::default() },
            SystemConfig { num_restarts: 0, ..Default::default() },
            SystemConfig { num_dl: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
    }
}
