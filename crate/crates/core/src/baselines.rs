//! Reference assignments: exhaustive search over all binary splits and the
//! fixed half split.

use crate::channel::ChannelRealization;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::mse::{evaluate, AntennaAssignment, MseReport};

/// Largest antenna count accepted by [`exhaustive`].
pub const EXH_MAX_ANTENNAS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaselineMethod {
    Exh,
    Split,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub method: BaselineMethod,
    pub x_binary: AntennaAssignment,
    pub sum_mse: f64,
    pub sum_se: f64,
    pub report: MseReport,
    pub evaluations: u64,
}

/// Minimum sum MSE over every binary assignment (MMSE filters per candidate).
/// Antenna `k` is bit `k` of the code; ties keep the lowest code.
pub fn exhaustive(ch: &ChannelRealization, cfg: &SystemConfig) -> Result<BaselineResult> {
    let m = ch.num_antennas();
    if m > EXH_MAX_ANTENNAS {
        return Err(Error::Capacity { requested: m, max: EXH_MAX_ANTENNAS });
    }
    let full = (1u64 << m) - 1;
    let mut best: Option<(AntennaAssignment, MseReport)> = None;
    let mut evaluations = 0;
    for code in 0..=full {
        if cfg.exh_exclude_degenerate && (code == 0 || code == full) {
            continue;
        }
        let x = AntennaAssignment::from_code(code, m);
        let (_, report) = evaluate(ch, &x)?;
        evaluations += 1;
        if best.as_ref().is_none_or(|(_, b)| report.sum_mse < b.sum_mse) {
            best = Some((x, report));
        }
    }
    let (x_binary, report) = best.ok_or(Error::Empty("exhaustive search space"))?;
    Ok(BaselineResult {
        method: BaselineMethod::Exh,
        sum_mse: report.sum_mse,
        sum_se: report.sum_se,
        x_binary,
        report,
        evaluations,
    })
}

/// First `ceil(M/2)` antennas uplink, the rest downlink.
pub fn equal_split(num_antennas: usize) -> AntennaAssignment {
    let bits: Vec<bool> = (0..num_antennas).map(|k| k < num_antennas.div_ceil(2)).collect();
    AntennaAssignment::binary(&bits)
}

/// [`equal_split`] evaluated with MMSE filters.
pub fn split(ch: &ChannelRealization) -> Result<BaselineResult> {
    let x_binary = equal_split(ch.num_antennas());
    let (_, report) = evaluate(ch, &x_binary)?;
    Ok(BaselineResult {
        method: BaselineMethod::Split,
        sum_mse: report.sum_mse,
        sum_se: report.sum_se,
        x_binary,
        report,
        evaluations: 1,
    })
}
