use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{validate_params, Params};

/// Distance to the threshold `β1·k1 = b + α` kept by sampled parameter sets.
pub const DEFAULT_BOUNDARY_MARGIN: f64 = 5e-3;
/// Initial points this close to a fixed point or fixed face are redrawn.
pub const FIXED_POINT_EXCLUSION: f64 = 1e-9;

pub(crate) const MAX_REJECTIONS: usize = 100_000;

/// Independent seed for trial `index` of a run seeded with `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Closed ranges `[lo, hi]` per parameter, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamBox {
    pub ranges: [(f64, f64); 6],
}

impl ParamBox {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Params> {
        let mut v = [0.0; 6];
        for (slot, &(lo, hi)) in v.iter_mut().zip(self.ranges.iter()) {
            *slot = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        }
        Params::from_array(v)
    }

    pub fn check(&self) -> Result<()> {
        for &(lo, hi) in &self.ranges {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(Error::InvalidScenarioConfig(format!("bad parameter range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    pub fn pins_zero(&self, index: usize) -> bool {
        self.ranges[index] == (0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParamSampler {
    /// Every trial uses the same parameters; only the start varies.
    Fixed { params: Params },
    /// Uniform on the box, rejecting inadmissible draws.
    Box { bounds: ParamBox },
}

impl ParamSampler {
    /// Draws an admissible parameter set satisfying `accept`.
    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R, accept: impl Fn(&Params) -> bool) -> Result<Params> {
        match self {
            ParamSampler::Fixed { params } => {
                if validate_params(params).is_qso && accept(params) {
                    Ok(*params)
                } else {
                    Err(Error::InvalidScenarioConfig("fixed parameters violate the scenario's conditions".into()))
                }
            }
            ParamSampler::Box { bounds } => {
                for _ in 0..MAX_REJECTIONS {
                    let p = bounds.draw(rng)?;
                    if validate_params(&p).is_qso && accept(&p) {
                        return Ok(p);
                    }
                }
                Err(Error::InvalidScenarioConfig("parameter box admits no draw satisfying the scenario".into()))
            }
        }
    }
}
