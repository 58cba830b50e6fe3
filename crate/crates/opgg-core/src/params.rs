//! Game parameters and the assumptions that make the model well posed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the optional public goods game.
///
/// `n` players are sampled from the population; those who participate
/// contribute (or not) to a pool that is multiplied by `r` and shared among
/// the participants. Opting out pays `sigma` regardless of what the rest do.
///
/// Two inequalities keep the dilemma intact and every corner of the strategy
/// simplex meaningful:
///
/// * `1 < r < n`: full cooperation beats universal loning, yet a single
///   contribution does not pay for itself;
/// * `0 < sigma < r - 1`: loners do better than a group of defectors but
///   worse than a group of cooperators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Sample size of an interaction group, at least 2.
    pub n: u32,
    /// Multiplication factor applied to the common pool.
    pub r: f64,
    /// Payoff of a loner, independent of the rest of the group.
    pub sigma: f64,
}

impl GameParams {
    /// Builds a parameter set, rejecting values that break the assumptions.
    pub fn new(n: u32, r: f64, sigma: f64) -> Result<Self> {
        let params = GameParams { n, r, sigma };
        params.validate()?;
        Ok(params)
    }

    /// Checks the model assumptions; see the type-level docs.
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParams(format!(
                "group size n = {} but at least 2 players are needed",
                self.n
            )));
        }
        if !(self.r > 1.0 && self.r < self.n as f64) || !self.r.is_finite() {
            return Err(Error::InvalidParams(format!(
                "multiplication factor r = {} must satisfy 1 < r < n = {}",
                self.r, self.n
            )));
        }
        if !(self.sigma > 0.0 && self.sigma < self.r - 1.0) || !self.sigma.is_finite() {
            return Err(Error::InvalidParams(format!(
                "loner payoff sigma = {} must satisfy 0 < sigma < r - 1 = {}",
                self.sigma,
                self.r - 1.0
            )));
        }
        Ok(())
    }
}

/// The five-player game with `r = 3` and `sigma = 1` used throughout the
/// worked scenarios.
impl Default for GameParams {
    fn default() -> Self {
        GameParams {
            n: 5,
            r: 3.0,
            sigma: 1.0,
        }
    }
}
