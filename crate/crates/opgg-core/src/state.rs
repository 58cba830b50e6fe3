//! Population states on the strategy simplex.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for accepting a state as a point of the simplex.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Population shares of the three strategies.
///
/// `x` cooperates, `y` defects, `z` opts out. A valid state has non-negative
/// components summing to one within [`SIMPLEX_TOL`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplexState {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl SimplexState {
    /// The all-cooperators corner, the usual tracking target.
    pub const COOPERATION: SimplexState = SimplexState {
        x: 1.0,
        y: 0.0,
        z: 0.0,
    };

    /// Builds a state and checks it lies on the simplex.
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let state = SimplexState { x, y, z };
        state.validate()?;
        Ok(state)
    }

    /// Checks non-negativity and unit sum within [`SIMPLEX_TOL`].
    pub fn validate(&self) -> Result<()> {
        let [x, y, z] = self.to_array();
        for (name, c) in [("x", x), ("y", y), ("z", z)] {
            if !c.is_finite() || c < -SIMPLEX_TOL {
                return Err(Error::InvalidState(format!(
                    "component {name} = {c} is negative"
                )));
            }
        }
        let sum = x + y + z;
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::InvalidState(format!(
                "components sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    pub fn from_array([x, y, z]: [f64; 3]) -> Result<Self> {
        SimplexState::new(x, y, z)
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    /// Euclidean distance to another state.
    pub fn distance(&self, other: &SimplexState) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Projects a nearby point back onto the simplex: negative components
    /// are clamped to zero, then the vector is divided by its sum.
    pub(crate) fn renormalize(raw: [f64; 3]) -> SimplexState {
        let clamped = raw.map(|c| c.max(0.0));
        let sum: f64 = clamped.iter().sum();
        SimplexState {
            x: clamped[0] / sum,
            y: clamped[1] / sum,
            z: clamped[2] / sum,
        }
    }
}
