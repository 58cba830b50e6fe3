//! Shared fixtures for the benchmark targets.

use opgg_core::{CostWeights, GameParams, SimplexState, SolverConfig, TimeGrid};

/// The head-to-head comparison scenario: mixed tracking, effort, and
/// punished-share weights over a twenty-unit horizon.
pub fn comparison_scenario() -> (
    SimplexState,
    TimeGrid,
    CostWeights,
    GameParams,
    SolverConfig,
) {
    (
        SimplexState::new(0.2, 0.7, 0.1).expect("valid start"),
        TimeGrid::new(0.0, 20.0, 400).expect("valid grid"),
        CostWeights::new(0.0, 0.04, 0.001, 0.959).expect("valid weights"),
        GameParams::default(),
        SolverConfig::default(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_is_solvable() {
        let (w0, grid, weights, params, config) = comparison_scenario();
        let report =
            opgg_core::fbsm_solve(&w0, &grid, &weights, &params, &config).expect("solver runs");
        assert!(report.converged);
    }
}
