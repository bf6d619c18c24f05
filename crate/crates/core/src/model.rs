//! Coupled run: emissions and climate advance together because the
//! permafrost CH₄ source depends on the previous year's warming.

use rayon::prelude::*;

use crate::climate::{radiative_forcing, scenario_offset, step_climate, ClimateSeries, ClimateState, ForcingParams};
use crate::emissions::{GasEngine, GasTrajectory, Pulse};
use crate::error::Result;
use crate::scenario::Scenario;

#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub trajectories: Vec<GasTrajectory>,
    pub climate: ClimateSeries,
}

pub fn simulate(scenario: &Scenario, params: &ForcingParams, pulses: &[Pulse]) -> Result<SimulationRun> {
    params.validate()?;
    let mut engine = GasEngine::new(scenario, pulses)?;
    let mut states: Vec<ClimateState> = Vec::with_capacity(scenario.years());
    while !engine.is_done() {
        let year = engine.next_year();
        let prev_t = states.last().map_or(0.0, |s| s.delta_t);
        let conc = engine.advance(prev_t);
        let forcing = radiative_forcing(&conc, params)? + scenario_offset(scenario, year);
        let state = match states.last() {
            None => ClimateState::baseline(year, forcing, params),
            Some(prev) => step_climate(prev, forcing, params, 1.0)?,
        };
        states.push(state);
    }
    Ok(SimulationRun {
        trajectories: engine.into_trajectories(),
        climate: ClimateSeries {
            scenario_name: scenario.name.clone(),
            states,
        },
    })
}

/// Simulate independent scenarios in parallel; output order follows input.
pub fn simulate_all(scenarios: &[Scenario], params: &ForcingParams) -> Result<Vec<SimulationRun>> {
    scenarios.par_iter().map(|s| simulate(s, params, &[])).collect()
}
