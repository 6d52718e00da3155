//! Config-driven parameter sweeps and figure recipes.

pub mod config;
pub mod emit;
pub mod run;

pub use config::{
    builtin_recipe, recipe_figures, ConfigError, Curve, GridSpec, Recipe, Scenario, SweepConfig,
};
pub use run::{
    evaluate_point, find_crossover, max_tolerable_thermal, run_crossover, run_populations,
    run_sweep, run_sweep_with_jobs, PopulationRow, ResultRow, SweepError, SweepOutput,
};
