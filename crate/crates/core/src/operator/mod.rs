//! Discretized Hammerstein operator and fixed-point solvers.

mod grid;
mod nystrom;
mod solve;

pub use grid::{corrected_edge, GridFunction, MIN_GRID};
pub use nystrom::{apply_t, NystromOperator};
pub use solve::{
    default_seeds, find_positive_solutions, log_spaced, newton_solve, newton_with, picard_solve,
    picard_with, solve, Method, Solution, SolveSettings, DIVERGENCE_NORM, MAX_HALVINGS,
    NEGATIVITY_FLOOR, POSITIVE_NORM_FLOOR, STAGNATION_WINDOW, SWEEP_GRID,
};
