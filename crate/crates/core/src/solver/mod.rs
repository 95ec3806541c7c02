//! Nonlinear solves on a radial grid.

mod inner;
mod iteration;
mod mountain;
mod outcome;
mod spec;
mod transform;

pub use inner::inner_solve;
pub(crate) use inner::inner_solve_values;
pub use iteration::{dirac_solve, minimal_solution, minimal_solution_from};
pub(crate) use iteration::iterate;
pub use mountain::mountain_pass_solve;
pub use outcome::{SolveOutcome, SolveStatus};
pub use spec::{ProblemSpec, SolverOptions};
pub use transform::{transform_solution, Direction};
