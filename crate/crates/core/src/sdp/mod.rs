//! Conic-program representation, the complex-to-real reduction, the solver
//! adapter and the unextendible-entanglement programs.

mod embed;
mod expr;
mod problem;
mod solver;
mod unext;

pub use embed::{real_embed, RealBlock, RealConicProblem, RealRow, MAX_PSD_ROWS};
pub use expr::{HermExpr, LabeledExpr, Term};
pub use problem::{ConicProblem, Constraint, VarHandle, VarKind, Variable};
pub use solver::{
    solve, solve_with, solver_tol_from_env, ClarabelSolver, ConicSolver, RealSolution, Solution, SolveReport,
    SolveStatus, DEFAULT_SOLVER_TOL,
};
pub use unext::*;
