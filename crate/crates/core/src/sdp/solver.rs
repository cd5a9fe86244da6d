use std::time::Instant;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::embed::{real_embed, RealConicProblem};
use super::problem::ConicProblem;

/// Default solver tolerance.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    Inaccurate,
    Failed,
}

impl SolveStatus {
    /// Whether the objective value carries meaning.
    pub fn has_value(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Inaccurate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub objective_value: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub wall_time_ms: f64,
    pub iterations: u32,
    pub solver: String,
}

/// Primal point in real variables plus the backend report.
#[derive(Debug, Clone)]
pub struct RealSolution {
    pub x: Vec<f64>,
    pub report: SolveReport,
}

/// A backend for real symmetric conic problems. One instance serves one solve at a time.
pub trait ConicSolver {
    fn name(&self) -> &str;
    fn solve(&self, problem: &RealConicProblem, tol: f64) -> Result<RealSolution>;
}

/// Interior-point backend built on Clarabel.
#[derive(Debug, Clone)]
pub struct ClarabelSolver {
    pub max_iter: u32,
}

impl Default for ClarabelSolver {
    fn default() -> Self {
        Self { max_iter: 200 }
    }
}

/// Index of `(row, col)`, `row <= col`, in the column-major upper-triangle vectorization.
fn svec_index(row: usize, col: usize) -> usize {
    col * (col + 1) / 2 + row
}

impl ConicSolver for ClarabelSolver {
    fn name(&self) -> &str {
        "clarabel"
    }

    fn solve(&self, problem: &RealConicProblem, tol: f64) -> Result<RealSolution> {
        let n = problem.n_vars;
        let (mut ri, mut ci, mut vals) = (Vec::new(), Vec::new(), Vec::new());
        let mut b = Vec::new();
        let mut cones = Vec::new();
        for row in &problem.equalities {
            let i = b.len();
            for &(j, a) in &row.coefs {
                ri.push(i);
                ci.push(j);
                vals.push(a);
            }
            b.push(row.rhs);
        }
        if !problem.equalities.is_empty() {
            cones.push(SupportedConeT::ZeroConeT(problem.equalities.len()));
        }
        for block in &problem.blocks {
            let base = b.len();
            let len = block.dim * (block.dim + 1) / 2;
            b.resize(base + len, 0.0);
            for &(r, c, v, a) in &block.entries {
                let scale = if r == c { 1.0 } else { std::f64::consts::SQRT_2 };
                let i = base + svec_index(r, c);
                match v {
                    None => b[i] += scale * a,
                    Some(j) => {
                        ri.push(i);
                        ci.push(j);
                        vals.push(-scale * a);
                    }
                }
            }
            cones.push(SupportedConeT::PSDTriangleConeT(block.dim));
        }
        let m = b.len();
        let a = CscMatrix::new_from_triplets(m, n, ri, ci, vals);
        let p = CscMatrix::zeros((n, n));
        let start = Instant::now();
        let mut iterations = 0;
        // Equilibration occasionally stalls Clarabel on facially reduced programs; retry without it,
        // then also without chordal decomposition.
        let mut last = None;
        for (equilibrate, chordal) in [(true, true), (false, true), (false, false)] {
            let settings = DefaultSettingsBuilder::default()
                .verbose(std::env::var_os("UNEXT_SOLVER_VERBOSE").is_some())
                .tol_gap_abs(tol)
                .tol_gap_rel(tol)
                .tol_feas(tol)
                .max_iter(self.max_iter)
                .equilibrate_enable(equilibrate)
                .chordal_decomposition_enable(chordal)
                .build()
                .map_err(|e| Error::SolverFailure { status: SolveStatus::Failed, message: format!("{e:?}") })?;
            let mut solver = DefaultSolver::new(&p, &problem.objective, &a, &b, &cones, settings)
                .map_err(|e| Error::SolverFailure { status: SolveStatus::Failed, message: format!("{e:?}") })?;
            solver.solve();
            let sol = solver.solution;
            iterations += sol.iterations;
            let rank = |st: SolverStatus| match st {
                SolverStatus::Solved => 0,
                SolverStatus::PrimalInfeasible | SolverStatus::DualInfeasible => 1,
                SolverStatus::AlmostSolved => 2,
                SolverStatus::AlmostPrimalInfeasible | SolverStatus::AlmostDualInfeasible => 3,
                _ => 4,
            };
            let done = rank(sol.status) <= 1;
            if last.as_ref().is_none_or(|l: &clarabel::solver::DefaultSolution<f64>| rank(sol.status) < rank(l.status)) {
                last = Some(sol);
            }
            if done {
                break;
            }
        }
        let sol = last.expect("at least one attempt");
        let status = match sol.status {
            SolverStatus::Solved => SolveStatus::Optimal,
            SolverStatus::AlmostSolved => SolveStatus::Inaccurate,
            SolverStatus::PrimalInfeasible | SolverStatus::AlmostPrimalInfeasible => SolveStatus::Infeasible,
            SolverStatus::DualInfeasible | SolverStatus::AlmostDualInfeasible => SolveStatus::Unbounded,
            _ => SolveStatus::Failed,
        };
        let report = SolveReport {
            status,
            objective_value: sol.obj_val,
            primal_residual: sol.r_prim,
            dual_residual: sol.r_dual,
            wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
            iterations,
            solver: self.name().to_string(),
        };
        Ok(RealSolution { x: sol.x.clone(), report })
    }
}

/// Solution of a [`ConicProblem`]: report and parameter values.
#[derive(Debug, Clone)]
pub struct Solution {
    pub report: SolveReport,
    pub x: Vec<f64>,
}

/// Embeds, solves with `solver` and maps the witness back.
pub fn solve_with(problem: &ConicProblem, solver: &dyn ConicSolver, tol: f64) -> Result<Solution> {
    let real = real_embed(problem)?;
    let sol = solver.solve(&real, tol)?;
    let x = real.recover(&sol.x);
    let mut report = sol.report;
    if report.status.has_value() {
        report.objective_value = problem.objective_value(&x);
    }
    Ok(Solution { report, x })
}

/// [`solve_with`] using the default backend.
pub fn solve(problem: &ConicProblem, tol: f64) -> Result<Solution> {
    solve_with(problem, &ClarabelSolver::default(), tol)
}

/// Solver tolerance from `UNEXT_SOLVER_TOL`, falling back to [`DEFAULT_SOLVER_TOL`].
pub fn solver_tol_from_env() -> f64 {
    std::env::var("UNEXT_SOLVER_TOL")
        .ok()
        .and_then(|s| s.parse::<f64>().ok())
        .filter(|t| *t > 0.0)
        .unwrap_or(DEFAULT_SOLVER_TOL)
}
