use serde::Serialize;

use crate::divergence::min_geo_entropy_channel;
use crate::error::{Error, Result};
use crate::extend::ExtensionLayout;
use crate::linalg::{support_isometry, CMatrix, HermitianMatrix, LabeledOperator, SubsystemShape, DEFAULT_RANK_TOL};
use crate::quantum::{BipartiteChannel, ChoiChannel};

use super::expr::{HermExpr, LabeledExpr};
use super::problem::{ConicProblem, VarHandle};
use super::solver::{solve, solver_tol_from_env, SolveReport, SolveStatus};

/// Largest supported `ℓ`.
pub const MAX_ELL: u32 = 12;

/// Residual tolerance for candidate and witness extensions.
pub const EXTENSION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnextOptions {
    pub tol: f64,
    /// Drop the non-signaling constraint of bipartite extensions.
    pub relax_nonsignaling: bool,
}

impl Default for UnextOptions {
    /// Tolerance from `UNEXT_SOLVER_TOL` when set.
    fn default() -> Self {
        Self { tol: solver_tol_from_env(), relax_nonsignaling: false }
    }
}

/// α-geometric unextendible entanglement for `α = 1 + 2^{-ℓ}`.
#[derive(Debug, Clone, Serialize)]
pub struct GeoSdpResult {
    /// `½ D̂_α(N‖N⁰)` at the optimum, `2^{ℓ-1} log₂ y*`.
    pub value_bits: f64,
    /// The optimal channel divergence `2^ℓ log₂ y*`.
    pub divergence_bits: f64,
    pub y_star: f64,
    pub ell: u32,
    pub alpha: f64,
    pub report: SolveReport,
    /// Optimal extension `Γ^P`.
    #[serde(skip)]
    pub witness_extension: LabeledOperator,
    /// Largest extension-constraint residual of the witness.
    pub extension_residual: f64,
}

pub fn alpha_of_ell(ell: u32) -> f64 {
    1.0 + (-(ell as f64)).exp2()
}

fn check_ell(ell: u32) -> Result<()> {
    if ell > MAX_ELL {
        return Err(Error::InvalidParameter { name: "ell", value: ell as f64 });
    }
    Ok(())
}

/// Adds `y`, `M`, `N¹…N^ℓ` and the block inequalities
/// `[[M, Γ],[Γ, N^ℓ]] ⪰ 0`, `[[Γ, Nⁱ],[Nⁱ, Nⁱ⁻¹]] ⪰ 0` and `y I ⪰ Tr_out M`,
/// where `N⁰ = n0`, and sets the objective to `y`.
///
/// Every feasible `Nⁱ` (`i ≥ 1`) and the optimal `M` live on the support of `Γ`, so
/// they are written as `V X V†` with `V` spanning that support and the blocks are
/// compressed accordingly.
fn add_geometric_chain<S: AsRef<str>>(
    problem: &mut ConicProblem,
    gamma: &LabeledOperator,
    n0: HermExpr,
    inputs: &[S],
    ell: u32,
) -> Result<VarHandle> {
    let n = gamma.shape.total_dim();
    let mut v = support_isometry(&gamma.op, DEFAULT_RANK_TOL)?;
    let r = v.ncols();
    if r == n {
        v = CMatrix::identity(n, n);
    }
    let g = HermExpr::constant(&HermitianMatrix::symmetrized(&(v.adjoint() * gamma.op.matrix() * &v)));
    let lift = |e: &HermExpr| if r == n { Ok(e.clone()) } else { e.congruence(&v) };
    let mut u = CMatrix::zeros(r + n, 2 * n);
    u.view_mut((0, 0), (r, n)).copy_from(&v.adjoint());
    u.view_mut((r, n), (n, n)).fill_with_identity();
    // [[top, mid], [mid, prev]] with `prev` the full-size N⁰.
    let first_block = |top: &HermExpr, mid: &HermExpr, prev: &HermExpr| -> Result<HermExpr> {
        let b = HermExpr::block2(&lift(top)?, &lift(mid)?, prev)?;
        if r == n { Ok(b) } else { b.congruence(&u) }
    };

    let y = problem.add_scalar("y");
    let m = problem.add_hermitian("M", r);
    let mut prev: Option<HermExpr> = None;
    for i in 1..=ell {
        let ni = problem.add_hermitian(&format!("N{i}"), r).expr();
        let block = match &prev {
            None => first_block(&g, &ni, &n0)?,
            Some(p) => HermExpr::block2(&g, &ni, p)?,
        };
        problem.add_psd(&format!("mean_{i}"), block)?;
        prev = Some(ni);
    }
    let last = match &prev {
        None => first_block(&m.expr(), &g, &n0)?,
        Some(p) => HermExpr::block2(&m.expr(), &g, p)?,
    };
    problem.add_psd("schur", last)?;
    let tr = LabeledExpr::new(lift(&m.expr())?, gamma.shape.clone())?.keep(inputs)?;
    let lhs = HermExpr::scalar_identity(y.offset, tr.expr.dim()).sub(&tr.expr)?;
    problem.add_psd("y_bound", lhs)?;
    problem.minimize(vec![(y.offset, 1.0)], 0.0)?;
    Ok(y)
}

fn status_error(status: SolveStatus) -> Error {
    match status {
        SolveStatus::Infeasible => Error::InfeasibleModel("extension program reported infeasible".into()),
        s => Error::SolverFailure { status: s, message: "unextendible-entanglement program did not converge".into() },
    }
}

/// The conic program for a prepared extension layout: the problem, the scalar `y`
/// it minimizes, and the extension `Γ^P` as an expression in its parameters.
pub fn build_unext_problem(layout: &ExtensionLayout, ell: u32, relax_nonsignaling: bool) -> Result<(ConicProblem, VarHandle, LabeledExpr)> {
    check_ell(ell)?;
    let mut problem = ConicProblem::new();
    let (_, g) = layout.add_reduced_to(&mut problem, relax_nonsignaling)?;
    let n0 = layout.comparison_expr(&g)?.expr;
    let y = add_geometric_chain(&mut problem, layout.base(), n0, layout.inputs(), ell)?;
    Ok((problem, y, g))
}

/// Solves the program for a prepared extension layout.
pub fn unext_alpha_layout(layout: &ExtensionLayout, ell: u32, opts: &UnextOptions) -> Result<GeoSdpResult> {
    let (problem, y, g) = build_unext_problem(layout, ell, opts.relax_nonsignaling)?;
    let sol = solve(&problem, opts.tol)?;
    if !sol.report.status.has_value() {
        return Err(status_error(sol.report.status));
    }
    let y_star = sol.x[y.offset];
    let divergence_bits = (ell as f64).exp2() * y_star.log2();
    let witness = LabeledOperator::new(HermitianMatrix::symmetrized(&g.expr.evaluate(&sol.x)), g.shape.clone())?;
    let extension_residual = layout
        .residuals(&witness, opts.relax_nonsignaling)?
        .into_values()
        .fold(0.0, f64::max);
    Ok(GeoSdpResult {
        value_bits: 0.5 * divergence_bits,
        divergence_bits,
        y_star,
        ell,
        alpha: alpha_of_ell(ell),
        report: sol.report,
        witness_extension: witness,
        extension_residual,
    })
}

/// Unextendible entanglement of a point-to-point channel.
pub fn unext_alpha_p2p(n: &ChoiChannel, ell: u32) -> Result<GeoSdpResult> {
    unext_alpha_p2p_with(n, ell, &UnextOptions::default())
}

pub fn unext_alpha_p2p_with(n: &ChoiChannel, ell: u32, opts: &UnextOptions) -> Result<GeoSdpResult> {
    unext_alpha_layout(&ExtensionLayout::p2p(n)?, ell, opts)
}

/// Unextendible entanglement of a bipartite channel; Bob's input and output are extended.
pub fn unext_alpha_bipartite(n: &BipartiteChannel, ell: u32) -> Result<GeoSdpResult> {
    unext_alpha_bipartite_with(n, ell, &UnextOptions::default())
}

pub fn unext_alpha_bipartite_with(n: &BipartiteChannel, ell: u32, opts: &UnextOptions) -> Result<GeoSdpResult> {
    unext_alpha_layout(&ExtensionLayout::bipartite(n)?, ell, opts)
}

/// Unextendible entanglement of a state on a two-label shape; the second subsystem is extended.
pub fn unext_alpha_state(rho: &HermitianMatrix, shape: &SubsystemShape, ell: u32) -> Result<GeoSdpResult> {
    unext_alpha_state_with(rho, shape, ell, &UnextOptions::default())
}

pub fn unext_alpha_state_with(rho: &HermitianMatrix, shape: &SubsystemShape, ell: u32, opts: &UnextOptions) -> Result<GeoSdpResult> {
    unext_alpha_layout(&ExtensionLayout::state(rho, shape)?, ell, opts)
}

/// Geometric Rényi channel divergence `D̂_α(N‖M)` in bits for `α = 1 + 2^{-ℓ}`,
/// from the same block inequalities with `N⁰ = Γ^M`.
pub fn geo_divergence_channel_sdp(n: &ChoiChannel, m: &ChoiChannel, ell: u32, tol: f64) -> Result<(f64, SolveReport)> {
    check_ell(ell)?;
    if n.shape() != m.shape() || n.inputs() != m.inputs() {
        return Err(Error::ShapeMismatch("channels differ in shape".into()));
    }
    let mut problem = ConicProblem::new();
    let n0 = LabeledExpr::constant(m.operator()).expr;
    let y = add_geometric_chain(&mut problem, n.operator(), n0, n.inputs(), ell)?;
    let sol = solve(&problem, tol)?;
    if !sol.report.status.has_value() {
        return Err(Error::SolverFailure { status: sol.report.status, message: "divergence program did not converge".into() });
    }
    Ok(((ell as f64).exp2() * sol.x[y.offset].log2(), sol.report))
}

/// Upper bound on the min-geometric unextendible entanglement: the least
/// `½ D̂₀(N‖N⁰)` over the candidate extensions. Every candidate must satisfy the
/// extension constraints to [`EXTENSION_TOL`].
pub fn min_geo_upper_bound(layout: &ExtensionLayout, candidates: &[LabeledOperator]) -> Result<f64> {
    if candidates.is_empty() {
        return Err(Error::InvalidExtension("no candidate extensions".into()));
    }
    let n = ChoiChannel::new(layout.base().clone(), layout.inputs(), layout.outputs())?;
    let mut best = f64::INFINITY;
    for c in candidates {
        layout.check(c, EXTENSION_TOL, false)?;
        let n0 = layout.comparison_channel(c)?;
        best = best.min(0.5 * min_geo_entropy_channel(&n, &n0, DEFAULT_RANK_TOL)?.value);
    }
    Ok(best)
}

pub fn min_geo_upper_bound_p2p(n: &ChoiChannel, candidates: &[LabeledOperator]) -> Result<f64> {
    min_geo_upper_bound(&ExtensionLayout::p2p(n)?, candidates)
}

pub fn min_geo_upper_bound_bipartite(n: &BipartiteChannel, candidates: &[LabeledOperator]) -> Result<f64> {
    min_geo_upper_bound(&ExtensionLayout::bipartite(n)?, candidates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::make_identity;

    #[test]
    fn identity_qubit() {
        let opts = UnextOptions { tol: 1e-8, relax_nonsignaling: false };
        for ell in [0, 3] {
            let r = unext_alpha_p2p_with(&make_identity(2).unwrap(), ell, &opts).unwrap();
            assert!((r.value_bits - 1.0).abs() < 1e-4, "ell {ell}: {}", r.value_bits);
            assert!(r.extension_residual < EXTENSION_TOL);
        }
    }

    #[test]
    fn ell_cap() {
        assert!(unext_alpha_p2p(&make_identity(2).unwrap(), 13).is_err());
    }
}
