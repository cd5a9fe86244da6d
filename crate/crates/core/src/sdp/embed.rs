//! Reduction of a complex Hermitian conic problem to a real symmetric one.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};

use super::expr::HermExpr;
use super::problem::ConicProblem;

/// Largest total dimension of the real semidefinite blocks.
pub const MAX_PSD_ROWS: usize = 4096;

const COEF_TOL: f64 = 1e-14;

/// `Σ a_j x_j = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealRow {
    pub coefs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Real symmetric block `C₀ + Σ_j x_j C_j ⪰ 0`, upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct RealBlock {
    pub dim: usize,
    /// `(row, col, variable, coefficient)` with `row <= col`; `None` is the constant.
    pub entries: Vec<(usize, usize, Option<usize>, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealConicProblem {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub equalities: Vec<RealRow>,
    pub blocks: Vec<RealBlock>,
    /// Real variable of each complex-problem parameter; `None` when fixed to zero.
    pub var_of_param: Vec<Option<usize>>,
    /// True when the problem was invariant under complex conjugation and solved over real matrices.
    pub real_only: bool,
}

impl RealConicProblem {
    /// Parameter vector of the original problem.
    pub fn recover(&self, x: &[f64]) -> Vec<f64> {
        self.var_of_param.iter().map(|v| v.map_or(0.0, |j| x[j])).collect()
    }

    pub fn psd_rows(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }
}

/// Whether every constraint is unchanged by complex conjugation with the
/// imaginary parts of the Hermitian variables negated.
fn conjugation_invariant(problem: &ConicProblem, imag: &[bool]) -> bool {
    let ok = |e: &HermExpr| {
        e.terms().iter().all(|t| match t.param {
            Some(p) if imag[p] => t.coef.re.abs() <= COEF_TOL,
            _ => t.coef.im.abs() <= COEF_TOL,
        })
    };
    problem.equalities.iter().all(|c| ok(&c.expr))
        && problem.psd.iter().all(|c| ok(&c.expr))
        && problem.objective.iter().all(|&(p, c)| !imag[p] || c == 0.0)
}

/// Real coefficients, imaginary coefficients, real constant and imaginary constant of one entry.
type EntryParts = (BTreeMap<usize, f64>, BTreeMap<usize, f64>, f64, f64);

/// Normalizes a row so its leading coefficient is one and returns a hashable key.
fn row_key(row: &RealRow) -> Vec<i64> {
    let lead = row.coefs[0].1;
    let q = |v: f64| (v / lead * 1e10).round() as i64;
    let mut key: Vec<i64> = row.coefs.iter().flat_map(|&(j, a)| [j as i64, q(a)]).collect();
    key.push(q(row.rhs));
    key
}

/// Largest `rows × variables` for which dependent equalities are pruned.
const MAX_PRUNE_ENTRIES: usize = 20_000_000;

/// Drops equality rows that are linear combinations of earlier ones, by
/// Gram-Schmidt on the coefficient vectors carrying the right-hand side along.
fn drop_dependent(rows: Vec<RealRow>, n_vars: usize) -> Result<Vec<RealRow>> {
    if rows.len() < 2 || rows.len().saturating_mul(n_vars) > MAX_PRUNE_ENTRIES {
        return Ok(rows);
    }
    let scale = rows
        .iter()
        .map(|r| r.coefs.iter().map(|(_, a)| a * a).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut kept = Vec::new();
    for row in rows {
        let mut a = vec![0.0; n_vars];
        for &(j, v) in &row.coefs {
            a[j] += v;
        }
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut b = row.rhs;
        // Two passes keep the residual orthogonal in floating point.
        for _ in 0..2 {
            for (q, beta) in &basis {
                let c: f64 = a.iter().zip(q).map(|(x, y)| x * y).sum();
                if c != 0.0 {
                    a.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
                    b -= c * beta;
                }
            }
        }
        let rest = a.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rest <= 1e-9 * norm.max(scale * 1e-3) {
            if b.abs() > 1e-6 * scale.max(row.rhs.abs()) {
                return Err(Error::InfeasibleModel(format!("equality rows are inconsistent by {:.3e}", b.abs())));
            }
            continue;
        }
        a.iter_mut().for_each(|x| *x /= rest);
        basis.push((a, b / rest));
        kept.push(row);
    }
    Ok(kept)
}

/// Maps the Hermitian problem to a real symmetric one. Conjugation-invariant
/// problems keep their block sizes; all others use `[[Re H, −Im H], [Im H, Re H]]`.
/// Duplicate and linearly dependent equality rows are removed.
pub fn real_embed(problem: &ConicProblem) -> Result<RealConicProblem> {
    let imag = problem.imaginary_params();
    let real_only = conjugation_invariant(problem, &imag);
    let mut var_of_param = Vec::with_capacity(imag.len());
    let mut n_vars = 0;
    for &im in &imag {
        if real_only && im {
            var_of_param.push(None);
        } else {
            var_of_param.push(Some(n_vars));
            n_vars += 1;
        }
    }

    let psd_rows: usize = problem.psd.iter().map(|c| c.expr.dim() * if real_only { 1 } else { 2 }).sum();
    if psd_rows > MAX_PSD_ROWS {
        return Err(Error::ProblemTooLarge(format!(
            "{psd_rows} semidefinite rows after embedding exceed the cap of {MAX_PSD_ROWS}"
        )));
    }

    let mut objective = vec![0.0; n_vars];
    for &(p, c) in &problem.objective {
        if let Some(j) = var_of_param[p] {
            objective[j] += c;
        }
    }

    let mut equalities = Vec::new();
    let mut seen = HashSet::new();
    for con in &problem.equalities {
        // (row, col) -> (re coefs, im coefs, re const, im const)
        let mut entries: BTreeMap<(usize, usize), EntryParts> = BTreeMap::new();
        for t in con.expr.terms() {
            let e = entries.entry((t.row, t.col)).or_default();
            match t.param {
                None => {
                    e.2 += t.coef.re;
                    e.3 += t.coef.im;
                }
                Some(p) => {
                    if let Some(j) = var_of_param[p] {
                        *e.0.entry(j).or_default() += t.coef.re;
                        if t.row != t.col {
                            *e.1.entry(j).or_default() += t.coef.im;
                        }
                    }
                }
            }
        }
        for ((r, c), (re, im, c_re, c_im)) in entries {
            let mut parts = vec![(re, c_re)];
            if r != c {
                parts.push((im, c_im));
            }
            for (coefs, konst) in parts {
                let coefs: Vec<(usize, f64)> = coefs.into_iter().filter(|(_, a)| a.abs() > COEF_TOL).collect();
                if coefs.is_empty() {
                    if konst.abs() > 1e-12 {
                        return Err(Error::InfeasibleModel(format!(
                            "constraint {} requires {konst:.3e} = 0 at entry ({r}, {c})",
                            con.name
                        )));
                    }
                    continue;
                }
                let row = RealRow { coefs, rhs: -konst };
                if seen.insert(row_key(&row)) {
                    equalities.push(row);
                }
            }
        }
    }

    let equalities = drop_dependent(equalities, n_vars)?;

    let mut blocks = Vec::with_capacity(problem.psd.len());
    for con in &problem.psd {
        let m = con.expr.dim();
        let mut entries = Vec::new();
        for t in con.expr.terms() {
            let var = match t.param {
                None => None,
                Some(p) => match var_of_param[p] {
                    Some(j) => Some(j),
                    None => continue,
                },
            };
            let (re, im) = (t.coef.re, t.coef.im);
            if re.abs() > COEF_TOL {
                entries.push((t.row, t.col, var, re));
                if !real_only {
                    entries.push((t.row + m, t.col + m, var, re));
                }
            }
            if !real_only && im.abs() > COEF_TOL && t.row != t.col {
                entries.push((t.row, t.col + m, var, -im));
                entries.push((t.col, t.row + m, var, im));
            }
        }
        blocks.push(RealBlock { dim: if real_only { m } else { 2 * m }, entries });
    }

    Ok(RealConicProblem { n_vars, objective, equalities, blocks, var_of_param, real_only })
}
