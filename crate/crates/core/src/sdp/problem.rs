use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, SubsystemShape};

use super::expr::{HermExpr, LabeledExpr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VarKind {
    Scalar,
    Hermitian { dim: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    /// First parameter index.
    pub offset: usize,
}

impl Variable {
    pub fn n_params(&self) -> usize {
        match self.kind {
            VarKind::Scalar => 1,
            VarKind::Hermitian { dim } => dim * dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub expr: HermExpr,
}

/// Minimize a linear functional of Hermitian and scalar variables subject to
/// affine equalities `expr = 0` and semidefinite constraints `expr ⪰ 0`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConicProblem {
    pub variables: Vec<Variable>,
    pub equalities: Vec<Constraint>,
    pub psd: Vec<Constraint>,
    /// `(parameter, coefficient)` pairs of the objective.
    pub objective: Vec<(usize, f64)>,
    pub objective_constant: f64,
}

/// Handle to a declared variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarHandle {
    pub index: usize,
    pub offset: usize,
    pub dim: usize,
}

impl VarHandle {
    pub fn expr(&self) -> HermExpr {
        HermExpr::hermitian_variable(self.offset, self.dim)
    }

    pub fn labeled(&self, shape: &SubsystemShape) -> Result<LabeledExpr> {
        LabeledExpr::new(self.expr(), shape.clone())
    }
}

impl ConicProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n_params(&self) -> usize {
        self.variables.last().map_or(0, |v| v.offset + v.n_params())
    }

    fn push(&mut self, name: &str, kind: VarKind) -> VarHandle {
        let offset = self.n_params();
        let dim = match kind {
            VarKind::Scalar => 1,
            VarKind::Hermitian { dim } => dim,
        };
        self.variables.push(Variable { name: name.to_string(), kind, offset });
        VarHandle { index: self.variables.len() - 1, offset, dim }
    }

    /// Declares a real scalar; its parameter index is `handle.offset`.
    pub fn add_scalar(&mut self, name: &str) -> VarHandle {
        self.push(name, VarKind::Scalar)
    }

    pub fn add_hermitian(&mut self, name: &str, dim: usize) -> VarHandle {
        self.push(name, VarKind::Hermitian { dim })
    }

    fn check(&self, expr: &HermExpr) -> Result<()> {
        let n = self.n_params();
        if let Some(p) = expr.params().find(|&p| p >= n) {
            return Err(Error::ShapeMismatch(format!("parameter {p} is not declared ({n} parameters)")));
        }
        Ok(())
    }

    pub fn add_equality(&mut self, name: &str, expr: HermExpr) -> Result<()> {
        self.check(&expr)?;
        self.equalities.push(Constraint { name: name.to_string(), expr });
        Ok(())
    }

    /// `lhs = rhs` with the two sides aligned by label.
    pub fn add_labeled_equality(&mut self, name: &str, lhs: &LabeledExpr, rhs: &LabeledExpr) -> Result<()> {
        self.add_equality(name, lhs.sub(rhs)?.expr)
    }

    pub fn add_psd(&mut self, name: &str, expr: HermExpr) -> Result<()> {
        self.check(&expr)?;
        self.psd.push(Constraint { name: name.to_string(), expr });
        Ok(())
    }

    pub fn minimize(&mut self, objective: Vec<(usize, f64)>, constant: f64) -> Result<()> {
        let n = self.n_params();
        if let Some(&(p, _)) = objective.iter().find(|(p, _)| *p >= n) {
            return Err(Error::ShapeMismatch(format!("objective parameter {p} is not declared")));
        }
        self.objective = objective;
        self.objective_constant = constant;
        Ok(())
    }

    /// Parameters holding imaginary parts of Hermitian variables.
    pub fn imaginary_params(&self) -> Vec<bool> {
        let mut out = vec![false; self.n_params()];
        for v in &self.variables {
            if let VarKind::Hermitian { dim } = v.kind {
                let pairs = dim * (dim - 1) / 2;
                for k in 0..pairs {
                    out[v.offset + dim + 2 * k + 1] = true;
                }
            }
        }
        out
    }

    pub fn value(&self, handle: VarHandle, x: &[f64]) -> HermitianMatrix {
        HermitianMatrix::symmetrized(&handle.expr().evaluate(x))
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective_constant + self.objective.iter().map(|&(p, c)| c * x[p]).sum::<f64>()
    }

    /// Largest absolute entry of any equality residual and the most negative
    /// eigenvalue of any semidefinite constraint at `x`.
    pub fn residuals(&self, x: &[f64]) -> (f64, f64) {
        let eq = self
            .equalities
            .iter()
            .map(|c| c.expr.evaluate(x).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        let psd = self
            .psd
            .iter()
            .map(|c| (-HermitianMatrix::symmetrized(&c.expr.evaluate(x)).min_eigenvalue()).max(0.0))
            .fold(0.0, f64::max);
        (eq, psd)
    }

    /// JSON serialization for debugging with external solvers.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("problem serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
