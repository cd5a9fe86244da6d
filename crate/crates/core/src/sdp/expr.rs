//! Affine Hermitian matrix expressions over real decision parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix, LabeledOperator, SubsystemShape, C64};

const DROP_TOL: f64 = 1e-15;

/// One coefficient of entry `(row, col)`, `row <= col`. `param: None` is the constant part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub row: usize,
    pub col: usize,
    pub param: Option<usize>,
    pub coef: C64,
}

/// `C₀ + Σ_p x_p C_p` with Hermitian `C`s, stored as its upper triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermExpr {
    dim: usize,
    terms: Vec<Term>,
}

impl HermExpr {
    fn from_raw(dim: usize, raw: Vec<Term>) -> Self {
        let mut acc: BTreeMap<(usize, usize, Option<usize>), C64> = BTreeMap::new();
        for t in raw {
            let (r, c, coef) = if t.row <= t.col { (t.row, t.col, t.coef) } else { (t.col, t.row, t.coef.conj()) };
            *acc.entry((r, c, t.param)).or_default() += coef;
        }
        let terms = acc
            .into_iter()
            .filter(|(_, v)| v.norm() > DROP_TOL)
            .map(|((row, col, param), coef)| Term { row, col, param, coef })
            .collect();
        Self { dim, terms }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, terms: vec![] }
    }

    pub fn constant(m: &HermitianMatrix) -> Self {
        let n = m.dim();
        let mat = m.matrix();
        let mut raw = Vec::new();
        for c in 0..n {
            for r in 0..=c {
                raw.push(Term { row: r, col: c, param: None, coef: mat[(r, c)] });
            }
        }
        Self::from_raw(n, raw)
    }

    pub fn identity(dim: usize) -> Self {
        Self::constant(&HermitianMatrix::identity(dim))
    }

    /// `x_param · I`.
    pub fn scalar_identity(param: usize, dim: usize) -> Self {
        let terms = (0..dim).map(|i| Term { row: i, col: i, param: Some(param), coef: C64::new(1.0, 0.0) }).collect();
        Self { dim, terms }
    }

    /// Generic Hermitian matrix of dimension `dim` whose parameters start at `offset`:
    /// diagonal entries first, then real and imaginary parts of each upper entry, row-major.
    pub fn hermitian_variable(offset: usize, dim: usize) -> Self {
        let mut terms = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            terms.push(Term { row: i, col: i, param: Some(offset + i), coef: C64::new(1.0, 0.0) });
        }
        let mut p = offset + dim;
        for i in 0..dim {
            for j in i + 1..dim {
                terms.push(Term { row: i, col: j, param: Some(p), coef: C64::new(1.0, 0.0) });
                terms.push(Term { row: i, col: j, param: Some(p + 1), coef: C64::new(0.0, 1.0) });
                p += 2;
            }
        }
        Self::from_raw(dim, terms)
    }

    /// Parameters of [`HermExpr::hermitian_variable`] that reproduce `h`.
    pub fn variable_params(h: &HermitianMatrix) -> Vec<f64> {
        let n = h.dim();
        let m = h.matrix();
        let mut x: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
        for i in 0..n {
            for j in i + 1..n {
                x.push(m[(i, j)].re);
                x.push(m[(i, j)].im);
            }
        }
        x
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// All nonzero coefficients of the full matrix, lower triangle included.
    fn full_terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().flat_map(|t| {
            let mirror = (t.row != t.col).then(|| Term { row: t.col, col: t.row, param: t.param, coef: t.coef.conj() });
            std::iter::once(*t).chain(mirror)
        })
    }

    /// Applies an entrywise linear map that commutes with the adjoint.
    fn map_pairs(&self, out_dim: usize, f: impl Fn(usize, usize) -> Option<(usize, usize)>) -> Self {
        let raw = self
            .full_terms()
            .filter_map(|t| {
                let (r, c) = f(t.row, t.col)?;
                (r <= c).then_some(Term { row: r, col: c, ..t })
            })
            .collect();
        Self::from_raw(out_dim, raw)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("expression dims {} and {}", self.dim, other.dim)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_raw(self.dim, self.terms.iter().chain(&other.terms).copied().collect()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_raw(self.dim, self.terms.iter().map(|t| Term { coef: t.coef * s, ..*t }).collect())
    }

    /// `[[a, b], [b, c]]`.
    pub fn block2(a: &Self, b: &Self, c: &Self) -> Result<Self> {
        a.check_dim(b)?;
        a.check_dim(c)?;
        let n = a.dim;
        let mut raw: Vec<Term> = a.terms.clone();
        raw.extend(c.terms.iter().map(|t| Term { row: t.row + n, col: t.col + n, ..*t }));
        raw.extend(b.full_terms().map(|t| Term { col: t.col + n, ..t }));
        Ok(Self::from_raw(2 * n, raw))
    }

    /// `U E U†` for `U` with `dim` columns.
    pub fn congruence(&self, u: &CMatrix) -> Result<Self> {
        if u.ncols() != self.dim {
            return Err(Error::DimensionMismatch(format!("congruence by {}x{} on dim {}", u.nrows(), u.ncols(), self.dim)));
        }
        let nz: Vec<Vec<(usize, C64)>> = (0..u.ncols())
            .map(|a| (0..u.nrows()).filter(|&i| u[(i, a)].norm() > DROP_TOL).map(|i| (i, u[(i, a)])).collect())
            .collect();
        let mut raw = Vec::new();
        for t in self.full_terms() {
            for &(i, ui) in &nz[t.row] {
                for &(j, uj) in &nz[t.col] {
                    if i <= j {
                        raw.push(Term { row: i, col: j, param: t.param, coef: ui * t.coef * uj.conj() });
                    }
                }
            }
        }
        Ok(Self::from_raw(u.nrows(), raw))
    }

    /// The matrix at parameter values `x`.
    pub fn evaluate(&self, x: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for t in self.full_terms() {
            let v = t.param.map_or(1.0, |p| x[p]);
            m[(t.row, t.col)] += t.coef * v;
        }
        m
    }

    pub fn params(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.iter().filter_map(|t| t.param)
    }
}

/// A [`HermExpr`] annotated with its subsystem factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExpr {
    pub expr: HermExpr,
    pub shape: SubsystemShape,
}

impl LabeledExpr {
    pub fn new(expr: HermExpr, shape: SubsystemShape) -> Result<Self> {
        if expr.dim() != shape.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "expression dim {} vs shape {:?}",
                expr.dim(),
                shape.labels()
            )));
        }
        Ok(Self { expr, shape })
    }

    pub fn constant(op: &LabeledOperator) -> Self {
        Self { expr: HermExpr::constant(&op.op), shape: op.shape.clone() }
    }

    pub fn keep<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let mut pos = self.shape.positions(labels)?;
        pos.sort_unstable();
        let (kept, traced) = self.shape.split_table(&pos);
        let out = self.shape.at_positions(&pos);
        let expr = self
            .expr
            .map_pairs(out.total_dim(), |r, c| (traced[r] == traced[c]).then(|| (kept[r], kept[c])));
        Ok(Self { expr, shape: out })
    }

    pub fn trace_out<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let rest = self.shape.without(labels)?;
        self.keep(rest.labels())
    }

    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        if order.len() != self.shape.len() {
            return Err(Error::ShapeMismatch(format!("reorder needs all {} labels", self.shape.len())));
        }
        let pos = self.shape.positions(order)?;
        let table = self.shape.reorder_table(&pos);
        let expr = self.expr.map_pairs(self.expr.dim(), |r, c| Some((table[r], table[c])));
        Ok(Self { expr, shape: self.shape.at_positions(&pos) })
    }

    /// Conjugation by the swap of two equal-dimension subsystems.
    pub fn swap(&self, a: &str, b: &str) -> Result<Self> {
        let (pa, pb) = (self.shape.position(a)?, self.shape.position(b)?);
        if self.shape.dims()[pa] != self.shape.dims()[pb] {
            return Err(Error::DimensionMismatch(format!("cannot swap {a} and {b} of different dimension")));
        }
        let mut pos: Vec<usize> = (0..self.shape.len()).collect();
        pos.swap(pa, pb);
        let table = self.shape.reorder_table(&pos);
        let expr = self.expr.map_pairs(self.expr.dim(), |r, c| Some((table[r], table[c])));
        Ok(Self { expr, shape: self.shape.clone() })
    }

    pub fn relabel_all(&self, map: &[(&str, &str)]) -> Result<Self> {
        let labels: Vec<String> = self
            .shape
            .labels()
            .iter()
            .map(|l| map.iter().find(|(f, _)| f == l).map_or(l.clone(), |(_, t)| t.to_string()))
            .collect();
        Ok(Self { expr: self.expr.clone(), shape: SubsystemShape::new(self.shape.dims().to_vec(), labels)? })
    }

    /// `self ⊗ I` on the subsystems of `target` missing here, in `target` order.
    pub fn expand_to(&self, target: &SubsystemShape) -> Result<Self> {
        let pos = target.positions(self.shape.labels())?;
        for (&p, &d) in pos.iter().zip(self.shape.dims()) {
            if target.dims()[p] != d {
                return Err(Error::DimensionMismatch(format!("label {} changes dimension", target.labels()[p])));
            }
        }
        let (src, extra) = target.split_table(&pos);
        let n_src = self.shape.total_dim();
        let n_extra = target.total_dim() / n_src;
        // lift[s][e] = target index with source digit s and extra digit e
        let mut lift = vec![vec![0; n_extra]; n_src];
        for i in 0..target.total_dim() {
            lift[src[i]][extra[i]] = i;
        }
        let raw = self
            .expr
            .full_terms()
            .flat_map(|t| {
                let lift = &lift;
                (0..n_extra).filter_map(move |e| {
                    let (r, c) = (lift[t.row][e], lift[t.col][e]);
                    (r <= c).then_some(Term { row: r, col: c, ..t })
                })
            })
            .collect();
        Ok(Self { expr: HermExpr::from_raw(target.total_dim(), raw), shape: target.clone() })
    }

    /// Difference with both sides aligned to this expression's label order.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        let o = other.reorder(self.shape.labels())?;
        if o.shape != self.shape {
            return Err(Error::ShapeMismatch(format!("{:?} vs {:?}", self.shape, other.shape)));
        }
        Ok(Self { expr: self.expr.sub(&o.expr)?, shape: self.shape.clone() })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { expr: self.expr.scale(s), shape: self.shape.clone() }
    }
}
