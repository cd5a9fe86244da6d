use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered tensor factorization of a Hilbert space, one label per factor.
///
/// The first label is the most significant digit of the composite index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemShape {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl SubsystemShape {
    pub fn new<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if dims.len() != labels.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} dims but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if let Some(d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidDimension(format!("subsystem dimension {d}")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::ShapeMismatch(format!("duplicate label {l}")));
            }
        }
        Ok(Self { dims, labels })
    }

    /// Shape from `(label, dim)` pairs.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Self::new(
            pairs.iter().map(|p| p.1).collect(),
            pairs.iter().map(|p| p.0).collect(),
        )
    }

    pub fn empty() -> Self {
        Self { dims: vec![], labels: vec![] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.labels.iter().any(|l| l == label)
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::ShapeMismatch(format!("unknown label {label} in {:?}", self.labels)))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.dims[self.position(label)?])
    }

    /// Product of the dimensions of the given labels.
    pub fn dim_of_all<S: AsRef<str>>(&self, labels: &[S]) -> Result<usize> {
        labels.iter().map(|l| self.dim_of(l.as_ref())).product()
    }

    pub fn positions<S: AsRef<str>>(&self, labels: &[S]) -> Result<Vec<usize>> {
        let pos: Vec<usize> = labels.iter().map(|l| self.position(l.as_ref())).collect::<Result<_>>()?;
        for (i, p) in pos.iter().enumerate() {
            if pos[..i].contains(p) {
                return Err(Error::ShapeMismatch(format!("label {} repeated", self.labels[*p])));
            }
        }
        Ok(pos)
    }

    /// Sub-shape made of the given labels, kept in this shape's order.
    pub fn select<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let mut pos = self.positions(labels)?;
        pos.sort_unstable();
        Ok(self.at_positions(&pos))
    }

    /// Sub-shape with the given labels removed.
    pub fn without<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let pos = self.positions(labels)?;
        let rest: Vec<usize> = (0..self.len()).filter(|i| !pos.contains(i)).collect();
        Ok(self.at_positions(&rest))
    }

    /// Sub-shape in exactly the given label order.
    pub fn reordered<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let pos = self.positions(labels)?;
        Ok(self.at_positions(&pos))
    }

    pub(crate) fn at_positions(&self, pos: &[usize]) -> Self {
        Self {
            dims: pos.iter().map(|&p| self.dims[p]).collect(),
            labels: pos.iter().map(|&p| self.labels[p].clone()).collect(),
        }
    }

    /// Concatenation; labels must be disjoint.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        Self::new(dims, labels)
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        let p = self.position(from)?;
        let mut labels = self.labels.clone();
        labels[p] = to.to_string();
        Self::new(self.dims.clone(), labels)
    }

    pub fn digits(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for i in (0..self.len()).rev() {
            out[i] = idx % self.dims[i];
            idx /= self.dims[i];
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.dims).fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// For every composite index, the composite index of the factors at
    /// `pos` (in the given order) and of the remaining factors (in shape order).
    pub(crate) fn split_table(&self, pos: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let n = self.total_dim();
        let rest: Vec<usize> = (0..self.len()).filter(|i| !pos.contains(i)).collect();
        let mut sel = Vec::with_capacity(n);
        let mut oth = Vec::with_capacity(n);
        let mut dig = vec![0usize; self.len()];
        for _ in 0..n {
            sel.push(pos.iter().fold(0, |a, &p| a * self.dims[p] + dig[p]));
            oth.push(rest.iter().fold(0, |a, &p| a * self.dims[p] + dig[p]));
            for i in (0..self.len()).rev() {
                dig[i] += 1;
                if dig[i] < self.dims[i] {
                    break;
                }
                dig[i] = 0;
            }
        }
        (sel, oth)
    }

    /// Map from composite index in this shape to composite index in the
    /// shape reordered as `pos`.
    pub(crate) fn reorder_table(&self, pos: &[usize]) -> Vec<usize> {
        self.split_table(pos).0
    }
}
