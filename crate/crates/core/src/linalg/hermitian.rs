use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const DEFAULT_HERM_TOL: f64 = 1e-10;
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Dense complex Hermitian matrix. The stored entries are always exactly
/// Hermitian; `herm_tol` records the tolerance the input was checked against.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
    herm_tol: f64,
}

/// Eigendecomposition with eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

impl HermitianMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tol(m, DEFAULT_HERM_TOL)
    }

    /// Checks `max |m_ij - conj(m_ji)| <= tol * max(1, max |m_ij|)` and symmetrizes.
    pub fn with_tol(m: CMatrix, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::ShapeMismatch(format!("{}x{} is not a nonempty square matrix", m.nrows(), m.ncols())));
        }
        let scale = m.iter().fold(1.0f64, |a, z| a.max(z.norm()));
        let dev = hermitian_deviation(&m);
        if dev > tol * scale {
            return Err(Error::NonHermitian { deviation: dev, tol });
        }
        Ok(Self { m: symmetrize(&m), herm_tol: tol })
    }

    /// Takes the Hermitian part `(m + m†)/2` without checking.
    pub fn symmetrized(m: &CMatrix) -> Self {
        Self { m: symmetrize(m), herm_tol: DEFAULT_HERM_TOL }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(|x| C64::new(x, 0.0)))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j], 0.0)))
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            m: CMatrix::from_diagonal(&DVector::from_iterator(n, values.iter().map(|&x| C64::new(x, 0.0)))),
            herm_tol: DEFAULT_HERM_TOL,
        }
    }

    pub fn identity(d: usize) -> Self {
        Self { m: CMatrix::identity(d, d), herm_tol: DEFAULT_HERM_TOL }
    }

    pub fn zeros(d: usize) -> Self {
        Self { m: CMatrix::zeros(d, d), herm_tol: DEFAULT_HERM_TOL }
    }

    /// `|v><v|`
    pub fn projector(v: &DVector<C64>) -> Self {
        Self::symmetrized(&(v * v.adjoint()))
    }

    /// Basis projector `|i><i|` in dimension `d`.
    pub fn basis_projector(d: usize, i: usize) -> Self {
        let mut m = CMatrix::zeros(d, d);
        m[(i, i)] = C64::new(1.0, 0.0);
        Self { m, herm_tol: DEFAULT_HERM_TOL }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn herm_tol(&self) -> f64 {
        self.herm_tol
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: self.m.scale(s), herm_tol: self.herm_tol }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self { m: self.m.kronecker(&other.m), herm_tol: self.herm_tol }
    }

    /// `U H U†`
    pub fn conjugate(&self, u: &CMatrix) -> Self {
        Self::symmetrized(&(u * &self.m * u.adjoint()))
    }

    /// `A H A` for Hermitian `A`.
    pub fn sandwich(&self, a: &Self) -> Self {
        Self::symmetrized(&(&a.m * &self.m * &a.m))
    }

    /// `Tr[self * other]`, real for Hermitian pairs.
    pub fn inner(&self, other: &Self) -> f64 {
        self.m.component_mul(&other.m.transpose()).sum().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.m - &other.m).iter().fold(0.0, |a, z| a.max(z.norm()))
    }

    pub fn eig(&self) -> HermEig {
        herm_eig(self)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.m.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues().last().unwrap()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Applies `f` to the eigenvalues.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Self {
        let e = self.eig();
        rebuild(&e, &e.values.iter().map(|&x| f(x)).collect::<Vec<_>>())
    }
}

fn rebuild(e: &HermEig, vals: &[f64]) -> HermitianMatrix {
    let n = e.vectors.nrows();
    let mut scaled = e.vectors.clone();
    for (j, &v) in vals.iter().enumerate() {
        for i in 0..n {
            scaled[(i, j)] *= v;
        }
    }
    HermitianMatrix::symmetrized(&(scaled * e.vectors.adjoint()))
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix { m: &self.m + &rhs.m, herm_tol: self.herm_tol }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        HermitianMatrix { m: &self.m - &rhs.m, herm_tol: self.herm_tol }
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, rhs: f64) -> HermitianMatrix {
        self.scale(rhs)
    }
}

pub fn herm_eig(m: &HermitianMatrix) -> HermEig {
    let se = m.m.clone().symmetric_eigen();
    let n = m.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[b].total_cmp(&se.eigenvalues[a]));
    let values = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    HermEig { values, vectors }
}

/// Threshold below which eigenvalues are treated as outside the support.
fn support_threshold(values: &[f64], rank_tol: f64) -> Result<f64> {
    let scale = values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let min = values.last().copied().unwrap_or(0.0);
    if min < -rank_tol * scale {
        return Err(Error::NegativeOperator { min_eigenvalue: min });
    }
    Ok(rank_tol * values.first().copied().unwrap_or(0.0).max(0.0))
}

/// Projector onto the span of eigenvectors with `λ > rank_tol · λ_max`.
pub fn support_projector(m: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    mat_power_on_support(m, 0.0, rank_tol)
}

/// `m^p` on the support of `m`, zero elsewhere. `p = 0` gives the support projector.
pub fn mat_power_on_support(m: &HermitianMatrix, p: f64, rank_tol: f64) -> Result<HermitianMatrix> {
    map_on_support(m, rank_tol, |x| if p == 0.0 { 1.0 } else { x.powf(p) })
}

/// Base-2 logarithm on the support of `m`.
pub fn log2_on_support(m: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    map_on_support(m, rank_tol, f64::log2)
}

pub fn map_on_support(m: &HermitianMatrix, rank_tol: f64, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let e = m.eig();
    let thr = support_threshold(&e.values, rank_tol)?;
    let vals: Vec<f64> = e.values.iter().map(|&x| if x > thr && x > 0.0 { f(x) } else { 0.0 }).collect();
    Ok(rebuild(&e, &vals))
}

/// Columns spanning the support of a PSD matrix, orthonormal. Real matrices get
/// real columns.
pub fn support_isometry(m: &HermitianMatrix, rank_tol: f64) -> Result<CMatrix> {
    let n = m.dim();
    let (values, vectors) = if m.m.iter().all(|z| z.im == 0.0) {
        let se = m.m.map(|z| z.re).symmetric_eigen();
        (se.eigenvalues.iter().copied().collect::<Vec<_>>(), se.eigenvectors.map(|x| C64::new(x, 0.0)))
    } else {
        let se = m.m.clone().symmetric_eigen();
        (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
    };
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let thr = support_threshold(&sorted, rank_tol)?;
    let cols: Vec<usize> = (0..n).filter(|&j| values[j] > thr && values[j] > 0.0).collect();
    Ok(CMatrix::from_fn(n, cols.len(), |i, j| vectors[(i, cols[j])]))
}

/// Rank of a PSD matrix under the relative threshold.
pub fn support_rank(m: &HermitianMatrix, rank_tol: f64) -> Result<usize> {
    let v = m.eigenvalues();
    let thr = support_threshold(&v, rank_tol)?;
    Ok(v.iter().filter(|&&x| x > thr && x > 0.0).count())
}

/// Relative size of the part of `y` lying outside the support of `x`:
/// `λ_max(Π⊥ y Π⊥) / λ_max(y)`.
pub fn support_leakage(y: &HermitianMatrix, x: &HermitianMatrix, rank_tol: f64) -> Result<f64> {
    let pi = support_projector(x, rank_tol)?;
    let perp = &HermitianMatrix::identity(x.dim()) - &pi;
    let ymax = y.max_eigenvalue();
    if ymax <= 0.0 {
        return Ok(0.0);
    }
    Ok(y.sandwich(&perp).max_eigenvalue().max(0.0) / ymax)
}

/// Relative leakage above which `supp(y) ⊄ supp(x)`.
pub const SUPPORT_TOL: f64 = 1e-8;

/// Weighted matrix geometric mean `G_α(x, y) = x^{1/2} (x^{-1/2} y x^{-1/2})^α x^{1/2}`.
pub fn weighted_geometric_mean(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    alpha: f64,
    rank_tol: f64,
) -> Result<HermitianMatrix> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", x.dim(), y.dim())));
    }
    support_threshold(&y.eigenvalues(), rank_tol)?;
    if !(0.0..=1.0).contains(&alpha) && support_leakage(y, x, rank_tol)? > SUPPORT_TOL {
        return Err(Error::SupportViolation(format!("supp(y) not contained in supp(x) at alpha = {alpha}")));
    }
    let xh = mat_power_on_support(x, 0.5, rank_tol)?;
    let xih = mat_power_on_support(x, -0.5, rank_tol)?;
    let inner = y.sandwich(&xih);
    let p = mat_power_on_support(&inner, alpha, rank_tol)?;
    Ok(p.sandwich(&xh))
}
