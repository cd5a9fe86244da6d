//! Geometric Rényi divergences of states and channels, in bits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    map_on_support, mat_power_on_support, partial_trace, support_leakage, support_projector, weighted_geometric_mean,
    HermitianMatrix, SUPPORT_TOL,
};
use crate::quantum::ChoiChannel;

/// A divergence in bits; `value` is `f64::INFINITY` when the divergence diverges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceValue {
    pub value: f64,
    pub alpha: f64,
    pub support_condition_met: bool,
}

impl DivergenceValue {
    fn finite(value: f64, alpha: f64) -> Self {
        Self { value, alpha, support_condition_met: true }
    }

    fn infinite(alpha: f64, support_condition_met: bool) -> Self {
        Self { value: f64::INFINITY, alpha, support_condition_met }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

fn check_alpha(alpha: f64, lo_open: f64, hi: f64) -> Result<()> {
    if !(alpha > lo_open && alpha <= hi) {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    Ok(())
}

/// Tolerances for the numerical property checks of this module.
pub mod slack {
    /// `D̂_α` nondecreasing in `α`.
    pub const MONOTONE: f64 = 1e-7;
    /// Data processing under channels.
    pub const DATA_PROCESSING: f64 = 1e-7;
    /// Additivity of the channel divergence under tensor products.
    pub const ADDITIVITY: f64 = 1e-6;
    /// BS divergence of flagged pairs against the weighted sum of branches.
    pub const DIRECT_SUM: f64 = 1e-8;
    /// Step `h` for the `α = 1 ± h` estimates.
    pub const NEAR_ONE_STEP: f64 = 1.0 / 4096.0;
    /// `½(D̂_{1-h} + D̂_{1+h})` against the BS divergence; the remainder is `O(h²)`.
    pub const NEAR_ONE: f64 = 5e-6;
    /// Smallest `α` used for the `α → 0` limit.
    pub const NEAR_ZERO_ALPHA: f64 = 1e-3;
    /// `D̂_α - D̂_0` at [`NEAR_ZERO_ALPHA`]; first order in `α`.
    pub const NEAR_ZERO: f64 = 1e-2;
}

fn check_same_dim(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}

/// Pseudo-inverse with an absolute eigenvalue cutoff.
fn pinv_abs(m: &HermitianMatrix, cutoff: f64) -> HermitianMatrix {
    m.map_spectrum(|x| if x > cutoff { 1.0 / x } else { 0.0 })
}

/// `ω̃ = ω₀₀ - ω₀₁ ω₁₁⁻¹ ω₀₁†` for the block decomposition along `supp(τ)`.
pub fn projected_operator(omega: &HermitianMatrix, tau: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    check_same_dim(omega, tau)?;
    let pi = support_projector(tau, rank_tol)?;
    let perp = &HermitianMatrix::identity(tau.dim()) - &pi;
    let w = omega.matrix();
    let w00 = omega.sandwich(&pi);
    let w01 = pi.matrix() * w * perp.matrix();
    let w11 = omega.sandwich(&perp);
    let cutoff = rank_tol * omega.max_eigenvalue().max(0.0);
    let inv = pinv_abs(&w11, cutoff);
    let corr = HermitianMatrix::symmetrized(&(&w01 * inv.matrix() * w01.adjoint()));
    // The Schur complement is PSD; drop round-off measured against the scale of ω.
    Ok((&w00 - &corr).map_spectrum(|x| if x > cutoff { x } else { 0.0 }))
}

/// `τ^{-1/2} X τ^{-1/2}` on the support of `τ`.
fn relative_operator(x: &HermitianMatrix, tau: &HermitianMatrix, rank_tol: f64) -> Result<HermitianMatrix> {
    Ok(x.sandwich(&mat_power_on_support(tau, -0.5, rank_tol)?))
}

fn power_psd(m: &HermitianMatrix, p: f64, rank_tol: f64) -> Result<HermitianMatrix> {
    map_on_support(m, rank_tol, |x| x.powf(p))
}

/// Geometric Rényi quasi-entropy `Q̂_α(ω‖τ)`. For `α > 1` with `supp(ω) ⊄ supp(τ)` the
/// result is `+∞`.
pub fn geo_quasi_entropy_state(omega: &HermitianMatrix, tau: &HermitianMatrix, alpha: f64, rank_tol: f64) -> Result<f64> {
    check_alpha(alpha, 0.0, 2.0)?;
    check_same_dim(omega, tau)?;
    if alpha == 1.0 {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    let base = if alpha < 1.0 {
        projected_operator(omega, tau, rank_tol)?
    } else {
        if support_leakage(omega, tau, rank_tol)? > SUPPORT_TOL {
            return Ok(f64::INFINITY);
        }
        omega.clone()
    };
    let zeta = relative_operator(&base, tau, rank_tol)?;
    Ok(tau.inner(&power_psd(&zeta, alpha, rank_tol)?))
}

/// `D̂_α(ω‖τ) = log₂ Q̂_α / (α - 1)`, with `α = 1` given by the Belavkin–Staszewski entropy.
pub fn geo_entropy_state(omega: &HermitianMatrix, tau: &HermitianMatrix, alpha: f64, rank_tol: f64) -> Result<DivergenceValue> {
    if alpha == 1.0 {
        return bs_entropy_state(omega, tau, rank_tol);
    }
    let q = geo_quasi_entropy_state(omega, tau, alpha, rank_tol)?;
    if q.is_infinite() {
        return Ok(DivergenceValue::infinite(alpha, false));
    }
    if q <= 0.0 {
        return Ok(DivergenceValue::infinite(alpha, true));
    }
    Ok(DivergenceValue::finite(q.log2() / (alpha - 1.0), alpha))
}

/// Belavkin–Staszewski relative entropy `Tr[ω log₂(ω^{1/2} τ^{-1} ω^{1/2})]`.
pub fn bs_entropy_state(omega: &HermitianMatrix, tau: &HermitianMatrix, rank_tol: f64) -> Result<DivergenceValue> {
    check_same_dim(omega, tau)?;
    if support_leakage(omega, tau, rank_tol)? > SUPPORT_TOL {
        return Ok(DivergenceValue::infinite(1.0, false));
    }
    let wh = mat_power_on_support(omega, 0.5, rank_tol)?;
    let inner = mat_power_on_support(tau, -1.0, rank_tol)?.sandwich(&wh);
    let log = map_on_support(&inner, rank_tol, f64::log2)?;
    Ok(DivergenceValue::finite(omega.inner(&log), 1.0))
}

/// Min-geometric divergence `-log₂ Tr[τ Π_ζ]`, `ζ = τ^{-1/2} ω̃ τ^{-1/2}`.
pub fn min_geo_entropy_state(omega: &HermitianMatrix, tau: &HermitianMatrix, rank_tol: f64) -> Result<DivergenceValue> {
    let zeta = relative_operator(&projected_operator(omega, tau, rank_tol)?, tau, rank_tol)?;
    let t = tau.inner(&support_projector(&zeta, rank_tol)?);
    if t <= 0.0 {
        return Ok(DivergenceValue::infinite(0.0, true));
    }
    Ok(DivergenceValue::finite(-t.log2(), 0.0))
}

fn check_channels(n: &ChoiChannel, m: &ChoiChannel) -> Result<()> {
    if n.shape() != m.shape() || n.inputs() != m.inputs() {
        return Err(Error::ShapeMismatch(format!(
            "channels differ in shape: {:?} vs {:?}",
            n.shape().labels(),
            m.shape().labels()
        )));
    }
    Ok(())
}

fn trace_outputs(ch: &ChoiChannel, x: &HermitianMatrix) -> Result<HermitianMatrix> {
    partial_trace(x, ch.shape(), ch.inputs())
}

/// Channel divergence for `α ∈ (0, 1)`:
/// `log₂ λ_min(Tr_out[G_α(Γ^M, Γ̃^N)]) / (α - 1)`.
pub fn geo_entropy_channel_sub1(n: &ChoiChannel, m: &ChoiChannel, alpha: f64, rank_tol: f64) -> Result<DivergenceValue> {
    check_channels(n, m)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    let tilde = projected_operator(n.choi(), m.choi(), rank_tol)?;
    let g = weighted_geometric_mean(m.choi(), &tilde, alpha, rank_tol)?;
    let lmin = trace_outputs(m, &g)?.min_eigenvalue();
    if lmin <= 0.0 {
        return Ok(DivergenceValue::infinite(alpha, true));
    }
    Ok(DivergenceValue::finite(lmin.log2() / (alpha - 1.0), alpha))
}

/// Channel divergence for `α ∈ (1, 2]`:
/// `log₂ ‖Tr_out[G_α(Γ^M, Γ^N)]‖_∞ / (α - 1)`, infinite unless `supp(Γ^N) ⊆ supp(Γ^M)`.
pub fn geo_entropy_channel_super1(n: &ChoiChannel, m: &ChoiChannel, alpha: f64, rank_tol: f64) -> Result<DivergenceValue> {
    check_channels(n, m)?;
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    if support_leakage(n.choi(), m.choi(), rank_tol)? > SUPPORT_TOL {
        return Ok(DivergenceValue::infinite(alpha, false));
    }
    let g = weighted_geometric_mean(m.choi(), n.choi(), alpha, rank_tol)?;
    let lmax = trace_outputs(m, &g)?.max_eigenvalue();
    Ok(DivergenceValue::finite(lmax.log2() / (alpha - 1.0), alpha))
}

/// Belavkin–Staszewski channel divergence
/// `‖Tr_out[(Γ^N)^{1/2} log₂(Q) (Γ^N)^{1/2}]‖_∞`, `Q = (Γ^N)^{1/2} (Γ^M)^{-1} (Γ^N)^{1/2}`.
pub fn bs_entropy_channel(n: &ChoiChannel, m: &ChoiChannel, rank_tol: f64) -> Result<DivergenceValue> {
    check_channels(n, m)?;
    if support_leakage(n.choi(), m.choi(), rank_tol)? > SUPPORT_TOL {
        return Ok(DivergenceValue::infinite(1.0, false));
    }
    let nh = mat_power_on_support(n.choi(), 0.5, rank_tol)?;
    let q = mat_power_on_support(m.choi(), -1.0, rank_tol)?.sandwich(&nh);
    let log = map_on_support(&q, rank_tol, f64::log2)?;
    let x = trace_outputs(n, &log.sandwich(&nh))?;
    Ok(DivergenceValue::finite(x.spectral_norm(), 1.0))
}

/// Min-geometric channel divergence `-log₂ λ_min(Tr_out[(Γ^M)^{1/2} Π_ζ (Γ^M)^{1/2}])`,
/// the `α → 0` limit of [`geo_entropy_channel_sub1`].
pub fn min_geo_entropy_channel(n: &ChoiChannel, m: &ChoiChannel, rank_tol: f64) -> Result<DivergenceValue> {
    check_channels(n, m)?;
    let tilde = projected_operator(n.choi(), m.choi(), rank_tol)?;
    let zeta = relative_operator(&tilde, m.choi(), rank_tol)?;
    let pi = support_projector(&zeta, rank_tol)?;
    let mh = mat_power_on_support(m.choi(), 0.5, rank_tol)?;
    let lmin = trace_outputs(m, &pi.sandwich(&mh))?.min_eigenvalue();
    if lmin <= 0.0 {
        return Ok(DivergenceValue::infinite(0.0, true));
    }
    Ok(DivergenceValue::finite(-lmin.log2(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DEFAULT_RANK_TOL as TOL;
    use crate::quantum::{make_depolarizing, make_erasure, make_identity};

    fn d(v: &[f64]) -> HermitianMatrix {
        HermitianMatrix::diag(v)
    }

    // Classical Σ p^α q^{1-α}, the commuting-case oracle.
    fn classical_q(p: &[f64], q: &[f64], a: f64) -> f64 {
        p.iter().zip(q).filter(|(x, _)| **x > 0.0).map(|(x, y)| x.powf(a) * y.powf(1.0 - a)).sum()
    }

    #[test]
    fn quasi_entropy_examples() {
        let rho = HermitianMatrix::from_real_rows(&[&[0.6, 0.2], &[0.2, 0.4]]).unwrap();
        for a in [0.3, 0.9, 1.5, 2.0] {
            assert!((geo_quasi_entropy_state(&rho, &rho, a, TOL).unwrap() - 1.0).abs() < 1e-12);
        }
        let want = classical_q(&[0.75, 0.25], &[0.5, 0.5], 2.0);
        assert!((want - 1.25).abs() < 1e-15);
        let got = geo_quasi_entropy_state(&d(&[0.75, 0.25]), &d(&[0.5, 0.5]), 2.0, TOL).unwrap();
        assert!((got - want).abs() < 1e-12);
        let got = geo_quasi_entropy_state(&d(&[1.0, 0.0]), &d(&[0.5, 0.5]), 0.5, TOL).unwrap();
        assert!((got - classical_q(&[1.0, 0.0], &[0.5, 0.5], 0.5)).abs() < 1e-12);
        assert!((got - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn entropy_examples() {
        let v = geo_entropy_state(&d(&[0.75, 0.25]), &d(&[0.5, 0.5]), 2.0, TOL).unwrap();
        assert!((v.value - 1.25f64.log2()).abs() < 1e-12);
        let v = geo_entropy_state(&d(&[1.0, 0.0]), &d(&[0.5, 0.5]), 2.0, TOL).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        let v = geo_entropy_state(&d(&[0.5, 0.5]), &d(&[1.0, 0.0]), 1.5, TOL).unwrap();
        assert!(v.is_infinite() && !v.support_condition_met);
        let v = geo_entropy_state(&d(&[0.5, 0.5]), &d(&[1.0, 0.0]), 0.5, TOL).unwrap();
        assert!(v.value.is_finite());
    }

    #[test]
    fn bs_examples() {
        let kl = 0.9 * 1.8f64.log2() + 0.1 * 0.2f64.log2();
        let v = bs_entropy_state(&d(&[0.9, 0.1]), &d(&[0.5, 0.5]), TOL).unwrap();
        assert!((v.value - kl).abs() < 1e-12);
        assert!((kl - 0.5310).abs() < 1e-4);
        let v = bs_entropy_state(&d(&[1.0, 0.0]), &d(&[0.75, 0.25]), TOL).unwrap();
        assert!((v.value - (1.0f64 / 0.75).log2()).abs() < 1e-12);
        assert!(bs_entropy_state(&d(&[0.5, 0.5]), &d(&[1.0, 0.0]), TOL).unwrap().is_infinite());
    }

    #[test]
    fn min_geo_examples() {
        let rho = d(&[0.3, 0.7]);
        assert!(min_geo_entropy_state(&rho, &rho, TOL).unwrap().value.abs() < 1e-12);
        let v = min_geo_entropy_state(&d(&[1.0, 0.0]), &d(&[0.25, 0.75]), TOL).unwrap();
        assert!((v.value - 2.0).abs() < 1e-12);
        let third = 1.0 / 3.0;
        let v = min_geo_entropy_state(&d(&[0.5, 0.5, 0.0]), &d(&[third, third, third]), TOL).unwrap();
        assert!((v.value + (2.0f64 / 3.0).log2()).abs() < 1e-12);
    }

    #[test]
    fn channel_zero_on_equal() {
        let n = make_erasure(2, 0.3).unwrap();
        assert!(geo_entropy_channel_sub1(&n, &n, 0.5, TOL).unwrap().value.abs() < 1e-10);
        assert!(bs_entropy_channel(&n, &n, TOL).unwrap().value.abs() < 1e-10);
        assert!(min_geo_entropy_channel(&n, &n, TOL).unwrap().value.abs() < 1e-10);
        let dep = make_depolarizing(2, 0.2).unwrap();
        assert!(geo_entropy_channel_sub1(&n, &dep, 0.5, TOL).is_err());
        // Full-rank N against the replacer to the maximally mixed state.
        let pi = crate::quantum::make_replacer(2, &HermitianMatrix::identity(2).scale(0.5)).unwrap();
        assert!(min_geo_entropy_channel(&dep, &pi, TOL).unwrap().value.abs() < 1e-10);
        let id = make_identity(2).unwrap();
        let v = min_geo_entropy_channel(&id, &pi, TOL).unwrap().value;
        assert!((v - 2.0).abs() < 1e-10);
    }
}
