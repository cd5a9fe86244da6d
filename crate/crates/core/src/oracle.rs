//! Closed-form values and bounds for the identity, erasure, depolarizing and
//! semicausal erasure channels.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::quantum::ChoiChannel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleValue {
    pub value_bits: f64,
    pub regime: String,
    pub is_exact: bool,
}

impl OracleValue {
    fn new(value_bits: f64, regime: impl Into<String>, is_exact: bool) -> Self {
        Self { value_bits, regime: regime.into(), is_exact }
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
    }
    Ok(())
}

fn check_p(p: f64, max: f64) -> Result<()> {
    if !(0.0..=max).contains(&p) {
        return Err(Error::InvalidProbability { name: "p", value: p });
    }
    Ok(())
}

/// `x log₂(x / y)` with `0 log 0 = 0`.
fn xlogxy(x: f64, y: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (x / y).log2()
    }
}

/// Identity channel: `log₂ d`.
pub fn identity_unext(d: usize) -> Result<OracleValue> {
    check_d(d)?;
    Ok(OracleValue::new((d as f64).log2(), "all", true))
}

/// Belavkin–Staszewski upper bound for the erasure channel.
pub fn erasure_bs_bound(d: usize, p: f64) -> Result<OracleValue> {
    check_d(d)?;
    check_p(p, 1.0)?;
    let df = d as f64;
    if p > 0.5 {
        return Ok(OracleValue::new(0.0, "p > 1/2", true));
    }
    if p <= 1.0 / (df + 1.0) {
        let v = (1.0 - p) * df.log2() - 0.5 * ((df * df - 1.0) * p + 1.0).log2();
        return Ok(OracleValue::new(v, "p <= 1/(d+1)", p == 0.0));
    }
    let v = 0.5 * (1.0 - p) * ((1.0 - p) / p).log2() + 0.5 * p * (p / (1.0 - p)).log2();
    Ok(OracleValue::new(v, "1/(d+1) < p <= 1/2", p == 0.5))
}

/// Upper bound on the α-geometric unextendible entanglement of the erasure channel,
/// including the factor ½ of the definition. Zero for `p > 1/2`.
pub fn erasure_alpha_bound(d: usize, p: f64, alpha: f64) -> Result<OracleValue> {
    check_d(d)?;
    check_p(p, 1.0)?;
    if !(alpha > 0.0 && alpha <= 2.0) || alpha == 1.0 {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    if p > 0.5 {
        return Ok(OracleValue::new(0.0, "p > 1/2", false));
    }
    let df = d as f64;
    let a = alpha;
    let branch = 1.0 / (df.powf(1.0 / a) + 1.0);
    let (inner, regime) = if p <= branch {
        let k = df.powf(2.0 / a) * p / (df * (1.0 - p));
        let x = (1.0 - p - p * df * k) / (k + df);
        let second = if p > 0.0 { p.powf(a) * (1.0 - p - df * x).powf(1.0 - a) } else { 0.0 };
        ((df * (1.0 - p)).powf(a) * (p * df + x).powf(1.0 - a) / df + second, "p <= 1/(d^(1/alpha)+1)")
    } else {
        ((1.0 - p).powf(a) * p.powf(1.0 - a) + p.powf(a) * (1.0 - p).powf(1.0 - a), "p > 1/(d^(1/alpha)+1)")
    };
    let v = 0.5 * inner.log2() / (a - 1.0);
    Ok(OracleValue::new(v.max(0.0), regime, false))
}

/// How the comparison fidelity `F'` is selected in [`depolarizing_bs_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FPrimeRule {
    /// `F' = min{F'_hi, F}`: reproduces `log₂ d` at `p = 0`.
    Min,
    /// `F' = max{F'_hi, F}`: kept for comparison only.
    Max,
}

/// `F'_hi = (2F-1)/d² + 2√((d²-1)(1-F)F)/d² - F + 1`.
pub fn depolarizing_f_prime_hi(d: usize, f: f64) -> f64 {
    let d2 = (d * d) as f64;
    (2.0 * f - 1.0) / d2 + 2.0 * ((d2 - 1.0) * (1.0 - f) * f).max(0.0).sqrt() / d2 - f + 1.0
}

/// Exact Belavkin–Staszewski unextendible entanglement of the depolarizing channel.
pub fn depolarizing_bs(d: usize, p: f64) -> Result<OracleValue> {
    depolarizing_bs_with(d, p, FPrimeRule::Min)
}

pub fn depolarizing_bs_with(d: usize, p: f64, rule: FPrimeRule) -> Result<OracleValue> {
    check_d(d)?;
    let df = d as f64;
    let d2 = df * df;
    check_p(p, d2 / (d2 - 1.0) + 1e-12)?;
    let threshold = df / (2.0 * (df + 1.0));
    if p >= threshold {
        return Ok(OracleValue::new(0.0, "p >= d/(2(d+1))", true));
    }
    let f = 1.0 - p + p / d2;
    let hi = depolarizing_f_prime_hi(d, f);
    let fp = match rule {
        FPrimeRule::Min => hi.min(f),
        FPrimeRule::Max => hi.max(f),
    };
    let v = 0.5 * (xlogxy(f, fp) + xlogxy(1.0 - f, 1.0 - fp));
    Ok(OracleValue::new(v.max(0.0), "p < d/(2(d+1))", true))
}

/// Semicausal erasure channel: `(1-p) log₂ d`.
pub fn semicausal_erasure_bs(d: usize, p: f64) -> Result<OracleValue> {
    check_d(d)?;
    check_p(p, 1.0)?;
    Ok(OracleValue::new((1.0 - p) * (d as f64).log2(), "all", true))
}

/// The min-geometric unextendible entanglement vanishes for channels with full-rank Choi operator.
pub fn full_rank_min_geo(n: &ChoiChannel) -> Result<OracleValue> {
    let v = n.choi().eigenvalues();
    let (max, min) = (v[0], *v.last().unwrap());
    if min > DEFAULT_RANK_TOL * max {
        Ok(OracleValue::new(0.0, "full-rank Choi operator", true))
    } else {
        Err(Error::NotApplicable(format!("Choi operator is rank deficient (min eigenvalue {min:.3e})")))
    }
}
