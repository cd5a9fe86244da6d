//! Randomized divergence properties, one instance per seed.

use rand::Rng;
use unext::divergence::*;
use unext::divergence::slack::{
    ADDITIVITY as ADDITIVITY_SLACK, DATA_PROCESSING as DPI_SLACK, DIRECT_SUM as DIRECT_SUM_SLACK,
    MONOTONE as MONOTONE_SLACK, NEAR_ONE as NEAR_ONE_SLACK, NEAR_ONE_STEP, NEAR_ZERO as NEAR_ZERO_SLACK,
    NEAR_ZERO_ALPHA,
};
use unext::linalg::{HermitianMatrix, SubsystemShape, DEFAULT_RANK_TOL};
use unext::quantum::{apply_channel, choi_from_kraus, ChoiChannel};
use unext::sdp::geo_divergence_channel_sdp;

use super::*;

type Check = std::result::Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn geo(w: &HermitianMatrix, t: &HermitianMatrix, alpha: f64) -> f64 {
    geo_entropy_state(w, t, alpha, DEFAULT_RANK_TOL).unwrap().value
}

fn channel_div(n: &ChoiChannel, m: &ChoiChannel, alpha: f64) -> f64 {
    let v = if alpha == 1.0 {
        bs_entropy_channel(n, m, DEFAULT_RANK_TOL)
    } else if alpha < 1.0 {
        geo_entropy_channel_sub1(n, m, alpha, DEFAULT_RANK_TOL)
    } else {
        geo_entropy_channel_super1(n, m, alpha, DEFAULT_RANK_TOL)
    };
    v.unwrap().value
}

/// `D̂_α(ω‖τ)` is nondecreasing on the grid `α = 0.1, 0.2, …, 2`.
pub fn alpha_monotone(seed: u64) -> Check {
    let mut r = rng(seed);
    let d = r.gen_range(2..=3);
    let w = random_state(d, r.gen_range(1..=d), &mut r);
    let t = random_state(d, d, &mut r);
    let vals: Vec<f64> = (1..=20).map(|i| geo(&w, &t, i as f64 / 10.0)).collect();
    for (i, pair) in vals.windows(2).enumerate() {
        ensure(pair[1] >= pair[0] - MONOTONE_SLACK, || {
            format!("seed {seed}: D at alpha {:.1} = {} > {}", (i + 1) as f64 / 10.0, pair[0], pair[1])
        })?;
    }
    Ok(())
}

/// `D̂_α(Λ(ρ)‖Λ(σ)) ≤ D̂_α(ρ‖σ)` for a random channel and `α ∈ (0, 2]`.
pub fn data_processing(seed: u64) -> Check {
    let mut r = rng(seed);
    let (d, d_out) = (r.gen_range(2..=3), r.gen_range(2..=3));
    let alpha: f64 = r.gen_range(0.05..=2.0);
    let w = random_state(d, r.gen_range(1..=d), &mut r);
    let t = random_state(d, d, &mut r);
    let ch = random_channel(d, d_out, r.gen_range(d.div_ceil(d_out)..=3), &mut r);
    let shape = SubsystemShape::from_pairs(&[("A", d)]).unwrap();
    let lw = apply_channel(&ch, &w, &shape, "A").unwrap().op;
    let lt = apply_channel(&ch, &t, &shape, "A").unwrap().op;
    let (before, after) = (geo(&w, &t, alpha), geo(&lw, &lt, alpha));
    ensure(after <= before + DPI_SLACK, || format!("seed {seed}: alpha {alpha}: {after} > {before}"))
}

/// `D̂_α(N₁⊗N₂‖M₁⊗M₂) = D̂_α(N₁‖M₁) + D̂_α(N₂‖M₂)` on qubit channels.
pub fn tensor_additivity(seed: u64) -> Check {
    let mut r = rng(seed);
    let alpha = match seed % 3 {
        0 => r.gen_range(0.05..0.95),
        1 => 1.0,
        _ => r.gen_range(1.05..=2.0),
    };
    let ch = |r: &mut rand_chacha::ChaCha8Rng, k: usize, i: &str, o: &str| {
        with_labels(&random_channel(2, 2, k, r), &[(i, 2)], &[(o, 2)])
    };
    let n1 = ch(&mut r, 2, "A1", "B1");
    let m1 = ch(&mut r, 4, "A1", "B1");
    let n2 = ch(&mut r, 2, "A2", "B2");
    let m2 = ch(&mut r, 4, "A2", "B2");
    let joint = channel_div(&n1.tensor(&n2).unwrap(), &m1.tensor(&m2).unwrap(), alpha);
    let parts = channel_div(&n1, &m1, alpha) + channel_div(&n2, &m2, alpha);
    ensure((joint - parts).abs() <= ADDITIVITY_SLACK, || format!("seed {seed}: alpha {alpha}: {joint} vs {parts}"))
}

/// `D(⊕ p_x ω_x ‖ ⊕ q_x τ_x) = Σ p_x [log₂(p_x/q_x) + D(ω_x‖τ_x)]` for the BS divergence.
pub fn direct_sum(seed: u64) -> Check {
    let mut r = rng(seed);
    let (m, d) = (r.gen_range(2..=3), r.gen_range(2..=3));
    let p = random_probs(m, &mut r);
    let q = if seed.is_multiple_of(2) { p.clone() } else { random_probs(m, &mut r) };
    let ws: Vec<HermitianMatrix> = (0..m).map(|_| random_state(d, r.gen_range(1..=d), &mut r)).collect();
    let ts: Vec<HermitianMatrix> = (0..m).map(|_| random_state(d, d, &mut r)).collect();
    let joint = bs_entropy_state(&flagged(&p, &ws), &flagged(&q, &ts), DEFAULT_RANK_TOL).unwrap().value;
    let parts: f64 = (0..m)
        .map(|x| p[x] * ((p[x] / q[x]).log2() + bs_entropy_state(&ws[x], &ts[x], DEFAULT_RANK_TOL).unwrap().value))
        .sum();
    ensure((joint - parts).abs() <= DIRECT_SUM_SLACK, || format!("seed {seed}: {joint} vs {parts}"))
}

/// `D̂_{1±h}` brackets the BS divergence and their average matches it, for states and channels.
pub fn alpha_to_one(seed: u64) -> Check {
    let mut r = rng(seed);
    let d = r.gen_range(2..=3);
    let w = random_state(d, r.gen_range(1..=d), &mut r);
    let t = random_state(d, d, &mut r);
    let bs = bs_entropy_state(&w, &t, DEFAULT_RANK_TOL).unwrap().value;
    let (lo, hi) = (geo(&w, &t, 1.0 - NEAR_ONE_STEP), geo(&w, &t, 1.0 + NEAR_ONE_STEP));
    ensure(lo <= bs + 1e-9 && bs <= hi + 1e-9, || format!("seed {seed}: {lo} <= {bs} <= {hi} fails"))?;
    ensure((0.5 * (lo + hi) - bs).abs() <= NEAR_ONE_SLACK, || format!("seed {seed}: state average {} vs {bs}", 0.5 * (lo + hi)))?;

    let n = random_channel(2, 2, 2, &mut r);
    let m = random_channel(2, 2, 4, &mut r);
    let bs = bs_entropy_channel(&n, &m, DEFAULT_RANK_TOL).unwrap().value;
    let (lo, hi) = (channel_div(&n, &m, 1.0 - NEAR_ONE_STEP), channel_div(&n, &m, 1.0 + NEAR_ONE_STEP));
    ensure(lo <= bs + 1e-9 && bs <= hi + 1e-9, || format!("seed {seed}: channel {lo} <= {bs} <= {hi} fails"))?;
    ensure((0.5 * (lo + hi) - bs).abs() <= NEAR_ONE_SLACK, || format!("seed {seed}: channel average {} vs {bs}", 0.5 * (lo + hi)))
}

/// `D̂_α → D̂₀` as `α → 0⁺`, for states and channels with rank-deficient first argument.
pub fn alpha_to_zero(seed: u64) -> Check {
    let mut r = rng(seed);
    let d = r.gen_range(2..=3);
    let w = random_state(d, r.gen_range(1..d), &mut r);
    let t = random_state(d, d, &mut r);
    let zero = min_geo_entropy_state(&w, &t, DEFAULT_RANK_TOL).unwrap().value;
    let near = geo(&w, &t, NEAR_ZERO_ALPHA);
    ensure(zero <= near + 1e-9 && near - zero <= NEAR_ZERO_SLACK, || format!("seed {seed}: state {near} vs {zero}"))?;

    let kraus = random_kraus(2, 3, 1, &mut r);
    let n = choi_from_kraus(&kraus, 2, 3).unwrap();
    let m = random_channel(2, 3, if seed.is_multiple_of(2) { 3 } else { 6 }, &mut r);
    let zero = min_geo_entropy_channel(&n, &m, DEFAULT_RANK_TOL).unwrap().value;
    let near = geo_entropy_channel_sub1(&n, &m, NEAR_ZERO_ALPHA, DEFAULT_RANK_TOL).unwrap().value;
    if zero.is_infinite() && near.is_infinite() {
        return Ok(());
    }
    ensure(zero <= near + 1e-9 && near - zero <= NEAR_ZERO_SLACK, || format!("seed {seed}: channel {near} vs {zero}"))
}

/// `D̂_α(N(ρ)‖M(σ)) ≤ D̂_α(N‖M) + D̂_α(ρ‖σ)` on classical channels and diagonal states.
pub fn chain_rule_classical(seed: u64) -> Check {
    let mut r = rng(seed);
    let d = 3;
    let alpha = if seed.is_multiple_of(2) { r.gen_range(0.05..0.95) } else { 1.0 };
    let stochastic = |r: &mut rand_chacha::ChaCha8Rng| -> ChoiChannel {
        let cols: Vec<Vec<f64>> = (0..d).map(|_| random_probs(d, r)).collect();
        let mut diag = Vec::new();
        for col in &cols {
            diag.extend_from_slice(col);
        }
        ChoiChannel::new(labeled(HermitianMatrix::diag(&diag), &[("A", d), ("B", d)]), &["A"], &["B"]).unwrap()
    };
    let (n, m) = (stochastic(&mut r), stochastic(&mut r));
    let rho = HermitianMatrix::diag(&random_probs(d, &mut r));
    let sigma = HermitianMatrix::diag(&random_probs(d, &mut r));
    let shape = SubsystemShape::from_pairs(&[("A", d)]).unwrap();
    let out_n = apply_channel(&n, &rho, &shape, "A").unwrap().op;
    let out_m = apply_channel(&m, &sigma, &shape, "A").unwrap().op;
    let lhs = geo(&out_n, &out_m, alpha);
    let rhs = channel_div(&n, &m, alpha) + geo(&rho, &sigma, alpha);
    ensure(lhs <= rhs + 1e-9, || format!("seed {seed}: {lhs} > {rhs}"))
}

pub const SDP_CLOSED_FORM_SLACK: f64 = 1e-5;

/// The chain SDP at `α = 1 + 2^{-ℓ}` agrees with the closed form for full-rank `Γ^M`.
pub fn sdp_matches_closed_form(seed: u64) -> Check {
    let mut r = rng(seed);
    let (d_in, d_out) = (r.gen_range(1..=2), r.gen_range(2..=3));
    let ell = r.gen_range(0..=3u32);
    let n = random_channel(d_in, d_out, r.gen_range(1..=2), &mut r);
    let m = random_channel(d_in, d_out, d_out * 2, &mut r);
    let sdp = geo_divergence_channel_sdp(&n, &m, ell, 1e-10).map_err(|e| e.to_string())?.0;
    let closed = channel_div(&n, &m, 1.0 + (-(ell as f64)).exp2());
    ensure((sdp - closed).abs() <= SDP_CLOSED_FORM_SLACK, || format!("seed {seed}: ell {ell}: sdp {sdp} vs {closed}"))
}
