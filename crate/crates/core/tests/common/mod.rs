#![allow(dead_code)]

pub mod props;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unext::linalg::{CMatrix, HermitianMatrix, LabeledOperator, SubsystemShape, C64};
use unext::quantum::{choi_from_kraus, ChoiChannel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian entries.
pub fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let mut normal = || {
        let (u, v): (f64, f64) = (rng.gen_range(1e-12..1.0), rng.gen());
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    };
    CMatrix::from_fn(rows, cols, |_, _| C64::new(normal(), normal()))
}

pub fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    HermitianMatrix::symmetrized(&ginibre(d, d, rng))
}

/// Density matrix of the given rank.
pub fn random_state(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let g = ginibre(d, rank, rng);
    let m = HermitianMatrix::symmetrized(&(&g * g.adjoint()));
    let t = m.trace();
    m.scale(1.0 / t)
}

pub fn random_unitary(d: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix column phases so the distribution is Haar.
    let phases = CMatrix::from_fn(d, d, |i, j| if i == j { r[(i, i)] / r[(i, i)].norm() } else { C64::new(0.0, 0.0) });
    q * phases
}

/// Kraus operators of a random channel `d_in → d_out`.
pub fn random_kraus(d_in: usize, d_out: usize, n_kraus: usize, rng: &mut ChaCha8Rng) -> Vec<CMatrix> {
    assert!(n_kraus * d_out >= d_in, "{n_kraus} Kraus operators cannot be trace preserving from {d_in} to {d_out}");
    let g = ginibre(n_kraus * d_out, d_in, rng);
    let gg = HermitianMatrix::symmetrized(&(g.adjoint() * &g));
    let v = &g * gg.map_spectrum(|x| 1.0 / x.sqrt()).matrix();
    (0..n_kraus).map(|k| v.rows(k * d_out, d_out).into_owned()).collect()
}

/// Channel `A → B` with `n_kraus` random Kraus operators.
pub fn random_channel(d_in: usize, d_out: usize, n_kraus: usize, rng: &mut ChaCha8Rng) -> ChoiChannel {
    choi_from_kraus(&random_kraus(d_in, d_out, n_kraus, rng), d_in, d_out).unwrap()
}

/// Same Choi matrix with the input split into `ins` and the output into `outs`.
pub fn with_labels(ch: &ChoiChannel, ins: &[(&str, usize)], outs: &[(&str, usize)]) -> ChoiChannel {
    let pairs: Vec<(&str, usize)> = ins.iter().chain(outs).copied().collect();
    let op = labeled(ch.choi().clone(), &pairs);
    let i: Vec<&str> = ins.iter().map(|p| p.0).collect();
    let o: Vec<&str> = outs.iter().map(|p| p.0).collect();
    if ch.is_cp_only() {
        ChoiChannel::new_cp_only(op, &i, &o).unwrap()
    } else {
        ChoiChannel::new(op, &i, &o).unwrap()
    }
}

/// Instrument elements `Σ_{k ∈ group x} K_k · K_k†` from one Kraus set, grouped round robin.
pub fn instrument_from_kraus(kraus: &[CMatrix], outcomes: usize) -> Vec<ChoiChannel> {
    let (d_out, d_in) = kraus[0].shape();
    (0..outcomes)
        .map(|x| {
            let group: Vec<CMatrix> = kraus.iter().skip(x).step_by(outcomes).cloned().collect();
            choi_from_kraus(&group, d_in, d_out).unwrap()
        })
        .collect()
}

/// Unitary channel `ρ ↦ U ρ U†`.
pub fn unitary_channel(u: &CMatrix) -> ChoiChannel {
    choi_from_kraus(std::slice::from_ref(u), u.ncols(), u.nrows()).unwrap()
}

pub fn diag_state(p: &[f64]) -> HermitianMatrix {
    HermitianMatrix::diag(p)
}

/// Random probability vector with entries bounded away from zero.
pub fn random_probs(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let s: f64 = v.iter().sum();
    v.into_iter().map(|x| x / s).collect()
}

pub fn labeled(m: HermitianMatrix, pairs: &[(&str, usize)]) -> LabeledOperator {
    LabeledOperator::new(m, SubsystemShape::from_pairs(pairs).unwrap()).unwrap()
}

/// Block-diagonal `Σ_x w_x |x><x| ⊗ m_x`.
pub fn flagged(weights: &[f64], blocks: &[HermitianMatrix]) -> HermitianMatrix {
    let n = blocks.len();
    let mut out: Option<HermitianMatrix> = None;
    for (x, (w, b)) in weights.iter().zip(blocks).enumerate() {
        let term = HermitianMatrix::basis_projector(n, x).kron(b).scale(*w);
        out = Some(match out {
            None => term,
            Some(o) => &o + &term,
        });
    }
    out.unwrap()
}
