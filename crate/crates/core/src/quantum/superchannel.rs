use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, LabeledOperator, SubsystemShape};

use super::channel::{max_entangled, ChoiChannel};

/// Tolerance used when a superchannel must be valid before it is applied.
pub const SUPERCHANNEL_TOL: f64 = 1e-7;

/// Choi operator of the bipartite channel `Q: CB → AD` of a superchannel that maps
/// channels `A → B` to channels `C → D`. Stored in the order `(A, D, C, B)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperchannelChoi {
    op: LabeledOperator,
}

/// Residuals of the three superchannel conditions on `Q`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuperchannelReport {
    pub psd_residual: f64,
    pub tp_residual: f64,
    pub nonsignaling_residual: f64,
}

impl SuperchannelReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.psd_residual <= tol && self.tp_residual <= tol && self.nonsignaling_residual <= tol
    }

    pub fn max_residual(&self) -> f64 {
        self.psd_residual.max(self.tp_residual).max(self.nonsignaling_residual)
    }
}

/// Checks `Γ ≥ 0`, `Tr_{AD} Γ = I_{CB}` and `Tr_D Γ = Tr_{BD} Γ ⊗ I_B / d_B`, where each role
/// may consist of several labels: `a` are the inputs of the inner channel, `d` the outputs of
/// the resulting channel, `c` its inputs and `b` the outputs of the inner channel.
pub fn superchannel_residuals<S: AsRef<str>>(
    op: &LabeledOperator,
    a: &[S],
    d: &[S],
    c: &[S],
    b: &[S],
) -> Result<SuperchannelReport> {
    let all: Vec<&str> = a.iter().chain(d).chain(c).chain(b).map(AsRef::as_ref).collect();
    if all.len() != op.shape.len() {
        return Err(Error::ShapeMismatch(format!("roles {all:?} do not cover {:?}", op.shape.labels())));
    }
    op.shape.positions(&all)?;
    let psd_residual = (-op.op.min_eigenvalue()).max(0.0);
    let ad: Vec<&str> = a.iter().chain(d).map(AsRef::as_ref).collect();
    let marg = op.trace_out(&ad)?;
    let tp_residual = marg.op.max_abs_diff(&HermitianMatrix::identity(marg.op.dim()));
    let lhs = op.trace_out(d)?;
    let bd: Vec<&str> = b.iter().chain(d).map(AsRef::as_ref).collect();
    let d_b = op.shape.dim_of_all(b)? as f64;
    let rhs = op.trace_out(&bd)?.expand_to(&lhs.shape)?.scale(1.0 / d_b);
    Ok(SuperchannelReport { psd_residual, tp_residual, nonsignaling_residual: lhs.max_abs_diff(&rhs)? })
}

impl SuperchannelChoi {
    /// Wraps an operator on labels `A, D, C, B` (any order).
    pub fn new(op: LabeledOperator) -> Result<Self> {
        Ok(Self { op: op.reorder(&["A", "D", "C", "B"])? })
    }

    pub fn operator(&self) -> &LabeledOperator {
        &self.op
    }

    pub fn choi(&self) -> &HermitianMatrix {
        &self.op.op
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.op.shape
    }

    pub fn dim(&self, role: &str) -> usize {
        self.op.shape.dim_of(role).unwrap()
    }

    /// Identity on channels `A → B`: `Q = id_{C→A} ⊗ id_{B→D}`.
    pub fn identity(d_a: usize, d_b: usize) -> Result<Self> {
        let ca = LabeledOperator::new(max_entangled(d_a), SubsystemShape::from_pairs(&[("C", d_a), ("A", d_a)])?)?;
        let bd = LabeledOperator::new(max_entangled(d_b), SubsystemShape::from_pairs(&[("B", d_b), ("D", d_b)])?)?;
        Self::new(ca.kron(&bd)?)
    }

    /// `N ↦ post ∘ (N ⊗ id_M) ∘ pre`. `pre` maps `C` to `A` plus optional memory systems,
    /// `post` maps `B` plus the same memory systems to `D`.
    pub fn from_pre_post(pre: &ChoiChannel, post: &ChoiChannel) -> Result<Self> {
        if pre.inputs() != ["C"] || !pre.outputs().iter().any(|l| l == "A") {
            return Err(Error::ShapeMismatch("pre-processing must map C to A (and memory)".into()));
        }
        if post.outputs() != ["D"] || !post.inputs().iter().any(|l| l == "B") {
            return Err(Error::ShapeMismatch("post-processing must map B (and memory) to D".into()));
        }
        Self::new(pre.operator().link(post.operator())?)
    }

    /// One-way LOCC superchannel `N ↦ Σ_x D^x ∘ N ∘ E^x` from an instrument `{E^x: C → A}`
    /// and channels `{D^x: B → D}`.
    pub fn one_way_locc(instrument: &[ChoiChannel], posts: &[ChoiChannel]) -> Result<Self> {
        if instrument.len() != posts.len() || instrument.is_empty() {
            return Err(Error::ShapeMismatch("instrument and post-processing lists must match".into()));
        }
        let mut acc: Option<LabeledOperator> = None;
        for (e, d) in instrument.iter().zip(posts) {
            if d.is_cp_only() {
                return Err(Error::InvalidChannel("post-processing must be trace preserving".into()));
            }
            let term = e.operator().kron(d.operator())?;
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        Self::new(acc.unwrap())
    }

    /// Discards the channel and outputs `σ_D`, preparing `ω_A` for the discarded input.
    pub fn trace_and_replace(d_c: usize, d_b: usize, omega_a: &HermitianMatrix, sigma_d: &HermitianMatrix) -> Result<Self> {
        let shape = SubsystemShape::from_pairs(&[("A", omega_a.dim()), ("D", sigma_d.dim()), ("C", d_c), ("B", d_b)])?;
        let m = omega_a.kron(sigma_d).kron(&HermitianMatrix::identity(d_c * d_b));
        Self::new(LabeledOperator::new(m, shape)?)
    }

    pub fn validate(&self) -> SuperchannelReport {
        validate_superchannel(self)
    }
}

pub fn validate_superchannel(theta: &SuperchannelChoi) -> SuperchannelReport {
    superchannel_residuals(&theta.op, &["A"], &["D"], &["C"], &["B"]).expect("labels fixed by construction")
}

/// Propagation rule `Γ^M = Tr_{AB}[T_{AB}(I ⊗ Γ^N) Γ^Θ]`, i.e. the link product of `Γ^N`
/// with `Γ^Θ` over `A` and `B`. The result keeps the input and output labels of `n`.
pub fn superchannel_apply(theta: &SuperchannelChoi, n: &ChoiChannel) -> Result<ChoiChannel> {
    if n.inputs().len() != 1 || n.outputs().len() != 1 {
        return Err(Error::ShapeMismatch("superchannels act on single-input single-output channels".into()));
    }
    let (a, b) = (n.inputs()[0].as_str(), n.outputs()[0].as_str());
    if n.shape().dim_of(a)? != theta.dim("A") || n.shape().dim_of(b)? != theta.dim("B") {
        return Err(Error::ShapeMismatch("channel dimensions do not match the superchannel".into()));
    }
    let report = validate_superchannel(theta);
    if !report.passes(SUPERCHANNEL_TOL) {
        return Err(Error::InvalidSuperchannel(format!("largest residual {:.3e}", report.max_residual())));
    }
    let gamma = n.operator().relabel_all(&[(a, "A"), (b, "B")])?;
    let out = gamma.link(&theta.op)?.reorder(&["C", "D"])?.relabel_all(&[("C", a), ("D", b)])?;
    ChoiChannel::with_trace_tol(out, &[a], &[b], n.is_cp_only(), n.trace_tol().max(SUPERCHANNEL_TOL))
}
