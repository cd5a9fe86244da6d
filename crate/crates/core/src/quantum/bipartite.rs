use crate::error::{Error, Result};
use crate::linalg::{HermitianMatrix, LabeledOperator, SubsystemShape};

use super::channel::{max_entangled, ChoiChannel};

pub const ALICE_IN: &str = "A";
pub const BOB_IN: &str = "B";
pub const ALICE_OUT: &str = "A'";
pub const BOB_OUT: &str = "B'";

const SEMICAUSAL_TOL: f64 = 1e-8;

/// Two-party channel `AB → A'B'` whose Choi operator is ordered `(A, B, A', B')`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteChannel {
    channel: ChoiChannel,
    semicausal_checked: bool,
}

impl BipartiteChannel {
    pub fn new(channel: ChoiChannel) -> Result<Self> {
        if channel.inputs() != [ALICE_IN, BOB_IN] || channel.outputs() != [ALICE_OUT, BOB_OUT] {
            return Err(Error::ShapeMismatch(format!(
                "bipartite channel needs inputs [A, B] and outputs [A', B'], got {:?} -> {:?}",
                channel.inputs(),
                channel.outputs()
            )));
        }
        Ok(Self { channel, semicausal_checked: false })
    }

    /// Builds the channel and verifies that Bob cannot signal to Alice.
    pub fn semicausal(channel: ChoiChannel) -> Result<Self> {
        let mut b = Self::new(channel)?;
        let r = b.semicausal_residual()?;
        if r > SEMICAUSAL_TOL {
            return Err(Error::InvalidChannel(format!("Bob signals to Alice: residual {r:.3e}")));
        }
        b.semicausal_checked = true;
        Ok(b)
    }

    pub fn channel(&self) -> &ChoiChannel {
        &self.channel
    }

    pub fn semicausal_checked(&self) -> bool {
        self.semicausal_checked
    }

    pub fn dim(&self, label: &str) -> usize {
        self.channel.shape().dim_of(label).unwrap()
    }

    /// `max |Tr_{B'} Γ - Tr_{BB'} Γ ⊗ I_B / d_B|`
    pub fn semicausal_residual(&self) -> Result<f64> {
        let op = self.channel.operator();
        let lhs = op.trace_out(&[BOB_OUT])?;
        let d_b = self.dim(BOB_IN) as f64;
        let rhs = op.trace_out(&[BOB_IN, BOB_OUT])?.expand_to(&lhs.shape)?.scale(1.0 / d_b);
        lhs.max_abs_diff(&rhs)
    }
}

fn shape4(d_a: usize, d_b: usize, d_ap: usize, d_bp: usize) -> SubsystemShape {
    SubsystemShape::from_pairs(&[(ALICE_IN, d_a), (BOB_IN, d_b), (ALICE_OUT, d_ap), (BOB_OUT, d_bp)]).unwrap()
}

/// `Γ` between `from` (dimension `d`) and the first `d` levels of `to`.
fn link_operator(d: usize, from: &str, to: &str, d_to: usize) -> LabeledOperator {
    let mut m = crate::linalg::CMatrix::zeros(d * d_to, d * d_to);
    for i in 0..d {
        for j in 0..d {
            m[(i * d_to + i, j * d_to + j)] = crate::linalg::C64::new(1.0, 0.0);
        }
    }
    let shape = SubsystemShape::from_pairs(&[(from, d), (to, d_to)]).unwrap();
    LabeledOperator::new(HermitianMatrix::symmetrized(&m), shape).unwrap()
}

fn single(label: &str, m: HermitianMatrix) -> LabeledOperator {
    let shape = SubsystemShape::from_pairs(&[(label, m.dim())]).unwrap();
    LabeledOperator::new(m, shape).unwrap()
}

fn check_prob(name: &'static str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::InvalidProbability { name, value: v });
    }
    Ok(())
}

/// `ρ_A ↦ p ρ_{A'} ⊗ |e><e|_{B'} + (1-p) ρ_{B'} ⊗ |e><e|_{A'}`: the input goes to Alice
/// with probability `p` and to Bob otherwise. Bob's input is trivial.
pub fn make_semicausal_erasure(d: usize, p: f64) -> Result<BipartiteChannel> {
    check_prob("p", p)?;
    if d < 1 {
        return Err(Error::InvalidDimension(format!("d = {d}")));
    }
    let flag = HermitianMatrix::basis_projector(d + 1, d);
    let trivial = single(BOB_IN, HermitianMatrix::identity(1));
    let to_alice = link_operator(d, ALICE_IN, ALICE_OUT, d + 1).kron(&single(BOB_OUT, flag.clone()))?.kron(&trivial)?;
    let to_bob = link_operator(d, ALICE_IN, BOB_OUT, d + 1).kron(&single(ALICE_OUT, flag))?.kron(&trivial)?;
    let order = shape4(d, 1, d + 1, d + 1);
    let g = to_alice.reorder(order.labels())?.scale(p).add(&to_bob.scale(1.0 - p))?;
    BipartiteChannel::semicausal(ChoiChannel::new(g, &[ALICE_IN, BOB_IN], &[ALICE_OUT, BOB_OUT])?)
}

/// Erasure towards Bob with a depolarized classical flag for Alice:
/// `(1-p) ρ_{RB'} ⊗ D_q(|1><1|)_{A'} + p π_R ⊗ |e><e|_{B'} ⊗ D_q(|0><0|)_{A'}`.
pub fn make_flagged_erasure(d: usize, p: f64, q: f64) -> Result<BipartiteChannel> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    let dq = |i: usize| &HermitianMatrix::basis_projector(2, i).scale(1.0 - q) + &HermitianMatrix::identity(2).scale(q / 2.0);
    let trivial = single(BOB_IN, HermitianMatrix::identity(1));
    let sent = link_operator(d, ALICE_IN, BOB_OUT, d + 1).kron(&single(ALICE_OUT, dq(1)))?.kron(&trivial)?;
    let lost = single(ALICE_IN, HermitianMatrix::identity(d))
        .kron(&single(BOB_OUT, HermitianMatrix::basis_projector(d + 1, d)))?
        .kron(&single(ALICE_OUT, dq(0)))?
        .kron(&trivial)?;
    let order = shape4(d, 1, 2, d + 1);
    let g = sent.reorder(order.labels())?.scale(1.0 - p).add(&lost.scale(p))?;
    BipartiteChannel::semicausal(ChoiChannel::new(g, &[ALICE_IN, BOB_IN], &[ALICE_OUT, BOB_OUT])?)
}

/// Lifts a point-to-point channel `A → B` to a bipartite channel where Alice has no
/// output and Bob has no input.
pub fn as_bipartite(ch: &ChoiChannel) -> Result<BipartiteChannel> {
    if ch.inputs().len() != 1 || ch.outputs().len() != 1 {
        return Err(Error::ShapeMismatch("expected a single input and output".into()));
    }
    let base = ch.relabel(&[(ch.inputs()[0].as_str(), ALICE_IN), (ch.outputs()[0].as_str(), BOB_OUT)])?;
    let trivial = single(BOB_IN, HermitianMatrix::identity(1)).kron(&single(ALICE_OUT, HermitianMatrix::identity(1)))?;
    let g = base.operator().kron(&trivial)?;
    BipartiteChannel::semicausal(ChoiChannel::new(g, &[ALICE_IN, BOB_IN], &[ALICE_OUT, BOB_OUT])?)
}

/// `Γ_{A B'}` of the identity channel from Alice to Bob.
pub fn alice_to_bob_identity(d: usize) -> Result<BipartiteChannel> {
    let base = ChoiChannel::new(
        LabeledOperator::new(max_entangled(d), SubsystemShape::from_pairs(&[("X", d), ("Y", d)])?)?,
        &["X"],
        &["Y"],
    )?;
    as_bipartite(&base)
}
