//! k-extendibility of states, channels and superchannels.
//!
//! Replicated subsystems are named `L#1`, `L#2`, … after their base label `L`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{support_isometry, CMatrix, HermitianMatrix, LabeledOperator, SubsystemShape, DEFAULT_RANK_TOL};
use crate::quantum::{
    isotropic_state, superchannel_residuals, BipartiteChannel, ChoiChannel, SuperchannelChoi, BOB_IN, BOB_OUT,
    SUPERCHANNEL_TOL,
};
use crate::sdp::{solve, ConicProblem, HermExpr, LabeledExpr, SolveReport, SolveStatus, VarHandle};

/// Slack below which the state extension program counts as feasible.
pub const KEXT_FEASIBILITY_TOL: f64 = 1e-7;

/// Name of copy `i` (1-based) of subsystem `label`.
pub fn copy_label(label: &str, i: usize) -> String {
    format!("{label}#{i}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtendibleKind {
    State,
    P2pChannel,
    Superchannel,
    BipartiteChannel,
    BipartiteSuperchannel,
}

/// Base object shape and the shape of its k-extension.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendibilitySpec {
    pub kind: ExtendibleKind,
    pub k: usize,
    pub base: SubsystemShape,
    pub extension: SubsystemShape,
    pub replicated: Vec<String>,
}

impl ExtendibilitySpec {
    /// Replaces every label in `replicated` by its `k` copies, in place.
    pub fn new<S: AsRef<str>>(kind: ExtendibleKind, k: usize, base: SubsystemShape, replicated: &[S]) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter { name: "k", value: k as f64 });
        }
        base.positions(replicated)?;
        let replicated: Vec<String> = replicated.iter().map(|s| s.as_ref().to_string()).collect();
        let mut dims = Vec::new();
        let mut labels = Vec::new();
        for (l, &d) in base.labels().iter().zip(base.dims()) {
            if replicated.contains(l) {
                for i in 1..=k {
                    dims.push(d);
                    labels.push(copy_label(l, i));
                }
            } else {
                dims.push(d);
                labels.push(l.clone());
            }
        }
        let extension = SubsystemShape::new(dims, labels)?;
        Ok(Self { kind, k, base, extension, replicated })
    }

    /// Labels of copy `i` of the replicated subsystems.
    pub fn copies(&self, i: usize) -> Vec<String> {
        self.replicated.iter().map(|l| copy_label(l, i)).collect()
    }

    /// Copies `2..=k` of the replicated subsystems in `labels`.
    pub fn rest<S: AsRef<str>>(&self, labels: &[S]) -> Vec<String> {
        labels.iter().flat_map(|l| (2..=self.k).map(move |i| copy_label(l.as_ref(), i))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub feasible: bool,
    pub certificate_residuals: BTreeMap<String, f64>,
    /// Present when the report comes from a solve.
    pub solver: Option<SolveReport>,
}

fn renames(labels: &[String], i: usize) -> Vec<(String, String)> {
    labels.iter().map(|l| (l.clone(), copy_label(l, i))).collect()
}

fn as_pairs(v: &[(String, String)]) -> Vec<(&str, &str)> {
    v.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

fn inverse(v: &[(String, String)]) -> Vec<(String, String)> {
    v.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
}

/// Two-extension `Γ^P` of a channel (or state) in which the `rep_out` outputs are
/// duplicated and, for bipartite channels, the `rep_in` inputs as well.
#[derive(Debug, Clone)]
pub struct ExtensionLayout {
    base: LabeledOperator,
    inputs: Vec<String>,
    outputs: Vec<String>,
    rep_in: Vec<String>,
    rep_out: Vec<String>,
    spec: ExtendibilitySpec,
}

impl ExtensionLayout {
    fn new(base: LabeledOperator, inputs: Vec<String>, outputs: Vec<String>, rep_in: Vec<String>, rep_out: Vec<String>, kind: ExtendibleKind) -> Result<Self> {
        let order: Vec<String> = inputs.iter().chain(&outputs).cloned().collect();
        let base = base.reorder(&order)?;
        let replicated: Vec<String> = rep_in.iter().chain(&rep_out).cloned().collect();
        let spec = ExtendibilitySpec::new(kind, 2, base.shape.clone(), &replicated)?;
        Ok(Self { base, inputs, outputs, rep_in, rep_out, spec })
    }

    /// Point-to-point channel: all outputs are duplicated.
    pub fn p2p(n: &ChoiChannel) -> Result<Self> {
        Self::new(
            n.operator().clone(),
            n.inputs().to_vec(),
            n.outputs().to_vec(),
            vec![],
            n.outputs().to_vec(),
            ExtendibleKind::P2pChannel,
        )
    }

    /// Bipartite channel `AB → A'B'`: Bob's input and output are duplicated.
    pub fn bipartite(n: &BipartiteChannel) -> Result<Self> {
        let ch = n.channel();
        Self::new(
            ch.operator().clone(),
            ch.inputs().to_vec(),
            ch.outputs().to_vec(),
            vec![BOB_IN.to_string()],
            vec![BOB_OUT.to_string()],
            ExtendibleKind::BipartiteChannel,
        )
    }

    /// Bipartite state on a two-label shape: the second subsystem is duplicated.
    pub fn state(rho: &HermitianMatrix, shape: &SubsystemShape) -> Result<Self> {
        if shape.len() != 2 {
            return Err(Error::ShapeMismatch(format!("state shape must have two labels, got {:?}", shape.labels())));
        }
        let op = LabeledOperator::new(rho.clone(), shape.clone())?;
        let labels = shape.labels().to_vec();
        Self::new(op, vec![], labels.clone(), vec![], vec![labels[1].clone()], ExtendibleKind::State)
    }

    pub fn base(&self) -> &LabeledOperator {
        &self.base
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.spec.extension
    }

    pub fn spec(&self) -> &ExtendibilitySpec {
        &self.spec
    }

    fn rep_in_dim(&self) -> usize {
        self.base.shape.dim_of_all(&self.rep_in).unwrap()
    }

    /// `(1/d_in) Tr_{copy 1}[Γ^P]` relabeled to the base labels, in base order:
    /// the Choi operator of the comparison channel.
    pub fn comparison_expr(&self, gamma_p: &LabeledExpr) -> Result<LabeledExpr> {
        let first: Vec<String> = self.rep_in.iter().chain(&self.rep_out).map(|l| copy_label(l, 1)).collect();
        let back = inverse(&renames(&self.spec.replicated, 2));
        gamma_p
            .trace_out(&first)?
            .scale(1.0 / self.rep_in_dim() as f64)
            .relabel_all(&as_pairs(&back))?
            .reorder(self.base.shape.labels())
    }

    pub fn comparison(&self, gamma_p: &LabeledOperator) -> Result<LabeledOperator> {
        let first: Vec<String> = self.rep_in.iter().chain(&self.rep_out).map(|l| copy_label(l, 1)).collect();
        let back = inverse(&renames(&self.spec.replicated, 2));
        gamma_p
            .trace_out(&first)?
            .scale(1.0 / self.rep_in_dim() as f64)
            .relabel_all(&as_pairs(&back))?
            .reorder(self.base.shape.labels())
    }

    /// Comparison channel for a candidate extension.
    pub fn comparison_channel(&self, gamma_p: &LabeledOperator) -> Result<ChoiChannel> {
        ChoiChannel::new_cp_only(self.comparison(gamma_p)?, &self.inputs, &self.outputs)
    }

    /// Declares `Γ^P` in `problem` and adds the extension constraints.
    pub fn add_to(&self, problem: &mut ConicProblem, relax_nonsignaling: bool) -> Result<(VarHandle, LabeledExpr)> {
        let shape = self.shape().clone();
        let handle = problem.add_hermitian("Gamma_P", shape.total_dim());
        let g = handle.labeled(&shape)?;
        problem.add_psd("extension_psd", g.expr.clone())?;
        self.add_constraints(problem, &g, relax_nonsignaling)?;
        Ok((handle, g))
    }

    /// Like [`ExtensionLayout::add_to`], but writes `Γ^P = (V ⊗ I) Y (V ⊗ I)†` where `V`
    /// spans the support of the base operator, which every feasible `Γ^P` respects.
    /// The returned handle is `Y`. Rank-deficient bases otherwise leave the program
    /// without strictly feasible points.
    pub fn add_reduced_to(&self, problem: &mut ConicProblem, relax_nonsignaling: bool) -> Result<(VarHandle, LabeledExpr)> {
        let v = support_isometry(&self.base.op, DEFAULT_RANK_TOL)?;
        if v.ncols() == v.nrows() {
            return self.add_to(problem, relax_nonsignaling);
        }
        let ren1 = renames(&self.spec.replicated, 1);
        let first = self.base.shape.clone();
        let first = ren1.iter().try_fold(first, |s, (a, b)| s.relabel(a, b))?;
        let rest = self.shape().select(&self.spec.copies(2))?;
        let w = v.kronecker(&CMatrix::identity(rest.total_dim(), rest.total_dim()));
        let handle = problem.add_hermitian("Gamma_P_face", w.ncols());
        problem.add_psd("extension_psd", handle.expr())?;
        let g = LabeledExpr::new(handle.expr().congruence(&w)?, first.concat(&rest)?)?.reorder(self.shape().labels())?;
        self.add_constraints(problem, &g, relax_nonsignaling)?;
        Ok((handle, g))
    }

    fn add_constraints(&self, problem: &mut ConicProblem, g: &LabeledExpr, relax_nonsignaling: bool) -> Result<()> {
        let ren1 = renames(&self.spec.replicated, 1);
        let out2: Vec<String> = self.rep_out.iter().map(|l| copy_label(l, 2)).collect();
        let lhs = g.trace_out(&out2)?;
        let rhs = self.base.relabel_all(&as_pairs(&ren1))?.expand_to(&lhs.shape)?;
        problem.add_labeled_equality("marginal", &lhs, &LabeledExpr::constant(&rhs))?;

        let all_out: Vec<String> = self.outputs.iter().flat_map(|l| self.expanded(l)).collect();
        let tp = g.trace_out(&all_out)?;
        let id = LabeledOperator::identity(tp.shape.clone());
        problem.add_labeled_equality("trace_preserving", &tp, &LabeledExpr::constant(&id))?;

        if !relax_nonsignaling && self.rep_in_dim() > 1 {
            let out1: Vec<String> = self.rep_out.iter().map(|l| copy_label(l, 1)).collect();
            let both1: Vec<String> = self.rep_in.iter().chain(&self.rep_out).map(|l| copy_label(l, 1)).collect();
            let lhs = g.trace_out(&out1)?;
            let rhs = g.trace_out(&both1)?.expand_to(&lhs.shape)?.scale(1.0 / self.rep_in_dim() as f64);
            problem.add_labeled_equality("non_signaling", &lhs, &rhs)?;
        }
        Ok(())
    }

    fn expanded(&self, label: &str) -> Vec<String> {
        if self.spec.replicated.iter().any(|l| l == label) {
            vec![copy_label(label, 1), copy_label(label, 2)]
        } else {
            vec![label.to_string()]
        }
    }

    /// Residual of every extension constraint at a candidate `Γ^P`.
    pub fn residuals(&self, gamma_p: &LabeledOperator, relax_nonsignaling: bool) -> Result<BTreeMap<String, f64>> {
        let gamma_p = gamma_p.reorder(self.shape().labels())?;
        let mut problem = ConicProblem::new();
        self.add_to(&mut problem, relax_nonsignaling)?;
        let x = HermExpr::variable_params(&gamma_p.op);
        let mut out = BTreeMap::new();
        for c in &problem.equalities {
            let r = c.expr.evaluate(&x).iter().map(|z| z.norm()).fold(0.0, f64::max);
            out.insert(c.name.clone(), r);
        }
        out.insert("extension_psd".into(), (-gamma_p.op.min_eigenvalue()).max(0.0));
        Ok(out)
    }

    /// Fails with `InvalidExtension` when a residual exceeds `tol`.
    pub fn check(&self, gamma_p: &LabeledOperator, tol: f64, relax_nonsignaling: bool) -> Result<()> {
        for (name, r) in self.residuals(gamma_p, relax_nonsignaling)? {
            if r > tol {
                return Err(Error::InvalidExtension(format!("{name} residual {r:.3e} exceeds {tol:.1e}")));
            }
        }
        Ok(())
    }
}

/// Constraint set over `Γ^P` for a point-to-point channel.
pub fn build_p2p_extension_constraints(n: &ChoiChannel) -> Result<(ConicProblem, VarHandle, ExtensionLayout)> {
    let layout = ExtensionLayout::p2p(n)?;
    let mut problem = ConicProblem::new();
    let (h, _) = layout.add_to(&mut problem, false)?;
    Ok((problem, h, layout))
}

/// Constraint set over `Γ^P` for a bipartite channel, including non-signaling from `B#1`.
pub fn build_bipartite_extension_constraints(
    n: &BipartiteChannel,
    relax_nonsignaling: bool,
) -> Result<(ConicProblem, VarHandle, ExtensionLayout)> {
    let layout = ExtensionLayout::bipartite(n)?;
    let mut problem = ConicProblem::new();
    let (h, _) = layout.add_to(&mut problem, relax_nonsignaling)?;
    Ok((problem, h, layout))
}

fn transpositions(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=k).flat_map(move |i| (i + 1..=k).map(move |j| (i, j)))
}

/// Decides whether `rho` on `shape = {A, B}` has a k-extension on `A B#1 … B#k`.
///
/// Solves `min s` over `ω` with `ω + sI ⪰ 0`, `Tr_{B#2…B#k} ω = ρ` and `ω` invariant
/// under every transposition of the `B` copies; the state is k-extendible iff `s* ≤ 0`,
/// accepted up to [`KEXT_FEASIBILITY_TOL`].
pub fn kext_state_feasible(rho: &HermitianMatrix, shape: &SubsystemShape, k: usize, tol: f64) -> Result<FeasibilityReport> {
    if shape.len() != 2 {
        return Err(Error::ShapeMismatch(format!("state shape must have two labels, got {:?}", shape.labels())));
    }
    let b = shape.labels()[1].clone();
    let spec = ExtendibilitySpec::new(ExtendibleKind::State, k, shape.clone(), &[b.as_str()])?;
    let ext = spec.extension.clone();
    let n = ext.total_dim();

    let mut p = ConicProblem::new();
    let s = p.add_scalar("s");
    let w = p.add_hermitian("omega", n);
    let g = w.labeled(&ext)?;
    p.add_psd("omega + sI", g.expr.add(&HermExpr::scalar_identity(s.offset, n))?)?;
    let marg = g.trace_out(&spec.rest(&[b.as_str()]))?;
    let target = LabeledOperator::new(rho.clone(), shape.clone())?.relabel(&b, &copy_label(&b, 1))?;
    p.add_labeled_equality("marginal", &marg, &LabeledExpr::constant(&target))?;
    for (i, j) in transpositions(k) {
        let sw = g.swap(&copy_label(&b, i), &copy_label(&b, j))?;
        p.add_labeled_equality(&format!("swap_{i}_{j}"), &sw, &g)?;
    }
    p.minimize(vec![(s.offset, 1.0)], 0.0)?;
    let sol = solve(&p, tol)?;
    if !sol.report.status.has_value() {
        return Err(Error::SolverFailure {
            status: sol.report.status,
            message: "k-extension slack program did not converge".into(),
        });
    }
    let s_star = sol.x[s.offset];
    let omega = p.value(w, &sol.x);
    let (eq, _) = p.residuals(&sol.x);
    let mut res = BTreeMap::new();
    res.insert("slack".to_string(), s_star);
    res.insert("min_eigenvalue".to_string(), omega.min_eigenvalue());
    res.insert("equality".to_string(), eq);
    Ok(FeasibilityReport { feasible: s_star <= KEXT_FEASIBILITY_TOL, certificate_residuals: res, solver: Some(sol.report) })
}

/// Largest isotropic fidelity `F` for which the isotropic state of dimension `d` is
/// k-extendible, found by bisection to a width below `2e-4`.
pub fn kext_isotropic_threshold(d: usize, k: usize, tol: f64) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("d = {d}, need d >= 2")));
    }
    let shape = SubsystemShape::from_pairs(&[("A", d), ("B", d)])?;
    let feasible = |f: f64| -> Result<bool> { Ok(kext_state_feasible(&isotropic_state(d, f)?, &shape, k, tol)?.feasible) };
    let (mut lo, mut hi) = (1.0 / (d * d) as f64, 1.0);
    if !feasible(lo)? {
        return Err(Error::SolverFailure { status: SolveStatus::Failed, message: "maximally mixed state reported unextendible".into() });
    }
    if feasible(hi)? {
        return Ok(hi);
    }
    while hi - lo > 2e-4 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Largest deviation of `op` from its image under the joint swap of copies `i` and `j` of `labels`.
fn covariance_residual(op: &LabeledOperator, labels: &[&str], k: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, j) in transpositions(k) {
        let mut sw = op.clone();
        for l in labels {
            sw = sw.swap(&copy_label(l, i), &copy_label(l, j))?;
        }
        worst = worst.max(sw.max_abs_diff(op)?);
    }
    Ok(worst)
}

fn copies(label: &str, range: std::ops::RangeInclusive<usize>) -> Vec<String> {
    range.map(|i| copy_label(label, i)).collect()
}

fn finish(res: BTreeMap<String, f64>) -> FeasibilityReport {
    let feasible = res.values().all(|&r| r <= SUPERCHANNEL_TOL);
    FeasibilityReport { feasible, certificate_residuals: res, solver: None }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter { name: "k", value: k as f64 });
    }
    Ok(())
}

/// Checks that `upsilon`, on labels `A, C, B#1…B#k, D#1…D#k`, is a k-extension of `theta`:
/// both are superchannels, `Γ^Υ` is invariant under joint swaps of the `B` and `D`
/// copies, and `Tr_{D#2…D#k} Γ^Υ = Γ^Θ ⊗ I_{B#2…B#k}`.
pub fn validate_kext_superchannel(theta: &SuperchannelChoi, upsilon: &LabeledOperator, k: usize) -> Result<FeasibilityReport> {
    check_k(k)?;
    let (bs, ds) = (copies("B", 1..=k), copies("D", 1..=k));
    let mut res = BTreeMap::new();
    res.insert("theta_superchannel".into(), theta.validate().max_residual());
    let up = superchannel_residuals(upsilon, &["A".to_string()], &ds, &["C".to_string()], &bs)?;
    res.insert("upsilon_superchannel".into(), up.max_residual());
    res.insert("permutation_covariance".into(), covariance_residual(upsilon, &["B", "D"], k)?);
    let lhs = upsilon.trace_out(&copies("D", 2..=k))?;
    let rhs = theta.operator().relabel_all(&[("B", "B#1"), ("D", "D#1")])?.expand_to(&lhs.shape)?;
    res.insert("marginal".into(), lhs.max_abs_diff(&rhs)?);
    Ok(finish(res))
}

/// Checks a k-extension of a bipartite superchannel mapping channels `AB → A'B'` to
/// channels `CD → C'D'`. `theta` carries labels `A, B, C', D', C, D, A', B'`; `upsilon`
/// carries `A, C', C, A'` and copies `B#i, D'#i, D#i, B'#i`.
pub fn validate_bipartite_kext_superchannel(theta: &LabeledOperator, upsilon: &LabeledOperator, k: usize) -> Result<FeasibilityReport> {
    check_k(k)?;
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    let mut res = BTreeMap::new();
    let th = superchannel_residuals(theta, &s(&["A", "B"]), &s(&["C'", "D'"]), &s(&["C", "D"]), &s(&["A'", "B'"]))?;
    res.insert("theta_superchannel".into(), th.max_residual());

    let join = |a: &str, b: &str| -> Vec<String> {
        std::iter::once(a.to_string()).chain(copies(b, 1..=k)).collect()
    };
    let up = superchannel_residuals(upsilon, &join("A", "B"), &join("C'", "D'"), &join("C", "D"), &join("A'", "B'"))?;
    res.insert("upsilon_superchannel".into(), up.max_residual());
    res.insert("permutation_covariance".into(), covariance_residual(upsilon, &["D'", "B", "D", "B'"], k)?);

    let d_rest = copies("D'", 2..=k);
    let lhs = upsilon.trace_out(&d_rest)?;
    let both: Vec<String> = d_rest.iter().cloned().chain(copies("B'", 2..=k)).collect();
    let d_bp = upsilon.shape.dim_of("B'#1")? as f64;
    let rhs = upsilon.trace_out(&both)?.expand_to(&lhs.shape)?.scale(d_bp.powi(1 - k as i32));
    res.insert("non_signaling".into(), lhs.max_abs_diff(&rhs)?);

    let traced: Vec<String> = copies("B", 2..=k).into_iter().chain(copies("D'", 2..=k)).collect();
    let lhs = upsilon.trace_out(&traced)?;
    let rhs = theta
        .relabel_all(&[("B", "B#1"), ("D'", "D'#1"), ("D", "D#1"), ("B'", "B'#1")])?
        .expand_to(&lhs.shape)?;
    res.insert("marginal".into(), lhs.max_abs_diff(&rhs)?);
    Ok(finish(res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{make_identity, make_replacer, make_semicausal_erasure};

    #[test]
    fn spec_replicates_in_place() {
        let base = SubsystemShape::from_pairs(&[("A", 2), ("B", 3)]).unwrap();
        let s = ExtendibilitySpec::new(ExtendibleKind::State, 3, base.clone(), &["B"]).unwrap();
        assert_eq!(s.extension.labels(), &["A", "B#1", "B#2", "B#3"]);
        assert_eq!(s.extension.dims(), &[2, 3, 3, 3]);
        assert!(ExtendibilitySpec::new(ExtendibleKind::State, 1, base, &["B"]).is_err());
    }

    #[test]
    fn product_extension_of_identity() {
        let id = make_identity(2).unwrap();
        let layout = ExtensionLayout::p2p(&id).unwrap();
        let sigma = HermitianMatrix::diag(&[0.3, 0.7]);
        let g = id
            .operator()
            .relabel("B", "B#1")
            .unwrap()
            .kron(&LabeledOperator::new(sigma.clone(), SubsystemShape::from_pairs(&[("B#2", 2)]).unwrap()).unwrap())
            .unwrap();
        layout.check(&g, 1e-12, false).unwrap();
        let n0 = layout.comparison(&g).unwrap();
        let want = LabeledOperator::new(HermitianMatrix::identity(2).kron(&sigma), id.shape().clone()).unwrap();
        assert!(n0.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn wrong_marginal_is_rejected() {
        let id = make_identity(2).unwrap();
        let layout = ExtensionLayout::p2p(&id).unwrap();
        let bad = LabeledOperator::identity(layout.shape().clone()).scale(0.5);
        assert!(matches!(layout.check(&bad, 1e-6, false), Err(Error::InvalidExtension(_))));
    }

    #[test]
    fn semicausal_erasure_extension() {
        let n = make_semicausal_erasure(2, 0.3).unwrap();
        let layout = ExtensionLayout::bipartite(&n).unwrap();
        // B has dimension one, so the extension is N with a maximally mixed extra output.
        let pi = make_replacer(1, &HermitianMatrix::identity(3).scale(1.0 / 3.0))
            .unwrap()
            .relabel(&[("A", "B#2"), ("B", "B'#2")])
            .unwrap();
        let g = n
            .channel()
            .relabel(&[("B", "B#1"), ("B'", "B'#1")])
            .unwrap()
            .tensor(&pi)
            .unwrap();
        layout.check(g.operator(), 1e-12, false).unwrap();
    }

    #[test]
    fn reduced_extension_stays_on_face() {
        let n = make_semicausal_erasure(2, 0.3).unwrap();
        let layout = ExtensionLayout::bipartite(&n).unwrap();
        let mut problem = ConicProblem::new();
        let (h, g) = layout.add_reduced_to(&mut problem, false).unwrap();
        // Two-dimensional support times the three-dimensional extra output.
        assert_eq!(h.dim, 6);
        let v = support_isometry(&layout.base().op, DEFAULT_RANK_TOL).unwrap();
        let g_face = HermitianMatrix::symmetrized(&(v.adjoint() * layout.base().op.matrix() * &v));
        let y = g_face.kron(&HermitianMatrix::identity(3).scale(1.0 / 3.0));
        let x = HermExpr::variable_params(&y);
        let gp = LabeledOperator::new(HermitianMatrix::symmetrized(&g.expr.evaluate(&x)), g.shape.clone()).unwrap();
        layout.check(&gp, 1e-12, false).unwrap();
        let (eq, psd) = problem.residuals(&x);
        assert!(eq < 1e-12 && psd < 1e-12);
    }
}
