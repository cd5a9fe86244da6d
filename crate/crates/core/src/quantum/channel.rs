use crate::error::{Error, Result};
use crate::linalg::{CMatrix, HermitianMatrix, LabeledOperator, SubsystemShape, C64};

pub const DEFAULT_TRACE_TOL: f64 = 1e-8;

/// Channel stored as its unnormalized Choi operator `Γ = Σ_ij |i><j| ⊗ N(|i><j|)`.
///
/// Subsystems are always ordered inputs first, then outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiChannel {
    op: LabeledOperator,
    inputs: Vec<String>,
    outputs: Vec<String>,
    cp_only: bool,
    trace_tol: f64,
}

fn to_strings<S: AsRef<str>>(v: &[S]) -> Vec<String> {
    v.iter().map(|s| s.as_ref().to_string()).collect()
}

impl ChoiChannel {
    /// Validated CPTP channel.
    pub fn new<S: AsRef<str>>(op: LabeledOperator, inputs: &[S], outputs: &[S]) -> Result<Self> {
        Self::build(op, inputs, outputs, false, DEFAULT_TRACE_TOL)
    }

    /// Completely positive map with no trace condition (e.g. an instrument element).
    pub fn new_cp_only<S: AsRef<str>>(op: LabeledOperator, inputs: &[S], outputs: &[S]) -> Result<Self> {
        Self::build(op, inputs, outputs, true, DEFAULT_TRACE_TOL)
    }

    pub fn with_trace_tol<S: AsRef<str>>(
        op: LabeledOperator,
        inputs: &[S],
        outputs: &[S],
        cp_only: bool,
        trace_tol: f64,
    ) -> Result<Self> {
        Self::build(op, inputs, outputs, cp_only, trace_tol)
    }

    fn build<S: AsRef<str>>(
        op: LabeledOperator,
        inputs: &[S],
        outputs: &[S],
        cp_only: bool,
        trace_tol: f64,
    ) -> Result<Self> {
        let inputs = to_strings(inputs);
        let outputs = to_strings(outputs);
        let order: Vec<String> = inputs.iter().chain(&outputs).cloned().collect();
        if order.len() != op.shape.len() {
            return Err(Error::ShapeMismatch(format!(
                "roles {order:?} do not partition labels {:?}",
                op.shape.labels()
            )));
        }
        let op = op.reorder(&order)?;
        let ch = Self { op, inputs, outputs, cp_only, trace_tol };
        let cp = ch.cp_residual();
        if cp > trace_tol {
            return Err(Error::NegativeOperator { min_eigenvalue: -cp });
        }
        if !cp_only {
            let tp = ch.tp_residual()?;
            if tp > trace_tol {
                return Err(Error::InvalidChannel(format!("trace-preservation residual {tp:.3e}")));
            }
        }
        Ok(ch)
    }

    pub fn choi(&self) -> &HermitianMatrix {
        &self.op.op
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.op.shape
    }

    pub fn operator(&self) -> &LabeledOperator {
        &self.op
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn is_cp_only(&self) -> bool {
        self.cp_only
    }

    pub fn trace_tol(&self) -> f64 {
        self.trace_tol
    }

    pub fn input_dim(&self) -> usize {
        self.shape().dim_of_all(&self.inputs).unwrap()
    }

    pub fn output_dim(&self) -> usize {
        self.shape().dim_of_all(&self.outputs).unwrap()
    }

    pub fn input_shape(&self) -> SubsystemShape {
        self.shape().select(&self.inputs).unwrap()
    }

    pub fn output_shape(&self) -> SubsystemShape {
        self.shape().select(&self.outputs).unwrap()
    }

    /// `max(0, -λ_min(Γ))`
    pub fn cp_residual(&self) -> f64 {
        (-self.choi().min_eigenvalue()).max(0.0)
    }

    /// `max |Tr_out Γ - I_in|`
    pub fn tp_residual(&self) -> Result<f64> {
        let m = self.op.keep(&self.inputs)?;
        Ok(m.op.max_abs_diff(&HermitianMatrix::identity(m.op.dim())))
    }

    /// Renames subsystems; unlisted labels are kept.
    pub fn relabel(&self, map: &[(&str, &str)]) -> Result<Self> {
        let rename = |l: &String| map.iter().find(|(f, _)| f == l).map_or(l.clone(), |(_, t)| t.to_string());
        Ok(Self {
            op: self.op.relabel_all(map)?,
            inputs: self.inputs.iter().map(rename).collect(),
            outputs: self.outputs.iter().map(rename).collect(),
            cp_only: self.cp_only,
            trace_tol: self.trace_tol,
        })
    }

    /// `self ⊗ other` stored as (inputs of self, inputs of other : outputs of self, outputs of other).
    /// Labels must be disjoint.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let op = self.op.kron(&other.op)?;
        let inputs: Vec<String> = self.inputs.iter().chain(&other.inputs).cloned().collect();
        let outputs: Vec<String> = self.outputs.iter().chain(&other.outputs).cloned().collect();
        Self::build(op, &inputs, &outputs, self.cp_only || other.cp_only, self.trace_tol.max(other.trace_tol))
    }

    /// `next ∘ self`; the inputs of `next` must be outputs of `self` with the same labels.
    pub fn then(&self, next: &Self) -> Result<Self> {
        for l in &next.inputs {
            if !self.outputs.contains(l) {
                return Err(Error::ShapeMismatch(format!("input {l} of the second channel is not produced by the first")));
            }
        }
        let op = self.op.link(&next.op)?;
        let outputs: Vec<String> = self
            .outputs
            .iter()
            .filter(|l| !next.inputs.contains(l))
            .chain(&next.outputs)
            .cloned()
            .collect();
        Self::build(op, &self.inputs, &outputs, self.cp_only || next.cp_only, self.trace_tol.max(next.trace_tol))
    }

    /// Normalized Choi state `Γ / d_in`.
    pub fn choi_state(&self) -> HermitianMatrix {
        self.choi().scale(1.0 / self.input_dim() as f64)
    }
}

fn single_io(in_label: &str, d_in: usize, out_label: &str, d_out: usize) -> SubsystemShape {
    SubsystemShape::from_pairs(&[(in_label, d_in), (out_label, d_out)]).unwrap()
}

/// Choi operator `Σ_K (I ⊗ K) Γ (I ⊗ K)†` on labels `A` (input) and `B` (output).
/// Kraus sets that are not trace preserving yield a `cp_only` channel.
pub fn choi_from_kraus(kraus: &[CMatrix], d_in: usize, d_out: usize) -> Result<ChoiChannel> {
    if kraus.is_empty() {
        return Err(Error::DimensionMismatch("empty Kraus set".into()));
    }
    let mut g = CMatrix::zeros(d_in * d_out, d_in * d_out);
    let mut sum = CMatrix::zeros(d_in, d_in);
    for k in kraus {
        if k.nrows() != d_out || k.ncols() != d_in {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator is {}x{}, expected {d_out}x{d_in}",
                k.nrows(),
                k.ncols()
            )));
        }
        sum += k.adjoint() * k;
        for i in 0..d_in {
            for j in 0..d_in {
                for b in 0..d_out {
                    for b2 in 0..d_out {
                        g[(i * d_out + b, j * d_out + b2)] += k[(b, i)] * k[(b2, j)].conj();
                    }
                }
            }
        }
    }
    let tp = (sum - CMatrix::identity(d_in, d_in)).iter().all(|z| z.norm() <= DEFAULT_TRACE_TOL);
    let op = LabeledOperator::new(HermitianMatrix::new(g)?, single_io("A", d_in, "B", d_out))?;
    if tp {
        ChoiChannel::new(op, &["A"], &["B"])
    } else {
        ChoiChannel::new_cp_only(op, &["A"], &["B"])
    }
}

/// Applies `ch` to subsystem `on` of `state`. The result carries the remaining
/// subsystems of `state` followed by the channel outputs. Channel inputs other
/// than the first must be one-dimensional.
pub fn apply_channel(
    ch: &ChoiChannel,
    state: &HermitianMatrix,
    shape: &SubsystemShape,
    on: &str,
) -> Result<LabeledOperator> {
    let main = &ch.inputs()[0];
    for l in &ch.inputs()[1..] {
        if ch.shape().dim_of(l)? != 1 {
            return Err(Error::DimensionMismatch(format!("channel input {l} is not trivial")));
        }
    }
    if shape.dim_of(on)? != ch.shape().dim_of(main)? {
        return Err(Error::DimensionMismatch(format!(
            "state subsystem {on} has dimension {} but channel input has {}",
            shape.dim_of(on)?,
            ch.shape().dim_of(main)?
        )));
    }
    let trivial: Vec<&String> = ch.inputs()[1..].iter().collect();
    let gamma = ch.operator().trace_out(&trivial)?.relabel(main, on)?;
    LabeledOperator::new(state.clone(), shape.clone())?.link(&gamma)
}

/// Unnormalized `Γ = Σ_ij |ii><jj|` in dimension `d ⊗ d`.
pub fn max_entangled(d: usize) -> HermitianMatrix {
    let mut m = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            m[(i * d + i, j * d + j)] = C64::new(1.0, 0.0);
        }
    }
    HermitianMatrix::symmetrized(&m)
}

/// `Γ` on `(A, B)` with the output embedded in the first `d` levels of `d_out`.
fn embedded_max_entangled(d: usize, d_out: usize) -> HermitianMatrix {
    let mut m = CMatrix::zeros(d * d_out, d * d_out);
    for i in 0..d {
        for j in 0..d {
            m[(i * d_out + i, j * d_out + j)] = C64::new(1.0, 0.0);
        }
    }
    HermitianMatrix::symmetrized(&m)
}

fn check_prob(name: &'static str, value: f64, max: f64) -> Result<()> {
    if !(0.0..=max).contains(&value) || value.is_nan() {
        return Err(Error::InvalidProbability { name, value });
    }
    Ok(())
}

fn check_dim(d: usize) -> Result<()> {
    if d < 1 {
        return Err(Error::InvalidDimension(format!("d = {d}")));
    }
    Ok(())
}

pub fn make_identity(d: usize) -> Result<ChoiChannel> {
    check_dim(d)?;
    ChoiChannel::new(LabeledOperator::new(max_entangled(d), single_io("A", d, "B", d))?, &["A"], &["B"])
}

/// `E(Y) = (1-p) Y + p Tr[Y] |e><e|` with `|e>` the last of `d + 1` output levels.
pub fn make_erasure(d: usize, p: f64) -> Result<ChoiChannel> {
    check_dim(d)?;
    check_prob("p", p, 1.0)?;
    let flag = HermitianMatrix::basis_projector(d + 1, d);
    let g = &embedded_max_entangled(d, d + 1).scale(1.0 - p) + &HermitianMatrix::identity(d).kron(&flag).scale(p);
    ChoiChannel::new(LabeledOperator::new(g, single_io("A", d, "B", d + 1))?, &["A"], &["B"])
}

/// `D_p(ρ) = (1-p) ρ + p Tr[ρ] I/d`, CPTP for `p ∈ [0, d²/(d²-1)]`.
pub fn make_depolarizing(d: usize, p: f64) -> Result<ChoiChannel> {
    if d < 2 {
        return Err(Error::InvalidDimension(format!("depolarizing channel needs d >= 2, got {d}")));
    }
    let d2 = (d * d) as f64;
    check_prob("p", p, d2 / (d2 - 1.0) + 1e-12)?;
    let g = &max_entangled(d).scale(1.0 - p) + &HermitianMatrix::identity(d * d).scale(p / d as f64);
    ChoiChannel::new(LabeledOperator::new(g, single_io("A", d, "B", d))?, &["A"], &["B"])
}

/// `R(ρ) = Tr[ρ] σ`.
pub fn make_replacer(d_in: usize, sigma: &HermitianMatrix) -> Result<ChoiChannel> {
    check_dim(d_in)?;
    let g = HermitianMatrix::identity(d_in).kron(sigma);
    ChoiChannel::new(LabeledOperator::new(g, single_io("A", d_in, "B", sigma.dim()))?, &["A"], &["B"])
}

/// Isotropic operator `F Φ + (1-F)(I - Φ)/(d²-1)` with normalized `Φ`.
pub fn isotropic_state(d: usize, f: f64) -> Result<HermitianMatrix> {
    check_prob("F", f, 1.0)?;
    let d2 = (d * d) as f64;
    let phi = max_entangled(d).scale(1.0 / d as f64);
    let rest = &HermitianMatrix::identity(d * d) - &phi;
    Ok(&phi.scale(f) + &rest.scale((1.0 - f) / (d2 - 1.0)))
}

/// Depolarizing parameter whose normalized Choi state is isotropic with fidelity `f`.
pub fn depolarizing_fidelity(d: usize, p: f64) -> f64 {
    1.0 - p + p / (d * d) as f64
}
