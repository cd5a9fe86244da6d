use crate::error::{Error, Result};

use super::hermitian::{CMatrix, HermitianMatrix, C64};
use super::shape::SubsystemShape;

fn check_shape(m: &HermitianMatrix, shape: &SubsystemShape) -> Result<()> {
    if m.dim() != shape.total_dim() {
        return Err(Error::ShapeMismatch(format!(
            "matrix dim {} but shape {:?} has total dim {}",
            m.dim(),
            shape.labels(),
            shape.total_dim()
        )));
    }
    Ok(())
}

/// Groups composite indices by the value of `key`.
fn groups(key: &[usize], nkeys: usize) -> Vec<Vec<usize>> {
    let mut g = vec![Vec::new(); nkeys];
    for (i, &k) in key.iter().enumerate() {
        g[k].push(i);
    }
    g
}

/// Traces out every subsystem not in `keep`. Kept subsystems stay in shape order;
/// an empty `keep` returns the 1×1 trace.
pub fn partial_trace<S: AsRef<str>>(m: &HermitianMatrix, shape: &SubsystemShape, keep: &[S]) -> Result<HermitianMatrix> {
    check_shape(m, shape)?;
    let mut pos = shape.positions(keep)?;
    pos.sort_unstable();
    let (kept, traced) = shape.split_table(&pos);
    let dk: usize = pos.iter().map(|&p| shape.dims()[p]).product();
    let dt = shape.total_dim() / dk;
    let mat = m.matrix();
    let mut out = CMatrix::zeros(dk, dk);
    for g in groups(&traced, dt) {
        for &r in &g {
            for &c in &g {
                out[(kept[r], kept[c])] += mat[(r, c)];
            }
        }
    }
    Ok(HermitianMatrix::symmetrized(&out))
}

/// Transposes the subsystems in `on`.
pub fn partial_transpose<S: AsRef<str>>(m: &HermitianMatrix, shape: &SubsystemShape, on: &[S]) -> Result<HermitianMatrix> {
    check_shape(m, shape)?;
    let pos = shape.positions(on)?;
    let (sel, rest) = shape.split_table(&pos);
    let ds: usize = pos.iter().map(|&p| shape.dims()[p]).product();
    let n = shape.total_dim();
    let mut compose = vec![0; n];
    for i in 0..n {
        compose[rest[i] * ds + sel[i]] = i;
    }
    let mat = m.matrix();
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            let r2 = compose[rest[r] * ds + sel[c]];
            let c2 = compose[rest[c] * ds + sel[r]];
            out[(r2, c2)] = mat[(r, c)];
        }
    }
    Ok(HermitianMatrix::symmetrized(&out))
}

fn apply_index_map(m: &HermitianMatrix, table: &[usize]) -> HermitianMatrix {
    let n = table.len();
    let mat = m.matrix();
    let mut out = CMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            out[(table[r], table[c])] = mat[(r, c)];
        }
    }
    HermitianMatrix::symmetrized(&out)
}

/// Reorders the tensor factors to `order`, which must list every label once.
pub fn permute_subsystems<S: AsRef<str>>(
    m: &HermitianMatrix,
    shape: &SubsystemShape,
    order: &[S],
) -> Result<(HermitianMatrix, SubsystemShape)> {
    check_shape(m, shape)?;
    if order.len() != shape.len() {
        return Err(Error::ShapeMismatch(format!("reorder needs all {} labels", shape.len())));
    }
    let pos = shape.positions(order)?;
    Ok((apply_index_map(m, &shape.reorder_table(&pos)), shape.at_positions(&pos)))
}

/// Conjugates by the unitary that swaps two equal-dimension subsystems.
pub fn swap_subsystems(m: &HermitianMatrix, shape: &SubsystemShape, a: &str, b: &str) -> Result<HermitianMatrix> {
    check_shape(m, shape)?;
    Ok(apply_index_map(m, &swap_table(shape, a, b)?))
}

pub(crate) fn swap_table(shape: &SubsystemShape, a: &str, b: &str) -> Result<Vec<usize>> {
    let (pa, pb) = (shape.position(a)?, shape.position(b)?);
    if shape.dims()[pa] != shape.dims()[pb] {
        return Err(Error::DimensionMismatch(format!("cannot swap {a} and {b} of different dimension")));
    }
    let mut pos: Vec<usize> = (0..shape.len()).collect();
    pos.swap(pa, pb);
    Ok(shape.reorder_table(&pos))
}

/// `m ⊗ I` on the subsystems of `target` missing from `shape`, arranged in `target` order.
pub fn embed_identity(m: &HermitianMatrix, shape: &SubsystemShape, target: &SubsystemShape) -> Result<HermitianMatrix> {
    check_shape(m, shape)?;
    let pos = target.positions(shape.labels())?;
    for (&p, &d) in pos.iter().zip(shape.dims()) {
        if target.dims()[p] != d {
            return Err(Error::DimensionMismatch(format!("label {} changes dimension", target.labels()[p])));
        }
    }
    let (src, extra) = target.split_table(&pos);
    let n = target.total_dim();
    let mat = m.matrix();
    let mut out = CMatrix::zeros(n, n);
    for g in groups(&extra, n / shape.total_dim()) {
        for &r in &g {
            for &c in &g {
                out[(r, c)] = mat[(src[r], src[c])];
            }
        }
    }
    Ok(HermitianMatrix::symmetrized(&out))
}

/// `W^π` on `k` copies of `C^d`, mapping `|x_1..x_k>` to `|y>` with `y_{π(j)} = x_j`,
/// so that `W^π W^σ = W^{π∘σ}`.
pub fn permutation_unitary(k: usize, d: usize, pi: &[usize]) -> Result<CMatrix> {
    validate_permutation(k, pi)?;
    let shape = SubsystemShape::new(vec![d; k], (0..k).map(|i| i.to_string()).collect())?;
    let n = shape.total_dim();
    let mut w = CMatrix::zeros(n, n);
    for x in 0..n {
        let xd = shape.digits(x);
        let mut yd = vec![0; k];
        for j in 0..k {
            yd[pi[j]] = xd[j];
        }
        w[(shape.index(&yd), x)] = C64::new(1.0, 0.0);
    }
    Ok(w)
}

pub fn validate_permutation(k: usize, pi: &[usize]) -> Result<()> {
    if pi.len() != k {
        return Err(Error::InvalidPermutation(format!("length {} for k = {k}", pi.len())));
    }
    let mut seen = vec![false; k];
    for &p in pi {
        if p >= k || seen[p] {
            return Err(Error::InvalidPermutation(format!("{pi:?} is not a permutation of 0..{k}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Operator annotated with its subsystem factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledOperator {
    pub op: HermitianMatrix,
    pub shape: SubsystemShape,
}

impl LabeledOperator {
    pub fn new(op: HermitianMatrix, shape: SubsystemShape) -> Result<Self> {
        check_shape(&op, &shape)?;
        Ok(Self { op, shape })
    }

    pub fn identity(shape: SubsystemShape) -> Self {
        Self { op: HermitianMatrix::identity(shape.total_dim()), shape }
    }

    pub fn labels(&self) -> Vec<&str> {
        self.shape.labels().iter().map(String::as_str).collect()
    }

    pub fn kron(&self, other: &Self) -> Result<Self> {
        let shape = self.shape.concat(&other.shape)?;
        Ok(Self { op: self.op.kron(&other.op), shape })
    }

    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<Self> {
        let (op, shape) = permute_subsystems(&self.op, &self.shape, order)?;
        Ok(Self { op, shape })
    }

    pub fn keep<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Ok(Self { op: partial_trace(&self.op, &self.shape, labels)?, shape: self.shape.select(labels)? })
    }

    pub fn trace_out<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        let rest = self.shape.without(labels)?;
        self.keep(rest.labels())
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        Ok(Self { op: self.op.clone(), shape: self.shape.relabel(from, to)? })
    }

    pub fn relabel_all(&self, map: &[(&str, &str)]) -> Result<Self> {
        let labels: Vec<String> = self
            .shape
            .labels()
            .iter()
            .map(|l| map.iter().find(|(f, _)| f == l).map_or(l.clone(), |(_, t)| t.to_string()))
            .collect();
        Ok(Self { op: self.op.clone(), shape: SubsystemShape::new(self.shape.dims().to_vec(), labels)? })
    }

    /// Tensors identity onto the labels of `target` missing here, in `target` order.
    pub fn expand_to(&self, target: &SubsystemShape) -> Result<Self> {
        Ok(Self { op: embed_identity(&self.op, &self.shape, target)?, shape: target.clone() })
    }

    pub fn transpose_on<S: AsRef<str>>(&self, labels: &[S]) -> Result<Self> {
        Ok(Self { op: partial_transpose(&self.op, &self.shape, labels)?, shape: self.shape.clone() })
    }

    pub fn swap(&self, a: &str, b: &str) -> Result<Self> {
        Ok(Self { op: swap_subsystems(&self.op, &self.shape, a, b)?, shape: self.shape.clone() })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { op: self.op.scale(s), shape: self.shape.clone() }
    }

    /// Sum; `other` is reordered to this operator's label order first.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let o = other.reorder(self.shape.labels())?;
        if o.shape != self.shape {
            return Err(Error::ShapeMismatch("summands have different dimensions".into()));
        }
        Ok(Self { op: &self.op + &o.op, shape: self.shape.clone() })
    }

    /// Largest entrywise difference after aligning label order.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let o = other.reorder(self.shape.labels())?;
        if o.shape != self.shape {
            return Err(Error::ShapeMismatch("operands have different dimensions".into()));
        }
        Ok(self.op.max_abs_diff(&o.op))
    }

    /// Link product over the shared labels:
    /// `(A ⋆ B)[(x,y),(x',y')] = Σ_{s,s'} A[(x,s),(x',s')] B[(s,y),(s',y')]`.
    /// The result carries the unshared labels of `self` followed by those of `other`.
    /// For Choi operators, `Γ^{N1} ⋆ Γ^{N2}` is the Choi operator of `N2 ∘ N1`.
    pub fn link(&self, other: &Self) -> Result<Self> {
        let shared: Vec<String> = self.shape.labels().iter().filter(|l| other.shape.contains(l)).cloned().collect();
        for l in &shared {
            if self.shape.dim_of(l)? != other.shape.dim_of(l)? {
                return Err(Error::DimensionMismatch(format!("link label {l} has different dimensions")));
            }
        }
        let xs = self.shape.without(&shared)?;
        let ys = other.shape.without(&shared)?;
        let ss = self.shape.select(&shared)?.reordered(&shared)?;
        let a = self.reorder(&[xs.labels(), ss.labels()].concat())?;
        let b = other.reorder(&[ss.labels(), ys.labels()].concat())?;
        let (dx, dy, ds) = (xs.total_dim(), ys.total_dim(), ss.total_dim());
        let am = a.op.matrix();
        let bm = b.op.matrix();
        let at = CMatrix::from_fn(dx * dx, ds * ds, |r, c| am[((r / dx) * ds + c / ds, (r % dx) * ds + c % ds)]);
        let bt = CMatrix::from_fn(ds * ds, dy * dy, |r, c| bm[((r / ds) * dy + c / dy, (r % ds) * dy + c % dy)]);
        let rt = at * bt;
        let n = dx * dy;
        let out = CMatrix::from_fn(n, n, |r, c| rt[((r / dy) * dx + c / dy, (r % dy) * dy + c % dy)]);
        Ok(Self { op: HermitianMatrix::symmetrized(&out), shape: xs.concat(&ys)? })
    }
}
