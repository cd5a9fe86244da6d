use clap::ValueEnum;
use serde::Deserialize;
use serde_json::{json, Value};

use unext::extend::{kext_isotropic_threshold, kext_state_feasible, ExtensionLayout};
use unext::linalg::{CMatrix, HermitianMatrix, LabeledOperator, SubsystemShape, C64};
use unext::oracle::{
    depolarizing_bs, erasure_alpha_bound, erasure_bs_bound, identity_unext, semicausal_erasure_bs, OracleValue,
};
use unext::quantum::{as_bipartite, isotropic_state, max_entangled, AnyChannel, ChannelDescriptor, ChannelKind, SuperchannelChoi};
use unext::sdp::{build_unext_problem, solver_tol_from_env, unext_alpha_layout, GeoSdpResult, SolveStatus, UnextOptions};

use crate::input::{descriptor, parse_json, read_text};
use crate::output::{emit, Record};
use crate::{Failure, Format, KextArgs, OracleArgs, OracleFamily, UnextArgs, ValidateArgs};

/// How an SDP value at `α > 1` relates to an oracle column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// The oracle is the BS value, so the SDP value lies above it.
    Lower,
    /// The oracle bounds the SDP value from above.
    Upper,
}

impl Relation {
    pub fn as_str(self) -> &'static str {
        match self {
            Relation::Lower => "lower",
            Relation::Upper => "upper",
        }
    }
}

/// Closed-form comparison value for a descriptor, when one exists.
pub fn oracle_for(desc: &ChannelDescriptor, alpha: f64) -> Option<(OracleValue, Relation)> {
    let d = desc.d?;
    let p = desc.p.unwrap_or(0.0);
    let v = match desc.kind {
        ChannelKind::Identity => (identity_unext(d).ok()?, Relation::Lower),
        ChannelKind::Erasure => (erasure_alpha_bound(d, p, alpha).ok()?, Relation::Upper),
        ChannelKind::Depolarizing => (depolarizing_bs(d, p).ok()?, Relation::Lower),
        ChannelKind::SemicausalErasure => (semicausal_erasure_bs(d, p).ok()?, Relation::Lower),
        ChannelKind::FlaggedErasure | ChannelKind::Custom => return None,
    };
    Some(v)
}

pub fn status_name(s: SolveStatus) -> &'static str {
    match s {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Unbounded => "unbounded",
        SolveStatus::Inaccurate => "inaccurate",
        SolveStatus::Failed => "failed",
    }
}

pub fn layout_for(desc: &ChannelDescriptor, bipartite: bool) -> Result<ExtensionLayout, Failure> {
    Ok(match desc.build()? {
        AnyChannel::PointToPoint(n) if bipartite => ExtensionLayout::bipartite(&as_bipartite(&n)?)?,
        AnyChannel::PointToPoint(n) => ExtensionLayout::p2p(&n)?,
        AnyChannel::Bipartite(n) => ExtensionLayout::bipartite(&n)?,
    })
}

pub fn options(tol: Option<f64>, relax_nonsignaling: bool) -> Result<UnextOptions, Failure> {
    let tol = match tol {
        Some(t) if t > 0.0 && t.is_finite() => t,
        Some(t) => return Err(Failure::invalid(format!("--tol must be positive, got {t}"))),
        None => solver_tol_from_env(),
    };
    Ok(UnextOptions { tol, relax_nonsignaling })
}

fn result_record(desc: &ChannelDescriptor, res: &GeoSdpResult) -> Record {
    let mut r = Record::new();
    r.insert("kind".into(), serde_json::to_value(desc.kind).expect("kind serializes"));
    r.insert("d".into(), json!(desc.d));
    r.insert("p".into(), json!(desc.p));
    r.insert("q".into(), json!(desc.q));
    r.insert("ell".into(), json!(res.ell));
    r.insert("alpha".into(), json!(res.alpha));
    r.insert("value_bits".into(), json!(res.value_bits));
    r.insert("divergence_bits".into(), json!(res.divergence_bits));
    r.insert("status".into(), json!(status_name(res.report.status)));
    r.insert("wall_time_ms".into(), json!(res.report.wall_time_ms));
    r.insert("iterations".into(), json!(res.report.iterations));
    r.insert("extension_residual".into(), json!(res.extension_residual));
    if let Some((o, rel)) = oracle_for(desc, res.alpha) {
        r.insert("oracle_bits".into(), json!(o.value_bits));
        r.insert("oracle_relation".into(), json!(rel.as_str()));
    }
    r
}

pub fn unext(a: UnextArgs) -> Result<u8, Failure> {
    let desc = descriptor(&a.channel)?;
    let opts = options(a.tol, a.relax_nonsignaling)?;
    let layout = layout_for(&desc, a.bipartite)?;
    if let Some(path) = &a.dump_problem {
        let (problem, _, _) = build_unext_problem(&layout, a.ell, opts.relax_nonsignaling)?;
        std::fs::write(path, problem.to_json())?;
    }
    let res = unext_alpha_layout(&layout, a.ell, &opts)?;
    emit(&a.output, Format::Json, &result_record(&desc, &res))?;
    Ok(if res.report.status == SolveStatus::Optimal { 0 } else { 2 })
}

pub fn oracle(a: OracleArgs) -> Result<u8, Failure> {
    let v = match a.family {
        OracleFamily::Identity => identity_unext(a.d)?,
        OracleFamily::ErasureBs => erasure_bs_bound(a.d, a.p)?,
        OracleFamily::ErasureAlpha => {
            let alpha = a.alpha.ok_or_else(|| Failure::invalid("erasure-alpha needs --alpha"))?;
            erasure_alpha_bound(a.d, a.p, alpha)?
        }
        OracleFamily::Depolarizing => depolarizing_bs(a.d, a.p)?,
        OracleFamily::SemicausalErasure => semicausal_erasure_bs(a.d, a.p)?,
    };
    let mut r = Record::new();
    r.insert("family".into(), json!(a.family.to_possible_value().expect("named family").get_name()));
    r.insert("d".into(), json!(a.d));
    r.insert("p".into(), json!(a.p));
    r.insert("alpha".into(), json!(a.alpha));
    r.insert("value_bits".into(), json!(v.value_bits));
    r.insert("regime".into(), json!(v.regime));
    r.insert("is_exact".into(), json!(v.is_exact));
    emit(&a.output, Format::Json, &r)?;
    Ok(0)
}

fn bipartite_shape(d_a: usize, d_b: usize) -> Result<SubsystemShape, Failure> {
    Ok(SubsystemShape::from_pairs(&[("A", d_a), ("B", d_b)])?)
}

pub fn kext(a: KextArgs) -> Result<u8, Failure> {
    let tol = options(a.tol, false)?.tol;
    let mut r = Record::new();
    r.insert("k".into(), json!(a.k));
    if a.threshold {
        let d = a.channel.d.ok_or_else(|| Failure::invalid("--threshold needs --d"))?;
        let f = kext_isotropic_threshold(d, a.k, tol)?;
        r.insert("d".into(), json!(d));
        r.insert("isotropic_threshold".into(), json!(f));
        emit(&a.output, Format::Json, &r)?;
        return Ok(0);
    }
    let (rho, shape) = if let Some(f) = a.isotropic {
        let d = a.channel.d.ok_or_else(|| Failure::invalid("--isotropic needs --d"))?;
        r.insert("state".into(), json!(format!("isotropic(d={d}, F={f})")));
        (isotropic_state(d, f)?, bipartite_shape(d, d)?)
    } else if a.max_entangled {
        let d = a.channel.d.ok_or_else(|| Failure::invalid("--max-entangled needs --d"))?;
        r.insert("state".into(), json!(format!("max_entangled(d={d})")));
        (max_entangled(d).scale(1.0 / d as f64), bipartite_shape(d, d)?)
    } else {
        let desc = descriptor(&a.channel)?;
        let n = match desc.build()? {
            AnyChannel::PointToPoint(n) => n,
            AnyChannel::Bipartite(_) => return Err(Failure::invalid("kext takes a point-to-point channel")),
        };
        if n.inputs().len() != 1 || n.outputs().len() != 1 {
            return Err(Failure::invalid("kext needs a channel with one input and one output"));
        }
        let (d_in, d_out) = (n.shape().dim_of(&n.inputs()[0])?, n.shape().dim_of(&n.outputs()[0])?);
        let op = n.operator().reorder(&[n.inputs()[0].as_str(), n.outputs()[0].as_str()])?;
        r.insert("state".into(), json!("choi state"));
        (op.op.scale(1.0 / d_in as f64), bipartite_shape(d_in, d_out)?)
    };
    let rep = kext_state_feasible(&rho, &shape, a.k, tol)?;
    r.insert("feasible".into(), json!(rep.feasible));
    for (k, v) in &rep.certificate_residuals {
        r.insert(k.clone(), json!(v));
    }
    if let Some(s) = &rep.solver {
        r.insert("status".into(), json!(status_name(s.status)));
    }
    emit(&a.output, Format::Json, &r)?;
    Ok(0)
}

#[derive(Deserialize)]
struct OperatorFile {
    dims: Vec<usize>,
    labels: Vec<String>,
    re: Vec<Vec<f64>>,
    #[serde(default)]
    im: Option<Vec<Vec<f64>>>,
}

fn read_superchannel(path: &std::path::Path) -> Result<SuperchannelChoi, Failure> {
    let f: OperatorFile = parse_json(&read_text(&path.to_string_lossy())?, "superchannel operator")?;
    let shape = SubsystemShape::new(f.dims, f.labels)?;
    let n = shape.total_dim();
    let ok = |m: &Vec<Vec<f64>>| m.len() == n && m.iter().all(|row| row.len() == n);
    if !ok(&f.re) || !f.im.as_ref().is_none_or(ok) {
        return Err(Failure::invalid(format!("operator entries must be {n}x{n}")));
    }
    let m = CMatrix::from_fn(n, n, |i, j| C64::new(f.re[i][j], f.im.as_ref().map_or(0.0, |im| im[i][j])));
    let op = LabeledOperator::new(HermitianMatrix::with_tol(m, 1e-8)?, shape)?;
    Ok(SuperchannelChoi::new(op)?)
}

pub fn validate_superchannel(a: ValidateArgs) -> Result<u8, Failure> {
    let theta = match (&a.file, a.example) {
        (Some(path), _) => read_superchannel(path)?,
        (None, Some(crate::SuperchannelExample::Identity)) => SuperchannelChoi::identity(a.d, a.d)?,
        (None, None) => return Err(Failure::invalid("give --file or --example")),
    };
    let rep = theta.validate();
    let passes = rep.passes(a.tol);
    let mut r = Record::new();
    r.insert("valid".into(), json!(passes));
    r.insert("tol".into(), json!(a.tol));
    if let Value::Object(m) = serde_json::to_value(rep).expect("report serializes") {
        r.extend(m);
    }
    emit(&a.output, Format::Json, &r)?;
    Ok(if passes { 0 } else { 3 })
}
