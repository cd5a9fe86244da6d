use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use unext::quantum::{ChannelDescriptor, ChannelKind};
use unext::sdp::{alpha_of_ell, unext_alpha_layout, UnextOptions, EXTENSION_TOL};

use crate::commands::{layout_for, options, oracle_for, status_name};
use crate::input::{parse_json, read_text};
use crate::output::{csv_text, write_out, Record};
use crate::{Failure, Figure, Format, SweepArgs};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Grid {
    /// `p` or `q`.
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    fn new(name: &str, start: f64, stop: f64, steps: usize) -> Self {
        Self { name: name.into(), start, stop, steps }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        (0..self.steps)
            .map(|i| {
                let x = self.start + (self.stop - self.start) * i as f64 / (self.steps - 1) as f64;
                // Print 0.05 rather than 0.049999999999999996.
                (x * 1e12).round() / 1e12
            })
            .collect()
    }
}

/// A sweep: one channel family, grids over its parameters, and the order `ℓ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub channel: ChannelDescriptor,
    pub grids: Vec<Grid>,
    pub ell: u32,
    #[serde(default)]
    pub csv: Option<std::path::PathBuf>,
    #[serde(default)]
    pub json: Option<std::path::PathBuf>,
}

impl SweepSpec {
    pub fn preset(figure: Figure, d: usize, ell: u32) -> Self {
        let (kind, grids) = match figure {
            Figure::Erasure => (ChannelKind::Erasure, vec![Grid::new("p", 0.0, 0.6, 13)]),
            Figure::Depolarizing => (ChannelKind::Depolarizing, vec![Grid::new("p", 0.0, 0.5, 26)]),
            Figure::SemicausalErasure => (ChannelKind::SemicausalErasure, vec![Grid::new("p", 0.0, 1.0, 5)]),
            Figure::FlaggedErasure => {
                (ChannelKind::FlaggedErasure, vec![Grid::new("p", 0.0, 1.0, 5), Grid::new("q", 0.0, 1.0, 5)])
            }
        };
        let channel = ChannelDescriptor { kind, d: Some(d), p: None, q: None, choi: None };
        Self { channel, grids, ell, csv: None, json: None }
    }

    fn validate(&self) -> Result<(), Failure> {
        let mut seen = Vec::new();
        for g in &self.grids {
            if g.name != "p" && g.name != "q" {
                return Err(Failure::invalid(format!("unknown grid parameter {:?}; use p or q", g.name)));
            }
            if seen.contains(&g.name) {
                return Err(Failure::invalid(format!("grid parameter {} given twice", g.name)));
            }
            seen.push(g.name.clone());
            if g.steps == 0 {
                return Err(Failure::invalid(format!("grid {} has no points", g.name)));
            }
            for x in [g.start, g.stop] {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Failure::invalid(format!("grid {} bound {x} outside [0, 1]", g.name)));
                }
            }
        }
        Ok(())
    }

    /// Parameter assignments in row order, the first grid varying slowest.
    pub fn points(&self) -> Vec<Vec<(String, f64)>> {
        let mut rows: Vec<Vec<(String, f64)>> = vec![Vec::new()];
        for g in &self.grids {
            rows = rows
                .into_iter()
                .flat_map(|row| {
                    g.points().into_iter().map(move |x| {
                        let mut r = row.clone();
                        r.push((g.name.clone(), x));
                        r
                    })
                })
                .collect();
        }
        rows
    }
}

fn solve_point(spec: &SweepSpec, point: &[(String, f64)], opts: &UnextOptions) -> Record {
    let mut desc = spec.channel.clone();
    for (name, x) in point {
        match name.as_str() {
            "p" => desc.p = Some(*x),
            _ => desc.q = Some(*x),
        }
    }
    let alpha = alpha_of_ell(spec.ell);
    let mut r = Record::new();
    for (name, x) in point {
        r.insert(name.clone(), json!(x));
    }
    let res = layout_for(&desc, false).and_then(|l| Ok(unext_alpha_layout(&l, spec.ell, opts)?));
    match res {
        Ok(v) => {
            r.insert("value_bits".into(), json!(v.value_bits));
            r.insert("status".into(), json!(status_name(v.report.status)));
        }
        Err(f) => {
            r.insert("value_bits".into(), json!(null));
            let status = if f.code == 2 { "failed" } else { "invalid" };
            r.insert("status".into(), json!(status));
            r.insert("error".into(), json!(f.message));
        }
    }
    if let Some((o, rel)) = oracle_for(&desc, alpha) {
        r.insert("oracle_bits".into(), json!(o.value_bits));
        r.insert("oracle_relation".into(), json!(rel.as_str()));
    }
    r
}

pub fn run(a: SweepArgs) -> Result<u8, Failure> {
    let spec = match (&a.spec, a.figure) {
        (Some(path), _) => parse_json::<SweepSpec>(&read_text(&path.to_string_lossy())?, "sweep spec")?,
        (None, Some(fig)) => SweepSpec::preset(fig, a.d, a.ell),
        (None, None) => return Err(Failure::invalid("give --figure or --spec")),
    };
    spec.validate()?;
    let opts = options(a.tol, a.relax_nonsignaling)?;
    let points = spec.points();
    let jobs = a.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::invalid(format!("thread pool: {e}")))?;
    let rows: Vec<Record> = pool.install(|| points.par_iter().map(|pt| solve_point(&spec, pt, &opts)).collect());

    let kind = serde_json::to_value(spec.channel.kind).expect("kind serializes");
    let meta = vec![
        ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ("kind".to_string(), kind.as_str().unwrap_or_default().to_string()),
        ("d".to_string(), spec.channel.d.map_or_else(String::new, |d| d.to_string())),
        ("ell".to_string(), spec.ell.to_string()),
        ("alpha".to_string(), alpha_of_ell(spec.ell).to_string()),
        ("solver_tol".to_string(), opts.tol.to_string()),
        ("extension_tol".to_string(), EXTENSION_TOL.to_string()),
        ("relax_nonsignaling".to_string(), opts.relax_nonsignaling.to_string()),
    ];
    let mut columns: Vec<String> = spec.grids.iter().map(|g| g.name.clone()).collect();
    columns.extend(["value_bits", "oracle_bits", "oracle_relation", "status"].map(String::from));

    let csv = csv_text(&meta, &columns, &rows)?;
    let json = {
        let meta: serde_json::Map<String, serde_json::Value> =
            meta.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        serde_json::to_string_pretty(&json!({ "meta": meta, "columns": columns, "rows": rows })).expect("rows serialize") + "\n"
    };
    if let Some(p) = &spec.csv {
        write_out(Some(p), &csv)?;
    }
    if let Some(p) = &spec.json {
        write_out(Some(p), &json)?;
    }
    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Csv => csv,
        Format::Json => json,
    };
    if a.output.out.is_some() || (spec.csv.is_none() && spec.json.is_none()) {
        write_out(a.output.out.as_deref(), &text)?;
    }

    let failed = rows.iter().filter(|r| !matches!(r["status"].as_str(), Some("optimal" | "inaccurate"))).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} grid points did not solve", rows.len());
        return Ok(2);
    }
    Ok(0)
}
