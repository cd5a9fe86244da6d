//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use unext::extend::kext_isotropic_threshold;
use unext::linalg::{CMatrix, HermitianMatrix, LabeledOperator, SubsystemShape};
use unext::oracle::{depolarizing_bs, erasure_alpha_bound};
use unext::quantum::*;
use unext::sdp::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Suite = (&'static str, fn(u64) -> Result<(), String>);

const SLACK: f64 = 1e-4;
const GAP: f64 = 0.02;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs `f`, failing when it exceeds `limit`.
fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<(T, Duration), String> {
    let start = Instant::now();
    let v = f();
    let t = start.elapsed();
    check(t <= limit, || format!("{what} took {t:.1?}, limit {limit:?}"))?;
    Ok((v, t))
}

fn sdp<T>(r: unext::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn identity_channel() -> Outcome {
    let mut slowest = Duration::ZERO;
    for d in [2, 3] {
        let n = sdp(make_identity(d))?;
        for ell in [3, 6, 10] {
            let (v, t) = timed(Duration::from_secs(10), "identity solve", || unext_alpha_p2p(&n, ell))?;
            let v = sdp(v)?.value_bits;
            let want = (d as f64).log2();
            check((v - want).abs() <= SLACK, || format!("d {d} ell {ell}: {v} vs {want}"))?;
            slowest = slowest.max(t);
        }
    }
    Ok(format!("d in {{2,3}}, ell in {{3,6,10}}; slowest solve {slowest:.2?}"))
}

fn max_entangled_state() -> Outcome {
    let mut vals = Vec::new();
    for d in [2, 3] {
        let shape = sdp(SubsystemShape::from_pairs(&[("A", d), ("B", d)]))?;
        let phi = max_entangled(d).scale(1.0 / d as f64);
        let v = sdp(unext_alpha_state(&phi, &shape, 8))?.value_bits;
        let want = (d as f64).log2();
        check((v - want).abs() <= SLACK, || format!("d {d}: {v} vs {want}"))?;
        vals.push(format!("d={d}: {v:.6}"));
    }
    Ok(vals.join(", "))
}

fn depolarizing_exactness() -> Outcome {
    let mut notes = Vec::new();
    let limit = Duration::from_secs(60);
    for p in [0.05, 0.1, 0.2] {
        let n = sdp(make_depolarizing(2, p))?;
        let (v, _) = timed(limit, "depolarizing point", || unext_alpha_p2p(&n, 10))?;
        let v = sdp(v)?.value_bits;
        let o = sdp(depolarizing_bs(2, p))?.value_bits;
        check(v >= o - SLACK && v <= o + GAP, || format!("p {p}: {v} outside [{o}, {o} + {GAP}]"))?;
        notes.push(format!("p={p}: {v:.5} (oracle {o:.5})"));
    }
    for p in [1.0 / 3.0, 0.4] {
        let n = sdp(make_depolarizing(2, p))?;
        let (v, _) = timed(limit, "depolarizing point", || unext_alpha_p2p(&n, 10))?;
        let v = sdp(v)?.value_bits;
        check(v <= SLACK, || format!("p {p}: {v} > {SLACK}"))?;
        notes.push(format!("p={p:.4}: {v:.1e}"));
    }
    Ok(notes.join(", "))
}

fn semicausal_erasure() -> Outcome {
    let mut notes = Vec::new();
    for p in [0.25, 0.5, 0.75] {
        let n = sdp(make_semicausal_erasure(2, p))?;
        let (v, t) = timed(Duration::from_secs(300), "semicausal point", || unext_alpha_bipartite(&n, 10))?;
        let v = sdp(v)?.value_bits;
        let want = 1.0 - p;
        check(v >= want - SLACK && v <= want + GAP, || format!("p {p}: {v} outside [{want}, {want} + {GAP}]"))?;
        notes.push(format!("p={p}: {v:.5} in {t:.1?}"));
    }
    Ok(notes.join(", "))
}

fn erasure_grid() -> Vec<f64> {
    (0..13).map(|i| 0.05 * i as f64).collect()
}

fn erasure_bounds() -> Outcome {
    let alpha = alpha_of_ell(10);
    let mut worst = f64::NEG_INFINITY;
    for p in erasure_grid() {
        let v = sdp(unext_alpha_p2p(&sdp(make_erasure(2, p))?, 10))?.value_bits;
        let bound = sdp(erasure_alpha_bound(2, p, alpha))?.value_bits;
        check(v <= bound + SLACK, || format!("p {p}: {v} > bound {bound}"))?;
        if p >= 0.5 {
            check(v <= SLACK, || format!("p {p}: {v} > {SLACK}"))?;
        }
        worst = worst.max(v - bound);
    }
    Ok(format!("13 points in [0, 0.6]; max(SDP - bound) = {worst:.2e}"))
}

fn replacer_candidate(n: &ChoiChannel, d: usize) -> Result<LabeledOperator, String> {
    let pi = labeled(HermitianMatrix::identity(d).scale(1.0 / d as f64), &[("B#2", d)]);
    sdp(n.operator().relabel("B", "B#1").and_then(|g| g.kron(&pi)))
}

/// The input reaches one of the two copies and the other sees the flag.
fn erasure_split_candidate(d: usize, p: f64) -> Result<LabeledOperator, String> {
    let id = sdp(make_erasure(d, 0.0))?;
    let flag = |l: &str| labeled(HermitianMatrix::basis_projector(d + 1, d), &[(l, d + 1)]);
    let to = |l: &str| sdp(id.operator().relabel("B", l));
    let a = sdp(to("B#2")?.kron(&flag("B#1")))?.scale(p);
    let b = sdp(to("B#1")?.kron(&flag("B#2")))?.scale(1.0 - p);
    sdp(a.add(&b))
}

fn min_geo_zeros() -> Outcome {
    let mut worst_dep: f64 = 0.0;
    for p in [0.05, 0.1, 0.2, 0.5, 1.0] {
        let n = sdp(make_depolarizing(2, p))?;
        let v = sdp(min_geo_upper_bound_p2p(&n, &[replacer_candidate(&n, 2)?]))?;
        check(v <= 1e-9, || format!("depolarizing p {p}: {v}"))?;
        worst_dep = worst_dep.max(v);
    }
    let mut notes = Vec::new();
    for p in [0.25, 0.5, 0.75] {
        let v = sdp(erasure_alpha_bound(2, p, 1e-3))?.value_bits;
        check(v <= 1e-3, || format!("erasure alpha bound p {p}: {v}"))?;
        notes.push(format!("p={p}: {v:.1e}"));
    }
    let mut worst_era: f64 = 0.0;
    for p in erasure_grid().into_iter().skip(1) {
        let n = sdp(make_erasure(2, p))?;
        let v = sdp(min_geo_upper_bound_p2p(&n, &[erasure_split_candidate(2, p)?]))?;
        check(v <= 1e-9, || format!("erasure split candidate p {p}: {v}"))?;
        worst_era = worst_era.max(v);
    }
    Ok(format!(
        "depolarizing replacer max {worst_dep:.1e}; erasure alpha=1e-3 bound {}; erasure candidates max {worst_era:.1e}",
        notes.join(", ")
    ))
}

fn extendibility_boundary() -> Outcome {
    let mut notes = Vec::new();
    for d in [2usize, 3] {
        let f = sdp(kext_isotropic_threshold(d, 2, DEFAULT_SOLVER_TOL))?;
        let df = d as f64;
        let p_star = df / (2.0 * (df + 1.0));
        let want = 1.0 - p_star + p_star / (df * df);
        check((f - want).abs() <= 1e-3, || format!("d {d}: threshold {f} vs {want}"))?;
        notes.push(format!("d={d}: {f:.5} (want {want:.5})"));
    }
    Ok(notes.join(", "))
}

fn divergence_properties() -> Outcome {
    const SEEDS: u64 = 64;
    let suites: [Suite; 8] = [
        ("alpha monotone", props::alpha_monotone),
        ("data processing", props::data_processing),
        ("tensor additivity", props::tensor_additivity),
        ("direct sum", props::direct_sum),
        ("alpha to one", props::alpha_to_one),
        ("alpha to zero", props::alpha_to_zero),
        ("classical chain rule", props::chain_rule_classical),
        ("sdp vs closed form", props::sdp_matches_closed_form),
    ];
    for (name, f) in suites {
        for seed in 0..SEEDS {
            f(seed).map_err(|e| format!("{name}: {e}"))?;
        }
    }
    Ok(format!("{} suites x {SEEDS} seeds", suites.len()))
}

/// Kraus operators of `post ∘ (N ⊗ id_M) ∘ pre`.
fn composed_kraus(pre: &[CMatrix], n: &[CMatrix], post: &[CMatrix], d_m: usize) -> Vec<CMatrix> {
    let id_m = CMatrix::identity(d_m, d_m);
    let mut out = Vec::new();
    for e in pre {
        for k in n {
            for d in post {
                out.push(d * k.kronecker(&id_m) * e);
            }
        }
    }
    out
}

fn superchannel_calculus() -> Outcome {
    let tol = 1e-8;
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let mut r = rng(seed);
        let n = random_channel(2, 3, 3, &mut r);
        let m = sdp(superchannel_apply(&sdp(SuperchannelChoi::identity(2, 3))?, &n))?;
        let diff = m.choi().max_abs_diff(n.choi());
        check(diff <= tol, || format!("identity superchannel seed {seed}: {diff}"))?;
        worst = worst.max(diff);

        let d_m = 1 + seed as usize % 2;
        let pre_k = random_kraus(2, 2 * d_m, 2, &mut r);
        let post_k = random_kraus(2 * d_m, 2, 2, &mut r);
        let n_k = random_kraus(2, 2, 2, &mut r);
        let pre = with_labels(&sdp(choi_from_kraus(&pre_k, 2, 2 * d_m))?, &[("C", 2)], &[("A", 2), ("M", d_m)]);
        let post = with_labels(&sdp(choi_from_kraus(&post_k, 2 * d_m, 2))?, &[("B", 2), ("M", d_m)], &[("D", 2)]);
        let theta = sdp(SuperchannelChoi::from_pre_post(&pre, &post))?;
        check(theta.validate().passes(tol), || format!("pre/post seed {seed} rejected"))?;
        let out = sdp(superchannel_apply(&theta, &sdp(choi_from_kraus(&n_k, 2, 2))?))?;
        let want = sdp(choi_from_kraus(&composed_kraus(&pre_k, &n_k, &post_k, d_m), 2, 2))?;
        let diff = out.choi().max_abs_diff(want.choi());
        check(diff <= tol, || format!("pre/post seed {seed}: {diff}"))?;
        worst = worst.max(diff);

        let outcomes = 1 + seed as usize % 3;
        let inst: Vec<ChoiChannel> = instrument_from_kraus(&random_kraus(2, 2, 3, &mut r), outcomes)
            .iter()
            .map(|e| with_labels(e, &[("C", 2)], &[("A", 2)]))
            .collect();
        let posts: Vec<ChoiChannel> =
            (0..outcomes).map(|_| with_labels(&random_channel(3, 2, 2, &mut r), &[("B", 3)], &[("D", 2)])).collect();
        let theta = sdp(SuperchannelChoi::one_way_locc(&inst, &posts))?;
        check(theta.validate().passes(tol), || format!("1W-LOCC seed {seed} rejected"))?;
        let noise = random_hermitian(theta.choi().dim(), &mut r).scale(1e-3);
        let bad = sdp(LabeledOperator::new(theta.choi() + &noise, theta.shape().clone()))?;
        check(!sdp(SuperchannelChoi::new(bad))?.validate().passes(1e-7), || format!("perturbed seed {seed} accepted"))?;
    }
    Ok(format!("20 seeds; max round-trip deviation {worst:.1e}"))
}

struct Row {
    cells: Vec<String>,
}

impl Row {
    fn f(&self, i: usize) -> Result<f64, String> {
        self.cells[i].parse().map_err(|_| format!("cell {:?} is not a number", self.cells[i]))
    }
}

/// Runs `unext sweep --figure <fig> --d <d>` and returns the data rows, checking the status column.
fn run_sweep(fig: &str, d: usize) -> Result<(Vec<String>, Vec<Row>), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_unext"))
        .args(["sweep", "--figure", fig, "--d", &d.to_string(), "--ell", "10"])
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
    check(out.status.success(), || format!("{fig} d={d} exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)))?;
    let mut lines = text.lines();
    check(lines.next().is_some_and(|l| l.starts_with("# meta ")), || format!("{fig}: missing meta line"))?;
    let header: Vec<String> = lines.next().ok_or("empty csv")?.split(',').map(String::from).collect();
    let rows: Vec<Row> = lines.map(|l| Row { cells: l.split(',').map(String::from).collect() }).collect();
    let status = header.iter().position(|h| h == "status").ok_or("no status column")?;
    for r in &rows {
        check(matches!(r.cells[status].as_str(), "optimal" | "inaccurate"), || format!("{fig}: row {:?}", r.cells))?;
    }
    Ok((header, rows))
}

fn col(header: &[String], name: &str) -> Result<usize, String> {
    header.iter().position(|h| h == name).ok_or_else(|| format!("no column {name}"))
}

fn figure_data() -> Outcome {
    let start = Instant::now();

    let (h, rows) = run_sweep("erasure", 2)?;
    let (p, v, o) = (col(&h, "p")?, col(&h, "value_bits")?, col(&h, "oracle_bits")?);
    check(rows.len() == 13, || format!("erasure: {} rows", rows.len()))?;
    for r in &rows {
        let (p, v, o) = (r.f(p)?, r.f(v)?, r.f(o)?);
        check(v <= o + SLACK, || format!("erasure p {p}: {v} > bound {o}"))?;
        check(p < 0.5 || v <= SLACK, || format!("erasure p {p}: {v} not zero"))?;
    }

    for d in [2, 3] {
        let (h, rows) = run_sweep("depolarizing", d)?;
        let (p, v, o) = (col(&h, "p")?, col(&h, "value_bits")?, col(&h, "oracle_bits")?);
        check(rows.len() == 26, || format!("depolarizing d={d}: {} rows", rows.len()))?;
        let threshold = d as f64 / (2.0 * (d as f64 + 1.0));
        for r in &rows {
            let (p, v, o) = (r.f(p)?, r.f(v)?, r.f(o)?);
            check(v >= o - SLACK && v <= o + GAP, || format!("depolarizing d={d} p {p}: {v} vs oracle {o}"))?;
            check(p < threshold || v <= SLACK, || format!("depolarizing d={d} p {p}: {v} not zero"))?;
        }
    }

    let (h, rows) = run_sweep("semicausal-erasure", 2)?;
    let (p, v) = (col(&h, "p")?, col(&h, "value_bits")?);
    for r in &rows {
        let (p, v) = (r.f(p)?, r.f(v)?);
        check(v >= 1.0 - p - SLACK && v <= 1.0 - p + GAP, || format!("semicausal p {p}: {v}"))?;
    }

    let (h, rows) = run_sweep("flagged-erasure", 2)?;
    let (p, q, v) = (col(&h, "p")?, col(&h, "q")?, col(&h, "value_bits")?);
    check(rows.len() == 25, || format!("flagged: {} rows", rows.len()))?;
    let mut at_q0 = Vec::new();
    for r in &rows {
        let (p, q, v) = (r.f(p)?, r.f(q)?, r.f(v)?);
        check(p > 0.0 || (1.0 - SLACK..=1.0 + GAP).contains(&v), || format!("flagged p 0 q {q}: {v}"))?;
        if q == 0.0 {
            at_q0.push(v);
        }
    }
    check(at_q0.windows(2).all(|w| w[1] <= w[0] + SLACK), || format!("flagged q=0 not nonincreasing: {at_q0:?}"))?;

    let t = start.elapsed();
    check(t <= Duration::from_secs(7200), || format!("sweeps took {t:.1?}"))?;
    Ok(format!("erasure, depolarizing d=2/3, semicausal and 5x5 flagged grids in {t:.1?}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("identity channel", identity_channel),
        ("maximally entangled state", max_entangled_state),
        ("depolarizing exactness", depolarizing_exactness),
        ("semicausal erasure", semicausal_erasure),
        ("erasure bounds", erasure_bounds),
        ("min-geometric zeros", min_geo_zeros),
        ("extendibility boundary", extendibility_boundary),
        ("divergence properties", divergence_properties),
        ("superchannel calculus", superchannel_calculus),
        ("figure data", figure_data),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{t:.1?}]: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{t:.1?}]: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
