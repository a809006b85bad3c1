//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use cellseq::json::{rule_file, rule_from_str, RuleFile};
use cellseq::report::{self, Suite};
use cellseq::visual::checkerboard_sample;
use cellseq::{builtin, CellId, Example, Separation, Tower, VisualMetricConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Expect = fn(usize) -> bool;

const TOL: f64 = 1e-9;
const SEP_TOL: f64 = 1e-12;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn torus2() -> Example {
    builtin::torus_doubling(2).unwrap()
}

fn validate(ex: &Example) -> cellseq::ValidationReport {
    let mut v = ex.rule.base().validate();
    v.merge(ex.rule.refined().validate());
    v.merge(ex.rule.validate());
    if let Some(r) = &ex.realization {
        v.merge(r.validate(&ex.rule));
    }
    v
}

/// The mutated rule must be rejected, either at load time or by validation,
/// with `cell` named.
fn rejects(file: &RuleFile, cell: &str) -> Result<(), String> {
    match rule_from_str(&serde_json::to_string(file).map_err(e)?) {
        Err(err) => ensure(err.to_string().contains(cell), || format!("load error does not name {cell}: {err}")),
        Ok(ex) => {
            let v = validate(&ex);
            ensure(!v.ok, || format!("mutation at {cell} validated"))?;
            ensure(v.names(cell), || format!("violations do not name {cell}"))
        }
    }
}

fn validation() -> Outcome {
    for ex in [torus2(), builtin::torus_doubling(3).map_err(e)?, builtin::pillowcase()] {
        let v = validate(&ex);
        ensure(v.ok, || format!("{} has {} violations", ex.name, v.violations.len()))?;
    }
    let base = rule_file(&torus2());

    let mut deleted = base.clone();
    let face = deleted
        .refined
        .cells
        .iter_mut()
        .find(|c| c.id.as_str() == "f(0+,0+)")
        .ok_or("no refined square f(0+,0+)")?;
    face.faces.retain(|f| f.as_str() != "e(0+,0)");
    rejects(&deleted, "f(0+,0+)")?;

    let mut dim_break = base.clone();
    dim_break.image.insert(CellId::new("e(0+,0)"), CellId::new("v(0,0)"));
    rejects(&dim_break, "e(0+,0)")?;

    let mut wrong_parent = base;
    wrong_parent.parent.insert(CellId::new("f(0+,0+)"), CellId::new("f(1+,1+)"));
    rejects(&wrong_parent, "f(0+,0+)")?;
    Ok("3 built-ins valid; 3 mutations rejected with the cell named".into())
}

fn level_growth() -> Outcome {
    let cases: [(Example, u32, u64, u64, u64); 3] = [
        // (example, max level, chambers at 0, degree, cells per chamber)
        (torus2(), 8, 4, 4, 4),
        (builtin::pillowcase(), 8, 2, 4, 0),
        (builtin::torus_doubling(3).map_err(e)?, 5, 8, 8, 8),
    ];
    for (ex, max_m, c0, deg, per) in cases {
        let t = Tower::from_example(&ex);
        for m in 0..=max_m {
            let want = deg.pow(m) * c0;
            let got = t.chamber_count(m).map_err(e)?;
            ensure(got == want, || format!("{} m={m}: {got} chambers, expected {want}", ex.name))?;
            // Tori: every cell is a translate of a corner cell of a chamber.
            // Pillow: 2 cells per chamber plus the 2 missing cone-point pairs.
            let cells = if per > 0 { per * want } else { 4 * want + 2 };
            let got = t.count_cells(m).map_err(e)?;
            ensure(got == cells, || format!("{} m={m}: {got} cells, expected {cells}", ex.name))?;
        }
    }
    Ok("T^2, pillow m<=8 and T^3 m<=5 match closed forms".into())
}

fn oracle() -> Outcome {
    for ex in [torus2(), builtin::pillowcase()] {
        let t = Tower::from_example(&ex);
        for m in 0..=4 {
            common::isomorphic(&t, m).map_err(|err| format!("{}: {err}", ex.name))?;
        }
    }
    Ok("levels 0..=4 isomorphic to the box complexes".into())
}

fn flowers() -> Outcome {
    for ex in [torus2(), builtin::pillowcase()] {
        let t = Tower::from_example(&ex);
        for m in 1..=5 {
            let r = t.check_flower_invariance(m).map_err(e)?;
            ensure(r.ok(), || format!("{} level {m}: failures at {:?}", ex.name, r.failures))?;
        }
    }
    Ok("f(F_1(p)) = F_0(f(p)) at levels 1..=5".into())
}

fn multiplicity() -> Outcome {
    let t2 = torus2().rule.multiplicity_table();
    ensure(t2.max() == 1, || format!("T^2 max multiplicity {}", t2.max()))?;
    ensure(t2.inequality_holds(), || "T^2 chamber-count inequality fails".into())?;

    let ex = builtin::pillowcase();
    let real = ex.realization.as_ref().ok_or("pillow has no realization")?;
    let d1 = ex.rule.refined();
    let table = ex.rule.multiplicity_table();
    let mut doubled = 0;
    for c in 0..d1.len() {
        // Level-1 vertices sit on the half-integer grid; corners are the
        // integer points, and every other vertex maps onto a corner.
        let b = &real.refined_boxes[c];
        let corner_preimage = d1.dim(c) == 0 && b.lo.iter().any(|x| (x - x.round()).abs() > TOL);
        let want = if corner_preimage { 2 } else { 1 };
        let got = table.cells[d1.id(c)];
        ensure(got == want, || format!("{}: multiplicity {got}, expected {want}", d1.id(c).as_str()))?;
        doubled += corner_preimage as usize;
    }
    ensure(table.inequality_holds(), || "pillow chamber-count inequality fails".into())?;
    Ok(format!("T^2 all 1; pillow 2 on {doubled} corner preimages, 1 elsewhere"))
}

fn ffi() -> Outcome {
    let cases: [(Example, Expect); 3] = [
        (torus2(), |n| n == 4),
        (builtin::torus_doubling(3).map_err(e)?, |n| n == 8),
        (builtin::pillowcase(), |n| n <= 4),
    ];
    for (ex, ok) in cases {
        let t = Tower::from_example(&ex);
        for row in t.ffi_report(6).map_err(e)? {
            ensure(ok(row.max_vertex_chambers), || {
                format!("{} level {}: {}", ex.name, row.level, row.max_vertex_chambers)
            })?;
        }
    }
    Ok("T^2 = 4, T^3 = 8, pillow <= 4 through level 6".into())
}

fn joining() -> Outcome {
    let t = Tower::from_example(&torus2());
    let s = t.joining_numbers(3, 64).map_err(e)?;
    let values: Vec<Option<usize>> = s.reports.iter().map(|r| r.value).collect();
    ensure(values == [Some(1), Some(2), Some(4), Some(8)], || format!("J = {values:?}"))?;
    ensure(s.reports.iter().all(|r| r.verified), || "unverified witness".into())?;
    ensure(s.monotone, || "not monotone".into())?;
    Ok("J = 1, 2, 4, 8, monotone".into())
}

fn separation() -> Outcome {
    let t = Tower::from_example(&torus2());
    let x = t.locate(&[0.0, 0.0], 6).map_err(e)?;
    let y = t.locate(&[1.0, 0.0], 6).map_err(e)?;
    let m = t.separation_level(&x, &y).map_err(e)?;
    ensure(m == Separation::Exact(1), || format!("m((0,0),(1,0)) = {m:?}"))?;
    let h = t.hyperbolicity_constants(5).map_err(e)?;
    ensure(h.iteration_ok && h.iteration.violations == 0, || format!("iteration check: {:?}", h.iteration))?;
    ensure(h.k0 <= 3, || format!("k0 = {}", h.k0))?;
    Ok(format!("m = 1; iteration ok on {} pairs; k0 = {}", h.iteration.pairs, h.k0))
}

fn visual() -> Outcome {
    let t = Tower::from_example(&torus2());
    let deep = VisualMetricConfig::vertices(&t, 2.0, 1.0, 6).map_err(e)?;
    let r6 = t.chain_metric(&deep).map_err(e)?;
    ensure(r6.check.ok(), || format!("depth 6 check: {:?}", r6.check))?;
    ensure(r6.check.dominated_by_q, || "rho exceeds q".into())?;
    let r4 = t.chain_metric(&VisualMetricConfig::vertices(&t, 2.0, 1.0, 4).map_err(e)?).map_err(e)?;
    ensure(r4.check.ok(), || format!("depth 4 check: {:?}", r4.check))?;
    let ratio = r6.c_meas / r4.c_meas;
    ensure(r6.c_meas.is_finite() && ratio.abs() <= 2.0, || {
        format!("C_meas {} vs {}", r6.c_meas, r4.c_meas)
    })?;

    let cfg = VisualMetricConfig::new(2.0, 1.0, 7, checkerboard_sample(&t, 5, 7).map_err(e)?).map_err(e)?;
    let rep = t.chain_metric(&cfg).map_err(e)?;
    ensure(rep.check.ok(), || format!("checkerboard check: {:?}", rep.check))?;
    let table = t.cell_metric_report(&rep, &cfg, 5).map_err(e)?;
    let c = table.c_prime.ok_or("cell metric has insufficient coverage")?;
    ensure(c.is_finite(), || "C' infinite".into())?;
    Ok(format!("C_meas {} (depth 4: {}); C' = {c} over levels 1..=5", r6.c_meas, r4.c_meas))
}

fn qv() -> Outcome {
    let t = Tower::from_example(&torus2());
    let qv = t.qv_constants(5, 5).map_err(e)?;
    for k in 1..=5usize {
        let want = 2f64.powi(k as i32);
        ensure(qv.alpha[k - 1] == want && qv.beta[k - 1] == want, || {
            format!("k={k}: alpha {} beta {}", qv.alpha[k - 1], qv.beta[k - 1])
        })?;
    }
    for m in 1..=5usize {
        let v = qv.lambda_sep_by_level[m].ok_or_else(|| format!("no disjoint pair at level {m}"))?;
        ensure((v - 0.5f64.sqrt()).abs() <= SEP_TOL, || format!("lambda_sep level {m} = {v}"))?;
    }
    let mus: Vec<f64> = qv.mu_by_depth.iter().map(|p| p.1).collect();
    ensure(qv.mu.is_finite() && mus.iter().all(|m| m.is_finite()), || format!("mu = {mus:?}"))?;
    let (lo, hi) = mus.iter().fold((f64::INFINITY, 0f64), |(a, b), &m| (a.min(m), b.max(m)));
    ensure(hi <= lo * (1.0 + TOL), || format!("mu varies with depth: {mus:?}"))?;
    Ok(format!("alpha = beta = 2^k; lambda_sep = 1/sqrt 2; mu = {}", qv.mu))
}

fn bqs() -> Outcome {
    let t = Tower::from_example(&torus2());
    let env = t.bqs_envelope(1..=6, 0).map_err(e)?;
    ensure(env.min_eta_over_t >= 0.25 && env.max_eta_over_t <= 4.0, || {
        format!("T^2 eta/t in [{}, {}]", env.min_eta_over_t, env.max_eta_over_t)
    })?;
    let p = Tower::from_example(&builtin::pillowcase()).bqs_envelope(1..=6, 0).map_err(e)?;
    let finite = p.levels.iter().all(|l| l.steps.iter().all(|s| s.1.is_finite()));
    ensure(finite && p.stability_factor <= 2.0, || format!("pillow stability {}", p.stability_factor))?;
    Ok(format!(
        "T^2 eta/t in [{:.3}, {:.3}]; pillow stability {:.3}",
        env.min_eta_over_t, env.max_eta_over_t, p.stability_factor
    ))
}

fn cxc() -> Outcome {
    let t = Tower::from_example(&torus2()).cxc_report(5).map_err(e)?;
    ensure(t.expans.mesh_ratios.iter().all(|&r| r == 0.5), || format!("mesh ratios {:?}", t.expans.mesh_ratios))?;
    ensure(t.expanding, || "T^2 not flagged expanding".into())?;
    ensure(t.deg_max == 1, || format!("T^2 deg {}", t.deg_max))?;
    ensure((t.theta - 0.5).abs() <= TOL, || format!("theta {}", t.theta))?;
    let p = Tower::from_example(&builtin::pillowcase()).cxc_report(5).map_err(e)?;
    ensure(p.deg_max == 2, || format!("pillow deg {}", p.deg_max))?;
    let id = Tower::from_example(&builtin::identity_rule()).cxc_report(3).map_err(e)?;
    ensure(!id.expanding, || "identity flagged expanding".into())?;
    Ok("T^2 rate 1/2, deg 1, theta 1/2; pillow deg 2; identity non-expanding".into())
}

fn full_suite(seed: u64) -> Result<String, String> {
    let mut out = String::new();
    for ex in [torus2(), builtin::pillowcase()] {
        let t = Tower::from_example(&ex);
        out += &report::diagnose(&t, Suite::All, 4, seed).map_err(e)?.to_json().map_err(e)?;
    }
    Ok(out)
}

fn determinism() -> Outcome {
    let a = full_suite(0)?;
    let b = full_suite(0)?;
    ensure(a == b, || "reports differ between runs".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        ("validation", validation),
        ("level_growth", level_growth),
        ("oracle_equivalence", oracle),
        ("flower_invariance", flowers),
        ("multiplicity", multiplicity),
        ("ffi_table", ffi),
        ("joining_numbers", joining),
        ("separation_level", separation),
        ("visual_metric", visual),
        ("qv_constants", qv),
        ("bqs_envelope", bqs),
        ("cxc_report", cxc),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
