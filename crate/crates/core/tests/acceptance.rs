//! One line per acceptance criterion; exits nonzero if any fails.

use std::thread;

use morley_core::study::{exact_eigenvalue, run_study, StudyConfig, StudyReport, TableId};
use morley_core::verify::{eigen_identity_residuals, interpolation_orders, run_suite, Status, Suite, VerifyConfig};
use morley_core::BoundaryCondition;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Largest relative deviation from the published values.
fn max_table_dev(r: &StudyReport) -> f64 {
    r.rows
        .iter()
        .map(|row| rel(row.lambda_h, row.published.expect("published value")))
        .fold(0.0, f64::max)
}

/// Largest relative spread inside each cluster of equal published values.
fn cluster_spread(r: &StudyReport, cluster: &[usize]) -> f64 {
    let mut worst: f64 = 0.0;
    for &n in &r.ns {
        let vals: Vec<f64> = cluster.iter().map(|&i| r.row(i, n).unwrap().lambda_h).collect();
        for v in &vals {
            worst = worst.max(rel(*v, vals[0]));
        }
    }
    worst
}

fn table_check(r: &StudyReport, clusters: &[&[usize]]) -> Outcome {
    let dev = max_table_dev(r);
    let spread = clusters.iter().map(|c| cluster_spread(r, c)).fold(0.0, f64::max);
    let mono = r.all_monotone();
    outcome(
        dev <= 1e-3 && spread <= 1e-8 && mono,
        format!("N={:?}, max rel dev {dev:.2e}, cluster spread {spread:.1e}, increasing {mono}", r.ns),
    )
}

fn lower_bound(reports: &[&StudyReport]) -> Outcome {
    let mut worst = f64::INFINITY;
    let mut ok = true;
    for r in reports {
        for row in &r.rows {
            let exact = exact_eigenvalue(r.dim, r.bc, row.index).unwrap();
            ok &= row.lambda_h < exact;
            worst = worst.min(exact - row.lambda_h);
        }
    }
    outcome(ok, format!("smallest gap exact - lambda_h = {worst:.4}"))
}

fn rates(t2: &StudyReport, t4: &StudyReport) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for r in [t2, t4] {
        for row in &r.rows {
            if let (Some(rate), Some(p)) = (row.rate, row.published_rate) {
                worst = worst.max((rate - p).abs());
                count += 1;
            }
        }
    }
    let last = (1..=6).map(|i| t2.row(i, 32).unwrap().rate.unwrap()).fold(f64::INFINITY, f64::min);
    outcome(
        count == 42 && worst <= 1e-3 && last >= 1.93,
        format!("{count} printed rates, max |diff| {worst:.2e}, min rate 16->32 {last:.6}"),
    )
}

fn suite_outcome(suite: Suite, cfg: &VerifyConfig, extra: impl Fn(&[morley_core::verify::Check]) -> (bool, String)) -> Outcome {
    let checks = run_suite(suite, cfg);
    let pass = checks.iter().filter(|c| c.status == Status::Pass).count();
    let fail = checks.iter().filter(|c| c.status == Status::Fail).count();
    let worst = checks
        .iter()
        .filter(|c| c.status != Status::Deviation)
        .map(|c| c.diff)
        .fold(0.0, f64::max);
    let (ok, note) = extra(&checks);
    outcome(fail == 0 && ok, format!("{pass} pass, {fail} fail, max |diff| {worst:.1e}{note}"))
}

fn main() {
    let reports: Vec<StudyReport> = thread::scope(|s| {
        let handles: Vec<_> = TableId::all()
            .into_iter()
            .map(|t| s.spawn(move || run_study(&StudyConfig::for_table(t)).expect("table run")))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let [t1, t2, t3, t4] = [&reports[0], &reports[1], &reports[2], &reports[3]];
    assert_eq!(t2.bc, BoundaryCondition::SimplySupported);
    let cfg = VerifyConfig::default();

    let mut results: Vec<(&str, Outcome)> = vec![
        ("table 2 values, 2D simply supported", table_check(t2, &[&[2, 3], &[5, 6]])),
        ("table 1 values, 2D clamped, increasing rows, double pair", table_check(t1, &[&[2, 3]])),
        ("table 4 values, 3D simply supported, triple cluster", table_check(t4, &[&[2, 3, 4], &[5, 6]])),
        ("table 3 values, 3D clamped, increasing rows", table_check(t3, &[&[2, 3, 4], &[5, 6]])),
        ("lower bounds for simply supported plates", lower_bound(&[t2, t4])),
        ("printed convergence rates", rates(t2, t4)),
    ];
    results.push((
        "2D refined identity, 200 random pairs",
        suite_outcome(Suite::Lemma2d, &cfg, |c| {
            let w = &c[0];
            let ok = (w.lhs - 16.0).abs() < 1e-12 && (w.rhs - 16.0).abs() < 1e-12 && c.len() == 201;
            (ok, format!(", worked case lhs {} rhs {}", w.lhs, w.rhs))
        }),
    ));
    results.push((
        "3D refined identity on the covered quartics",
        suite_outcome(Suite::Lemma3d, &cfg, |c| {
            let d = &c[0];
            let ok = d.status == Status::Deviation && (d.lhs + 32.0 / 3.0).abs() < 1e-12 && d.rhs.abs() < 1e-12;
            (ok, format!(", deviation lhs {:.6} rhs {}", d.lhs, d.rhs))
        }),
    ));
    results.push((
        "bubbles annihilate all DOFs",
        suite_outcome(Suite::Bubbles, &cfg, |c| {
            let pass = c.iter().filter(|x| x.status == Status::Pass).count();
            let dev = c.iter().filter(|x| x.status == Status::Deviation).count();
            (pass == 25 && dev == 4, format!(", {dev} printed-form deviations"))
        }),
    ));
    results.push((
        "moment projection commutes with fourth derivatives",
        suite_outcome(Suite::Commuting, &cfg, |c| (c.len() == 28 + 84, String::new())),
    ));
    results.push(("eigenvalue error identity", {
        let mut ok = true;
        let mut detail = String::new();
        for n in [4, 8] {
            let (gap, plus, minus) = eigen_identity_residuals(n, &cfg).expect("identity run");
            ok &= plus <= 1e-6 && minus <= 1e-6 && (plus - minus).abs() <= 1e-6;
            if n == 4 {
                ok &= (gap - 42.11).abs() < 0.01;
            }
            detail += &format!("N={n}: gap {gap:.4}, residual {plus:.1e} / negated {minus:.1e}; ");
        }
        outcome(ok, detail.trim_end_matches("; "))
    }));
    results.push(("interpolation error orders", {
        let (l2, h2) = interpolation_orders(&cfg);
        outcome((l2 - 3.0).abs() <= 0.3 && (h2 - 1.0).abs() <= 0.3, format!("L2 {l2:.4}, broken H2 {h2:.4}"))
    }));

    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!("[{}] {:>2} {name}: {}", if o.ok { "PASS" } else { "FAIL" }, i + 1, o.detail);
        failed += usize::from(!o.ok);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
