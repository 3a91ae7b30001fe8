//! Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
//! any fails. Run with `cargo test -p cobench-core --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::criteria::{self, Check};

fn report(name: &str, budget: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let result = f();
    let took = start.elapsed();
    let (ok, detail) = match result {
        Ok(d) if took <= budget => (true, d),
        Ok(d) => (false, format!("{d}; over the {:.0?} budget", budget)),
        Err(e) => (false, e),
    };
    println!("{} {name} [{:.2}s] {detail}", if ok { "PASS" } else { "FAIL" }, took.as_secs_f64());
    ok
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report("metric-algebra", Duration::from_secs(5), criteria::metric_algebra);
    ok &= report("worked-example", Duration::from_secs(1), criteria::worked_example);
    ok &= report("oracle-equivalence", Duration::from_secs(300), || criteria::oracle_equivalence(200));

    let mut runs = Vec::new();
    ok &= report("mapping-replay", Duration::from_secs(120), || {
        let (log, refs) = criteria::trajectory_campaign()?;
        let r = criteria::mapping_trajectory(&log, &refs);
        runs.push((log, refs));
        r
    });
    ok &= report("three-stage-classification", Duration::from_secs(120), || criteria::three_stage(10));
    ok &= report("determinism", Duration::from_secs(120), || {
        let (log, refs) = criteria::trajectory_campaign()?;
        let (first, _) = runs.first().ok_or("first replay campaign failed")?;
        criteria::determinism(first, &log, &refs)
    });
    ok &= report("dataset-shape", Duration::from_secs(60), criteria::dataset_shape);

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
