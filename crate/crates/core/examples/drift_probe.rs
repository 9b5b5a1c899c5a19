use ellax::config::RunConfig;
use ellax::suites;
use std::time::Instant;

fn main() {
    let cfg = RunConfig::default();
    let t0 = Instant::now();
    let recs = suites::run_all(&cfg).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let mut fails = 0;
    for r in &recs {
        if !r.pass {
            fails += 1;
            println!(
                "FAIL {}/{}: residual {:.3e} tol {:.1e} ({} of {} accepted)",
                r.suite, r.tag, r.max_residual, r.tolerance, r.samples_accepted, r.samples_attempted
            );
        }
    }
    println!("{} records, {} failing, {:.2}s total", recs.len(), fails, elapsed);
}
