//! Acceptance gate: every criterion below runs at its pinned tolerance and
//! prints one pass/fail line (visible with `cargo test --test acceptance --
//! --nocapture`).

use std::time::Instant;

use ellax::config::RunConfig;
use ellax::report::{clear_timings, VerificationRecord};
use ellax::suites;

fn gate(number: u32, what: &str, pass: bool, detail: String) {
    println!(
        "criterion {number:2} [{}] {what}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number} failed: {what}: {detail}");
}

fn records_by_tag<'a>(
    recs: &'a [VerificationRecord],
    suite: &str,
    tag: &str,
) -> &'a VerificationRecord {
    recs.iter()
        .find(|r| r.suite == suite && r.tag == tag)
        .unwrap_or_else(|| panic!("missing record {suite}/{tag}"))
}

#[test]
fn criterion_01_identity_battery() {
    let cfg = RunConfig::default();
    assert_eq!(cfg.samples.identities, 100);
    let t0 = Instant::now();
    let recs = suites::run_identity_suite(&cfg).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let worst = recs.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let all_pass = recs.iter().all(|r| r.pass && r.tolerance == 1e-10);
    gate(
        1,
        "appendix identity battery",
        all_pass && elapsed < 20.0,
        format!("{} identities, worst residual {worst:.2e}, {elapsed:.2}s (< 20s)", recs.len()),
    );
}

#[test]
fn criterion_02_lax_residuals() {
    let cfg = RunConfig::default();
    assert_eq!(cfg.samples.lax, 50);
    let recs = suites::run_lax_suite(&cfg).unwrap();
    let mut detail = String::new();
    let mut pass = true;
    for tag in ["vd8", "vd4-1", "vd4-2", "gyrostat"] {
        let r = records_by_tag(&recs, "lax", tag);
        pass &= r.pass && r.tolerance == 1e-7 && r.samples_accepted >= 50;
        detail.push_str(&format!("{tag} {:.2e} ", r.max_residual));
    }
    gate(2, "Lax-pair residuals <= 1e-7 at 50 samples", pass, detail);
}

#[test]
fn criterion_03_theorem1() {
    let cfg = RunConfig::default();
    assert_eq!(cfg.samples.theorem1, 100);
    let recs = suites::run_gauge_suite(&cfg).unwrap();
    let r = records_by_tag(&recs, "gauge", "theorem1");
    let inv = records_by_tag(&recs, "gauge", "gauge-invariance");
    let pass = r.pass
        && r.tolerance == 1e-10
        && r.samples_accepted >= 100
        && inv.pass
        && inv.tolerance == 1e-12;
    gate(
        3,
        "theorem-1 gauge residual <= 1e-10, tr/det invariance <= 1e-12",
        pass,
        format!("gauge {:.2e}, invariance {:.2e}", r.max_residual, inv.max_residual),
    );
}

#[test]
fn criterion_04_theorem2() {
    let cfg = RunConfig::default();
    let recs = suites::run_gauge_suite(&cfg).unwrap();
    let br = records_by_tag(&recs, "gauge", "theorem2-brackets");
    let ca = records_by_tag(&recs, "gauge", "theorem2-casimirs");
    let cv = records_by_tag(&recs, "gauge", "theorem2-convergence");
    let ratio = 8.0 / cv.max_residual;
    let pass = br.pass && br.tolerance == 1e-6 && ca.pass && ca.tolerance == 1e-9 && cv.pass;
    gate(
        4,
        "theorem-2 brackets <= 1e-6, Casimir values <= 1e-9, step-halving ratio >= 8",
        pass,
        format!(
            "brackets {:.2e}, casimirs {:.2e}, ratio {ratio:.1}",
            br.max_residual, ca.max_residual
        ),
    );
}

#[test]
fn criterion_05_theorem3() {
    let cfg = RunConfig::default();
    assert_eq!(cfg.samples.theorem3, 50);
    let recs = suites::run_gauge_suite(&cfg).unwrap();
    let l = records_by_tag(&recs, "gauge", "theorem3-l");
    let lb = records_by_tag(&recs, "gauge", "theorem3-lbar");
    let pass = l.pass
        && lb.pass
        && l.tolerance == 1e-10
        && lb.tolerance == 1e-10
        && l.samples_accepted >= 50
        && lb.samples_accepted >= 50;
    gate(
        5,
        "theorem-3 closed forms <= 1e-10 at 50 samples",
        pass,
        format!("unbarred {:.2e}, barred {:.2e}", l.max_residual, lb.max_residual),
    );
}

#[test]
fn criterion_06_reflection_equations() {
    let cfg = RunConfig::default();
    let gy = suites::run_gyrostat_suite(&cfg).unwrap();
    let xy = suites::run_xyz_suite(&cfg).unwrap();
    let lin = records_by_tag(&gy, "gyrostat", "reflection-linear");
    let quad = records_by_tag(&gy, "gyrostat", "reflection-quadratic");
    let kmat = records_by_tag(&xy, "xyz", "k-matrix-reflection");
    let pass = lin.pass
        && quad.pass
        && kmat.pass
        && [lin, quad, kmat].iter().all(|r| r.tolerance == 1e-10);
    gate(
        6,
        "reflection equations (linear, quadratic, K-matrix) <= 1e-10",
        pass,
        format!(
            "linear {:.2e}, quadratic {:.2e}, K {:.2e}",
            lin.max_residual, quad.max_residual, kmat.max_residual
        ),
    );
}

#[test]
fn criterion_07_xyz_chain() {
    let cfg = RunConfig::default();
    assert!(cfg.samples.match_states >= 10);
    let recs = suites::run_xyz_suite(&cfg).unwrap();
    let tr = records_by_tag(&recs, "xyz", "transfer-closed-form");
    let vm = records_by_tag(&recs, "xyz", "vd-match");
    let hc = records_by_tag(&recs, "xyz", "h1h1bar-h8-constancy");
    let pass = tr.pass
        && tr.tolerance == 1e-9
        && vm.pass
        && vm.tolerance == 1e-9
        && hc.pass
        && hc.tolerance == 1e-9
        && hc.samples_accepted >= 10;
    gate(
        7,
        "transfer closed form, van Diejen match, product-Hamiltonian constancy <= 1e-9",
        pass,
        format!(
            "transfer {:.2e}, match {:.2e}, constancy {:.2e}",
            tr.max_residual, vm.max_residual, hc.max_residual
        ),
    );
}

#[test]
fn criterion_08_conservation() {
    let cfg = RunConfig::default();
    assert_eq!(cfg.dt, 1e-3);
    assert_eq!(cfg.steps, 1000);
    let t0 = Instant::now();
    let recs = suites::run_conservation_suite(&cfg).unwrap();
    let elapsed = t0.elapsed().as_secs_f64();
    let worst = recs.iter().map(|r| r.max_residual).fold(0.0, f64::max);
    let pass = recs.iter().all(|r| r.pass && r.tolerance == 1e-8) && elapsed < 10.0;
    gate(
        8,
        "RK4 drift of H, det, C1, C2 <= 1e-8 (dt = 1e-3, 1000 steps)",
        pass,
        format!("worst drift {worst:.2e}, {elapsed:.2}s (< 10s)"),
    );
}

#[test]
fn criterion_09_nonrelativistic_limit() {
    let cfg = RunConfig::default();
    let lim = suites::run_limits_suite(&cfg).unwrap();
    let ga = suites::run_gauge_suite(&cfg).unwrap();
    let halving = records_by_tag(&lim, "limits", "inozemtsev-remainder-halving");
    let gauge = records_by_tag(&ga, "gauge", "inozemtsev-gauge");
    // halving residual is |ratio - 1/2|; the window [0.4, 0.6] means <= 0.1
    let pass = halving.pass && halving.tolerance == 0.1 && gauge.pass && gauge.tolerance == 1e-10;
    gate(
        9,
        "remainder halving in [0.4, 0.6] for c in {1e2, 1e3}; gauge residual <= 1e-10",
        pass,
        format!(
            "|ratio - 0.5| = {:.3}, gauge {:.2e}",
            halving.max_residual, gauge.max_residual
        ),
    );
}

#[test]
fn criterion_10_determinism() {
    let cfg = RunConfig::default();
    let mut first = suites::run_all(&cfg).unwrap();
    let mut second = suites::run_all(&cfg).unwrap();
    clear_timings(&mut first);
    clear_timings(&mut second);
    let a = serde_json::to_string_pretty(&first).unwrap();
    let b = serde_json::to_string_pretty(&second).unwrap();
    gate(
        10,
        "identical seeds produce byte-identical reports modulo timing",
        a == b,
        format!("{} bytes compared", a.len()),
    );
}
