//! Acceptance criteria. Prints one line per criterion and exits non-zero if
//! any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qotto_core::engine::otto_limit;
use qotto_core::model::LZModel;
use qotto_core::propagator::DEFAULT_STEPS;
use qotto_core::sweep::{argmax_tau, SweepRow};
use qotto_core::validate::{run_validation, tracking_fidelity};
use qotto_core::{run_cycle, run_sweep, EngineConfig, Mode, SweepSpec};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn criterion(n: u32, title: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    if elapsed > budget {
        o.passed = false;
        o.detail
            .push_str(&format!("; over time budget of {budget:?}"));
    }
    println!(
        "[{}] criterion {n} {title}: {} ({:.3} s)",
        if o.passed { "PASS" } else { "FAIL" },
        o.detail,
        elapsed.as_secs_f64()
    );
    o.passed
}

fn us(tau: f64) -> f64 {
    (tau * 1e6).round()
}

fn rows_for(rows: &[SweepRow], mode: Mode, kt_hot: f64) -> Vec<&SweepRow> {
    rows.iter()
        .filter(|r| r.mode == mode && r.kt_hot == kt_hot)
        .collect()
}

/// Last grid interval over which the extracted work `-(W2 + W4)` goes from
/// non-positive to positive.
fn work_sign_change(rows: &[&SweepRow]) -> Option<(f64, f64)> {
    let out = |r: &SweepRow| -(r.metrics.w2 + r.metrics.w4);
    rows.windows(2)
        .filter(|w| out(w[0]) <= 0.0 && out(w[1]) > 0.0)
        .map(|w| (us(w[0].tau_s), us(w[1].tau_s)))
        .next_back()
}

fn main() -> ExitCode {
    let base = EngineConfig::default();
    let mut results = Vec::new();

    results.push(criterion(1, "Otto limit", Duration::from_secs(1), || {
        let m = run_cycle(&base.with_mode(Mode::IdealAdiabatic)).expect("ideal cycle");
        let eta = m.eta_a.unwrap_or(f64::NAN);
        let closed = otto_limit(base.nu_i(), base.nu_f());
        outcome(
            (eta - 0.629).abs() <= 1e-3 && (eta - closed).abs() <= 1e-12,
            format!("eta_ideal = {eta:.6}, 1 - nu_i/nu_f = {closed:.6}, target 0.629 ± 1e-3"),
        )
    }));

    results.push(criterion(
        2,
        "gap endpoints",
        Duration::from_secs(1),
        || {
            let model = base.expansion_model().expect("model");
            let (g0, g1) = (model.gap(0.0).unwrap(), model.gap(base.tau).unwrap());
            outcome(
                g0 == 1000.0 && (g1 - 2692.6).abs() <= 0.05,
                format!("gap(0) = {g0} Hz, gap(tau) = {g1:.4} Hz"),
            )
        },
    ));

    results.push(criterion(3, "CD tracking", Duration::from_secs(5), || {
        let mut worst: f64 = 1.0;
        for tau_us in [200.0, 500.0, 1000.0, 2250.0] {
            let model = LZModel::expansion(base.bx, base.nu_z_max, tau_us * 1e-6).unwrap();
            worst = worst.min(tracking_fidelity(&model, DEFAULT_STEPS, 1.0).unwrap());
        }
        outcome(
            worst >= 1.0 - 1e-6,
            format!(
                "min fidelity over 200/500/1000/2250 us = 1 - {:.3e}",
                1.0 - worst
            ),
        )
    }));

    let sweep_start = Instant::now();
    let spec = SweepSpec::default();
    let rows = run_sweep(&spec, None).expect("default sweep");
    let sweep_time = sweep_start.elapsed();
    let [cool, hot] = [spec.hot_temperatures[0], spec.hot_temperatures[1]];

    results.push(criterion(4, "NA zero-efficiency crossings", Duration::from_secs(10), || {
        let a = work_sign_change(&rows_for(&rows, Mode::NonAdiabatic, cool));
        let b = work_sign_change(&rows_for(&rows, Mode::NonAdiabatic, hot));
        let inside = |c: Option<(f64, f64)>, lo, hi| c.is_some_and(|(x, y)| x >= lo && y <= hi);
        outcome(
            inside(a, 1100.0, 1500.0) && inside(b, 750.0, 1050.0) && sweep_time < Duration::from_secs(10),
            format!(
                "kT_hot={cool}: {a:?} us (want within [1100, 1500]); kT_hot={hot}: {b:?} us (want within [750, 1050]); sweep {:.2} s",
                sweep_time.as_secs_f64()
            ),
        )
    }));

    let na_argmax = |kt: f64| {
        argmax_tau(
            &rows,
            |r| r.mode == Mode::NonAdiabatic && r.kt_hot == kt,
            |r| r.metrics.p_a,
        )
        .map(us)
    };
    results.push(criterion(5, "NA power maxima", Duration::from_secs(10), || {
        let (a, b) = (na_argmax(cool), na_argmax(hot));
        let near = |x: Option<f64>, c: f64| x.is_some_and(|x| (x - c).abs() <= 150.0);
        outcome(
            near(a, 2000.0) && near(b, 1500.0),
            format!("argmax P_A: {a:?} us at kT_hot={cool} (want 2000 ± 150), {b:?} us at kT_hot={hot} (want 1500 ± 150)"),
        )
    }));

    results.push(criterion(6, "STA power maxima", Duration::from_secs(10), || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (kt, reference) in [(cool, 1550.0), (hot, 1210.0)] {
            let positive = |r: &SweepRow| r.mode == Mode::Shortcut && r.kt_hot == kt && r.metrics.p_sta > 0.0;
            let sta = argmax_tau(&rows, positive, |r| r.metrics.p_sta).map(us);
            let na = na_argmax(kt);
            ok &= matches!((sta, na), (Some(s), Some(n)) if s < n);
            parts.push(match sta {
                Some(s) => format!("kT_hot={kt}: STA argmax {s} us vs NA {na:?} us (reference {reference} us)"),
                None => format!("kT_hot={kt}: P_STA = 0 on the whole grid, no argmax (reference {reference} us)"),
            });
        }
        outcome(ok, parts.join("; "))
    }));

    results.push(criterion(
        7,
        "efficiency-definition discrimination",
        Duration::from_secs(1),
        || {
            let m = run_cycle(&base.with_mode(Mode::Shortcut).with_tau(200e-6)).expect("cycle");
            let eta1 = m.eta1_sta.unwrap_or(f64::NAN);
            outcome(
                eta1 > 0.0 && m.p_sta == 0.0,
                format!(
                    "tau=200 us: eta1_STA = {eta1:.4}, P_STA = {} (raw {:.2})",
                    m.p_sta, m.p_sta_raw
                ),
            )
        },
    ));

    results.push(criterion(
        8,
        "property suite",
        Duration::from_secs(60),
        || {
            let report = run_validation(None).expect("validation");
            let wanted = [
                "expm_unitarity",
                "total_unitary_unitarity",
                "first_law_residual",
                "swap_matches_gibbs_reset",
                "carnot_excess",
                "sta_work_equals_ideal",
                "eta2_sta_minus_eta_na",
                "runtime_s",
            ];
            let mut ok = report.all_passed();
            let mut failed = Vec::new();
            for name in wanted {
                match report.checks.iter().find(|c| c.name == name) {
                    Some(c) => {
                        println!("    {c}");
                        if !c.passed {
                            failed.push(name);
                        }
                    }
                    None => {
                        ok = false;
                        failed.push(name);
                    }
                }
            }
            let others: Vec<_> = report
                .failures()
                .filter(|c| !wanted.contains(&c.name))
                .collect();
            for c in &others {
                println!("    {c}");
            }
            outcome(
                ok,
                format!(
                    "{} checks, failing: {:?}",
                    report.checks.len(),
                    failed
                        .iter()
                        .chain(others.iter().map(|c| &c.name))
                        .collect::<Vec<_>>()
                ),
            )
        },
    ));

    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
