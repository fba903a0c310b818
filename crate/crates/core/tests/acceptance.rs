//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are printed on
//! every `cargo test`, not only on failure.

use std::process::Command;
use std::time::{Duration, Instant};

use orbitkit::invariants::{example_pair_generator, norm_chain, projective_distances};
use orbitkit::linalg::{rank_one, C64};
use orbitkit::suite::{run_named, CheckSummary};
use orbitkit::Tolerances;

const SEED: u64 = 20_240_601;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    ok: bool,
    detail: String,
}

fn counts(c: &CheckSummary) -> String {
    format!(
        "{}: {} instances, {} passed, {} rejected, {} skipped, {} failed, worst {:.3e}{}",
        c.name,
        c.instances,
        c.passed,
        c.rejected,
        c.skipped,
        c.failed,
        c.worst,
        c.first_failure.as_deref().map(|m| format!(" [{m}]")).unwrap_or_default()
    )
}

fn check(name: &str, count: usize) -> CheckSummary {
    run_named(name, SEED, count, &Tolerances::default()).expect("known check")
}

fn orbit_bound() -> Verdict {
    let start = Instant::now();
    let c = check("orbit_bound_chain", 600);
    let elapsed = start.elapsed();
    let ok = c.ok() && c.passed >= 500 && elapsed <= Duration::from_secs(60);
    Verdict {
        ok,
        detail: format!("{}; {} certificates in {:.1} s", counts(&c), c.passed, elapsed.as_secs_f64()),
    }
}

fn projection_pairs() -> Verdict {
    let c = check("projection_pair_unitary", 600);
    let d = check("dual_route", 200);
    Verdict {
        ok: c.ok() && c.passed > 0 && c.rejected > 0 && d.ok(),
        detail: format!("{}; {}", counts(&c), counts(&d)),
    }
}

fn lagrange() -> Verdict {
    let c = check("lagrange_projector", 200);
    Verdict {
        ok: c.ok() && c.passed == 200,
        detail: counts(&c),
    }
}

fn affiliation() -> Verdict {
    let c = check("affiliation", 400);
    Verdict {
        ok: c.ok() && c.passed >= 380,
        detail: counts(&c),
    }
}

fn closed_forms() -> Verdict {
    let tol = Tolerances::default();
    let c = check("example_closed_forms", 200);
    let mut ok = c.ok() && c.passed == 200;
    // All α equal, so the EFE spectrum is degenerate.
    let pair = example_pair_generator(8, &[C64::new(0.9, 0.0); 3], None).unwrap();
    let m = pair.measured(&tol).unwrap();
    ok &= m.efe_spectrum.iter().all(|l| (l - 0.81).abs() <= 1e-9);
    ok &= (m.hs_sq - 2.0 * (3.0 - 3.0 * 0.81)).abs() <= 1e-9;
    ok &= (m.op_norm - 0.19f64.sqrt()).abs() <= 1e-9;
    Verdict {
        ok,
        detail: format!("{}; degenerate α = 0.9 × 3: ‖E−F‖ = {:.12}", counts(&c), m.op_norm),
    }
}

fn norms_and_distances() -> Verdict {
    let tol = Tolerances::default();
    let a = check("norm_chain", 300);
    let b = check("projective_distances", 300);
    let s = 0.5f64.sqrt();
    let x = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let y = [C64::new(s, 0.0), C64::new(0.0, s)];
    let d = projective_distances(&rank_one(&x).unwrap(), &rank_one(&y).unwrap(), &tol).unwrap();
    let hand = (d.geodesic - 2f64.sqrt() * std::f64::consts::FRAC_PI_4).abs() <= 1e-12
        && (d.trace_dist - 2f64.sqrt()).abs() <= 1e-12;
    let px = orbitkit::invariants::rank_one_operator(&x).unwrap();
    let py = orbitkit::invariants::rank_one_operator(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap();
    let orth = norm_chain(&px, &py, 1, &tol).unwrap();
    Verdict {
        ok: a.ok() && b.ok() && hand && orth.chain_ok,
        detail: format!(
            "{}; {}; hand values geodesic {:.15}, trace_dist {:.15}",
            counts(&a),
            counts(&b),
            d.geodesic,
            d.trace_dist
        ),
    }
}

fn moments() -> Verdict {
    let c = check("moment_invariance", 100);
    Verdict {
        ok: c.ok() && c.passed == 100,
        detail: counts(&c),
    }
}

fn cli_suite() -> Verdict {
    let bin = env!("CARGO_BIN_EXE_orbitkit");
    let run = |timing: bool| {
        let mut cmd = Command::new(bin);
        if !timing {
            cmd.arg("--no-timing");
        }
        cmd.args(["verify", "suite", "--seed", "1", "--count", "200"])
            .env_remove("ORBITKIT_TOL_FILE")
            .output()
            .expect("binary runs")
    };
    let first = run(false);
    let second = run(false);
    let timed = run(true);
    let strip = |bytes: &[u8]| {
        let mut v: serde_json::Value = serde_json::from_slice(bytes).expect("report is JSON");
        v["elapsed_ms"] = serde_json::Value::from(0);
        v
    };
    let ok = first.status.code() == Some(0)
        && second.status.code() == Some(0)
        && first.stdout == second.stdout
        && strip(&timed.stdout) == strip(&first.stdout);
    Verdict {
        ok,
        detail: format!(
            "exit codes {:?}/{:?}, {} report bytes, byte-identical: {}",
            first.status.code(),
            second.status.code(),
            first.stdout.len(),
            first.stdout == second.stdout
        ),
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("orbit intertwiner bound chain", orbit_bound),
        ("projection-pair unitary", projection_pairs),
        ("interpolation projectors", lagrange),
        ("affiliated bases", affiliation),
        ("known-answer pair closed forms", closed_forms),
        ("norm chain and projective distances", norms_and_distances),
        ("moment invariants", moments),
        ("verify suite determinism", cli_suite),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        let tag = if v.ok { "PASS" } else { "FAIL" };
        if !v.ok {
            failed += 1;
        }
        println!("{tag} criterion {} ({name}): {}", i + 1, v.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
