//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any
//! criterion fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use qstate_core::oracles::{
    check_basis_independence, check_psp_vs_ptrace, check_succession_vs_coincidence,
    distinguishability_report, rs_collapse_deviation, CheckConfig,
};
use qstate_core::random::{haar_state, random_mixed, random_projector};
use qstate_core::{
    run_mach_zehnder, run_one_slit, Complex64, Device, HilbertStructure, MachZehnderModel,
    OneSlitModel, StateRef, StateVector, SubsystemEvent,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const QSTATE: &str = env!("CARGO_BIN_EXE_qstate");

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn qstate(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(QSTATE)
        .args(args)
        .env_remove("QSTATE_TOLERANCE")
        .output()
        .expect("qstate runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn machine_value(stdout: &[u8], key: &str) -> Option<f64> {
    let text = String::from_utf8_lossy(stdout);
    text.lines()
        .find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
        .and_then(|v| v.parse().ok())
}

/// Worst relative-state vs collapse deviation over `trials` states of one kind.
fn kernel_max(trials: u64, mixed: bool) -> f64 {
    let pool = [
        vec![2, 2],
        vec![2, 3],
        vec![3, 3],
        vec![2, 2, 2],
        vec![2, 3, 2],
    ];
    let mut worst: f64 = 0.0;
    for seed in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
        let structure = HilbertStructure::new(pool[rng.random_range(0..pool.len())].clone())
            .expect("valid dims");
        let n = structure.len();
        let subject = rng.random_range(0..n);
        let object = (subject + rng.random_range(1..n)) % n;
        let event =
            SubsystemEvent::new(subject, random_projector(structure.dim(subject), &mut rng))
                .expect("square projector");
        let deviation = if mixed {
            let rho = random_mixed(&structure, &mut rng);
            rs_collapse_deviation(StateRef::Mixed(&rho), &event, object)
        } else {
            let psi = haar_state(&structure, &mut rng);
            rs_collapse_deviation(StateRef::Pure(&psi), &event, object)
        };
        // random projectors of positive rank hit zero probability only by accident
        worst = worst.max(deviation.unwrap_or(f64::INFINITY));
    }
    worst
}

fn central_equivalence() -> Outcome {
    let start = Instant::now();
    let (code, stdout) = qstate(&[
        "--format", "machine", "check", "--trials", "1000", "--seed", "42",
    ]);
    let elapsed = start.elapsed();
    let cli = machine_value(&stdout, "rs_equals_collapse.max_deviation").unwrap_or(f64::INFINITY);
    let pure = kernel_max(1000, false);
    let mixed = kernel_max(1000, true);
    let pass =
        code == 0 && cli < 1e-9 && pure < 1e-9 && mixed < 1e-9 && elapsed < Duration::from_secs(10);
    outcome(
        pass,
        format!(
            "exit={code} cli={cli:.3e} pure={pure:.3e} mixed={mixed:.3e} time={:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn oracle(name: &str, report: qstate_core::Result<qstate_core::CheckReport>) -> Outcome {
    match report {
        Ok(r) => outcome(
            r.pass && r.max_deviation < 1e-9,
            format!("{name} trials={} max={:.3e}", r.trials, r.max_deviation),
        ),
        Err(e) => outcome(false, format!("{name}: {e}")),
    }
}

fn mz_distribution(theta: f64, device: Device, late: Option<Device>) -> (f64, f64) {
    let mut model = MachZehnderModel::new(theta, device).expect("angle in range");
    if let Some(late) = late {
        model = model.with_delayed_choice(late);
    }
    let report = run_mach_zehnder(&model).expect("scenario runs");
    (
        report.probability_of("D_H").expect("D_H"),
        report.probability_of("D_V").expect("D_V"),
    )
}

fn expected_mz(theta: f64, device: Device) -> (f64, f64) {
    let t = theta.to_radians();
    match device {
        Device::WhichWay => (t.cos().powi(2), t.sin().powi(2)),
        Device::Interference => ((1.0 + (2.0 * t).sin()) / 2.0, (1.0 - (2.0 * t).sin()) / 2.0),
    }
}

fn dist_error(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

fn mach_zehnder_numbers() -> Outcome {
    let mut worst: f64 = 0.0;
    worst = worst.max(dist_error(
        mz_distribution(45.0, Device::Interference, None),
        (1.0, 0.0),
    ));
    worst = worst.max(dist_error(
        mz_distribution(45.0, Device::WhichWay, None),
        (0.5, 0.5),
    ));
    for step in 0..=12 {
        let theta = 15.0 * step as f64;
        for device in [Device::WhichWay, Device::Interference] {
            worst = worst.max(dist_error(
                mz_distribution(theta, device, None),
                expected_mz(theta, device),
            ));
        }
    }
    let (code, stdout) = qstate(&["mach-zehnder", "--theta", "45", "--mode", "interference"]);
    let printed = String::from_utf8_lossy(&stdout)
        .lines()
        .any(|l| l.trim() == "P(D_H) = 1.000000000");
    outcome(
        worst < 1e-9 && code == 0 && printed,
        format!("max={worst:.3e} cli_exit={code} cli_line={printed}"),
    )
}

fn delayed_choice() -> Outcome {
    let mut worst: f64 = 0.0;
    for step in 0..=12 {
        let theta = 15.0 * step as f64;
        for (early, late) in [
            (Device::WhichWay, Device::Interference),
            (Device::Interference, Device::WhichWay),
        ] {
            worst = worst.max(dist_error(
                mz_distribution(theta, early, Some(late)),
                mz_distribution(theta, late, None),
            ));
        }
    }
    outcome(worst < 1e-9, format!("max={worst:.3e}"))
}

fn one_slit_reconstruction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=6);
        let amplitudes = haar_state(&HilbertStructure::new(vec![n]).expect("n >= 2"), &mut rng)
            .amplitudes()
            .iter()
            .copied()
            .collect::<Vec<_>>();
        let slit: Vec<usize> = loop {
            let cells: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
            if !cells.is_empty() && cells.len() < n {
                break cells;
            }
        };
        let report = OneSlitModel::new(amplitudes, slit).and_then(|m| run_one_slit(&m));
        worst = worst.max(match report {
            Ok(r) => r.reconstruction_deviation.max(r.max_deviation),
            Err(_) => f64::INFINITY,
        });
    }
    let uniform = OneSlitModel::uniform(4, [0, 1])
        .and_then(|m| run_one_slit(&m))
        .map(|r| r.branch_weights[0])
        .unwrap_or(f64::NAN);
    outcome(
        worst < 1e-9 && (uniform - 0.5).abs() <= 1e-12,
        format!("max={worst:.3e} uniform_weight={uniform:.15}"),
    )
}

fn bell_distinguishability() -> Outcome {
    let structure = HilbertStructure::new(vec![2, 2]).expect("valid dims");
    let mut amps = qstate_core::CVector::zeros(4);
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[3] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let bell = StateVector::new(structure, amps).expect("normalized");
    let phi = StateVector::basis(HilbertStructure::new(vec![2]).expect("valid"), &[0])
        .expect("basis state");
    match distinguishability_report(&bell, &phi) {
        Ok(r) => outcome(
            (r.rsqm_purity - 0.5).abs() <= 1e-9
                && (r.cqm_purity - 1.0).abs() <= 1e-12
                && r.correlation_norm_cqm < 1e-12,
            format!(
                "rsqm_purity={:.12} cqm_purity={:.12} correlation_cqm={:.3e}",
                r.rsqm_purity, r.cqm_purity, r.correlation_norm_cqm
            ),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let bell = dir.path().join("bell.txt");
    let projector = dir.path().join("p0.txt");
    fs::write(
        &bell,
        "dims 2 2\namp 0 0.70710678118654752 0\namp 3 0.70710678118654752 0\n",
    )
    .expect("write state");
    fs::write(&projector, "dims 2\nrho 0 0 1 0\n").expect("write projector");
    let subject = format!("2:{}", projector.display());
    let commands: Vec<Vec<&str>> = vec![
        vec!["check", "--trials", "200", "--seed", "9"],
        vec!["one-slit", "--cells", "5", "--slit", "1,3"],
        vec![
            "mach-zehnder",
            "--theta",
            "30",
            "--mode",
            "which-way",
            "--delayed-to",
            "interference",
        ],
        vec![
            "relative-state",
            "--input",
            bell.to_str().expect("utf-8 path"),
            "--subject",
            &subject,
            "--object",
            "1",
        ],
    ];
    let mut differing = Vec::new();
    for args in &commands {
        let mut full = vec!["--format", "machine"];
        full.extend(args);
        let (code_a, a) = qstate(&full);
        let (code_b, b) = qstate(&full);
        if code_a != 0 || code_a != code_b || a != b || a.is_empty() {
            differing.push(args[0]);
        }
    }
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} commands byte-identical", commands.len())
        } else {
            format!("differing: {}", differing.join(", "))
        },
    )
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("central equivalence", central_equivalence),
        ("scalar product vs partial trace", || {
            oracle(
                "psp_vs_ptrace",
                check_psp_vs_ptrace(&CheckConfig::new(500, 2024)),
            )
        }),
        ("basis independence", || {
            oracle(
                "basis_independence",
                check_basis_independence(&CheckConfig::new(500, 2024)),
            )
        }),
        ("succession vs coincidence", || {
            oracle(
                "succession_vs_coincidence",
                check_succession_vs_coincidence(&CheckConfig::new(500, 2024)),
            )
        }),
        ("mach-zehnder numbers", mach_zehnder_numbers),
        ("delayed-choice invariance", delayed_choice),
        ("one-slit reconstruction", one_slit_reconstruction),
        ("bell distinguishability", bell_distinguishability),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {}",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            result.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
