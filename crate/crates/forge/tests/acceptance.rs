//! Acceptance criteria 1-9. Prints one line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use povm_forge::parallel;
use povm_forge_core::bounds::{
    certificate_quadratic, certificate_quadratic_linear, certificate_quartic_linear, n_min,
};
use povm_forge_core::povm::{catalog_get, equivalent_up_to_rotation, CATALOG_COPIES};
use povm_forge_core::simulate::SimulationConfig;
use povm_forge_core::solver::{feasibility_scan, solve, SolverConfig, SolverStatus};
use povm_forge_core::verification::{
    mean_fidelity, shannon_gain, verify, FidelityMethod, Formulation,
};
use povm_forge_core::{Direction, Povm};

struct Check {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Check {
    Check {
        pass,
        detail: detail.into(),
    }
}

fn catalog_verification() -> Check {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in CATALOG_COPIES {
        let report = verify(&catalog_get(n).unwrap().povm, 1e-10);
        let all = Formulation::ALL.iter().all(|f| report.report(*f).is_some_and(|r| r.pass));
        if !(report.pass && all) {
            failures.push(n);
        }
    }
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && elapsed < Duration::from_secs(5),
        format!("failing N: {failures:?}, {elapsed:.2?}"),
    )
}

fn fidelity_reproduction() -> Check {
    let mut worst: f64 = 0.0;
    for n in CATALOG_COPIES {
        let f = mean_fidelity(&catalog_get(n).unwrap().povm, FidelityMethod::Quadrature).unwrap();
        worst = worst.max((f - (n + 1) as f64 / (n + 2) as f64).abs());
    }
    check(worst < 1e-12, format!("max deviation {worst:.1e}"))
}

fn n_min_formula() -> Check {
    let got: Vec<usize> = (2..=7).map(|n| n_min(n).n_min).collect();
    check(got == [4, 6, 10, 12, 18, 22], format!("{got:?}"))
}

fn certificate_saturation() -> Check {
    let cases = [
        (2, certificate_quadratic(&catalog_get(2).unwrap().povm), 0.75),
        (3, certificate_quadratic_linear(&catalog_get(3).unwrap().povm), 2.0 / 3.0),
        (5, certificate_quartic_linear(&catalog_get(5).unwrap().povm), 0.5),
    ];
    let mut ok = true;
    let mut slack: f64 = 0.0;
    for (n, cert, cap) in cases {
        let Ok(cert) = cert else {
            return check(false, format!("N={n}: precondition failed"));
        };
        slack = slack.max(cert.max_abs_slack());
        ok &= cert.max_abs_slack() < 1e-10 && cert.weight_cap == cap;
        ok &= cert.per_outcome.iter().all(|o| (o.weight - cap).abs() < 1e-15);
    }
    check(ok, format!("max |S_i| {slack:.1e}"))
}

fn solver_recovery() -> Check {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for (copies, outcomes) in [(2, 4), (3, 6), (4, 10), (5, 12)] {
        let config = SolverConfig {
            seed: 2024,
            restarts: 64,
            ..SolverConfig::new(copies, outcomes)
        };
        let r = solve(&config).unwrap();
        let mut good = r.status == SolverStatus::Converged
            && r.final_residual < 1e-10
            && verify(&r.povm, 1e-10).pass;
        if copies <= 3 {
            good &= equivalent_up_to_rotation(&r.povm, &catalog_get(copies).unwrap().povm, 1e-6).equivalent;
        }
        ok &= good;
        notes.push(format!("({copies},{outcomes}) {:.1e}", r.final_residual));
    }
    let elapsed = start.elapsed();
    check(ok && elapsed < Duration::from_secs(120), format!("{}, {elapsed:.2?}", notes.join(" ")))
}

fn infeasibility_evidence() -> Check {
    let mut ok = true;
    let mut notes = Vec::new();
    for (copies, outcomes) in [(2, 3), (3, 5)] {
        let template = SolverConfig {
            seed: 7,
            restarts: 256,
            ..SolverConfig::new(copies, outcomes)
        };
        let row = &feasibility_scan(copies, outcomes, outcomes, &template).unwrap()[0];
        ok &= row.status == SolverStatus::ResidualFloor && row.best_residual > 1e-3;
        notes.push(format!("({copies},{outcomes}) floor {:.3}", row.best_residual));
    }
    check(ok, notes.join(" "))
}

fn monte_carlo() -> Check {
    let start = Instant::now();
    let config = SimulationConfig {
        povm: catalog_get(2).unwrap().povm,
        trials: 1_000_000,
        seed: 20_240_601,
    };
    let r = parallel::simulate(&config, parallel::thread_count()).unwrap();
    let elapsed = start.elapsed();
    let err = (r.mean - 0.75).abs();
    check(
        err < 5.0 * r.standard_error && err < 0.002 && elapsed < Duration::from_secs(10),
        format!("mean {:.5} se {:.1e}, {elapsed:.2?}", r.mean, r.standard_error),
    )
}

fn perturb(povm: &Povm, rng: &mut ChaCha8Rng) -> Povm {
    let mut p = povm.clone();
    let i = rng.random_range(0..p.len());
    let magnitude = 10f64.powf(rng.random_range(-4.0..-1.0));
    let o = &mut p.outcomes[i];
    if rng.random_bool(0.5) {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        o.weight = (o.weight * (1.0 + sign * magnitude)).min(1.0);
        if o.weight == povm.outcomes[i].weight {
            o.weight *= 1.0 - magnitude;
        }
    } else {
        // move along a random tangent direction
        let n = o.direction.cartesian;
        let r = Direction::random(rng).cartesian;
        let t = [
            n[1] * r[2] - n[2] * r[1],
            n[2] * r[0] - n[0] * r[2],
            n[0] * r[1] - n[1] * r[0],
        ];
        let len = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
        let (s, c) = magnitude.sin_cos();
        let v = [0, 1, 2].map(|k| c * n[k] + s * t[k] / len);
        o.direction = Direction::from_vector(v).unwrap();
    }
    p
}

fn formulation_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut false_splits = 0;
    for n in CATALOG_COPIES {
        let r = verify(&catalog_get(n).unwrap().povm, 1e-10);
        false_splits += r.reports.iter().filter(|x| !x.pass).count();
    }
    let mut missed = 0;
    for _ in 0..100 {
        let n = CATALOG_COPIES[rng.random_range(0..CATALOG_COPIES.len())];
        let p = perturb(&catalog_get(n).unwrap().povm, &mut rng);
        let r = verify(&p, 1e-10);
        missed += r.reports.iter().filter(|x| x.pass).count();
    }
    check(
        false_splits == 0 && missed == 0,
        format!("unperturbed failures {false_splits}, perturbed passes {missed}"),
    )
}

/// 50-digit evaluations of `(ln(N+1) − N/(N+1))/ln 2`, rounded to `f64`.
const SHANNON_REFERENCE: [f64; 20] = [
    0.278_652_479_555_518_3,
    0.623_165_806_795_180_6,
    0.917_978_719_333_277_4,
    1.167_772_062_176_191_6,
    1.382_716_633_313_686_7,
    1.570_759_172_724_207,
    1.737_641_839_222_157,
    1.887_529_409_541_011_6,
    2.023_502_558_087_295,
    2.147_890_672_374_603_2,
    2.262_492_046_572_939_7,
    2.368_721_218_858_972,
    2.467_709_526_946_424,
    2.560_375_224_112_153,
    2.647_473_399_166_597,
    2.729_632_214_531_315,
    2.807_379_685_047_180_3,
    2.881_163_790_496_146_5,
    2.951_367_806_042_847,
    3.018_322_145_741_652_3,
];

fn shannon() -> Check {
    let worst = SHANNON_REFERENCE
        .iter()
        .enumerate()
        .map(|(i, want)| (shannon_gain(i + 1) - want).abs())
        .fold(0.0, f64::max);
    let monotone = (1..20).all(|n| shannon_gain(n + 1) > shannon_gain(n));
    check(worst < 1e-12 && monotone, format!("max deviation {worst:.1e}, monotone {monotone}"))
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 9] = [
        ("catalog verification", catalog_verification),
        ("fidelity reproduction", fidelity_reproduction),
        ("n_min formula", n_min_formula),
        ("certificate saturation", certificate_saturation),
        ("solver recovery", solver_recovery),
        ("infeasibility evidence", infeasibility_evidence),
        ("Monte Carlo fidelity", monte_carlo),
        ("formulation equivalence", formulation_equivalence),
        ("Shannon gain", shannon),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let c = run();
        let verdict = if c.pass { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} {name} ({})", i + 1, c.detail);
        failed += usize::from(!c.pass);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
