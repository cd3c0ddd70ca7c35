//! End-to-end acceptance gate: one pass/fail line per criterion, with
//! pinned tolerances and runtime budgets.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use l2ext::bergman::{
    dual_profile, gram_diagonal, kernel_profile, t_grid, Basis, Functional, ProfileMode,
    ProfileOpts,
};
use l2ext::cli::spec::{load_problem, run_problem};
use l2ext::cli::suite::{run_suite, write_bundle};
use l2ext::extension::domain_gram;
use l2ext::extension::WeightSpec;
use l2ext::geometry::{build_domain, Domain, DomainSpec, Point, SliceAmbient, VarietySpec};
use l2ext::potential::{robin_constant, solve_green, GreenKind, GreenMethod, GreenModel};
use l2ext::verify::{check_family_convergence, check_nu_lemma, check_suita, NuSample};
use l2ext::Complex64;

fn cases(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../cases")
        .join(rel)
}

fn disk() -> Domain {
    build_domain(&DomainSpec::Disk {
        center: [0.0, 0.0],
        radius: 1.0,
    })
    .unwrap()
}

fn annulus() -> Domain {
    build_domain(&DomainSpec::Annulus {
        r_inner: 0.2,
        r_outer: 1.0,
    })
    .unwrap()
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn check(&mut self, id: u32, label: &str, budget: Option<Duration>, f: impl FnOnce() -> Result<(), String>) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| match budget {
            Some(b) if elapsed > b => Err(format!(
                "runtime {:.1?} exceeds budget {:.1?}",
                elapsed, b
            )),
            _ => Ok(()),
        });
        match outcome {
            Ok(()) => println!("criterion {id:2}: pass  ({elapsed:.1?})  {label}"),
            Err(msg) => {
                println!("criterion {id:2}: FAIL  ({elapsed:.1?})  {label}: {msg}");
                self.failures.push(format!("{id}: {msg}"));
            }
        }
    }
}

fn ensure(cond: bool, msg: String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg)
    }
}

fn criterion_1() -> Result<(), String> {
    let rep = check_suita(&disk(), Complex64::new(0.0, 0.0), 128).map_err(|e| e.to_string())?;
    let ra = rep.get("ratio_analytic").unwrap();
    let rq = rep.get("ratio_quadrature").unwrap();
    ensure(
        (ra - 1.0).abs() <= 1e-6,
        format!("analytic ratio {ra} off equality by {:.2e}", (ra - 1.0).abs()),
    )?;
    ensure(
        (rq - 1.0).abs() <= 1e-3,
        format!("quadrature ratio {rq} off equality by {:.2e}", (rq - 1.0).abs()),
    )
}

fn criterion_2() -> Result<(), String> {
    let rep = check_suita(&annulus(), Complex64::new(0.5, 0.0), 128).map_err(|e| e.to_string())?;
    // Convergence rows: analytic basis 25/50, quadrature res 128/256 —
    // doubled series truncation and doubled quadrature.
    let margins: Vec<f64> = rep.convergence.iter().map(|r| r.value - 1.0).collect();
    ensure(margins.len() == 4, format!("expected 4 refinement rows, got {}", margins.len()))?;
    let base = margins[0];
    ensure(base > 0.0, format!("margin not positive: {base:.3e}"))?;
    for (row, m) in rep.convergence.iter().zip(&margins) {
        ensure(
            (m - base).abs() <= 0.1 * base,
            format!(
                "margin {m:.6e} at '{}' drifts more than 10% from {base:.6e}",
                row.level
            ),
        )?;
    }
    Ok(())
}

fn criterion_3() -> Result<(), String> {
    let grid = t_grid(-8.0, 0.25).map_err(|e| e.to_string())?;
    let tol = 1e-3;
    let mut worst: Vec<(String, f64, f64)> = Vec::new();

    let mut record = |label: &str, values: &[f64], shifted: &[f64]| {
        let d2 = values
            .windows(3)
            .map(|w| w[2] - 2.0 * w[1] + w[0])
            .fold(f64::INFINITY, f64::min);
        let d1 = shifted
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        worst.push((label.to_string(), d2, d1));
    };

    let d = disk();
    let gd = solve_green(&d, Complex64::new(0.0, 0.0)).map_err(|e| e.to_string())?;
    let origin = Point::one(Complex64::new(0.0, 0.0));
    for mode in [ProfileMode::Restricted, ProfileMode::Weighted { p: 128.0 }] {
        let p = kernel_profile(&d, &gd, &origin, &grid, mode, &ProfileOpts::default())
            .map_err(|e| e.to_string())?;
        record(&format!("disk {}", mode.label()), &p.values, &p.shifted(1));
    }

    let ann = annulus();
    let ga = solve_green(&ann, Complex64::new(0.5, 0.0)).map_err(|e| e.to_string())?;
    let opts = ProfileOpts {
        basis: Some(Basis::Laurent { jmax: 25 }),
        ..ProfileOpts::default()
    };
    let p = kernel_profile(
        &ann,
        &ga,
        &Point::one(Complex64::new(0.5, 0.0)),
        &grid,
        ProfileMode::Restricted,
        &opts,
    )
    .map_err(|e| e.to_string())?;
    record("annulus restricted", &p.values, &p.shifted(1));

    let bidisk = build_domain(&DomainSpec::Bidisk).unwrap();
    let gb = GreenModel {
        kind: GreenKind::ProductDisk {
            pole: Complex64::new(0.0, 0.0),
        },
        method: GreenMethod::AnalyticSeries,
        accuracy: 0.0,
    };
    let slice = VarietySpec::SliceZ1 {
        c: [0.0, 0.0],
        ambient: SliceAmbient::Bidisk,
    }
    .realize(&bidisk)
    .unwrap();
    let xi = Functional::flat_density(
        std::sync::Arc::new(|_: &Point| Complex64::new(1.0, 0.0)),
        slice,
        1,
        24,
    );
    let p = dual_profile(&bidisk, &gb, &xi, &grid, 128.0, 1, &ProfileOpts::default())
        .map_err(|e| e.to_string())?;
    record("bidisk-slice dual", &p.values, &p.shifted(1));

    for (label, d2, d1) in worst {
        ensure(
            d2 >= -tol && d1 >= -tol,
            format!("{label}: min second diff {d2:.2e}, min shifted first diff {d1:.2e}"),
        )?;
    }
    Ok(())
}

fn criterion_4() -> Result<(), String> {
    use l2ext::bergman::system_at;
    let t = -8.0;

    let d = disk();
    let gd = solve_green(&d, Complex64::new(0.0, 0.0)).map_err(|e| e.to_string())?;
    let sys = system_at(&d, &gd, t, ProfileMode::Restricted, &ProfileOpts::default())
        .map_err(|e| e.to_string())?;
    let k = sys.kernel_value(&Point::one(Complex64::new(0.0, 0.0)));
    let dev_disk = (PI * k * t.exp() - 1.0).abs();
    ensure(dev_disk <= 1e-10, format!("disk deviation {dev_disk:.3e}"))?;

    let ann = annulus();
    let ga = solve_green(&ann, Complex64::new(0.5, 0.0)).map_err(|e| e.to_string())?;
    let c = robin_constant(&ga, &ann).map_err(|e| e.to_string())?.c;
    let opts = ProfileOpts {
        basis: Some(Basis::Laurent { jmax: 25 }),
        ..ProfileOpts::default()
    };
    let sys = system_at(&ann, &ga, t, ProfileMode::Restricted, &opts).map_err(|e| e.to_string())?;
    let k = sys.kernel_value(&Point::one(Complex64::new(0.5, 0.0)));
    let dev_ann = (PI * k * (t + c).exp() - 1.0).abs();
    ensure(dev_ann <= 0.02, format!("annulus deviation {dev_ann:.3e}"))
}

fn solve_case(name: &str) -> Result<l2ext::extension::ExtensionResult, String> {
    let loaded = load_problem(&cases(name)).map_err(|e| e.to_string())?;
    run_problem(&loaded).map_err(|e| e.to_string())
}

fn criterion_5() -> Result<(), String> {
    let r = solve_case("problems/disk_point.json")?;
    ensure(
        (r.ratio - 1.0).abs() <= 1e-6,
        format!("disk/point ratio {} off 1", r.ratio),
    )?;
    let r = solve_case("problems/bidisk_slice.json")?;
    ensure(
        (r.ratio - 1.0).abs() <= 1e-6,
        format!("bidisk/slice ratio {} off 1", r.ratio),
    )?;
    let r = solve_case("problems/ball_slice.json")?;
    ensure(
        (r.ratio - 0.5).abs() <= 1e-3 && r.ratio <= 1.0,
        format!("ball2/slice ratio {} off 0.5", r.ratio),
    )
}

fn criterion_6() -> Result<(), String> {
    // Disk / point: the only restriction functionals are multiples of
    // evaluation; sup |xi(f)|^2 / ||xi||*^2 = 1/K(0) = primal norm^2.
    let primal = solve_case("problems/disk_point.json")?.norm_sq;
    let d = disk();
    let sys = domain_gram(&d, &WeightSpec::Zero, &Basis::default_for(&d), 0)
        .map_err(|e| e.to_string())?;
    let origin = Point::one(Complex64::new(0.0, 0.0));
    let w = Functional::point_mass(origin.clone())
        .pairing_vector(&sys.basis)
        .map_err(|e| e.to_string())?;
    let dual_sq = sys.dual_norm_sq(&w).map_err(|e| e.to_string())?;
    let dual_value = 1.0 / dual_sq; // |xi(f)|^2 = 1 at the point datum
    ensure(
        (dual_value - primal).abs() <= 1e-3 * primal,
        format!("disk/point primal {primal} vs dual {dual_value}"),
    )?;

    // Bidisk / slice: sampled densities g on V; the sup is attained at
    // g = 1 and no sample may exceed the primal value.
    let primal = solve_case("problems/bidisk_slice.json")?.norm_sq;
    let bidisk = build_domain(&DomainSpec::Bidisk).unwrap();
    let sys = domain_gram(&bidisk, &WeightSpec::Zero, &Basis::default_for(&bidisk), 0)
        .map_err(|e| e.to_string())?;
    let slice = VarietySpec::SliceZ1 {
        c: [0.0, 0.0],
        ambient: SliceAmbient::Bidisk,
    }
    .realize(&bidisk)
    .unwrap();
    let samples: Vec<(&str, std::sync::Arc<dyn Fn(&Point) -> Complex64 + Send + Sync>)> = vec![
        ("1", std::sync::Arc::new(|_: &Point| Complex64::new(1.0, 0.0))),
        ("z2", std::sync::Arc::new(|p: &Point| p.z2())),
        (
            "1/2 + z2/2",
            std::sync::Arc::new(|p: &Point| (Complex64::new(1.0, 0.0) + p.z2()) * 0.5),
        ),
    ];
    let mut sup = f64::NEG_INFINITY;
    for (label, g) in samples {
        let xi = Functional::flat_density(g, slice.clone(), 1, 48);
        let num = xi
            .pairing(|_: &Point| Complex64::new(1.0, 0.0))
            .map_err(|e| e.to_string())?
            .norm_sqr();
        let w = xi.pairing_vector(&sys.basis).map_err(|e| e.to_string())?;
        let den = sys.dual_norm_sq(&w).map_err(|e| e.to_string())?;
        let val = num / den;
        ensure(
            val <= primal * (1.0 + 1e-3),
            format!("functional g = {label} exceeds the primal value: {val} > {primal}"),
        )?;
        sup = sup.max(val);
    }
    ensure(
        (sup - primal).abs() <= 1e-3 * primal,
        format!("bidisk/slice primal {primal} vs dual sup {sup}"),
    )
}

fn criterion_7(reports: &[l2ext::verify::CheckReport]) -> Result<(), String> {
    let tube: Vec<_> = reports
        .iter()
        .filter(|r| r.statement == "Lemma 3.3" || r.statement == "Lemma 3.6")
        .collect();
    ensure(tube.len() == 3, format!("expected 3 tube-limit reports, got {}", tube.len()))?;
    for r in &tube {
        ensure(r.pass, format!("{} ({}) failed", r.statement, r.instance))?;
        if r.statement == "Lemma 3.6" {
            let ratio = r.get("ratio_at_deepest").unwrap();
            ensure(
                (ratio - 1.0).abs() <= 0.05,
                format!("annulus tube ratio {ratio} off 1 by more than 5%"),
            )?;
            let dev0 = r.convergence[0].deviation;
            let dev1 = r.convergence[1].deviation;
            ensure(
                dev1 <= dev0 + 5e-3,
                format!("refinement deviation grew: {dev0:.3e} -> {dev1:.3e}"),
            )?;
        }
    }
    Ok(())
}

fn criterion_8() -> Result<(), String> {
    for (k, p) in [(1usize, 3.0f64), (2, 6.0)] {
        let sample = NuSample::from_fn(|s| (k as f64 * s).exp(), -12.0, 0.0625)
            .map_err(|e| e.to_string())?;
        let rep = check_nu_lemma(&sample, k, p).map_err(|e| e.to_string())?;
        let est = rep.get("liminf_estimate").unwrap();
        let closed = k as f64 / (p - k as f64);
        let bound = (k as f64 + 1.0) / (p - k as f64);
        ensure(
            (est - closed).abs() <= 1e-3 && est <= bound,
            format!("(k={k}, p={p}): estimate {est} vs closed form {closed}"),
        )?;
    }
    Ok(())
}

fn criterion_9() -> Result<(), String> {
    let d = disk();
    let gd = solve_green(&d, Complex64::new(0.0, 0.0)).map_err(|e| e.to_string())?;
    let rep = check_family_convergence(&d, &gd, -2.0, &[8.0, 32.0, 128.0], 64)
        .map_err(|e| e.to_string())?;
    let frac = rep.get("excess_fraction").unwrap();
    ensure(
        rep.pass && frac <= 0.02,
        format!("family convergence failed (excess fraction {frac:.4})"),
    )
}

fn criterion_10() -> Result<(), String> {
    for (name, delta) in [
        ("problems/thm37_delta1.json", 1.0f64),
        ("problems/thm37_delta25.json", 2.5),
    ] {
        let r = solve_case(name)?;
        ensure(r.ratio <= 1.0, format!("delta = {delta}: ratio {} > 1", r.ratio))?;
        // Oracle: 1/K_w(0) for the weight (delta + 1)|z|^2 from
        // closed-form Gaussian moments.
        let moments =
            l2ext::bergman::gaussian_moments(25, delta + 1.0).map_err(|e| e.to_string())?;
        let sys = gram_diagonal(
            Basis::Monomials {
                center: Complex64::new(0.0, 0.0),
                degree: 25,
            },
            &moments,
        )
        .map_err(|e| e.to_string())?;
        let oracle = 1.0 / sys.kernel_value(&Point::one(Complex64::new(0.0, 0.0)));
        ensure(
            (r.norm_sq - oracle).abs() <= 1e-4,
            format!(
                "delta = {delta}: norm {} vs oracle 1/K_w(0) = {oracle}",
                r.norm_sq
            ),
        )?;
    }
    Ok(())
}

fn criterion_11(first: &l2ext::cli::suite::SuiteRun) -> Result<(), String> {
    let base = std::env::temp_dir().join("l2ext-acceptance-suite");
    let (d1, d2) = (base.join("run1"), base.join("run2"));
    for d in [&d1, &d2] {
        let _ = std::fs::remove_dir_all(d);
    }
    write_bundle(first, &d1).map_err(|e| e.to_string())?;
    let second = run_suite().map_err(|e| e.to_string())?;
    ensure(second.pass, "second suite run has failing checks".into())?;
    write_bundle(&second, &d2).map_err(|e| e.to_string())?;
    let mut names: Vec<String> = std::fs::read_dir(&d1)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    ensure(!names.is_empty(), "empty bundle".into())?;
    for name in names {
        let a = std::fs::read(d1.join(&name)).map_err(|e| e.to_string())?;
        let b = std::fs::read(d2.join(&name)).map_err(|e| e.to_string())?;
        ensure(a == b, format!("bundle file {name} differs between runs"))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let mut gate = Gate { failures: Vec::new() };
    let s = Duration::from_secs;

    gate.check(1, "Suita equality on the disk", Some(s(5)), criterion_1);
    gate.check(2, "Suita margin stability on the annulus", Some(s(30)), criterion_2);
    gate.check(3, "convexity/monotonicity suite", Some(s(120)), criterion_3);
    gate.check(4, "asymptotic kernel law at t = -8", Some(s(60)), criterion_4);
    gate.check(5, "Theorem 3.1 sharpness", Some(s(60)), criterion_5);
    gate.check(6, "duality consistency", Some(s(60)), criterion_6);

    // One suite run feeds both the tube-limit criterion and the
    // determinism comparison.
    let suite_run = match run_suite() {
        Ok(r) => r,
        Err(e) => panic!("suite run failed: {e}"),
    };
    gate.check(7, "Lemma 3.3/3.6 tube limits", Some(s(120)), || {
        criterion_7(&suite_run.reports)
    });
    gate.check(8, "Lemma 3.4 closed forms", Some(s(1)), criterion_8);
    gate.check(9, "family convergence", Some(s(30)), criterion_9);
    gate.check(10, "Theorem 3.7 Gaussian instances", Some(s(30)), criterion_10);
    gate.check(11, "suite determinism", None, || criterion_11(&suite_run));

    assert!(
        gate.failures.is_empty(),
        "failed acceptance criteria: {:?}",
        gate.failures
    );
}
