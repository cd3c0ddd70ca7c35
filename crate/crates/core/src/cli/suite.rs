use std::path::Path;

use num_complex::Complex64;

use crate::bergman::{
    dual_profile, kernel_profile, t_grid, Basis, Functional, Profile, ProfileMode, ProfileOpts,
};
use crate::error::Result;
use crate::extension::{
    adjoint_extension, generalized_bound_check, minimal_extension, Datum, ExtensionProblem,
    ExtensionResult,
};
use crate::extension::WeightSpec;
use crate::geometry::{build_domain, Domain, DomainSpec, Point, SliceAmbient, VarietySpec};
use crate::potential::{
    robin_constant, solve_green, GreenKind, GreenMethod, GreenModel,
};
use crate::verify::{
    check_domain_monotonicity, check_family_convergence, check_nu_lemma, check_profile,
    check_suita, check_tube_limit, CheckReport, NuSample, TubeLimitSpec,
};

use super::output::{profile_csv, profile_svg, to_json_pretty, write_artifact};

/// Everything one suite run produced: the (statement, instance)-sorted
/// report bundle, the profiles behind the per-profile CSVs, and the
/// aggregate verdict.
pub struct SuiteRun {
    pub reports: Vec<CheckReport>,
    pub profiles: Vec<(String, Profile)>,
    pub pass: bool,
}

fn disk() -> Result<Domain> {
    build_domain(&DomainSpec::Disk {
        center: [0.0, 0.0],
        radius: 1.0,
    })
}

fn annulus() -> Result<Domain> {
    build_domain(&DomainSpec::Annulus {
        r_inner: 0.2,
        r_outer: 1.0,
    })
}

fn product_disk_model() -> GreenModel {
    GreenModel {
        kind: GreenKind::ProductDisk {
            pole: Complex64::new(0.0, 0.0),
        },
        method: GreenMethod::AnalyticSeries,
        accuracy: 0.0,
    }
}

/// Wraps one solved extension instance as a report: the sharp inequality
/// `ratio ≤ 1`, constraint feasibility, and (where the instance is an
/// equality or closed-form case) the expected ratio.
fn extension_report(
    statement: &str,
    instance: &str,
    result: &ExtensionResult,
    expected_ratio: Option<f64>,
    tolerance: f64,
) -> CheckReport {
    let mut rep = CheckReport::new(statement, instance, tolerance);
    rep.set("norm_sq", result.norm_sq);
    rep.set("bound", result.bound);
    rep.set("ratio", result.ratio);
    rep.set("constraint_residual", result.constraint_residual);
    rep.set("orthogonality_residual", result.orthogonality_residual);
    rep.set("rank", result.rank as f64);
    let mut pass = result.ratio <= 1.0 + tolerance && result.constraint_residual <= 1e-6;
    if let Some(want) = expected_ratio {
        rep.set("expected_ratio", want);
        pass = pass && (result.ratio - want).abs() <= tolerance;
    }
    rep.pass = pass;
    rep
}

fn suita_reports(out: &mut Vec<CheckReport>) -> Result<()> {
    let d = disk()?;
    let a = annulus()?;
    out.push(check_suita(&d, Complex64::new(0.0, 0.0), 128)?);
    out.push(check_suita(&d, Complex64::new(0.3, 0.0), 128)?);
    out.push(check_suita(&a, Complex64::new(0.5, 0.0), 128)?);
    Ok(())
}

fn profile_reports(
    out: &mut Vec<CheckReport>,
    profiles: &mut Vec<(String, Profile)>,
) -> Result<()> {
    let grid = t_grid(-8.0, 0.25)?;

    let d = disk()?;
    let gd = solve_green(&d, Complex64::new(0.0, 0.0))?;
    let origin = Point::one(Complex64::new(0.0, 0.0));

    let p_disk = kernel_profile(
        &d,
        &gd,
        &origin,
        &grid,
        ProfileMode::Restricted,
        &ProfileOpts::default(),
    )?;
    out.push(check_profile(&p_disk, 1)?);
    profiles.push(("profile_disk_restricted".into(), p_disk));

    let p_disk_w = kernel_profile(
        &d,
        &gd,
        &origin,
        &grid,
        ProfileMode::Weighted { p: 128.0 },
        &ProfileOpts::default(),
    )?;
    out.push(check_profile(&p_disk_w, 1)?);
    profiles.push(("profile_disk_weighted_p128".into(), p_disk_w));

    let ann = annulus()?;
    let ga = solve_green(&ann, Complex64::new(0.5, 0.0))?;
    // |j| ≤ 25 Laurent modes resolve the deep sublevel disks to well
    // below the profile tolerances at a quarter of the default cost.
    let opts = ProfileOpts {
        basis: Some(Basis::Laurent { jmax: 25 }),
        ..ProfileOpts::default()
    };
    let p_ann = kernel_profile(
        &ann,
        &ga,
        &Point::one(Complex64::new(0.5, 0.0)),
        &grid,
        ProfileMode::Restricted,
        &opts,
    )?;
    out.push(check_profile(&p_ann, 1)?);
    profiles.push(("profile_annulus_restricted".into(), p_ann));

    let bidisk = build_domain(&DomainSpec::Bidisk)?;
    let gb = product_disk_model();
    let slice = VarietySpec::SliceZ1 {
        c: [0.0, 0.0],
        ambient: SliceAmbient::Bidisk,
    }
    .realize(&bidisk)?;
    let xi = Functional::flat_density(
        std::sync::Arc::new(|_: &Point| Complex64::new(1.0, 0.0)),
        slice,
        1,
        24,
    );
    let p_dual = dual_profile(&bidisk, &gb, &xi, &grid, 128.0, 1, &ProfileOpts::default())?;
    out.push(check_profile(&p_dual, 1)?);
    profiles.push(("profile_bidisk_dual_p128".into(), p_dual));
    Ok(())
}

pub(super) fn tube_reports(out: &mut Vec<CheckReport>) -> Result<()> {
    let grid = t_grid(-9.0, 0.5)?;
    let one = |_: &Point| 1.0;

    let d = disk()?;
    let gd = solve_green(&d, Complex64::new(0.0, 0.0))?;
    let v_origin = VarietySpec::Point { a: vec![0.0, 0.0] }.realize(&d)?;
    let zero_b = |_: &Point| 0.0;
    out.push(check_tube_limit(&TubeLimitSpec {
        domain: &d,
        model: &gd,
        variety: &v_origin,
        b_field: &zero_b,
        chi: &one,
        t_grid: &grid,
        k: 1,
        resolution: 64,
        equality: true,
        statement: "Lemma 3.3",
        tolerance: 1e-6,
    })?);

    let bidisk = build_domain(&DomainSpec::Bidisk)?;
    let gb = product_disk_model();
    let v_slice = VarietySpec::SliceZ1 {
        c: [0.0, 0.0],
        ambient: SliceAmbient::Bidisk,
    }
    .realize(&bidisk)?;
    out.push(check_tube_limit(&TubeLimitSpec {
        domain: &bidisk,
        model: &gb,
        variety: &v_slice,
        b_field: &zero_b,
        chi: &one,
        t_grid: &grid,
        k: 1,
        resolution: 24,
        equality: true,
        statement: "Lemma 3.3",
        tolerance: 1e-6,
    })?);

    // Annulus: on the point variety the defect field reduces to the
    // Robin constant, the limit of log|z−a|² − G at the pole.
    let ann = annulus()?;
    let ga = solve_green(&ann, Complex64::new(0.5, 0.0))?;
    let c = robin_constant(&ga, &ann)?.c;
    let v_half = VarietySpec::Point { a: vec![0.5, 0.0] }.realize(&ann)?;
    let robin_b = move |_: &Point| c;
    out.push(check_tube_limit(&TubeLimitSpec {
        domain: &ann,
        model: &ga,
        variety: &v_half,
        b_field: &robin_b,
        chi: &one,
        t_grid: &grid,
        k: 1,
        resolution: 24,
        equality: true,
        statement: "Lemma 3.6",
        tolerance: 0.05,
    })?);
    Ok(())
}

pub(super) fn lemma_reports(out: &mut Vec<CheckReport>) -> Result<()> {
    for (k, p) in [(1usize, 3.0f64), (2, 6.0)] {
        let sample = NuSample::from_fn(|s| (k as f64 * s).exp(), -12.0, 0.25)?;
        out.push(check_nu_lemma(&sample, k, p)?);
    }
    let d = disk()?;
    let gd = solve_green(&d, Complex64::new(0.0, 0.0))?;
    out.push(check_family_convergence(&d, &gd, -2.0, &[8.0, 32.0, 128.0], 64)?);
    Ok(())
}

fn monotonicity_reports(out: &mut Vec<CheckReport>) -> Result<()> {
    let inner = build_domain(&DomainSpec::Disk {
        center: [0.0, 0.0],
        radius: 0.5,
    })?;
    let outer = disk()?;
    out.push(check_domain_monotonicity(&inner, &outer, Complex64::new(0.0, 0.0), 64)?);
    out.push(check_domain_monotonicity(&outer, &outer, Complex64::new(0.0, 0.0), 64)?);
    Ok(())
}

fn extension_reports(out: &mut Vec<CheckReport>) -> Result<()> {
    let one = Datum::Value(Complex64::new(1.0, 0.0));

    let d = disk()?;
    let v = VarietySpec::Point { a: vec![0.0, 0.0] }.realize(&d)?;
    let prob = ExtensionProblem::flat(d.clone(), v, one.clone(), 1);
    let r = minimal_extension(&prob)?;
    out.push(extension_report(
        "Theorem 3.1",
        "disk, point 0, f = 1",
        &r,
        Some(1.0),
        1e-6,
    ));
    let r = adjoint_extension(&prob, |p: &Point| p.z1())?;
    out.push(extension_report(
        "Theorem 3.6",
        "disk, point 0, f = 1, g = z",
        &r,
        Some(1.0),
        1e-6,
    ));

    let bidisk = build_domain(&DomainSpec::Bidisk)?;
    let v = VarietySpec::SliceZ1 {
        c: [0.0, 0.0],
        ambient: SliceAmbient::Bidisk,
    }
    .realize(&bidisk)?;
    let prob = ExtensionProblem::flat(bidisk, v, one.clone(), 1);
    let r = minimal_extension(&prob)?;
    out.push(extension_report(
        "Theorem 3.1",
        "bidisk, slice z1 = 0, f = 1",
        &r,
        Some(1.0),
        1e-6,
    ));
    let r = adjoint_extension(&prob, |p: &Point| p.z1())?;
    out.push(extension_report(
        "Theorem 3.6",
        "bidisk, slice z1 = 0, f = 1, g = z1",
        &r,
        Some(1.0),
        1e-6,
    ));

    let ball = build_domain(&DomainSpec::Ball2)?;
    let v = VarietySpec::SliceZ1 {
        c: [0.0, 0.0],
        ambient: SliceAmbient::Ball2,
    }
    .realize(&ball)?;
    let prob = ExtensionProblem::flat(ball, v, one.clone(), 1);
    let r = minimal_extension(&prob)?;
    out.push(extension_report(
        "Theorem 3.1",
        "ball2, slice z1 = 0, f = 1",
        &r,
        Some(0.5),
        1e-3,
    ));

    for delta in [1.0f64, 2.5] {
        let v = VarietySpec::Point { a: vec![0.0, 0.0] }.realize(&d)?;
        let prob = ExtensionProblem {
            weight: WeightSpec::Gaussian { beta: delta },
            ..ExtensionProblem::flat(d.clone(), v, one.clone(), 1)
        };
        let gd = solve_green(&d, Complex64::new(0.0, 0.0))?;
        let r = generalized_bound_check(&prob, &gd, |p: &Point| p.norm_sqr(), delta)?;
        // ‖F‖² = π(1−e^{−(δ+1)})/(δ+1) against (1/δ+1)π.
        let want = delta * (1.0 - (-(delta + 1.0)).exp()) / ((delta + 1.0) * (delta + 1.0));
        out.push(extension_report(
            "Theorem 3.7",
            &format!("disk, point 0, psi = |z|^2, delta = {delta}"),
            &r,
            Some(want),
            1e-4,
        ));
    }
    Ok(())
}

/// Runs the full shipped check suite in a fixed order and sorts the
/// bundle by (statement, instance) so repeated runs are byte-identical.
pub fn run_suite() -> Result<SuiteRun> {
    let mut reports = Vec::new();
    let mut profiles = Vec::new();
    suita_reports(&mut reports)?;
    profile_reports(&mut reports, &mut profiles)?;
    tube_reports(&mut reports)?;
    lemma_reports(&mut reports)?;
    monotonicity_reports(&mut reports)?;
    extension_reports(&mut reports)?;
    reports.sort_by(|a, b| {
        (a.statement.as_str(), a.instance.as_str()).cmp(&(b.statement.as_str(), b.instance.as_str()))
    });
    let pass = reports.iter().all(|r| r.pass);
    Ok(SuiteRun {
        reports,
        profiles,
        pass,
    })
}

/// Writes the bundle: `reports.json` plus a CSV and SVG per profile.
pub fn write_bundle(run: &SuiteRun, out_dir: &Path) -> Result<()> {
    write_artifact(
        &out_dir.join("reports.json"),
        &to_json_pretty(&run.reports)?,
    )?;
    for (name, profile) in &run.profiles {
        write_artifact(&out_dir.join(format!("{name}.csv")), &profile_csv(profile))?;
        write_artifact(
            &out_dir.join(format!("{name}.svg")),
            &profile_svg(profile, name),
        )?;
    }
    Ok(())
}
