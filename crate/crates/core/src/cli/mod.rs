//! Command-line front end: spec parsing, subcommand dispatch and
//! artifact emission (tables, CSV, JSON, SVG).

pub mod output;
pub mod spec;
pub mod suite;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use crate::bergman::{kernel_profile, Basis, Profile, ProfileMode, ProfileOpts};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};
use crate::potential::solve_green;
use crate::verify::{check_profile, check_suita, CheckReport};

use output::{
    profile_csv, profile_svg, report_table, to_json_pretty, write_artifact, ExtensionReport,
};

#[derive(Parser)]
#[command(
    name = "l2ext",
    version,
    about = "Green's functions, Bergman kernels and sharp L2-minimal extension bounds",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Robin constant, kernel value and the sharp ratio pi*K*e^c.
    Suita {
        #[arg(long)]
        domain: PathBuf,
        /// Pole "x" or "x,y"; defaults to 0.
        #[arg(long, allow_hyphen_values = true)]
        pole: Option<String>,
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Comma list of csv,json,svg (svg is ignored here).
        #[arg(long)]
        format: Option<String>,
    },
    /// k(t) profile of the sublevel (or weighted) kernel at a pole.
    Profile {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        pole: Option<String>,
        /// Grid "min:max:step" with max <= 0; defaults to -8:0:0.25.
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        /// Weighted-family exponents (comma list); omitted = restricted.
        #[arg(long)]
        p: Option<String>,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Minimal L2 extension of a problem file with its bound certificate.
    Extend {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Tube-limit, nu-function and family-convergence reports.
    Lemmas {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Full regression bundle; exit status reflects the conjunction.
    Suite {
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_pole(s: Option<&str>) -> Result<Complex64> {
    let s = match s {
        None => return Ok(Complex64::new(0.0, 0.0)),
        Some(s) => s,
    };
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || Error::InvalidSpec(format!("cannot parse pole {s:?}; expected \"x\" or \"x,y\""));
    match parts.as_slice() {
        [x] => Ok(Complex64::new(x.trim().parse().map_err(|_| bad())?, 0.0)),
        [x, y] => Ok(Complex64::new(
            x.trim().parse().map_err(|_| bad())?,
            y.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn parse_t_range(s: Option<&str>) -> Result<Vec<f64>> {
    let s = s.unwrap_or("-8:0:0.25");
    let bad = || Error::InvalidSpec(format!("cannot parse t range {s:?}; expected min:max:step"));
    let parts: Vec<&str> = s.split(':').collect();
    let [min, max, step] = parts.as_slice() else {
        return Err(bad());
    };
    let min: f64 = min.trim().parse().map_err(|_| bad())?;
    let max: f64 = max.trim().parse().map_err(|_| bad())?;
    let step: f64 = step.trim().parse().map_err(|_| bad())?;
    if !(step > 0.0 && min < max && max <= 0.0) {
        return Err(Error::InvalidSpec(format!(
            "t range needs min < max <= 0 and step > 0, got {s:?}"
        )));
    }
    let n = ((max - min) / step).round() as usize;
    Ok((0..=n).map(|i| (min + step * i as f64).min(max)).collect())
}

fn parse_p_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("cannot parse p value {x:?}")))
        })
        .collect()
}

#[derive(Clone, Copy)]
struct Formats {
    csv: bool,
    json: bool,
    svg: bool,
}

fn parse_formats(s: Option<&str>) -> Result<Formats> {
    let mut f = Formats {
        csv: false,
        json: false,
        svg: false,
    };
    let s = match s {
        None => {
            return Ok(Formats {
                csv: true,
                json: true,
                svg: true,
            })
        }
        Some(s) => s,
    };
    for part in s.split(',') {
        match part.trim() {
            "csv" => f.csv = true,
            "json" => f.json = true,
            "svg" => f.svg = true,
            other => {
                return Err(Error::InvalidSpec(format!(
                    "unknown format {other:?}; expected csv, json or svg"
                )))
            }
        }
    }
    Ok(f)
}

fn basis_for_degree(domain: &Domain, degree: usize) -> Basis {
    match domain {
        Domain::Annulus { .. } => Basis::Laurent {
            jmax: degree as i32,
        },
        Domain::Ball2 | Domain::Bidisk => Basis::Monomials2 {
            total_degree: degree,
        },
        Domain::Disk { center, .. } => Basis::Monomials {
            center: *center,
            degree,
        },
        _ => Basis::Monomials {
            center: Complex64::new(0.0, 0.0),
            degree,
        },
    }
}

fn suita_table(rep: &CheckReport) -> String {
    let get = |k: &str| rep.get(k).unwrap_or(f64::NAN);
    let mut s = String::new();
    s.push_str(&format!("instance: {}\n", rep.instance));
    s.push_str(&format!("K(a)      = {:.8}\n", get("kernel_analytic")));
    s.push_str(&format!("c_D       = {:.8}\n", get("robin_analytic")));
    s.push_str(&format!("ratio     = {:.8}\n", get("ratio_analytic")));
    s.push_str(&format!("margin    = {:.3e}\n", get("margin")));
    s.push_str(&format!("pass      = {}\n", rep.pass));
    s
}

/// Shifted presentation copy of a profile: the value column becomes
/// `k(t) = log-quantity + k·t`.
fn shifted_for_export(profile: &Profile, k: usize) -> Profile {
    let mut out = profile.clone();
    out.values = profile.shifted(k);
    out.metadata
        .insert("quantity".into(), format!("{}_plus_{k}t", profile
            .metadata
            .get("quantity")
            .cloned()
            .unwrap_or_else(|| "value".into())));
    out
}

fn emit_reports(
    reports: &[CheckReport],
    out: Option<&Path>,
    name: &str,
    formats: Formats,
) -> Result<i32> {
    print!("{}", report_table(reports));
    if let (Some(dir), true) = (out, formats.json) {
        write_artifact(&dir.join(name), &to_json_pretty(&reports)?)?;
    }
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn cmd_suita(
    domain: &Path,
    pole: Option<&str>,
    resolution: Option<u32>,
    out: Option<&Path>,
    format: Option<&str>,
) -> Result<i32> {
    let formats = parse_formats(format)?;
    let (dom, _) = spec::load_domain(domain)?;
    let pole = parse_pole(pole)?;
    let rep = check_suita(&dom, pole, resolution.unwrap_or(128))?;
    print!("{}", suita_table(&rep));
    if let (Some(dir), true) = (out, formats.json) {
        write_artifact(&dir.join("suita.json"), &to_json_pretty(&rep)?)?;
    }
    Ok(if rep.pass { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn cmd_profile(
    domain: &Path,
    pole: Option<&str>,
    t: Option<&str>,
    p: Option<&str>,
    degree: Option<usize>,
    resolution: Option<u32>,
    out: Option<&Path>,
    format: Option<&str>,
) -> Result<i32> {
    let formats = parse_formats(format)?;
    let (dom, file) = spec::load_domain(domain)?;
    let pole = parse_pole(pole)?;
    let grid = parse_t_range(t)?;
    let modes: Vec<ProfileMode> = match p {
        None => vec![ProfileMode::Restricted],
        Some(s) => parse_p_list(s)?
            .into_iter()
            .map(|p| ProfileMode::Weighted { p })
            .collect(),
    };
    let mut opts = ProfileOpts::default();
    if let Some(res) = resolution.or(file.resolution) {
        opts.resolution = res;
    }
    if let Some(r) = file.refinement {
        opts.refinement = r;
    }
    if let Some(d) = degree {
        opts.basis = Some(basis_for_degree(&dom, d));
    }
    let model = solve_green(&dom, pole)?;
    let a = Point::one(pole);
    let k = dom.dim();
    let mut code = 0;
    for mode in modes {
        let profile = kernel_profile(&dom, &model, &a, &grid, mode, &opts)?;
        let rep = check_profile(&profile, k)?;
        let export = shifted_for_export(&profile, k);
        let tag = match mode.p() {
            Some(p) => format!("profile_{}_p{p}", mode.label()),
            None => "profile_restricted".to_string(),
        };
        let csv = profile_csv(&export);
        if formats.csv {
            print!("{csv}");
        }
        if let Some(dir) = out {
            if formats.csv {
                write_artifact(&dir.join(format!("{tag}.csv")), &csv)?;
            }
            if formats.svg {
                write_artifact(&dir.join(format!("{tag}.svg")), &profile_svg(&export, &tag))?;
            }
            if formats.json {
                write_artifact(&dir.join(format!("{tag}.json")), &to_json_pretty(&rep)?)?;
            }
        }
        if !rep.pass {
            code = 1;
        }
    }
    Ok(code)
}

fn cmd_extend(
    problem: &Path,
    degree: Option<usize>,
    resolution: Option<u32>,
    out: Option<&Path>,
    format: Option<&str>,
) -> Result<i32> {
    let formats = parse_formats(format)?;
    let mut loaded = spec::load_problem(problem)?;
    if let Some(d) = degree {
        loaded.problem.basis = Some(basis_for_degree(&loaded.problem.domain, d));
    }
    if let Some(res) = resolution {
        loaded.problem.resolution = res;
    }
    let result = spec::run_problem(&loaded)?;
    let instance = problem
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".into());
    let rep = ExtensionReport::new(loaded.mode.label(), &instance, &result);
    let json = to_json_pretty(&rep)?;
    print!("{json}");
    if let (Some(dir), true) = (out, formats.json) {
        write_artifact(&dir.join(format!("{instance}.json")), &json)?;
    }
    Ok(
        if result.ratio <= 1.0 + 1e-6 && result.constraint_residual <= 1e-6 {
            0
        } else {
            1
        },
    )
}

fn cmd_lemmas(out: Option<&Path>, format: Option<&str>) -> Result<i32> {
    let formats = parse_formats(format)?;
    let mut reports = Vec::new();
    suite::tube_reports(&mut reports)?;
    suite::lemma_reports(&mut reports)?;
    reports.sort_by(|a, b| {
        (a.statement.as_str(), a.instance.as_str()).cmp(&(b.statement.as_str(), b.instance.as_str()))
    });
    emit_reports(&reports, out, "lemmas.json", formats)
}

fn cmd_suite(out: &Path) -> Result<i32> {
    let run = suite::run_suite()?;
    suite::write_bundle(&run, out)?;
    print!("{}", report_table(&run.reports));
    let mut by_statement: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &run.reports {
        let e = by_statement.entry(r.statement.as_str()).or_insert((0, 0));
        e.1 += 1;
        if r.pass {
            e.0 += 1;
        }
    }
    for (statement, (ok, total)) in by_statement {
        println!("{statement}: {ok}/{total}");
    }
    Ok(if run.pass { 0 } else { 1 })
}

/// Parses argv and dispatches; returns the process exit code (0 pass,
/// 1 failed checks). Argument and spec errors surface as `Err`.
pub fn run<I, T>(argv: I) -> Result<i32>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::InvalidSpec(e.to_string()))?;
    match &cli.command {
        Command::Suita {
            domain,
            pole,
            resolution,
            out,
            format,
        } => cmd_suita(
            domain,
            pole.as_deref(),
            *resolution,
            out.as_deref(),
            format.as_deref(),
        ),
        Command::Profile {
            domain,
            pole,
            t,
            p,
            degree,
            resolution,
            out,
            format,
        } => cmd_profile(
            domain,
            pole.as_deref(),
            t.as_deref(),
            p.as_deref(),
            *degree,
            *resolution,
            out.as_deref(),
            format.as_deref(),
        ),
        Command::Extend {
            problem,
            degree,
            resolution,
            out,
            format,
        } => cmd_extend(
            problem,
            *degree,
            *resolution,
            out.as_deref(),
            format.as_deref(),
        ),
        Command::Lemmas { out, format } => cmd_lemmas(out.as_deref(), format.as_deref()),
        Command::Suite { out } => cmd_suite(out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pole_parsing() {
        assert_eq!(parse_pole(None).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(parse_pole(Some("0.5")).unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(
            parse_pole(Some("0.3, -0.1")).unwrap(),
            Complex64::new(0.3, -0.1)
        );
        assert!(parse_pole(Some("a")).is_err());
    }

    #[test]
    fn t_range_parsing() {
        let g = parse_t_range(Some("-2:0:0.5")).unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[0] + 2.0).abs() < 1e-15 && g[4].abs() < 1e-15);
        assert!(parse_t_range(Some("0:-2:0.5")).is_err());
        assert!(parse_t_range(Some("-2:0")).is_err());
    }

    #[test]
    fn p_list_and_formats() {
        assert_eq!(parse_p_list("8, 32,128").unwrap(), vec![8.0, 32.0, 128.0]);
        assert!(parse_p_list("8,x").is_err());
        let f = parse_formats(Some("csv,svg")).unwrap();
        assert!(f.csv && f.svg && !f.json);
        assert!(parse_formats(Some("png")).is_err());
    }

    #[test]
    fn unknown_flags_rejected() {
        let r = run(["l2ext", "suita", "--domain", "x.json", "--bogus"]);
        assert!(r.is_err());
    }
}
