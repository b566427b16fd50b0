//! The `detlab` command line: config ingestion, dispatch to the verify
//! module and report emission.

mod config;
mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::disk::compute_modes;
use crate::error::{Error, Result};
use crate::halfline::Bc;
use crate::report::IdentityReport;
use crate::verify::{
    eigenvalue_scan, eq_4_37_report, jost_pais_with_tolerance, mode_identity_reports,
    ratio_1d_with_tolerance, theorem_4_2_report, verify_hs_membership, HsSubject, ScanProblem,
    DISK_TOLERANCE, HALFLINE_TOLERANCE,
};

pub use config::{
    check_tolerance, read_table, DiscretizationConfig, LoadedPotential, OutputConfig, OutputFormat,
    PotentialConfig, RunConfig, ScanConfig, TABLE_EXTENSION,
};
pub use output::{
    modes_csv, real, reports_csv, reports_json, scan_csv, write_atomic, Meta, ModeRow, ReportFile,
};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Ok = 0,
    Residual = 2,
    Spectral = 3,
    Config = 4,
}

impl ExitStatus {
    pub fn of(e: &Error) -> Self {
        match e {
            Error::Parameter(_)
            | Error::Config(_)
            | Error::Domain { .. }
            | Error::ModeRange(_)
            | Error::Truncation { .. } => ExitStatus::Config,
            Error::Mode { source, .. } => Self::of(source),
            e if e.is_spectral() => ExitStatus::Spectral,
            _ => ExitStatus::Residual,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "detlab",
    version,
    about = "Verify Fredholm determinant identities for half-line and disk Schrödinger operators"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute every side of an identity at each z of the config.
    Verify {
        subject: Subject,
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Report path; overrides output.path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Identity tolerance in [1e-12, 1e-2]; overrides discretization.tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Locate eigenvalues on the negative axis as zeros of a boundary scalar.
    Scan {
        problem: ScanKind,
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Report path; overrides output.path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Angular mode for disk problems; overrides scan.ell.
        #[arg(long, allow_hyphen_values = true)]
        ell: Option<i64>,
    },
    /// Dump per-mode data for |ℓ| ≤ l_max at the first z of the config.
    Modes {
        /// JSON run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Report path; overrides output.path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subject {
    #[value(name = "jost-pais")]
    JostPais,
    #[value(name = "ratio-1d")]
    Ratio1d,
    #[value(name = "thm-4-2")]
    Thm42,
    #[value(name = "eq-4-37")]
    Eq437,
    #[value(name = "mode-identities")]
    ModeIdentities,
    #[value(name = "hs-diagnostic")]
    HsDiagnostic,
}

impl Subject {
    fn name(self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    #[value(name = "halfline-neumann")]
    HalflineNeumann,
    #[value(name = "halfline-dirichlet")]
    HalflineDirichlet,
    #[value(name = "disk-neumann")]
    DiskNeumann,
    #[value(name = "disk-dirichlet")]
    DiskDirichlet,
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitStatus::Config as i32
            } else {
                0
            };
        }
    };
    match execute(&cli.command) {
        Ok(status) => status as i32,
        Err(e) => {
            eprintln!("detlab: {e}");
            ExitStatus::of(&e) as i32
        }
    }
}

/// Runs one command. Errors before any output is written are returned;
/// failures at individual z values are reported on stderr and folded into
/// the status.
pub fn execute(command: &Command) -> Result<ExitStatus> {
    match command {
        Command::Verify {
            subject,
            config,
            out,
            tolerance,
        } => cmd_verify(*subject, config, out.as_deref(), *tolerance),
        Command::Scan {
            problem,
            config,
            out,
            ell,
        } => cmd_scan(*problem, config, out.as_deref(), *ell),
        Command::Modes { config, out } => cmd_modes(config, out.as_deref()),
    }
}

fn output_path(cfg: &RunConfig, out: Option<&Path>) -> Result<PathBuf> {
    let path = out
        .map(Path::to_path_buf)
        .or_else(|| cfg.output.path.clone());
    let path =
        path.ok_or_else(|| Error::Config("no output path: set output.path or pass --out".into()))?;
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    if !dir.is_dir() {
        return Err(Error::Config(format!(
            "output directory {} does not exist",
            dir.display()
        )));
    }
    Ok(path)
}

fn base_meta(command: String, cfg: &RunConfig, v: &LoadedPotential) -> Meta {
    let d = &cfg.discretization;
    let mut meta = vec![
        ("command".to_string(), command),
        ("potential".to_string(), v.label().to_string()),
        (
            "discretization".to_string(),
            format!(
                "x_max={} n_panels={} nodes_per_panel={} l_max={} max_refinements={}",
                d.x_max,
                d.n_panels,
                cfg.nodes_per_panel(matches!(v, LoadedPotential::Disk(_))),
                d.l_max,
                d.max_refinements
            ),
        ),
    ];
    if cfg.is_table() {
        meta.push(("table_extension".to_string(), TABLE_EXTENSION.to_string()));
    }
    meta
}

fn cmd_verify(
    subject: Subject,
    config: &Path,
    out: Option<&Path>,
    tolerance: Option<f64>,
) -> Result<ExitStatus> {
    let cfg = RunConfig::load(config)?;
    if let Some(t) = tolerance {
        check_tolerance("--tolerance", t)?;
    }
    let path = output_path(&cfg, out)?;
    let v = cfg.potential()?;
    let disk = matches!(
        subject,
        Subject::Thm42 | Subject::Eq437 | Subject::ModeIdentities
    ) || (subject == Subject::HsDiagnostic && matches!(v, LoadedPotential::Disk(_)));
    if disk {
        v.disk()?;
        for pt in cfg.points() {
            crate::disk::check_admissible(&pt).map_err(|e| Error::Config(e.to_string()))?;
        }
    } else if subject != Subject::HsDiagnostic {
        v.halfline()?;
    }
    let tol = tolerance.or(cfg.discretization.tolerance);
    let settings = cfg.settings(disk);
    let l_max = cfg.discretization.l_max;

    let mut reports: Vec<IdentityReport> = Vec::new();
    let mut status = ExitStatus::Ok;
    for pt in cfg.points() {
        let step: Result<Vec<IdentityReport>> = (|| {
            Ok(match subject {
                Subject::JostPais => {
                    let v = v.halfline()?;
                    let t = tol.unwrap_or(HALFLINE_TOLERANCE);
                    vec![
                        jost_pais_with_tolerance(v, &pt, Bc::Dirichlet, &settings, t)?,
                        jost_pais_with_tolerance(v, &pt, Bc::Neumann, &settings, t)?,
                    ]
                }
                Subject::Ratio1d => vec![ratio_1d_with_tolerance(
                    v.halfline()?,
                    &pt,
                    &settings,
                    tol.unwrap_or(HALFLINE_TOLERANCE),
                )?],
                Subject::Thm42 | Subject::Eq437 => {
                    let v = v.disk()?;
                    let grid = v.grid(settings.policy.n_panels, settings.policy.nodes_per_panel)?;
                    let modes = compute_modes(v, &pt, l_max, &grid, &settings)?;
                    let a = crate::disk::DiskAssembly::from_modes(modes.clone());
                    let t = tol.unwrap_or(DISK_TOLERANCE);
                    if subject == Subject::Thm42 {
                        vec![theorem_4_2_report(&a, v, &pt, &grid, t)]
                    } else {
                        let r = crate::disk::ReciprocalAssembly::from_modes(modes);
                        vec![eq_4_37_report(&r, a.q1.partial, v, &pt, &grid, t)]
                    }
                }
                Subject::ModeIdentities => {
                    let v = v.disk()?;
                    let grid = v.grid(settings.policy.n_panels, settings.policy.nodes_per_panel)?;
                    let modes = compute_modes(v, &pt, l_max, &grid, &settings)?;
                    let disc = crate::report::Discretization {
                        radius: Some(v.radius),
                        n_panels: Some(settings.policy.n_panels),
                        nodes_per_panel: Some(settings.policy.nodes_per_panel),
                        grid_sizes: vec![grid.len()],
                        l_max: Some(l_max),
                        ..Default::default()
                    };
                    let reps = modes
                        .iter()
                        .flat_map(|m| mode_identity_reports(m, pt.z, &disc));
                    match tol {
                        Some(t) => reps.map(|r| r.with_tolerance(t)).collect(),
                        None => reps.collect(),
                    }
                }
                Subject::HsDiagnostic => {
                    let mut reps = Vec::new();
                    for bc in [Bc::Dirichlet, Bc::Neumann] {
                        let s = match &v {
                            LoadedPotential::Halfline(v) => HsSubject::Halfline { v, bc },
                            LoadedPotential::Disk(v) => HsSubject::DiskMode { v, ell: 0, bc },
                        };
                        let r = verify_hs_membership(&s, &pt, 3, &settings)?.to_identity();
                        reps.push(match tol {
                            Some(t) => r.with_tolerance(t),
                            None => r,
                        });
                    }
                    reps
                }
            })
        })();
        match step {
            Ok(reps) => {
                if reps.iter().any(|r| !r.converged) {
                    status = status.max(ExitStatus::Residual);
                }
                reports.extend(reps);
            }
            Err(e) => {
                let s = ExitStatus::of(&e);
                if s == ExitStatus::Config {
                    return Err(e);
                }
                eprintln!("detlab: z = {}: {e}", pt.z);
                status = status.max(s);
            }
        }
    }

    let meta = base_meta(format!("verify {}", subject.name()), &cfg, &v);
    let text = match cfg.output.format {
        OutputFormat::Csv => reports_csv(&meta, &reports),
        OutputFormat::Json => reports_json(&meta, &reports)?,
    };
    write_atomic(&path, &text)?;
    Ok(status)
}

fn cmd_scan(
    kind: ScanKind,
    config: &Path,
    out: Option<&Path>,
    ell: Option<i64>,
) -> Result<ExitStatus> {
    let cfg = RunConfig::load(config)?;
    let path = output_path(&cfg, out)?;
    let v = cfg.potential()?;
    let ell = ell.unwrap_or(cfg.scan.ell);
    let disk = matches!(kind, ScanKind::DiskNeumann | ScanKind::DiskDirichlet);
    let problem = match kind {
        ScanKind::HalflineNeumann => ScanProblem::Halfline {
            v: v.halfline()?,
            bc: Bc::Neumann,
        },
        ScanKind::HalflineDirichlet => ScanProblem::Halfline {
            v: v.halfline()?,
            bc: Bc::Dirichlet,
        },
        ScanKind::DiskNeumann => ScanProblem::DiskMode {
            v: v.disk()?,
            ell,
            bc: Bc::Neumann,
        },
        ScanKind::DiskDirichlet => ScanProblem::DiskMode {
            v: v.disk()?,
            ell,
            bc: Bc::Dirichlet,
        },
    };
    let s = &cfg.scan;
    let result = eigenvalue_scan(
        &problem,
        (s.z_min, s.z_max),
        s.n_samples,
        &cfg.settings(disk),
    )?;

    let mut meta = base_meta(format!("scan {}", result.problem), &cfg, &v);
    meta.push((
        "z_range".into(),
        format!("[{}, {}] with {} samples", s.z_min, s.z_max, s.n_samples),
    ));
    meta.push((
        "oracle_count".into(),
        result.oracle_values.len().to_string(),
    ));
    let poles: Vec<String> = result.rejected_poles.iter().map(|&p| real(p)).collect();
    meta.push(("rejected_poles".into(), poles.join(" ")));
    meta.push(("ill_conditioned".into(), result.ill_conditioned.to_string()));
    let text = match cfg.output.format {
        OutputFormat::Csv => scan_csv(&meta, &result),
        OutputFormat::Json => output::to_json(&result)?,
    };
    write_atomic(&path, &text)?;
    Ok(if result.ill_conditioned {
        ExitStatus::Spectral
    } else if result.max_mismatch() > 1e-6 {
        ExitStatus::Residual
    } else {
        ExitStatus::Ok
    })
}

fn cmd_modes(config: &Path, out: Option<&Path>) -> Result<ExitStatus> {
    let cfg = RunConfig::load(config)?;
    let path = output_path(&cfg, out)?;
    let loaded = cfg.potential()?;
    let v = loaded.disk()?;
    let pt = *cfg
        .points()
        .first()
        .ok_or_else(|| Error::Config("z_list must contain at least one point".into()))?;
    crate::disk::check_admissible(&pt).map_err(|e| Error::Config(e.to_string()))?;
    let settings = cfg.settings(true);
    let grid = v.grid(settings.policy.n_panels, settings.policy.nodes_per_panel)?;
    let l_max = cfg.discretization.l_max;
    let modes = compute_modes(v, &pt, l_max, &grid, &settings)?;
    let rows: Vec<ModeRow> = (-l_max..=l_max)
        .map(|ell| ModeRow::new(ell, &modes[ell.unsigned_abs() as usize]))
        .collect();

    let mut meta = base_meta("modes".into(), &cfg, &loaded);
    meta.push(("z".into(), format!("{} {}", real(pt.z.re), real(pt.z.im))));
    let text = match cfg.output.format {
        OutputFormat::Csv => modes_csv(&meta, &rows),
        OutputFormat::Json => output::to_json(&rows)?,
    };
    write_atomic(&path, &text)?;
    Ok(ExitStatus::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_status_classes() {
        assert_eq!(
            ExitStatus::of(&Error::Config("x".into())),
            ExitStatus::Config
        );
        assert_eq!(
            ExitStatus::of(&Error::Pole {
                what: "m",
                magnitude: 0.0
            }),
            ExitStatus::Spectral
        );
        let wrapped = Error::Mode {
            ell: 3,
            source: Box::new(Error::Singular {
                pivot: 0.0,
                threshold: 1.0,
            }),
        };
        assert_eq!(ExitStatus::of(&wrapped), ExitStatus::Spectral);
        assert_eq!(
            ExitStatus::of(&Error::Convergence {
                values: vec![],
                error: 1.0
            }),
            ExitStatus::Residual
        );
    }

    #[test]
    fn usage_errors_are_config_errors() {
        assert_eq!(
            run(["detlab", "verify", "nonsense", "--config", "x.json"]),
            4
        );
        assert_eq!(run(["detlab"]), 4);
        assert_eq!(run(["detlab", "--help"]), 0);
    }
}
