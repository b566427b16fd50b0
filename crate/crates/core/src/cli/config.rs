use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::disk::RadialPotential2D;
use crate::error::{Error, Result};
use crate::halfline::{Potential1D, SpectralPoint};
use crate::numerics::{RefinementPolicy, C64};
use crate::settings::Settings;

/// Note written into every report built from a tabulated potential.
pub const TABLE_EXTENSION: &str =
    "linear interpolation; constant below the first sample, zero beyond the last";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialConfig {
    Exp1d {
        amplitude: f64,
        rate: f64,
    },
    Well1d {
        depth: f64,
        width: f64,
    },
    Table1d {
        path: PathBuf,
    },
    RadialGaussian {
        amplitude: f64,
        width: f64,
        #[serde(rename = "R")]
        radius: f64,
    },
    RadialTable {
        path: PathBuf,
        #[serde(rename = "R")]
        radius: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiscretizationConfig {
    pub x_max: f64,
    pub n_panels: usize,
    /// Defaults to 16 on the half-line and 25 on the disk.
    pub nodes_per_panel: Option<usize>,
    pub l_max: i64,
    /// Identity tolerance; each subject has its own default.
    pub tolerance: Option<f64>,
    pub max_refinements: usize,
}

impl Default for DiscretizationConfig {
    fn default() -> Self {
        Self {
            x_max: 30.0,
            n_panels: 8,
            nodes_per_panel: None,
            l_max: 40,
            tolerance: None,
            max_refinements: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub z_min: f64,
    pub z_max: f64,
    pub n_samples: usize,
    pub ell: i64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            z_min: -4.0,
            z_max: -1e-3,
            n_samples: 80,
            ell: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    #[serde(default)]
    pub z_list: Vec<(f64, f64)>,
    #[serde(default)]
    pub discretization: DiscretizationConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub scan: ScanConfig,
}

/// A potential built from the config, on either geometry.
#[derive(Debug, Clone)]
pub enum LoadedPotential {
    Halfline(Potential1D),
    Disk(RadialPotential2D),
}

impl LoadedPotential {
    pub fn label(&self) -> &str {
        match self {
            LoadedPotential::Halfline(v) => &v.label,
            LoadedPotential::Disk(v) => &v.label,
        }
    }

    pub fn halfline(&self) -> Result<&Potential1D> {
        match self {
            LoadedPotential::Halfline(v) => Ok(v),
            LoadedPotential::Disk(_) => Err(Error::Config(
                "this command needs a half-line potential (exp1d, well1d, table1d)".into(),
            )),
        }
    }

    pub fn disk(&self) -> Result<&RadialPotential2D> {
        match self {
            LoadedPotential::Disk(v) => Ok(v),
            LoadedPotential::Halfline(_) => Err(Error::Config(
                "this command needs a disk potential (radial_gaussian, radial_table)".into(),
            )),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file. Table paths are resolved against
    /// the config's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        match &mut cfg.potential {
            PotentialConfig::Table1d { path } | PotentialConfig::RadialTable { path, .. }
                if path.is_relative() =>
            {
                *path = base.join(&*path);
            }
            _ => {}
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let d = &self.discretization;
        if let Some(tol) = d.tolerance {
            check_tolerance("discretization.tolerance", tol)?;
        }
        if !(d.x_max > 0.0 && d.x_max.is_finite()) {
            return Err(Error::Config(format!(
                "discretization.x_max must be positive, got {}",
                d.x_max
            )));
        }
        if d.n_panels == 0 {
            return Err(Error::Config(
                "discretization.n_panels must be at least 1".into(),
            ));
        }
        if let Some(n) = d.nodes_per_panel {
            if !(2..=64).contains(&n) {
                return Err(Error::Config(format!(
                    "discretization.nodes_per_panel must lie in 2..=64, got {n}"
                )));
            }
        }
        if !(0..=crate::disk::MAX_MODE).contains(&d.l_max) {
            return Err(Error::Config(format!(
                "discretization.l_max must lie in 0..={}, got {}",
                crate::disk::MAX_MODE,
                d.l_max
            )));
        }
        if d.max_refinements > 8 {
            return Err(Error::Config(format!(
                "discretization.max_refinements must be at most 8, got {}",
                d.max_refinements
            )));
        }
        for (i, &(re, im)) in self.z_list.iter().enumerate() {
            SpectralPoint::new(C64::new(re, im))
                .map_err(|e| Error::Config(format!("z_list[{i}] = ({re}, {im}): {e}")))?;
        }
        let s = &self.scan;
        if !(s.z_min < s.z_max && s.z_max < 0.0 && s.z_min.is_finite()) {
            return Err(Error::Config(format!(
                "scan range ({}, {}) must be an interval of the negative axis",
                s.z_min, s.z_max
            )));
        }
        if s.n_samples < 2 {
            return Err(Error::Config("scan.n_samples must be at least 2".into()));
        }
        match &self.potential {
            PotentialConfig::Exp1d { amplitude, rate } => {
                finite_field("potential.amplitude", *amplitude)?;
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::Config(format!(
                        "potential.rate must be positive, got {rate}"
                    )));
                }
            }
            PotentialConfig::Well1d { depth, width } => {
                finite_field("potential.depth", *depth)?;
                if !(*width > 0.0 && *width <= d.x_max) {
                    return Err(Error::Config(format!(
                        "potential.width must lie in (0, x_max], got {width}"
                    )));
                }
            }
            PotentialConfig::RadialGaussian {
                amplitude,
                width,
                radius,
            } => {
                finite_field("potential.amplitude", *amplitude)?;
                if !(*width > 0.0 && width.is_finite()) {
                    return Err(Error::Config(format!(
                        "potential.width must be positive, got {width}"
                    )));
                }
                positive_radius(*radius)?;
            }
            PotentialConfig::RadialTable { radius, .. } => positive_radius(*radius)?,
            PotentialConfig::Table1d { .. } => {}
        }
        Ok(())
    }

    pub fn is_table(&self) -> bool {
        matches!(
            self.potential,
            PotentialConfig::Table1d { .. } | PotentialConfig::RadialTable { .. }
        )
    }

    pub fn potential(&self) -> Result<LoadedPotential> {
        let x_max = self.discretization.x_max;
        let built = match &self.potential {
            PotentialConfig::Exp1d { amplitude, rate } => {
                LoadedPotential::Halfline(Potential1D::exponential(*amplitude, *rate, x_max)?)
            }
            PotentialConfig::Well1d { depth, width } => {
                LoadedPotential::Halfline(Potential1D::square_well(*depth, *width, x_max)?)
            }
            PotentialConfig::Table1d { path } => {
                let (xs, vs) = read_table(path)?;
                LoadedPotential::Halfline(Potential1D::table(xs, vs, x_max)?)
            }
            PotentialConfig::RadialGaussian {
                amplitude,
                width,
                radius,
            } => LoadedPotential::Disk(RadialPotential2D::gaussian(*amplitude, *width, *radius)?),
            PotentialConfig::RadialTable { path, radius } => {
                let (rs, vs) = read_table(path)?;
                LoadedPotential::Disk(RadialPotential2D::table(rs, vs, *radius)?)
            }
        };
        Ok(built)
    }

    pub fn nodes_per_panel(&self, disk: bool) -> usize {
        self.discretization
            .nodes_per_panel
            .unwrap_or(if disk { 25 } else { 16 })
    }

    pub fn settings(&self, disk: bool) -> Settings {
        let d = &self.discretization;
        Settings {
            policy: RefinementPolicy {
                n_panels: d.n_panels,
                nodes_per_panel: self.nodes_per_panel(disk),
                max_refinements: d.max_refinements,
                ..RefinementPolicy::default()
            },
            ..Settings::default()
        }
    }

    pub fn points(&self) -> Vec<SpectralPoint> {
        self.z_list
            .iter()
            .map(|&(re, im)| SpectralPoint::new(C64::new(re, im)).expect("validated"))
            .collect()
    }
}

pub fn check_tolerance(field: &str, tol: f64) -> Result<()> {
    if (1e-12..=1e-2).contains(&tol) {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{field} = {tol} outside [1e-12, 1e-2]"
        )))
    }
}

fn finite_field(field: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{field} must be finite")))
    }
}

fn positive_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "potential.R must be positive, got {r}"
        )))
    }
}

/// Reads `x, v_re[, v_im]` rows. Blank lines, `#` comments and a leading
/// header line are skipped.
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<C64>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read table {}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    let mut seen_row = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|f| f.parse::<f64>()).collect();
        let bad = |msg: &str| Error::Config(format!("{}:{}: {msg}", path.display(), lineno + 1));
        let row = match parsed {
            Ok(row) => row,
            Err(_) if !seen_row && xs.is_empty() => {
                seen_row = true;
                continue;
            }
            Err(_) => return Err(bad("expected numeric columns x, v_re, v_im")),
        };
        seen_row = true;
        let (x, v) = match row.as_slice() {
            [x, re] => (*x, C64::new(*re, 0.0)),
            [x, re, im] => (*x, C64::new(*re, *im)),
            _ => return Err(bad("expected 2 or 3 columns")),
        };
        if !(x.is_finite() && v.re.is_finite() && v.im.is_finite()) {
            return Err(bad("non-finite entry"));
        }
        if let Some(&prev) = xs.last() {
            if x <= prev {
                return Err(bad("abscissae must be strictly increasing"));
            }
        }
        xs.push(x);
        vs.push(v);
    }
    if xs.len() < 2 {
        return Err(Error::Config(format!(
            "table {} needs at least two samples",
            path.display()
        )));
    }
    Ok((xs, vs))
}
