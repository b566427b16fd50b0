use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::disk::ModeData;
use crate::error::{Error, Result};
use crate::report::IdentityReport;
use crate::verify::EigenScanResult;

/// Reals are written with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

/// `key: value` lines written as `#` comments above a CSV header, or as a
/// map in JSON output.
pub type Meta = Vec<(String, String)>;

fn meta_lines(out: &mut String, meta: &Meta) {
    for (k, v) in meta {
        let _ = writeln!(out, "# {k}: {v}");
    }
}

/// Verification reports as CSV. Side columns are named after the sides when
/// every report has the same ones, and numbered otherwise.
pub fn reports_csv(meta: &Meta, reports: &[IdentityReport]) -> String {
    let mut out = String::new();
    meta_lines(&mut out, meta);
    let n_sides = reports.iter().map(|r| r.sides.len()).max().unwrap_or(0);
    let uniform = reports.windows(2).all(|w| {
        w[0].sides.len() == w[1].sides.len()
            && w[0]
                .sides
                .iter()
                .zip(&w[1].sides)
                .all(|(a, b)| a.name == b.name)
    });
    let mut header = vec!["identity".to_string(), "z_re".into(), "z_im".into()];
    for i in 0..n_sides {
        let name = match reports.first() {
            Some(r) if uniform => r.sides[i].name.clone(),
            _ => format!("side{}", i + 1),
        };
        header.push(format!("{name}_re"));
        header.push(format!("{name}_im"));
    }
    header.extend(["abs_resid".into(), "rel_resid".into(), "converged".into()]);
    out.push_str(&header.join(","));
    out.push('\n');
    for r in reports {
        let mut row = vec![r.name.clone()];
        match r.z {
            Some(z) => row.extend([real(z.re), real(z.im)]),
            None => row.extend([String::new(), String::new()]),
        }
        for i in 0..n_sides {
            match r.sides.get(i) {
                Some(s) => row.extend([real(s.value.re), real(s.value.im)]),
                None => row.extend([String::new(), String::new()]),
            }
        }
        row.extend([
            real(r.abs_residual),
            real(r.rel_residual),
            (r.converged as u8).to_string(),
        ]);
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub meta: std::collections::BTreeMap<String, String>,
    pub reports: Vec<IdentityReport>,
}

pub fn reports_json(meta: &Meta, reports: &[IdentityReport]) -> Result<String> {
    let file = ReportFile {
        meta: meta.iter().cloned().collect(),
        reports: reports.to_vec(),
    };
    to_json(&file)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("cannot serialize report: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Root table: one row per located root, then one per oracle value that no
/// root matched.
pub fn scan_csv(meta: &Meta, scan: &EigenScanResult) -> String {
    let mut out = String::new();
    meta_lines(&mut out, meta);
    out.push_str("bc,z_root,det_residual,oracle_z,mismatch\n");
    let matches = scan.matches();
    for ((root, oracle, dist), residual) in matches.iter().zip(&scan.root_residuals) {
        let oracle = oracle.map(real).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            scan.bc.name(),
            real(*root),
            real(*residual),
            oracle,
            real(*dist)
        );
    }
    for o in &scan.oracle_values {
        if !matches.iter().any(|m| m.1 == Some(*o)) {
            let _ = writeln!(out, "{},,,{},inf", scan.bc.name(), real(*o));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRow {
    pub ell: i64,
    pub m0_re: f64,
    pub m0_im: f64,
    pub m_re: f64,
    pub m_im: f64,
    pub d_re: f64,
    pub d_im: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub tau_re: f64,
    pub tau_im: f64,
    pub abs_d_minus_1: f64,
}

impl ModeRow {
    pub fn new(ell: i64, m: &ModeData) -> Self {
        Self {
            ell,
            m0_re: m.m0_ell.re,
            m0_im: m.m0_ell.im,
            m_re: m.m_ell.re,
            m_im: m.m_ell.im,
            d_re: m.d_ell.re,
            d_im: m.d_ell.im,
            b_re: m.b_ell.re,
            b_im: m.b_ell.im,
            tau_re: m.tau_ell.re,
            tau_im: m.tau_ell.im,
            abs_d_minus_1: m.abs_d_minus_1(),
        }
    }
}

pub fn modes_csv(meta: &Meta, rows: &[ModeRow]) -> String {
    let mut out = String::new();
    meta_lines(&mut out, meta);
    out.push_str("ell,m0_re,m0_im,m_re,m_im,d_re,d_im,b_re,b_im,tau_re,tau_im,abs_d_minus_1\n");
    for r in rows {
        let vals = [
            r.m0_re,
            r.m0_im,
            r.m_re,
            r.m_im,
            r.d_re,
            r.d_im,
            r.b_re,
            r.b_im,
            r.tau_re,
            r.tau_im,
            r.abs_d_minus_1,
        ];
        let cells: Vec<String> = vals.iter().map(|&x| real(x)).collect();
        let _ = writeln!(out, "{},{}", r.ell, cells.join(","));
    }
    out
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
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
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        name.to_string_lossy(),
        std::process::id()
    ));
    let io = |e: std::io::Error| Error::Config(format!("cannot write {}: {e}", path.display()));
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}
