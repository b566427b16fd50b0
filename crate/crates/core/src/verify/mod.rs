//! Cross-checks between independent pipelines, and eigenvalue scans.

mod identities;
pub mod oracle;
mod scan;

pub use identities::{
    eq_4_37_report, jost_pais_with_tolerance, mode_identity_reports, ratio_1d_with_tolerance,
    theorem_4_2_report, verify_eq_4_37, verify_hs_membership, verify_jost_pais,
    verify_mode_identities, verify_ratio_1d, verify_theorem_4_2, volterra_integral_form, HsReport,
    HsSubject, DISK_TOLERANCE, HALFLINE_TOLERANCE,
};
pub use scan::{eigenvalue_scan, EigenScanResult, ScanProblem, POLE_RATIO, ROOT_TOLERANCE};
