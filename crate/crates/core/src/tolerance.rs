//! Tolerances shared by every module so that verdicts agree across them.

/// Entrywise equality of matrices and constant-diagonal checks.
pub const EQUALITY: f64 = 1e-12;
/// Acceptance threshold for PSD and copositivity: smallest eigenvalue or
/// simplex minimum must be at least `-CONE`.
pub const CONE: f64 = 1e-9;
/// Significant digits shown in human-readable reports.
pub const DISPLAY_DIGITS: usize = 6;
