//! Placeholder
pub struct RunConfig;
pub struct VerificationReport;
pub fn registry() {}
pub fn run_check() {}
pub fn run_many() {}
