//! Enumeration and the property suites.

pub mod enumerate;
pub mod suites;

pub use enumerate::{enumerate_formulas, enumerate_processes, Connective, Enumerator};
pub use suites::{run_suite, run_suite_with, HarnessError, Report, Suite, SuiteConfig, SuiteReport};
