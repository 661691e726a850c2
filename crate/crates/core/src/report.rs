//! Outcome of a numerical identity sweep.

use std::fmt;

const MAX_LISTED_VIOLATIONS: usize = 20;

/// How a sweep chooses its inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Random { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub name: String,
    pub p: u32,
    pub checked: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub violation_count: usize,
    /// The first few offending inputs, rendered for humans.
    pub violations: Vec<String>,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>, p: u32, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            p,
            checked: 0,
            max_deviation: 0.0,
            tolerance,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    /// Records one comparison; `describe` runs only on violation.
    pub fn record(&mut self, deviation: f64, describe: impl FnOnce() -> String) {
        self.checked += 1;
        if deviation > self.max_deviation || deviation.is_nan() {
            self.max_deviation = if deviation.is_nan() { f64::INFINITY } else { deviation };
        }
        if deviation.is_nan() || deviation >= self.tolerance {
            self.violation_count += 1;
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(describe());
            }
        }
    }

    /// Folds another partial report of the same sweep into this one.
    pub fn merge(&mut self, other: IdentityReport) {
        self.checked += other.checked;
        self.max_deviation = self.max_deviation.max(other.max_deviation);
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(v);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0 && self.checked > 0
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} p={} checked={} max_deviation={:.3e} tolerance={:.1e} {}",
            self.name,
            self.p,
            self.checked,
            self.max_deviation,
            self.tolerance,
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_and_merges() {
        let mut a = IdentityReport::new("x", 5, 1e-8);
        a.record(1e-12, || unreachable!());
        assert!(a.passed());
        let mut b = IdentityReport::new("x", 5, 1e-8);
        b.record(1.0, || "bad".into());
        b.record(f64::NAN, || "nan".into());
        a.merge(b);
        assert_eq!(a.checked, 3);
        assert_eq!(a.violation_count, 2);
        assert!(a.max_deviation.is_infinite());
        assert!(!a.passed());
        assert!(!IdentityReport::new("empty", 5, 1.0).passed());
    }
}
