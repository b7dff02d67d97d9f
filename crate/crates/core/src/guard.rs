//! Resource guards. Exceeding one is an error, never a panic or an OOM.

use num_bigint::BigInt;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_DEGREE_LOG2: u32 = 14;
pub const DEFAULT_MAX_TREES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest permitted polynomial degree, as a power of two.
    pub max_degree_log2: u32,
    /// Largest permitted number of explicitly enumerated trees.
    pub max_trees: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_degree_log2: DEFAULT_MAX_DEGREE_LOG2, max_trees: DEFAULT_MAX_TREES }
    }
}

impl Limits {
    pub fn unbounded() -> Self {
        Limits { max_degree_log2: u32::MAX, max_trees: u64::MAX }
    }

    pub fn check_degree_log2(&self, degree_log2: u32) -> Result<()> {
        if degree_log2 > self.max_degree_log2 {
            return Err(Error::DegreeGuard { requested_log2: degree_log2, limit_log2: self.max_degree_log2 });
        }
        Ok(())
    }

    /// `p_n` has degree `2^(n+1)`.
    pub fn check_level(&self, n: u32) -> Result<()> {
        self.check_degree_log2(n.saturating_add(1))
    }

    pub fn check_trees(&self, count: &BigInt) -> Result<()> {
        if *count > BigInt::from(self.max_trees) {
            return Err(Error::EnumerationGuard { requested: count.to_string(), limit: self.max_trees });
        }
        Ok(())
    }
}
