//! Family index, precision settings and the crate error type.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("k must be at least 2 (got {0})")]
    InvalidOrder(i64),
    #[error("invalid precision configuration: {0}")]
    InvalidPrecision(String),
    #[error("resultant oracle is capped at k = {cap} (requested k = {k})")]
    OracleCap { k: u32, cap: u32 },
    #[error("(k-1)^2 does not divide the discriminant at k = {0}")]
    InexactDivision(u32),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("no convergence for k = {k} from {z0}: {reason}")]
    NonConvergence { k: u32, z0: String, reason: String },
    #[error("certified bound violated: {0}")]
    BoundViolated(String),
    #[error("index {n} lies below the initial range for k = {k}")]
    IndexOutOfRange { k: u32, n: i64 },
}

/// Order `k >= 2` of the polynomial family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct FamilyIndex(u32);

impl FamilyIndex {
    pub fn new(k: u32) -> Result<Self, Error> {
        if k < 2 {
            return Err(Error::InvalidOrder(k as i64));
        }
        Ok(FamilyIndex(k))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// Degree of the trinomial `g_k`.
    pub fn degree_g(self) -> u32 {
        self.0 + 1
    }
}

impl TryFrom<u32> for FamilyIndex {
    type Error = Error;
    fn try_from(k: u32) -> Result<Self, Error> {
        FamilyIndex::new(k)
    }
}

impl TryFrom<i64> for FamilyIndex {
    type Error = Error;
    fn try_from(k: i64) -> Result<Self, Error> {
        u32::try_from(k).map_err(|_| Error::InvalidOrder(k)).and_then(FamilyIndex::new)
    }
}

impl From<FamilyIndex> for u32 {
    fn from(k: FamilyIndex) -> u32 {
        k.0
    }
}

impl fmt::Display for FamilyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

pub const DEFAULT_BITS: u32 = 128;
pub const DEFAULT_TARGET_RADIUS: f64 = 1e-40;
pub const DEFAULT_MAX_ESCALATIONS: u32 = 3;

/// Working precision, certification radius goal and the number of
/// precision doublings allowed after the first attempt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    pub working_bits: u32,
    pub target_radius: f64,
    pub max_escalations: u32,
}

impl PrecisionConfig {
    pub fn new(working_bits: u32, target_radius: f64, max_escalations: u32) -> Result<Self, Error> {
        if working_bits < 53 {
            return Err(Error::InvalidPrecision(format!("working bits must be >= 53 (got {working_bits})")));
        }
        if !(target_radius > 0.0 && target_radius.is_finite()) {
            return Err(Error::InvalidPrecision(format!("target radius must be positive (got {target_radius})")));
        }
        if max_escalations < 1 {
            return Err(Error::InvalidPrecision("max escalations must be >= 1".into()));
        }
        Ok(PrecisionConfig { working_bits, target_radius, max_escalations })
    }

    pub fn with_bits(self, working_bits: u32) -> Self {
        PrecisionConfig { working_bits, ..self }
    }

    /// Precisions tried in order: the working precision, then doublings.
    pub fn ladder(&self, cap: Option<u32>) -> Vec<u32> {
        let mut out = Vec::new();
        let mut b = self.working_bits;
        for _ in 0..=self.max_escalations {
            let eff = cap.map_or(b, |c| b.min(c));
            if out.last() != Some(&eff) {
                out.push(eff);
            }
            b = b.saturating_mul(2);
        }
        out
    }
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            working_bits: DEFAULT_BITS,
            target_radius: DEFAULT_TARGET_RADIUS,
            max_escalations: DEFAULT_MAX_ESCALATIONS,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_orders() {
        assert!(FamilyIndex::new(1).is_err());
        assert!(FamilyIndex::try_from(-3i64).is_err());
        assert_eq!(FamilyIndex::new(2).unwrap().degree_g(), 3);
    }

    #[test]
    fn precision_validation() {
        assert!(PrecisionConfig::new(52, 1e-40, 3).is_err());
        assert!(PrecisionConfig::new(64, 0.0, 3).is_err());
        assert!(PrecisionConfig::new(64, 1e-10, 0).is_err());
        assert!(PrecisionConfig::new(53, 1e-10, 1).is_ok());
    }

    #[test]
    fn ladder_doubles_and_respects_cap() {
        let p = PrecisionConfig::default();
        assert_eq!(p.ladder(None), vec![128, 256, 512, 1024]);
        assert_eq!(p.ladder(Some(53)), vec![53]);
        let q = PrecisionConfig::new(53, 1e-10, 1).unwrap();
        assert_eq!(q.ladder(None), vec![53, 106]);
    }
}
