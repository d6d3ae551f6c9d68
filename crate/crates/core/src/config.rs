use serde::{Deserialize, Serialize};

/// Numeric knobs shared by every analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    /// Largest number of elements any exhaustive enumeration may visit.
    pub cap: u64,
    /// Slack for comparisons that involve eigenvalues.
    pub tolerance: f64,
    pub seed: u64,
    /// Number of random cochains drawn when a space is too large to enumerate.
    pub samples: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { cap: 1 << 26, tolerance: 1e-9, seed: 0xC0FFEE, samples: 4096 }
    }
}

impl Config {
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn check_cap(&self, log2: usize) -> crate::Result<()> {
        if log2 >= 64 || (1u64 << log2) > self.cap {
            return Err(crate::HdxError::CapExceeded { log2: log2 as u32, cap: self.cap });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = Config::default();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Config>(&s).unwrap(), c);
        assert_eq!(serde_json::from_str::<Config>("{}").unwrap(), c);
    }

    #[test]
    fn cap_check() {
        let c = Config::default().with_cap(16);
        assert!(c.check_cap(4).is_ok());
        assert!(c.check_cap(5).is_err());
        assert!(c.check_cap(70).is_err());
    }
}
