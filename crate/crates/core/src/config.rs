//! Caps, tolerances and the run configuration shared by the modules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size caps for the combinatorial and spectral constructions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Largest base-interval rank the chain will build.
    pub interval_rank: usize,
    /// Largest Cayley-ball radius (2 * 3^R - 1 nodes).
    pub ball_radius: usize,
    /// Largest radius for adjacency operators and eigen sweeps.
    pub spectral_radius: usize,
    /// Ambient-dimension bound for graded subspace models.
    pub ambient_dim: usize,
    /// Coordinate bound for the product-measure model (2^n atoms).
    pub measure_coords: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            interval_rank: 14,
            ball_radius: 14,
            spectral_radius: 12,
            ambient_dim: 4096,
            measure_coords: 12,
        }
    }
}

/// The tolerance ladder: one order of magnitude of slack per layer of
/// composition (frame construction, relation tests, decomposition
/// residuals).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub construction: f64,
    pub relation: f64,
    pub decomposition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            construction: 1e-10,
            relation: 1e-9,
            decomposition: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Config {
    pub caps: Caps,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if !(t.construction > 0.0 && t.relation > 0.0 && t.decomposition > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if !(t.construction <= t.relation && t.relation <= t.decomposition) {
            return Err(Error::Config(
                "tolerances must be ordered construction <= relation <= decomposition".into(),
            ));
        }
        let c = &self.caps;
        if c.interval_rank == 0
            || c.ball_radius == 0
            || c.spectral_radius == 0
            || c.ambient_dim == 0
            || c.measure_coords == 0
        {
            return Err(Error::Config("caps must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn unordered_tolerances_rejected() {
        let mut cfg = Config::default();
        cfg.tolerances.relation = 1e-12;
        assert!(cfg.validate().is_err());
    }
}
