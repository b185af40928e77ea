use std::path::PathBuf;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use conormal_core::conormal::{Conormal, SaturationConfig};
use conormal_core::exactalg::{Field, FieldConfig, DEFAULT_PRIME, DEFAULT_RETRY_PRIMES};
use conormal_core::varieties::{EmbeddedVariety, VarietySpec, DEFAULT_RETRY_BUDGET};

use crate::{CliError, DiskCache};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub prime: u64,
    pub retry_primes: Vec<u64>,
    pub k_max: u32,
    pub window: u32,
    pub m_cap: u32,
    pub retry_budget: u32,
    pub seed: u64,
    pub jobs: usize,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prime: DEFAULT_PRIME,
            retry_primes: DEFAULT_RETRY_PRIMES.to_vec(),
            k_max: 6,
            window: 2,
            m_cap: 6,
            retry_budget: DEFAULT_RETRY_BUDGET,
            seed: 0,
            jobs: 1,
            cache_dir: None,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        FieldConfig { prime: self.prime, retry_primes: self.retry_primes.clone() }.validate()?;
        for (name, v) in [
            ("kmax", self.k_max as usize),
            ("window", self.window as usize),
            ("mcap", self.m_cap as usize),
            ("retry budget", self.retry_budget as usize),
            ("jobs", self.jobs),
        ] {
            if v == 0 {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    pub fn saturation(&self) -> SaturationConfig {
        SaturationConfig {
            window: self.window,
            m_cap: self.m_cap,
            seed: self.seed,
            confirm_primes: self.retry_primes.clone(),
            retry_budget: self.retry_budget,
        }
    }
}

/// A validated configuration with its field and optional cache.
pub struct Session {
    pub cfg: RunConfig,
    pub field: Field,
    pub cache: Option<Arc<DiskCache>>,
}

impl Session {
    pub fn new(cfg: RunConfig) -> Result<Self, CliError> {
        cfg.validate()?;
        let cache = match &cfg.cache_dir {
            Some(dir) => Some(Arc::new(DiskCache::open(dir)?)),
            None => None,
        };
        Ok(Session { field: Field::new(cfg.prime), cfg, cache })
    }

    pub fn build(&self, spec: &VarietySpec) -> Result<EmbeddedVariety, CliError> {
        Ok(spec.build(&self.field, self.cfg.retry_budget)?)
    }

    pub fn engine(&self, x: EmbeddedVariety) -> Result<Conormal, CliError> {
        let mut c = Conormal::new(Arc::new(x), self.cfg.saturation())?;
        if let Some(cache) = &self.cache {
            c = c.with_store(cache.clone());
        }
        Ok(c)
    }
}
