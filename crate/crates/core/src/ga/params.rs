use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CrossoverKind {
    /// Rounded-up mean of both parents with per-gene zeroing mutation.
    Mean,
    /// Shared genes averaged, the rest inherited with probability one half.
    Coin,
}

impl CrossoverKind {
    pub fn from_index(k: u32) -> Result<Self> {
        match k {
            1 => Ok(CrossoverKind::Mean),
            2 => Ok(CrossoverKind::Coin),
            _ => Err(Error::InvalidParams(format!(
                "crossover kind must be 1 or 2, got {k}"
            ))),
        }
    }

    pub fn index(self) -> u32 {
        match self {
            CrossoverKind::Mean => 1,
            CrossoverKind::Coin => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    pub population_size: usize,
    pub generations: u64,
    /// Per-gene zeroing probability, also the chance of a standalone mutation.
    pub mutation_rate: f64,
    /// Generations without best-fitness improvement before a restart.
    pub restart_patience: u64,
    /// Constructions drawn at initialization and at each restart.
    pub construction_pool: usize,
    pub crossover: CrossoverKind,
    /// Members kept across a restart.
    pub restart_elites: usize,
    pub seed: u64,
}

impl GaParams {
    /// Defaults scaled by the number of packing patterns `r`.
    pub fn defaults(r: usize, seed: u64) -> Self {
        let r = r.max(1) as u64;
        let generations = 1000 * r;
        GaParams {
            population_size: 25,
            generations,
            mutation_rate: 0.05,
            restart_patience: (generations as f64 * 0.2).ceil() as u64,
            construction_pool: 100 * r as usize,
            crossover: CrossoverKind::Mean,
            restart_elites: 5,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.into()));
        if self.population_size < 2 {
            return bad("population size must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return bad("mutation rate must lie in [0, 1]");
        }
        if self.restart_elites >= self.population_size {
            return bad("restart elites must be fewer than the population size");
        }
        if self.construction_pool == 0 {
            return bad("construction pool must be at least 1");
        }
        Ok(())
    }
}
