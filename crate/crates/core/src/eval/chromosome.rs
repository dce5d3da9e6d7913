use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::patterns::{PatternId, PatternSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gene {
    pub pattern: PatternId,
    pub freq: u32,
}

/// Ordered (pattern, frequency) genes. Order matters only to the decoder.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Chromosome {
    pub genes: Vec<Gene>,
}

impl Chromosome {
    pub fn new(genes: Vec<Gene>) -> Self {
        Chromosome { genes }
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        Chromosome {
            genes: pairs
                .into_iter()
                .map(|(p, f)| Gene {
                    pattern: PatternId(p),
                    freq: f,
                })
                .collect(),
        }
    }

    pub fn gene_count(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    pub fn position(&self, id: PatternId) -> Option<usize> {
        self.genes.iter().position(|g| g.pattern == id)
    }

    pub fn freq(&self, id: PatternId) -> u32 {
        self.position(id).map_or(0, |i| self.genes[i].freq)
    }

    pub fn contains(&self, id: PatternId) -> bool {
        self.position(id).is_some()
    }

    /// Sets the frequency of `id`, appending a gene when absent.
    pub fn set_freq(&mut self, id: PatternId, freq: u32) {
        match self.position(id) {
            Some(i) => self.genes[i].freq = freq,
            None => self.genes.push(Gene { pattern: id, freq }),
        }
    }

    /// Drops zero-frequency genes, keeping the order of the rest.
    pub fn strip_zeros(&mut self) {
        self.genes.retain(|g| g.freq > 0);
    }

    /// Order-independent identity: genes sorted by pattern id.
    pub fn multiset_key(&self) -> Vec<(u32, u32)> {
        let mut k: Vec<(u32, u32)> = self.genes.iter().map(|g| (g.pattern.0, g.freq)).collect();
        k.sort_unstable();
        k
    }

    pub fn same_multiset(&self, other: &Chromosome) -> bool {
        self.multiset_key() == other.multiset_key()
    }

    /// Checks ids are known, unique and frequencies positive.
    pub fn check(&self, pats: &PatternSet) -> Result<()> {
        let mut seen = HashSet::new();
        for g in &self.genes {
            if pats.get(g.pattern).is_none() {
                return Err(Error::UnknownPattern(g.pattern));
            }
            if !seen.insert(g.pattern) {
                return Err(Error::Domain(format!(
                    "pattern {} appears twice in the chromosome",
                    g.pattern
                )));
            }
            if g.freq == 0 {
                return Err(Error::Domain(format!(
                    "pattern {} has frequency zero",
                    g.pattern
                )));
            }
        }
        Ok(())
    }

    pub fn to_pairs(&self) -> Vec<[u32; 2]> {
        self.genes.iter().map(|g| [g.pattern.0, g.freq]).collect()
    }
}

impl Serialize for Chromosome {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Chromosome {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[u32; 2]>::deserialize(d)?;
        Ok(Chromosome::from_pairs(
            pairs.into_iter().map(|[p, f]| (p, f)),
        ))
    }
}
