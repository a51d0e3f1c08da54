use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A genome with its cached objective value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub genome: Vec<f64>,
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(genome: Vec<f64>) -> Self {
        Self {
            genome,
            fitness: None,
        }
    }

    pub fn evaluated(genome: Vec<f64>, fitness: f64) -> Self {
        Self {
            genome,
            fitness: Some(fitness),
        }
    }

    pub fn fitness(&self) -> Result<f64> {
        self.fitness.ok_or(Error::Unevaluated)
    }

    pub fn dim(&self) -> usize {
        self.genome.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: u64,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Self {
            members,
            generation: 0,
        }
    }

    /// Unevaluated population from raw genomes.
    pub fn from_genomes<I>(genomes: I) -> Self
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        Self::new(genomes.into_iter().map(Individual::new).collect())
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Dimension of the genomes (0 for an empty population).
    pub fn dim(&self) -> usize {
        self.members.first().map_or(0, Individual::dim)
    }

    pub fn genomes(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.members.iter().map(|m| m.genome.as_slice())
    }

    /// Index of the fittest evaluated member; ties go to the lowest index.
    pub fn best_index(&self) -> Option<usize> {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, m)| m.fitness.map(|f| (i, f)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i)
    }

    pub fn best(&self) -> Option<&Individual> {
        self.best_index().map(|i| &self.members[i])
    }

    /// Per-dimension minimum and maximum over the members.
    pub fn extent(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for g in self.genomes() {
            for j in 0..d {
                lo[j] = lo[j].min(g[j]);
                hi[j] = hi[j].max(g[j]);
            }
        }
        (lo, hi)
    }

    /// Stable ascending sort by fitness. Every member must be evaluated.
    pub fn sort_by_fitness(&mut self) -> Result<()> {
        if self.members.iter().any(|m| m.fitness.is_none()) {
            return Err(Error::Unevaluated);
        }
        self.members
            .sort_by(|a, b| a.fitness.unwrap().total_cmp(&b.fitness.unwrap()));
        Ok(())
    }
}
