use std::fmt;

use super::naive::NaiveCounter;
use super::sweep::SweepCounter;
use super::{CountError, TraceGeometry};

/// A strategy for `N_a`, selectable by name.
pub trait LatticeCounter: Send + Sync {
    fn name(&self) -> &'static str;

    fn description(&self) -> &'static str;

    /// Cost guard, if any.
    fn max_trace(&self) -> Option<i64> {
        None
    }

    /// Number of lattice points strictly inside `T_a` (0 unless `κ | a`).
    fn count(&self, geom: &TraceGeometry<'_>, a: i64) -> Result<u64, CountError>;
}

pub struct CounterRegistry {
    counters: Vec<Box<dyn LatticeCounter>>,
}

impl CounterRegistry {
    pub fn empty() -> Self {
        Self { counters: Vec::new() }
    }

    /// Replaces any counter with the same name.
    pub fn register(&mut self, counter: Box<dyn LatticeCounter>) {
        self.counters.retain(|c| c.name() != counter.name());
        self.counters.push(counter);
    }

    pub fn get(&self, name: &str) -> Result<&dyn LatticeCounter, CountError> {
        self.counters
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| CountError::UnknownCounter(name.to_string()))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.counters.iter().map(|c| c.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &dyn LatticeCounter> {
        self.counters.iter().map(|c| c.as_ref())
    }
}

impl Default for CounterRegistry {
    /// `sweep` (the default for series) and `naive`.
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(SweepCounter));
        r.register(Box::new(NaiveCounter));
        r
    }
}

impl fmt::Debug for CounterRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
