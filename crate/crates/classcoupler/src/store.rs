//! Immutable, time-indexed storage for the random deviates a backward run
//! consumes.
//!
//! Extending the backward horizon must reuse the deviates of every earlier
//! attempt, and the same record may be read again during forward passes. The
//! store guarantees both: each record is generated exactly once, from a
//! stream keyed by `(seed, t)` alone, so the record a caller sees is
//! independent of the order in which records were first requested.

use crate::error::{Error, Result};
use crate::stream::{ReplayStream, TimeIndex};

/// Deviates for one backward step: the material for the candidate proposed at
/// time `-t+1` plus the shared acceptance uniform for the transition
/// `-t -> -t+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviateRecord<P = Vec<f64>> {
    /// Realized candidate deviates (typed values, not raw uniforms).
    pub candidate: P,
    /// Acceptance uniform on `[0, 1)`, drawn after the candidate deviates.
    pub accept_u: f64,
}

/// Append-only map from backward time index to [`DeviateRecord`].
#[derive(Debug, Clone)]
pub struct DeviateStore<P = Vec<f64>> {
    seed: u64,
    slots: Vec<Option<DeviateRecord<P>>>,
    generated: usize,
}

impl<P: Clone> DeviateStore<P> {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            slots: Vec::new(),
            generated: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of records generated so far.
    pub fn len(&self) -> usize {
        self.generated
    }

    pub fn is_empty(&self) -> bool {
        self.generated == 0
    }

    /// Drop all records and adopt a new seed.
    pub fn reset(&mut self, seed: u64) {
        self.seed = seed;
        self.slots.clear();
        self.generated = 0;
    }

    /// Record at `t` if it has been generated.
    pub fn get(&self, t: TimeIndex) -> Option<&DeviateRecord<P>> {
        self.slots.get(t as usize).and_then(Option::as_ref)
    }

    /// Return the record at `t`, generating and freezing it on first access.
    ///
    /// `recipe` draws the candidate deviates from the record's dedicated
    /// stream; the acceptance uniform is drawn immediately after. Records are
    /// immutable once written, and the value is a function of `(seed, t,
    /// recipe)` only, never of access order.
    pub fn get_or_generate<F>(&mut self, t: TimeIndex, recipe: F) -> &DeviateRecord<P>
    where
        F: FnOnce(&mut ReplayStream) -> P,
    {
        assert!(t >= 1, "deviate records are indexed from t = 1");
        let idx = t as usize;
        if self.slots.len() <= idx {
            self.slots.resize(idx + 1, None);
        }
        if self.slots[idx].is_none() {
            let mut stream = ReplayStream::for_record(self.seed, t);
            let candidate = recipe(&mut stream);
            let accept_u = stream.uniform01();
            self.slots[idx] = Some(DeviateRecord {
                candidate,
                accept_u,
            });
            self.generated += 1;
        }
        self.slots[idx].as_ref().expect("just generated")
    }

    #[cfg(test)]
    pub(crate) fn insert_for_test(&mut self, t: TimeIndex, record: DeviateRecord<P>) {
        let idx = t as usize;
        if self.slots.len() <= idx {
            self.slots.resize(idx + 1, None);
        }
        if self.slots[idx].is_none() {
            self.generated += 1;
        }
        self.slots[idx] = Some(record);
    }
}

impl DeviateStore<Vec<f64>> {
    /// [`Self::get_or_generate`] with an arity check against the stored record.
    ///
    /// A caller that expects a different number of candidate deviates than
    /// the record holds is mixing models over one store; that is a contract
    /// violation, reported rather than silently re-read.
    pub fn get_or_generate_checked<F>(
        &mut self,
        t: TimeIndex,
        arity: usize,
        recipe: F,
    ) -> Result<&DeviateRecord<Vec<f64>>>
    where
        F: FnOnce(&mut ReplayStream) -> Vec<f64>,
    {
        // Split borrow: generate first, then validate.
        let seed = self.seed;
        let idx = t as usize;
        let needs_generation = self.get(t).is_none();
        if needs_generation {
            assert!(t >= 1, "deviate records are indexed from t = 1");
            if self.slots.len() <= idx {
                self.slots.resize(idx + 1, None);
            }
            let mut stream = ReplayStream::for_record(seed, t);
            let candidate = recipe(&mut stream);
            let accept_u = stream.uniform01();
            self.slots[idx] = Some(DeviateRecord {
                candidate,
                accept_u,
            });
            self.generated += 1;
        }
        let record = self.slots[idx].as_ref().expect("generated above");
        if record.candidate.len() != arity {
            return Err(Error::ArityMismatch {
                t,
                stored: record.candidate.len(),
                expected: arity,
            });
        }
        Ok(record)
    }
}
