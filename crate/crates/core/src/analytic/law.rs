//! Exact finite discrete laws.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{to_f64, Rat};

/// The exact law of a discrete random value: strictly increasing atom values
/// with positive rational probabilities summing to exactly one.
///
/// Construction merges duplicate values and drops zero-probability atoms, so
/// laws built along different algebraic routes compare equal with `==`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldLaw {
    atoms: Vec<(Rat, Rat)>,
}

impl FieldLaw {
    /// Builds a law from (value, probability) pairs in any order.
    pub fn from_atoms(mut atoms: Vec<(Rat, Rat)>) -> Result<Self> {
        atoms.retain(|(_, p)| !p.is_zero());
        if atoms.iter().any(|(_, p)| p.is_negative()) {
            return Err(Error::InvalidParameter {
                name: "probability",
                requirement: "nonnegative",
                value: "negative atom probability".into(),
            });
        }
        atoms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Rat, Rat)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some((last_v, last_p)) if *last_v == v => *last_p += p,
                _ => merged.push((v, p)),
            }
        }
        let total: Rat = merged.iter().map(|(_, p)| p.clone()).sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter {
                name: "law",
                requirement: "probabilities summing to exactly 1",
                value: total.to_string(),
            });
        }
        Ok(FieldLaw { atoms: merged })
    }

    /// The law concentrated at a single value.
    pub fn degenerate(value: Rat) -> Self {
        FieldLaw {
            atoms: vec![(value, Rat::one())],
        }
    }

    pub fn atoms(&self) -> &[(Rat, Rat)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Probability carried by exactly this value.
    pub fn prob_of(&self, value: &Rat) -> Rat {
        self.atoms
            .binary_search_by(|(v, _)| v.cmp(value))
            .map(|idx| self.atoms[idx].1.clone())
            .unwrap_or_else(|_| Rat::zero())
    }

    pub fn mean(&self) -> Rat {
        self.atoms.iter().map(|(v, p)| v * p).sum()
    }

    pub fn variance(&self) -> Rat {
        let mean = self.mean();
        let second: Rat = self.atoms.iter().map(|(v, p)| v * v * p).sum();
        second - &mean * &mean
    }

    /// Atom pairs as doubles, for export.
    pub fn to_f64_atoms(&self) -> Vec<(f64, f64)> {
        self.atoms
            .iter()
            .map(|(v, p)| (to_f64(v), to_f64(p)))
            .collect()
    }
}
