//! Tensor-product structure of a composite Hilbert space.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the total Hilbert dimension.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Ordered list of subsystem dimensions with a name per slot.
///
/// Slot order defines the Kronecker ordering: slot 0 is the most
/// significant index of the composite basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpace {
    dims: Vec<usize>,
    labels: Vec<String>,
    max_dim: usize,
}

impl HilbertSpace {
    pub fn new<S: Into<String>>(
        dims: impl IntoIterator<Item = usize>,
        labels: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        Self::with_max_dim(dims, labels, DEFAULT_MAX_DIM)
    }

    pub fn with_max_dim<S: Into<String>>(
        dims: impl IntoIterator<Item = usize>,
        labels: impl IntoIterator<Item = S>,
        max_dim: usize,
    ) -> Result<Self> {
        let dims: Vec<usize> = dims.into_iter().collect();
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if dims.is_empty() {
            return Err(Error::Argument("a Hilbert space needs at least one slot".into()));
        }
        if dims.len() != labels.len() {
            return Err(Error::Argument(format!(
                "{} dimensions but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if let Some(slot) = dims.iter().position(|&d| d == 0) {
            return Err(Error::Argument(format!("slot {slot} has dimension 0")));
        }
        let mut total: usize = 1;
        for &d in &dims {
            total = total
                .checked_mul(d)
                .filter(|&t| t <= max_dim)
                .ok_or(Error::Sizing {
                    dim: total.saturating_mul(d),
                    max: max_dim,
                })?;
        }
        Ok(Self {
            dims,
            labels,
            max_dim,
        })
    }

    /// Space with generated labels `s0, s1, ...`.
    pub fn from_dims(dims: impl IntoIterator<Item = usize>) -> Result<Self> {
        let dims: Vec<usize> = dims.into_iter().collect();
        let labels: Vec<String> = (0..dims.len()).map(|i| format!("s{i}")).collect();
        Self::new(dims, labels)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_slots(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self, slot: usize) -> usize {
        self.dims[slot]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn slot_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Subspace made of the given slots, in the given order.
    pub fn subspace(&self, slots: &[usize]) -> Result<Self> {
        self.check_slots(slots)?;
        Self::with_max_dim(
            slots.iter().map(|&s| self.dims[s]),
            slots.iter().map(|&s| self.labels[s].clone()),
            self.max_dim,
        )
    }

    pub(crate) fn check_slots(&self, slots: &[usize]) -> Result<()> {
        if slots.is_empty() {
            return Err(Error::Argument("empty slot set".into()));
        }
        for (i, &s) in slots.iter().enumerate() {
            if s >= self.dims.len() {
                return Err(Error::Argument(format!(
                    "slot {s} out of range for a {}-slot space",
                    self.dims.len()
                )));
            }
            if slots[..i].contains(&s) {
                return Err(Error::Argument(format!("slot {s} listed twice")));
            }
        }
        Ok(())
    }
}
