//! Degree filters for truncated models.
//!
//! A truncated model (polynomials mod `t^N`, a truncated Weyl algebra) only
//! imitates the infinite-dimensional algebra on inputs whose full evaluation
//! never reaches the cutoff. An [`InputFilter`] restricts a check to basis
//! tuples whose degrees stay under a bound.

use std::fmt;

use crate::cochain::Cochain;
use crate::error::{Error, Result};

/// Bounds on the degrees of a tuple of basis inputs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegreeBound {
    /// Every input has degree at most this.
    pub max_each: Option<u32>,
    /// Input degrees sum to at most this.
    pub max_total: Option<u32>,
}

impl DegreeBound {
    pub fn each(max: u32) -> Self {
        DegreeBound {
            max_each: Some(max),
            max_total: None,
        }
    }

    pub fn total(max: u32) -> Self {
        DegreeBound {
            max_each: None,
            max_total: Some(max),
        }
    }
}

impl fmt::Display for DegreeBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.max_each, self.max_total) {
            (None, None) => f.write_str("unrestricted"),
            (Some(e), None) => write!(f, "each input degree <= {e}"),
            (None, Some(t)) => write!(f, "total input degree <= {t}"),
            (Some(e), Some(t)) => write!(f, "each input degree <= {e}, total <= {t}"),
        }
    }
}

/// A [`DegreeBound`] together with the degrees of the input space's basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputFilter {
    degrees: Vec<u32>,
    bound: DegreeBound,
}

impl InputFilter {
    pub fn new(degrees: Vec<u32>, bound: DegreeBound) -> Self {
        InputFilter { degrees, bound }
    }

    /// Builds a filter from optional degrees, failing when a bound is asked
    /// for but the space carries no degrees.
    pub fn from_parts(degrees: Option<&[u32]>, bound: DegreeBound, space: &'static str) -> Result<Option<Self>> {
        if bound == DegreeBound::default() {
            return Ok(None);
        }
        let degrees = degrees.ok_or(Error::MissingDegrees(space))?;
        Ok(Some(InputFilter::new(degrees.to_vec(), bound)))
    }

    pub fn bound(&self) -> DegreeBound {
        self.bound
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Whether the tuple of local basis indices passes the bound.
    pub fn accepts(&self, inputs: &[usize]) -> bool {
        let mut total = 0u32;
        for &i in inputs {
            let d = self.degrees[i];
            if self.bound.max_each.is_some_and(|m| d > m) {
                return false;
            }
            total += d;
        }
        self.bound.max_total.is_none_or(|m| total <= m)
    }

    pub(crate) fn check_space(&self, dim: usize, space: &str) -> Result<()> {
        if self.degrees.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "filter has {} degrees but the {space} space has dimension {dim}",
                self.degrees.len()
            )));
        }
        Ok(())
    }
}

pub(crate) fn accepts(filter: Option<&InputFilter>, inputs: &[usize]) -> bool {
    filter.is_none_or(|f| f.accepts(inputs))
}

/// Zeroes every entry of `c` whose inputs are not all in
/// `offset..offset + dim` or whose local input tuple fails the filter.
pub(crate) fn mask(c: &Cochain, offset: usize, dim: usize, filter: Option<&InputFilter>) -> Cochain {
    let mut out = Cochain::zero(c.dim(), c.arity()).expect("arity >= 1");
    let mut local = Vec::with_capacity(c.arity());
    for (idx, v) in c.nonzero_entries() {
        local.clear();
        let inside = idx[1..].iter().all(|&i| {
            let ok = i >= offset && i < offset + dim;
            if ok {
                local.push(i - offset);
            }
            ok
        });
        if inside && accepts(filter, &local) {
            out.set(idx[0], &idx[1..], v.clone());
        }
    }
    out
}
