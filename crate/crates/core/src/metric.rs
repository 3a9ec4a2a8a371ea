//! The configuration metric `d(f, g) = 2^-n`, where `n` is the least depth
//! at which the portraits differ.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use crate::elements::{same_signature, ElementError, Portrait};
use crate::words::level_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Zero,
    /// Exactly `2^-n`.
    Exact(usize),
    /// No difference found through depth `n - 1`, so at most `2^-n`.
    AtMost(usize),
}

impl Distance {
    /// The value, or its upper bound.
    pub fn bound(self) -> f64 {
        match self {
            Distance::Zero => 0.0,
            Distance::Exact(n) | Distance::AtMost(n) => 0.5f64.powi(n as i32),
        }
    }

    /// Compares upper bounds; `AtMost(n)` sorts with `Exact(n)`.
    pub fn cmp_bound(self, other: Distance) -> Ordering {
        self.bound().total_cmp(&other.bound())
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Zero => f.write_str("0"),
            Distance::Exact(n) => write!(f, "2^-{n}"),
            Distance::AtMost(n) => write!(f, "<= 2^-{n}"),
        }
    }
}

/// Distance between two portraits, looking no deeper than `max_depth`.
pub fn distance<F: Portrait + ?Sized, G: Portrait + ?Sized>(
    f: &F,
    g: &G,
    max_depth: usize,
) -> Result<Distance, ElementError> {
    if !same_signature(f.signature(), g.signature()) {
        return Err(ElementError::SignatureMismatch);
    }
    let known = match (f.known_depth(), g.known_depth()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let depth = known.map_or(max_depth, |d| d.min(max_depth));
    let (pf, pg) = match (f.portrait(depth), g.portrait(depth)) {
        (Some(a), Some(b)) => (a, b),
        _ => unreachable!("depth is within both portraits"),
    };
    let k = f.signature().arity();
    if let Some(i) = pf.labels().iter().zip(pg.labels()).position(|(a, b)| a != b) {
        return Ok(Distance::Exact(level_of(k, i)));
    }
    // both portraits fully compared
    let whole = match (f.known_depth(), g.known_depth()) {
        (Some(a), Some(b)) => a == b && a <= max_depth,
        (None, None) => matches!((f.as_fs(), g.as_fs()), (Some(a), Some(b)) if a == b),
        _ => false,
    };
    Ok(if whole { Distance::Zero } else { Distance::AtMost(depth + 1) })
}
