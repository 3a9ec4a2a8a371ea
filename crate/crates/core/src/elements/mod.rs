//! Elements of the full tree shift group `F(A, X, φ) ≅ A^{X*}`.
//!
//! Elements are identified with their portraits. [`TruncatedElement`] holds
//! the portrait on `X^[n]`, which is exactly an element of the depth-`n`
//! quotient; [`FsElement`] is a finite-state wreath recursion. Truncation is
//! the bridge between the two.

pub(crate) mod fs;
mod truncated;

use std::sync::Arc;

use thiserror::Error;

use crate::group::Signature;
use crate::words::{Word, WordError};

pub use fs::{FsElement, FsElementJson, FsStateJson};
pub use truncated::{Block, SupportDescriptor, TrivLevel, TruncatedElement};
pub(crate) use truncated::subtree_indices;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElementError {
    #[error("elements are defined over different signatures")]
    SignatureMismatch,
    #[error("depth mismatch: {0} vs {1}")]
    DepthMismatch(usize, usize),
    #[error("word {word} is too long for a truncation of depth {depth}")]
    WordTooLong { word: Word, depth: usize },
    #[error("need depth at least {needed}, have {have}")]
    TooShallow { needed: usize, have: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCount { expected: usize, got: usize },
    #[error("label {0} is not an element of the label group")]
    LabelOutOfRange(usize),
    #[error("blocks of size 0 are not allowed")]
    EmptyBlock,
    #[error("malformed wreath recursion: {0}")]
    Malformed(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

pub(crate) fn same_signature(a: &Arc<Signature>, b: &Arc<Signature>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Anything with a (possibly truncated) portrait.
pub trait Portrait {
    fn signature(&self) -> &Arc<Signature>;
    /// Deepest level with known labels; `None` for infinite portraits.
    fn known_depth(&self) -> Option<usize>;
    /// The portrait on `X^[n]`, if known that deep.
    fn portrait(&self, n: usize) -> Option<TruncatedElement>;
    fn as_fs(&self) -> Option<&FsElement> {
        None
    }
}

impl Portrait for TruncatedElement {
    fn signature(&self) -> &Arc<Signature> {
        TruncatedElement::signature(self)
    }

    fn known_depth(&self) -> Option<usize> {
        Some(self.depth())
    }

    fn portrait(&self, n: usize) -> Option<TruncatedElement> {
        self.restrict(n).ok()
    }
}

impl Portrait for FsElement {
    fn signature(&self) -> &Arc<Signature> {
        FsElement::signature(self)
    }

    fn known_depth(&self) -> Option<usize> {
        None
    }

    fn portrait(&self, n: usize) -> Option<TruncatedElement> {
        Some(self.truncate(n))
    }

    fn as_fs(&self) -> Option<&FsElement> {
        Some(self)
    }
}
