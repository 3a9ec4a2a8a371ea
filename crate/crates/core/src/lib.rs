//! Exact computation with self-similar groups of labelled rooted trees.
//!
//! Elements of the full tree shift group `F(A, X, φ) = A^{X*}` are handled
//! as depth-truncated portraits and as finite-state wreath recursions. On
//! top of that the crate provides tree automata, shifts of finite type, level
//! quotients and the certificates relating them.

pub mod analysis;
pub mod automata;
pub mod elements;
pub mod group;
pub mod metric;
pub mod par;
pub mod pattern;
pub mod presets;
pub mod report;
pub mod shifts;
pub mod words;

pub use elements::{Block, ElementError, FsElement, Portrait, TrivLevel, TruncatedElement};
pub use group::{Action, Label, LabelGroup, Signature};
pub use metric::{distance, Distance};
pub use par::Execution;
pub use pattern::Pattern;
pub use words::{enumerate_words, Alphabet, Letter, Word, WordSet};
