//! Finite patterns: labels on a finite nonempty set of words.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::elements::{same_signature, Block, ElementError, Portrait, TruncatedElement};
use crate::group::{Label, Signature};
use crate::words::{below_len, Word};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    sig: Arc<Signature>,
    labels: BTreeMap<Word, Label>,
}

impl Pattern {
    pub fn new(sig: Arc<Signature>, labels: BTreeMap<Word, Label>) -> Result<Self, ElementError> {
        if labels.is_empty() {
            return Err(ElementError::EmptyBlock);
        }
        for (w, &a) in &labels {
            sig.alphabet().check(w)?;
            if a as usize >= sig.group().order() {
                return Err(ElementError::LabelOutOfRange(a as usize));
            }
        }
        Ok(Pattern { sig, labels })
    }

    pub fn from_block(b: &Block) -> Self {
        let k = b.signature().arity();
        let labels = b
            .labels()
            .iter()
            .enumerate()
            .map(|(i, &a)| (Word::from_vertex_index(k, i), a))
            .collect();
        Pattern {
            sig: b.signature().clone(),
            labels,
        }
    }

    pub fn domain(&self) -> impl Iterator<Item = &Word> {
        self.labels.keys()
    }

    pub fn labels(&self) -> &BTreeMap<Word, Label> {
        &self.labels
    }

    /// `Some(n)` when the domain is exactly `X^(n)`.
    pub fn block_size(&self) -> Option<usize> {
        let k = self.sig.arity();
        let n = self.labels.keys().map(Word::len).max()? + 1;
        (self.labels.len() == below_len(k, n)).then_some(n)
    }

    pub fn to_block(&self) -> Option<Block> {
        let n = self.block_size()?;
        let labels = self.labels.values().copied().collect();
        TruncatedElement::from_labels(self.sig.clone(), n - 1, labels).ok()
    }

    /// Whether `(σ_w f)_(u) = p(u)` on the whole domain.
    pub fn appears_at<P: Portrait + ?Sized>(&self, f: &P, w: &Word) -> Result<bool, ElementError> {
        if !same_signature(&self.sig, f.signature()) {
            return Err(ElementError::SignatureMismatch);
        }
        let deepest = self.labels.keys().map(Word::len).max().unwrap_or(0) + w.len();
        let portrait = f.portrait(deepest).ok_or(ElementError::TooShallow {
            needed: deepest,
            have: f.known_depth().unwrap_or(0),
        })?;
        Ok(self
            .labels
            .iter()
            .all(|(u, &a)| portrait.label(&w.concat(u)) == Some(a)))
    }
}
