use std::collections::HashSet;
use std::sync::Arc;

use super::AnalysisError;
use crate::elements::{same_signature, ElementError, FsElement, TruncatedElement};
use crate::group::Signature;
use crate::par::{self, Execution};
use crate::words::{Alphabet, Word, WordSet};

/// The image `π_n(G)` of a finitely generated group in the quotient of size
/// `n`, enumerated breadth-first. Elements are blocks of size `n`.
#[derive(Debug, Clone)]
pub struct LevelQuotient {
    sig: Arc<Signature>,
    size: usize,
    generators: Vec<TruncatedElement>,
    elements: Vec<TruncatedElement>,
    complete: bool,
}

impl LevelQuotient {
    pub fn enumerate(
        sig: Arc<Signature>,
        gens: &[FsElement],
        size: usize,
        cap: usize,
        exec: Execution,
    ) -> Result<Self, AnalysisError> {
        if size == 0 {
            return Err(ElementError::EmptyBlock.into());
        }
        let truncs = gens.iter().map(|g| g.truncate(size - 1)).collect();
        Self::from_truncations(sig, size, truncs, cap, exec)
    }

    /// Closes `gens` under multiplication. With more than `cap` elements the
    /// result is marked incomplete and holds the first `cap` found.
    pub fn from_truncations(
        sig: Arc<Signature>,
        size: usize,
        gens: Vec<TruncatedElement>,
        cap: usize,
        exec: Execution,
    ) -> Result<Self, AnalysisError> {
        if size == 0 {
            return Err(ElementError::EmptyBlock.into());
        }
        if cap == 0 {
            return Err(AnalysisError::Precondition("cap must be at least 1".into()));
        }
        for g in &gens {
            if !same_signature(&sig, g.signature()) {
                return Err(ElementError::SignatureMismatch.into());
            }
            if g.depth() != size - 1 {
                return Err(ElementError::DepthMismatch(g.depth(), size - 1).into());
            }
        }
        let id = TruncatedElement::identity(sig.clone(), size - 1);
        let mut seen: HashSet<TruncatedElement> = HashSet::from([id.clone()]);
        let mut frontier = vec![id];
        let mut complete = true;
        'bfs: while !frontier.is_empty() && !gens.is_empty() {
            let products = par::map(exec, &frontier, |f| {
                gens.iter().map(|g| f.mul_unchecked(g)).collect::<Vec<_>>()
            });
            let mut next = Vec::new();
            for p in products.into_iter().flatten() {
                if seen.contains(&p) {
                    continue;
                }
                if seen.len() >= cap {
                    complete = false;
                    break 'bfs;
                }
                seen.insert(p.clone());
                next.push(p);
            }
            frontier = next;
        }
        let mut elements: Vec<_> = seen.into_iter().collect();
        elements.sort();
        Ok(LevelQuotient {
            sig,
            size,
            generators: gens,
            elements,
            complete,
        })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Depth of the truncations, `size - 1`.
    pub fn depth(&self) -> usize {
        self.size - 1
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Sorted elements.
    pub fn elements(&self) -> &[TruncatedElement] {
        &self.elements
    }

    pub fn generators(&self) -> &[TruncatedElement] {
        &self.generators
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn require_complete(&self) -> Result<(), AnalysisError> {
        if self.complete {
            Ok(())
        } else {
            Err(AnalysisError::Incomplete {
                size: self.size,
                found: self.elements.len(),
            })
        }
    }

    pub fn contains(&self, g: &TruncatedElement) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    /// `Triv(n) ∩ π`.
    pub fn triv_subset(&self, n: usize) -> Vec<&TruncatedElement> {
        self.elements.iter().filter(|g| g.triv_level().at_least(n)).collect()
    }

    /// `Stab(n) ∩ π`, for `n <= size`.
    pub fn stab_subset(&self, n: usize) -> Vec<&TruncatedElement> {
        self.elements
            .iter()
            .filter(|g| g.stab_test(n).unwrap_or(false))
            .collect()
    }

    /// Image under restriction to a smaller size.
    pub fn restrict(&self, size: usize) -> Result<LevelQuotient, AnalysisError> {
        self.require_complete()?;
        if size == 0 || size > self.size {
            return Err(AnalysisError::Precondition(format!(
                "cannot restrict size {} to {size}",
                self.size
            )));
        }
        let mut elements: Vec<_> = self
            .elements
            .iter()
            .map(|g| g.restrict(size - 1).expect("shallower"))
            .collect();
        elements.sort();
        elements.dedup();
        Ok(LevelQuotient {
            sig: self.sig.clone(),
            size,
            generators: self.generators.iter().map(|g| g.restrict(size - 1).expect("shallower")).collect(),
            elements,
            complete: true,
        })
    }
}

/// Whether the quotient acts transitively on every level it sees.
pub fn is_level_transitive(q: &LevelQuotient) -> Result<bool, AnalysisError> {
    q.require_complete()?;
    let alphabet: Alphabet = q.signature().alphabet();
    for m in 1..=q.size() {
        let level = crate::words::enumerate_words(alphabet, m, WordSet::Level);
        let start = Word::repeat(0, m);
        let mut orbit: HashSet<Word> = HashSet::new();
        for g in q.elements() {
            orbit.insert(g.act(&start)?);
        }
        if orbit.len() != level.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::LevelChain;
    use crate::presets;

    #[test]
    fn bfs_agrees_with_chain() {
        let (sig, gens) = presets::grigorchuk();
        for n in 1..=4 {
            let q = LevelQuotient::enumerate(sig.clone(), &gens, n, 1 << 20, Execution::default()).unwrap();
            let chain = LevelChain::from_generators(sig.clone(), &gens, n).unwrap();
            assert_eq!(q.order() as u128, chain.order());
            assert!(q.elements().iter().all(|g| chain.contains(g)));
        }
    }

    #[test]
    fn cap_marks_incomplete() {
        let (sig, gens) = presets::grigorchuk();
        let q = LevelQuotient::enumerate(sig, &gens, 4, 10, Execution::Sequential).unwrap();
        assert!(!q.is_complete());
        assert_eq!(q.order(), 10);
        assert!(is_level_transitive(&q).is_err());
    }

    #[test]
    fn transitivity() {
        let (sig, gens) = presets::odometer();
        let q = LevelQuotient::enumerate(sig, &gens, 4, 100, Execution::Sequential).unwrap();
        assert!(is_level_transitive(&q).unwrap());
        let t = presets::trivial_spec(2);
        let q = LevelQuotient::enumerate(t.signature, &[], 2, 100, Execution::Sequential).unwrap();
        assert_eq!(q.order(), 1);
        assert!(!is_level_transitive(&q).unwrap());
    }
}
