use std::collections::BTreeSet;

use super::{AutomatonError, GraftCondition, UnrestrictedRabinAutomaton};
use crate::elements::{subtree_indices, Block, ElementError, FsElement, TruncatedElement};
use crate::par::{self, Execution};
use crate::words::{below_len, child_index, Word};

/// A state assignment on `X^[depth]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedRun {
    k: usize,
    depth: usize,
    states: Vec<usize>,
}

impl TruncatedRun {
    pub fn new(k: usize, depth: usize, states: Vec<usize>) -> Result<Self, AutomatonError> {
        let expected = below_len(k, depth + 1);
        if states.len() != expected {
            return Err(AutomatonError::Element(ElementError::LabelCount {
                expected,
                got: states.len(),
            }));
        }
        Ok(TruncatedRun { k, depth, states })
    }

    pub fn constant(k: usize, depth: usize, s: usize) -> Self {
        TruncatedRun {
            k,
            depth,
            states: vec![s; below_len(k, depth + 1)],
        }
    }

    pub fn from_fn<F: FnMut(&Word) -> usize>(k: usize, depth: usize, mut f: F) -> Self {
        let states = (0..below_len(k, depth + 1))
            .map(|i| f(&Word::from_vertex_index(k, i)))
            .collect();
        TruncatedRun { k, depth, states }
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn state(&self, w: &Word) -> Option<usize> {
        (w.len() <= self.depth).then(|| self.states[w.vertex_index(self.k)])
    }

    #[inline]
    pub fn state_at_index(&self, i: usize) -> usize {
        self.states[i]
    }

    /// The run seen from `w`.
    pub fn section(&self, w: &Word) -> Option<Self> {
        if w.len() > self.depth {
            return None;
        }
        let depth = self.depth - w.len();
        let states = subtree_indices(self.k, w.vertex_index(self.k), depth)
            .into_iter()
            .map(|i| self.states[i])
            .collect();
        Some(TruncatedRun { k: self.k, depth, states })
    }

    pub fn restrict(&self, depth: usize) -> Option<Self> {
        (depth <= self.depth).then(|| TruncatedRun {
            k: self.k,
            depth,
            states: self.states[..below_len(self.k, depth + 1)].to_vec(),
        })
    }

    /// `r(X^[n])`.
    pub fn image(&self, n: usize) -> BTreeSet<usize> {
        let n = n.min(self.depth);
        self.states[..below_len(self.k, n + 1)].iter().copied().collect()
    }

    /// Checks the bundle condition at every vertex above the last level.
    pub fn validate(&self, aut: &UnrestrictedRabinAutomaton, labels: &TruncatedElement) -> Result<(), AutomatonError> {
        let k = self.k;
        if k != aut.signature().arity() {
            return Err(AutomatonError::Element(ElementError::SignatureMismatch));
        }
        if labels.depth() + 1 < self.depth {
            return Err(AutomatonError::RunDepth {
                run: self.depth,
                labels: labels.depth(),
            });
        }
        let n = aut.state_count();
        if self.states.iter().any(|&s| s >= n) {
            return Err(AutomatonError::UnknownState(format!("{:?}", self.states.iter().max())));
        }
        for i in 0..below_len(k, self.depth) {
            let to: Vec<usize> = (0..k).map(|x| self.states[child_index(k, i, x)]).collect();
            if !aut.has_bundle(self.states[i], labels.label_at_index(i), &to) {
                return Err(AutomatonError::NotARun {
                    vertex: Word::from_vertex_index(k, i).to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Greatest set `V` such that every state of `V` has a bundle into `V`.
pub fn viable_states(aut: &UnrestrictedRabinAutomaton) -> BTreeSet<usize> {
    let mask = viable_mask(aut);
    (0..aut.state_count()).filter(|s| mask >> s & 1 == 1).collect()
}

pub(crate) fn viable_mask(aut: &UnrestrictedRabinAutomaton) -> u64 {
    let n = aut.state_count();
    let mut v: u64 = if n == 64 { u64::MAX } else { (1 << n) - 1 };
    loop {
        let mut keep = 0u64;
        for b in aut.bundles() {
            if v >> b.from & 1 == 1 && b.to.iter().all(|&t| v >> t & 1 == 1) {
                keep |= 1 << b.from;
            }
        }
        if keep == v {
            return v;
        }
        v = keep;
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCheck {
    pub allowed: bool,
    /// A run on `X^[size]` reading the block, when allowed.
    pub run: Option<TruncatedRun>,
}

/// Whether `p` appears in some configuration accepted by `aut`.
///
/// Shift invariance lets us look only at the root: `p` is allowed iff some
/// run on `X^[n]` reads `p` above level `n` and ends in viable states.
pub fn block_allowed(aut: &UnrestrictedRabinAutomaton, p: &Block, exec: Execution) -> BlockCheck {
    let viable = viable_mask(aut);
    let possible = possible_sets(aut, p, viable, exec);
    if possible[0] == 0 {
        return BlockCheck {
            allowed: false,
            run: None,
        };
    }
    let k = aut.signature().arity();
    let size = p.size();
    let inner = below_len(k, size);
    let lookup = |i: usize| if i < inner { possible[i] } else { viable };
    let mut states = vec![0usize; below_len(k, size + 1)];
    states[0] = possible[0].trailing_zeros() as usize;
    for i in 0..inner {
        let b = aut
            .bundles_for(states[i], p.label_at_index(i))
            .find(|b| b.to.iter().enumerate().all(|(x, &t)| lookup(child_index(k, i, x)) >> t & 1 == 1))
            .expect("state was marked possible");
        for (x, &t) in b.to.iter().enumerate() {
            states[child_index(k, i, x)] = t;
        }
    }
    BlockCheck {
        allowed: true,
        run: Some(TruncatedRun { k, depth: size, states }),
    }
}

/// `possible[i]`: states that can sit at vertex `i` of the block.
fn possible_sets(aut: &UnrestrictedRabinAutomaton, p: &Block, viable: u64, exec: Execution) -> Vec<u64> {
    let k = aut.signature().arity();
    let size = p.size();
    let inner = below_len(k, size);
    let mut possible = vec![0u64; inner];
    for level in (0..size).rev() {
        let start = below_len(k, level);
        let end = below_len(k, level + 1);
        let below = &possible;
        let lookup = |i: usize| if i < inner { below[i] } else { viable };
        let row = par::map_range(exec, end - start, |j| {
            let i = start + j;
            let mut set = 0u64;
            for s in 0..aut.state_count() {
                if viable >> s & 1 == 0 {
                    continue;
                }
                let ok = aut
                    .bundles_for(s, p.label_at_index(i))
                    .any(|b| b.to.iter().enumerate().all(|(x, &t)| lookup(child_index(k, i, x)) >> t & 1 == 1));
                if ok {
                    set |= 1 << s;
                }
            }
            set
        });
        possible[start..end].copy_from_slice(&row);
    }
    possible
}

/// Whether the size-`n` root block of `g` is allowed. For `n = 0` this asks
/// whether the automaton accepts anything at all.
pub fn config_membership_depth(aut: &UnrestrictedRabinAutomaton, g: &FsElement, n: usize) -> bool {
    if n == 0 {
        return viable_mask(aut) != 0;
    }
    block_allowed(aut, &g.truncate(n - 1), Execution::Sequential).allowed
}

/// Builds a run for the grafting of `b` onto `a` at `v`: `run_b` on `vX*`,
/// `run_a` elsewhere. The result is re-validated before it is returned.
pub fn graft_run(
    aut: &UnrestrictedRabinAutomaton,
    a: &TruncatedElement,
    run_a: &TruncatedRun,
    b: &TruncatedElement,
    run_b: &TruncatedRun,
    v: &Word,
) -> Result<(TruncatedElement, TruncatedRun), AutomatonError> {
    run_a.validate(aut, a)?;
    run_b.validate(aut, b)?;
    if v.len() > a.depth() {
        return Err(ElementError::WordTooLong {
            word: v.clone(),
            depth: a.depth(),
        }
        .into());
    }
    if a.label(v) != b.label(&Word::empty()) {
        return Err(AutomatonError::GraftHypothesis(GraftCondition::LabelsDiffer));
    }
    if run_a.state(v) != run_b.state(&Word::empty()) {
        return Err(AutomatonError::GraftHypothesis(GraftCondition::StatesDiffer));
    }
    let needed = run_a.depth.saturating_sub(v.len());
    if run_b.depth < needed {
        return Err(ElementError::TooShallow {
            needed,
            have: run_b.depth,
        }
        .into());
    }
    let grafted = a.graft(b, v)?;
    let k = run_a.k;
    let mut states = run_a.states.clone();
    for (j, i) in subtree_indices(k, v.vertex_index(k), needed).into_iter().enumerate() {
        states[i] = run_b.states[j];
    }
    let run = TruncatedRun {
        k,
        depth: run_a.depth,
        states,
    };
    run.validate(aut, &grafted)?;
    Ok((grafted, run))
}
