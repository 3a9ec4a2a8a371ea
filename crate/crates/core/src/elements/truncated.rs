use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::Serialize;

use super::{same_signature, ElementError};
use crate::group::{Label, Signature};
use crate::words::{below_len, child_index, level_of, Letter, Word};

/// A portrait restricted to `X^[depth]`: the image of an element of
/// `F(A, X, φ)` in the depth-`depth` quotient, and at the same time a block
/// of size `depth + 1`.
///
/// Labels are stored in the dense vertex order of [`crate::words`].
#[derive(Clone)]
pub struct TruncatedElement {
    sig: Arc<Signature>,
    depth: usize,
    labels: Vec<Label>,
}

/// A block of size `n` is a truncation of depth `n - 1`.
pub type Block = TruncatedElement;

/// Membership of a truncation in the subgroups `Triv(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrivLevel {
    /// In `Triv(n)` but not in `Triv(n + 1)`.
    Exact(usize),
    /// Every available label is trivial.
    AtLeast(usize),
}

impl TrivLevel {
    pub fn at_least(self, n: usize) -> bool {
        match self {
            TrivLevel::Exact(m) | TrivLevel::AtLeast(m) => m >= n,
        }
    }
}

/// `supp(g) ∩ X^[depth]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportDescriptor {
    pub depth: usize,
    pub words: Vec<Word>,
}

/// Indices in the full tree of the vertices of the subtree rooted at `root`,
/// listed in the subtree's own vertex order down to relative depth `depth`.
pub(crate) fn subtree_indices(k: usize, root: usize, depth: usize) -> Vec<usize> {
    let total = below_len(k, depth + 1);
    let mut out = Vec::with_capacity(total);
    out.push(root);
    for j in 0..below_len(k, depth) {
        for x in 0..k {
            debug_assert_eq!(out.len(), child_index(k, j, x));
            let parent = out[j];
            out.push(child_index(k, parent, x));
        }
    }
    out
}

impl TruncatedElement {
    pub fn identity(sig: Arc<Signature>, depth: usize) -> Self {
        let n = sig.alphabet().up_to_len(depth);
        let e = sig.identity();
        TruncatedElement {
            sig,
            depth,
            labels: vec![e; n],
        }
    }

    pub fn from_labels(sig: Arc<Signature>, depth: usize, labels: Vec<Label>) -> Result<Self, ElementError> {
        let expected = sig.alphabet().up_to_len(depth);
        if labels.len() != expected {
            return Err(ElementError::LabelCount {
                expected,
                got: labels.len(),
            });
        }
        let m = sig.group().order();
        if let Some(&bad) = labels.iter().find(|&&a| a as usize >= m) {
            return Err(ElementError::LabelOutOfRange(bad as usize));
        }
        Ok(TruncatedElement { sig, depth, labels })
    }

    pub(crate) fn from_labels_unchecked(sig: Arc<Signature>, depth: usize, labels: Vec<Label>) -> Self {
        debug_assert_eq!(labels.len(), sig.alphabet().up_to_len(depth));
        TruncatedElement { sig, depth, labels }
    }

    pub fn from_fn<F: FnMut(&Word) -> Label>(sig: Arc<Signature>, depth: usize, mut f: F) -> Result<Self, ElementError> {
        let k = sig.arity();
        let labels = (0..sig.alphabet().up_to_len(depth))
            .map(|i| f(&Word::from_vertex_index(k, i)))
            .collect();
        Self::from_labels(sig, depth, labels)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Size of this truncation viewed as a block.
    pub fn size(&self) -> usize {
        self.depth + 1
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn into_labels(self) -> Vec<Label> {
        self.labels
    }

    #[inline]
    pub fn label_at_index(&self, i: usize) -> Label {
        self.labels[i]
    }

    /// `g_(w)`, or `None` below the truncation.
    pub fn label(&self, w: &Word) -> Option<Label> {
        (w.len() <= self.depth).then(|| self.labels[w.vertex_index(self.sig.arity())])
    }

    pub fn is_identity(&self) -> bool {
        let e = self.sig.identity();
        self.labels.iter().all(|&a| a == e)
    }

    fn check_compatible(&self, other: &Self) -> Result<(), ElementError> {
        if !same_signature(&self.sig, &other.sig) {
            return Err(ElementError::SignatureMismatch);
        }
        if self.depth != other.depth {
            return Err(ElementError::DepthMismatch(self.depth, other.depth));
        }
        Ok(())
    }

    /// `img[i]` is the index of `g(w_i)` for every vertex of `X^[depth]`.
    pub(crate) fn image_map(&self) -> Vec<usize> {
        let k = self.sig.arity();
        let act = self.sig.action();
        let n = self.labels.len();
        let mut img = vec![0; n];
        for i in 0..below_len(k, self.depth) {
            let a = self.labels[i];
            let base = img[i];
            for x in 0..k {
                let y = act.apply(a, x as Letter) as usize;
                img[child_index(k, i, x)] = child_index(k, base, y);
            }
        }
        img
    }

    /// `g(w)` for `|w| <= depth + 1`; uses only labels on strict prefixes of `w`.
    pub fn act(&self, w: &Word) -> Result<Word, ElementError> {
        if w.len() > self.depth + 1 {
            return Err(ElementError::WordTooLong {
                word: w.clone(),
                depth: self.depth,
            });
        }
        let k = self.sig.arity();
        let act = self.sig.action();
        let mut i = 0;
        let mut out = Word::empty();
        for &x in w.letters() {
            out.push(act.apply(self.labels[i], x));
            i = child_index(k, i, x as usize);
        }
        Ok(out)
    }

    /// `(gh)_(w) = g_(h(w)) · h_(w)`.
    pub fn mul(&self, h: &Self) -> Result<Self, ElementError> {
        self.check_compatible(h)?;
        Ok(self.mul_unchecked(h))
    }

    pub(crate) fn mul_unchecked(&self, h: &Self) -> Self {
        let grp = self.sig.group();
        let img = h.image_map();
        let labels = img
            .iter()
            .zip(&h.labels)
            .map(|(&hw, &hl)| grp.mul(self.labels[hw], hl))
            .collect();
        TruncatedElement {
            sig: self.sig.clone(),
            depth: self.depth,
            labels,
        }
    }

    /// `(g⁻¹)_(g(w)) = (g_(w))⁻¹`.
    pub fn inv(&self) -> Self {
        let grp = self.sig.group();
        let img = self.image_map();
        let mut labels = vec![0; self.labels.len()];
        for (i, &gi) in img.iter().enumerate() {
            labels[gi] = grp.inv(self.labels[i]);
        }
        TruncatedElement {
            sig: self.sig.clone(),
            depth: self.depth,
            labels,
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = TruncatedElement::identity(self.sig.clone(), self.depth);
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_unchecked(&sq);
            }
            sq = sq.mul_unchecked(&sq);
            e >>= 1;
        }
        acc
    }

    /// `self^g = g⁻¹ · self · g`.
    pub fn conjugate(&self, g: &Self) -> Result<Self, ElementError> {
        self.check_compatible(g)?;
        Ok(g.inv().mul_unchecked(self).mul_unchecked(g))
    }

    /// Commutator `[g, h] = g⁻¹ h⁻¹ g h`.
    pub fn commutator(&self, h: &Self) -> Result<Self, ElementError> {
        self.check_compatible(h)?;
        Ok(self.inv().mul_unchecked(&h.inv()).mul_unchecked(self).mul_unchecked(h))
    }

    /// The section `g_w`, of depth `depth - |w|`.
    pub fn section(&self, w: &Word) -> Result<Self, ElementError> {
        if w.len() > self.depth {
            return Err(ElementError::WordTooLong {
                word: w.clone(),
                depth: self.depth,
            });
        }
        self.sig.alphabet().check(w)?;
        let k = self.sig.arity();
        let depth = self.depth - w.len();
        let idx = subtree_indices(k, w.vertex_index(k), depth);
        Ok(TruncatedElement {
            sig: self.sig.clone(),
            depth,
            labels: idx.into_iter().map(|i| self.labels[i]).collect(),
        })
    }

    /// The image in a shallower quotient.
    pub fn restrict(&self, depth: usize) -> Result<Self, ElementError> {
        if depth > self.depth {
            return Err(ElementError::TooShallow {
                needed: depth,
                have: self.depth,
            });
        }
        let n = self.sig.alphabet().up_to_len(depth);
        Ok(TruncatedElement {
            sig: self.sig.clone(),
            depth,
            labels: self.labels[..n].to_vec(),
        })
    }

    /// The block of size `size` appearing at `w`.
    pub fn block_at(&self, w: &Word, size: usize) -> Result<Self, ElementError> {
        if size == 0 {
            return Err(ElementError::EmptyBlock);
        }
        let sec = self.section(w)?;
        sec.restrict(size - 1)
    }

    /// Grafting of `b` onto `self` at `v`: `b`'s labels on `vX*`, ours elsewhere.
    pub fn graft(&self, b: &Self, v: &Word) -> Result<Self, ElementError> {
        if !same_signature(&self.sig, &b.sig) {
            return Err(ElementError::SignatureMismatch);
        }
        if v.len() > self.depth {
            return Err(ElementError::WordTooLong {
                word: v.clone(),
                depth: self.depth,
            });
        }
        self.sig.alphabet().check(v)?;
        let needed = self.depth - v.len();
        if b.depth < needed {
            return Err(ElementError::TooShallow { needed, have: b.depth });
        }
        let k = self.sig.arity();
        let mut labels = self.labels.clone();
        for (j, i) in subtree_indices(k, v.vertex_index(k), needed).into_iter().enumerate() {
            labels[i] = b.labels[j];
        }
        Ok(TruncatedElement {
            sig: self.sig.clone(),
            depth: self.depth,
            labels,
        })
    }

    /// `δ_v(g)`: `g` grafted onto the identity at `v`; depth grows by `|v|`.
    pub fn delta(&self, v: &Word) -> Result<Self, ElementError> {
        self.sig.alphabet().check(v)?;
        let depth = self.depth + v.len();
        let id = TruncatedElement::identity(self.sig.clone(), depth);
        id.graft(self, v)
    }

    /// Largest `n` with every label on `X^(n)` trivial.
    pub fn triv_level(&self) -> TrivLevel {
        let e = self.sig.identity();
        match self.labels.iter().position(|&a| a != e) {
            Some(i) => TrivLevel::Exact(level_of(self.sig.arity(), i)),
            None => TrivLevel::AtLeast(self.depth + 1),
        }
    }

    /// Whether `g(u) = u` for every `u ∈ X^n`; needs `n <= depth + 1`.
    pub fn stab_test(&self, n: usize) -> Result<bool, ElementError> {
        if n > self.depth + 1 {
            return Err(ElementError::TooShallow {
                needed: n.saturating_sub(1),
                have: self.depth,
            });
        }
        let k = self.sig.arity();
        let act = self.sig.action();
        // positions of level-(n-1) vertices stay put iff every letter under them is fixed
        let mut fixed = vec![true; below_len(k, n)];
        for i in 0..below_len(k, n) {
            if i > 0 {
                let parent = (i - 1) / k;
                let x = ((i - 1) % k) as Letter;
                fixed[i] = fixed[parent] && act.apply(self.labels[parent], x) == x;
            }
        }
        let start = below_len(k, n.saturating_sub(1));
        if n == 0 {
            return Ok(true);
        }
        Ok((start..below_len(k, n)).all(|i| {
            fixed[i] && (0..k).all(|x| act.apply(self.labels[i], x as Letter) as usize == x)
        }))
    }

    pub fn support(&self) -> SupportDescriptor {
        let e = self.sig.identity();
        let k = self.sig.arity();
        SupportDescriptor {
            depth: self.depth,
            words: self
                .labels
                .iter()
                .enumerate()
                .filter(|(_, &a)| a != e)
                .map(|(i, _)| Word::from_vertex_index(k, i))
                .collect(),
        }
    }

    /// Labels rendered with the group's display names, level by level.
    pub fn render(&self) -> String {
        let k = self.sig.arity();
        let grp = self.sig.group();
        (0..=self.depth)
            .map(|n| {
                (below_len(k, n)..below_len(k, n + 1))
                    .map(|i| grp.name(self.labels[i]))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join(" | ")
    }
}

impl PartialEq for TruncatedElement {
    fn eq(&self, other: &Self) -> bool {
        self.depth == other.depth && self.labels == other.labels && same_signature(&self.sig, &other.sig)
    }
}

impl Eq for TruncatedElement {}

impl Hash for TruncatedElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.depth.hash(state);
        self.labels.hash(state);
    }
}

impl PartialOrd for TruncatedElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TruncatedElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.depth
            .cmp(&other.depth)
            .then_with(|| self.labels.cmp(&other.labels))
    }
}

impl fmt::Debug for TruncatedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedElement[{}]", self.render())
    }
}

impl fmt::Display for TruncatedElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
