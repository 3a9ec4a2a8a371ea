//! Stabilizer chains for subgroups of a depth-truncated group.
//!
//! The base is the list of vertices of `X^[d]` in index order. Layer `i`
//! holds the subgroup `H_i` of elements with trivial labels on the first `i`
//! vertices. Since such elements fix vertex `i`, reading the label there is a
//! homomorphism `H_i → A`, so each transversal is indexed by labels and has
//! at most `|A|` entries. The tail `H_{|X^(s)|}` is exactly `Triv(s)`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::elements::{ElementError, FsElement, TruncatedElement};
use crate::group::{Label, Signature};
use crate::words::below_len;

#[derive(Debug, Clone)]
struct Layer {
    reps: Vec<Option<TruncatedElement>>,
    inv_reps: Vec<Option<TruncatedElement>>,
    orbit: Vec<Label>,
    /// Schreier pairs `(orbit position, strong generator)` already checked,
    /// stored as the number of generators processed per orbit position.
    done: Vec<usize>,
}

/// A base and strong generating set for a subgroup of the depth-`d` quotient.
#[derive(Debug, Clone)]
pub struct LevelChain {
    sig: Arc<Signature>,
    depth: usize,
    layers: Vec<Layer>,
    /// Strong generators with the layer they first appear in.
    strong: Vec<(TruncatedElement, usize)>,
}

impl LevelChain {
    /// The chain of `⟨gens⟩` in the quotient of size `size` (depth `size - 1`).
    pub fn from_generators(sig: Arc<Signature>, gens: &[FsElement], size: usize) -> Result<Self, ElementError> {
        if size == 0 {
            return Err(ElementError::EmptyBlock);
        }
        let truncs = gens.iter().map(|g| g.truncate(size - 1)).collect::<Vec<_>>();
        Self::from_truncations(sig, size - 1, &truncs)
    }

    pub fn from_truncations(sig: Arc<Signature>, depth: usize, gens: &[TruncatedElement]) -> Result<Self, ElementError> {
        let m = sig.group().order();
        let n = sig.alphabet().up_to_len(depth);
        let id = TruncatedElement::identity(sig.clone(), depth);
        let e = sig.identity() as usize;
        let layers = (0..n)
            .map(|_| {
                let mut reps = vec![None; m];
                reps[e] = Some(id.clone());
                Layer {
                    inv_reps: reps.clone(),
                    reps,
                    orbit: vec![e as Label],
                    done: vec![0],
                }
            })
            .collect();
        let mut chain = LevelChain {
            sig,
            depth,
            layers,
            strong: Vec::new(),
        };
        for g in gens {
            if g.depth() != depth {
                return Err(ElementError::DepthMismatch(g.depth(), depth));
            }
            if !crate::elements::same_signature(&chain.sig, g.signature()) {
                return Err(ElementError::SignatureMismatch);
            }
            let (residue, layer) = chain.sift_from(g.clone(), 0);
            if let Some(j) = layer {
                chain.strong.push((residue, j));
            }
        }
        chain.complete();
        Ok(chain)
    }

    fn complete(&mut self) {
        let mut i = self.layers.len() as isize - 1;
        while i >= 0 {
            match self.process_layer(i as usize) {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    /// Extends the transversal of layer `i` and checks pending Schreier
    /// generators. Returns the layer of a newly added strong generator.
    fn process_layer(&mut self, i: usize) -> Option<usize> {
        let gens: Vec<usize> = (0..self.strong.len()).filter(|&j| self.strong[j].1 >= i).collect();
        let mut p = 0;
        while p < self.layers[i].orbit.len() {
            while self.layers[i].done[p] < gens.len() {
                let s = &self.strong[gens[self.layers[i].done[p]]].0;
                self.layers[i].done[p] += 1;
                let a = self.layers[i].orbit[p] as usize;
                let t = self.layers[i].reps[a].as_ref().expect("orbit point has a representative");
                let u = s.mul_unchecked(t);
                let lab = u.label_at_index(i) as usize;
                let existing = self.layers[i].inv_reps[lab].clone();
                match existing {
                    None => {
                        let layer = &mut self.layers[i];
                        layer.inv_reps[lab] = Some(u.inv());
                        layer.reps[lab] = Some(u);
                        layer.orbit.push(lab as Label);
                        layer.done.push(0);
                    }
                    Some(inv) => {
                        let y = inv.mul_unchecked(&u);
                        let (residue, failed) = self.sift_from(y, i + 1);
                        if let Some(j) = failed {
                            self.strong.push((residue, j));
                            return Some(j);
                        }
                    }
                }
            }
            p += 1;
        }
        None
    }

    /// Strips transversal elements off `g` from layer `from` on. Returns the
    /// residue and the layer where a label had no representative.
    fn sift_from(&self, mut g: TruncatedElement, from: usize) -> (TruncatedElement, Option<usize>) {
        let e = self.sig.identity();
        for l in from..self.layers.len() {
            let a = g.label_at_index(l);
            if a == e {
                continue;
            }
            match &self.layers[l].inv_reps[a as usize] {
                Some(inv) => g = inv.mul_unchecked(&g),
                None => return (g, Some(l)),
            }
        }
        (g, None)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn size(&self) -> usize {
        self.depth + 1
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Labels reachable at vertex `i` by elements trivial before it.
    pub fn layer_labels(&self, i: usize) -> &[Label] {
        &self.layers[i].orbit
    }

    pub fn layer_size(&self, i: usize) -> usize {
        self.layers[i].orbit.len()
    }

    pub fn order(&self) -> u128 {
        self.layers.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Number of elements agreeing with a fixed liftable prefix of `i` labels.
    pub fn completions(&self, i: usize) -> u128 {
        self.layers[i..].iter().map(|l| l.orbit.len() as u128).product()
    }

    /// `|Triv(s) ∩ G|` in this quotient.
    pub fn triv_order(&self, s: usize) -> u128 {
        let start = below_len(self.sig.arity(), s).min(self.layers.len());
        self.completions(start)
    }

    pub fn contains(&self, g: &TruncatedElement) -> bool {
        g.depth() == self.depth && self.sift_from(g.clone(), 0).1.is_none()
    }

    /// An element whose first `prefix.len()` labels are `prefix`, if any.
    pub fn lift_prefix(&self, prefix: &[Label]) -> Option<TruncatedElement> {
        let mut p = TruncatedElement::identity(self.sig.clone(), self.depth);
        self.extend_lift(&mut p, 0, prefix).then_some(p)
    }

    /// Continues a lift that already agrees with `prefix` before `from`.
    pub(crate) fn extend_lift(&self, p: &mut TruncatedElement, from: usize, prefix: &[Label]) -> bool {
        let grp = self.sig.group();
        for (i, &target) in prefix.iter().enumerate().skip(from) {
            let need = grp.mul(grp.inv(p.label_at_index(i)), target);
            if need == self.sig.identity() {
                continue;
            }
            match &self.layers[i].reps[need as usize] {
                Some(t) => *p = p.mul_unchecked(t),
                None => return false,
            }
        }
        true
    }

    /// Every element of `H_layer`, as products of transversal elements.
    /// `None` when there are more than `cap`.
    pub fn enumerate_from(&self, layer: usize, cap: usize) -> Option<Vec<TruncatedElement>> {
        if self.completions(layer) > cap as u128 {
            return None;
        }
        let mut out = vec![TruncatedElement::identity(self.sig.clone(), self.depth)];
        for l in (layer..self.layers.len()).rev() {
            if self.layers[l].orbit.len() == 1 {
                continue;
            }
            let mut next = Vec::with_capacity(out.len() * self.layers[l].orbit.len());
            for &a in &self.layers[l].orbit {
                let t = self.layers[l].reps[a as usize].as_ref().expect("orbit representative");
                next.extend(out.iter().map(|g| t.mul_unchecked(g)));
            }
            out = next;
        }
        out.sort();
        Some(out)
    }

    /// `Triv(s) ∩ G`, sorted; `None` above `cap`.
    pub fn triv_elements(&self, s: usize, cap: usize) -> Option<Vec<TruncatedElement>> {
        let start = below_len(self.sig.arity(), s).min(self.layers.len());
        self.enumerate_from(start, cap)
    }

    pub fn strong_generators(&self) -> impl Iterator<Item = &TruncatedElement> {
        self.strong.iter().map(|(g, _)| g)
    }
}

/// Chains of one group at several sizes, built on demand.
#[derive(Debug, Clone)]
pub struct ChainCache {
    sig: Arc<Signature>,
    gens: Vec<FsElement>,
    chains: HashMap<usize, LevelChain>,
}

impl ChainCache {
    pub fn new(sig: Arc<Signature>, gens: Vec<FsElement>) -> Self {
        ChainCache {
            sig,
            gens,
            chains: HashMap::new(),
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn generators(&self) -> &[FsElement] {
        &self.gens
    }

    /// The chain of the quotient of size `size`.
    pub fn get(&mut self, size: usize) -> Result<&LevelChain, ElementError> {
        if !self.chains.contains_key(&size) {
            let chain = LevelChain::from_generators(self.sig.clone(), &self.gens, size)?;
            self.chains.insert(size, chain);
        }
        Ok(&self.chains[&size])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn odometer_orders_are_powers_of_two() {
        let (sig, gens) = presets::odometer();
        for n in 1..=6 {
            let chain = LevelChain::from_generators(sig.clone(), &gens, n).unwrap();
            assert_eq!(chain.order(), 1 << n);
        }
    }

    #[test]
    fn grigorchuk_orders() {
        let (sig, gens) = presets::grigorchuk();
        let expected = [2u128, 8, 128, 1 << 12, 1 << 22, 1 << 42];
        for (n, &want) in (1..=6).zip(&expected) {
            let chain = LevelChain::from_generators(sig.clone(), &gens, n).unwrap();
            assert_eq!(chain.order(), want, "size {n}");
        }
    }

    #[test]
    fn membership_and_lifts() {
        let (sig, gens) = presets::grigorchuk();
        let chain = LevelChain::from_generators(sig.clone(), &gens, 4).unwrap();
        for g in &gens {
            assert!(chain.contains(&g.truncate(3)));
        }
        let ab = gens[0].mul(&gens[1]).unwrap().truncate(3);
        let lifted = chain.lift_prefix(ab.labels()).unwrap();
        assert_eq!(lifted, ab);
        let delta = gens[0].delta(&"0".parse().unwrap()).unwrap().truncate(3);
        assert!(!chain.contains(&delta));
    }

    #[test]
    fn enumeration_matches_order() {
        let (sig, gens) = presets::grigorchuk();
        let chain = LevelChain::from_generators(sig, &gens, 3).unwrap();
        let all = chain.enumerate_from(0, 1000).unwrap();
        assert_eq!(all.len() as u128, chain.order());
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all.iter().all(|g| chain.contains(g)));
    }
}
