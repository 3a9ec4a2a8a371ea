//! Tree shifts of finite type and their relation to self-similar groups.
//!
//! For a group `G` and a block size `s`, the allowed set `𝓐` is the set of
//! size-`s` root blocks of elements of `G` and `𝓕` is its complement. The
//! shift `𝒳_𝓕` always contains the closure of `G` when `G` is self-similar;
//! equality is what being finitely constrained means. Comparisons here are
//! made one depth at a time.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::analysis::{AnalysisError, ChainCache, LevelChain, LevelQuotient};
use crate::elements::{same_signature, subtree_indices, Block, ElementError, FsElement, Portrait, TruncatedElement};
use crate::group::{Label, Signature};
use crate::par::{self, Execution};
use crate::words::{below_len, Word};

/// Forbidden blocks, all of one size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SftDefinition {
    sig: Arc<Signature>,
    block_size: usize,
    forbidden: Vec<Block>,
}

/// A set of blocks of one size, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AllowedBlockSet {
    sig: Arc<Signature>,
    block_size: usize,
    blocks: Vec<Block>,
}

fn check_blocks(sig: &Arc<Signature>, size: usize, blocks: &[Block]) -> Result<(), AnalysisError> {
    if size == 0 {
        return Err(ElementError::EmptyBlock.into());
    }
    for b in blocks {
        if !same_signature(sig, b.signature()) {
            return Err(ElementError::SignatureMismatch.into());
        }
        if b.size() != size {
            return Err(ElementError::DepthMismatch(b.depth(), size - 1).into());
        }
    }
    Ok(())
}

fn sorted(mut blocks: Vec<Block>) -> Vec<Block> {
    blocks.sort();
    blocks.dedup();
    blocks
}

impl SftDefinition {
    pub fn new(sig: Arc<Signature>, block_size: usize, forbidden: Vec<Block>) -> Result<Self, AnalysisError> {
        check_blocks(&sig, block_size, &forbidden)?;
        Ok(SftDefinition {
            sig,
            block_size,
            forbidden: sorted(forbidden),
        })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn forbidden(&self) -> &[Block] {
        &self.forbidden
    }

    pub fn is_forbidden(&self, b: &Block) -> bool {
        self.forbidden.binary_search(b).is_ok()
    }

    /// The complement of the forbidden set among all blocks of this size.
    pub fn allowed(&self, cap: usize) -> Result<AllowedBlockSet, AnalysisError> {
        let blocks = all_blocks(&self.sig, self.block_size, cap)?
            .into_iter()
            .filter(|b| !self.is_forbidden(b))
            .collect();
        Ok(AllowedBlockSet {
            sig: self.sig.clone(),
            block_size: self.block_size,
            blocks,
        })
    }

    pub fn to_json(&self) -> SftJson {
        SftJson {
            block_size: self.block_size,
            forbidden: self
                .forbidden
                .iter()
                .map(|b| b.labels().iter().map(|&a| a as usize).collect())
                .collect(),
        }
    }
}

/// Blocks are listed as label arrays in vertex order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftJson {
    pub block_size: usize,
    pub forbidden: Vec<Vec<usize>>,
}

impl SftJson {
    pub fn into_definition(self, sig: Arc<Signature>) -> Result<SftDefinition, AnalysisError> {
        if self.block_size == 0 {
            return Err(ElementError::EmptyBlock.into());
        }
        let blocks = self
            .forbidden
            .into_iter()
            .map(|labels| {
                let labels = labels
                    .into_iter()
                    .map(|a| Label::try_from(a).map_err(|_| ElementError::LabelOutOfRange(a)))
                    .collect::<Result<Vec<_>, _>>()?;
                TruncatedElement::from_labels(sig.clone(), self.block_size - 1, labels)
            })
            .collect::<Result<Vec<_>, _>>()?;
        SftDefinition::new(sig, self.block_size, blocks)
    }
}

impl AllowedBlockSet {
    pub fn new(sig: Arc<Signature>, block_size: usize, blocks: Vec<Block>) -> Result<Self, AnalysisError> {
        check_blocks(&sig, block_size, &blocks)?;
        Ok(AllowedBlockSet {
            sig,
            block_size,
            blocks: sorted(blocks),
        })
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, b: &Block) -> bool {
        self.blocks.binary_search(b).is_ok()
    }

    pub fn complement(&self, cap: usize) -> Result<SftDefinition, AnalysisError> {
        let forbidden = all_blocks(&self.sig, self.block_size, cap)?
            .into_iter()
            .filter(|b| !self.contains(b))
            .collect();
        Ok(SftDefinition {
            sig: self.sig.clone(),
            block_size: self.block_size,
            forbidden,
        })
    }
}

/// Every block of size `s`, in sorted order.
pub fn all_blocks(sig: &Arc<Signature>, s: usize, cap: usize) -> Result<Vec<Block>, AnalysisError> {
    if s == 0 {
        return Err(ElementError::EmptyBlock.into());
    }
    let m = sig.group().order();
    let n = below_len(sig.arity(), s);
    let total = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cap as u128 {
        return Err(AnalysisError::Cap { needed: total, cap });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut labels = vec![0 as Label; n];
    loop {
        out.push(TruncatedElement::from_labels_unchecked(sig.clone(), s - 1, labels.clone()));
        // odometer increment, last vertex fastest
        let mut i = n;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            labels[i] += 1;
            if (labels[i] as usize) < m {
                break;
            }
            labels[i] = 0;
        }
    }
}

/// Whether no forbidden block appears at any vertex `w` with
/// `|w| + s - 1 <= depth`.
pub fn sft_avoids<P: Portrait + ?Sized>(def: &SftDefinition, g: &P, depth: usize) -> Result<bool, AnalysisError> {
    let s = def.block_size;
    let t = window_source(&def.sig, g, s, depth)?;
    let ok = windows(&t, s).all(|b| !def.is_forbidden(&b));
    Ok(ok)
}

/// Whether every size-`s` window within `depth` lies in `allowed`.
pub fn windows_allowed<P: Portrait + ?Sized>(allowed: &AllowedBlockSet, g: &P, depth: usize) -> Result<bool, AnalysisError> {
    let s = allowed.block_size;
    let t = window_source(&allowed.sig, g, s, depth)?;
    let ok = windows(&t, s).all(|b| allowed.contains(&b));
    Ok(ok)
}

fn window_source<P: Portrait + ?Sized>(
    sig: &Arc<Signature>,
    g: &P,
    s: usize,
    depth: usize,
) -> Result<TruncatedElement, AnalysisError> {
    if !same_signature(sig, g.signature()) {
        return Err(ElementError::SignatureMismatch.into());
    }
    if depth + 1 < s {
        return Err(ElementError::TooShallow {
            needed: s - 1,
            have: depth,
        }
        .into());
    }
    g.portrait(depth).ok_or_else(|| {
        ElementError::TooShallow {
            needed: depth,
            have: g.known_depth().unwrap_or(0),
        }
        .into()
    })
}

fn windows(t: &TruncatedElement, s: usize) -> impl Iterator<Item = Block> + '_ {
    let k = t.signature().arity();
    let roots = below_len(k, t.depth() + 2 - s);
    (0..roots).map(move |i| {
        let idx = subtree_indices(k, i, s - 1);
        let labels = idx.into_iter().map(|j| t.label_at_index(j)).collect();
        TruncatedElement::from_labels_unchecked(t.signature().clone(), s - 1, labels)
    })
}

/// The size-`n` root blocks of a complete quotient of size `n`.
pub fn allowed_blocks(q: &LevelQuotient) -> Result<AllowedBlockSet, AnalysisError> {
    q.require_complete()?;
    Ok(AllowedBlockSet {
        sig: q.signature().clone(),
        block_size: q.size(),
        blocks: q.elements().to_vec(),
    })
}

pub fn allowed_blocks_of_chain(chain: &LevelChain, cap: usize) -> Result<AllowedBlockSet, AnalysisError> {
    let blocks = chain.enumerate_from(0, cap).ok_or(AnalysisError::Cap {
        needed: chain.order(),
        cap,
    })?;
    Ok(AllowedBlockSet {
        sig: chain.signature().clone(),
        block_size: chain.size(),
        blocks,
    })
}

/// `𝓕`: the blocks of size `q.size()` that do not occur in the group.
pub fn sft_from_group(q: &LevelQuotient, cap: usize) -> Result<SftDefinition, AnalysisError> {
    allowed_blocks(q)?.complement(cap)
}

/// Counts truncations at `depth` whose windows all lie in `allowed`.
struct WindowCounter<'a> {
    allowed: &'a AllowedBlockSet,
    /// id of each block's top (its restriction to size `s - 1`)
    top: Vec<usize>,
    /// id of each block's section at `x` restricted to size `s - 1`
    child: Vec<Vec<Option<usize>>>,
    tops: usize,
}

impl<'a> WindowCounter<'a> {
    fn new(allowed: &'a AllowedBlockSet) -> Self {
        let s = allowed.block_size;
        let k = allowed.sig.arity();
        let key_of = |b: &Block, w: &Word| -> Vec<Label> {
            if s == 1 {
                Vec::new()
            } else {
                b.block_at(w, s - 1).expect("inside block").into_labels()
            }
        };
        let mut ids: HashMap<Vec<Label>, usize> = HashMap::new();
        let top: Vec<usize> = allowed
            .blocks
            .iter()
            .map(|b| {
                let key = key_of(b, &Word::empty());
                let fresh = ids.len();
                *ids.entry(key).or_insert(fresh)
            })
            .collect();
        let child = allowed
            .blocks
            .iter()
            .map(|b| {
                (0..k)
                    .map(|x| ids.get(&key_of(b, &Word::from_letters([x as u8]))).copied())
                    .collect()
            })
            .collect();
        WindowCounter {
            allowed,
            top,
            child,
            tops: ids.len(),
        }
    }

    fn combine(&self, per_child: &[Vec<u128>], own: impl Fn(usize) -> bool) -> Result<Vec<u128>, AnalysisError> {
        let k = self.allowed.sig.arity();
        let overflow = || AnalysisError::Cap {
            needed: u128::MAX,
            cap: usize::MAX,
        };
        (0..self.allowed.blocks.len())
            .map(|p| {
                if !own(p) {
                    return Ok(0);
                }
                let mut prod: u128 = 1;
                for (x, counts) in per_child.iter().enumerate().take(k) {
                    let c = match self.child[p][x] {
                        Some(t) => counts[t],
                        None => 0,
                    };
                    prod = prod.checked_mul(c).ok_or_else(overflow)?;
                }
                Ok(prod)
            })
            .collect()
    }

    fn sum_by_top(&self, counts: &[u128]) -> Result<Vec<u128>, AnalysisError> {
        let mut sums = vec![0u128; self.tops];
        for (p, &c) in counts.iter().enumerate() {
            sums[self.top[p]] = sums[self.top[p]].checked_add(c).ok_or(AnalysisError::Cap {
                needed: u128::MAX,
                cap: usize::MAX,
            })?;
        }
        Ok(sums)
    }

    fn total(counts: &[u128]) -> Result<u128, AnalysisError> {
        counts.iter().try_fold(0u128, |acc, &c| {
            acc.checked_add(c).ok_or(AnalysisError::Cap {
                needed: u128::MAX,
                cap: usize::MAX,
            })
        })
    }

    /// Unconstrained count, using shift invariance level by level.
    fn count(&self, depth: usize) -> Result<u128, AnalysisError> {
        let s = self.allowed.block_size;
        let k = self.allowed.sig.arity();
        let mut counts = vec![1u128; self.allowed.blocks.len()];
        for _ in s..=depth {
            let sums = self.sum_by_top(&counts)?;
            let per_child = vec![sums; k];
            counts = self.combine(&per_child, |_| true)?;
        }
        Self::total(&counts)
    }

    /// Count among truncations whose labels start with `prefix`.
    fn count_with_prefix(&self, depth: usize, prefix: &[Label]) -> Result<u128, AnalysisError> {
        let s = self.allowed.block_size;
        let k = self.allowed.sig.arity();
        let last = depth + 1 - s;
        let window_idx: Vec<Vec<usize>> = (0..below_len(k, last + 1))
            .map(|v| subtree_indices(k, v, s - 1))
            .collect();
        let consistent = |v: usize, p: usize| {
            let b = &self.allowed.blocks[p];
            window_idx[v]
                .iter()
                .enumerate()
                .all(|(j, &i)| i >= prefix.len() || prefix[i] == b.label_at_index(j))
        };
        let mut level: Vec<Vec<u128>> = (below_len(k, last)..below_len(k, last + 1))
            .map(|v| {
                (0..self.allowed.blocks.len())
                    .map(|p| consistent(v, p) as u128)
                    .collect()
            })
            .collect();
        for l in (0..last).rev() {
            let start = below_len(k, l);
            let child_start = below_len(k, l + 1);
            let mut next = Vec::with_capacity(below_len(k, l + 1) - start);
            for v in start..child_start {
                let per_child = (0..k)
                    .map(|x| self.sum_by_top(&level[v * k + 1 + x - child_start]))
                    .collect::<Result<Vec<_>, _>>()?;
                next.push(self.combine(&per_child, |p| consistent(v, p))?);
            }
            level = next;
        }
        Self::total(&level[0])
    }
}

/// Number of truncations at `depth` all of whose windows are allowed.
pub fn admitted_count(allowed: &AllowedBlockSet, depth: usize) -> Result<u128, AnalysisError> {
    if depth + 1 < allowed.block_size {
        return Err(ElementError::TooShallow {
            needed: allowed.block_size - 1,
            have: depth,
        }
        .into());
    }
    WindowCounter::new(allowed).count(depth)
}

/// The admitted truncations at `depth`, sorted; errors above `cap`.
pub fn admitted_blocks(allowed: &AllowedBlockSet, depth: usize, cap: usize) -> Result<Vec<Block>, AnalysisError> {
    let total = admitted_count(allowed, depth)?;
    if total > cap as u128 {
        return Err(AnalysisError::Cap { needed: total, cap });
    }
    let counter = WindowCounter::new(allowed);
    let sig = &allowed.sig;
    let n = sig.alphabet().up_to_len(depth);
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(n);
    fn walk(
        counter: &WindowCounter,
        depth: usize,
        n: usize,
        labels: &[Label],
        prefix: &mut Vec<Label>,
        out: &mut Vec<Vec<Label>>,
    ) -> Result<(), AnalysisError> {
        if prefix.len() == n {
            out.push(prefix.clone());
            return Ok(());
        }
        for &a in labels {
            prefix.push(a);
            if counter.count_with_prefix(depth, prefix)? > 0 {
                walk(counter, depth, n, labels, prefix, out)?;
            }
            prefix.pop();
        }
        Ok(())
    }
    let labels: Vec<Label> = sig.group().elements().collect();
    let mut raw = Vec::new();
    walk(&counter, depth, n, &labels, &mut prefix, &mut raw)?;
    out.extend(
        raw.into_iter()
            .map(|l| TruncatedElement::from_labels_unchecked(sig.clone(), depth, l)),
    );
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionRoute {
    /// Every state of every generator has its root window allowed.
    StateWindows,
    /// Checked element by element.
    Enumerated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub block: String,
    #[serde(skip)]
    pub element: TruncatedElement,
    pub in_group: bool,
    pub admitted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub block_size: usize,
    pub depth: usize,
    pub equal: bool,
    pub group_order: u128,
    pub admitted: u128,
    pub inclusion: InclusionRoute,
    pub counterexample: Option<Counterexample>,
}

/// Compares `π_{depth+1}(G)` with the truncations admitted by the shift of
/// finite type defined by the size-`s` blocks of `G`.
///
/// Both sets are counted rather than listed; when they differ the
/// lexicographically first block of the difference is returned.
pub fn closure_vs_sft(
    cache: &mut ChainCache,
    s: usize,
    depth: usize,
    cap: usize,
    exec: Execution,
) -> Result<ClosureReport, AnalysisError> {
    if s == 0 {
        return Err(ElementError::EmptyBlock.into());
    }
    if depth + 1 < s {
        return Err(AnalysisError::Precondition(format!(
            "depth {depth} is below block size {s} minus one"
        )));
    }
    let allowed = allowed_blocks_of_chain(cache.get(s)?, cap)?;
    let gens = cache.generators().to_vec();
    let chain = cache.get(depth + 1)?.clone();
    let group_order = chain.order();
    let counter = WindowCounter::new(&allowed);
    let admitted = counter.count(depth)?;

    let states_ok = gens.iter().all(|g| {
        (0..g.state_count()).all(|q| allowed.contains(&g.from_state(q).truncate(s - 1)))
    });
    let mut report = ClosureReport {
        block_size: s,
        depth,
        equal: false,
        group_order,
        admitted,
        inclusion: if states_ok {
            InclusionRoute::StateWindows
        } else {
            InclusionRoute::Enumerated
        },
        counterexample: None,
    };
    if !states_ok {
        let elements = chain.enumerate_from(0, cap).ok_or(AnalysisError::Cap {
            needed: group_order,
            cap,
        })?;
        let bad = par::find_map_first(exec, elements.len(), |i| {
            (!windows_allowed(&allowed, &elements[i], depth).expect("same signature")).then_some(i)
        });
        if let Some(i) = bad {
            let element = elements[i].clone();
            report.counterexample = Some(Counterexample {
                block: element.to_string(),
                element,
                in_group: true,
                admitted: false,
            });
            return Ok(report);
        }
    }
    if admitted == group_order {
        report.equal = true;
        return Ok(report);
    }
    let element = first_admitted_outside(&counter, &chain, depth)?;
    report.counterexample = Some(Counterexample {
        block: element.to_string(),
        element,
        in_group: false,
        admitted: true,
    });
    Ok(report)
}

/// Walks vertices in order, keeping the first label under which admitted
/// truncations outnumber group elements.
fn first_admitted_outside(
    counter: &WindowCounter,
    chain: &LevelChain,
    depth: usize,
) -> Result<TruncatedElement, AnalysisError> {
    let sig = chain.signature().clone();
    let n = sig.alphabet().up_to_len(depth);
    let labels: Vec<Label> = sig.group().elements().collect();
    let mut prefix = Vec::with_capacity(n);
    let mut lift = Some(TruncatedElement::identity(sig.clone(), depth));
    for i in 0..n {
        let mut chosen = false;
        for &a in &labels {
            prefix.push(a);
            let adm = counter.count_with_prefix(depth, &prefix)?;
            let mut next = lift.clone();
            if let Some(p) = next.as_mut() {
                if !chain.extend_lift(p, i, &prefix) {
                    next = None;
                }
            }
            let in_group = if next.is_some() { chain.completions(i + 1) } else { 0 };
            if adm > in_group {
                lift = next;
                chosen = true;
                break;
            }
            prefix.pop();
        }
        if !chosen {
            return Err(AnalysisError::Inconsistency(
                "admitted truncations do not outnumber group elements on any branch".into(),
            ));
        }
    }
    Ok(TruncatedElement::from_labels_unchecked(sig, depth, prefix))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Lookup,
    Induction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub element: TruncatedElement,
    pub route: Route,
}

/// An element of the group agreeing with `target` on `X^[n]`, `n` being the
/// depth of `target`. The lookup in the quotient is tried first.
pub fn approximate_in_group(
    cache: &mut ChainCache,
    allowed: &AllowedBlockSet,
    target: &TruncatedElement,
) -> Result<Approximation, AnalysisError> {
    let chain = cache.get(target.size())?;
    if let Some(g) = chain.lift_prefix(target.labels()) {
        return Ok(Approximation {
            element: g,
            route: Route::Lookup,
        });
    }
    Ok(Approximation {
        element: approximate_by_induction(cache, allowed, target)?,
        route: Route::Induction,
    })
}

/// The inductive construction: approximate the restriction one level up,
/// correct the last level with `f' = ∏_x δ_x(f^(x))`, and check that `f'`
/// lies in the group as symbolic branching promises.
pub fn approximate_by_induction(
    cache: &mut ChainCache,
    allowed: &AllowedBlockSet,
    target: &TruncatedElement,
) -> Result<TruncatedElement, AnalysisError> {
    let s = allowed.block_size();
    let n = target.depth();
    if n + 1 >= s && !windows_allowed(allowed, target, n)? {
        return Err(AnalysisError::Precondition(
            "target contains a forbidden block".into(),
        ));
    }
    if n < s {
        let chain = cache.get(n + 1)?;
        return chain.lift_prefix(target.labels()).ok_or_else(|| {
            AnalysisError::Precondition(format!("target of depth {n} is not the root of an allowed block"))
        });
    }
    let prev = approximate_by_induction(cache, allowed, &target.restrict(n - 1)?)?;
    let chain = cache.get(n + 1)?.clone();
    let lifted = chain
        .lift_prefix(prev.labels())
        .ok_or_else(|| AnalysisError::Inconsistency("restriction of the quotient is not onto".into()))?;
    // f = g⁻¹ T lies in Triv(n); its sections carry the remaining labels
    let f = lifted.inv().mul(target)?;
    let mut correction: Option<TruncatedElement> = None;
    for x in f.signature().alphabet().letters() {
        let xw = Word::from_letters([x]);
        let fx = f.section(&xw)?;
        let hx = approximate_by_induction(cache, allowed, &fx)?;
        let d = hx.delta(&xw)?;
        correction = Some(match correction {
            None => d,
            Some(c) => c.mul(&d)?,
        });
    }
    let correction = correction.expect("alphabet is nonempty");
    if !chain.contains(&correction) {
        return Err(AnalysisError::Inconsistency(format!(
            "branching lift {correction} is missing from the quotient of size {}",
            n + 1
        )));
    }
    let g = lifted.mul(&correction)?;
    if g != *target {
        return Err(AnalysisError::Inconsistency("approximation disagrees with target".into()));
    }
    Ok(g)
}

/// The size-`s` blocks of `⟨gens⟩`.
pub fn allowed_blocks_of(
    sig: Arc<Signature>,
    gens: &[FsElement],
    s: usize,
    cap: usize,
) -> Result<AllowedBlockSet, AnalysisError> {
    let chain = LevelChain::from_generators(sig, gens, s)?;
    allowed_blocks_of_chain(&chain, cap)
}

/// Blocks of `def` that occur in `g` within `depth`, with their positions.
pub fn forbidden_occurrences<P: Portrait + ?Sized>(
    def: &SftDefinition,
    g: &P,
    depth: usize,
) -> Result<Vec<(Word, Block)>, AnalysisError> {
    let s = def.block_size;
    let t = window_source(&def.sig, g, s, depth)?;
    let k = def.sig.arity();
    let mut seen = HashSet::new();
    let found = windows(&t, s)
        .enumerate()
        .filter(|(_, b)| def.is_forbidden(b))
        .filter(|(_, b)| seen.insert(b.clone()))
        .map(|(i, b)| (Word::from_vertex_index(k, i), b))
        .collect();
    Ok(found)
}
