//! Pigeonhole machinery for automaton-defined groups: the integer `k(g)`,
//! identity runs, the antichain `C_g` and the product decomposition over it.

use std::collections::BTreeMap;

use super::AnalysisError;
use crate::automata::{TruncatedRun, UnrestrictedRabinAutomaton};
use crate::elements::{ElementError, FsElement, TruncatedElement};
use crate::words::{below_len, enumerate_words, level_start, Alphabet, Word, WordSet};

fn parent(k: usize, i: usize) -> usize {
    (i - 1) / k
}

/// For each vertex of the run, whether the path from the root to it visits
/// some state twice.
fn path_repeats(run: &TruncatedRun) -> Vec<bool> {
    let k = run.arity();
    let states = run.states();
    let mut rep = vec![false; states.len()];
    for i in 1..states.len() {
        let p = parent(k, i);
        if rep[p] {
            rep[i] = true;
            continue;
        }
        let s = states[i];
        let mut j = p;
        loop {
            if states[j] == s {
                rep[i] = true;
                break;
            }
            if j == 0 {
                break;
            }
            j = parent(k, j);
        }
    }
    rep
}

/// The least `k ≥ 1` such that every path from the root to `X^k` repeats a
/// state and `|r(X^[k])| = |r(X^[k+1])|`. A run with `n_states` states and
/// depth at least `2·n_states` always has one, and it is at most
/// `2·n_states - 1`.
pub fn k_of(run: &TruncatedRun, n_states: usize) -> Result<usize, AnalysisError> {
    let k = run.arity();
    let rep = path_repeats(run);
    for m in 1..run.depth() {
        let level = level_start(k, m)..below_len(k, m + 1);
        if !rep[level].iter().all(|&r| r) {
            continue;
        }
        if run.image(m).len() == run.image(m + 1).len() {
            return Ok(m);
        }
    }
    if run.depth() < 2 * n_states {
        Err(ElementError::TooShallow {
            needed: 2 * n_states,
            have: run.depth(),
        }
        .into())
    } else {
        Err(AnalysisError::Inconsistency(format!(
            "no k below depth {} for a run with at most {n_states} states",
            run.depth()
        )))
    }
}

/// Rebuilds a run for the identity that coincides with `run` on `X^[k]`.
/// Below level `k` each vertex copies the children of the first vertex of
/// `X^[k]` carrying the same state. The output has depth `out_depth` and is
/// validated before it is returned.
pub fn identity_run(
    aut: &UnrestrictedRabinAutomaton,
    g: &TruncatedElement,
    run: &TruncatedRun,
    k: usize,
    out_depth: usize,
) -> Result<TruncatedRun, AnalysisError> {
    let arity = run.arity();
    if run.depth() < k + 1 {
        return Err(ElementError::TooShallow {
            needed: k + 1,
            have: run.depth(),
        }
        .into());
    }
    run.validate(aut, g)?;
    let e = g.signature().identity();
    let top = below_len(arity, k + 1);
    if let Some(i) = (0..top).find(|&i| g.label_at_index(i) != e) {
        return Err(AnalysisError::Precondition(format!(
            "nontrivial label at {} above level {k}",
            Word::from_vertex_index(arity, i)
        )));
    }
    if run.image(k) != run.image(k + 1) {
        return Err(AnalysisError::Precondition(format!("run image has not stabilised at level {k}")));
    }
    // β: the first vertex of X^[k] in word order carrying each state
    let mut beta: BTreeMap<usize, usize> = BTreeMap::new();
    for i in 0..top {
        beta.entry(run.state_at_index(i)).or_insert(i);
    }
    let total = below_len(arity, out_depth + 1);
    let mut states = Vec::with_capacity(total);
    states.extend_from_slice(&run.states()[..top.min(total)]);
    for i in states.len()..total {
        let p = parent(arity, i);
        let x = i - (p * arity + 1);
        let b = beta[&states[p]];
        states.push(run.state_at_index(b * arity + 1 + x));
    }
    let out = TruncatedRun::new(arity, out_depth, states)?;
    let id = TruncatedElement::identity(g.signature().clone(), out_depth);
    out.validate(aut, &id)?;
    Ok(out)
}

/// `C_g`: for every `w ∈ X^k` the shortest prefix whose state recurs later
/// on the path to `w`, with words having a proper prefix in the set removed.
/// Sorted in word order.
pub fn build_cg(run: &TruncatedRun, k: usize) -> Result<Vec<Word>, AnalysisError> {
    let arity = run.arity();
    if k > run.depth() {
        return Err(ElementError::TooShallow {
            needed: k,
            have: run.depth(),
        }
        .into());
    }
    let alphabet = Alphabet::new(arity).map_err(ElementError::from)?;
    let mut b: Vec<Word> = Vec::new();
    for w in enumerate_words(alphabet, k, WordSet::Level) {
        let path: Vec<usize> = (0..=k).map(|j| run.state(&w.prefix(j)).expect("within depth")).collect();
        let mu = (0..=k).find(|&j| path[j + 1..].contains(&path[j])).ok_or_else(|| {
            AnalysisError::Precondition(format!("the path to {w} repeats no state"))
        })?;
        b.push(w.prefix(mu));
    }
    b.sort();
    b.dedup();
    let c = b
        .iter()
        .filter(|w| !b.iter().any(|p| p.is_proper_prefix_of(w)))
        .cloned()
        .collect();
    Ok(c)
}

/// Whether `c` is a prefix antichain in which every word of `X^m` has a
/// prefix, `m` being the longest word length.
pub fn is_covering_antichain(alphabet: Alphabet, c: &[Word]) -> bool {
    let antichain = c
        .iter()
        .all(|u| c.iter().all(|v| u == v || !u.is_prefix_of(v)));
    let m = c.iter().map(Word::len).max();
    antichain
        && m.is_some_and(|m| {
            enumerate_words(alphabet, m, WordSet::Level)
                .iter()
                .all(|w| c.iter().any(|p| p.is_prefix_of(w)))
        })
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    /// `(c, δ_c(g_c))` in the order multiplied.
    pub factors: Vec<(Word, TruncatedElement)>,
    pub product: TruncatedElement,
}

/// Writes `g` as `∏_{c ∈ C} δ_c(g_c)` and checks the product against `g` at
/// its full depth, both in word order and in reverse.
pub fn decompose_over_cg(g: &TruncatedElement, c: &[Word]) -> Result<Decomposition, AnalysisError> {
    let sig = g.signature();
    let alphabet = sig.alphabet();
    for w in c {
        alphabet.check(w).map_err(ElementError::from)?;
    }
    if !is_covering_antichain(alphabet, c) {
        return Err(AnalysisError::Precondition("words do not form a covering antichain".into()));
    }
    let m = c.iter().map(Word::len).max().expect("nonempty");
    if m > g.depth() {
        return Err(ElementError::TooShallow {
            needed: m,
            have: g.depth(),
        }
        .into());
    }
    let e = sig.identity();
    let k = sig.arity();
    for i in 0..below_len(k, m) {
        let w = Word::from_vertex_index(k, i);
        let above = c.iter().any(|p| w.is_proper_prefix_of(p));
        if above && g.label_at_index(i) != e {
            return Err(AnalysisError::Precondition(format!("nontrivial label at {w} above the antichain")));
        }
    }
    let mut order: Vec<Word> = c.to_vec();
    order.sort();
    let factors: Vec<(Word, TruncatedElement)> = order
        .into_iter()
        .map(|w| {
            let f = g.section(&w)?.delta(&w)?;
            Ok((w, f))
        })
        .collect::<Result<_, ElementError>>()?;
    let fold = |it: &mut dyn Iterator<Item = &TruncatedElement>| {
        it.fold(TruncatedElement::identity(sig.clone(), g.depth()), |acc, f| acc.mul_unchecked(f))
    };
    let product = fold(&mut factors.iter().map(|(_, f)| f));
    let reversed = fold(&mut factors.iter().rev().map(|(_, f)| f));
    if product != *g || reversed != *g {
        return Err(AnalysisError::Inconsistency(format!(
            "product over the antichain is {product}, expected {g}"
        )));
    }
    Ok(Decomposition { factors, product })
}

#[derive(Debug, Clone)]
pub struct MovementCheck {
    /// `v = g⁻¹(u)`.
    pub v: Word,
    pub section: FsElement,
    /// `h^{g_v}`.
    pub conjugated: FsElement,
    pub lhs: FsElement,
    pub rhs: FsElement,
}

/// Checks `(δ_u h)^g = δ_v(h^{g_v})` with `v = g⁻¹(u)`, exactly and on the
/// truncations of the given depth.
pub fn movement_check(h: &FsElement, u: &Word, g: &FsElement, depth: usize) -> Result<MovementCheck, AnalysisError> {
    if u.len() > depth {
        return Err(ElementError::WordTooLong {
            word: u.clone(),
            depth,
        }
        .into());
    }
    let v = g.inv().act(u)?;
    let lhs = h.delta(u)?.conjugate(g)?;
    let section = g.section(&v)?;
    let conjugated = h.conjugate(&section)?;
    let rhs = conjugated.delta(&v)?;
    if lhs != rhs || lhs.truncate(depth) != rhs.truncate(depth) {
        return Err(AnalysisError::Inconsistency(format!(
            "movement identity fails for u = {u}: {} vs {}",
            lhs.truncate(depth),
            rhs.truncate(depth)
        )));
    }
    Ok(MovementCheck {
        v,
        section,
        conjugated,
        lhs,
        rhs,
    })
}
