#![allow(dead_code)]

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use treeshift::automata::{Bundle, TruncatedRun, UnrestrictedRabinAutomaton};
use treeshift::group::{Action, LabelGroup};
use treeshift::words::{enumerate_words, WordSet};
use treeshift::{FsElement, Label, Signature, TruncatedElement, Word};

/// Label groups and actions covering `k ∈ {1, 2, 3}`, `|A| ≤ 6`, and
/// actions that are not faithful.
pub fn signatures() -> Vec<Arc<Signature>> {
    let parity = Action::from_table((0..4).map(|a| if a % 2 == 0 { vec![0, 1] } else { vec![1, 0] }).collect())
        .unwrap();
    let mod3 = Action::from_table((0..6).map(|a| (0..3).map(|x| (x + a) % 3).collect()).collect()).unwrap();
    vec![
        Signature::binary_swap(),
        Signature::symmetric(3),
        Signature::rotation(3),
        Signature::with_trivial_action(LabelGroup::cyclic(3), 1).unwrap(),
        Signature::with_trivial_action(LabelGroup::cyclic(2), 2).unwrap(),
        Signature::new(LabelGroup::cyclic(4), parity).unwrap(),
        Signature::new(LabelGroup::cyclic(6), mod3).unwrap(),
    ]
}

/// Depth limit keeping portraits of the given arity to a few thousand labels.
pub fn max_depth(k: usize) -> usize {
    match k {
        1 => 6,
        2 => 6,
        _ => 5,
    }
}

pub fn random_truncated<R: Rng>(rng: &mut R, sig: &Arc<Signature>, depth: usize) -> TruncatedElement {
    let m = sig.group().order();
    let n = sig.alphabet().up_to_len(depth);
    let labels = (0..n).map(|_| rng.gen_range(0..m) as Label).collect();
    TruncatedElement::from_labels(sig.clone(), depth, labels).unwrap()
}

/// A random element of `Triv(level)`.
pub fn random_triv<R: Rng>(rng: &mut R, sig: &Arc<Signature>, depth: usize, level: usize) -> TruncatedElement {
    let g = random_truncated(rng, sig, depth);
    let e = sig.identity();
    TruncatedElement::from_fn(sig.clone(), depth, |w| {
        if w.len() < level {
            e
        } else {
            g.label(w).unwrap()
        }
    })
    .unwrap()
}

pub fn random_fs<R: Rng>(rng: &mut R, sig: &Arc<Signature>, max_states: usize) -> FsElement {
    let m = sig.group().order();
    let k = sig.arity();
    let n = rng.gen_range(1..=max_states);
    // bias towards the identity so that sections stay sparse
    let labels = (0..n)
        .map(|_| if rng.gen_bool(0.3) { sig.identity() } else { rng.gen_range(0..m) as Label })
        .collect();
    let sections = (0..n).map(|_| (0..k).map(|_| rng.gen_range(0..n)).collect()).collect();
    FsElement::new(sig.clone(), labels, sections, 0).unwrap()
}

pub fn random_word<R: Rng>(rng: &mut R, k: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_letters((0..len).map(|_| rng.gen_range(0..k) as u8))
}

/// Random bundles over `n` states; every state gets at least one bundle with
/// the identity label when `trivial_everywhere` is set.
pub fn random_automaton<R: Rng>(
    rng: &mut R,
    sig: &Arc<Signature>,
    n: usize,
    density: f64,
    trivial_everywhere: bool,
) -> UnrestrictedRabinAutomaton {
    let m = sig.group().order();
    let k = sig.arity();
    let mut bundles = Vec::new();
    for from in 0..n {
        for label in 0..m {
            let tries = if label == sig.identity() as usize && trivial_everywhere { 1 + rng.gen_range(0..2) } else { 2 };
            for t in 0..tries {
                let forced = t == 0 && trivial_everywhere && label == sig.identity() as usize;
                if forced || rng.gen_bool(density) {
                    bundles.push(Bundle {
                        from,
                        label: label as Label,
                        to: (0..k).map(|_| rng.gen_range(0..n)).collect(),
                    });
                }
            }
        }
    }
    UnrestrictedRabinAutomaton::with_states(sig.clone(), n, bundles).unwrap()
}

/// A portrait of depth `depth` and a run for it, drawn top-down by picking a
/// random bundle at every vertex. Vertices above `triv_level` use bundles
/// with the identity label. Returns `None` when a state has no usable bundle.
pub fn random_labelled_run<R: Rng>(
    rng: &mut R,
    aut: &UnrestrictedRabinAutomaton,
    depth: usize,
    triv_level: usize,
) -> Option<(TruncatedElement, TruncatedRun)> {
    let sig = aut.signature().clone();
    let k = sig.arity();
    let e = sig.identity();
    let m = sig.group().order();
    let words = enumerate_words(sig.alphabet(), depth, WordSet::UpTo);
    let mut states = vec![0usize; words.len()];
    let mut labels = vec![e; words.len()];
    states[0] = rng.gen_range(0..aut.state_count());
    for (i, w) in words.iter().enumerate() {
        if w.len() == depth {
            labels[i] = rng.gen_range(0..m) as Label;
            continue;
        }
        let choices: Vec<&Bundle> = aut
            .bundles()
            .iter()
            .filter(|b| b.from == states[i] && (w.len() >= triv_level || b.label == e))
            .collect();
        let b = choices.choose(rng)?;
        labels[i] = b.label;
        for x in 0..k {
            states[i * k + 1 + x] = b.to[x];
        }
    }
    let g = TruncatedElement::from_labels(sig, depth, labels).unwrap();
    let run = TruncatedRun::new(k, depth, states).unwrap();
    Some((g, run))
}
