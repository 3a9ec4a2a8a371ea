mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeshift::automata::{
    block_allowed, buchi_to_rabin, config_membership_depth, decide_finitely_supported_rays, decide_hb,
    graft_run, unrestricted_to_buchi, viable_states, AutomatonJson, TruncatedRun, UnrestrictedRabinAutomaton,
};
use treeshift::{presets, Execution, Signature, TruncatedElement};

/// Union of all state sets closed under "has a bundle into the set".
fn viable_by_subsets(aut: &UnrestrictedRabinAutomaton) -> BTreeSet<usize> {
    let n = aut.state_count();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let inside = |s: usize| mask >> s & 1 == 1;
        let closed = (0..n)
            .filter(|&s| inside(s))
            .all(|s| aut.bundles().iter().any(|b| b.from == s && b.to.iter().all(|&t| inside(t))));
        if closed {
            out.extend((0..n).filter(|&s| inside(s)));
        }
    }
    out
}

/// Tries every state assignment on `X^[size]`.
fn allowed_by_search(aut: &UnrestrictedRabinAutomaton, p: &TruncatedElement) -> bool {
    let viable = viable_by_subsets(aut);
    let k = aut.signature().arity();
    let n = aut.state_count();
    let size = p.depth() + 1;
    let vertices = p.signature().alphabet().up_to_len(size);
    let inner = p.signature().alphabet().up_to_len(size - 1);
    let total = n.pow(vertices as u32);
    (0..total).any(|mut code| {
        let states: Vec<usize> = (0..vertices)
            .map(|_| {
                let s = code % n;
                code /= n;
                s
            })
            .collect();
        states[inner..].iter().all(|s| viable.contains(s))
            && (0..inner).all(|i| {
                let to: Vec<usize> = (0..k).map(|x| states[i * k + 1 + x]).collect();
                aut.has_bundle(states[i], p.label_at_index(i), &to)
            })
    })
}

fn small_automaton() -> impl Strategy<Value = UnrestrictedRabinAutomaton> {
    (1usize..=3, 0.05f64..0.6, any::<u64>()).prop_map(|(n, density, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        common::random_automaton(&mut rng, &Signature::binary_swap(), n, density, false)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn viable_states_are_the_greatest_fixpoint(aut in small_automaton()) {
        prop_assert_eq!(viable_states(&aut), viable_by_subsets(&aut));
    }

    #[test]
    fn block_check_matches_exhaustive_search(aut in small_automaton(), code in 0u32..8, seed in any::<u64>()) {
        let sig = aut.signature().clone();
        // sizes 1 and 2 are searched exhaustively
        let size = if seed % 2 == 0 { 1 } else { 2 };
        let labels = (0..sig.alphabet().up_to_len(size - 1)).map(|i| (code >> i & 1) as u16).collect();
        let p = TruncatedElement::from_labels(sig, size - 1, labels).unwrap();
        let check = block_allowed(&aut, &p, Execution::Sequential);
        prop_assert_eq!(check.allowed, allowed_by_search(&aut, &p));
        if let Some(run) = check.run {
            prop_assert_eq!(run.depth(), size);
            run.validate(&aut, &p).unwrap();
        }
        prop_assert_eq!(check.allowed, block_allowed(&aut, &p, Execution::Parallel).allowed);
    }

    #[test]
    fn allowed_blocks_are_closed_under_restriction(aut in small_automaton(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = aut.signature().clone();
        let g = common::random_fs(&mut rng, &sig, 3);
        for n in 1..=4 {
            if config_membership_depth(&aut, &g, n) {
                prop_assert!(config_membership_depth(&aut, &g, n - 1));
            }
        }
    }

    #[test]
    fn grafting_keeps_runs_valid(aut in small_automaton(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = aut.signature().clone();
        let a = common::random_truncated(&mut rng, &sig, 3);
        let b = common::random_truncated(&mut rng, &sig, 3);
        let (ca, cb) = (block_allowed(&aut, &a, Execution::Sequential), block_allowed(&aut, &b, Execution::Sequential));
        if let (Some(ra), Some(rb)) = (ca.run, cb.run) {
            let v = common::random_word(&mut rng, 2, 3);
            let matches = a.label(&v) == b.label(&treeshift::Word::empty()) && ra.state(&v) == rb.state(&treeshift::Word::empty());
            match graft_run(&aut, &a, &ra, &b, &rb, &v) {
                Ok((g, run)) => {
                    prop_assert!(matches);
                    run.validate(&aut, &g).unwrap();
                    prop_assert_eq!(g.section(&v).unwrap(), b.restrict(3 - v.len()).unwrap());
                }
                Err(_) => prop_assert!(!matches),
            }
        }
    }

    #[test]
    fn uniform_labels_imply_finite_rays(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = common::random_fs(&mut rng, &Signature::binary_swap(), 4);
        if decide_hb(&g, &[0]).unwrap() {
            prop_assert!(decide_finitely_supported_rays(&g));
        }
        prop_assert!(decide_hb(&g, &[0, 1]).unwrap());
    }
}

#[test]
fn finitely_supported_rays_is_strictly_weaker() {
    let (_, gens) = presets::grigorchuk();
    let b = &gens[1];
    assert!(decide_finitely_supported_rays(b));
    assert!(!decide_hb(b, &[0]).unwrap());
}

#[test]
fn buchi_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sig = Signature::binary_swap();
    for _ in 0..50 {
        let n = rng.gen_range(1..=3);
        let aut = common::random_automaton(&mut rng, &sig, n, 0.4, false);
        let b = unrestricted_to_buchi(&aut);
        assert_eq!(b.automaton.bundles(), aut.bundles());
        let r = buchi_to_rabin(&b).unwrap();
        assert_eq!(r.automaton.bundles(), aut.bundles());
        let json = serde_json::to_string(&aut.to_json()).unwrap();
        let back: AutomatonJson = serde_json::from_str(&json).unwrap();
        let back = back.into_automaton(sig.clone()).unwrap();
        assert_eq!(back.underlying().bundles(), aut.bundles());
    }
}

#[test]
fn runs_reject_wrong_labels() {
    let sig = Signature::binary_swap();
    let aut = UnrestrictedRabinAutomaton::identity_acceptor(sig.clone());
    let run = TruncatedRun::constant(2, 2, 0);
    run.validate(&aut, &TruncatedElement::identity(sig.clone(), 2)).unwrap();
    let sigma = TruncatedElement::from_labels(sig, 1, vec![1, 0, 0]).unwrap();
    assert!(run.validate(&aut, &sigma).is_err());
}
