mod common;

use std::sync::Arc;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeshift::elements::FsElementJson;
use treeshift::{distance, Distance, FsElement, Label, Portrait, Signature, TruncatedElement, Word};

fn sig_and_depth() -> impl Strategy<Value = (Arc<Signature>, usize)> {
    let sigs = common::signatures();
    (0..sigs.len()).prop_flat_map(move |i| {
        let sig = sigs[i].clone();
        let d = common::max_depth(sig.arity()).min(4);
        (Just(sig), 0..=d)
    })
}

fn truncated(sig: Arc<Signature>, depth: usize) -> impl Strategy<Value = TruncatedElement> {
    let m = sig.group().order() as Label;
    let n = sig.alphabet().up_to_len(depth);
    prop::collection::vec(0..m, n).prop_map(move |labels| TruncatedElement::from_labels(sig.clone(), depth, labels).unwrap())
}

fn triple() -> impl Strategy<Value = (TruncatedElement, TruncatedElement, TruncatedElement)> {
    sig_and_depth().prop_flat_map(|(sig, d)| (truncated(sig.clone(), d), truncated(sig.clone(), d), truncated(sig, d)))
}

fn word_for(g: &TruncatedElement) -> impl Strategy<Value = Word> {
    let k = g.signature().arity() as u8;
    prop::collection::vec(0..k, 0..=g.depth() + 1).prop_map(Word::from_letters)
}

fn fs_pair() -> impl Strategy<Value = (FsElement, FsElement)> {
    let sigs = common::signatures();
    (0..sigs.len(), any::<u64>()).prop_map(move |(i, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = &sigs[i];
        (common::random_fs(&mut rng, sig, 4), common::random_fs(&mut rng, sig, 4))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn quotient_group_axioms((f, g, h) in triple()) {
        let id = TruncatedElement::identity(f.signature().clone(), f.depth());
        prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(f.mul(&id).unwrap(), f.clone());
        prop_assert_eq!(id.mul(&f).unwrap(), f.clone());
        prop_assert!(f.mul(&f.inv()).unwrap().is_identity());
        prop_assert!(f.inv().mul(&f).unwrap().is_identity());
    }

    #[test]
    fn action_preserves_length_and_prefixes((g, w) in triple().prop_flat_map(|(g, _, _)| { let s = word_for(&g); (Just(g), s) })) {
        let img = g.act(&w).unwrap();
        prop_assert_eq!(img.len(), w.len());
        for j in 0..=w.len() {
            prop_assert_eq!(g.act(&w.prefix(j)).unwrap(), img.prefix(j));
        }
        prop_assert_eq!(g.inv().act(&img).unwrap(), w);
    }

    #[test]
    fn section_identities((g, h, _) in triple(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = g.signature().arity();
        let w = common::random_word(&mut rng, k, g.depth());
        let gh = g.mul(&h).unwrap();
        let hw = h.act(&w).unwrap();
        // (gh)_w = g_{h(w)} h_w
        prop_assert_eq!(gh.section(&w).unwrap(), g.section(&hw).unwrap().mul(&h.section(&w).unwrap()).unwrap());
        // (gh)_(w) = g_(h(w)) h_(w)
        let grp = g.signature().group();
        prop_assert_eq!(gh.label(&w).unwrap(), grp.mul(g.label(&hw).unwrap(), h.label(&w).unwrap()));
        // (g_u)_v = g_{uv}
        let cut = rng.gen_range(0..=w.len());
        let (u, v) = (w.prefix(cut), Word::from_letters(w.letters()[cut..].iter().copied()));
        prop_assert_eq!(g.section(&u).unwrap().section(&v).unwrap(), g.section(&w).unwrap());
        // (g⁻¹)_(v) = (g_(g⁻¹(v)))⁻¹
        let gi = g.inv();
        let pre = gi.act(&w).unwrap();
        prop_assert_eq!(gi.label(&w).unwrap(), grp.inv(g.label(&pre).unwrap()));
    }

    #[test]
    fn disjoint_supports_commute((sig, d) in sig_and_depth(), seed in any::<u64>()) {
        prop_assume!(d >= 1 && sig.arity() >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = sig.arity();
        let u = common::random_word(&mut rng, k, d - 1);
        let u = if u.is_empty() { Word::from_letters([0]) } else { u };
        // flip the last letter so that uX* and vX* are disjoint
        let mut letters = u.letters().to_vec();
        let last = letters.len() - 1;
        letters[last] = ((letters[last] as usize + 1) % k) as u8;
        let v = Word::from_letters(letters);
        let a = common::random_truncated(&mut rng, &sig, d - u.len()).delta(&u).unwrap();
        let b = common::random_truncated(&mut rng, &sig, d - v.len()).delta(&v).unwrap();
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    }

    #[test]
    fn delta_identities((g, h, _) in triple(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = g.signature().arity();
        let v = common::random_word(&mut rng, k, 2);
        let u = common::random_word(&mut rng, k, 2);
        // [δ_{vu}(g)]_v = δ_u(g)
        prop_assert_eq!(g.delta(&v.concat(&u)).unwrap().section(&v).unwrap(), g.delta(&u).unwrap());
        // δ_v(δ_u(g)) = δ_{vu}(g)
        prop_assert_eq!(g.delta(&u).unwrap().delta(&v).unwrap(), g.delta(&v.concat(&u)).unwrap());
        // δ_v(gh) = δ_v(g) δ_v(h)
        prop_assert_eq!(g.mul(&h).unwrap().delta(&v).unwrap(), g.delta(&v).unwrap().mul(&h.delta(&v).unwrap()).unwrap());
        // Triv(n) shifts to Triv(n + |v|)
        let n = rng.gen_range(0..=g.depth() + 1);
        let t = common::random_triv(&mut rng, g.signature(), g.depth(), n);
        prop_assert!(t.delta(&v).unwrap().triv_level().at_least(n + v.len()));
    }

    #[test]
    fn stab_contains_triv((g, _, _) in triple()) {
        for n in 0..=g.depth() + 1 {
            if g.triv_level().at_least(n) {
                prop_assert!(g.stab_test(n).unwrap());
            }
        }
    }

    #[test]
    fn truncation_is_a_homomorphism((f, g) in fs_pair(), n in 0usize..=4) {
        let prod = f.mul(&g).unwrap();
        prop_assert_eq!(prod.truncate(n), f.truncate(n).mul(&g.truncate(n)).unwrap());
        prop_assert_eq!(f.inv().truncate(n), f.truncate(n).inv());
        prop_assert!(f.mul(&f.inv()).unwrap().is_identity());
        prop_assert_eq!(FsElement::from_truncation(&f.truncate(n)).truncate(n), f.truncate(n));
    }

    #[test]
    fn fs_sections_match_truncations((f, _) in fs_pair(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = f.signature().arity();
        let w = common::random_word(&mut rng, k, 3);
        prop_assert_eq!(f.section(&w).unwrap().truncate(2), f.truncate(5).section(&w).unwrap().restrict(2).unwrap());
        prop_assert_eq!(f.act(&w).unwrap(), f.truncate(3).act(&w).unwrap());
        prop_assert_eq!(f.delta(&w).unwrap().truncate(4), f.truncate(4).delta(&w).unwrap().restrict(4).unwrap());
    }

    #[test]
    fn json_round_trip((f, _) in fs_pair()) {
        let text = serde_json::to_string(&f.to_json()).unwrap();
        let json: FsElementJson = serde_json::from_str(&text).unwrap();
        let back = FsElement::from_json(f.signature().clone(), &json).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn distance_is_an_ultrametric((f, g, h) in triple()) {
        let d = f.depth();
        let dist = |a: &TruncatedElement, b: &TruncatedElement| distance(a, b, d).unwrap();
        prop_assert_eq!(dist(&f, &f), Distance::Zero);
        prop_assert_eq!(dist(&f, &g), dist(&g, &f));
        // first differing level: min(d(f,g), d(g,h)) ≤ d(f,h)
        let lvl = |x: Distance| match x { Distance::Zero => usize::MAX, Distance::Exact(n) | Distance::AtMost(n) => n };
        prop_assert!(lvl(dist(&f, &h)) >= lvl(dist(&f, &g)).min(lvl(dist(&g, &h))));
    }
}

#[test]
fn non_faithful_action_separates_stab_and_triv() {
    let sig = common::signatures().into_iter().find(|s| !s.is_faithful() && s.arity() == 2 && s.group().order() == 4).unwrap();
    // label 2 acts trivially but is not the identity
    let g = TruncatedElement::from_labels(sig.clone(), 1, vec![2, 0, 0]).unwrap();
    assert!(g.stab_test(2).unwrap());
    assert!(!g.triv_level().at_least(1));
    assert!(g.as_fs().is_none());
}
