mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use treeshift::analysis::{ChainCache, LevelQuotient};
use treeshift::shifts::{
    admitted_blocks, admitted_count, all_blocks, allowed_blocks, allowed_blocks_of, approximate_by_induction,
    approximate_in_group, closure_vs_sft, forbidden_occurrences, sft_avoids, windows_allowed, AllowedBlockSet,
    SftDefinition, SftJson,
};
use treeshift::{presets, Execution, FsElement, Signature, TruncatedElement};

fn random_allowed(seed: u64, s: usize) -> AllowedBlockSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = Signature::binary_swap();
    let blocks = all_blocks(&sig, s, 1 << 16)
        .unwrap()
        .into_iter()
        .filter(|_| rng.gen_bool(0.6))
        .collect();
    AllowedBlockSet::new(sig, s, blocks).unwrap()
}

/// Every binary portrait of the given depth, filtered by window membership.
fn brute_force_admitted(allowed: &AllowedBlockSet, depth: usize) -> Vec<TruncatedElement> {
    let sig = allowed.signature().clone();
    let n = sig.alphabet().up_to_len(depth);
    (0u32..1 << n)
        .map(|code| {
            let labels = (0..n).map(|i| (code >> i & 1) as u16).collect();
            TruncatedElement::from_labels(sig.clone(), depth, labels).unwrap()
        })
        .filter(|t| windows_allowed(allowed, t, depth).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn window_counts_match_brute_force(seed in any::<u64>(), s in 1usize..=2, extra in 0usize..=2) {
        let allowed = random_allowed(seed, s);
        let depth = s - 1 + extra;
        let brute = brute_force_admitted(&allowed, depth);
        prop_assert_eq!(admitted_count(&allowed, depth).unwrap(), brute.len() as u128);
        let mut listed = admitted_blocks(&allowed, depth, 1 << 16).unwrap();
        let mut brute = brute;
        listed.sort();
        brute.sort();
        prop_assert_eq!(listed, brute);
    }

    #[test]
    fn sft_json_round_trip(seed in any::<u64>(), s in 1usize..=3) {
        let allowed = random_allowed(seed, s);
        let def = allowed.complement(1 << 16).unwrap();
        let text = serde_json::to_string(&def.to_json()).unwrap();
        let back: SftJson = serde_json::from_str(&text).unwrap();
        let back = back.into_definition(def.signature().clone()).unwrap();
        prop_assert_eq!(back.forbidden(), def.forbidden());
        let again = back.allowed(1 << 16).unwrap();
        prop_assert_eq!(again.blocks(), allowed.blocks());
    }

    #[test]
    fn avoidance_agrees_with_occurrences(seed in any::<u64>(), s in 1usize..=3) {
        let allowed = random_allowed(seed, s);
        let def: SftDefinition = allowed.complement(1 << 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let g = common::random_fs(&mut rng, def.signature(), 3);
        let depth = s + 2;
        let avoids = sft_avoids(&def, &g, depth).unwrap();
        prop_assert_eq!(avoids, windows_allowed(&allowed, &g, depth).unwrap());
        prop_assert_eq!(avoids, forbidden_occurrences(&def, &g, depth).unwrap().is_empty());
    }
}

fn c_elem(r: &treeshift::shifts::ClosureReport) -> TruncatedElement {
    r.counterexample.as_ref().unwrap().element.clone()
}

#[test]
fn groups_lie_inside_their_closures() {
    let cases = [presets::odometer(), presets::grigorchuk(), {
        let spec = presets::group_by_name("finitary").unwrap();
        let g = spec.elements();
        (spec.signature, g)
    }];
    for (sig, gens) in cases {
        let mut cache = ChainCache::new(sig.clone(), gens.clone());
        for s in 1..=3 {
            for depth in s - 1..=s + 1 {
                let r = closure_vs_sft(&mut cache, s, depth, 1 << 20, Execution::Sequential).unwrap();
                assert_eq!(r.equal, r.counterexample.is_none());
                // a group that is not self-similar can leave its own windows
                if r.counterexample.as_ref().is_some_and(|c| c.in_group) {
                    assert!(!windows_allowed(&allowed_blocks_of(sig.clone(), &gens, s, 1 << 20).unwrap(), &c_elem(&r), depth).unwrap());
                    continue;
                }
                assert!(r.admitted >= r.group_order, "{s} {depth} {r:?}");
                assert_eq!(r.equal, r.admitted == r.group_order);
            }
        }
    }
}

#[test]
fn odometer_counterexamples_are_admitted_non_members() {
    let (sig, gens) = presets::odometer();
    let mut cache = ChainCache::new(sig.clone(), gens.clone());
    for s in 1..=3 {
        let allowed = allowed_blocks(&LevelQuotient::enumerate(sig.clone(), &gens, s, 100, Execution::Sequential).unwrap()).unwrap();
        let depth = s;
        let r = closure_vs_sft(&mut cache, s, depth, 1 << 20, Execution::Sequential).unwrap();
        let c = r.counterexample.expect("odometer closure is not of finite type");
        let q = LevelQuotient::enumerate(sig.clone(), &gens, depth + 1, 1000, Execution::Sequential).unwrap();
        assert!(!q.contains(&c.element));
        assert!(windows_allowed(&allowed, &c.element, depth).unwrap());
        assert_eq!(q.order(), 1 << (depth + 1));
    }
}

#[test]
fn grigorchuk_approximations() {
    let (sig, gens) = presets::grigorchuk();
    let allowed = allowed_blocks_of(sig.clone(), &gens, 4, 1 << 20).unwrap();
    let mut cache = ChainCache::new(sig.clone(), gens.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let word: Vec<usize> = (0..rng.gen_range(1..12)).map(|_| rng.gen_range(0..4)).collect();
        let g = word
            .iter()
            .fold(FsElement::identity(sig.clone()), |acc, &i| acc.mul(&gens[i]).unwrap());
        let target = g.truncate(5);
        let a = approximate_in_group(&mut cache, &allowed, &target).unwrap();
        assert_eq!(a.element, target);
        assert_eq!(approximate_by_induction(&mut cache, &allowed, &target).unwrap(), target);
    }
}
