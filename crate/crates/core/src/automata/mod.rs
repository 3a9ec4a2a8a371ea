//! Tree automata over labelled `k`-ary trees.
//!
//! An unrestricted Rabin automaton is a set of transition bundles
//! `(s, a, (s_x)_{x∈X})`; a configuration is accepted when it admits a run,
//! i.e. a state assignment on `X*` with every vertex read through a bundle.
//! Büchi and Rabin automata add initial states and acceptance conditions.

mod deciders;
mod run;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elements::ElementError;
use crate::group::{Label, Signature};

pub use deciders::{decide_finitely_supported_rays, decide_hb};
pub use run::{block_allowed, config_membership_depth, graft_run, viable_states, BlockCheck, TruncatedRun};

/// State sets are bitmasks, which bounds the number of states.
pub const MAX_STATES: usize = 64;

/// Subset enumeration for Büchi-to-Rabin conversion is exponential.
pub const MAX_SUBSET_STATES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("automaton has no states")]
    NoStates,
    #[error("automaton has {0} states, at most {MAX_STATES} are supported")]
    TooManyStates(usize),
    #[error("bundle {index} is malformed: {reason}")]
    BadBundle { index: usize, reason: String },
    #[error("unknown state {0:?}")]
    UnknownState(String),
    #[error("duplicate state name {0:?}")]
    DuplicateState(String),
    #[error("initial state set is empty")]
    NoInitialStates,
    #[error("subset construction over {0} states exceeds the limit of {MAX_SUBSET_STATES}")]
    SubsetLimit(usize),
    #[error("label set {0:?} is not a subgroup")]
    NotSubgroup(Vec<Label>),
    #[error("run has depth {run}, labels need depth {labels}")]
    RunDepth { run: usize, labels: usize },
    #[error("bundle condition fails at vertex {vertex}")]
    NotARun { vertex: String },
    #[error("grafting hypothesis fails: {0}")]
    GraftHypothesis(GraftCondition),
    #[error(transparent)]
    Element(#[from] ElementError),
}

/// The two hypotheses of the grafting construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraftCondition {
    /// `a_(v) = b_(ε)`
    LabelsDiffer,
    /// `r_a(v) = r_b(ε)`
    StatesDiffer,
}

impl std::fmt::Display for GraftCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraftCondition::LabelsDiffer => "label of a at v differs from root label of b",
            GraftCondition::StatesDiffer => "run of a at v differs from root state of run of b",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle {
    pub from: usize,
    pub label: Label,
    pub to: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct UnrestrictedRabinAutomaton {
    sig: Arc<Signature>,
    names: Vec<String>,
    bundles: Vec<Bundle>,
    /// bundle indices keyed by `from * |A| + label`
    index: Vec<Vec<usize>>,
}

impl UnrestrictedRabinAutomaton {
    pub fn new(sig: Arc<Signature>, names: Vec<String>, bundles: Vec<Bundle>) -> Result<Self, AutomatonError> {
        let n = names.len();
        if n == 0 {
            return Err(AutomatonError::NoStates);
        }
        if n > MAX_STATES {
            return Err(AutomatonError::TooManyStates(n));
        }
        let mut seen = std::collections::HashSet::new();
        if let Some(dup) = names.iter().find(|s| !seen.insert(s.as_str())) {
            return Err(AutomatonError::DuplicateState(dup.clone()));
        }
        let k = sig.arity();
        let m = sig.group().order();
        let mut bundles = bundles;
        bundles.sort();
        bundles.dedup();
        for (i, b) in bundles.iter().enumerate() {
            let bad = |reason: String| AutomatonError::BadBundle { index: i, reason };
            if b.from >= n || b.to.iter().any(|&t| t >= n) {
                return Err(bad("state out of range".into()));
            }
            if b.label as usize >= m {
                return Err(bad(format!("label {} out of range", b.label)));
            }
            if b.to.len() != k {
                return Err(bad(format!("{} targets for an alphabet of {k} letters", b.to.len())));
            }
        }
        let mut index = vec![Vec::new(); n * m];
        for (i, b) in bundles.iter().enumerate() {
            index[b.from * m + b.label as usize].push(i);
        }
        Ok(UnrestrictedRabinAutomaton {
            sig,
            names,
            bundles,
            index,
        })
    }

    /// Names states `s0, s1, ..`.
    pub fn with_states(sig: Arc<Signature>, states: usize, bundles: Vec<Bundle>) -> Result<Self, AutomatonError> {
        Self::new(sig, (0..states).map(|i| format!("s{i}")).collect(), bundles)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.names
    }

    pub fn state_id(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|s| s == name)
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub(crate) fn bundles_for(&self, s: usize, a: Label) -> impl Iterator<Item = &Bundle> {
        let m = self.sig.group().order();
        self.index[s * m + a as usize].iter().map(move |&i| &self.bundles[i])
    }

    pub fn has_bundle(&self, s: usize, a: Label, to: &[usize]) -> bool {
        self.bundles_for(s, a).any(|b| b.to == to)
    }

    /// One state with a self-loop bundle for every label: accepts everything.
    pub fn full_shift(sig: Arc<Signature>) -> Self {
        let k = sig.arity();
        let bundles = sig
            .group()
            .elements()
            .map(|a| Bundle {
                from: 0,
                label: a,
                to: vec![0; k],
            })
            .collect();
        Self::with_states(sig, 1, bundles).expect("well formed")
    }

    /// Accepts only the all-identity configuration.
    pub fn identity_acceptor(sig: Arc<Signature>) -> Self {
        let k = sig.arity();
        let e = sig.identity();
        Self::with_states(
            sig,
            1,
            vec![Bundle {
                from: 0,
                label: e,
                to: vec![0; k],
            }],
        )
        .expect("well formed")
    }

    pub fn to_json(&self) -> AutomatonJson {
        AutomatonJson {
            states: self.names.clone(),
            bundles: self
                .bundles
                .iter()
                .map(|b| BundleJson {
                    from: self.names[b.from].clone(),
                    label: b.label as usize,
                    to: b.to.iter().map(|&t| self.names[t].clone()).collect(),
                })
                .collect(),
            initial: None,
            accepting: None,
            accepting_sets: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BuchiAutomaton {
    pub automaton: UnrestrictedRabinAutomaton,
    pub initial: BTreeSet<usize>,
    pub accepting: BTreeSet<usize>,
}

impl BuchiAutomaton {
    pub fn new(
        automaton: UnrestrictedRabinAutomaton,
        initial: BTreeSet<usize>,
        accepting: BTreeSet<usize>,
    ) -> Result<Self, AutomatonError> {
        check_states(&automaton, &initial)?;
        check_states(&automaton, &accepting)?;
        if initial.is_empty() {
            return Err(AutomatonError::NoInitialStates);
        }
        Ok(BuchiAutomaton {
            automaton,
            initial,
            accepting,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RabinAutomaton {
    pub automaton: UnrestrictedRabinAutomaton,
    pub initial: BTreeSet<usize>,
    pub accepting_sets: Vec<BTreeSet<usize>>,
}

impl RabinAutomaton {
    pub fn new(
        automaton: UnrestrictedRabinAutomaton,
        initial: BTreeSet<usize>,
        accepting_sets: Vec<BTreeSet<usize>>,
    ) -> Result<Self, AutomatonError> {
        check_states(&automaton, &initial)?;
        for set in &accepting_sets {
            check_states(&automaton, set)?;
        }
        if initial.is_empty() {
            return Err(AutomatonError::NoInitialStates);
        }
        Ok(RabinAutomaton {
            automaton,
            initial,
            accepting_sets,
        })
    }
}

fn check_states(aut: &UnrestrictedRabinAutomaton, set: &BTreeSet<usize>) -> Result<(), AutomatonError> {
    match set.iter().find(|&&s| s >= aut.state_count()) {
        Some(s) => Err(AutomatonError::UnknownState(s.to_string())),
        None => Ok(()),
    }
}

/// Accepting sets are the subsets of `S` meeting `F`, ordered by bitmask.
pub fn buchi_to_rabin(b: &BuchiAutomaton) -> Result<RabinAutomaton, AutomatonError> {
    let n = b.automaton.state_count();
    if n > MAX_SUBSET_STATES {
        return Err(AutomatonError::SubsetLimit(n));
    }
    let f: u64 = b.accepting.iter().fold(0, |m, &s| m | 1 << s);
    let accepting_sets = (1u64..1 << n)
        .filter(|mask| mask & f != 0)
        .map(|mask| (0..n).filter(|s| mask >> s & 1 == 1).collect())
        .collect();
    RabinAutomaton::new(b.automaton.clone(), b.initial.clone(), accepting_sets)
}

/// Every state initial and accepting.
pub fn unrestricted_to_buchi(aut: &UnrestrictedRabinAutomaton) -> BuchiAutomaton {
    let all: BTreeSet<usize> = (0..aut.state_count()).collect();
    BuchiAutomaton {
        automaton: aut.clone(),
        initial: all.clone(),
        accepting: all,
    }
}

/// The Büchi automaton whose language is the set of configurations with all
/// labels in the subgroup `B` beyond some depth: state `s1` guesses freely,
/// then commits to `s2`, which reads only labels from `B`.
pub fn example1_automaton(sig: Arc<Signature>, subgroup: &[Label]) -> Result<BuchiAutomaton, AutomatonError> {
    if !sig.group().is_subgroup(subgroup) {
        return Err(AutomatonError::NotSubgroup(subgroup.to_vec()));
    }
    let k = sig.arity();
    let mut bundles = Vec::new();
    for a in sig.group().elements() {
        bundles.push(Bundle {
            from: 0,
            label: a,
            to: vec![0; k],
        });
    }
    for &b in subgroup {
        bundles.push(Bundle {
            from: 0,
            label: b,
            to: vec![1; k],
        });
        bundles.push(Bundle {
            from: 1,
            label: b,
            to: vec![1; k],
        });
    }
    let aut = UnrestrictedRabinAutomaton::new(sig, vec!["s1".into(), "s2".into()], bundles)?;
    BuchiAutomaton::new(aut, BTreeSet::from([0]), BTreeSet::from([1]))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleJson {
    pub from: String,
    pub label: usize,
    pub to: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub states: Vec<String>,
    pub bundles: Vec<BundleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepting: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accepting_sets: Option<Vec<Vec<String>>>,
}

/// An automaton read from JSON; the kind follows the fields present.
#[derive(Debug, Clone)]
pub enum AnyAutomaton {
    Unrestricted(UnrestrictedRabinAutomaton),
    Buchi(BuchiAutomaton),
    Rabin(RabinAutomaton),
}

impl AnyAutomaton {
    pub fn underlying(&self) -> &UnrestrictedRabinAutomaton {
        match self {
            AnyAutomaton::Unrestricted(a) => a,
            AnyAutomaton::Buchi(b) => &b.automaton,
            AnyAutomaton::Rabin(r) => &r.automaton,
        }
    }
}

impl AutomatonJson {
    pub fn into_automaton(self, sig: Arc<Signature>) -> Result<AnyAutomaton, AutomatonError> {
        let ids: HashMap<&str, usize> = self.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let id = |s: &str| ids.get(s).copied().ok_or_else(|| AutomatonError::UnknownState(s.to_string()));
        let mut bundles = Vec::with_capacity(self.bundles.len());
        for (i, b) in self.bundles.iter().enumerate() {
            if b.label > Label::MAX as usize {
                return Err(AutomatonError::BadBundle {
                    index: i,
                    reason: format!("label {} out of range", b.label),
                });
            }
            bundles.push(Bundle {
                from: id(&b.from)?,
                label: b.label as Label,
                to: b.to.iter().map(|t| id(t)).collect::<Result<_, _>>()?,
            });
        }
        let set = |names: &[String]| names.iter().map(|s| id(s)).collect::<Result<BTreeSet<_>, _>>();
        let initial = self.initial.as_deref().map(set).transpose()?;
        let accepting = self.accepting.as_deref().map(set).transpose()?;
        let accepting_sets = self
            .accepting_sets
            .as_deref()
            .map(|sets| sets.iter().map(|s| set(s)).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        let aut = UnrestrictedRabinAutomaton::new(sig, self.states.clone(), bundles)?;
        let all: BTreeSet<usize> = (0..aut.state_count()).collect();
        Ok(match (accepting, accepting_sets) {
            (None, None) if initial.is_none() => AnyAutomaton::Unrestricted(aut),
            (accepting, None) => {
                let acc = accepting.unwrap_or_else(|| all.clone());
                AnyAutomaton::Buchi(BuchiAutomaton::new(aut, initial.unwrap_or(all), acc)?)
            }
            (_, Some(sets)) => AnyAutomaton::Rabin(RabinAutomaton::new(aut, initial.unwrap_or(all), sets)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rabin_sets_meet_accepting_states() {
        let sig = Signature::binary_swap();
        let b = example1_automaton(sig.clone(), &[0]).unwrap();
        let r = buchi_to_rabin(&b).unwrap();
        let sets: Vec<Vec<usize>> = r.accepting_sets.iter().map(|s| s.iter().copied().collect()).collect();
        assert_eq!(sets, vec![vec![1], vec![0, 1]]);

        let none = BuchiAutomaton::new(b.automaton.clone(), BTreeSet::from([0]), BTreeSet::new()).unwrap();
        assert!(buchi_to_rabin(&none).unwrap().accepting_sets.is_empty());

        let all = unrestricted_to_buchi(&b.automaton);
        assert_eq!(all.initial, BTreeSet::from([0, 1]));
        assert_eq!(buchi_to_rabin(&all).unwrap().accepting_sets.len(), 3);
    }

    #[test]
    fn malformed_bundles_are_rejected() {
        let sig = Signature::binary_swap();
        let short = Bundle {
            from: 0,
            label: 0,
            to: vec![0],
        };
        assert!(matches!(
            UnrestrictedRabinAutomaton::with_states(sig.clone(), 1, vec![short]),
            Err(AutomatonError::BadBundle { .. })
        ));
        assert!(example1_automaton(sig, &[1]).is_err());
    }

    #[test]
    fn json_round_trip_picks_kind() {
        let sig = Signature::binary_swap();
        let b = example1_automaton(sig.clone(), &[0]).unwrap();
        let mut json = b.automaton.to_json();
        json.initial = Some(vec!["s1".into()]);
        json.accepting = Some(vec!["s2".into()]);
        let text = serde_json::to_string(&json).unwrap();
        let back: AutomatonJson = serde_json::from_str(&text).unwrap();
        match back.into_automaton(sig).unwrap() {
            AnyAutomaton::Buchi(bb) => {
                assert_eq!(bb.accepting, BTreeSet::from([1]));
                assert_eq!(bb.automaton.bundles(), b.automaton.bundles());
            }
            other => panic!("expected a Büchi automaton, got {other:?}"),
        }
    }
}
