//! Built-in groups and automata, and the group file format.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::automata::{example1_automaton, AutomatonError, BuchiAutomaton};
use crate::elements::fs::{resolve_states, state_index};
use crate::elements::{ElementError, FsElement, FsStateJson, TruncatedElement};
use crate::group::{GroupError, Label, LabelGroup, Signature, SignatureJson};
use crate::words::Word;

/// A self-similar group given by named finite-state generators.
#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub name: String,
    pub signature: Arc<Signature>,
    pub generators: Vec<(String, FsElement)>,
}

impl GroupSpec {
    pub fn elements(&self) -> Vec<FsElement> {
        self.generators.iter().map(|(_, g)| g.clone()).collect()
    }

    pub fn generator(&self, name: &str) -> Option<&FsElement> {
        self.generators.iter().find(|(n, _)| n == name).map(|(_, g)| g)
    }
}

/// `{"label_group": {..}, "states": [..], "generators": [..]}`: one shared
/// wreath recursion whose named states generate the group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub label_group: SignatureJson,
    pub states: Vec<FsStateJson>,
    pub generators: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum PresetError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("unknown preset {0:?}")]
    Unknown(String),
}

impl GroupFile {
    pub fn into_spec(self, name: &str) -> Result<GroupSpec, PresetError> {
        let signature = self.label_group.into_signature()?;
        let index = state_index(&self.states)?;
        let (labels, sections) = resolve_states(&self.states, &index)?;
        let mut generators = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            let q = *index
                .get(g.as_str())
                .ok_or_else(|| ElementError::Malformed(format!("unknown generator state {g:?}")))?;
            let elem = FsElement::new(signature.clone(), labels.clone(), sections.clone(), q)?;
            generators.push((g.clone(), elem));
        }
        Ok(GroupSpec {
            name: name.to_string(),
            signature,
            generators,
        })
    }

    pub fn from_spec(spec: &GroupSpec) -> Self {
        // generators share no state names, so each is written out separately
        let mut states = Vec::new();
        let mut generators = Vec::new();
        for (name, g) in &spec.generators {
            let json = g.to_json();
            let rename: HashMap<String, String> = json
                .states
                .iter()
                .map(|s| (s.name.clone(), format!("{name}.{}", s.name)))
                .collect();
            generators.push(rename[&json.initial].clone());
            states.extend(json.states.into_iter().map(|s| FsStateJson {
                name: rename[&s.name].clone(),
                label: s.label,
                sections: s.sections.iter().map(|t| rename[t].clone()).collect(),
            }));
        }
        GroupFile {
            label_group: spec.signature.to_json(),
            states,
            generators,
        }
    }
}

fn recursion(sig: &Arc<Signature>, table: &[(&str, Label, [&str; 2])], gens: &[&str], name: &str) -> GroupSpec {
    let states = table
        .iter()
        .map(|(n, l, s)| FsStateJson {
            name: n.to_string(),
            label: *l as usize,
            sections: s.iter().map(|t| t.to_string()).collect(),
        })
        .collect::<Vec<_>>();
    let index = state_index(&states).expect("distinct names");
    let (labels, sections) = resolve_states(&states, &index).expect("closed table");
    GroupSpec {
        name: name.to_string(),
        signature: sig.clone(),
        generators: gens
            .iter()
            .map(|g| {
                let elem = FsElement::new(sig.clone(), labels.clone(), sections.clone(), index[g]).expect("valid");
                (g.to_string(), elem)
            })
            .collect(),
    }
}

/// The adding machine `a = σ(e, a)`.
pub fn odometer_spec() -> GroupSpec {
    let sig = Signature::binary_swap();
    recursion(&sig, &[("a", 1, ["e", "a"]), ("e", 0, ["e", "e"])], &["a"], "odometer")
}

/// `a = σ(e, e)`, `b = (a, c)`, `c = (a, d)`, `d = (e, b)`.
pub fn grigorchuk_spec() -> GroupSpec {
    let sig = Signature::binary_swap();
    recursion(
        &sig,
        &[
            ("a", 1, ["e", "e"]),
            ("b", 0, ["a", "c"]),
            ("c", 0, ["a", "d"]),
            ("d", 0, ["e", "b"]),
            ("e", 0, ["e", "e"]),
        ],
        &["a", "b", "c", "d"],
        "grigorchuk",
    )
}

/// The trivial group over `k` letters with labels in `C2`.
pub fn trivial_spec(k: usize) -> GroupSpec {
    let sig = Signature::with_trivial_action(LabelGroup::cyclic(2), k).expect("trivial action");
    GroupSpec {
        name: "trivial".into(),
        signature: sig,
        generators: Vec::new(),
    }
}

pub fn odometer() -> (Arc<Signature>, Vec<FsElement>) {
    let spec = odometer_spec();
    let gens = spec.elements();
    (spec.signature, gens)
}

pub fn grigorchuk() -> (Arc<Signature>, Vec<FsElement>) {
    let spec = grigorchuk_spec();
    let gens = spec.elements();
    (spec.signature, gens)
}

/// The finitary element with the single nontrivial label `σ` at `w`.
pub fn finitary_delta(w: &Word) -> Result<FsElement, ElementError> {
    let sig = Signature::binary_swap();
    let sigma = TruncatedElement::from_labels(sig, 0, vec![1])?;
    FsElement::from_truncation(&sigma).delta(w)
}

/// Finitary elements used as a corpus: `δ_w(σ)` for a few `w`.
pub fn finitary_corpus() -> Vec<FsElement> {
    ["", "0", "1", "01", "110"]
        .iter()
        .map(|w| finitary_delta(&w.parse().expect("binary word")).expect("binary word"))
        .collect()
}

/// The Büchi automaton for labels eventually in `B` over the binary swap group.
pub fn example1(subgroup: &[Label]) -> Result<BuchiAutomaton, AutomatonError> {
    example1_automaton(Signature::binary_swap(), subgroup)
}

/// Looks up `odometer`, `grigorchuk`, `trivial` or `finitary` (generated by
/// `δ_0(σ)` and `δ_1(σ)`).
pub fn group_by_name(name: &str) -> Result<GroupSpec, PresetError> {
    match name {
        "odometer" => Ok(odometer_spec()),
        "grigorchuk" => Ok(grigorchuk_spec()),
        "trivial" => Ok(trivial_spec(2)),
        "finitary" | "finitary_delta" => {
            let sig = Signature::binary_swap();
            let generators = ["0", "1"]
                .iter()
                .map(|w| {
                    let g = finitary_delta(&w.parse().expect("binary word"))?;
                    Ok((format!("delta_{w}"), g))
                })
                .collect::<Result<Vec<_>, ElementError>>()?;
            Ok(GroupSpec {
                name: "finitary".into(),
                signature: sig,
                generators,
            })
        }
        other => Err(PresetError::Unknown(other.to_string())),
    }
}
