//! Finite label groups `A` given by tables, together with a left action on
//! the tree alphabet `X`. The action need not be faithful.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::words::{Alphabet, Letter, WordError};

pub type Label = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Associativity,
    Identity,
    Inverses,
    ActionHomomorphism,
    ActionBijectivity,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Axiom::Associativity => "associativity",
            Axiom::Identity => "identity",
            Axiom::Inverses => "inverses",
            Axiom::ActionHomomorphism => "action homomorphism",
            Axiom::ActionBijectivity => "action bijectivity",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("malformed tables: {0}")]
    Structural(String),
    #[error("{axiom} fails, witness {witness:?}")]
    Axiom { axiom: Axiom, witness: Vec<usize> },
    #[error(transparent)]
    Alphabet(#[from] WordError),
}

/// A finite group stored as a dense multiplication table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGroup {
    order: usize,
    mult: Vec<Label>,
    inverse: Vec<Label>,
    identity: Label,
    names: Option<Vec<String>>,
}

impl LabelGroup {
    /// Checks only dimensions and index ranges; the group axioms are checked
    /// by [`validate_group_and_action`].
    pub fn from_tables(
        mult: Vec<Vec<usize>>,
        inverse: Vec<usize>,
        identity: usize,
        names: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        let order = mult.len();
        if order == 0 || order > Label::MAX as usize {
            return Err(GroupError::Structural(format!("group order {order} out of range")));
        }
        if mult.iter().any(|row| row.len() != order) {
            return Err(GroupError::Structural("mult must be an m×m table".into()));
        }
        if inverse.len() != order {
            return Err(GroupError::Structural("inverse must have m entries".into()));
        }
        if identity >= order {
            return Err(GroupError::Structural("identity index out of range".into()));
        }
        if mult.iter().flatten().chain(inverse.iter()).any(|&v| v >= order) {
            return Err(GroupError::Structural("table entry out of range".into()));
        }
        if let Some(n) = &names {
            if n.len() != order {
                return Err(GroupError::Structural("names must have m entries".into()));
            }
        }
        Ok(LabelGroup {
            order,
            mult: mult.into_iter().flatten().map(|v| v as Label).collect(),
            inverse: inverse.into_iter().map(|v| v as Label).collect(),
            identity: identity as Label,
            names,
        })
    }

    /// The cyclic group `Z/m`, element `i` standing for `i mod m`.
    pub fn cyclic(m: usize) -> Self {
        let mult = (0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect();
        let inverse = (0..m).map(|a| (m - a) % m).collect();
        LabelGroup::from_tables(mult, inverse, 0, None).expect("cyclic tables are well formed")
    }

    /// Closes a set of permutations of `{0..degree-1}` under composition and
    /// returns the group table together with the permutation of each element.
    /// Element `0` is the identity; the rest follow in breadth-first order.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> (Self, Vec<Vec<usize>>) {
        let id: Vec<usize> = (0..degree).collect();
        let mut perms = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < perms.len() {
            for g in gens {
                // (g ∘ p)(x) = g(p(x))
                let q: Vec<usize> = perms[i].iter().map(|&x| g[x]).collect();
                if !index.contains_key(&q) {
                    index.insert(q.clone(), perms.len());
                    perms.push(q);
                }
            }
            i += 1;
        }
        let compose = |a: &Vec<usize>, b: &Vec<usize>| -> Vec<usize> { b.iter().map(|&x| a[x]).collect() };
        let mult = perms
            .iter()
            .map(|a| perms.iter().map(|b| index[&compose(a, b)]).collect())
            .collect();
        let inverse = perms
            .iter()
            .map(|a| {
                let mut inv = vec![0; degree];
                for (x, &y) in a.iter().enumerate() {
                    inv[y] = x;
                }
                index[&inv]
            })
            .collect();
        let group = LabelGroup::from_tables(mult, inverse, 0, None).expect("permutation closure is well formed");
        (group, perms)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, GroupError> {
        if names.len() != self.order {
            return Err(GroupError::Structural("names must have m entries".into()));
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Label {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: Label, b: Label) -> Label {
        self.mult[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: Label) -> Label {
        self.inverse[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = Label> {
        (0..self.order).map(|a| a as Label)
    }

    pub fn name(&self, a: Label) -> String {
        match &self.names {
            Some(n) => n[a as usize].clone(),
            None => a.to_string(),
        }
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn mult_table(&self) -> Vec<Vec<usize>> {
        self.mult
            .chunks(self.order)
            .map(|r| r.iter().map(|&v| v as usize).collect())
            .collect()
    }

    pub fn inverse_table(&self) -> Vec<usize> {
        self.inverse.iter().map(|&v| v as usize).collect()
    }

    /// True when `subset` is nonempty and closed under products and inverses.
    pub fn is_subgroup(&self, subset: &[Label]) -> bool {
        let mut member = vec![false; self.order];
        for &b in subset {
            if b as usize >= self.order {
                return false;
            }
            member[b as usize] = true;
        }
        !subset.is_empty()
            && subset.iter().all(|&a| member[self.inv(a) as usize])
            && subset
                .iter()
                .all(|&a| subset.iter().all(|&b| member[self.mul(a, b) as usize]))
    }
}

/// `φ(a)(x)` for every label `a` and letter `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    arity: usize,
    table: Vec<Letter>,
}

impl Action {
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let arity = table.first().map_or(0, |r| r.len());
        if arity == 0 || arity > Letter::MAX as usize {
            return Err(GroupError::Structural("action rows must be nonempty".into()));
        }
        if table.iter().any(|r| r.len() != arity) {
            return Err(GroupError::Structural("action must be an m×k table".into()));
        }
        if table.iter().flatten().any(|&x| x >= arity) {
            return Err(GroupError::Structural("action entry out of range".into()));
        }
        Ok(Action {
            arity,
            table: table.into_iter().flatten().map(|x| x as Letter).collect(),
        })
    }

    /// Every label acts as the identity on `k` letters.
    pub fn trivial(order: usize, k: usize) -> Self {
        Action::from_table(vec![(0..k).collect(); order]).expect("trivial action is well formed")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn rows(&self) -> usize {
        self.table.len() / self.arity
    }

    #[inline]
    pub fn apply(&self, a: Label, x: Letter) -> Letter {
        self.table[a as usize * self.arity + x as usize]
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table
            .chunks(self.arity)
            .map(|r| r.iter().map(|&x| x as usize).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomCheck {
    pub axiom: Axiom,
    pub passed: bool,
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// Checks the group axioms of the table and the left-action axioms of `φ`.
pub fn validate_group_and_action(g: &LabelGroup, act: &Action) -> Result<ValidationReport, GroupError> {
    if act.rows() != g.order() {
        return Err(GroupError::Structural(format!(
            "action has {} rows but the group has order {}",
            act.rows(),
            g.order()
        )));
    }
    let elems: Vec<Label> = g.elements().collect();
    let e = g.identity();

    let assoc = elems.iter().find_map(|&a| {
        elems.iter().find_map(|&b| {
            elems
                .iter()
                .find(|&&c| g.mul(g.mul(a, b), c) != g.mul(a, g.mul(b, c)))
                .map(|&c| vec![a as usize, b as usize, c as usize])
        })
    });
    let ident = elems
        .iter()
        .find(|&&a| g.mul(e, a) != a || g.mul(a, e) != a)
        .map(|&a| vec![a as usize]);
    let inverses = elems
        .iter()
        .find(|&&a| g.mul(a, g.inv(a)) != e || g.mul(g.inv(a), a) != e)
        .map(|&a| vec![a as usize]);
    let letters: Vec<Letter> = (0..act.arity()).map(|x| x as Letter).collect();
    let hom = letters
        .iter()
        .find(|&&x| act.apply(e, x) != x)
        .map(|&x| vec![e as usize, e as usize, x as usize])
        .or_else(|| {
            elems.iter().find_map(|&a| {
                elems.iter().find_map(|&b| {
                    letters
                        .iter()
                        .find(|&&x| act.apply(a, act.apply(b, x)) != act.apply(g.mul(a, b), x))
                        .map(|&x| vec![a as usize, b as usize, x as usize])
                })
            })
        });
    let bij = elems
        .iter()
        .find(|&&a| {
            let mut seen = vec![false; act.arity()];
            letters.iter().for_each(|&x| seen[act.apply(a, x) as usize] = true);
            seen.contains(&false)
        })
        .map(|&a| vec![a as usize]);

    let check = |axiom, witness: Option<Vec<usize>>| AxiomCheck {
        axiom,
        passed: witness.is_none(),
        witness,
    };
    Ok(ValidationReport {
        checks: vec![
            check(Axiom::Associativity, assoc),
            check(Axiom::Identity, ident),
            check(Axiom::Inverses, inverses),
            check(Axiom::ActionHomomorphism, hom),
            check(Axiom::ActionBijectivity, bij),
        ],
    })
}

/// A validated pair `(A, φ)` over a tree alphabet `X`. Every element,
/// automaton and shift in the crate is tied to one signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    group: LabelGroup,
    action: Action,
    alphabet: Alphabet,
}

impl Signature {
    pub fn new(group: LabelGroup, action: Action) -> Result<Arc<Self>, GroupError> {
        let report = validate_group_and_action(&group, &action)?;
        if let Some(fail) = report.first_failure() {
            return Err(GroupError::Axiom {
                axiom: fail.axiom,
                witness: fail.witness.clone().unwrap_or_default(),
            });
        }
        let alphabet = Alphabet::new(action.arity())?;
        Ok(Arc::new(Signature { group, action, alphabet }))
    }

    /// `Sym(X)` acting naturally on `k` letters.
    pub fn symmetric(k: usize) -> Arc<Self> {
        let mut gens = Vec::new();
        if k >= 2 {
            gens.push((0..k).map(|x| (x + 1) % k).collect());
            let mut t: Vec<usize> = (0..k).collect();
            t.swap(0, 1);
            gens.push(t);
        }
        Self::permutation_group(k, &gens)
    }

    /// `Z/k` rotating `k` letters.
    pub fn rotation(k: usize) -> Arc<Self> {
        let rot: Vec<usize> = (0..k).map(|x| (x + 1) % k).collect();
        Self::permutation_group(k, &[rot])
    }

    /// The group generated by `gens` with its natural action on `degree` letters.
    pub fn permutation_group(degree: usize, gens: &[Vec<usize>]) -> Arc<Self> {
        let (group, perms) = LabelGroup::from_permutations(degree, gens);
        let action = Action::from_table(perms).expect("permutations are well formed");
        Signature::new(group, action).expect("permutation groups satisfy the axioms")
    }

    /// `C2 = {id, σ}` swapping the two letters of a binary alphabet.
    pub fn binary_swap() -> Arc<Self> {
        let group = LabelGroup::cyclic(2)
            .with_names(vec!["id".into(), "σ".into()])
            .expect("two names");
        let action = Action::from_table(vec![vec![0, 1], vec![1, 0]]).expect("swap table");
        Signature::new(group, action).expect("swap action is valid")
    }

    pub fn with_trivial_action(group: LabelGroup, k: usize) -> Result<Arc<Self>, GroupError> {
        let action = Action::trivial(group.order(), k);
        Signature::new(group, action)
    }

    pub fn group(&self) -> &LabelGroup {
        &self.group
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// `k = |X|`.
    pub fn arity(&self) -> usize {
        self.alphabet.size()
    }

    pub fn identity(&self) -> Label {
        self.group.identity()
    }

    pub fn is_faithful(&self) -> bool {
        let rows = self.action.table();
        let mut seen = std::collections::HashSet::new();
        rows.into_iter().all(|r| seen.insert(r))
    }

    pub fn to_json(&self) -> SignatureJson {
        SignatureJson {
            order: self.group.order(),
            mult: self.group.mult_table(),
            inverse: self.group.inverse_table(),
            identity: self.group.identity() as usize,
            action: self.action.table(),
            names: self.group.names().map(|n| n.to_vec()),
        }
    }
}

/// Wire format for a label group with its action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureJson {
    pub order: usize,
    pub mult: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
    pub identity: usize,
    pub action: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl SignatureJson {
    pub fn into_signature(self) -> Result<Arc<Signature>, GroupError> {
        if self.order != self.mult.len() {
            return Err(GroupError::Structural("order disagrees with mult".into()));
        }
        let group = LabelGroup::from_tables(self.mult, self.inverse, self.identity, self.names)?;
        let action = Action::from_table(self.action)?;
        Signature::new(group, action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2_tables(mult: Vec<Vec<usize>>, action: Vec<Vec<usize>>) -> (LabelGroup, Action) {
        (
            LabelGroup::from_tables(mult, vec![0, 1], 0, None).unwrap(),
            Action::from_table(action).unwrap(),
        )
    }

    #[test]
    fn swap_and_trivial_actions_pass() {
        let (g, a) = c2_tables(vec![vec![0, 1], vec![1, 0]], vec![vec![0, 1], vec![1, 0]]);
        assert!(validate_group_and_action(&g, &a).unwrap().passed());
        let (g, a) = c2_tables(vec![vec![0, 1], vec![1, 0]], vec![vec![0, 1], vec![0, 1]]);
        assert!(validate_group_and_action(&g, &a).unwrap().passed());
        assert!(!Signature::with_trivial_action(g, 2).unwrap().is_faithful());
    }

    #[test]
    fn broken_inverse_is_named_with_witness() {
        let (g, a) = c2_tables(vec![vec![0, 1], vec![1, 1]], vec![vec![0, 1], vec![1, 0]]);
        let report = validate_group_and_action(&g, &a).unwrap();
        let fail = report.first_failure().unwrap();
        assert_eq!(fail.axiom, Axiom::Inverses);
        assert_eq!(fail.witness, Some(vec![1]));
        assert!(matches!(
            Signature::new(g, a),
            Err(GroupError::Axiom { axiom: Axiom::Inverses, .. })
        ));
    }

    #[test]
    fn dimension_mismatch_is_structural() {
        let g = LabelGroup::cyclic(3);
        let a = Action::trivial(2, 2);
        assert!(matches!(validate_group_and_action(&g, &a), Err(GroupError::Structural(_))));
        assert!(LabelGroup::from_tables(vec![vec![0, 1]], vec![0], 0, None).is_err());
    }

    #[test]
    fn non_homomorphic_and_non_bijective_actions_fail() {
        let g = LabelGroup::cyclic(2);
        let bad = Action::from_table(vec![vec![0, 1], vec![0, 0]]).unwrap();
        let r = validate_group_and_action(&g, &bad).unwrap();
        assert!(!r.passed());
        assert!(r.checks.iter().any(|c| c.axiom == Axiom::ActionBijectivity && !c.passed));
        // C3 cannot act on two letters by a transposition.
        let g3 = LabelGroup::cyclic(3);
        let swap = Action::from_table(vec![vec![0, 1], vec![1, 0], vec![1, 0]]).unwrap();
        let r = validate_group_and_action(&g3, &swap).unwrap();
        assert_eq!(r.first_failure().unwrap().axiom, Axiom::ActionHomomorphism);
    }

    #[test]
    fn permutation_groups_have_expected_orders() {
        assert_eq!(Signature::symmetric(3).group().order(), 6);
        assert_eq!(Signature::symmetric(1).group().order(), 1);
        assert_eq!(Signature::rotation(3).group().order(), 3);
        assert!(Signature::symmetric(3).is_faithful());
        let sig = Signature::binary_swap();
        assert!(sig.group().is_subgroup(&[0]));
        assert!(!sig.group().is_subgroup(&[1]));
    }

    #[test]
    fn json_round_trip() {
        let sig = Signature::symmetric(3);
        let json = serde_json::to_string(&sig.to_json()).unwrap();
        let back: SignatureJson = serde_json::from_str(&json).unwrap();
        assert_eq!(*back.into_signature().unwrap(), *sig);
    }
}
