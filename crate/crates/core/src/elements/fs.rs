use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{same_signature, ElementError, TruncatedElement};
use crate::group::{Label, Signature};
use crate::words::{below_len, child_index, Letter, Word};

/// A finite-state element `q = λ(q)(τ(q,0), .., τ(q,k-1))`.
///
/// Always kept in canonical form: minimal, every state reachable, states
/// numbered breadth-first from the initial state `0`. Two elements are equal
/// exactly when their portraits are, so `==` compares the tables.
#[derive(Clone)]
pub struct FsElement {
    sig: Arc<Signature>,
    labels: Vec<Label>,
    next: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsStateJson {
    pub name: String,
    pub label: usize,
    pub sections: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FsElementJson {
    pub states: Vec<FsStateJson>,
    pub initial: String,
}

impl FsElement {
    /// Builds an element from raw tables. `sections[q][x]` is the state of
    /// the section at `x`.
    pub fn new(
        sig: Arc<Signature>,
        labels: Vec<Label>,
        sections: Vec<Vec<usize>>,
        initial: usize,
    ) -> Result<Self, ElementError> {
        let n = labels.len();
        let k = sig.arity();
        if n == 0 {
            return Err(ElementError::Malformed("no states".into()));
        }
        if sections.len() != n {
            return Err(ElementError::Malformed(format!(
                "{} states but {} section rows",
                n,
                sections.len()
            )));
        }
        if initial >= n {
            return Err(ElementError::Malformed(format!("initial state {initial} out of range")));
        }
        let m = sig.group().order();
        if let Some(&bad) = labels.iter().find(|&&a| a as usize >= m) {
            return Err(ElementError::LabelOutOfRange(bad as usize));
        }
        let mut next = Vec::with_capacity(n * k);
        for (q, row) in sections.iter().enumerate() {
            if row.len() != k {
                return Err(ElementError::Malformed(format!(
                    "state {q} has {} sections, alphabet has {k} letters",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&t| t >= n) {
                return Err(ElementError::Malformed(format!("state {q} points to missing state {bad}")));
            }
            next.extend_from_slice(row);
        }
        Ok(Self::canonical(sig, labels, next, initial))
    }

    fn canonical(sig: Arc<Signature>, labels: Vec<Label>, next: Vec<usize>, initial: usize) -> Self {
        let k = sig.arity();
        let (labels, next) = reachable(k, &labels, &next, initial);
        let (labels, next) = minimize(k, &labels, &next);
        let (labels, next) = reachable(k, &labels, &next, 0);
        FsElement { sig, labels, next }
    }

    pub fn identity(sig: Arc<Signature>) -> Self {
        let e = sig.identity();
        let k = sig.arity();
        FsElement {
            sig,
            labels: vec![e],
            next: vec![0; k],
        }
    }

    /// The finitary element whose portrait agrees with `t` on `X^[depth]`
    /// and is trivial below.
    pub fn from_truncation(t: &TruncatedElement) -> Self {
        let sig = t.signature().clone();
        let k = sig.arity();
        let n = t.labels().len();
        let id_state = n;
        let inner = below_len(k, t.depth());
        let mut labels = t.labels().to_vec();
        labels.push(sig.identity());
        let mut next = Vec::with_capacity((n + 1) * k);
        for i in 0..n {
            for x in 0..k {
                next.push(if i < inner { child_index(k, i, x) } else { id_state });
            }
        }
        next.extend(std::iter::repeat_n(id_state, k));
        Self::canonical(sig, labels, next, 0)
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    /// `λ(q)`.
    pub fn state_label(&self, q: usize) -> Label {
        self.labels[q]
    }

    /// `τ(q, x)`.
    pub fn state_section(&self, q: usize, x: Letter) -> usize {
        self.next[q * self.sig.arity() + x as usize]
    }

    pub fn root_label(&self) -> Label {
        self.labels[0]
    }

    pub fn is_identity(&self) -> bool {
        self.labels.len() == 1 && self.labels[0] == self.sig.identity()
    }

    fn state_at(&self, w: &Word) -> usize {
        let k = self.sig.arity();
        w.letters().iter().fold(0, |q, &x| self.next[q * k + x as usize])
    }

    /// `g_(w)`.
    pub fn label(&self, w: &Word) -> Result<Label, ElementError> {
        self.sig.alphabet().check(w)?;
        Ok(self.labels[self.state_at(w)])
    }

    /// `g(w)`.
    pub fn act(&self, w: &Word) -> Result<Word, ElementError> {
        self.sig.alphabet().check(w)?;
        let k = self.sig.arity();
        let act = self.sig.action();
        let mut q = 0;
        let mut out = Word::empty();
        for &x in w.letters() {
            out.push(act.apply(self.labels[q], x));
            q = self.next[q * k + x as usize];
        }
        Ok(out)
    }

    /// Portrait on `X^[n]`.
    pub fn truncate(&self, n: usize) -> TruncatedElement {
        let k = self.sig.arity();
        let total = below_len(k, n + 1);
        let mut states = vec![0usize; total];
        for i in 0..below_len(k, n) {
            for x in 0..k {
                states[child_index(k, i, x)] = self.next[states[i] * k + x];
            }
        }
        let labels = states.into_iter().map(|q| self.labels[q]).collect();
        TruncatedElement::from_labels_unchecked(self.sig.clone(), n, labels)
    }

    /// The size-`size` block at the root.
    pub fn root_block(&self, size: usize) -> Result<TruncatedElement, ElementError> {
        if size == 0 {
            return Err(ElementError::EmptyBlock);
        }
        Ok(self.truncate(size - 1))
    }

    /// `g_w`.
    pub fn section(&self, w: &Word) -> Result<Self, ElementError> {
        self.sig.alphabet().check(w)?;
        Ok(self.from_state(self.state_at(w)))
    }

    /// The element defined by state `q`.
    pub fn from_state(&self, q: usize) -> Self {
        let k = self.sig.arity();
        // a reachable part of a minimal automaton is still minimal
        let (labels, next) = reachable(k, &self.labels, &self.next, q);
        FsElement {
            sig: self.sig.clone(),
            labels,
            next,
        }
    }

    fn check_signature(&self, other: &Self) -> Result<(), ElementError> {
        if same_signature(&self.sig, &other.sig) {
            Ok(())
        } else {
            Err(ElementError::SignatureMismatch)
        }
    }

    /// Product automaton on pairs `(p, q)` with label `λ(p)λ(q)` and section
    /// `(τ(p, φ(λ(q))(x)), τ(q, x))` on `x`.
    pub fn mul(&self, h: &Self) -> Result<Self, ElementError> {
        self.check_signature(h)?;
        let k = self.sig.arity();
        let grp = self.sig.group();
        let act = self.sig.action();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut pairs = vec![(0usize, 0usize)];
        index.insert((0, 0), 0);
        let mut labels = Vec::new();
        let mut next = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (p, q) = pairs[i];
            let lq = h.labels[q];
            labels.push(grp.mul(self.labels[p], lq));
            for x in 0..k {
                let y = act.apply(lq, x as Letter) as usize;
                let pair = (self.next[p * k + y], h.next[q * k + x]);
                let id = *index.entry(pair).or_insert_with(|| {
                    pairs.push(pair);
                    pairs.len() - 1
                });
                next.push(id);
            }
            i += 1;
        }
        Ok(Self::canonical(self.sig.clone(), labels, next, 0))
    }

    /// Same states, inverted labels, sections rerouted through `φ(λ(q)⁻¹)`.
    pub fn inv(&self) -> Self {
        let k = self.sig.arity();
        let grp = self.sig.group();
        let act = self.sig.action();
        let labels: Vec<Label> = self.labels.iter().map(|&a| grp.inv(a)).collect();
        let mut next = Vec::with_capacity(self.next.len());
        for (q, &li) in labels.iter().enumerate() {
            for x in 0..k {
                let y = act.apply(li, x as Letter) as usize;
                next.push(self.next[q * k + y]);
            }
        }
        Self::canonical(self.sig.clone(), labels, next, 0)
    }

    pub fn pow(&self, n: i64) -> Self {
        let mut sq = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = FsElement::identity(self.sig.clone());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq).expect("same signature");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq).expect("same signature");
            }
        }
        acc
    }

    /// `self^g = g⁻¹ · self · g`.
    pub fn conjugate(&self, g: &Self) -> Result<Self, ElementError> {
        g.inv().mul(self)?.mul(g)
    }

    /// `[g, h] = g⁻¹ h⁻¹ g h`.
    pub fn commutator(&self, h: &Self) -> Result<Self, ElementError> {
        self.inv().mul(&h.inv())?.mul(self)?.mul(h)
    }

    /// `δ_v(g)`: a chain of `|v|` trivially labelled states leading to `g`.
    pub fn delta(&self, v: &Word) -> Result<Self, ElementError> {
        self.sig.alphabet().check(v)?;
        let k = self.sig.arity();
        let m = v.len();
        let e = self.sig.identity();
        let id_state = m;
        let offset = m + 1;
        let mut labels = vec![e; m + 1];
        let mut next = Vec::with_capacity((m + 1 + self.labels.len()) * k);
        for (i, &x) in v.letters().iter().enumerate() {
            for y in 0..k {
                next.push(if y == x as usize {
                    if i + 1 == m {
                        offset
                    } else {
                        i + 1
                    }
                } else {
                    id_state
                });
            }
        }
        next.extend(std::iter::repeat_n(id_state, k));
        labels.extend_from_slice(&self.labels);
        next.extend(self.next.iter().map(|&t| t + offset));
        let initial = if m == 0 { offset } else { 0 };
        Ok(Self::canonical(self.sig.clone(), labels, next, initial))
    }

    /// States lying on a cycle of the state graph.
    pub fn cyclic_states(&self) -> Vec<bool> {
        let n = self.labels.len();
        let k = self.sig.arity();
        (0..n)
            .map(|q| {
                let mut seen = vec![false; n];
                let mut stack: Vec<usize> = self.next[q * k..(q + 1) * k].to_vec();
                while let Some(p) = stack.pop() {
                    if p == q {
                        return true;
                    }
                    if !seen[p] {
                        seen[p] = true;
                        stack.extend_from_slice(&self.next[p * k..(p + 1) * k]);
                    }
                }
                false
            })
            .collect()
    }

    /// States reachable from some cycle, cycle states included.
    pub fn cycle_reachable_states(&self) -> Vec<bool> {
        let k = self.sig.arity();
        let mut mark = self.cyclic_states();
        let mut stack: Vec<usize> = (0..mark.len()).filter(|&q| mark[q]).collect();
        while let Some(p) = stack.pop() {
            for &t in &self.next[p * k..(p + 1) * k] {
                if !mark[t] {
                    mark[t] = true;
                    stack.push(t);
                }
            }
        }
        mark
    }

    pub fn to_json(&self) -> FsElementJson {
        let k = self.sig.arity();
        let name = |q: usize| format!("q{q}");
        FsElementJson {
            states: (0..self.labels.len())
                .map(|q| FsStateJson {
                    name: name(q),
                    label: self.labels[q] as usize,
                    sections: self.next[q * k..(q + 1) * k].iter().map(|&t| name(t)).collect(),
                })
                .collect(),
            initial: name(0),
        }
    }

    pub fn from_json(sig: Arc<Signature>, json: &FsElementJson) -> Result<Self, ElementError> {
        let index = state_index(&json.states)?;
        let (labels, sections) = resolve_states(&json.states, &index)?;
        let initial = *index
            .get(json.initial.as_str())
            .ok_or_else(|| ElementError::Malformed(format!("unknown initial state {:?}", json.initial)))?;
        FsElement::new(sig, labels, sections, initial)
    }
}

pub(crate) fn state_index(states: &[FsStateJson]) -> Result<HashMap<&str, usize>, ElementError> {
    let mut index = HashMap::new();
    for (i, s) in states.iter().enumerate() {
        if index.insert(s.name.as_str(), i).is_some() {
            return Err(ElementError::Malformed(format!("duplicate state name {:?}", s.name)));
        }
    }
    Ok(index)
}

pub(crate) fn resolve_states(
    states: &[FsStateJson],
    index: &HashMap<&str, usize>,
) -> Result<(Vec<Label>, Vec<Vec<usize>>), ElementError> {
    let mut labels = Vec::with_capacity(states.len());
    let mut sections = Vec::with_capacity(states.len());
    for s in states {
        if s.label > Label::MAX as usize {
            return Err(ElementError::LabelOutOfRange(s.label));
        }
        labels.push(s.label as Label);
        sections.push(
            s.sections
                .iter()
                .map(|t| {
                    index
                        .get(t.as_str())
                        .copied()
                        .ok_or_else(|| ElementError::Malformed(format!("unknown state {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    Ok((labels, sections))
}

/// Restricts to states reachable from `initial`, numbered breadth-first.
fn reachable(k: usize, labels: &[Label], next: &[usize], initial: usize) -> (Vec<Label>, Vec<usize>) {
    let mut order = vec![usize::MAX; labels.len()];
    let mut queue = VecDeque::from([initial]);
    let mut seen = vec![initial];
    order[initial] = 0;
    while let Some(q) = queue.pop_front() {
        for &t in &next[q * k..(q + 1) * k] {
            if order[t] == usize::MAX {
                order[t] = seen.len();
                seen.push(t);
                queue.push_back(t);
            }
        }
    }
    let new_labels = seen.iter().map(|&q| labels[q]).collect();
    let new_next = seen
        .iter()
        .flat_map(|&q| next[q * k..(q + 1) * k].iter().map(|&t| order[t]))
        .collect();
    (new_labels, new_next)
}

/// Moore partition refinement: states are merged when their portraits agree.
fn minimize(k: usize, labels: &[Label], next: &[usize]) -> (Vec<Label>, Vec<usize>) {
    let n = labels.len();
    let mut class = first_appearance(labels.iter().copied());
    let mut count = class.iter().max().map_or(0, |&c| c + 1);
    loop {
        let keys = (0..n).map(|q| {
            let mut key = Vec::with_capacity(k + 1);
            key.push(class[q]);
            key.extend(next[q * k..(q + 1) * k].iter().map(|&t| class[t]));
            key
        });
        let refined = first_appearance(keys);
        let refined_count = refined.iter().max().map_or(0, |&c| c + 1);
        class = refined;
        if refined_count == count {
            break;
        }
        count = refined_count;
    }
    let mut rep = vec![usize::MAX; count];
    for q in 0..n {
        if rep[class[q]] == usize::MAX {
            rep[class[q]] = q;
        }
    }
    let new_labels = rep.iter().map(|&q| labels[q]).collect();
    let new_next = rep
        .iter()
        .flat_map(|&q| next[q * k..(q + 1) * k].iter().map(|&t| class[t]))
        .collect();
    (new_labels, new_next)
}

fn first_appearance<K: Hash + Eq, I: IntoIterator<Item = K>>(keys: I) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.into_iter()
        .map(|key| {
            let fresh = ids.len();
            *ids.entry(key).or_insert(fresh)
        })
        .collect()
}

impl PartialEq for FsElement {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.next == other.next && same_signature(&self.sig, &other.sig)
    }
}

impl Eq for FsElement {}

impl Hash for FsElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.labels.hash(state);
        self.next.hash(state);
    }
}

impl fmt::Debug for FsElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.sig.arity();
        let grp = self.sig.group();
        write!(f, "FsElement{{")?;
        for q in 0..self.labels.len() {
            if q > 0 {
                write!(f, "; ")?;
            }
            write!(f, "q{q} = {}(", grp.name(self.labels[q]))?;
            for (x, t) in self.next[q * k..(q + 1) * k].iter().enumerate() {
                if x > 0 {
                    write!(f, ",")?;
                }
                write!(f, "q{t}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}
