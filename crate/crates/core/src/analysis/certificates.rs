//! Depth-bounded certificates: symbolic branching and self-replication.
//!
//! A pass at a given depth is necessary evidence for the infinite statement,
//! never a proof of it.

use std::collections::HashSet;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{AnalysisError, LevelChain, LevelQuotient};
use crate::elements::{FsElement, TruncatedElement};
use crate::group::Signature;
use crate::par::{self, Execution};
use crate::words::{Letter, Word};

/// Tuples of the branching check beyond this many are sampled.
pub const TUPLE_BUDGET: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchWitness {
    /// An element of `Triv(s)` in the quotient of size `n - 1`.
    pub element: String,
    pub letter: Letter,
    /// `δ_x(g)` at depth `n - 1`, which is not in the quotient of size `n`.
    pub delta: String,
}

/// Evidence that `δ_x(Triv_G(s)) ⊆ G` holds in the quotient of size `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchCertificate {
    pub level: usize,
    pub size: usize,
    pub status: Status,
    pub witness: Option<BranchWitness>,
    /// Elements of `Triv(s)` checked.
    pub checked: usize,
    /// Whether the check on full tuples `∏ δ_x(g_x)` gave the same answer.
    pub tuple_agrees: bool,
    pub tuples_checked: usize,
    pub tuples_exhaustive: bool,
}

impl BranchCertificate {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// For every `g ∈ Triv(s)` in the quotient of size `n - 1` and every letter
/// `x`, checks that `δ_x(g)` lies in the quotient of size `n`.
pub fn branch_certificate(
    sig: Arc<Signature>,
    gens: &[FsElement],
    s: usize,
    n: usize,
    cap: usize,
    exec: Execution,
) -> Result<BranchCertificate, AnalysisError> {
    if n < s + 1 || n < 2 {
        return Err(AnalysisError::Precondition(format!(
            "size {n} is too small for branching level {s}"
        )));
    }
    let upper = LevelChain::from_generators(sig.clone(), gens, n)?;
    let lower = LevelChain::from_generators(sig.clone(), gens, n - 1)?;
    branch_certificate_with(&lower, &upper, s, cap, exec)
}

pub(crate) fn branch_certificate_with(
    lower: &LevelChain,
    upper: &LevelChain,
    s: usize,
    cap: usize,
    exec: Execution,
) -> Result<BranchCertificate, AnalysisError> {
    let sig = upper.signature().clone();
    let k = sig.arity();
    let triv = lower.triv_elements(s, cap).ok_or(AnalysisError::Cap {
        needed: lower.triv_order(s),
        cap,
    })?;
    let letters: Vec<Word> = sig.alphabet().letters().map(|x| Word::from_letters([x])).collect();
    let deltas: Vec<Vec<TruncatedElement>> = par::map(exec, &triv, |g| {
        letters.iter().map(|x| g.delta(x).expect("letter in alphabet")).collect()
    });
    let failure = par::find_map_first(exec, triv.len() * k, |j| {
        let (i, x) = (j / k, j % k);
        (!upper.contains(&deltas[i][x])).then_some((i, x))
    });
    let status = if failure.is_some() { Status::Fail } else { Status::Pass };
    let witness = failure.map(|(i, x)| BranchWitness {
        element: triv[i].to_string(),
        letter: x as Letter,
        delta: deltas[i][x].to_string(),
    });

    // tuple form: ∏_x δ_x(g_x) for tuples of Triv(s) elements
    let t = triv.len();
    let total = (t as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    let exhaustive = total <= TUPLE_BUDGET as u128;
    let count = if exhaustive { total as usize } else { TUPLE_BUDGET };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (s as u64) << 8 ^ upper.size() as u64);
    let tuples: Vec<Vec<usize>> = (0..count)
        .map(|c| {
            if exhaustive {
                let mut c = c;
                (0..k)
                    .map(|_| {
                        let i = c % t;
                        c /= t;
                        i
                    })
                    .collect()
            } else {
                (0..k).map(|_| rng.gen_range(0..t)).collect()
            }
        })
        .collect();
    let tuple_fail = par::find_map_first(exec, tuples.len(), |c| {
        let prod = tuples[c]
            .iter()
            .enumerate()
            .map(|(x, &i)| &deltas[i][x])
            .fold(None::<TruncatedElement>, |acc, d| Some(acc.map_or_else(|| d.clone(), |a| a.mul_unchecked(d))))
            .expect("alphabet is nonempty");
        (!upper.contains(&prod)).then_some(c)
    });
    // sampling can miss a failing tuple, so only a found failure is decisive
    let tuple_agrees = match (status, tuple_fail) {
        (Status::Pass, None) | (Status::Fail, Some(_)) => true,
        (Status::Fail, None) => !exhaustive,
        (Status::Pass, Some(_)) => false,
    };
    Ok(BranchCertificate {
        level: s,
        size: upper.size(),
        status,
        witness,
        checked: triv.len(),
        tuple_agrees,
        tuples_checked: tuples.len(),
        tuples_exhaustive: exhaustive,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfReplication {
    pub size: usize,
    pub holds: bool,
    /// A letter `x` and an element of the smaller quotient that is not the
    /// section at `x` of any `x`-stabilizing element.
    pub missing: Option<(Letter, String)>,
}

/// Whether `g ↦ g_x` maps the stabilizer of `x` in the quotient of size `n`
/// onto the quotient of size `n - 1`, for every letter `x`.
pub fn is_self_replicating_at(
    sig: Arc<Signature>,
    gens: &[FsElement],
    n: usize,
    cap: usize,
    exec: Execution,
) -> Result<SelfReplication, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::Precondition("self-replication needs size at least 2".into()));
    }
    let q = LevelQuotient::enumerate(sig.clone(), gens, n, cap, exec)?;
    q.require_complete()?;
    let lower = q.restrict(n - 1)?;
    for x in sig.alphabet().letters() {
        let xw = Word::from_letters([x]);
        let sections: HashSet<TruncatedElement> = q
            .elements()
            .iter()
            .filter(|g| g.act(&xw).map(|y| y == xw).unwrap_or(false))
            .map(|g| g.section(&xw).expect("depth at least 1"))
            .collect();
        if let Some(miss) = lower.elements().iter().find(|g| !sections.contains(g)) {
            return Ok(SelfReplication {
                size: n,
                holds: false,
                missing: Some((x, miss.to_string())),
            });
        }
    }
    Ok(SelfReplication {
        size: n,
        holds: true,
        missing: None,
    })
}

/// Smallest `s ≤ max_level` whose branching certificate passes at every size
/// from `s + 2` to `s + 2 + extra`.
pub fn find_branching_level(
    sig: Arc<Signature>,
    gens: &[FsElement],
    max_level: usize,
    extra: usize,
    cap: usize,
    exec: Execution,
) -> Result<Option<(usize, Vec<BranchCertificate>)>, AnalysisError> {
    let mut chains: Vec<Option<LevelChain>> = Vec::new();
    let mut chain = |size: usize| -> Result<LevelChain, AnalysisError> {
        if chains.len() <= size {
            chains.resize(size + 1, None);
        }
        if chains[size].is_none() {
            chains[size] = Some(LevelChain::from_generators(sig.clone(), gens, size)?);
        }
        Ok(chains[size].clone().expect("just built"))
    };
    'levels: for s in 1..=max_level {
        let mut certs = Vec::new();
        for n in s + 2..=s + 2 + extra {
            let lower = chain(n - 1)?;
            let upper = chain(n)?;
            let cert = branch_certificate_with(&lower, &upper, s, cap, exec)?;
            let ok = cert.passed();
            certs.push(cert);
            if !ok {
                continue 'levels;
            }
        }
        return Ok(Some((s, certs)));
    }
    Ok(None)
}
