//! The odometer closure is not finitely constrained: for every `n` the
//! element `g = id(e, a^{2^n})` avoids every size-`(n+1)` pattern forbidden
//! by the group, yet its root block of size `n + 2` is not in the group.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{AnalysisError, LevelQuotient};
use crate::elements::TruncatedElement;
use crate::par::Execution;
use crate::presets;
use crate::shifts::{allowed_blocks, windows_allowed};
use crate::words::Word;

/// Largest `n` accepted; the window scan visits `2^{2n+2}` vertices.
pub const MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OdometerReport {
    pub n: usize,
    /// `g = id(e, a^{2^n})` as a rendered portrait of depth `n + 1`.
    pub element: String,
    pub allowed_blocks: usize,
    /// Distinct size-`(n+1)` windows of `g`.
    pub windows: usize,
    /// Every window lies in the group's allowed blocks.
    pub windows_allowed: bool,
    /// The root block of size `n + 2`.
    pub separating_block: String,
    pub quotient_order: usize,
    /// The separating block is missing from the quotient of size `n + 2`.
    pub block_outside_group: bool,
}

impl OdometerReport {
    pub fn passed(&self) -> bool {
        self.windows_allowed && self.block_outside_group
    }
}

pub fn odometer_witness(n: usize, cap: usize, exec: Execution) -> Result<OdometerReport, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::Precondition("the odometer demonstration needs n ≥ 1".into()));
    }
    if n > MAX_N {
        return Err(AnalysisError::Precondition(format!("n = {n} is beyond the supported range")));
    }
    let (sig, gens) = presets::odometer();
    let a = &gens[0];
    let g = a.pow(1i64 << n).delta(&Word::from_letters([1]))?;

    let small = LevelQuotient::enumerate(sig.clone(), &gens, n + 1, cap, exec)?;
    small.require_complete()?;
    let allowed = allowed_blocks(&small)?;
    // every vertex of g sits at one of its states, so the windows are the
    // root blocks of the states
    let windows: BTreeSet<TruncatedElement> = (0..g.state_count())
        .map(|q| g.from_state(q).root_block(n + 1))
        .collect::<Result<_, _>>()?;
    let by_states = windows.iter().all(|b| allowed.contains(b));
    let by_scan = windows_allowed(&allowed, &g, 2 * n + 1)?;
    if by_states != by_scan {
        return Err(AnalysisError::Inconsistency("window checks disagree".into()));
    }

    let big = LevelQuotient::enumerate(sig, &gens, n + 2, cap, exec)?;
    big.require_complete()?;
    let root = g.root_block(n + 2)?;
    Ok(OdometerReport {
        n,
        element: g.truncate(n + 1).to_string(),
        allowed_blocks: allowed.len(),
        windows: windows.len(),
        windows_allowed: by_states,
        separating_block: root.to_string(),
        quotient_order: big.order(),
        block_outside_group: !big.contains(&root),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_levels() {
        let r = odometer_witness(1, 1000, Execution::Sequential).unwrap();
        assert!(r.passed());
        assert_eq!(r.allowed_blocks, 4);
        assert_eq!(r.separating_block, "id | id id | id id σ σ");
        assert_eq!(r.quotient_order, 8);
        for n in 2..=4 {
            let r = odometer_witness(n, 1000, Execution::Sequential).unwrap();
            assert!(r.passed(), "n = {n}");
            assert_eq!(r.quotient_order, 1 << (n + 2));
        }
        assert!(odometer_witness(0, 1000, Execution::Sequential).is_err());
    }
}
