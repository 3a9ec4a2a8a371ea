//! Deciders for the two example languages on finite-state configurations.
//!
//! Along any ray of a finite-state element the states seen infinitely often
//! lie on cycles, and every vertex deep enough sits in a state reachable from
//! a cycle. Both deciders reduce to cycle analysis of the state graph.

use super::AutomatonError;
use crate::elements::FsElement;
use crate::group::Label;

/// Whether all labels of `g` lie in the subgroup `B` beyond some depth.
pub fn decide_hb(g: &FsElement, subgroup: &[Label]) -> Result<bool, AutomatonError> {
    let grp = g.signature().group();
    if !grp.is_subgroup(subgroup) {
        return Err(AutomatonError::NotSubgroup(subgroup.to_vec()));
    }
    let late = g.cycle_reachable_states();
    Ok((0..g.state_count())
        .filter(|&q| late[q])
        .all(|q| subgroup.contains(&g.state_label(q))))
}

/// Whether every ray of `g` meets only finitely many nontrivial labels.
pub fn decide_finitely_supported_rays(g: &FsElement) -> bool {
    let e = g.signature().identity();
    let cyclic = g.cyclic_states();
    (0..g.state_count()).all(|q| !cyclic[q] || g.state_label(q) == e)
}
