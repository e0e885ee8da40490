//! Atom-set reduction: shrink the master without changing any constant
//! trace, shrink the dual to one discriminating atom per negative relation,
//! and drop redundant atoms.

use crate::algebra::{AlgebraState, AtomId, DualAtomId, Relation, BOTTOM_ATOM, BOTTOM_DUAL_ATOM};
use crate::bitset::BitSet;
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct ReductionStats {
    pub atoms_before: usize,
    pub atoms_after: usize,
    pub kept: BitSet,
}

/// Reviews constants in seeded-random order and keeps a subset Q of atoms
/// that reproduces every constant trace; everything else is deleted. The
/// bottom atom is permanent.
pub fn reduce_master(state: &mut AlgebraState) -> Result<ReductionStats> {
    let before = state.live_atom_set().len();
    let mut kept = BitSet::singleton(BOTTOM_ATOM.0 as usize);
    let order = state.shuffled(state.constant_ids().map(|c| c.0 as usize).collect());
    for c in order {
        let c_id = crate::algebra::ConstantId(c as u32);
        let target = state.trace(c_id.into())?;
        let c_atoms = state.master_atoms(c_id.into())?;
        let chosen = c_atoms.intersection(&kept);
        let mut window = if chosen.is_empty() {
            state.live_dual_atom_set().clone()
        } else {
            let mut w: Option<BitSet> = None;
            for a in chosen.iter() {
                let set = state.atom_dual_set(AtomId(a as u32));
                match &mut w {
                    None => w = Some(set),
                    Some(acc) => acc.intersect_with(&set),
                }
            }
            w.unwrap()
        };
        while window != target {
            let gap = window.difference(&target);
            let xi = *state
                .shuffled(gap.to_vec())
                .first()
                .expect("window strictly contains the trace");
            let eligible: Vec<usize> = c_atoms
                .iter()
                .filter(|&a| !state.atom_dual_set(AtomId(a as u32)).contains(xi))
                .collect();
            let phi = *state
                .shuffled(eligible)
                .first()
                .expect("some atom of c discriminates every non-trace dual atom");
            kept.insert(phi);
            window.intersect_with(&state.atom_dual_set(AtomId(phi as u32)));
        }
    }
    let doomed: Vec<AtomId> = state
        .live_atom_set()
        .difference(&kept)
        .iter()
        .map(|i| AtomId(i as u32))
        .collect();
    state.delete_atoms(&doomed)?;
    Ok(ReductionStats {
        atoms_before: before,
        atoms_after: state.live_atom_set().len(),
        kept,
    })
}

/// Keeps one discriminating dual atom per negative relation (shared where
/// possible) and deletes the rest. Run right before trace constraints are
/// enforced; the dual atom count never exceeds the negative relation count
/// plus the bottom.
pub fn reduce_dual(state: &mut AlgebraState, negatives: &[Relation]) -> Result<ReductionStats> {
    let before = state.live_dual_atom_count();
    let mut kept = BitSet::singleton(BOTTOM_DUAL_ATOM.0 as usize);
    let order = state.shuffled((0..negatives.len()).collect());
    for idx in order {
        let rel = &negatives[idx];
        debug_assert!(!rel.is_positive());
        let db = state.dual_node_of(rel.rhs)?;
        let da = state.dual_node_of(rel.lhs)?;
        let dis = state.dual_atoms(db).difference(state.dual_atoms(da));
        if dis.is_disjoint(&kept) {
            if let Some(&xi) = state.shuffled(dis.to_vec()).first() {
                kept.insert(xi);
            }
        }
    }
    let doomed: Vec<DualAtomId> = state
        .live_dual_atom_set()
        .difference(&kept)
        .iter()
        .map(|i| DualAtomId(i as u32))
        .collect();
    state.delete_dual_atoms(&doomed)?;
    Ok(ReductionStats {
        atoms_before: before,
        atoms_after: state.live_dual_atom_count(),
        kept,
    })
}

/// Removes every atom for which each containing constant holds a smaller or
/// equal witness atom; the surviving model satisfies exactly the same
/// relations among constants and terms. Ties delete the higher index.
pub fn eliminate_redundant_atoms(state: &mut AlgebraState) -> Result<ReductionStats> {
    let before = state.live_atom_set().len();
    let mut live: Vec<usize> = state.live_atom_set().iter().skip(1).collect();
    live.sort_unstable();
    let mut doomed: Vec<AtomId> = Vec::new();
    let mut dead = BitSet::new();
    for &candidate in live.iter().rev() {
        let fp = state.atom_fingerprint(AtomId(candidate as u32));
        // Vacuously redundant when contained in no constant.
        let mut redundant = true;
        for c in fp.iter() {
            let witnesses = state
                .master_atoms(crate::algebra::ConstantId(c as u32).into())?
                .difference(&dead);
            let found = witnesses.iter().any(|w| {
                w != candidate
                    && state
                        .atom_fingerprint(AtomId(w as u32))
                        .is_subset(&fp)
            });
            if !found {
                redundant = false;
                break;
            }
        }
        if redundant {
            doomed.push(AtomId(candidate as u32));
            dead.insert(candidate);
        }
    }
    state.delete_atoms(&doomed)?;
    Ok(ReductionStats {
        atoms_before: before,
        atoms_after: state.live_atom_set().len(),
        kept: state.live_atom_set().clone(),
    })
}
