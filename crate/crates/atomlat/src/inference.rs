//! Classification over frozen snapshots: single-model membership,
//! multi-atomization voting, misses-cutoff classification over
//! pinning-derived atoms, and the two memorizing baselines.
//!
//! Everything here is pure over immutable snapshots and safe to run in
//! parallel.

use crate::algebra::{AlgebraState, AtomId, ConstantId, DualAtomId, ElementRef, Relation, TermId};
use crate::bitset::BitSet;
use crate::crossing;
use crate::error::{Error, Result};
use crate::trainer::ModelSnapshot;

/// Set of constant indices describing a test observation (e.g. the pixel
/// constants of an image).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryTerm {
    pub constants: BitSet,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct VoteResult {
    pub agreements: usize,
    pub threshold: usize,
    pub decision: bool,
}

/// True iff every atom of the class constant has at least one fingerprint
/// constant inside the query. Monotone in the query.
pub fn contains(snapshot: &ModelSnapshot, class: ConstantId, query: &QueryTerm) -> Result<bool> {
    if class.0 as usize >= snapshot.constants.len() {
        return Err(Error::UnknownConstant(format!("#{}", class.0)));
    }
    Ok(snapshot
        .atoms
        .iter()
        .filter(|fp| fp.binary_search(&class.0).is_ok())
        .all(|fp| fp.iter().any(|&c| query.constants.contains(c as usize))))
}

/// Counts the snapshots whose `contains` agrees, deciding by threshold.
pub fn vote(
    snapshots: &[ModelSnapshot],
    class: ConstantId,
    query: &QueryTerm,
    threshold: usize,
) -> Result<VoteResult> {
    let mut agreements = 0;
    for snap in snapshots {
        if contains(snap, class, query)? {
            agreements += 1;
        }
    }
    Ok(VoteResult {
        agreements,
        threshold,
        decision: agreements >= threshold,
    })
}

/// Converts pinning fingerprints back into atoms (deduplicated), counts how
/// many of the class's atoms the query misses, and declares the example
/// positive when the misses stay within the cutoff.
pub fn misses_classify(
    pinning: &[Vec<u32>],
    class: ConstantId,
    query: &QueryTerm,
    cutoff: usize,
) -> bool {
    let mut seen: Vec<&Vec<u32>> = Vec::new();
    let mut misses = 0;
    for fp in pinning {
        if fp.binary_search(&class.0).is_err() || seen.contains(&fp) {
            continue;
        }
        seen.push(fp);
        if !fp.iter().any(|&c| query.constants.contains(c as usize)) {
            misses += 1;
            if misses > cutoff {
                return false;
            }
        }
    }
    misses <= cutoff
}

fn scratch_copy(state: &AlgebraState, relations: &[Relation]) -> Result<AlgebraState> {
    let mut scratch = state.clone();
    let learned: Vec<AtomId> = scratch.learned_atoms().collect();
    scratch.delete_atoms(&learned)?;
    let mut keep: Vec<TermId> = Vec::new();
    for rel in relations {
        for side in [rel.lhs, rel.rhs] {
            if let ElementRef::Term(t) = side {
                if !keep.contains(&t) {
                    keep.push(t);
                }
            }
        }
    }
    scratch.begin_epoch(&keep);
    Ok(scratch)
}

/// Least-free memorizer plus the dual atoms it derives from: each dual atom
/// maps one-to-one to a master atom whose fingerprint is the set of
/// constants whose dual misses it.
pub fn build_least_free_algebra(
    state: &AlgebraState,
    relations: &[Relation],
) -> Result<(AlgebraState, Vec<(DualAtomId, Option<AtomId>)>)> {
    let mut scratch = scratch_copy(state, relations)?;
    for rel in relations.iter().filter(|r| r.is_positive()) {
        scratch.add_dual_positive_edge(rel)?;
    }
    crate::trace::add_subset_edges(&mut scratch, relations)?;

    // One dual atom under the dual of each distinct negative right side.
    let mut lambda: Vec<ElementRef> = Vec::new();
    for rel in relations.iter().filter(|r| !r.is_positive()) {
        if !lambda.contains(&rel.rhs) {
            lambda.push(rel.rhs);
        }
    }
    for &b in &lambda {
        let dual = scratch.dual_of(b)?;
        scratch.add_dual_atom(&[dual])?;
    }

    // Each mentioned term absorbs the intersection of its components'
    // dual sets, so term inversion applies (the memorizer's precondition).
    let mut terms: Vec<TermId> = Vec::new();
    for rel in relations {
        for side in [rel.lhs, rel.rhs] {
            if let ElementRef::Term(t) = side {
                if !terms.contains(&t) {
                    terms.push(t);
                }
            }
        }
    }
    for t in &terms {
        absorb_component_intersection(&mut scratch, *t)?;
    }

    // Consistency: every reverted negative must hold.
    for rel in relations.iter().filter(|r| !r.is_positive()) {
        let db = scratch.dual_of(rel.rhs)?;
        let da = scratch.dual_of(rel.lhs)?;
        if scratch.leq(db, da)? {
            return Err(Error::InconsistentInput);
        }
    }

    // One master atom per dual atom: phi_xi sits exactly in the constants
    // whose dual misses xi.
    let mut mapping = Vec::new();
    let dual_atoms: Vec<usize> = scratch.live_dual_atom_set().iter().skip(1).collect();
    for xi in dual_atoms {
        let mut fingerprint: Vec<ElementRef> = Vec::new();
        for c in scratch.constant_ids() {
            let dual = scratch.dual_node_of(ElementRef::Constant(c))?;
            if !scratch.dual_atoms(dual).contains(xi) {
                fingerprint.push(ElementRef::Constant(c));
            }
        }
        if fingerprint.is_empty() {
            mapping.push((DualAtomId(xi as u32), None));
            continue;
        }
        let ElementRef::Atom(phi) = scratch.add_atom(&fingerprint)? else {
            unreachable!()
        };
        mapping.push((DualAtomId(xi as u32), Some(phi)));
    }
    Ok((scratch, mapping))
}

/// Least-free model of the relations: answers yes to `(a < b)?` unless the
/// relations entail the negation. Memorizes the negative relations.
pub fn build_least_free_model(state: &AlgebraState, relations: &[Relation]) -> Result<ModelSnapshot> {
    let (scratch, _) = build_least_free_algebra(state, relations)?;
    Ok(ModelSnapshot::from_state(&scratch, &[], 0))
}

fn absorb_component_intersection(state: &mut AlgebraState, t: TermId) -> Result<()> {
    let comps = state.term_components(t).clone();
    let mut inter: Option<BitSet> = None;
    for c in comps.iter() {
        let dual = state.dual_node_of(ElementRef::Constant(ConstantId(c as u32)))?;
        let set = state.dual_atoms(dual).clone();
        match &mut inter {
            None => inter = Some(set),
            Some(acc) => acc.intersect_with(&set),
        }
    }
    let inter = inter.unwrap_or_default();
    let term_dual = state.dual_node_of(ElementRef::Term(t))?;
    let missing = inter.difference(state.dual_atoms(term_dual));
    for xi in missing.iter() {
        state.insert_dual_atom_upward(term_dual, DualAtomId(xi as u32));
    }
    Ok(())
}

/// Freest model of the relations: one atom per constant, then every
/// positive relation enforced by Full Crossing. Answers no to `(a < b)?`
/// unless the positives entail it. Atom growth is geometric; capped.
pub fn build_freest_algebra(
    state: &AlgebraState,
    relations: &[Relation],
    atom_cap: usize,
) -> Result<AlgebraState> {
    let mut scratch = scratch_copy(state, relations)?;
    for c in scratch.constant_ids().collect::<Vec<_>>() {
        scratch.add_atom(&[ElementRef::Constant(c)])?;
    }
    for rel in relations.iter().filter(|r| r.is_positive()) {
        if scratch.live_atom_set().len() > atom_cap {
            return Err(Error::SizeLimitExceeded(format!(
                "freest model grew past {atom_cap} atoms"
            )));
        }
        if !scratch.leq(rel.lhs, rel.rhs)? {
            crossing::full_crossing_unchecked(&mut scratch, rel.lhs, rel.rhs)?;
        }
    }
    Ok(scratch)
}

pub fn build_freest_model(
    state: &AlgebraState,
    relations: &[Relation],
    atom_cap: usize,
) -> Result<ModelSnapshot> {
    let scratch = build_freest_algebra(state, relations, atom_cap)?;
    Ok(ModelSnapshot::from_state(&scratch, &[], 0))
}
