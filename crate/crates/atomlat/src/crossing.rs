//! Full and Sparse Crossing: trace-invariant operations that enforce one
//! positive relation `a < b` by replacing the discriminant atoms of `a`
//! with atoms that also sit in `b`.
//!
//! Both variants require the positive trace constraint `Tr(b) ⊆ Tr(a)` to
//! hold beforehand; under that precondition every involved atom keeps its
//! trace, so previously enforced relations survive.

use crate::algebra::{AlgebraState, AtomId, ElementRef, Relation, BOTTOM_ATOM};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::trace;

/// Record of one crossing: which atoms were replaced and what replaced them.
#[derive(Clone, Debug)]
pub struct CrossingPlan {
    pub source: ElementRef,
    pub target: ElementRef,
    /// dis(a, b) at the start of the operation.
    pub discriminant: BitSet,
    /// Created atoms with the original atoms they were edged to.
    pub created: Vec<(AtomId, Vec<AtomId>)>,
    /// Atoms deleted at the end (U ∪ A).
    pub deleted: BitSet,
}

impl CrossingPlan {
    /// Created atoms edged to `original`; the merge that replaces it.
    pub fn replacements_of(&self, original: AtomId) -> Vec<AtomId> {
        self.created
            .iter()
            .filter(|(_, parents)| parents.contains(&original))
            .map(|(a, _)| *a)
            .collect()
    }
}

fn discriminant(state: &AlgebraState, a: ElementRef, b: ElementRef) -> Result<BitSet> {
    Ok(state.master_atoms(a)?.difference(&state.master_atoms(b)?))
}

fn check_trace_constraint(state: &AlgebraState, a: ElementRef, b: ElementRef) -> Result<()> {
    let tr_a = state.trace(a)?;
    let tr_b = state.trace(b)?;
    if tr_b.is_subset(&tr_a) {
        Ok(())
    } else {
        Err(Error::TraceConstraintMissing)
    }
}

/// Full Crossing of `a` into `b`: one new atom per (discriminant atom,
/// atom of b) pair plus one protective copy per atom of b; the originals
/// are deleted. Checks the trace constraint first.
pub fn full_crossing(state: &mut AlgebraState, a: ElementRef, b: ElementRef) -> Result<CrossingPlan> {
    check_trace_constraint(state, a, b)?;
    full_crossing_unchecked(state, a, b)
}

/// Full Crossing without the trace-constraint check. With the constraint
/// missing the operation still enforces `a < b` but atom traces change;
/// exposed so the if-and-only-if of the invariance theorem can be observed.
pub fn full_crossing_unchecked(
    state: &mut AlgebraState,
    a: ElementRef,
    b: ElementRef,
) -> Result<CrossingPlan> {
    let dis = discriminant(state, a, b)?;
    let mut plan = CrossingPlan {
        source: a,
        target: b,
        discriminant: dis.clone(),
        created: Vec::new(),
        deleted: BitSet::new(),
    };
    if dis.is_empty() {
        return Ok(plan);
    }
    // Bottom is in every element, so it is never in the discriminant; keep
    // it out of the crossed column set as well.
    let mut b_atoms = state.master_atoms(b)?;
    b_atoms.remove(BOTTOM_ATOM.0 as usize);
    for phi in dis.iter() {
        for eps in b_atoms.iter() {
            let created = state.add_atom(&[
                ElementRef::Atom(AtomId(phi as u32)),
                ElementRef::Atom(AtomId(eps as u32)),
            ])?;
            let ElementRef::Atom(id) = created else { unreachable!() };
            plan.created.push((id, vec![AtomId(phi as u32), AtomId(eps as u32)]));
        }
        if b_atoms.is_empty() {
            // Degenerate target with no learned atoms: cross with bottom.
            let created = state.add_atom(&[
                ElementRef::Atom(AtomId(phi as u32)),
                ElementRef::Atom(BOTTOM_ATOM),
            ])?;
            let ElementRef::Atom(id) = created else { unreachable!() };
            plan.created.push((id, vec![AtomId(phi as u32), BOTTOM_ATOM]));
        }
    }
    for eps in b_atoms.iter() {
        let created = state.add_atom(&[ElementRef::Atom(AtomId(eps as u32))])?;
        let ElementRef::Atom(id) = created else { unreachable!() };
        plan.created.push((id, vec![AtomId(eps as u32)]));
    }
    let doomed: Vec<AtomId> = dis
        .iter()
        .chain(b_atoms.iter())
        .map(|i| AtomId(i as u32))
        .collect();
    plan.deleted = doomed.iter().map(|a| a.0 as usize).collect();
    state.delete_atoms(&doomed)?;
    Ok(plan)
}

/// Sparse Crossing of `a` into `b`: each discriminant atom is replaced by a
/// minimal set of new atoms chosen so its trace is preserved; atoms of `b`
/// that were used get a protective copy when their own trace needs one.
pub fn sparse_crossing(state: &mut AlgebraState, a: ElementRef, b: ElementRef) -> Result<CrossingPlan> {
    check_trace_constraint(state, a, b)?;
    sparse_crossing_inner(state, a, b)
}

fn sparse_crossing_inner(state: &mut AlgebraState, a: ElementRef, b: ElementRef) -> Result<CrossingPlan> {
    let dis = discriminant(state, a, b)?;
    let mut plan = CrossingPlan {
        source: a,
        target: b,
        discriminant: dis.clone(),
        created: Vec::new(),
        deleted: BitSet::new(),
    };
    if dis.is_empty() {
        return Ok(plan);
    }

    let all_dual = state.live_dual_atom_set().clone();
    let mut used: BitSet = BitSet::new();
    // Traces of b's atoms are needed after the originals are gone; each new
    // atom's dual set is the union of its parents', which decides whether a
    // protective copy is due without re-deriving from fingerprints.
    let mut eps_children: Vec<(usize, BitSet, Vec<BitSet>)> = Vec::new();

    for phi in dis.iter() {
        let phi_id = AtomId(phi as u32);
        let phi_dual = state.atom_dual_set(phi_id);
        let mut delta = all_dual.difference(&phi_dual);
        let mut b_atoms = state.master_atoms(b)?;
        b_atoms.remove(BOTTOM_ATOM.0 as usize);
        let mut pool = state.shuffled(b_atoms.to_vec());
        if pool.is_empty() {
            pool.push(BOTTOM_ATOM.0 as usize);
        }
        let mut crossed_once = false;
        for eps in pool {
            let eps_id = AtomId(eps as u32);
            let eps_dual = state.atom_dual_set(eps_id);
            let shrunk = delta.intersection(&eps_dual);
            if shrunk != delta || delta.is_empty() {
                let created = state.add_atom(&[ElementRef::Atom(phi_id), ElementRef::Atom(eps_id)])?;
                let ElementRef::Atom(psi) = created else { unreachable!() };
                plan.created.push((psi, vec![phi_id, eps_id]));
                delta = shrunk;
                crossed_once = true;
                if eps_id != BOTTOM_ATOM {
                    let child_set = phi_dual.union(&eps_dual);
                    if used.insert(eps) {
                        eps_children.push((eps, eps_dual.clone(), vec![child_set]));
                    } else {
                        eps_children
                            .iter_mut()
                            .find(|(e, _, _)| *e == eps)
                            .expect("tracked above")
                            .2
                            .push(child_set);
                    }
                }
            }
            if delta.is_empty() && crossed_once {
                break;
            }
        }
        if !delta.is_empty() || !crossed_once {
            // Unreachable when the trace constraint held (checked above).
            return Err(Error::TraceConstraintMissing);
        }
    }

    // Protective ε′ only where the new atoms alone would change Tr(ε).
    for (eps, original, child_sets) in &eps_children {
        let eps_id = AtomId(*eps as u32);
        let mut replaced: Option<BitSet> = None;
        for set in child_sets {
            match &mut replaced {
                None => replaced = Some(set.clone()),
                Some(acc) => acc.intersect_with(set),
            }
        }
        if replaced.as_ref() != Some(original) {
            let created = state.add_atom(&[ElementRef::Atom(eps_id)])?;
            let ElementRef::Atom(id) = created else { unreachable!() };
            plan.created.push((id, vec![eps_id]));
        }
    }

    let mut doomed: Vec<AtomId> = dis.iter().map(|i| AtomId(i as u32)).collect();
    doomed.extend(used.iter().map(|i| AtomId(i as u32)));
    plan.deleted = doomed.iter().map(|a| a.0 as usize).collect();
    state.delete_atoms(&doomed)?;
    Ok(plan)
}

/// Enforces every positive relation by Sparse Crossing, in a seeded-random
/// order. Trace constraints for the batch must already hold.
///
/// The reduction is trace-invariant and callable at any time, so it is
/// interleaved whenever the transient atom count balloons; already-crossed
/// relations survive it (deleting atoms never breaks an inclusion).
pub fn enforce_positive_relations(state: &mut AlgebraState, positives: &[Relation]) -> Result<()> {
    // Crossings preserve every trace, so the batch's trace constraints are
    // verified once here and survive each individual operation.
    for rel in positives {
        debug_assert!(rel.is_positive());
        let tr_lhs = state.trace(rel.lhs)?;
        let tr_rhs = state.trace(rel.rhs)?;
        if !tr_rhs.is_subset(&tr_lhs) {
            return Err(Error::TraceConstraintMissing);
        }
    }
    let order = state.shuffled((0..positives.len()).collect());
    let mut watermark = state.live_atom_set().len().max(64);
    for idx in order {
        let rel = &positives[idx];
        if !state.leq(rel.lhs, rel.rhs)? {
            sparse_crossing_inner(state, rel.lhs, rel.rhs)?;
        }
        if state.live_atom_set().len() > 3 * watermark + 512 {
            crate::reduction::reduce_master(state)?;
            watermark = state.live_atom_set().len().max(64);
        }
    }
    Ok(())
}

/// Convenience for tests: run the whole single-batch embedding (dual
/// preprocessing, trace enforcement, crossings) on a consistent set.
pub fn embed(state: &mut AlgebraState, relations: &[Relation]) -> Result<()> {
    let report = trace::preprocess_duals(state, relations)?;
    if !report.consistent {
        return Err(Error::InconsistentInput);
    }
    trace::enforce_all(state, relations)?;
    let positives: Vec<Relation> = relations.iter().filter(|r| r.is_positive()).copied().collect();
    enforce_positive_relations(state, &positives)
}
