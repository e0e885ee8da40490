//! Brute-force entailment over semilattice relation sets.
//!
//! Works on plain constant-index sets, independent of the graph machinery,
//! so it can serve as an oracle against the embedding pipeline. A term is a
//! non-empty set of constants; a positive relation `d < e` is the rewrite
//! "wherever all of e is present, d may be added". The closure of a set
//! under those rewrites characterizes the freest model of the positive
//! relations, which decides entailment.

use crate::algebra::{AlgebraState, ElementRef, Relation, Sign};
use crate::bitset::BitSet;

/// One relation over constant sets, detached from any algebra state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundRelation {
    pub sign: Sign,
    pub lhs: BitSet,
    pub rhs: BitSet,
}

impl GroundRelation {
    pub fn positive(lhs: BitSet, rhs: BitSet) -> Self {
        GroundRelation {
            sign: Sign::Positive,
            lhs,
            rhs,
        }
    }

    pub fn negative(lhs: BitSet, rhs: BitSet) -> Self {
        GroundRelation {
            sign: Sign::Negative,
            lhs,
            rhs,
        }
    }
}

/// Lowers state-bound relations to ground form for the oracle.
pub fn ground(state: &AlgebraState, relations: &[Relation]) -> Vec<GroundRelation> {
    relations
        .iter()
        .map(|r| GroundRelation {
            sign: r.sign,
            lhs: element_constants(state, r.lhs),
            rhs: element_constants(state, r.rhs),
        })
        .collect()
}

fn element_constants(state: &AlgebraState, x: ElementRef) -> BitSet {
    match x {
        ElementRef::Constant(c) => BitSet::singleton(c.0 as usize),
        ElementRef::Term(t) => state.term_components(t).clone(),
        _ => panic!("relations hold between constants and terms"),
    }
}

/// Closure of `start` under the positive relations: keep adding lhs
/// constants whenever the rhs is already covered.
pub fn positive_closure(positives: &[GroundRelation], start: &BitSet) -> BitSet {
    let mut out = start.clone();
    loop {
        let mut changed = false;
        for rel in positives {
            if rel.rhs.is_subset(&out) && !rel.lhs.is_subset(&out) {
                out.union_with(&rel.lhs);
                changed = true;
            }
        }
        if !changed {
            return out;
        }
    }
}

/// Whether the positive relations alone entail `lhs < rhs`.
pub fn entails_positive(positives: &[GroundRelation], lhs: &BitSet, rhs: &BitSet) -> bool {
    let rhs_closed = positive_closure(positives, rhs);
    lhs.is_subset(&rhs_closed)
}

/// A mixed relation set is consistent iff no negative relation is positively
/// entailed (negative relations have only negative consequences).
pub fn is_consistent(relations: &[GroundRelation]) -> bool {
    let positives: Vec<GroundRelation> = relations
        .iter()
        .filter(|r| r.sign == Sign::Positive)
        .cloned()
        .collect();
    relations
        .iter()
        .filter(|r| r.sign == Sign::Negative)
        .all(|r| !entails_positive(&positives, &r.lhs, &r.rhs))
}

/// Whether `relations` entail the negation of `lhs < rhs`, i.e. adding the
/// positive relation would make the set inconsistent.
pub fn entails_negative(relations: &[GroundRelation], lhs: &BitSet, rhs: &BitSet) -> bool {
    let mut extended: Vec<GroundRelation> = relations.to_vec();
    extended.push(GroundRelation::positive(lhs.clone(), rhs.clone()));
    !is_consistent(&extended)
}
