//! Shared generators for randomized algebra instances and consistent
//! relation sets, used by the property and acceptance suites.

// Each test target uses a different subset of these helpers.
#![allow(dead_code)]

use atomlat::algebra::{AlgebraState, ConstantId, ElementRef, Relation, Sign};
use atomlat::oracle::{self, GroundRelation};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// A random small algebra with constants, terms, learned atoms and a
/// populated dual: the raw material for crossing and reduction laws.
pub struct RandomAlgebra {
    pub state: AlgebraState,
    pub elements: Vec<ElementRef>,
}

pub fn random_algebra(seed: u64, max_constants: usize) -> RandomAlgebra {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = AlgebraState::new(seed ^ 0xa5a5);
    let n_const = rng.gen_range(3..=max_constants);
    let mut elements = Vec::new();
    for i in 0..n_const {
        elements.push(state.add_constant(&format!("k{i}")).unwrap());
    }
    let n_terms = rng.gen_range(2..=4);
    for _ in 0..n_terms {
        let size = rng.gen_range(1..=n_const.min(4));
        let comps: Vec<ConstantId> = rand::seq::index::sample(&mut rng, n_const, size)
            .iter()
            .map(|i| ConstantId(i as u32))
            .collect();
        elements.push(state.define_term(&comps).unwrap());
    }
    let n_atoms = rng.gen_range(3..=10);
    for _ in 0..n_atoms {
        let size = rng.gen_range(1..=3.min(n_const));
        let targets: Vec<ElementRef> = rand::seq::index::sample(&mut rng, n_const, size)
            .iter()
            .map(|i| ElementRef::Constant(ConstantId(i as u32)))
            .collect();
        state.add_atom(&targets).unwrap();
    }
    // Populate the dual with atoms under random element duals.
    let n_dual = rng.gen_range(2..=6);
    for _ in 0..n_dual {
        let size = rng.gen_range(1..=2);
        let targets: Vec<ElementRef> = (0..size)
            .map(|_| {
                let el = elements[rng.gen_range(0..elements.len())];
                state.dual_of(el).unwrap()
            })
            .collect();
        state.add_dual_atom(&targets).unwrap();
    }
    RandomAlgebra { state, elements }
}

/// A random consistent relation set over a fresh state, built by rejecting
/// candidates that the brute-force oracle finds contradictory.
pub struct RandomInstance {
    pub state: AlgebraState,
    pub relations: Vec<Relation>,
}

pub fn random_consistent_instance(
    seed: u64,
    max_constants: usize,
    max_relations: usize,
) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = AlgebraState::new(seed ^ 0x5a5a);
    let n_const = rng.gen_range(3..=max_constants);
    for i in 0..n_const {
        state.add_constant(&format!("k{i}")).unwrap();
    }
    let mut relations: Vec<Relation> = Vec::new();
    let mut ground: Vec<GroundRelation> = Vec::new();
    let wanted = rng.gen_range(2..=max_relations);
    let mut attempts = 0;
    while relations.len() < wanted && attempts < 60 {
        attempts += 1;
        let lhs_size = if rng.gen_bool(0.8) { 1 } else { rng.gen_range(2..=2.max(n_const / 2)) };
        let rhs_size = rng.gen_range(1..=n_const.min(4));
        let lhs_ids: Vec<usize> = rand::seq::index::sample(&mut rng, n_const, lhs_size).iter().collect();
        let rhs_ids: Vec<usize> = rand::seq::index::sample(&mut rng, n_const, rhs_size).iter().collect();
        let sign = if rng.gen_bool(0.5) { Sign::Positive } else { Sign::Negative };
        let g = GroundRelation {
            sign,
            lhs: lhs_ids.iter().copied().collect(),
            rhs: rhs_ids.iter().copied().collect(),
        };
        // Negative relations with a component-subset left side are
        // degenerate contradictions; skip them like any inconsistency.
        let mut candidate = ground.clone();
        candidate.push(g.clone());
        if !oracle::is_consistent(&candidate) {
            continue;
        }
        let lhs = element_for(&mut state, &lhs_ids);
        let rhs = element_for(&mut state, &rhs_ids);
        relations.push(Relation { sign, lhs, rhs });
        ground.push(g);
    }
    RandomInstance { state, relations }
}

fn element_for(state: &mut AlgebraState, ids: &[usize]) -> ElementRef {
    if ids.len() == 1 {
        ElementRef::Constant(ConstantId(ids[0] as u32))
    } else {
        let comps: Vec<ConstantId> = ids.iter().map(|&i| ConstantId(i as u32)).collect();
        state.define_term(&comps).unwrap()
    }
}

/// Every pair (constant or mentioned term) of the instance, for
/// exhaustive relation scans.
pub fn query_pairs(instance: &RandomInstance) -> Vec<(ElementRef, ElementRef)> {
    let mut elements: Vec<ElementRef> = instance
        .state
        .constant_ids()
        .map(ElementRef::Constant)
        .collect();
    for rel in &instance.relations {
        for side in [rel.lhs, rel.rhs] {
            if !elements.contains(&side) {
                elements.push(side);
            }
        }
    }
    let mut out = Vec::new();
    for &a in &elements {
        for &b in &elements {
            if a != b {
                out.push((a, b));
            }
        }
    }
    out
}

/// Ground form of an element for oracle queries.
pub fn ground_of(state: &AlgebraState, x: ElementRef) -> atomlat::bitset::BitSet {
    match x {
        ElementRef::Constant(c) => atomlat::bitset::BitSet::singleton(c.0 as usize),
        ElementRef::Term(t) => state.term_components(t).clone(),
        _ => panic!("constants and terms only"),
    }
}
