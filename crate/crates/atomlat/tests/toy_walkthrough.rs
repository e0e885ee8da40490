//! End-to-end replication of the 2x2 vertical-bar walkthrough: five
//! training relations, dual preprocessing, trace enforcement, Sparse
//! Crossing, reduction, pinning. Intermediate traces and the final atom
//! sets are checked against the worked example.

use atomlat::algebra::{AlgebraState, AtomId, ConstantId, ElementRef, Relation, BOTTOM_ATOM};
use atomlat::bitset::BitSet;
use atomlat::crossing;
use atomlat::reduction;
use atomlat::trace;
use atomlat::trainer;

struct Toy {
    state: AlgebraState,
    v: ElementRef,
    c: Vec<ElementRef>, // c[0] unused; c[1..=8]
    t1p: ElementRef,
    t2p: ElementRef,
    t1n: ElementRef,
    t2n: ElementRef,
    t3n: ElementRef,
    relations: Vec<Relation>,
}

/// Pixel layout: c1/c2 black left column, c3/c4 black right column,
/// c5..c8 the matching whites. Positives are the two vertical bars;
/// negatives are the checkerboard and the two single-pixel images.
fn toy(seed: u64) -> Toy {
    let mut state = AlgebraState::new(seed);
    let mut c = vec![ElementRef::Atom(BOTTOM_ATOM)]; // placeholder at 0
    for i in 1..=8 {
        c.push(state.add_constant(&format!("c{i}")).unwrap());
    }
    let v = state.add_constant("v").unwrap();
    let ids = |xs: &[usize]| -> Vec<ConstantId> {
        xs.iter()
            .map(|&i| match c[i] {
                ElementRef::Constant(id) => id,
                _ => unreachable!(),
            })
            .collect()
    };
    let t1p = state.define_term(&ids(&[1, 2, 7, 8])).unwrap();
    let t2p = state.define_term(&ids(&[3, 4, 5, 6])).unwrap();
    let t1n = state.define_term(&ids(&[2, 4, 5, 7])).unwrap();
    let t2n = state.define_term(&ids(&[3, 5, 6, 8])).unwrap();
    let t3n = state.define_term(&ids(&[4, 5, 6, 7])).unwrap();
    let relations = vec![
        Relation::positive(v, t1p),
        Relation::positive(v, t2p),
        Relation::negative(v, t1n),
        Relation::negative(v, t2n),
        Relation::negative(v, t3n),
    ];
    Toy {
        state,
        v,
        c,
        t1p,
        t2p,
        t1n,
        t2n,
        t3n,
        relations,
    }
}

fn tr(state: &AlgebraState, x: ElementRef) -> BitSet {
    trace::trace(state, x).unwrap().0
}

#[test]
fn preprocessing_creates_three_dual_atoms_and_full_traces() {
    let mut toy = toy(0);
    let report = trace::preprocess_duals(&mut toy.state, &toy.relations).unwrap();
    assert!(report.consistent);
    // 0* plus one dual atom per negative example.
    assert_eq!(toy.state.live_dual_atom_count(), 4);
    // Before any atom is added every trace is GL^a([0]) = all dual atoms.
    for x in [toy.v, toy.t1p, toy.t1n, toy.t2n, toy.t3n] {
        assert_eq!(tr(&toy.state, x).len(), 4);
    }
    // Tr of the bottom atom is the full dual set as well.
    assert_eq!(tr(&toy.state, ElementRef::Atom(BOTTOM_ATOM)).len(), 4);
}

#[test]
fn negative_enforcement_adds_one_atom_to_v() {
    let mut toy = toy(0);
    trace::preprocess_duals(&mut toy.state, &toy.relations).unwrap();
    let negatives: Vec<Relation> = toy.relations[2..].to_vec();
    trace::enforce_negative_constraints(&mut toy.state, &negatives).unwrap();
    // One atom under v discriminates all three negatives at once.
    let v_atoms = toy.state.master_atoms(toy.v).unwrap();
    assert_eq!(v_atoms.len(), 2);
    assert_eq!(tr(&toy.state, toy.v).len(), 1);
    for x in [toy.t1n, toy.t2n, toy.t3n] {
        assert_eq!(tr(&toy.state, x).len(), 4);
        assert!(!tr(&toy.state, x).is_subset(&tr(&toy.state, toy.v)));
    }
    // The fresh atom under v has the trivial trace {0*}.
    let phi = v_atoms.iter().last().unwrap();
    assert_eq!(tr(&toy.state, ElementRef::Atom(AtomId(phi as u32))).len(), 1);
}

#[test]
fn positive_enforcement_shrinks_positive_term_traces() {
    let mut toy = toy(0);
    trace::preprocess_duals(&mut toy.state, &toy.relations).unwrap();
    trace::enforce_all(&mut toy.state, &toy.relations).unwrap();
    assert!(trace::constraints_hold(&toy.state, &toy.relations).unwrap());
    assert_eq!(tr(&toy.state, toy.v).len(), 1);
    assert_eq!(tr(&toy.state, toy.t1p).len(), 1);
    assert_eq!(tr(&toy.state, toy.t2p).len(), 1);
    // Negative terms keep a trace that escapes Tr(v); each holds at least
    // its own dual atom besides 0*.
    for x in [toy.t1n, toy.t2n, toy.t3n] {
        let t = tr(&toy.state, x);
        assert!(t.len() >= 2);
        assert!(!t.is_subset(&tr(&toy.state, toy.v)));
    }
}

#[test]
fn single_pixel_atom_traces_match_the_negative_structure() {
    let mut toy = toy(0);
    trace::preprocess_duals(&mut toy.state, &toy.relations).unwrap();
    // c1 appears in no negative example, c3 in one, c4 in two.
    let eps1 = toy.state.add_atom(&[toy.c[1]]).unwrap();
    let eps2 = toy.state.add_atom(&[toy.c[3]]).unwrap();
    let eps3 = toy.state.add_atom(&[toy.c[4]]).unwrap();
    let tr1 = tr(&toy.state, eps1);
    let tr2 = tr(&toy.state, eps2);
    let tr3 = tr(&toy.state, eps3);
    assert_eq!(tr1.len(), 1);
    assert_eq!(tr2.len(), 2);
    assert_eq!(tr3.len(), 3);
    // Tr(eps2) and Tr(eps3) overlap only in 0*.
    assert_eq!(tr2.intersection(&tr3).len(), 1);
    // Linearity: the trace of a merge is the intersection of the traces.
    let merged = toy.state.define_term(&[ConstantId(2), ConstantId(3)]).unwrap();
    assert_eq!(tr(&toy.state, merged), tr2.intersection(&tr3));
}

#[test]
fn crossing_enforces_positives_and_preserves_negatives() {
    for seed in 0..12 {
        let mut toy = toy(seed);
        crossing::embed(&mut toy.state, &toy.relations).unwrap();
        assert!(toy.state.leq(toy.v, toy.t1p).unwrap(), "seed {seed}");
        assert!(toy.state.leq(toy.v, toy.t2p).unwrap(), "seed {seed}");
        for x in [toy.t1n, toy.t2n, toy.t3n] {
            assert!(!toy.state.leq(toy.v, x).unwrap(), "seed {seed}");
        }
        toy.state.check_invariants().unwrap();
    }
}

/// The worked example's end state, hunted over seeds: two learned atoms,
/// the positive terms atom-identical to v, and each negative term holding
/// exactly one of the two (the checkerboard and the lone black pixel at c4
/// share theirs).
#[test]
fn some_seed_reproduces_the_worked_end_state() {
    let mut found = None;
    for seed in 0..64 {
        let mut toy = toy(seed);
        crossing::embed(&mut toy.state, &toy.relations).unwrap();
        let gl = |x| toy.state.master_atoms(x).unwrap();
        let v_set = gl(toy.v);
        if v_set.len() != 3 {
            continue;
        }
        if gl(toy.t1p) != v_set || gl(toy.t2p) != v_set {
            continue;
        }
        let n1 = gl(toy.t1n);
        let n2 = gl(toy.t2n);
        let n3 = gl(toy.t3n);
        if n1.len() != 2 || n2.len() != 2 || n3.len() != 2 {
            continue;
        }
        if n1 != n3 || n1 == n2 {
            continue;
        }
        // Both learned atoms of v are split across the negatives.
        let learned = v_set.difference(&BitSet::singleton(0));
        assert_eq!(n1.union(&n2).difference(&BitSet::singleton(0)), learned);
        found = Some(seed);
        break;
    }
    let seed = found.expect("no seed reproduced the worked end state");
    println!("worked end state reproduced at seed {seed}");
}

#[test]
fn planted_spurious_atom_is_reduced_away() {
    // Find a seed that lands the minimal two-atom model, implant an atom
    // under c1 that changes no trace, and let the reduction delete it.
    for seed in 0..64 {
        let mut toy = toy(seed);
        crossing::embed(&mut toy.state, &toy.relations).unwrap();
        if toy.state.master_atoms(toy.v).unwrap().len() != 3 {
            continue;
        }
        let before: Vec<BitSet> = (0..9)
            .map(|i| tr(&toy.state, ElementRef::Constant(ConstantId(i))))
            .collect();
        let beta = toy.state.add_atom(&[toy.c[1]]).unwrap();
        let ElementRef::Atom(beta_id) = beta else { unreachable!() };
        for (i, old) in before.iter().enumerate() {
            assert_eq!(&tr(&toy.state, ElementRef::Constant(ConstantId(i as u32))), old);
        }
        // The stochastic reduction removes beta within a few calls.
        let mut gone = false;
        for _ in 0..5 {
            reduction::reduce_master(&mut toy.state).unwrap();
            if !toy.state.atom_is_live(beta_id) {
                gone = true;
                break;
            }
        }
        assert!(gone, "spurious atom survived repeated reduction (seed {seed})");
        // Traces are intact and the two informative atoms survived.
        for (i, old) in before.iter().enumerate() {
            assert_eq!(&tr(&toy.state, ElementRef::Constant(ConstantId(i as u32))), old);
        }
        assert_eq!(toy.state.master_atoms(toy.v).unwrap().len(), 3);
        return;
    }
    panic!("no suitable seed found");
}

#[test]
fn minimal_toy_model_cannot_be_reduced() {
    for seed in 0..64 {
        let mut toy = toy(seed);
        crossing::embed(&mut toy.state, &toy.relations).unwrap();
        if toy.state.master_atoms(toy.v).unwrap().len() != 3 {
            continue;
        }
        let atoms_before = toy.state.live_atom_set().clone();
        let stats = reduction::reduce_master(&mut toy.state).unwrap();
        assert_eq!(stats.atoms_before, stats.atoms_after);
        assert_eq!(toy.state.live_atom_set(), &atoms_before);
        return;
    }
    panic!("no suitable seed found");
}

#[test]
fn pinning_matches_the_worked_example() {
    for seed in 0..64 {
        let mut toy = toy(seed);
        crossing::embed(&mut toy.state, &toy.relations).unwrap();
        let v_set = toy.state.master_atoms(toy.v).unwrap();
        if v_set.len() != 3 {
            continue;
        }
        // Check this is the canonical shape: atoms {v,c1,c3} and {v,c1,c4}.
        let fps: Vec<BitSet> = toy
            .state
            .learned_atoms()
            .map(|a| toy.state.atom_fingerprint(a))
            .collect();
        let want1 = BitSet::from_indices([0, 2, 8]); // c1, c3, v
        let want2 = BitSet::from_indices([0, 3, 8]); // c1, c4, v
        if !(fps.contains(&want1) && fps.contains(&want2) && fps.len() == 2) {
            continue;
        }
        let mut pinning = trainer::PinningStructure::new();
        let added = trainer::generate_pinning(&toy.state, 0, &mut pinning);
        assert_eq!(added, 2);
        // Each pinning term spans the six constants outside the atom; its
        // relations pin the atom's three constants.
        for (_, entry) in pinning.live() {
            assert_eq!(entry.fingerprint.len(), 3);
            assert!(entry.fingerprint.contains(8));
            assert!(entry.fingerprint.contains(0));
        }
        // Duplicate fingerprints across epochs collapse to one entry.
        assert_eq!(trainer::generate_pinning(&toy.state, 1, &mut pinning), 0);
        return;
    }
    panic!("no canonical seed found");
}

#[test]
fn single_epoch_training_yields_the_two_atom_model() {
    for seed in 0..32 {
        let mut toy = toy(seed);
        let mut pinning = trainer::PinningStructure::new();
        let config = trainer::EpochConfig::new(toy.relations.clone(), 0);
        let snapshot = trainer::train_epoch(&mut toy.state, &config, &mut pinning).unwrap();
        // Every batch relation holds in the trained model.
        for rel in &toy.relations {
            let holds = toy.state.leq(rel.lhs, rel.rhs).unwrap();
            assert_eq!(holds, rel.is_positive(), "seed {seed}");
        }
        if snapshot.atoms.len() == 2 {
            // Second epoch on the same batch keeps the train error at zero.
            let config = trainer::EpochConfig::new(toy.relations.clone(), 1);
            trainer::train_epoch(&mut toy.state, &config, &mut pinning).unwrap();
            for rel in &toy.relations {
                let holds = toy.state.leq(rel.lhs, rel.rhs).unwrap();
                assert_eq!(holds, rel.is_positive());
            }
            return;
        }
    }
    panic!("no seed yielded the two-atom model in one epoch");
}
