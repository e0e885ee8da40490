//! The 2x2 vertical-bar walkthrough, end to end: five training relations,
//! dual preprocessing, trace enforcement, Sparse Crossing, reduction and
//! pinning, printing the interesting intermediate state.

use atomlat::algebra::{AlgebraState, ConstantId, ElementRef, Relation};
use atomlat::crossing;
use atomlat::reduction;
use atomlat::trace;
use atomlat::trainer;

fn main() {
    // Pixels: c1/c2 black left column, c3/c4 black right column, c5..c8
    // the matching whites, plus the class constant v.
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0u64);
    let mut state = AlgebraState::new(seed);
    for i in 1..=8 {
        state.add_constant(&format!("c{i}")).unwrap();
    }
    let v = state.add_constant("v").unwrap();
    let ids = |xs: &[u32]| -> Vec<ConstantId> { xs.iter().map(|&i| ConstantId(i - 1)).collect() };
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

    let named = [
        (v, "v"),
        (t1p, "T1+"),
        (t2p, "T2+"),
        (t1n, "T1-"),
        (t2n, "T2-"),
        (t3n, "T3-"),
    ];
    let show = |state: &AlgebraState, label: &str| {
        println!("--- {label}");
        for (el, name) in named {
            let atoms = state.master_atoms(el).unwrap();
            let tr = trace::trace(state, el).unwrap().0;
            println!("  {name:3}  atoms {:?}  trace {:?}", atoms.to_vec(), tr.to_vec());
        }
    };

    let report = trace::preprocess_duals(&mut state, &relations).unwrap();
    println!(
        "dual preprocessing: consistent = {}, dual atoms = {}",
        report.consistent,
        state.live_dual_atom_count()
    );
    show(&state, "after preprocessing");

    trace::enforce_all(&mut state, &relations).unwrap();
    show(&state, "after trace enforcement");

    let positives: Vec<Relation> = relations.iter().filter(|r| r.is_positive()).copied().collect();
    crossing::enforce_positive_relations(&mut state, &positives).unwrap();
    show(&state, "after sparse crossing");

    for rel in &relations {
        let holds = state.leq(rel.lhs, rel.rhs).unwrap();
        println!(
            "  v {} {:?}: {}",
            if rel.is_positive() { "< " } else { "!<" },
            rel.rhs,
            if holds == rel.is_positive() { "ok" } else { "VIOLATED" }
        );
    }

    let stats = reduction::reduce_master(&mut state).unwrap();
    println!(
        "reduction: {} -> {} atoms (the minimal model cannot shrink)",
        stats.atoms_before, stats.atoms_after
    );

    let mut pinning = trainer::PinningStructure::new();
    let added = trainer::generate_pinning(&state, 0, &mut pinning);
    println!("pinning: {added} terms generated");
    for (_, entry) in pinning.live() {
        let names: Vec<&str> = entry
            .fingerprint
            .iter()
            .map(|c| state.constant_name(ConstantId(c as u32)))
            .collect();
        println!("  atom spanning {names:?} pins its complement");
    }

    for (el, name) in [(t1p, "T1+ (left bar)"), (t3n, "T3- (one black pixel)")] {
        let ElementRef::Term(_) = el else { unreachable!() };
        println!(
            "classify {name}: {}",
            if state.leq(v, el).unwrap() { "positive" } else { "negative" }
        );
    }
}
