//! Classification through pinning-derived atoms with a misses cutoff:
//! pinning accumulates many atoms across epochs; tolerating a few missing
//! ones trades false negatives against false positives.

use atomlat::algebra::AlgebraState;
use atomlat::inference;
use atomlat::problems::bars::{BarGenerator, BarLabeler};
use atomlat::problems::pixels::PixelWorld;
use atomlat::trainer::{self, BatchSizing, FitProtocol};

fn main() {
    let seed = 7u64;
    let dim = 5;
    let noise = 0.1;
    let mut state = AlgebraState::new(seed);
    let world = PixelWorld::register(&mut state, dim, dim).unwrap();
    let mut source = BarGenerator::new(dim, dim, noise, BarLabeler::HasVerticalBar, seed ^ 0x9e37);
    let eval = BarGenerator::new(dim, dim, noise, BarLabeler::HasVerticalBar, seed ^ 0x51f1).take(4000);
    let protocol = FitProtocol {
        sizing: BatchSizing::Fixed(500),
        max_epochs: 16,
        stop_after_zero_error: None,
        keep_snapshots: 10,
        record_every: 4,
        max_pinning_enforced: None,
        reduce_every: 1,
    };
    let report = trainer::fit(&mut state, &world, &mut source, &eval, &protocol).unwrap();
    let snap = report.snapshots.last().unwrap();

    let class_pins = snap
        .pinning
        .iter()
        .filter(|fp| fp.binary_search(&world.class.0).is_ok())
        .count();
    println!(
        "snapshot: {} live atoms, {} pinning fingerprints ({} touching the class)",
        snap.atoms.len(),
        snap.pinning.len(),
        class_pins
    );
    println!("cutoff  error   FPR     FNR");
    for cutoff in [0usize, 1, 2, 4, 8, 16, 32, class_pins] {
        let mut fp = 0usize;
        let mut fns = 0usize;
        let (mut pos, mut neg) = (0usize, 0usize);
        for ex in &eval {
            let q = world.query(&ex.image).unwrap();
            let decided = inference::misses_classify(&snap.pinning, world.class, &q, cutoff);
            if ex.label {
                pos += 1;
                if !decided {
                    fns += 1;
                }
            } else {
                neg += 1;
                if decided {
                    fp += 1;
                }
            }
        }
        println!(
            "{cutoff:6}  {:.4}  {:.4}  {:.4}",
            (fp + fns) as f64 / eval.len() as f64,
            fp as f64 / neg.max(1) as f64,
            fns as f64 / pos.max(1) as f64
        );
    }
    println!("(cutoff 0 equals plain containment over the pinning atoms;");
    println!(" a saturated cutoff declares everything positive)");
}
