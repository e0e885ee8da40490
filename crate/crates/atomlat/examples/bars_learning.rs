//! Supervised learning on noisy vertical-bar images: streams batches,
//! trains a single atomization, and prints the error curve with
//! false-positive/false-negative breakdown and atom-shape statistics.

use atomlat::algebra::AlgebraState;
use atomlat::inference;
use atomlat::problems::bars::{BarGenerator, BarLabeler};
use atomlat::problems::pixels::PixelWorld;
use atomlat::trainer::{self, BatchSizing, FitProtocol};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let dim: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let noise: f64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.1);
    let examples: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(8000);
    let batch: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(200);
    let seed: u64 = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(7);

    let mut state = AlgebraState::new(seed);
    let world = PixelWorld::register(&mut state, dim, dim).unwrap();
    let mut source = BarGenerator::new(dim, dim, noise, BarLabeler::HasVerticalBar, seed ^ 0x9e37);
    let eval = BarGenerator::new(dim, dim, noise, BarLabeler::HasVerticalBar, seed ^ 0x51f1).take(4000);
    let protocol = FitProtocol {
        sizing: BatchSizing::Fixed(batch),
        max_epochs: (examples / batch).max(1) as u32,
        stop_after_zero_error: None,
        keep_snapshots: 10,
        record_every: 5,
        max_pinning_enforced: None,
        reduce_every: 1,
    };
    let report = trainer::fit(&mut state, &world, &mut source, &eval, &protocol).unwrap();

    println!("epoch  atoms  kappa    test_err");
    for r in &report.records {
        println!(
            "{:5}  {:5}  {:7.1}  {:.4}",
            r.epoch,
            r.atom_count,
            r.kappa.unwrap_or(0.0),
            r.test_err
        );
    }

    let last = report.snapshots.last().unwrap();
    let mut fp = 0usize;
    let mut fns = 0usize;
    let mut pos = 0usize;
    let mut neg = 0usize;
    for ex in &eval {
        let q = world.query(&ex.image).unwrap();
        let predicted = inference::contains(last, world.class, &q).unwrap();
        if ex.label {
            pos += 1;
            if !predicted {
                fns += 1;
            }
        } else {
            neg += 1;
            if predicted {
                fp += 1;
            }
        }
    }
    println!(
        "final: FPR {:.4} ({fp}/{neg})  FNR {:.4} ({fns}/{pos})",
        fp as f64 / neg.max(1) as f64,
        fns as f64 / pos.max(1) as f64
    );

    // Atom shapes: size histogram and how many have the exact form (one
    // black pixel in every column, plus the class constant).
    let v_idx = last.constant_index("v").unwrap();
    let class_atoms: Vec<&Vec<u32>> = last
        .atoms
        .iter()
        .filter(|fpr| fpr.binary_search(&v_idx).is_ok())
        .collect();
    let black_limit = (dim * dim) as u32;
    let mut exact = 0usize;
    let mut sizes = Vec::new();
    for fpr in &class_atoms {
        let pixels: Vec<u32> = fpr.iter().copied().filter(|&c| c != v_idx).collect();
        sizes.push(pixels.len());
        let all_black = pixels.iter().all(|&c| c < black_limit);
        let mut col_seen = vec![0usize; dim];
        for &c in &pixels {
            if c < black_limit {
                col_seen[(c as usize) % dim] += 1;
            }
        }
        if all_black && col_seen.iter().all(|&n| n == 1) {
            exact += 1;
        }
    }
    sizes.sort_unstable();
    println!(
        "class atoms: {} total, {} exact-form; pixel-span min {:?} median {:?} max {:?}",
        class_atoms.len(),
        exact,
        sizes.first(),
        sizes.get(sizes.len() / 2),
        sizes.last()
    );
    println!("pinning entries in snapshot: {}", last.pinning.len());
}
