//! Parity of complete bars on noisy 5x5 images: trains a model, logs the
//! compression ratio, and compares measured error against the worst-case
//! random-model prediction (ln3/2)·C/κ and its symmetry-corrected variant.

use atomlat::algebra::AlgebraState;
use atomlat::inference;
use atomlat::metrics;
use atomlat::problems::bars::{BarGenerator, BarLabeler};
use atomlat::problems::pixels::PixelWorld;
use atomlat::trainer::{self, BatchSizing, FitProtocol};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let examples: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(30_000);
    let batch: usize = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(500);
    let seed: u64 = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(7);
    let dim = 5;
    let noise = 0.05;

    let mut state = AlgebraState::new(seed);
    let world = PixelWorld::register(&mut state, dim, dim).unwrap();
    let mut source = BarGenerator::new(dim, dim, noise, BarLabeler::ParityOfBars, seed ^ 0x9e37);
    let eval = BarGenerator::new(dim, dim, noise, BarLabeler::ParityOfBars, seed ^ 0x51f1).take(4000);
    let protocol = FitProtocol {
        sizing: BatchSizing::Fixed(batch),
        max_epochs: (examples / batch).max(1) as u32,
        stop_after_zero_error: None,
        keep_snapshots: 10,
        record_every: 2,
        max_pinning_enforced: None,
        reduce_every: 1,
    };
    let report = trainer::fit(&mut state, &world, &mut source, &eval, &protocol).unwrap();

    let c = world.paired_constant_count();
    println!("epoch  Z     kappa    measured  predicted  sym_predicted");
    let mut below = true;
    for r in &report.records {
        let Some(kappa) = r.kappa else { continue };
        let predicted = metrics::predicted_error(c, kappa);
        let sym = metrics::predicted_error_symmetric(dim as u32, kappa);
        println!(
            "{:5}  {:4}  {:7.1}  {:.4}    {:.4}     {:.4}",
            r.epoch, r.atom_count, kappa, r.test_err, predicted, sym
        );
        if r.test_err < 0.10 && r.test_err > predicted {
            below = false;
        }
    }
    println!("measured stays at or under the prediction once error < 10%: {below}");

    // Voting over the retained snapshots versus the final single model.
    let last = report.snapshots.last().unwrap();
    let mut wrong_single = 0usize;
    let mut wrong_vote = 0usize;
    for ex in &eval {
        let q = world.query(&ex.image).unwrap();
        if inference::contains(last, world.class, &q).unwrap() != ex.label {
            wrong_single += 1;
        }
        let vote = inference::vote(&report.snapshots, world.class, &q, 5).unwrap();
        if vote.decision != ex.label {
            wrong_vote += 1;
        }
    }
    println!(
        "single error {:.4} vs {}-snapshot vote (threshold 5) {:.4}",
        wrong_single as f64 / eval.len() as f64,
        report.snapshots.len(),
        wrong_vote as f64 / eval.len() as f64
    );
}
