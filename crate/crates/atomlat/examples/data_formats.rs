//! The external data formats in one place: relation lines for encoded
//! problems and the IDX container for labeled images.

use atomlat::algebra::AlgebraState;
use atomlat::problems::bars::{BarGenerator, BarLabeler};
use atomlat::problems::dsl;
use atomlat::problems::idx;
use atomlat::problems::pixels::PixelWorld;

fn main() {
    // Relation lines: encode a handful of labeled images, export, reimport.
    let mut state = AlgebraState::new(2);
    let world = PixelWorld::register(&mut state, 3, 3).unwrap();
    let examples = BarGenerator::new(3, 3, 0.1, BarLabeler::HasVerticalBar, 4).take(4);
    let mut relations = Vec::new();
    for ex in &examples {
        relations.push(world.relation(&mut state, &ex.image, ex.label).unwrap());
    }
    let text = dsl::export_relations(&state, &relations);
    println!("--- relation lines\n{text}");
    let mut fresh = AlgebraState::new(0);
    let back = dsl::import_relations(&mut fresh, &text).unwrap();
    println!(
        "reimported {} relations over {} constants\n",
        back.len(),
        fresh.constant_count()
    );

    // IDX: write a fixture, read it back binarized.
    let dir = std::env::temp_dir();
    let img = dir.join("atomlat_example_images.idx");
    let lbl = dir.join("atomlat_example_labels.idx");
    let ramp: Vec<u8> = (0..9).map(|i| (i * 30) as u8).collect();
    idx::write_idx(&img, &lbl, &[ramp], &[1], 3, 3).unwrap();
    let loaded = idx::load_idx(&img, &lbl, 128, 1).unwrap();
    println!("--- idx fixture");
    for row in 0..3 {
        let line: String = (0..3)
            .map(|col| if loaded[0].image.get(row, col) { '#' } else { '.' })
            .collect();
        println!("{line}");
    }
    println!("label: {}", loaded[0].label);
    let _ = std::fs::remove_file(&img);
    let _ = std::fs::remove_file(&lbl);
}
