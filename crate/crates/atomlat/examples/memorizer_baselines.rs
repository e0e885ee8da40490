//! The two memorizing baselines next to the trained model on the 2x2 toy:
//! the least-free memorizer answers with a strong yes bias, the freest
//! model with a strong no bias, and Sparse Crossing sits in between.

use atomlat::algebra::{AlgebraState, ConstantId, ElementRef, Relation};
use atomlat::crossing;
use atomlat::inference;
use atomlat::problems::bars::BinaryImage;
use atomlat::problems::pixels::PixelWorld;

fn main() {
    let mut state = AlgebraState::new(1);
    let world = PixelWorld::register(&mut state, 2, 2).unwrap();
    // Training set: the two bars as positives, three non-bars as negatives.
    let mut relations: Vec<Relation> = Vec::new();
    let mut chosen_negatives = 0;
    for image in BinaryImage::enumerate(2, 2) {
        if image.has_vertical_bar() && image.pixels.iter().filter(|&&p| p).count() == 2 {
            relations.push(world.relation(&mut state, &image, true).unwrap());
        } else if !image.has_vertical_bar()
            && image.pixels.iter().filter(|&&p| p).count() <= 2
            && chosen_negatives < 3
            && image.pixels.iter().any(|&p| p)
        {
            relations.push(world.relation(&mut state, &image, false).unwrap());
            chosen_negatives += 1;
        }
    }
    println!("{} training relations", relations.len());

    let (least, _) = inference::build_least_free_algebra(&state, &relations).unwrap();
    let freest = inference::build_freest_algebra(&state, &relations, 1 << 16).unwrap();
    let mut trained = state.clone();
    crossing::embed(&mut trained, &relations).unwrap();

    println!(
        "atoms: least-free {}, trained {}, freest {}",
        least.live_atom_set().len() - 1,
        trained.live_atom_set().len() - 1,
        freest.live_atom_set().len() - 1
    );

    // Classify every 2x2 image with each model.
    let mut header = String::from("image (black pixels)  truth  least  trained  freest");
    println!("{header}");
    header.clear();
    let mut scores = [0usize; 3];
    let mut total = 0;
    for image in BinaryImage::enumerate(2, 2) {
        let term = world.encode_image(&mut state, &image).unwrap();
        // The term exists in every model copy: re-register there.
        let answers: Vec<bool> = [&least, &trained, &freest]
            .iter()
            .map(|model| {
                let mut m = (*model).clone();
                let t = world.encode_image(&mut m, &image).unwrap();
                m.leq(world.class.into(), ElementRef::Term(t)).unwrap()
            })
            .collect();
        let truth = image.has_vertical_bar();
        total += 1;
        for (i, &a) in answers.iter().enumerate() {
            if a == truth {
                scores[i] += 1;
            }
        }
        let blacks: Vec<usize> = image
            .pixels
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| i)
            .collect();
        println!(
            "{:<20}  {truth:<5}  {:<5}  {:<7}  {}",
            format!("{blacks:?}"),
            answers[0], answers[1], answers[2]
        );
        let _ = term;
    }
    println!(
        "correct of {total}: least-free {}, trained {}, freest {}",
        scores[0], scores[1], scores[2]
    );
    println!("note: the memorizers answer with their bias off the training set;");
    println!("the trained model is the one that generalizes.");

    let _ = ConstantId(0);
}
