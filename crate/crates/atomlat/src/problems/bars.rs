//! Vertical-bar image worlds: generators, the closed-form atom-count bound
//! and the exact atomization used as a classification oracle.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::problems::pixels::PixelWorld;

/// Row-major binary image; `true` is black.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<bool>,
}

impl BinaryImage {
    pub fn blank(width: usize, height: usize) -> Self {
        BinaryImage {
            width,
            height,
            pixels: vec![false; width * height],
        }
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.pixels[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, black: bool) {
        self.pixels[row * self.width + col] = black;
    }

    /// Columns whose every pixel is black.
    pub fn complete_black_columns(&self) -> usize {
        (0..self.width)
            .filter(|&col| (0..self.height).all(|row| self.get(row, col)))
            .count()
    }

    pub fn has_vertical_bar(&self) -> bool {
        self.complete_black_columns() > 0
    }

    /// Enumerates every image of the given size; usable up to ~20 pixels.
    pub fn enumerate(width: usize, height: usize) -> impl Iterator<Item = BinaryImage> {
        let n = width * height;
        (0u64..(1 << n)).map(move |bits| BinaryImage {
            width,
            height,
            pixels: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        })
    }
}

/// Task that assigns the label; both are recomputed on the final image so
/// the label always matches the column predicate the task is about.
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum BarLabeler {
    HasVerticalBar,
    ParityOfBars,
}

impl BarLabeler {
    pub fn label(&self, img: &BinaryImage) -> bool {
        match self {
            BarLabeler::HasVerticalBar => img.has_vertical_bar(),
            BarLabeler::ParityOfBars => img.complete_black_columns() % 2 == 0,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledExample {
    pub image: BinaryImage,
    pub label: bool,
}

/// Seeded stream of bar images: a random number of black vertical bars in
/// random positions over a white background, background pixels then flipped
/// to black with probability `noise`.
#[derive(Clone)]
pub struct BarGenerator {
    pub width: usize,
    pub height: usize,
    pub noise: f64,
    pub labeler: BarLabeler,
    rng: ChaCha8Rng,
}

impl BarGenerator {
    pub fn new(width: usize, height: usize, noise: f64, labeler: BarLabeler, seed: u64) -> Self {
        assert!((0.0..1.0).contains(&noise), "noise must be in [0, 1)");
        BarGenerator {
            width,
            height,
            noise,
            labeler,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_example(&mut self) -> LabeledExample {
        let mut img = BinaryImage::blank(self.width, self.height);
        let bar_count = match self.labeler {
            // Balanced presence classes: half the images start bar-free.
            BarLabeler::HasVerticalBar => {
                if self.rng.gen_bool(0.5) {
                    0
                } else {
                    self.rng.gen_range(1..=self.width)
                }
            }
            BarLabeler::ParityOfBars => self.rng.gen_range(0..=self.width),
        };
        let mut cols: Vec<usize> = (0..self.width).collect();
        for i in 0..bar_count {
            let j = self.rng.gen_range(i..cols.len());
            cols.swap(i, j);
            for row in 0..self.height {
                img.set(row, cols[i], true);
            }
        }
        if self.noise > 0.0 {
            for p in img.pixels.iter_mut() {
                if !*p && self.rng.gen_bool(self.noise) {
                    *p = true;
                }
            }
        }
        let label = self.labeler.label(&img);
        LabeledExample { image: img, label }
    }

    pub fn take(&mut self, count: usize) -> Vec<LabeledExample> {
        (0..count).map(|_| self.next_example()).collect()
    }
}

/// Deterministic batch of labeled bar images.
pub fn gen_bar_images(
    width: usize,
    height: usize,
    noise: f64,
    labeler: BarLabeler,
    count: usize,
    seed: u64,
) -> Vec<LabeledExample> {
    BarGenerator::new(width, height, noise, labeler, seed).take(count)
}

/// The exact atomization of the vertical-bar class: one atom per mapping
/// from columns to rows, edged to one black pixel per column plus the class
/// constant. `rows^cols` fingerprints; capped.
pub fn exact_vertical_bar_atomization(
    world: &PixelWorld,
    cap: usize,
) -> Result<Vec<BitSet>> {
    let rows = world.height;
    let cols = world.width;
    let total = (rows as u128).pow(cols as u32);
    if total > cap as u128 {
        return Err(Error::SizeLimitExceeded(format!(
            "{rows}^{cols} = {total} atoms exceeds cap {cap}"
        )));
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut choice = vec![0usize; cols];
    loop {
        let mut fp = BitSet::singleton(world.class.0 as usize);
        for (col, &row) in choice.iter().enumerate() {
            fp.insert(world.black(row, col).0 as usize);
        }
        out.push(fp);
        // Odometer over column -> row mappings.
        let mut i = 0;
        loop {
            if i == cols {
                return Ok(out);
            }
            choice[i] += 1;
            if choice[i] < rows {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Atoms needed for a false-positive rate below `target_fpr` when each atom
/// spans one black pixel in each of `bar_length` columns and background
/// noise flips pixels black with probability `noise`:
/// ceil(ln(fpr) / ln(1 - (1 - noise)^bar_length)).
pub fn required_atom_count(noise: f64, bar_length: u32, target_fpr: f64) -> u32 {
    assert!(noise > 0.0 && noise < 1.0);
    assert!(target_fpr > 0.0);
    if target_fpr >= 1.0 {
        return 0;
    }
    let p_contains = 1.0 - (1.0 - noise).powi(bar_length as i32);
    (target_fpr.ln() / p_contains.ln()).ceil() as u32
}
