//! Constant table for binary-image classification: one black and one white
//! constant per pixel plus a single class constant.

use crate::algebra::{AlgebraState, ConstantId, ElementRef, Relation, TermId};
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::inference::QueryTerm;
use crate::problems::bars::BinaryImage;

/// Pixel constants for a fixed image size. Indices are laid out row-major,
/// black plane first, then the white plane, then the class constant.
#[derive(Clone, Debug)]
pub struct PixelWorld {
    pub width: usize,
    pub height: usize,
    black: Vec<ConstantId>,
    white: Vec<ConstantId>,
    pub class: ConstantId,
}

impl PixelWorld {
    pub fn register(state: &mut AlgebraState, width: usize, height: usize) -> Result<PixelWorld> {
        let mut black = Vec::with_capacity(width * height);
        let mut white = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                let ElementRef::Constant(c) = state.add_constant(&format!("b_{row}_{col}"))? else {
                    unreachable!()
                };
                black.push(c);
            }
        }
        for row in 0..height {
            for col in 0..width {
                let ElementRef::Constant(c) = state.add_constant(&format!("w_{row}_{col}"))? else {
                    unreachable!()
                };
                white.push(c);
            }
        }
        let ElementRef::Constant(class) = state.add_constant("v")? else {
            unreachable!()
        };
        Ok(PixelWorld {
            width,
            height,
            black,
            white,
            class,
        })
    }

    pub fn black(&self, row: usize, col: usize) -> ConstantId {
        self.black[row * self.width + col]
    }

    pub fn white(&self, row: usize, col: usize) -> ConstantId {
        self.white[row * self.width + col]
    }

    /// Number of paired pixel constants (the class constant not counted).
    pub fn paired_constant_count(&self) -> usize {
        2 * self.width * self.height
    }

    fn check_dims(&self, img: &BinaryImage) -> Result<()> {
        if img.width != self.width || img.height != self.height {
            return Err(Error::DimensionMismatch);
        }
        Ok(())
    }

    /// Pixel constants of an image, one per pixel in its observed color.
    pub fn image_constants(&self, img: &BinaryImage) -> Result<Vec<ConstantId>> {
        self.check_dims(img)?;
        let mut out = Vec::with_capacity(self.width * self.height);
        for row in 0..self.height {
            for col in 0..self.width {
                out.push(if img.get(row, col) {
                    self.black(row, col)
                } else {
                    self.white(row, col)
                });
            }
        }
        Ok(out)
    }

    /// Registers the image as a term of the algebra.
    pub fn encode_image(&self, state: &mut AlgebraState, img: &BinaryImage) -> Result<TermId> {
        let comps = self.image_constants(img)?;
        let ElementRef::Term(t) = state.define_term(&comps)? else {
            unreachable!()
        };
        Ok(t)
    }

    /// Training relation for a labeled image: `v < T` or its negation.
    pub fn relation(&self, state: &mut AlgebraState, img: &BinaryImage, label: bool) -> Result<Relation> {
        let t = self.encode_image(state, img)?;
        Ok(if label {
            Relation::positive(self.class, t)
        } else {
            Relation::negative(self.class, t)
        })
    }

    /// Snapshot-side query term for an image (no algebra mutation).
    pub fn query(&self, img: &BinaryImage) -> Result<QueryTerm> {
        let comps = self.image_constants(img)?;
        Ok(QueryTerm {
            constants: comps.iter().map(|c| c.0 as usize).collect::<BitSet>(),
        })
    }
}
