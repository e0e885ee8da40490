//! Problem encoders, generators and data ingestion: bar-image worlds, the
//! exact vertical-bar atomization, the Queens rule set and board validator,
//! IDX image loading, and the line-based relation format.

pub mod bars;
pub mod dsl;
pub mod idx;
pub mod pixels;
pub mod queens;

pub use bars::{
    exact_vertical_bar_atomization, gen_bar_images, required_atom_count, BarGenerator, BarLabeler,
    BinaryImage, LabeledExample,
};
pub use pixels::PixelWorld;
pub use queens::{encode_queens, read_board, validate_board, BoardSpec, QueensWorld, SquareState};
