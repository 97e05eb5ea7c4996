//! Tiles, bitiles, wave packets, trees, size and density, and the linearised
//! model operator with its bilinear form.

mod collection;
mod constants;
mod linearization;
mod model;
mod norms;
mod packet;
mod tile;
mod tree;

pub use collection::{
    build_bitile_collection, build_on_levels, scale_levels, separation_flags, SeparationFlags, TileCollection,
};
pub use constants::AdmissibleConstants;
pub use linearization::{LinPoint, Linearization};
pub use model::{
    bilinear_form, bilinear_form_with, model_operator, model_operator_with, variational_model_operator, PacketTable,
};
pub use norms::{
    chi_tilde, coefficients, density, size, square_function_from, tree_square_function, DensityEvaluator,
    DensityMode, SizeEvaluator,
};
pub use packet::{bump, profile, wave_packet, PacketSpectrum, BUMP_CUTOFF};
pub use tile::{frequency_cell, Bitile, FreqInterval, Lattice, Tile};
pub use tree::{is_member, is_overlapping, TopIndex, Tree, TreeKind, TreeTop};
