pub mod geometry;
pub mod labeling;
pub mod map;
pub mod regions;
pub mod separation;
pub mod solver;
pub mod tile;
pub mod zoning;

pub use tile::Tile;
