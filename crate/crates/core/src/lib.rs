pub mod error;
pub mod geom;
pub mod lattice;
pub mod saw;
pub mod analysis;
