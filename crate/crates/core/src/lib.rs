//! Symplectic inner product graphs `Spi(2ν, q)` over finite fields.
//!
//! The vertices of `Spi(2ν, q)` are the nontrivial subspaces of `F_q^(2ν)`;
//! `A` and `B` are joined when `A K tB = 0` for the standard alternating Gram
//! matrix `K`. Totally isotropic vertices carry a loop.

pub mod analysis;
pub mod autsearch;
pub mod gf;
pub mod groups;
pub mod linalg;
pub mod report;
pub mod spigraph;
pub mod symplectic;

pub use gf::{FieldAut, FieldElem, FieldSpec};
pub use linalg::{Matrix, Subspace};
pub use symplectic::{AutDescriptor, SympMatrix, SympSpace, SympType};
pub use spigraph::{Edge, SpiGraph, VertexId};
