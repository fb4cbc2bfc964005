//! Argyris C1 finite elements for the stream-function form of the steady
//! incompressible Navier-Stokes equations on the unit square.
//!
//! The crate is `no_std` with `alloc`. Everything here is pure computation:
//! mesh generation and DOF numbering, the 21-DOF quintic Argyris basis,
//! triangle quadrature, sparse assembly, Krylov solvers, the Picard
//! (fixed-point) driver and post-processing (error norms, contour lines,
//! sparsity patterns). File formats and the command-line driver live in the
//! `argyris-fem` crate.
//!
//! Enable the `std` feature to have solvers record wall-clock time.
//!
//! ```
//! use argyris_core::mesh::{build_uniform_mesh, OrderingScheme, BoundaryClamp};
//! use argyris_core::assembly::ArgyrisSpace;
//!
//! let mesh = build_uniform_mesh(3).unwrap();
//! let space = ArgyrisSpace::new(&mesh, OrderingScheme::VertexBlock, BoundaryClamp::AllVertexDofs).unwrap();
//! assert_eq!(space.dofmap().total_dofs(), 129);
//! assert_eq!(space.free_count(), 45);
//! ```
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

mod error;
mod linalg;

pub mod analysis;
pub mod argyris;
pub mod assembly;
pub mod manufactured;
pub mod mesh;
pub mod picard;
pub mod poly;
pub mod quadrature;
pub mod solvers;
pub mod sparse;

pub use error::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// 2D point in the unit square.
pub type Point = [f64; 2];
