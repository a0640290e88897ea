//! Numerical toolkit for homogenization on randomly perforated domains.
//!
//! The crate covers the whole chain from a point cloud to a homogenized
//! parabolic problem:
//!
//! * [`geometry`]: overlap clusters, the Boolean model and its filled-up
//!   version (raster flood fill), and a conservative smoothness radius for
//!   disk clusters.
//! * [`process`]: stationary Poisson sampling with replica substreams and
//!   admissibility diagnostics.
//! * [`thinning`]: the regularizing thinning maps and their fixed-point
//!   characterization.
//! * [`percolation`]: the lattice field, disjoint channel counting by
//!   max-flow, minimal-open vertical crossings and subcritical diagnostics.
//! * [`conductivity`]: box energies of the variational conductivity formula on
//!   a multilinear trial space, polarization into a matrix, and the channel
//!   lower bound.
//! * [`pde`]: finite-volume solvers for the perforated Robin problem and its
//!   homogenized limit, plus the ε-ladder harness.
//! * [`stats`]: Monte Carlo estimators for intensities, vacancy and surface
//!   intensity.
//!
//! Everything here is `no_std` + `alloc` and free of IO; file formats, the CLI
//! and parallel drivers live in the `perforate` crate.

#![no_std]

extern crate alloc;

pub mod conductivity;
pub mod geometry;
pub mod linalg;
pub mod pde;
pub mod percolation;
pub mod point;
pub mod process;
pub mod stats;
pub mod thinning;

mod error;
mod spatial;
mod union_find;

pub use error::{Error, Result};
pub use geometry::GeometryParams;
pub use point::{Point, PointCloud, Window};
pub use process::ProcessParams;
pub use thinning::ThinningLevel;
