//! Function-representation (F-rep) kernel for heterogeneous lattice structures.
//!
//! A lattice solid is the set `{X | F(X) >= 0}` where `F` is composed from a
//! topology field (beam skeleton or triply periodic surface) and a parameter
//! field whose values come from user supplied expressions.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, threading and
//! the command line live in the `hetlat` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod conformal;
pub mod expr;
pub mod field;
pub mod math;
pub mod mesher;
pub mod section;
pub mod topology;

pub use conformal::CylindricalMap;
pub use expr::{EvalError, Expr, ParseError, Scope};
pub use field::{CellGrid, FieldMode, LatticeField, ParamKey, ParameterField, ParameterSet};
pub use math::{Aabb, Vec3};
pub use mesher::{MeshReport, SampleGrid, TriangleMesh};
pub use section::{Profile, ProfileShape};
pub use topology::{BeamTopology, ImplicitSolid, SkeletalGraph, TpmsKind, TpmsSurface, Torus};
