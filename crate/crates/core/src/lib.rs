//! Simulation and learning toolkit for the output states of shallow
//! quantum circuits.
//!
//! The crate covers the whole pipeline at desk scale (up to about twelve
//! qubits): dense states and Pauli algebra ([`qcore`]), layered circuits
//! and light cones ([`circuit`]), Born-rule sampling of Pauli-basis
//! measurements ([`sampler`]), linear-inversion and overlapping tomography
//! ([`tomography`]), circuit parent Hamiltonians and the robust marginal
//! fingerprint ([`parenth`]), and unique-determination probing plus
//! circuit-complexity bounds ([`uda`]).

pub mod circuit;
pub mod error;
pub mod parenth;
pub mod qcore;
pub mod sampler;
pub mod tomography;
pub mod uda;

pub use error::{Error, Result};
pub use circuit::{Geometry, GeometryKind, LayeredCircuit, LightCone};
pub use qcore::{
    DensityMatrix, HermitianOperator, Pauli, PauliString, PureState, QubitSubset,
};
