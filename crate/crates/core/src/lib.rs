//! Bond percolation on finite (mostly regular) graphs, with the non-backtracking
//! random walk diagnostics that predict mean-field critical behaviour.
//!
//! The crate is organized around one pipeline:
//!
//! * [`graph`] builds and inspects the graph families of interest (complete,
//!   Hamming, random regular, Ramanujan Cayley graphs) plus arbitrary edge lists.
//! * [`nbrw`] computes exact return probabilities of the non-backtracking walk
//!   on the directed-edge state space.
//! * [`conditions`] turns return profiles into the two walk statistics that
//!   certify mean-field behaviour, plus closed-form bounds for expanders and
//!   Hamming cubes.
//! * [`tree`] carries the idealized model: percolation on the rooted d-regular
//!   infinite tree (level moments, effective resistance, survival bounds).
//! * [`coupling`] couples a percolated ball in the graph with the percolated
//!   covering tree and exposes the sandwich between the two.
//! * [`percolation`] samples percolation itself: edge masks, component stats,
//!   lazily revealed balls, the multi-root exploration process, and component
//!   geometry (diameter, lazy-walk mixing time).
//! * [`harness`] wires it all into reproducible sweeps with CSV/JSON output.

#![forbid(unsafe_code)]

pub mod conditions;
pub mod coupling;
pub mod error;
pub mod graph;
pub mod harness;
pub mod nbrw;
pub mod percolation;
pub mod tree;

pub use error::{Error, Result};
