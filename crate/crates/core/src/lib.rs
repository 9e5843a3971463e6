//! Staggered quantum walk on the cyclic hexagonal lattice.
//!
//! The walk alternates three local unitaries `exp(iθH)`, one per edge
//! colour of the honeycomb. The crate provides the lattice, sparse and
//! Fourier-space evolution, position statistics, localization diagnostics
//! and the single-marked-vertex search, plus a CLI that writes the results
//! as CSV and SVG.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod lattice;
pub mod linalg;
pub mod localization;
pub mod roots;
pub mod search;
pub mod spectral;

pub use dynamics::{InitialState, SigmaSeries};
pub use error::{Error, Result};
pub use evolution::{StateVector, WalkAngles};
pub use lattice::{Cell, Color, HexLattice, Vertex};
pub use localization::CriticalPoint;
pub use search::{SearchAnalysis, SearchConfig};
pub use spectral::{FourierBlock, SpectralPropagator};
