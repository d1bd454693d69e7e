//! Exact geometry, boundary measures and flow dynamics for finite metric
//! graphs acted on by free groups.
//!
//! The quotient object is a finite connected graph with positive rational
//! edge lengths and minimum valence three; its universal cover is a
//! simplicial tree carrying a geodesic flow.  The crate provides:
//!
//! * exact tree geometry: distances, Busemann cocycles, the Gromov-type
//!   functional `beta`, translation lengths, axes and shadows ([`graph`],
//!   [`tree`], [`end`]);
//! * the critical exponent and a conformal density realized on boundary
//!   cylinders through Perron eigendata of the non-backtracking transition
//!   matrix ([`patterson`]);
//! * the cross-ratio calculus on quadruples of ends, with the identities
//!   relating cross-ratios to translation lengths, and arithmeticity
//!   verdicts for value sets ([`crossratio`]);
//! * the flow-invariant pair measure, its suspension realization, and
//!   ergodicity/mixing diagnostics ([`dynamics`]);
//! * fundamental domains and quotient measures for finite group actions
//!   ([`quotient`]);
//! * the self-test suites shared by the command line tool ([`selftest`]).
//!
//! All metric bookkeeping is exact rational arithmetic; floating point is
//! confined to spectral data and Monte Carlo estimates.

pub mod crossratio;
pub mod dynamics;
pub mod end;
pub mod graph;
pub mod patterson;
pub mod quotient;
pub mod rat;
pub mod selftest;
pub mod tree;
pub mod word;

pub use end::{Beta, End, EndCylinder, EndError, Shadow};
pub use graph::{DirEdge, Edge, GraphError, MetricGraph};
pub use patterson::{CylinderMeasure, GibbsWeights, PattersonError};
pub use rat::Rat;
pub use tree::{TreePoint, TreeVertex};
pub use word::Word;
