//! Weighted simplicial complexes as high-dimensional expander candidates.
//!
//! The crate computes link spectral gaps, GF(2) coboundary and cocycle
//! expansion, runs local minimization of cochains, scans isoperimetric
//! inequalities and assembles overlap hypothesis certificates. Weights and
//! norms are exact; only eigenvalues are floating point.

pub mod cochain;
pub mod complex;
pub mod config;
mod enumerate;
pub mod expansion;
pub mod minimality;
pub mod overlap;
pub mod error;
pub mod generators;
pub mod gf2;
pub mod io;
pub mod isoperimetry;
pub mod rational;
pub mod spectral;
pub mod suite;

pub use complex::{build_complex, Link, Simplex, Violation, WeightKind, WeightedComplex};
pub use config::Config;
pub use error::{HdxError, Result};
pub use generators::{standard_corpus, CorpusEntry, GeneratorSpec};
pub use gf2::{Bits, LinearMap, Rref};
pub use io::{read_complex, write_complex, ComplexFile};
pub use rational::{fmt_rational, parse_rational, ExtRational, Rational};
