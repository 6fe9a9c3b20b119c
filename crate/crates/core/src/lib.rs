//! Spectral bounds for combinatorial Laplacians of simplicial complexes.

pub mod bounds;
pub mod complex;
pub mod error;
pub mod families;
pub mod generators;
pub mod harness;
pub mod instance;
pub mod operator;
pub mod par;
pub mod spectra;

pub use bounds::{evaluate_bound, BoundId, BoundReport, Evaluator, Tier, Witness};
pub use complex::{build_complex, Face, PartiteStructure, SimplicialComplex, VertexId};
pub use error::{Error, Result};
pub use families::Family;
pub use instance::{ComplexFile, Instance};
pub use operator::{boundary_matrix, laplacian, LaplacianKind, OperatorKind, OperatorMatrix};
pub use spectra::{degree_profile, spectrum, top_k_sum, DegreeProfile, SpectrumSummary};
