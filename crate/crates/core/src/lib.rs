//! Superabundancy of parametrized tropical curves.

pub mod abundancy;
pub mod classify;
pub mod curve;
pub mod error;
pub mod examples;
pub mod io;
pub mod linalg;
pub mod random;
pub mod simplex;
pub mod transforms;

pub use abundancy::{abundancy_matrix, analyze, obstructions, verify_obstruction, AbundancyReport, ObstructionTuple};
pub use classify::{
    classify, classify_genus2, core_isomorphic, is_indecomposable, is_irreducible, is_planar_superabundant,
    moduli_dimension, realizability_verdict, Genus2Classification, Genus2Variant, RealizabilityVerdict, SearchConfig,
    SuperabundanceClass, TriState, Verdict, Witness,
};
pub use curve::{
    core_neighbourhood, cycle_basis, degree_profile, genus, smoothing, subcurve, CycleBasis, DegreeProfile, Graph,
    SegmentDecomposition, TropicalCurve,
};
pub use error::{Error, Result};
pub use examples::{builtin, CurveTemplate};
pub use linalg::{Rational, RationalMatrix};
pub use transforms::{apply_affine, genus2_normal_form, project_onto_obstruction, AffineMap, DilationRecord};
