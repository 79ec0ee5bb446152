//! wharf-core: an exact computational engine that realizes certain fusion
//! categories as comodule categories of weak Hopf algebras.
//!
//! The pipeline starts from a finite directed multigraph (the dimension
//! graph of a module category), builds the graded path coalgebra with its
//! weak bialgebra structure, quotients by the relations induced by a braiding
//! (an endomorphism-style quotient driven by an R-matrix), normalizes by a
//! distinguished group-like element, and assembles a finite-dimensional weak
//! Hopf algebra with an exactly verified antipode. All arithmetic happens in
//! cyclotomic number fields; there is no floating point in this crate.

pub mod axioms;
pub mod cyclo;
pub mod error;
pub mod frt;
pub mod graph;
pub mod grouplike;
pub mod linalg;
pub mod tl;
pub mod wba;

pub use axioms::{
    all_digraphs, check_axioms, check_wba_axioms, AxiomCheck, AxiomReport, CorruptedTable,
    PathTable, WbaTable,
};
pub use cyclo::{cyclotomic_poly, euler_phi, field_for_level, CycloNumber, FieldContext};
pub use error::{Result, WharfError};
pub use frt::{
    check_star_triangular, commutant_dimension, frt_relations, general_relations, DegreeReport,
    Quotient, QuotientDegree, RForm, RelationSet, StarTriangleReport,
};
pub use graph::{
    dimension_graph_from_fusion, fibonacci_fusion, sl2_dimension_graph, sl2_fusion,
    DimensionGraph, FusionData, Path,
};
pub use grouplike::{
    grouplike_from_comodule, grouplike_g2, grouplike_solve, loop_projection, projector_q,
    unit_comodule_basis, verify_grouplike, GradedGroupLikes, GroupLikeCertificate,
};
pub use linalg::{kernel_basis, rref, solve_affine, ExactMatrix, SparseRref};
pub use tl::{
    admissible, closed_form_r, derive_r_matrix, derive_r_matrix_inverse, enumerate_diagrams,
    jones_wenzl, loop_value, quantum_dim, six_j, tet, theta, tl_multiply, trivalent,
    PlanarDiagram, RMatrix, TlElement,
};
