//! Crate-wide error type.
//!
//! Variants are split into two classes: input errors (bad data handed to the
//! tool, CLI exit code 1) and structural errors (invariants the mathematics
//! guarantees were found violated, CLI exit code 2).

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        got: usize,
    },

    #[error("cone is not strictly convex: generated by {rays}")]
    NotStrictlyConvex { rays: String },

    #[error("ray {ray} is not primitive (divide by {gcd})")]
    NonPrimitiveRay { ray: String, gcd: String },

    #[error("cones {a} and {b} intersect in a region that is not a common face")]
    OverlappingCones { a: String, b: String },

    #[error("unknown cone identifier {0}")]
    UnknownCone(usize),

    #[error("unknown vertex {name}; available: {available}")]
    UnknownVertex { name: String, available: String },

    #[error("cone {cone} is not contained in any cone of the target complex")]
    NotContained { cone: String },

    #[error("cone {cone} has a non-saturated lattice; invariant factors {factors}")]
    NotSaturated { cone: String, factors: String },

    #[error("sublattice has torsion quotient; invariant factors {factors}")]
    TorsionQuotient { factors: String },

    #[error("sublattice generators are linearly dependent")]
    DependentColumns,

    #[error("combinatorial flatness fails: cone {cone} maps onto {image}, which is not a face of the base cone")]
    NotFlat { cone: String, image: String },

    #[error("combinatorial reducedness fails: cone {cone} maps onto the lattice of its image face with index {index}")]
    NotReduced { cone: String, index: String },

    #[error("point {point} lies outside the support of the base cone")]
    PointOutsideBase { point: String },

    #[error("complex is not smooth: cone {cone} has multiplicity {multiplicity}")]
    NotSmooth { cone: String, multiplicity: String },

    #[error("fan is not simplicial: cone {cone} has {nrays} rays in dimension {dim}")]
    NotSimplicial {
        cone: String,
        nrays: usize,
        dim: usize,
    },

    #[error("fan does not span its ambient space (rank {rank} < {ambient})")]
    NotSpanning { rank: usize, ambient: usize },

    #[error("function does not vanish on the vertex cone {cone}")]
    NotVanishing { cone: String },

    #[error("no integral lift of the mixing collection exists; class group torsion {factors}")]
    LiftObstruction { factors: String },

    #[error("input: {0}")]
    Input(String),

    #[error("structural inconsistency: {0}")]
    Structural(String),
}

impl Error {
    /// CLI exit class: structural inconsistencies are distinguished from
    /// ordinary bad input.
    pub fn is_structural(&self) -> bool {
        matches!(self, Error::Structural(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
