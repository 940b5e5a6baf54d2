//! Exact computations for involutions of `Zⁿ`: lattice invariants, the
//! module classes over `Z[t]/(t² − 1)`, the Z/2-equivariant K-theory of the
//! torus and the K-theory of the reduced group C*-algebra of `Zⁿ ⋊ Z/2`.

pub mod intlin;
pub mod lattice;
pub mod oracle;
pub mod repring;
pub mod toruskt;

pub use intlin::{CokernelShape, IntMatrix, SmithDecomposition};
pub use lattice::{ActionClass, Block, Decomposition, InvolutiveLattice, LatticeError, StructureInvariants};
pub use repring::{LocalizedShape, ModuleClass, ModuleTables, PrimeSite, RModuleSum};
pub use toruskt::{
    CertificateTrace, CohomologyAction, CstarReport, FixedSetDescription, KRankReport, Quantity, Report, ScopeError,
    ScopeFlag,
};
