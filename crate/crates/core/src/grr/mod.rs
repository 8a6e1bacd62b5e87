//! Boundary-configuration ledger for the log Riemann-Roch cancellation.
//!
//! The input is a combinatorial descriptor of a compactified fibration's
//! boundary: components `Y_i` upstairs and `T_j` downstairs related by a
//! multiplicity matrix, a stratum oracle recording which intersections are
//! nonempty, and the support of the non-reduced locus `Z`. On top of that
//! sit:
//!
//! * [`rewrite::delta`] — the codimension invariant that drives everything;
//! * the kill/substitute rewriting system ([`rewrite::reduce`]) that brings
//!   top-Chern-class monomials into normal form;
//! * [`certify::pushforward_vanishes`] — the fiber-dimension argument that
//!   pushes the normal form to zero;
//! * [`certify::correction_support_audit`] and
//!   [`certify::theorem_grr_certify`] — the ledger that accounts for every
//!   correction term and certifies the cancellation.

pub mod certify;
pub mod config;
pub mod cycle;
pub mod rewrite;

pub use certify::{
    correction_support_audit, pushforward_vanishes, theorem_grr_certify, AuditReport,
    CertifyReport, CorrectionTerm, Fate, Origin, PushforwardReport,
};
pub use config::{BoundaryConfig, ConfigError};
pub use cycle::{parse_cycle_expr, CycleExpr, Gamma, Marker, Monomial};
pub use rewrite::{
    delta, kill_rule, reduce, reduce_seeded, residue_factors, substitute_rule, KillReason,
    ReduceStep, Reduction, SubstitutionStep,
};

/// Errors from the ledger subsystem.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrrError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("the empty index set has no delta invariant")]
    EmptyIndexSet,
    #[error("{0} is not a nonempty stratum")]
    NotAStratum(String),
    #[error("operation requires a monomial carrying the top-Chern marker")]
    NotCgMonomial,
    #[error("index {index} does not lie in {set}")]
    IndexNotInSet { index: String, set: String },
    #[error("substitution requires delta = 0 on {set}, found {delta}")]
    DeltaNonzero { set: String, delta: usize },
    #[error("rewriting exceeded the step cap {cap}; state: {state}")]
    NonTermination { cap: usize, state: String },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error(
        "configuration declares that W does not annihilate the multiple locus; hypothesis 3 fails"
    )]
    HypothesisThreeViolated,
    #[error("fiber dimension {0} out of the supported range 1..=6")]
    FiberDimUnsupported(usize),
    #[error("expression parse error: {0}")]
    ExprParse(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
