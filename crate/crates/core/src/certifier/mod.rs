//! Constant selection and scale recursion of the boundary Lipschitz and Hopf
//! inductions, with an independent re-check of every smallness condition and
//! a per-scale test of the induction hypothesis on solved fields.

mod constants;
mod induction;
mod sequence;

pub use constants::{
    select_constants_hopf, select_constants_lipschitz, verify_constants, ConstraintCheck, KEta, ProofConstants,
    ProofInputs, ProofKind, Relation, SLACK_FLOOR,
};
pub use induction::{verify_induction, InductionMode, InductionOptions, InductionReport, InductionRow};
pub use sequence::{scale_sequence, ScaleSequence};
