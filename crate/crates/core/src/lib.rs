//! Numerical laboratory for boundary regularity of fully nonlinear uniformly
//! elliptic equations on Reifenberg-flat domains.

pub mod certifier;
pub mod error;
pub mod fdsolver;
pub mod geometry;
pub mod grid;
pub mod modulus;
pub mod probes;
pub mod pucci;

pub use error::{LabError, Result};
pub use certifier::{
    scale_sequence, select_constants_hopf, select_constants_lipschitz, verify_constants, verify_induction, KEta,
    ProofConstants, ProofInputs, ScaleSequence,
};
pub use fdsolver::{solve, BoundaryData, GridDomain, Shape, SolveOptions, SolveReport};
pub use geometry::{check_reifenberg, GraphDomain2D, Profile, ReifenbergCertificate, Side};
pub use grid::{Grid, GridFunction};
pub use modulus::{dini_integral, rescale_log_radius, rescale_radius, DiniVerdict, Modulus};
pub use pucci::{Ellipticity, OpMode, StencilSet};
