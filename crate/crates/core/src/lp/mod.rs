//! Exact rational linear programming and the polytopality LP.

mod simplex;
mod support;

pub use simplex::{
    solve, verify_certificate, CertificateError, Constraint, LpCertificate, LpProblem, LpStatus, Relation, Sense,
};
pub use support::{minimize_over_polytope, support_function_lp, SupportLp, SupportLpError, SupportSolution};
