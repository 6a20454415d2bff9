//! The pipeline from (Σ, 𝔥) or (Δ, 𝔥): LVMB conditions, the quotient fan,
//! classification, and the moment-map convexity harness.

mod check;
mod classify;
mod data;
mod harness;
mod model;

pub use check::{check_lvmb, ConditionOne, ConditionTwo, KernelWitness, LvmbCheck, Setup};
pub use classify::{classify, classify_setup, ClassificationReport, SupportEvidence, Verdict};
pub use data::{g_j, Ambient, DataError, InputSpec, LvmbData, QuotientData};
pub use model::{beta, moment_map, Chart, MomentModel, SampleError, SamplePoint, REJECTION_CAP};
pub use harness::{
    verify_convexity, verify_model, Bound, ConvexityReport, DirectionCheck, HarnessError, KernelCheck, VertexCheck,
    VertexImage, DIRECTIONS, KERNEL_COMBINATIONS,
};
