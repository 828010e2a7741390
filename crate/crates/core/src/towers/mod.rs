//! Countable direct sums `⊕ₙ Cₙ` of cyclic `p`-groups and copies of `ℤ`,
//! described by exponent rules, together with their `p`-adic towers and
//! certificates about the limits of those towers.

mod certificate;
mod element;
mod graded;
mod rule;
mod tower;
mod verify;

pub use certificate::{
    idempotence_check_completion, l0_vs_completion_report, middle_exactness_witness, middle_exactness_witness_with,
    ml_certificate, Certificate, CertificateKind, ChainStep, CompletionReport, ExactnessProbe, IdempotenceStage,
    StabilizationReason, StageMatrix, VerifierBlock, Witness, CHECK_LEVELS, LIM1_ANNOTATION,
};
pub use element::{null_test, ElementRule, SymbolicElement};
pub use graded::{Component, GradedModule, Segment};
pub use rule::ExpRule;
pub use tower::{completion_tower, derive_hom_transition, hom_tower, HomTransitionDerivation, Tower, Transition, TransitionRow};
pub use verify::{verify_certificate, verify_report, Check, Verification};
