//! Reflectors `F` with unit `η`, the derived functor `L₀F` computed from free
//! presentations, and the full subcategory `𝒟` of `L₀F`-complete objects with
//! its transported kernels, cokernels and (co)limits.

mod adjunction;
mod l0;
mod reflector;
mod subcategory;

pub use adjunction::{adjunction_roundtrip, projective_check, projective_cover, AdjunctionReport, HOM_LIMIT};
pub use l0::{
    canonical_presentation, derived_idempotence_check, descend_to_integers, eta_factorization_check,
    is_f_complete, is_l0_complete, l0, l0_on_morphism, l0_on_morphism_with_lift, l0_to_f, l0_unit, Presentation,
};
pub use reflector::Reflector;
pub use subcategory::{
    best_approx_membership, colimit_in_d, cokernel_in_d, criterion_check, image_coimage_in_d, is_catalog_pair,
    is_epic_in_d, is_monic_in_d, kernel_in_d, limit_in_d, ColimitDiagram, Cone, CriterionVerdict, LimitDiagram,
};
