//! Finitely presented modules over `ℤ`, `ℤ/pᴺ` and `ℤ_p`, and the maps
//! between them.

mod module;
mod morphism;
mod ops;
mod ring;

pub use module::{FpModule, NormalForm};
pub use morphism::FpMorphism;
pub use ops::{
    biproduct, braiding, cokernel, complete_fg, completion_map, descend_through_projection, direct_sum_morphisms,
    hom_enumerate, hom_module, image_coimage, inverse, is_epic, is_iso, is_monic, kernel, lift_through_mono,
    minimize, power, preimage, tensor, tensor_morphisms, Biproduct, HomModule, ImageCoimage, Minimized,
};
pub use ring::{is_prime, Ring};
