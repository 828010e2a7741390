use std::collections::HashSet;

use super::l0::{canonical_presentation, is_l0_complete, l0, l0_on_morphism, l0_unit};
use super::Reflector;
use crate::error::{Error, Result};
use crate::fpmod::{hom_enumerate, inverse, is_epic, FpModule, FpMorphism};

/// Upper bound on enumerated hom-sets.
pub const HOM_LIMIT: usize = 1 << 16;

fn ring_preserving(f: &Reflector) -> Result<()> {
    if !f.preserves_ring() {
        return Err(Error::Unsupported(format!("{f} changes the base ring; hom-sets are not comparable")));
    }
    Ok(())
}

/// Outcome of the hom-set bijection test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionReport {
    pub hom_c: usize,
    pub hom_d: usize,
    pub roundtrips: bool,
}

/// Checks that `α(f) = η_Y⁻¹ ∘ L₀F f` and `β(g) = g ∘ η_X` are mutually
/// inverse between `Hom_𝒞(X, Y)` and `Hom_𝒟(L₀F X, Y)`.
pub fn adjunction_roundtrip(f: &Reflector, x: &FpModule, y: &FpModule) -> Result<AdjunctionReport> {
    ring_preserving(f)?;
    if !is_l0_complete(f, y)? {
        return Err(Error::Precondition(format!("{y} is not in the subcategory")));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Unsupported("adjunction check needs finite modules".into()));
    }
    let lx = l0(f, x)?;
    let unit_x = l0_unit(f, x)?;
    let unit_y_inv = inverse(&l0_unit(f, y)?)?;
    let hom_c = hom_enumerate(x, y, HOM_LIMIT)?;
    let hom_d = hom_enumerate(&lx, y, HOM_LIMIT)?;
    let alpha = |g: &FpMorphism| -> Result<FpMorphism> { unit_y_inv.compose(&l0_on_morphism(f, g)?) };
    let beta = |h: &FpMorphism| -> Result<FpMorphism> { h.compose(&unit_x) };
    let mut ok = hom_c.len() == hom_d.len();
    for g in &hom_c {
        ok &= beta(&alpha(g)?)?.equals(g);
    }
    for h in &hom_d {
        ok &= alpha(&beta(h)?)?.equals(h);
    }
    Ok(AdjunctionReport { hom_c: hom_c.len(), hom_d: hom_d.len(), roundtrips: ok })
}

/// Lifting property of `L₀F(P)` against each epimorphism: every map
/// `L₀F(P) → B` factors through `e: A ↠ B`.
pub fn projective_check(f: &Reflector, p: &FpModule, epis: &[FpMorphism]) -> Result<bool> {
    ring_preserving(f)?;
    if p.relations().cols() != 0 {
        return Err(Error::Precondition("projective check expects a free module".into()));
    }
    let lp = l0(f, p)?;
    for e in epis {
        if !is_epic(e) {
            return Err(Error::Precondition(format!("{e} is not an epimorphism")));
        }
        let lifted: HashSet<Vec<Vec<_>>> = hom_enumerate(&lp, e.source(), HOM_LIMIT)?
            .iter()
            .map(|h| e.compose(h).map(|c| c.key()))
            .collect::<Result<_>>()?;
        for g in hom_enumerate(&lp, e.target(), HOM_LIMIT)? {
            if !lifted.contains(&g.key()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The epimorphism `L₀F(R^g) → X` obtained by reflecting the free cover of
/// an object `X` of the subcategory.
pub fn projective_cover(f: &Reflector, x: &FpModule) -> Result<FpMorphism> {
    ring_preserving(f)?;
    if !is_l0_complete(f, x)? {
        return Err(Error::Precondition(format!("{x} is not in the subcategory")));
    }
    let pres = canonical_presentation(x)?;
    let reflected = l0_on_morphism(f, &pres.augmentation)?;
    inverse(&l0_unit(f, x)?)?.compose(&reflected)
}
