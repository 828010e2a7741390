use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{FpModule, FpMorphism, Ring};
use crate::error::{Error, Result};
use crate::linalg::{column_span_basis, kernel_basis, saturate, IntMatrix, Saturation};

/// Generators of the lattice `{c ∈ ℤᵏ : B·c = 0 in M}`, where the columns of
/// `B` are elements of `M`.
pub(crate) fn relation_lattice(b: &IntMatrix, m: &FpModule) -> IntMatrix {
    let k = b.cols();
    if k == 0 {
        return IntMatrix::zeros(0, 0);
    }
    let a = b.hcat(&-m.ext_relations());
    let ker = kernel_basis(&a);
    let top = ker.select_rows(&(0..k).collect::<Vec<_>>());
    let lattice = match *m.ring() {
        Ring::PAdic { p } => saturate(&top, p, Saturation::AwayFromP),
        _ => top,
    };
    column_span_basis(&lattice)
}

fn same_ring(m: &FpModule, n: &FpModule) -> Result<()> {
    if m.ring() != n.ring() {
        return Err(Error::RingMismatch(m.ring().to_string(), n.ring().to_string()));
    }
    Ok(())
}

/// A presentation with as few generators as possible, with inverse
/// isomorphisms to the original.
#[derive(Clone, Debug)]
pub struct Minimized {
    pub module: FpModule,
    pub to_min: FpMorphism,
    pub from_min: FpMorphism,
}

/// Rewrites `M` as `R^r ⊕ ⨁ R/dᵢ` on its canonical coordinates.
pub fn minimize(m: &FpModule) -> Minimized {
    let b = m.basis();
    let moduli = m.coordinate_moduli();
    let implicit = match *m.ring() {
        Ring::ModPrimePower { p, n } => Some(num_traits::pow(BigInt::from(p), n as usize)),
        _ => None,
    };
    let k = moduli.len();
    let cols: Vec<Vec<BigInt>> = moduli
        .iter()
        .enumerate()
        .filter(|(_, d)| !d.is_zero() && Some(*d) != implicit.as_ref())
        .map(|(i, d)| {
            let mut c = vec![BigInt::zero(); k];
            c[i] = d.clone();
            c
        })
        .collect();
    let module = FpModule::new(m.ring().clone(), k, IntMatrix::from_columns(k, &cols).expect("length k"))
        .expect("valid shape");
    let to_min = FpMorphism::new_unchecked(m.clone(), module.clone(), b.u.select_rows(&b.nontrivial));
    let from_min = FpMorphism::new_unchecked(module.clone(), m.clone(), b.u_inv.select_cols(&b.nontrivial));
    Minimized { module, to_min, from_min }
}

/// Kernel object and its inclusion.
pub fn kernel(f: &FpMorphism) -> (FpModule, FpMorphism) {
    let m = f.source();
    let lattice = relation_lattice(f.matrix(), f.target());
    let lattice = if lattice.rows() == 0 { IntMatrix::zeros(m.generators(), 0) } else { lattice };
    let rels = relation_lattice(&lattice, m);
    let k = FpModule::new(m.ring().clone(), lattice.cols(), pad_rows(rels, lattice.cols())).expect("valid shape");
    let min = minimize(&k);
    let incl = lattice.checked_mul(min.from_min.matrix()).expect("shapes agree");
    let iota = FpMorphism::new_unchecked(min.module.clone(), m.clone(), incl);
    (min.module, iota)
}

fn pad_rows(a: IntMatrix, rows: usize) -> IntMatrix {
    if a.rows() == rows { a } else { IntMatrix::zeros(rows, 0) }
}

/// Cokernel object (the target with the image adjoined as relations) and
/// the projection.
pub fn cokernel(f: &FpMorphism) -> (FpModule, FpMorphism) {
    let n = f.target();
    let c = FpModule::new(n.ring().clone(), n.generators(), n.relations().hcat(f.matrix())).expect("valid shape");
    let pi = FpMorphism::new_unchecked(n.clone(), c.clone(), IntMatrix::identity(n.generators()));
    (c, pi)
}

pub fn is_monic(f: &FpMorphism) -> bool {
    kernel(f).0.is_zero()
}

/// Across `ℤ → ℤ_p` a free target is never reached: the image of `ℤ` is
/// dense but not all of `ℤ_p`.
pub fn is_epic(f: &FpMorphism) -> bool {
    if f.source().ring() != f.target().ring() && !f.target().is_finite() {
        return false;
    }
    cokernel(f).0.is_zero()
}

pub fn is_iso(f: &FpMorphism) -> bool {
    is_monic(f) && is_epic(f)
}

/// Integer coefficients `c` with `g·c = x` in the target of `g`.
pub fn preimage(g: &FpMorphism, x: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    let t = g.target();
    let a = g.matrix().hcat(t.ext_relations());
    Ok(t.ring().solve(&a, x)?.map(|mut c| {
        c.truncate(g.source().generators());
        c
    }))
}

/// `h` with `g ∘ h = f`, for `g` monic. `None` when `f` does not factor.
pub fn lift_through_mono(f: &FpMorphism, g: &FpMorphism) -> Result<Option<FpMorphism>> {
    if f.target() != g.target() {
        return Err(Error::Precondition("maps have different targets".into()));
    }
    let mut cols = Vec::with_capacity(f.source().generators());
    for c in f.matrix().columns() {
        match preimage(g, &c)? {
            Some(x) => cols.push(x),
            None => return Ok(None),
        }
    }
    let m = IntMatrix::from_columns(g.source().generators(), &cols)?;
    FpMorphism::new(f.source().clone(), g.source().clone(), m).map(Some)
}

/// `h` with `h ∘ e = f`, where `e` is the projection returned by
/// [`cokernel`] or any map that is the identity on generators.
pub fn descend_through_projection(f: &FpMorphism, e: &FpMorphism) -> Result<FpMorphism> {
    if f.source() != e.source() || !e.matrix().is_identity() {
        return Err(Error::Precondition("not a generator-preserving projection".into()));
    }
    FpMorphism::new(e.target().clone(), f.target().clone(), f.matrix().clone())
}

/// Two-sided inverse of an isomorphism.
pub fn inverse(f: &FpMorphism) -> Result<FpMorphism> {
    if f.source().ring() != f.target().ring() {
        return Err(Error::Unsupported("inverse across a change of rings".into()));
    }
    let n = f.target().generators();
    let mut cols = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[i] = BigInt::one();
        match preimage(f, &e)? {
            Some(x) => cols.push(x),
            None => return Err(Error::Precondition("map is not surjective".into())),
        }
    }
    let g = FpMorphism::new(
        f.target().clone(),
        f.source().clone(),
        IntMatrix::from_columns(f.source().generators(), &cols)?,
    )
    .map_err(|_| Error::Precondition("map is not injective".into()))?;
    if !g.compose(f)?.equals(&FpMorphism::identity(f.source())) {
        return Err(Error::Precondition("map is not injective".into()));
    }
    Ok(g)
}

/// `M ⊕ N` with its structure maps.
#[derive(Clone, Debug)]
pub struct Biproduct {
    pub object: FpModule,
    pub inj1: FpMorphism,
    pub inj2: FpMorphism,
    pub proj1: FpMorphism,
    pub proj2: FpMorphism,
}

pub fn biproduct(m: &FpModule, n: &FpModule) -> Result<Biproduct> {
    same_ring(m, n)?;
    let (a, b) = (m.generators(), n.generators());
    let object =
        FpModule::new(m.ring().clone(), a + b, m.relations().block_diag(n.relations())).expect("valid shape");
    let sel = |rows: usize, cols: usize, off_r: usize, off_c: usize| {
        IntMatrix::from_fn(rows, cols, |i, j| {
            if i + off_r == j + off_c { BigInt::one() } else { BigInt::zero() }
        })
    };
    Ok(Biproduct {
        inj1: FpMorphism::new_unchecked(m.clone(), object.clone(), sel(a + b, a, 0, 0)),
        inj2: FpMorphism::new_unchecked(n.clone(), object.clone(), sel(a + b, b, 0, a)),
        proj1: FpMorphism::new_unchecked(object.clone(), m.clone(), sel(a, a + b, 0, 0)),
        proj2: FpMorphism::new_unchecked(object.clone(), n.clone(), sel(b, a + b, a, 0)),
        object,
    })
}

/// `f ⊕ g`.
pub fn direct_sum_morphisms(f: &FpMorphism, g: &FpMorphism) -> Result<FpMorphism> {
    let s = biproduct(f.source(), g.source())?.object;
    let t = biproduct(f.target(), g.target())?.object;
    Ok(FpMorphism::new_unchecked(s, t, f.matrix().block_diag(g.matrix())))
}

/// `N^{⊕k}`.
pub fn power(n: &FpModule, k: usize) -> FpModule {
    let rel = IntMatrix::identity(k).kron(n.relations());
    let rel = if rel.rows() == k * n.generators() { rel } else { IntMatrix::zeros(k * n.generators(), 0) };
    FpModule::new(n.ring().clone(), k * n.generators(), rel).expect("valid shape")
}

/// `M ⊗ N` on generators `eᵢ ⊗ fⱼ`, indexed `i·g_N + j`.
pub fn tensor(m: &FpModule, n: &FpModule) -> Result<FpModule> {
    same_ring(m, n)?;
    let (a, b) = (m.generators(), n.generators());
    let left = m.relations().kron(&IntMatrix::identity(b));
    let right = IntMatrix::identity(a).kron(n.relations());
    let rel = fix_rows(left, a * b).hcat(&fix_rows(right, a * b));
    Ok(FpModule::new(m.ring().clone(), a * b, rel).expect("valid shape"))
}

fn fix_rows(x: IntMatrix, rows: usize) -> IntMatrix {
    if x.rows() == rows { x } else { IntMatrix::zeros(rows, 0) }
}

/// `f ⊗ g`.
pub fn tensor_morphisms(f: &FpMorphism, g: &FpMorphism) -> Result<FpMorphism> {
    let s = tensor(f.source(), g.source())?;
    let t = tensor(f.target(), g.target())?;
    let m = fix_shape(f.matrix().kron(g.matrix()), t.generators(), s.generators());
    Ok(FpMorphism::new_unchecked(s, t, m))
}

fn fix_shape(x: IntMatrix, rows: usize, cols: usize) -> IntMatrix {
    if x.rows() == rows && x.cols() == cols { x } else { IntMatrix::zeros(rows, cols) }
}

/// The symmetry `M ⊗ N → N ⊗ M`.
pub fn braiding(m: &FpModule, n: &FpModule) -> Result<FpMorphism> {
    let s = tensor(m, n)?;
    let t = tensor(n, m)?;
    let (a, b) = (m.generators(), n.generators());
    let mat = IntMatrix::from_fn(a * b, a * b, |r, c| {
        let (i, j) = (c / b, c % b);
        if r == j * a + i { BigInt::one() } else { BigInt::zero() }
    });
    Ok(FpMorphism::new_unchecked(s, t, mat))
}

/// `Hom(M, N)` presented as a submodule of `N^{g_M}`: an element `c`
/// corresponds to the matrix whose column-major vectorization is `embedding·c`.
#[derive(Clone, Debug)]
pub struct HomModule {
    pub source: FpModule,
    pub target: FpModule,
    pub module: FpModule,
    /// Inclusion into `N^{g_M}`.
    pub embedding: FpMorphism,
}

impl HomModule {
    pub fn to_morphism(&self, c: &[BigInt]) -> Result<FpMorphism> {
        let (gm, gn) = (self.source.generators(), self.target.generators());
        let v = self.embedding.apply(c);
        let mat = IntMatrix::from_fn(gn, gm, |i, j| v[j * gn + i].clone());
        FpMorphism::new(self.source.clone(), self.target.clone(), mat)
    }

    pub fn from_morphism(&self, f: &FpMorphism) -> Result<Vec<BigInt>> {
        if f.source() != &self.source || f.target() != &self.target {
            return Err(Error::Precondition("morphism has the wrong endpoints".into()));
        }
        let (gm, gn) = (self.source.generators(), self.target.generators());
        let v: Vec<BigInt> = (0..gm * gn).map(|k| f.matrix().get(k % gn, k / gn).clone()).collect();
        preimage(&self.embedding, &v)?.ok_or_else(|| Error::Invariant("morphism missing from hom module".into()))
    }
}

pub fn hom_module(m: &FpModule, n: &FpModule) -> Result<HomModule> {
    same_ring(m, n)?;
    let gm = m.generators();
    let km = m.relations().cols();
    let domain = power(n, gm);
    let codomain = power(n, km);
    let t = fix_shape(
        m.relations().transpose().kron(&IntMatrix::identity(n.generators())),
        codomain.generators(),
        domain.generators(),
    );
    let (module, embedding) = kernel(&FpMorphism::new_unchecked(domain, codomain, t));
    Ok(HomModule { source: m.clone(), target: n.clone(), module, embedding })
}

/// Every morphism `M → N` exactly once. `N` must be finite (then so is the
/// Hom set, `M` being finitely generated) and the count at most `limit`.
pub fn hom_enumerate(m: &FpModule, n: &FpModule, limit: usize) -> Result<Vec<FpMorphism>> {
    same_ring(m, n)?;
    if !n.is_finite() {
        return Err(Error::Unsupported("hom enumeration needs a finite target".into()));
    }
    let min = minimize(m);
    let elements = n.elements(limit)?;
    let mut choices: Vec<Vec<Vec<BigInt>>> = Vec::new();
    let mut total = BigInt::one();
    for d in min.module.coordinate_moduli() {
        let ok: Vec<Vec<BigInt>> = elements
            .iter()
            .filter(|y| {
                let dy: Vec<BigInt> = y.iter().map(|v| v * &d).collect();
                n.is_zero_element(&dy).expect("length")
            })
            .cloned()
            .collect();
        total *= ok.len();
        choices.push(ok);
    }
    if total > BigInt::from(limit) {
        return Err(Error::Unsupported(format!("{total} morphisms exceed enumeration limit {limit}")));
    }
    let k = choices.len();
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let cols: Vec<Vec<BigInt>> = (0..k).map(|i| choices[i][idx[i]].clone()).collect();
        let y = IntMatrix::from_columns(n.generators(), &cols)?;
        let y = fix_shape(y, n.generators(), k);
        let mat = y.checked_mul(min.to_min.matrix())?;
        out.push(FpMorphism::new_unchecked(m.clone(), n.clone(), mat));
        let mut i = 0;
        loop {
            if i == k {
                return Ok(out);
            }
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// Image, coimage and the canonical comparison between them.
#[derive(Clone, Debug)]
pub struct ImageCoimage {
    pub image: FpModule,
    pub image_inclusion: FpMorphism,
    pub coimage: FpModule,
    pub coimage_projection: FpMorphism,
    /// `coimage → image`, with `inclusion ∘ comparison ∘ projection = f`.
    pub comparison: FpMorphism,
}

pub fn image_coimage(f: &FpMorphism) -> Result<ImageCoimage> {
    let (_, c) = cokernel(f);
    let (image, image_inclusion) = kernel(&c);
    let (_, k) = kernel(f);
    let (coimage, coimage_projection) = cokernel(&k);
    let through = descend_through_projection(f, &coimage_projection)?;
    let comparison = lift_through_mono(&through, &image_inclusion)?
        .ok_or_else(|| Error::Invariant("map does not factor through its image".into()))?;
    Ok(ImageCoimage { image, image_inclusion, coimage, coimage_projection, comparison })
}

/// Completion of a finitely generated abelian group at `p`: the same
/// presentation read over `ℤ_p`.
pub fn complete_fg(m: &FpModule, p: u64) -> Result<FpModule> {
    if *m.ring() != Ring::Integers {
        return Err(Error::Precondition(format!("completion expects a module over Z, got {}", m.ring())));
    }
    Ok(m.with_ring(Ring::p_adic(p)?))
}

/// The canonical map `M → M_p`.
pub fn completion_map(m: &FpModule, p: u64) -> Result<FpMorphism> {
    let c = complete_fg(m, p)?;
    Ok(FpMorphism::new_unchecked(m.clone(), c, IntMatrix::identity(m.generators())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zmod(d: i64) -> FpModule {
        FpModule::cyclic(Ring::Integers, d)
    }

    fn scalar(m: &FpModule, c: i64) -> FpMorphism {
        FpMorphism::new(m.clone(), m.clone(), IntMatrix::scalar(m.generators(), BigInt::from(c))).unwrap()
    }

    fn factors(m: &FpModule) -> Vec<i64> {
        m.normal_form().invariant_factors.iter().map(|d| i64::try_from(d).unwrap()).collect()
    }

    #[test]
    fn kernel_examples() {
        let (k, iota) = kernel(&scalar(&zmod(4), 2));
        assert_eq!(factors(&k), vec![2]);
        assert!(is_monic(&iota));
        assert!(scalar(&zmod(4), 2).compose(&iota).unwrap().is_zero());
        let m = FpModule::from_factors(Ring::Integers, &[BigInt::from(6)], 1);
        assert!(kernel(&FpMorphism::identity(&m)).0.is_zero());
        let (k, _) = kernel(&FpMorphism::zero(&m, &zmod(3)));
        assert!(k.is_isomorphic(&m));
    }

    #[test]
    fn cokernel_examples() {
        let z = FpModule::free(Ring::Integers, 1);
        assert_eq!(factors(&cokernel(&scalar(&z, 5)).0), vec![5]);
        assert!(cokernel(&FpMorphism::identity(&zmod(4))).0.is_zero());
        assert_eq!(factors(&cokernel(&scalar(&zmod(4), 2)).0), vec![2]);
    }

    #[test]
    fn biproduct_examples() {
        let b = biproduct(&zmod(2), &zmod(3)).unwrap();
        assert_eq!(factors(&b.object), vec![6]);
        assert!(b.proj1.compose(&b.inj1).unwrap().equals(&FpMorphism::identity(&zmod(2))));
        assert!(b.proj2.compose(&b.inj1).unwrap().is_zero());
        let sum = b.inj1.compose(&b.proj1).unwrap().add(&b.inj2.compose(&b.proj2).unwrap()).unwrap();
        assert!(sum.equals(&FpMorphism::identity(&b.object)));
        let z = FpModule::free(Ring::Integers, 1);
        assert_eq!(biproduct(&z, &z).unwrap().object.normal_form().free_rank, 2);
        assert!(biproduct(&zmod(2), &FpModule::cyclic(Ring::PAdic { p: 2 }, 2)).is_err());
    }

    #[test]
    fn tensor_examples() {
        assert_eq!(factors(&tensor(&zmod(4), &zmod(6)).unwrap()), vec![2]);
        assert!(tensor(&zmod(2), &zmod(3)).unwrap().is_zero());
        let z = FpModule::free(Ring::Integers, 1);
        let m = FpModule::from_factors(Ring::Integers, &[BigInt::from(2), BigInt::from(4)], 1);
        assert!(tensor(&z, &m).unwrap().is_isomorphic(&m));
    }

    #[test]
    fn hom_examples() {
        let h = hom_module(&zmod(2), &zmod(4)).unwrap();
        assert_eq!(factors(&h.module), vec![2]);
        assert_eq!(hom_enumerate(&zmod(2), &zmod(4), 100).unwrap().len(), 2);
        assert!(hom_module(&zmod(2), &zmod(3)).unwrap().module.is_zero());
        let m = FpModule::from_factors(Ring::Integers, &[BigInt::from(6)], 1);
        let z = FpModule::free(Ring::Integers, 1);
        assert!(hom_module(&z, &m).unwrap().module.is_isomorphic(&m));
        assert!(matches!(hom_enumerate(&z, &m, 100), Err(Error::Unsupported(_))));
    }

    #[test]
    fn hom_module_round_trips_morphisms() {
        let m = FpModule::from_factors(Ring::Integers, &[BigInt::from(2), BigInt::from(4)], 0);
        let n = FpModule::from_factors(Ring::Integers, &[BigInt::from(4)], 0);
        let h = hom_module(&m, &n).unwrap();
        let all = hom_enumerate(&m, &n, 1000).unwrap();
        assert_eq!(BigInt::from(all.len()), h.module.order().unwrap());
        for f in &all {
            let c = h.from_morphism(f).unwrap();
            assert!(h.to_morphism(&c).unwrap().equals(f));
        }
    }

    #[test]
    fn image_coimage_examples() {
        let ic = image_coimage(&scalar(&zmod(4), 2)).unwrap();
        assert_eq!(factors(&ic.image), vec![2]);
        assert_eq!(factors(&ic.coimage), vec![2]);
        assert!(is_iso(&ic.comparison));
        let z = FpModule::free(Ring::Integers, 1);
        let ic = image_coimage(&scalar(&z, 3)).unwrap();
        assert!(ic.coimage.is_isomorphic(&z));
        let ic = image_coimage(&FpMorphism::zero(&zmod(4), &zmod(2))).unwrap();
        assert!(ic.image.is_zero() && ic.coimage.is_zero());
    }

    #[test]
    fn completion_examples() {
        let z = FpModule::free(Ring::Integers, 1);
        assert_eq!(complete_fg(&z, 2).unwrap().normal_form().free_rank, 1);
        assert_eq!(factors(&complete_fg(&zmod(4), 2).unwrap()), vec![4]);
        assert_eq!(factors(&complete_fg(&zmod(6), 2).unwrap()), vec![2]);
        assert!(complete_fg(&complete_fg(&z, 2).unwrap(), 2).is_err());
    }

    #[test]
    fn cross_ring_unit_is_iso_only_where_expected() {
        let f = completion_map(&zmod(4), 2).unwrap();
        assert!(is_monic(&f) && is_epic(&f));
        let f = completion_map(&zmod(6), 2).unwrap();
        assert!(!is_monic(&f) && is_epic(&f));
        let f = completion_map(&FpModule::free(Ring::Integers, 1), 2).unwrap();
        assert!(is_monic(&f) && !is_epic(&f));
        assert!(cokernel(&f).0.is_zero());
    }

    #[test]
    fn inverse_of_iso() {
        let f = scalar(&zmod(5), 2);
        let g = inverse(&f).unwrap();
        assert!(g.compose(&f).unwrap().equals(&FpMorphism::identity(&zmod(5))));
        assert!(inverse(&scalar(&zmod(4), 2)).is_err());
    }

    #[test]
    fn minimize_is_iso() {
        let m = FpModule::new(Ring::Integers, 3, IntMatrix::from_rows_i64(&[vec![2, 0], vec![0, 3], vec![1, 1]]))
            .unwrap();
        let min = minimize(&m);
        assert!(min.from_min.compose(&min.to_min).unwrap().equals(&FpMorphism::identity(&m)));
        assert!(min.to_min.compose(&min.from_min).unwrap().equals(&FpMorphism::identity(&min.module)));
        assert!(min.module.generators() <= 1);
    }
}
