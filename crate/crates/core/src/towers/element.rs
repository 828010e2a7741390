use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::graded::{Component, GradedModule};
use super::rule::ExpRule;
use crate::error::{Error, Result};
use crate::linalg::int_vec;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ElementRule {
    /// `xₙ = u·p^{s(n)}` with `p ∤ u`.
    PPower { unit: i64, valuation: ExpRule },
    /// `x₁, …, x_m` followed by zeros.
    Finite {
        #[serde(with = "int_vec")]
        values: Vec<BigInt>,
    },
}

/// A sequence `(xₙ)` with `xₙ ∈ Cₙ`, described by a rule.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolicElement {
    pub parent: GradedModule,
    pub rule: ElementRule,
}

impl SymbolicElement {
    pub fn new(parent: GradedModule, rule: ElementRule) -> Result<SymbolicElement> {
        parent.validate()?;
        match &rule {
            ElementRule::PPower { unit, valuation } => {
                valuation.validate()?;
                if *unit == 0 || unit.rem_euclid(parent.p as i64) == 0 {
                    return Err(Error::Malformed(format!("{unit} is not a unit at {}", parent.p)));
                }
            }
            ElementRule::Finite { .. } => {}
        }
        Ok(SymbolicElement { parent, rule })
    }

    pub fn p_power(parent: GradedModule, unit: i64, valuation: ExpRule) -> Result<SymbolicElement> {
        SymbolicElement::new(parent, ElementRule::PPower { unit, valuation })
    }

    /// `p`-adic valuation of `xₙ` before reduction; `None` for zero.
    pub fn valuation(&self, n: u64) -> Option<u64> {
        match &self.rule {
            ElementRule::PPower { valuation, .. } => Some(valuation.value(n)),
            ElementRule::Finite { values } => {
                let x = values.get((n - 1) as usize)?;
                if x.is_zero() {
                    return None;
                }
                let p = BigInt::from(self.parent.p);
                let mut x = x.abs();
                let mut v = 0;
                while x.is_multiple_of(&p) {
                    x /= &p;
                    v += 1;
                }
                Some(v)
            }
        }
    }

    /// `xₙ` as an integer representative, reduced into `[0, p^{e(n)})` on
    /// cyclic grades.
    pub fn value(&self, n: u64) -> BigInt {
        let raw = match &self.rule {
            ElementRule::PPower { unit, valuation } => {
                BigInt::from(*unit) * BigInt::from(self.parent.p).pow(valuation.value(n) as u32)
            }
            ElementRule::Finite { values } => values.get((n - 1) as usize).cloned().unwrap_or_default(),
        };
        match self.parent.exponent(n) {
            Some(e) => raw.mod_floor(&BigInt::from(self.parent.p).pow(e as u32)),
            None => raw,
        }
    }
}

/// Whether `x` lies in `lim_k truncate(M, k)`: for every `k`,
/// `v(xₙ) ≥ min(k, e(n))` for all but finitely many `n`. Decided from the
/// tail rules alone.
pub fn null_test(x: &SymbolicElement) -> bool {
    let s = match &x.rule {
        ElementRule::Finite { .. } => return true,
        ElementRule::PPower { valuation, .. } => valuation,
    };
    let Some(bound) = s.bound() else {
        return true;
    };
    // v(xₙ) is eventually the constant `bound`; taking k > bound, the tail
    // exponents must eventually be at most `bound`
    match x.parent.tail() {
        Component::Free => false,
        Component::Cyclic { exp } => exp.bound().is_some_and(|e| e <= bound),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_examples() {
        let free = GradedModule::free(2).unwrap();
        let x = SymbolicElement::p_power(free.clone(), 1, ExpRule::linear(1, 0)).unwrap();
        assert!(null_test(&x));
        let one = SymbolicElement::p_power(free, 1, ExpRule::constant(0)).unwrap();
        assert!(!null_test(&one));
        let m = GradedModule::cyclic(2, ExpRule::linear(1, 0)).unwrap();
        let half = SymbolicElement::p_power(m, 1, ExpRule::new(1, 1, 2, None).unwrap()).unwrap();
        assert!(null_test(&half));
    }

    #[test]
    fn bounded_parents() {
        let m = GradedModule::cyclic(3, ExpRule::constant(2)).unwrap();
        let x = SymbolicElement::p_power(m.clone(), 1, ExpRule::constant(0)).unwrap();
        assert!(!null_test(&x));
        let y = SymbolicElement::p_power(m, 2, ExpRule::constant(2)).unwrap();
        assert!(null_test(&y));
        assert!(y.value(4).is_zero());
    }

    #[test]
    fn finite_elements() {
        let m = GradedModule::free(2).unwrap();
        let x = SymbolicElement::new(m, ElementRule::Finite { values: vec![BigInt::from(12), BigInt::from(0)] }).unwrap();
        assert!(null_test(&x));
        assert_eq!(x.valuation(1), Some(2));
        assert_eq!(x.valuation(2), None);
        assert_eq!(x.valuation(9), None);
    }

    #[test]
    fn units_are_checked() {
        let m = GradedModule::free(2).unwrap();
        assert!(SymbolicElement::p_power(m, 4, ExpRule::constant(0)).is_err());
    }
}
