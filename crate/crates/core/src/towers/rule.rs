use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent sequence `e(n) = min(max(0, ⌊(a·n + b)/den⌋), cap)` for `n ≥ 1`.
///
/// Nondecreasing by construction. `den` lets rules such as `⌈n/2⌉ =
/// ⌊(n + 1)/2⌋` stay inside the language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpRule {
    pub a: u64,
    pub b: i64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub den: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<u64>,
}

fn one() -> u64 {
    1
}

fn is_one(x: &u64) -> bool {
    *x == 1
}

impl ExpRule {
    pub fn new(a: u64, b: i64, den: u64, cap: Option<u64>) -> Result<ExpRule> {
        let r = ExpRule { a, b, den, cap };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        if self.den == 0 {
            return Err(Error::Malformed("rule denominator must be positive".into()));
        }
        if self.a > 1 << 20 || self.den > 1 << 20 || self.b.unsigned_abs() > 1 << 40 {
            return Err(Error::Unsupported("rule coefficients are too large".into()));
        }
        Ok(())
    }

    pub fn constant(c: u64) -> ExpRule {
        ExpRule { a: 0, b: c as i64, den: 1, cap: None }
    }

    /// `a·n + b`.
    pub fn linear(a: u64, b: i64) -> ExpRule {
        ExpRule { a, b, den: 1, cap: None }
    }

    pub fn value(&self, n: u64) -> u64 {
        let raw = Integer::div_floor(&(self.a as i128 * n as i128 + self.b as i128), &(self.den as i128));
        let v = raw.max(0) as u64;
        match self.cap {
            Some(c) => v.min(c),
            None => v,
        }
    }

    /// `min(e, k)`.
    pub fn capped(&self, k: u64) -> ExpRule {
        ExpRule { cap: Some(self.cap.map_or(k, |c| c.min(k))), ..*self }
    }

    /// The eventual (maximal) value, or `None` if the rule is unbounded.
    pub fn bound(&self) -> Option<u64> {
        if self.a == 0 {
            let v = self.value(1);
            return Some(v);
        }
        self.cap
    }

    pub fn is_bounded(&self) -> bool {
        self.bound().is_some()
    }

    /// First grade from which the rule is in its final regime: constant for
    /// bounded rules, and strictly positive and uncapped otherwise.
    pub fn regime_start(&self) -> u64 {
        let den = self.den as i128;
        let (a, b) = (self.a as i128, self.b as i128);
        if a == 0 {
            return 1;
        }
        let target = match self.cap {
            Some(c) => c as i128 * den - b,
            None => den - b,
        };
        // smallest n ≥ 1 with a·n ≥ target
        let n = if target <= 0 { 1 } else { (target + a - 1) / a };
        n.max(1) as u64
    }

    /// Whether `e(n) = other(n)` for every `n ≥ 1`.
    pub fn same_values(&self, other: &ExpRule) -> bool {
        self.agree_from(other, 1)
    }

    /// Whether the rules agree for every `n ≥ from`.
    pub fn agree_from(&self, other: &ExpRule, from: u64) -> bool {
        match (self.bound(), other.bound()) {
            (Some(x), Some(y)) if x != y => return false,
            (Some(_), None) | (None, Some(_)) => return false,
            (None, None) if self.a as u128 * other.den as u128 != other.a as u128 * self.den as u128 => {
                return false
            }
            _ => {}
        }
        // past both regime starts the difference is periodic with period
        // lcm(den, den'), so one period suffices
        let end = self.regime_start().max(other.regime_start()).max(from) + self.den.lcm(&other.den);
        (from..=end).all(|n| self.value(n) == other.value(n))
    }

    /// Whether `self(n) ≥ other(n)` for every `n ≥ 1`.
    pub fn ge_everywhere(&self, other: &ExpRule) -> bool {
        if !self.eventually_ge(other) {
            return false;
        }
        let start = self.regime_start().max(other.regime_start());
        let period = self.den.lcm(&other.den);
        // past `horizon` the comparison is settled by the tail analysis
        let horizon = match (self.bound(), other.bound()) {
            (_, Some(b)) => {
                let mut n = start;
                while self.value(n) < b {
                    n += 1;
                }
                n
            }
            (None, None) => {
                let (d, d2) = (self.den as i128, other.den as i128);
                let gap = self.a as i128 * d2 - other.a as i128 * d;
                if gap == 0 {
                    start
                } else {
                    let need = d * d2 + other.b as i128 * d - self.b as i128 * d2;
                    start.max(Integer::div_ceil(&need.max(0), &gap) as u64)
                }
            }
            (Some(_), None) => unreachable!("excluded by eventually_ge"),
        };
        (1..=horizon + period).all(|n| self.value(n) >= other.value(n))
    }

    /// Whether `self(n) ≥ other(n)` for all sufficiently large `n`.
    pub fn eventually_ge(&self, other: &ExpRule) -> bool {
        match (self.bound(), other.bound()) {
            (None, Some(_)) => true,
            (Some(_), None) => false,
            (Some(x), Some(y)) => x >= y,
            (None, None) => {
                let lhs = self.a as u128 * other.den as u128;
                let rhs = other.a as u128 * self.den as u128;
                if lhs != rhs {
                    return lhs > rhs;
                }
                let start = self.regime_start().max(other.regime_start());
                let period = self.den.lcm(&other.den);
                (start..start + period).all(|n| self.value(n) >= other.value(n))
            }
        }
    }
}

impl fmt::Display for ExpRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = match (self.a, self.b) {
            (0, b) => format!("{b}"),
            (1, 0) => "n".to_string(),
            (a, 0) => format!("{a}n"),
            (1, b) if b < 0 => format!("n - {}", -b),
            (1, b) => format!("n + {b}"),
            (a, b) if b < 0 => format!("{a}n - {}", -b),
            (a, b) => format!("{a}n + {b}"),
        };
        if self.den != 1 {
            s = format!("floor(({s})/{})", self.den);
        }
        if self.b < 0 {
            s = format!("max(0, {s})");
        }
        match self.cap {
            Some(c) => write!(f, "min({s}, {c})"),
            None => write!(f, "{s}"),
        }
    }
}
