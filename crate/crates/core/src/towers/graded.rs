use std::fmt;

use serde::{Deserialize, Serialize};

use super::rule::ExpRule;
use crate::error::{Error, Result};
use crate::fpmod::is_prime;

/// A grade's summand: `ℤ/p^{e(n)}` or `ℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Component {
    Cyclic { exp: ExpRule },
    Free,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SegmentRepr", into = "SegmentRepr")]
pub struct Segment {
    pub from: u64,
    pub component: Component,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Cyclic,
    Free,
}

/// JSON form: `{"from": 1, "kind": "cyclic", "exp": {...}}` or
/// `{"from": 1, "kind": "free"}`.
#[derive(Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRepr {
    from: u64,
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exp: Option<ExpRule>,
}

impl TryFrom<SegmentRepr> for Segment {
    type Error = String;

    fn try_from(r: SegmentRepr) -> std::result::Result<Segment, String> {
        let component = match (r.kind, r.exp) {
            (Kind::Cyclic, Some(exp)) => Component::Cyclic { exp },
            (Kind::Free, None) => Component::Free,
            (Kind::Cyclic, None) => return Err("cyclic segment needs \"exp\"".into()),
            (Kind::Free, Some(_)) => return Err("free segment takes no \"exp\"".into()),
        };
        Ok(Segment { from: r.from, component })
    }
}

impl From<Segment> for SegmentRepr {
    fn from(s: Segment) -> SegmentRepr {
        match s.component {
            Component::Cyclic { exp } => SegmentRepr { from: s.from, kind: Kind::Cyclic, exp: Some(exp) },
            Component::Free => SegmentRepr { from: s.from, kind: Kind::Free, exp: None },
        }
    }
}

/// `⊕_{n≥1} Cₙ` where the components are given by finitely many rule
/// segments. Segment `i` covers grades `from_i ≤ n < from_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedModule {
    pub p: u64,
    #[serde(rename = "components")]
    pub segments: Vec<Segment>,
}

impl GradedModule {
    pub fn new(p: u64, segments: Vec<Segment>) -> Result<GradedModule> {
        let m = GradedModule { p, segments };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Malformed(format!("{} is not prime", self.p)));
        }
        if self.segments.first().map(|s| s.from) != Some(1) {
            return Err(Error::Malformed("the first segment must start at grade 1".into()));
        }
        for w in self.segments.windows(2) {
            if w[0].from >= w[1].from {
                return Err(Error::Malformed("segment starts must increase".into()));
            }
        }
        for s in &self.segments {
            if let Component::Cyclic { exp } = &s.component {
                exp.validate()?;
            }
        }
        Ok(())
    }

    pub fn uniform(p: u64, component: Component) -> Result<GradedModule> {
        GradedModule::new(p, vec![Segment { from: 1, component }])
    }

    /// `⊕ₙ ℤ/p^{e(n)}`.
    pub fn cyclic(p: u64, exp: ExpRule) -> Result<GradedModule> {
        GradedModule::uniform(p, Component::Cyclic { exp })
    }

    /// `⊕ₙ ℤ`.
    pub fn free(p: u64) -> Result<GradedModule> {
        GradedModule::uniform(p, Component::Free)
    }

    pub fn component(&self, n: u64) -> Component {
        let i = self.segments.partition_point(|s| s.from <= n);
        self.segments[i.max(1) - 1].component
    }

    /// `e(n)`, with `None` for a free grade.
    pub fn exponent(&self, n: u64) -> Option<u64> {
        match self.component(n) {
            Component::Cyclic { exp } => Some(exp.value(n)),
            Component::Free => None,
        }
    }

    /// The component governing all large grades.
    pub fn tail(&self) -> Component {
        self.segments.last().expect("validated").component
    }

    /// Eventual bound on the exponents; `None` if they are unbounded or the
    /// tail is free.
    pub fn tail_bound(&self) -> Option<u64> {
        match self.tail() {
            Component::Cyclic { exp } => exp.bound(),
            Component::Free => None,
        }
    }

    /// Largest exponent on segment `i`: `None` for a free segment,
    /// `Some(None)` if unbounded.
    pub fn segment_sup(&self, i: usize) -> Option<Option<u64>> {
        match self.segments[i].component {
            Component::Free => None,
            Component::Cyclic { exp } => Some(match self.segments.get(i + 1) {
                Some(next) => Some(exp.value(next.from - 1)),
                None => exp.bound(),
            }),
        }
    }

    /// Supremum of the exponents over all grades, if finite.
    pub fn sup_exponent(&self) -> Option<u64> {
        (0..self.segments.len()).try_fold(0, |acc, i| self.segment_sup(i).flatten().map(|b| acc.max(b)))
    }

    /// Grade after which only the tail segment and its final regime matter.
    pub fn tail_start(&self) -> u64 {
        let last = self.segments.last().expect("validated");
        match last.component {
            Component::Cyclic { exp } => last.from.max(exp.regime_start()),
            Component::Free => last.from,
        }
    }

    /// `M/pᴺM`: exponents `min(e(n), N)`.
    pub fn truncate(&self, n: u64) -> GradedModule {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment {
                from: s.from,
                component: Component::Cyclic {
                    exp: match s.component {
                        Component::Cyclic { exp } => exp.capped(n),
                        Component::Free => ExpRule::constant(n),
                    },
                },
            })
            .collect();
        GradedModule { p: self.p, segments }
    }

    /// Equality of the denoted modules: same prime and the same component
    /// in every grade.
    pub fn same_module(&self, other: &GradedModule) -> bool {
        if self.p != other.p {
            return false;
        }
        let mut cuts: Vec<u64> = self.segments.iter().chain(&other.segments).map(|s| s.from).collect();
        cuts.sort_unstable();
        cuts.dedup();
        cuts.iter().enumerate().all(|(i, &from)| {
            let a = self.component(from);
            let b = other.component(from);
            match (a, b) {
                (Component::Free, Component::Free) => true,
                (Component::Cyclic { exp: x }, Component::Cyclic { exp: y }) => match cuts.get(i + 1) {
                    Some(&to) => (from..to).all(|n| x.value(n) == y.value(n)),
                    None => x.agree_from(&y, from),
                },
                _ => false,
            }
        })
    }
}

impl fmt::Display for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let range = match self.segments.get(i + 1) {
                    Some(next) => format!("{}<=n<{}", s.from, next.from),
                    None => format!("n>={}", s.from),
                };
                match s.component {
                    Component::Cyclic { exp } => format!("⊕[{range}] Z/{}^({exp})", self.p),
                    Component::Free => format!("⊕[{range}] Z"),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n() -> ExpRule {
        ExpRule::linear(1, 0)
    }

    #[test]
    fn truncation_examples() {
        let m = GradedModule::cyclic(2, n()).unwrap();
        let t = m.truncate(3);
        assert_eq!((1..=6).map(|k| t.exponent(k).unwrap()).collect::<Vec<_>>(), vec![1, 2, 3, 3, 3, 3]);
        let f = GradedModule::free(2).unwrap().truncate(2);
        assert!(f.same_module(&GradedModule::cyclic(2, ExpRule::constant(2)).unwrap()));
        let c = GradedModule::cyclic(2, ExpRule::constant(2)).unwrap();
        assert!(c.truncate(5).same_module(&c));
    }

    #[test]
    fn truncation_composes() {
        let m = GradedModule::new(
            3,
            vec![
                Segment { from: 1, component: Component::Free },
                Segment { from: 4, component: Component::Cyclic { exp: ExpRule::linear(2, -3) } },
            ],
        )
        .unwrap();
        for a in 0..6 {
            for b in 0..6 {
                assert!(m.truncate(a).truncate(b).same_module(&m.truncate(a.min(b))));
            }
        }
    }

    #[test]
    fn segments() {
        let m = GradedModule::new(
            2,
            vec![
                Segment { from: 1, component: Component::Cyclic { exp: ExpRule::constant(5) } },
                Segment { from: 3, component: Component::Free },
            ],
        )
        .unwrap();
        assert_eq!(m.exponent(2), Some(5));
        assert_eq!(m.exponent(3), None);
        assert_eq!(m.tail_bound(), None);
        assert!(GradedModule::new(2, vec![]).is_err());
        assert!(GradedModule::new(4, vec![Segment { from: 1, component: Component::Free }]).is_err());
    }

    #[test]
    fn json_shape() {
        let m = GradedModule::cyclic(2, n()).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"p":2,"components":[{"from":1,"kind":"cyclic","exp":{"a":1,"b":0}}]}"#);
        let back: GradedModule = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<GradedModule>(r#"{"p":2,"components":[{"from":1,"kind":"free","exp":{"a":1,"b":0}}]}"#).is_err());
        assert!(serde_json::from_str::<GradedModule>(r#"{"p":2,"components":[{"from":1,"kind":"free","x":1}]}"#).is_err());
    }
}
