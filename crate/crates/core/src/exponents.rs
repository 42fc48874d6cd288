use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to decide that a pair sits on the critical hyperbola.
pub const CRITICAL_TOL: f64 = 1e-12;

/// Exponents `(p, q)` of the system `-Δu = v^p`, `-Δv = u^q`.
///
/// Construction enforces the superlinear regime `p ≥ 1`, `q ≥ 1`, `pq > 1`
/// and caches the comparability ratio `max(p/q, q/p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExponents", into = "RawExponents")]
pub struct ExponentPair {
    p: f64,
    q: f64,
    ratio: f64,
}

#[derive(Serialize, Deserialize)]
struct RawExponents {
    p: f64,
    q: f64,
}

impl TryFrom<RawExponents> for ExponentPair {
    type Error = Error;

    fn try_from(raw: RawExponents) -> Result<Self> {
        ExponentPair::new(raw.p, raw.q)
    }
}

impl From<ExponentPair> for RawExponents {
    fn from(e: ExponentPair) -> Self {
        RawExponents { p: e.p, q: e.q }
    }
}

impl ExponentPair {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        let invalid = |reason| Err(Error::InvalidExponents { p, q, reason });
        if !p.is_finite() || !q.is_finite() {
            return invalid("exponents must be finite");
        }
        if p * q - 1.0 <= 0.0 {
            return invalid("superlinearity requires pq > 1");
        }
        if p < 1.0 {
            return invalid("p must be at least 1");
        }
        if q < 1.0 {
            return invalid("q must be at least 1");
        }
        Ok(ExponentPair {
            p,
            q,
            ratio: (p / q).max(q / p),
        })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// `max(p/q, q/p)`; the smallest `K` with `q/K ≤ p ≤ Kq`.
    #[inline]
    pub fn comparability(&self) -> f64 {
        self.ratio
    }

    /// Superlinearity margin `pq - 1`.
    #[inline]
    pub fn margin(&self) -> f64 {
        self.p * self.q - 1.0
    }

    /// Same pair with the roles of `p` and `q` exchanged.
    pub fn swapped(&self) -> Self {
        ExponentPair {
            p: self.q,
            q: self.p,
            ratio: self.ratio,
        }
    }
}

impl std::fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(p = {}, q = {})", self.p, self.q)
    }
}

/// Position of `(p, q)` relative to the critical hyperbola in dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

/// Classifies `e` against `1/(p+1) + 1/(q+1) = (n-2)/n`.
pub fn classify(e: &ExponentPair, n: u32) -> Result<Criticality> {
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "dimension must be at least 2, got {n}"
        )));
    }
    let lhs = 1.0 / (e.p + 1.0) + 1.0 / (e.q + 1.0);
    let rhs = (n as f64 - 2.0) / n as f64;
    let gap = lhs - rhs;
    Ok(if gap.abs() <= CRITICAL_TOL {
        Criticality::Critical
    } else if gap > 0.0 {
        Criticality::Subcritical
    } else {
        Criticality::Supercritical
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_linear_and_sublinear_pairs() {
        assert!(ExponentPair::new(1.0, 1.0).is_err());
        assert!(ExponentPair::new(1.0, 0.5).is_err());
        assert!(ExponentPair::new(0.9, 4.0).is_err());
        assert!(ExponentPair::new(f64::NAN, 2.0).is_err());
        assert!(ExponentPair::new(1.0, 1.0 + 1e-9).is_ok());
    }

    #[test]
    fn comparability_ratio() {
        let e = ExponentPair::new(2.0, 8.0).unwrap();
        assert_eq!(e.comparability(), 4.0);
        assert_eq!(e.swapped().comparability(), 4.0);
        assert_eq!(e.margin(), 15.0);
    }

    #[test]
    fn classification_examples() {
        let e = ExponentPair::new(3.0, 3.0).unwrap();
        assert_eq!(classify(&e, 2).unwrap(), Criticality::Subcritical);
        let e = ExponentPair::new(5.0, 5.0).unwrap();
        assert_eq!(classify(&e, 3).unwrap(), Criticality::Critical);
        let e = ExponentPair::new(6.0, 6.0).unwrap();
        assert_eq!(classify(&e, 3).unwrap(), Criticality::Supercritical);
        assert!(classify(&e, 1).is_err());
    }

    #[test]
    fn serde_validates() {
        let ok: ExponentPair = serde_json::from_str(r#"{"p":1.0,"q":4.0}"#).unwrap();
        assert_eq!(ok.q(), 4.0);
        assert!(serde_json::from_str::<ExponentPair>(r#"{"p":1.0,"q":1.0}"#).is_err());
    }

    proptest! {
        #[test]
        fn construction_rejects_exactly_the_invalid_set(p in 0.0f64..6.0, q in 0.0f64..6.0) {
            let invalid = p < 1.0 || q < 1.0 || p * q <= 1.0;
            prop_assert_eq!(ExponentPair::new(p, q).is_err(), invalid);
        }

        #[test]
        fn every_planar_pair_is_subcritical(p in 1.0f64..1e4, q in 1.01f64..1e4) {
            let e = ExponentPair::new(p, q).unwrap();
            prop_assert_eq!(classify(&e, 2).unwrap(), Criticality::Subcritical);
        }

        #[test]
        fn classification_is_monotone(p in 1.0f64..20.0, q in 1.1f64..20.0,
                                      dp in 0.0f64..10.0, dq in 0.0f64..10.0, n in 2u32..8) {
            let rank = |c| match c {
                Criticality::Subcritical => 0,
                Criticality::Critical => 1,
                Criticality::Supercritical => 2,
            };
            let a = classify(&ExponentPair::new(p, q).unwrap(), n).unwrap();
            let b = classify(&ExponentPair::new(p + dp, q + dq).unwrap(), n).unwrap();
            prop_assert!(rank(b) >= rank(a));
        }
    }
}
