use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Origin-centered planar domain. Both shapes are star-shaped about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum DomainSpec {
    Disk {
        radius: f64,
    },
    /// `[-a/2, a/2] × [-b/2, b/2]`.
    Rectangle {
        a: f64,
        b: f64,
    },
}

impl DomainSpec {
    pub fn disk(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        Ok(DomainSpec::Disk { radius })
    }

    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "rectangle sides must be positive, got {a} x {b}"
            )));
        }
        Ok(DomainSpec::Rectangle { a, b })
    }

    pub fn unit_disk() -> Self {
        DomainSpec::Disk { radius: 1.0 }
    }

    pub fn unit_square() -> Self {
        DomainSpec::Rectangle { a: 1.0, b: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DomainSpec::Disk { radius } => DomainSpec::disk(radius).map(|_| ()),
            DomainSpec::Rectangle { a, b } => DomainSpec::rectangle(a, b).map(|_| ()),
        }
    }

    pub fn diameter(&self) -> f64 {
        match *self {
            DomainSpec::Disk { radius } => 2.0 * radius,
            DomainSpec::Rectangle { a, b } => a.hypot(b),
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            DomainSpec::Disk { radius } => PI * radius * radius,
            DomainSpec::Rectangle { a, b } => a * b,
        }
    }

    pub fn star_shaped(&self) -> bool {
        true
    }

    /// Comparison constant `diam²/4` bounding `M/N^p` and `N/M^q`.
    pub fn comparison_constant(&self) -> f64 {
        let d = self.diameter();
        d * d / 4.0
    }

    pub fn is_disk(&self) -> bool {
        matches!(self, DomainSpec::Disk { .. })
    }
}

impl std::fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            DomainSpec::Disk { radius } => write!(f, "disk(R = {radius})"),
            DomainSpec::Rectangle { a, b } => write!(f, "rectangle({a} x {b})"),
        }
    }
}
