//! Topology-defining fields: beam frames, triply periodic surfaces and a
//! torus primitive used for verification.

mod catalog;
mod graph;

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

pub use catalog::{BeamTopology, TopologyError};
pub use graph::{GraphError, SkeletalGraph};

use crate::math::{cos, sin, sqrt, Aabb, Vec3};

/// A solid `{X | value(X) >= 0}`.
pub trait ImplicitSolid {
    fn value(&self, p: Vec3) -> f64;

    /// Finite bounds for bounded solids.
    fn bounds(&self) -> Option<Aabb>;
}

impl<S: ImplicitSolid + ?Sized> ImplicitSolid for &S {
    fn value(&self, p: Vec3) -> f64 {
        (**self).value(p)
    }
    fn bounds(&self) -> Option<Aabb> {
        (**self).bounds()
    }
}

/// Closure-backed solid.
pub struct FnSolid<F> {
    pub f: F,
    pub bounds: Option<Aabb>,
}

impl<F: Fn(Vec3) -> f64> ImplicitSolid for FnSolid<F> {
    fn value(&self, p: Vec3) -> f64 {
        (self.f)(p)
    }
    fn bounds(&self) -> Option<Aabb> {
        self.bounds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TpmsKind {
    Gyroid,
    SchwarzP,
    SchwarzD,
}

impl TpmsKind {
    pub const ALL: [TpmsKind; 3] = [TpmsKind::Gyroid, TpmsKind::SchwarzP, TpmsKind::SchwarzD];

    pub fn id(self) -> &'static str {
        match self {
            TpmsKind::Gyroid => "gyroid",
            TpmsKind::SchwarzP => "schwarz_p",
            TpmsKind::SchwarzD => "schwarz_d",
        }
    }

    /// Surface with one period per cell of size `u`.
    pub fn surface(self, u: f64) -> Result<TpmsSurface, TopologyError> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(TopologyError::NonPositiveCellSize(u));
        }
        Ok(TpmsSurface { kind: self, period: u })
    }
}

impl fmt::Display for TpmsKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TpmsKind {
    type Err = TopologyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TpmsKind::ALL
            .iter()
            .copied()
            .find(|t| t.id() == s)
            .ok_or_else(|| TopologyError::UnknownName(s.into()))
    }
}

/// Zero set of a trigonometric TPMS approximation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TpmsSurface {
    kind: TpmsKind,
    period: f64,
}

impl TpmsSurface {
    pub fn kind(&self) -> TpmsKind {
        self.kind
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Level-set value at `p`; the surface is `value == 0`.
    pub fn value(&self, p: Vec3) -> f64 {
        let k = 2.0 * PI / self.period;
        let (x, y, z) = (p.x * k, p.y * k, p.z * k);
        match self.kind {
            TpmsKind::Gyroid => sin(x) * cos(y) + sin(y) * cos(z) + sin(z) * cos(x),
            TpmsKind::SchwarzP => cos(x) + cos(y) + cos(z),
            TpmsKind::SchwarzD => cos(x) * cos(y) * cos(z) - sin(x) * sin(y) * sin(z),
        }
    }

    /// Central-difference gradient with step `period * 1e-4`.
    pub fn gradient(&self, p: Vec3) -> Vec3 {
        let h = self.period * 1e-4;
        let d = |e: Vec3| (self.value(p + e * h) - self.value(p - e * h)) / (2.0 * h);
        Vec3::new(d(Vec3::X), d(Vec3::Y), d(Vec3::Z))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TorusError {
    BadRadii { major: f64, minor: f64 },
}

impl fmt::Display for TorusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let TorusError::BadRadii { major, minor } = self;
        write!(f, "torus needs major > minor > 0, got R={major}, r={minor}")
    }
}

impl core::error::Error for TorusError {}

/// Solid torus around the z axis: `F = r^2 - (sqrt(x^2+y^2) - R)^2 - z^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Torus {
    major: f64,
    minor: f64,
}

impl Torus {
    pub fn new(major: f64, minor: f64) -> Result<Self, TorusError> {
        if minor > 0.0 && major > minor && major.is_finite() {
            Ok(Torus { major, minor })
        } else {
            Err(TorusError::BadRadii { major, minor })
        }
    }
}

impl ImplicitSolid for Torus {
    fn value(&self, p: Vec3) -> f64 {
        let ring = sqrt(p.x * p.x + p.y * p.y) - self.major;
        self.minor * self.minor - ring * ring - p.z * p.z
    }

    fn bounds(&self) -> Option<Aabb> {
        let r = self.major + self.minor;
        Some(Aabb::new(Vec3::new(-r, -r, -self.minor), Vec3::new(r, r, self.minor)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tpms_reference_points() {
        let u = 3.0;
        let g = TpmsKind::Gyroid.surface(u).unwrap();
        assert_eq!(g.value(Vec3::ZERO), 0.0);
        let p = TpmsKind::SchwarzP.surface(u).unwrap();
        assert!(p.value(Vec3::splat(u / 4.0)).abs() < 1e-15);
        let d = TpmsKind::SchwarzD.surface(u).unwrap();
        assert_eq!(d.value(Vec3::ZERO), 1.0);
        assert!(TpmsKind::Gyroid.surface(0.0).is_err());
        assert!(TpmsKind::Gyroid.surface(-1.0).is_err());
        assert!("neovius".parse::<TpmsKind>().is_err());
    }

    #[test]
    fn gradient_matches_analytic() {
        let s = TpmsKind::SchwarzP.surface(2.0 * PI).unwrap();
        let p = Vec3::new(0.3, 1.1, -0.7);
        let g = s.gradient(p);
        let want = Vec3::new(-sin(p.x), -sin(p.y), -sin(p.z));
        assert!((g - want).length() < 1e-7);
    }

    #[test]
    fn torus_regions() {
        let t = Torus::new(2.0, 0.5).unwrap();
        assert!(t.value(Vec3::new(2.5, 0.0, 0.0)).abs() < 1e-15);
        assert_eq!(t.value(Vec3::new(2.0, 0.0, 0.0)), 0.25);
        assert_eq!(t.value(Vec3::ZERO), 0.25 - 4.0);
        assert!(Torus::new(1.0, 1.0).is_err());
        assert!(Torus::new(1.0, 0.0).is_err());
        assert!(Torus::new(0.5, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn tpms_is_cell_periodic(
            x in -50.0f64..50.0, y in -50.0f64..50.0, z in -50.0f64..50.0,
            u in 1.0f64..30.0,
        ) {
            for kind in TpmsKind::ALL {
                let s = kind.surface(u).unwrap();
                let p = Vec3::new(x, y, z);
                for e in [Vec3::X, Vec3::Y, Vec3::Z] {
                    prop_assert!((s.value(p) - s.value(p + e * u)).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn gyroid_is_odd(x in -10.0f64..10.0, y in -10.0f64..10.0, z in -10.0f64..10.0) {
            let s = TpmsKind::Gyroid.surface(2.0 * PI).unwrap();
            let p = Vec3::new(x, y, z);
            prop_assert!((s.value(-p) + s.value(p)).abs() < 1e-12);
        }
    }
}
