//! Beam cross-sections in local 2D coordinates.
//!
//! Only the zero level of [`Profile::inside`] is contractual; the interior
//! values are exact distances for the circle and the rounded square and
//! Chebyshev distances for the plain square.

use core::fmt;

use crate::math::{abs, sqrt};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Circle { radius: f64 },
    /// Square of side `side`: `|x+y| + |x-y| = side`.
    Square { side: f64 },
    RoundedSquare { side: f64, fillet: f64 },
}

/// Profile family; dimensions come from the beam diameter `D`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ProfileShape {
    #[default]
    Circle,
    Square,
    RoundedSquare,
}

impl ProfileShape {
    pub const ALL: [ProfileShape; 3] =
        [ProfileShape::Circle, ProfileShape::Square, ProfileShape::RoundedSquare];

    pub fn id(self) -> &'static str {
        match self {
            ProfileShape::Circle => "circle",
            ProfileShape::Square => "square",
            ProfileShape::RoundedSquare => "rounded_square",
        }
    }

    pub fn from_id(s: &str) -> Option<ProfileShape> {
        ProfileShape::ALL.into_iter().find(|p| p.id() == s)
    }

    /// Circle of diameter `D`, square of side `D`, or rounded square of side
    /// `D` with fillet `fillet_ratio * D / 2`.
    pub fn profile(self, diameter: f64, fillet_ratio: f64) -> Result<Profile, ProfileError> {
        match self {
            ProfileShape::Circle => Profile::circle(diameter / 2.0),
            ProfileShape::Square => Profile::square(diameter),
            ProfileShape::RoundedSquare => {
                Profile::rounded_square(diameter, fillet_ratio * diameter / 2.0)
            }
        }
    }
}

impl fmt::Display for ProfileShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProfileError {
    NonPositive(&'static str, f64),
    FilletTooLarge { side: f64, fillet: f64 },
}

impl fmt::Display for ProfileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileError::NonPositive(what, v) => write!(f, "{what} must be positive, got {v}"),
            ProfileError::FilletTooLarge { side, fillet } => {
                write!(f, "fillet {fillet} must lie in [0, {}] for side {side}", side / 2.0)
            }
        }
    }
}

impl core::error::Error for ProfileError {}

fn positive(what: &'static str, v: f64) -> Result<f64, ProfileError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(ProfileError::NonPositive(what, v))
    }
}

impl Profile {
    pub fn circle(radius: f64) -> Result<Profile, ProfileError> {
        Ok(Profile::Circle { radius: positive("radius", radius)? })
    }

    pub fn square(side: f64) -> Result<Profile, ProfileError> {
        Ok(Profile::Square { side: positive("side", side)? })
    }

    pub fn rounded_square(side: f64, fillet: f64) -> Result<Profile, ProfileError> {
        let side = positive("side", side)?;
        if !(0.0..=side / 2.0).contains(&fillet) {
            return Err(ProfileError::FilletTooLarge { side, fillet });
        }
        Ok(Profile::RoundedSquare { side, fillet })
    }

    /// Signed inclusion: positive inside, zero on the outline, negative outside.
    #[inline]
    pub fn inside(&self, xc: f64, yc: f64) -> f64 {
        match *self {
            Profile::Circle { radius } => radius - sqrt(xc * xc + yc * yc),
            Profile::Square { side } => side / 2.0 - abs(xc).max(abs(yc)),
            Profile::RoundedSquare { side, fillet } => {
                let qx = abs(xc) - side / 2.0 + fillet;
                let qy = abs(yc) - side / 2.0 + fillet;
                let (ox, oy) = (qx.max(0.0), qy.max(0.0));
                let outer = sqrt(ox * ox + oy * oy);
                let inner = qx.max(qy).min(0.0);
                fillet - outer - inner
            }
        }
    }

    /// Radius of the smallest origin-centred circle containing the profile.
    pub fn bound(&self) -> f64 {
        match *self {
            Profile::Circle { radius } => radius,
            Profile::Square { side } => side * core::f64::consts::SQRT_2 / 2.0,
            Profile::RoundedSquare { side, fillet } => {
                (side / 2.0 - fillet) * core::f64::consts::SQRT_2 + fillet
            }
        }
    }
}
