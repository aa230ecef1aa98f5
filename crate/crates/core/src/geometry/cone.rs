use crate::prelude::*;
use crate::{Error, Result};

/// Argument of `z` in `[0, 2π)`.
pub fn arg_2pi(z: C64) -> f64 {
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        let b = a + TAU;
        if b >= TAU {
            0.0
        } else {
            b
        }
    } else {
        a
    }
}

/// `r^p e^{ipθ}` for a point given in polar form.
#[inline]
pub fn polar_pow(r: f64, theta: f64, p: f64) -> C64 {
    C64::from_polar(r.powf(p), p * theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleClass {
    LessThanPi,
    EqualPi,
    GreaterThanPi,
}

/// Cone angle `2πα` with `0 < α < 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConeAngle {
    alpha: f64,
}

impl ConeAngle {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 0.0 && alpha < 1.0 {
            Ok(ConeAngle { alpha })
        } else {
            Err(Error::InvalidConeAngle(alpha))
        }
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn total_angle(&self) -> f64 {
        TAU * self.alpha
    }

    pub fn class(&self) -> AngleClass {
        if self.alpha < 0.5 {
            AngleClass::LessThanPi
        } else if self.alpha == 0.5 {
            AngleClass::EqualPi
        } else {
            AngleClass::GreaterThanPi
        }
    }
}

/// Wedge coordinate `z^α / α`, branch `arg z ∈ [0, 2π)`.
pub fn wedge(angle: ConeAngle, z: C64) -> Result<C64> {
    if z == ZERO {
        return Err(Error::ZeroInput);
    }
    let a = angle.alpha();
    Ok(polar_pow(z.norm(), arg_2pi(z), a) / a)
}

pub fn unwedge(angle: ConeAngle, zt: C64) -> Result<C64> {
    if zt == ZERO {
        return Err(Error::ZeroInput);
    }
    let a = angle.alpha();
    let rho = a * zt.norm();
    Ok(polar_pow(rho, arg_2pi(zt), 1.0 / a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_examples() {
        let half = ConeAngle::new(0.5).unwrap();
        assert!((wedge(half, ONE).unwrap() - C64::new(2.0, 0.0)).norm() < 1e-15);
        let w = wedge(half, C64::from_polar(1.0, PI)).unwrap();
        assert!((w - C64::new(0.0, 2.0)).norm() < 1e-14);
        assert_eq!(wedge(half, ZERO), Err(Error::ZeroInput));
    }

    #[test]
    fn classification_is_exact_at_half() {
        assert_eq!(ConeAngle::new(0.5).unwrap().class(), AngleClass::EqualPi);
        assert_eq!(ConeAngle::new(0.5 - 1e-16).unwrap().class(), AngleClass::LessThanPi);
        assert_eq!(ConeAngle::new(0.75).unwrap().class(), AngleClass::GreaterThanPi);
        assert!(ConeAngle::new(1.0).is_err());
        assert!(ConeAngle::new(0.0).is_err());
    }
}
