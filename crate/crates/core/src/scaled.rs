//! Complex numbers carried with a separate power-of-two exponent.
//!
//! High-order cylinder functions at small argument leave the `f64` range
//! (`J` underflows while `Y` overflows), but the products and ratios the
//! scattering series needs are perfectly representable. [`Scaled`] keeps the
//! mantissa near unit magnitude and moves the range into an `i32`.

use num_complex::Complex64;
use std::ops::{Div, Mul, Neg};

/// `x * 2^e` without intermediate overflow of `2^e`.
pub fn ldexp(mut x: f64, mut e: i32) -> f64 {
    const STEP: i32 = 1000;
    while e > STEP {
        x *= 2f64.powi(STEP);
        e -= STEP;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -STEP {
        x *= 2f64.powi(-STEP);
        e += STEP;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e)
}

/// Value `mant * 2^exp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mant: Complex64,
    pub exp: i32,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mant: Complex64::new(0.0, 0.0),
        exp: 0,
    };

    pub fn new(mant: Complex64, exp: i32) -> Self {
        Scaled { mant, exp }.normalized()
    }

    pub fn real(x: f64, exp: i32) -> Self {
        Self::new(Complex64::new(x, 0.0), exp)
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0)
    }

    fn normalized(self) -> Self {
        let m = self.mant.re.abs().max(self.mant.im.abs());
        if m == 0.0 || !m.is_finite() {
            return Scaled {
                mant: self.mant,
                exp: if m == 0.0 { 0 } else { self.exp },
            };
        }
        let shift = m.log2().floor() as i32;
        if shift == 0 {
            return self;
        }
        Scaled {
            mant: Complex64::new(ldexp(self.mant.re, -shift), ldexp(self.mant.im, -shift)),
            exp: self.exp.saturating_add(shift),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.re == 0.0 && self.mant.im == 0.0
    }

    /// Base-2 logarithm of the modulus; `-inf` for zero.
    pub fn log2_norm(&self) -> f64 {
        self.mant.norm().log2() + self.exp as f64
    }

    /// Plain complex value; saturates to zero or infinity outside `f64` range.
    pub fn to_complex(self) -> Complex64 {
        Complex64::new(ldexp(self.mant.re, self.exp), ldexp(self.mant.im, self.exp))
    }

    pub fn recip(self) -> Self {
        Self::new(self.mant.inv(), -self.exp)
    }

    pub fn scale_real(self, a: f64) -> Self {
        Self::new(self.mant * a, self.exp)
    }

    /// Sum of two scaled values; the smaller one is dropped when it is below
    /// the precision of the larger.
    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (big, small) = if self.exp >= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        let gap = small.exp - big.exp;
        if gap < -120 {
            return big;
        }
        let shifted = Complex64::new(ldexp(small.mant.re, gap), ldexp(small.mant.im, gap));
        Scaled::new(big.mant + shifted, big.exp)
    }

    pub fn sub(self, other: Scaled) -> Scaled {
        self.add(-other)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mant * rhs.mant, self.exp.saturating_add(rhs.exp))
    }
}

impl Mul<Complex64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Complex64) -> Scaled {
        Scaled::new(self.mant * rhs, self.exp)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mant / rhs.mant, self.exp.saturating_sub(rhs.exp))
    }
}
