//! Bessel functions `J_nu`, `Y_nu` and the Hankel function `H^(1)_nu` for
//! real order `nu >= 0` and real argument `x > 0`.
//!
//! All three come from one evaluation of [`cylinder`]:
//!
//! * the ratio `J'_nu / J_nu` from the continued fraction CF1, followed by
//!   downward recurrence to a reduced order `mu` with `|mu| <= 1/2`
//!   (or `mu <= x` once `x >= 2`);
//! * `Y_mu`, `Y_{mu+1}` from Temme's series when `x < 2` and from Steed's
//!   complex continued fraction CF2 otherwise, which fixes the
//!   normalisation of `J_mu` through the Wronskian;
//! * forward recurrence of `Y` back up to `nu`.
//!
//! Temme's series is regular at integer `mu`, so integer and near-integer
//! orders need no special casing. Both recurrences track an extra binary
//! exponent so that `J` and `Y` stay usable where they leave the `f64`
//! range; see [`CylinderValue::scale`].

use crate::error::{Error, Result};
use crate::scaled::{ldexp, Scaled};
use num_complex::Complex64;
use std::f64::consts::PI;

pub const MAX_ORDER: f64 = 200.0;
pub const MIN_ARGUMENT: f64 = 1e-8;
pub const MAX_ARGUMENT: f64 = 1e4;

const EPS: f64 = 1e-16;
const CF_EPS: f64 = 4e-16;
const FPMIN: f64 = 1e-30;
const RESCALE_EXP: i32 = 500;

/// Taylor coefficients of `1/Gamma(1+z)` about `z = 0`.
const RGAMMA_TAYLOR: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_860_6,
    -0.655_878_071_520_253_881_1,
    -0.042_002_635_034_095_235_53,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_75,
    -0.009_621_971_527_876_973_562,
    0.007_218_943_246_663_099_542,
    -0.001_165_167_591_859_065_112,
    -0.000_215_241_674_114_950_972_8,
    0.000_128_050_282_388_116_186_2,
    -0.000_020_134_854_780_788_238_66,
    -1.250_493_482_142_670_657e-6,
    1.133_027_231_981_695_882e-6,
    -2.056_338_416_977_607_104e-7,
    6.116_095_104_481_415_818e-9,
    5.002_007_644_469_222_930e-9,
    -1.181_274_570_487_020_145e-9,
    1.043_426_711_691_100_511e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783e-14,
    -5.348_122_539_423_017_982e-15,
    1.226_778_628_238_260_790e-15,
    -1.181_259_301_697_458_770e-16,
    1.186_692_254_751_600_333e-18,
];

/// `J_nu`, `Y_nu` and their `x`-derivatives at one `(nu, x)`.
///
/// When every component fits in `f64`, `scale == 0` and the fields are the
/// function values. Otherwise the true values are `J = j * 2^-scale` and
/// `Y = y * 2^scale` (likewise for the derivatives); the Wronskian
/// `j*yp - jp*y = 2/(pi x)` holds for the stored fields either way.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderValue {
    pub order: f64,
    pub argument: f64,
    pub j: f64,
    pub jp: f64,
    pub y: f64,
    pub yp: f64,
    pub scale: i32,
}

impl CylinderValue {
    pub fn j_scaled(&self) -> Scaled {
        Scaled::real(self.j, -self.scale)
    }

    pub fn jp_scaled(&self) -> Scaled {
        Scaled::real(self.jp, -self.scale)
    }

    pub fn h_scaled(&self) -> Scaled {
        Scaled::new(
            Complex64::new(ldexp(self.j, -2 * self.scale), self.y),
            self.scale,
        )
    }

    pub fn hp_scaled(&self) -> Scaled {
        Scaled::new(
            Complex64::new(ldexp(self.jp, -2 * self.scale), self.yp),
            self.scale,
        )
    }

    /// `(J, J')`, possibly underflowed to zero.
    pub fn j_pair(&self) -> (f64, f64) {
        (ldexp(self.j, -self.scale), ldexp(self.jp, -self.scale))
    }

    /// `(Y, Y')`, possibly overflowed to infinity.
    pub fn y_pair(&self) -> (f64, f64) {
        (ldexp(self.y, self.scale), ldexp(self.yp, self.scale))
    }

    pub fn wronskian(&self) -> f64 {
        self.j * self.yp - self.jp * self.y
    }
}

fn check_arguments(nu: f64, x: f64) -> Result<()> {
    if !nu.is_finite() || !x.is_finite() {
        return Err(Error::Input(format!("non-finite order {nu} or argument {x}")));
    }
    if !(0.0..=MAX_ORDER).contains(&nu) {
        return Err(Error::Range(format!("order {nu} outside [0, {MAX_ORDER}]")));
    }
    if !(MIN_ARGUMENT..=MAX_ARGUMENT).contains(&x) {
        return Err(Error::Range(format!(
            "argument {x} outside [{MIN_ARGUMENT}, {MAX_ARGUMENT}]"
        )));
    }
    Ok(())
}

/// `(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))` for `|mu| <= 1/2`, with
/// `gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)` and
/// `gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mu2 = mu * mu;
    let mut even = 0.0;
    let mut odd = 0.0;
    for (i, c) in RGAMMA_TAYLOR.iter().enumerate().rev() {
        if i % 2 == 0 {
            even = even * mu2 + c;
        } else {
            odd = odd * mu2 + c;
        }
    }
    // even = sum a_{2m} mu^{2m}, odd = sum a_{2m+1} mu^{2m}
    let gam1 = -odd;
    let gam2 = even;
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

/// `Y_mu(x)` and `Y_{mu+1}(x)` for `|mu| <= 1/2`, `x < 2` (Temme).
fn temme_y(mu: f64, x: f64) -> Result<(f64, f64)> {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
    let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let e = e.exp();
    let mut p = e / (gampl * PI);
    let mut q = 1.0 / (e * PI * gammi);
    let pimu2 = 0.5 * pimu;
    let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
    let r = PI * pimu2 * fact3 * fact3;
    let mut c = 1.0;
    let d = -x2 * x2;
    let mut sum = ff + r * q;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..=10_000 {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= d / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * (ff + r * q);
        sum += del;
        let del1 = c * p - fi * del;
        sum1 += del1;
        if del.abs() < (1.0 + sum.abs()) * EPS {
            return Ok((-sum, -sum1 * 2.0 / x));
        }
    }
    Err(Error::Internal(format!(
        "Temme series for Y_{mu}({x}) did not converge"
    )))
}

/// Steed's CF2: `p + iq = (J'_mu + iY'_mu) / (J_mu + iY_mu)` for `x >= 2`.
fn steed_cf2(mu: f64, x: f64) -> Result<(f64, f64)> {
    let xi = 1.0 / x;
    let mut a = 0.25 - mu * mu;
    let mut p = -0.5 * xi;
    let mut q = 1.0;
    let br = 2.0 * x;
    let mut bi = 2.0;
    let mut fact = a * xi / (p * p + q * q);
    let mut cr = br + q * fact;
    let mut ci = bi + p * fact;
    let mut den = br * br + bi * bi;
    let mut dr = br / den;
    let mut di = -bi / den;
    let mut dlr = cr * dr - ci * di;
    let mut dli = cr * di + ci * dr;
    let mut temp = p * dlr - q * dli;
    q = p * dli + q * dlr;
    p = temp;
    for i in 2..=100_000 {
        a += (2 * (i - 1)) as f64;
        bi += 2.0;
        dr = a * dr + br;
        di = a * di + bi;
        if dr.abs() + di.abs() < FPMIN {
            dr = FPMIN;
        }
        fact = a / (cr * cr + ci * ci);
        cr = br + cr * fact;
        ci = bi - ci * fact;
        if cr.abs() + ci.abs() < FPMIN {
            cr = FPMIN;
        }
        den = dr * dr + di * di;
        dr /= den;
        di /= -den;
        dlr = cr * dr - ci * di;
        dli = cr * di + ci * dr;
        temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        if (dlr - 1.0).abs() + dli.abs() < CF_EPS {
            return Ok((p, q));
        }
    }
    Err(Error::Internal(format!("CF2 for order {mu} at {x} did not converge")))
}

/// Evaluates `J_nu, J'_nu, Y_nu, Y'_nu` at `x`.
pub fn cylinder(nu: f64, x: f64) -> Result<CylinderValue> {
    check_arguments(nu, x)?;
    let big = 2f64.powi(RESCALE_EXP);
    let small = 2f64.powi(-RESCALE_EXP);

    let nl: usize = if x < 2.0 {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let mu = nu - nl as f64;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: h -> J'_nu / J_nu, isign tracks the sign of J_nu / J_{nu-1}...
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let max_iter = 10_000 + (4.0 * x) as usize;
    let mut converged = false;
    for _ in 0..max_iter {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < CF_EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Internal(format!("CF1 for J_{nu}({x}) did not converge")));
    }

    // Downward recurrence from nu to mu with an unnormalised seed.
    let top_j = isign;
    let top_jp = h * top_j;
    let mut rjl = top_j;
    let mut rjpl = top_jp;
    let mut down_exp: i32 = 0;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
        if rjl.abs() > big || rjpl.abs() > big {
            rjl *= small;
            rjpl *= small;
            down_exp += RESCALE_EXP;
        }
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (mut rymu, mut ry1, rjmu) = if x < 2.0 {
        let (rymu, ry1) = temme_y(mu, x)?;
        let rymup = mu * xi * rymu - ry1;
        (rymu, ry1, w / (rymup - f * rymu))
    } else {
        let (p, q) = steed_cf2(mu, x)?;
        let gam = (p - f) / q;
        let rjmu = (w / ((p - f) * gam + q)).sqrt().copysign(rjl);
        let rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        (rymu, mu * xi * rymu - rymup, rjmu)
    };

    // J_nu = top * (J_mu / rjl) * 2^-down_exp
    let norm = rjmu / rjl;
    let j_m = top_j * norm;
    let jp_m = top_jp * norm;
    let j_exp = -down_exp;

    let mut up_exp: i32 = 0;
    for i in 1..=nl {
        let rytemp = (mu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
        if ry1.abs() > big || rymu.abs() > big {
            ry1 *= small;
            rymu *= small;
            up_exp += RESCALE_EXP;
        }
    }
    let y_m = rymu;
    let yp_m = nu * xi * rymu - ry1;

    if !(j_m.is_finite() && jp_m.is_finite() && y_m.is_finite() && yp_m.is_finite()) {
        return Err(Error::Internal(format!(
            "non-finite cylinder function at order {nu}, argument {x}"
        )));
    }

    let log_j = j_m.abs().max(jp_m.abs()).log2() + j_exp as f64;
    let log_y = y_m.abs().max(yp_m.abs()).log2() + up_exp as f64;
    let scale = if log_j > -1000.0 && log_y < 1000.0 {
        0
    } else {
        ((log_y - log_j) / 2.0).round() as i32
    };
    let j_shift = j_exp + scale;
    let y_shift = up_exp - scale;
    Ok(CylinderValue {
        order: nu,
        argument: x,
        j: ldexp(j_m, j_shift),
        jp: ldexp(jp_m, j_shift),
        y: ldexp(y_m, y_shift),
        yp: ldexp(yp_m, y_shift),
        scale,
    })
}

/// `(J_nu(x), J'_nu(x))`.
pub fn bessel_j(nu: f64, x: f64) -> Result<(f64, f64)> {
    Ok(cylinder(nu, x)?.j_pair())
}

/// `(Y_nu(x), Y'_nu(x))`.
pub fn bessel_y(nu: f64, x: f64) -> Result<(f64, f64)> {
    Ok(cylinder(nu, x)?.y_pair())
}

/// `(H^(1)_nu(x), H^(1)'_nu(x))` with `H = J + iY`.
pub fn hankel1(nu: f64, x: f64) -> Result<(Complex64, Complex64)> {
    let v = cylinder(nu, x)?;
    let h = v.h_scaled().to_complex();
    let hp = v.hp_scaled().to_complex();
    if !(h.norm() >= f64::MIN_POSITIVE) || !h.re.is_finite() || !h.im.is_finite() {
        return Err(Error::Internal(format!(
            "|H_{nu}({x})| not representable; use cylinder() for scaled values"
        )));
    }
    Ok((h, hp))
}
