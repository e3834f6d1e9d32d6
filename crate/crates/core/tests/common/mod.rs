//! Reference implementations used only as test oracles.
#![allow(dead_code)]

use std::f64::consts::PI;

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Lanczos approximation (g = 7, nine terms) with reflection below 1/2.
pub fn gamma(z: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z < 0.5 {
        return PI / ((PI * z).sin() * gamma(1.0 - z));
    }
    let z = z - 1.0;
    let mut a = C[0];
    let t = z + G + 0.5;
    for (i, c) in C.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * a
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl Dd {
    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = two_sum(s, e);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        let (hi, lo) = two_sum(p, e + self.lo * b);
        Dd { hi, lo }
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let r = self.sub(Dd::new(b).mul_f64(q1));
        let q2 = r.hi / b;
        let (hi, lo) = two_sum(q1, q2);
        Dd { hi, lo }
    }

    pub fn div_dd(self, d: Dd) -> Dd {
        let q1 = self.hi / d.hi;
        let r = self.sub(d.mul_f64(q1));
        let q2 = r.hi / d.hi;
        let (hi, lo) = two_sum(q1, q2);
        Dd { hi, lo }
    }

    /// Exact sum of two doubles.
    pub fn sum_of(a: f64, b: f64) -> Dd {
        let (hi, lo) = two_sum(a, b);
        Dd { hi, lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// `J_nu(x)` from the defining power series with double-double terms and
/// accumulation; `nu` may be negative and non-integer.
pub fn series_j(nu: f64, x: f64, terms: usize) -> f64 {
    let half = x / 2.0;
    let lead = half.powf(nu) / gamma(nu + 1.0);
    let q = half * half;
    let mut t = Dd::new(1.0);
    let mut sum = Dd::new(1.0);
    for k in 1..terms {
        let kf = k as f64;
        t = t.mul_f64(-q).div_f64(kf).div_dd(Dd::sum_of(kf, nu));
        sum = sum.add(t);
    }
    sum.value() * lead
}

/// Enough series terms for `x` up to a few tens.
pub fn series_terms(x: f64) -> usize {
    30 + (2.0 * x) as usize
}

/// `Y_nu` for non-integer `nu` through the reflection formula.
pub fn reflection_y(nu: f64, x: f64) -> f64 {
    let n = series_terms(x);
    let (s, c) = (nu * PI).sin_cos();
    (series_j(nu, x, n) * c - series_j(-nu, x, n)) / s
}

/// `Y_n` for integer `n >= 0` from the logarithmic series.
pub fn integer_order_y(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let half = x / 2.0;
    let q = half * half;
    let harmonic = |m: u32| (1..=m).map(|i| 1.0 / i as f64).sum::<f64>();
    let factorial = |m: u32| (1..=m).map(|i| i as f64).product::<f64>();

    let mut finite = 0.0;
    for k in 0..n {
        finite += factorial(n - k - 1) / factorial(k) * q.powi(k as i32);
    }
    finite *= -half.powf(-nf) / PI;

    let mut tail = 0.0;
    let mut term = 1.0 / factorial(n);
    for k in 0..60u32 {
        let psi = -2.0 * EULER_GAMMA + harmonic(k) + harmonic(n + k);
        tail += psi * term;
        term *= -q / ((k + 1) as f64 * (n + k + 1) as f64);
    }
    tail *= -half.powf(nf) / PI;

    let j = series_j(nf, x, series_terms(x));
    finite + 2.0 / PI * half.ln() * j + tail
}

/// Romberg integration of a smooth function on `[a, b]`.
pub fn romberg(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut rows: Vec<Vec<f64>> = vec![vec![0.5 * (b - a) * (f(a) + f(b))]];
    for level in 1..25 {
        let n = 1usize << level;
        let h = (b - a) / n as f64;
        let mid: f64 = (0..n / 2).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        let mut row = vec![0.5 * rows[level - 1][0] + h * mid];
        for m in 1..=level {
            let p = 4f64.powi(m as i32);
            let v = (p * row[m - 1] - rows[level - 1][m - 1]) / (p - 1.0);
            row.push(v);
        }
        let done = (row[level] - rows[level - 1][level - 1]).abs() <= tol * row[level].abs();
        rows.push(row);
        if done && level > 4 {
            return rows[level][level];
        }
    }
    panic!("romberg did not converge");
}

/// `Y_n(x)` from the standard integral representation.
pub fn integral_y(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let first = romberg(|t| (x * t.sin() - nf * t).sin(), 0.0, PI, 1e-14);
    let upper = ((60.0 + nf * 20.0) / x).asinh().max(10.0);
    let second = romberg(
        |t| ((nf * t).exp() + sign * (-nf * t).exp()) * (-x * t.sinh()).exp(),
        0.0,
        upper,
        1e-14,
    );
    (first - second) / PI
}

/// Modified Bessel `I_0`, `I_1` by their (positive-term) series.
pub fn modified_i01(x: f64) -> (f64, f64) {
    let q = x * x / 4.0;
    let (mut i0, mut i1) = (0.0, 0.0);
    let (mut t0, mut t1) = (1.0, x / 2.0);
    for k in 0..400 {
        i0 += t0;
        i1 += t1;
        let kf = k as f64;
        t0 *= q / ((kf + 1.0) * (kf + 1.0));
        t1 *= q / ((kf + 1.0) * (kf + 2.0));
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1 {
            break;
        }
    }
    (i0, i1)
}

pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
