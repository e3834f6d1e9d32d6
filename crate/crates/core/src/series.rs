//! Truncation policy for the partial-wave sums over channels `n`.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Relative size the first omitted terms may have.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Where a channel sum was cut and how large the first omitted terms were.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub n_max: i64,
    pub tail_bound: f64,
}

/// Starting channel cut-off for evaluating at radius `r`:
/// `ceil(k r + 10 (k r)^(1/3)) + 20`.
pub fn initial_cutoff(kr: f64) -> i64 {
    (kr + 10.0 * kr.cbrt()).ceil() as i64 + 20
}

/// Channel order used for summation: `0, -1, 1, -2, 2, ...` up to `|n| <= n_max`.
pub fn channel_order(n_max: i64) -> impl Iterator<Item = i64> {
    std::iter::once(0).chain((1..=n_max).flat_map(|m| [-m, m]))
}

/// Sums `term(n)` over `-n_max..=n_max` in [`channel_order`], growing
/// `n_max` until the first omitted pair is below [`TAIL_TOLERANCE`] times the
/// absolute sum of retained terms. `hard_cap` bounds the growth.
pub fn sum_channels<F>(start: i64, hard_cap: i64, mut term: F) -> Result<(Complex64, SeriesTruncation)>
where
    F: FnMut(i64) -> Result<Complex64>,
{
    let mut n_max = start.min(hard_cap);
    let mut terms: Vec<(i64, Complex64)> = Vec::new();
    let mut computed_up_to: i64 = -1;
    loop {
        for m in (computed_up_to + 1)..=(n_max + 1) {
            if m == 0 {
                terms.push((0, term(0)?));
            } else {
                terms.push((-m, term(-m)?));
                terms.push((m, term(m)?));
            }
        }
        computed_up_to = n_max + 1;

        let mut sum = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut tail = 0.0;
        for &(n, t) in &terms {
            if n.abs() <= n_max {
                sum += t;
                abs_sum += t.norm();
            } else {
                tail += t.norm();
            }
        }
        if !sum.re.is_finite() || !sum.im.is_finite() {
            return Err(Error::Truncation(format!(
                "non-finite partial sum at n_max = {n_max}"
            )));
        }
        if tail <= TAIL_TOLERANCE * abs_sum || tail < f64::MIN_POSITIVE {
            return Ok((
                sum,
                SeriesTruncation {
                    n_max,
                    tail_bound: tail,
                },
            ));
        }
        if n_max + 1 >= hard_cap {
            return Err(Error::Truncation(format!(
                "tail {tail:e} above {TAIL_TOLERANCE:e} x {abs_sum:e} at cap n_max = {n_max}"
            )));
        }
        n_max = (n_max + 10).min(hard_cap - 1);
    }
}
