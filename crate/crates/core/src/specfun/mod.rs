//! Bessel functions of the first kind of integer order, `J_m(x)`, and their
//! first derivatives for real `x >= 0`.
//!
//! Two evaluation routes, both carried out in double-double arithmetic and
//! rounded once at the end:
//!
//! * `x < 12`: the ascending power series.
//! * `x >= 12`: Miller's downward recurrence, normalised with
//!   `J_0 + 2 * sum_k J_2k = 1`.
//!
//! Negative orders use `J_{-m} = (-1)^m J_m`. Derivatives always come from
//! `J'_m = (J_{m-1} - J_{m+1}) / 2`.

mod dd;

use dd::Dd;
use thiserror::Error;

/// Largest `|m|` accepted by the public functions.
pub const MAX_ORDER: i64 = 1_000_000;

/// Below this argument the power series is used.
const SERIES_LIMIT: f64 = 12.0;

/// Rescaling threshold for the unnormalised recurrence.
const RESCALE_AT: f64 = 4.149_515_568_880_993e180; // 2^600
const RESCALE_BY: f64 = 2.409_919_865_102_884_6e-181; // 2^-600

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("bessel argument must be finite and non-negative, got {argument}")]
    Argument { argument: f64 },
    #[error("bessel order {order} exceeds the supported range |m| <= {MAX_ORDER}")]
    Order { order: i64 },
}

/// One evaluated Bessel pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEval {
    pub order: i64,
    pub argument: f64,
    pub value: f64,
    pub derivative: f64,
}

impl BesselEval {
    pub fn new(order: i64, argument: f64) -> Result<Self, SpecfunError> {
        Ok(BesselEval {
            order,
            argument,
            value: bessel_j(order, argument)?,
            derivative: bessel_j_prime(order, argument)?,
        })
    }
}

fn check(m: i64, x: f64) -> Result<(), SpecfunError> {
    if !x.is_finite() || x < 0.0 {
        return Err(SpecfunError::Argument { argument: x });
    }
    if m.unsigned_abs() > MAX_ORDER as u64 {
        return Err(SpecfunError::Order { order: m });
    }
    Ok(())
}

#[inline]
fn apply_parity(m: i64, value: f64) -> f64 {
    if m < 0 && m % 2 != 0 {
        -value
    } else {
        value
    }
}

/// `J_m(x)` for integer `m` and finite `x >= 0`.
pub fn bessel_j(m: i64, x: f64) -> Result<f64, SpecfunError> {
    check(m, x)?;
    let order = m.unsigned_abs() as usize;
    if x == 0.0 {
        return Ok(if order == 0 { 1.0 } else { 0.0 });
    }
    let value = if x < SERIES_LIMIT {
        series(order, x).to_f64()
    } else {
        miller(x, order)[order].to_f64()
    };
    Ok(apply_parity(m, value))
}

/// `J'_m(x)`, computed as `(J_{m-1}(x) - J_{m+1}(x)) / 2` before rounding.
pub fn bessel_j_prime(m: i64, x: f64) -> Result<f64, SpecfunError> {
    check(m, x)?;
    check(m - 1, x)?;
    check(m + 1, x)?;
    if x == 0.0 {
        return Ok(match m.abs() {
            1 => 0.5 * m.signum() as f64,
            _ => 0.0,
        });
    }
    let signed = |n: i64, v: Dd| if n < 0 && n % 2 != 0 { -v } else { v };
    let (below, above) = (m - 1, m + 1);
    let (a, b) = if x < SERIES_LIMIT {
        (
            series(below.unsigned_abs() as usize, x),
            series(above.unsigned_abs() as usize, x),
        )
    } else {
        let table = miller(x, m.unsigned_abs() as usize + 1);
        (
            table[below.unsigned_abs() as usize],
            table[above.unsigned_abs() as usize],
        )
    };
    Ok((signed(below, a) - signed(above, b)).mul_f64(0.5).to_f64())
}

/// `J_0(x) ..= J_top(x)` from a single recurrence sweep.
pub fn bessel_j_orders(x: f64, top: usize) -> Result<Vec<f64>, SpecfunError> {
    check(top as i64, x)?;
    if x == 0.0 {
        let mut out = vec![0.0; top + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if x < SERIES_LIMIT {
        Ok(series_orders(x, top))
    } else {
        Ok(miller(x, top).into_iter().map(Dd::to_f64).collect())
    }
}

/// `J_0(x) ..= J_top(x)` with the recurrence carried in plain double
/// precision. Several times faster than [`bessel_j_orders`]; relative error
/// is a few ulps times the start order, larger only where a value is close
/// to a zero of `J_m`. Filter banks use this.
pub fn bessel_j_orders_fast(x: f64, top: usize) -> Result<Vec<f64>, SpecfunError> {
    if x < SERIES_LIMIT {
        return bessel_j_orders(x, top);
    }
    check(top as i64, x)?;
    let start = miller_start(x, top, FAST_MARGIN);
    let two_over_x = 2.0 / x;
    let mut kept = vec![0.0; top + 1];
    let mut upper = 0.0;
    let mut current = 1e-30;
    let mut norm = 0.0;
    for n in (1..=start).rev() {
        if n <= top {
            kept[n] = current;
        }
        if n % 2 == 0 {
            norm += 2.0 * current;
        }
        let lower = current * (two_over_x * n as f64) - upper;
        upper = current;
        current = lower;
        if current.abs() > RESCALE_AT {
            current *= RESCALE_BY;
            upper *= RESCALE_BY;
            norm *= RESCALE_BY;
            for v in kept.iter_mut().skip(n.min(top + 1)) {
                *v *= RESCALE_BY;
            }
        }
    }
    kept[0] = current;
    norm += current;
    kept.iter_mut().for_each(|v| *v /= norm);
    Ok(kept)
}

/// `(x/2)^m / m!` followed by the alternating series in `-(x/2)^2`.
fn series(order: usize, x: f64) -> Dd {
    let half = Dd::from_f64(x).mul_f64(0.5);
    let mut prefactor = Dd::ONE;
    for n in 1..=order {
        prefactor = (prefactor * half) / Dd::from_f64(n as f64);
        if prefactor.hi == 0.0 {
            return Dd::ZERO;
        }
    }
    prefactor * series_tail(order, half)
}

fn series_tail(order: usize, half: Dd) -> Dd {
    let q = -(half * half);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    let mut k = 1usize;
    loop {
        let denom = (k as f64) * ((k + order) as f64);
        term = (term * q) / Dd::from_f64(denom);
        sum = sum + term;
        if term.abs_hi() <= 1e-34 * sum.abs_hi() {
            break;
        }
        k += 1;
    }
    sum
}

fn series_orders(x: f64, top: usize) -> Vec<f64> {
    let half = Dd::from_f64(x).mul_f64(0.5);
    let mut out = vec![0.0; top + 1];
    let mut prefactor = Dd::ONE;
    for (n, slot) in out.iter_mut().enumerate() {
        if n > 0 {
            prefactor = (prefactor * half) / Dd::from_f64(n as f64);
        }
        if prefactor.hi == 0.0 {
            break;
        }
        *slot = (prefactor * series_tail(n, half)).to_f64();
    }
    out
}

/// Growth exponent of `J_n(x)/Y_n(x)` beyond the turning point `n = x`.
fn decay_exponent(n: f64, x: f64) -> f64 {
    if n <= x {
        0.0
    } else {
        n * (n / x).acosh() - (n * n - x * x).sqrt()
    }
}

/// Start-order margins: the neglected contamination is about `e^-2margin`
/// relative to every requested order. Large arguments need more than the
/// asymptotic estimate suggests, so the double-double route asks for more.
const FAST_MARGIN: f64 = 22.0;
const EXACT_MARGIN: f64 = 40.0;

/// Start order for the downward recurrence, far enough past both `top` and
/// `x` for the given margin.
pub(crate) fn miller_start(x: f64, top: usize, margin: f64) -> usize {
    let base = (top as f64).max(x).ceil();
    let target = decay_exponent(base, x) + margin;
    // smallest n > base reaching the target; the exponent increases with n
    let mut lo = base;
    let mut step = 1.0;
    while decay_exponent(lo + step, x) < target {
        lo += step;
        step *= 2.0;
    }
    let mut hi = lo + step;
    while hi - lo > 1.0 {
        let mid = lo + ((hi - lo) / 2.0).floor();
        if decay_exponent(mid, x) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi as usize + 10
}

fn miller(x: f64, top: usize) -> Vec<Dd> {
    let start = miller_start(x, top, EXACT_MARGIN);
    let two_over_x = Dd::from_f64(2.0) / Dd::from_f64(x);

    let mut kept = vec![Dd::ZERO; top + 1];
    let mut upper = Dd::ZERO; // f_{n+1}
    let mut current = Dd::from_f64(1e-30); // f_n
    let mut norm = Dd::ZERO;

    for n in (1..=start).rev() {
        if n <= top {
            kept[n] = current;
        }
        if n % 2 == 0 {
            norm = norm + current.mul_f64(2.0);
        }
        let lower = current * two_over_x.mul_f64(n as f64) - upper;
        upper = current;
        current = lower;
        if current.abs_hi() > RESCALE_AT {
            current = current.scale(RESCALE_BY);
            upper = upper.scale(RESCALE_BY);
            norm = norm.scale(RESCALE_BY);
            for v in kept.iter_mut().skip(n.min(top + 1)) {
                *v = v.scale(RESCALE_BY);
            }
        }
    }
    kept[0] = current;
    norm = norm + current;

    kept.into_iter().map(|v| v / norm).collect()
}
