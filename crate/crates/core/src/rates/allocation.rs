//! Power allocation across carriers for separable (concave) per-carrier objectives.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

const MAX_ITERATIONS: usize = 200;
/// Sample points used to reject functions whose marginal value increases.
const CONCAVITY_PROBES: usize = 16;

/// Power per carrier (linear SNR).
#[derive(Clone, Debug, PartialEq)]
pub struct PowerAllocation<T> {
    pub per_carrier: Vec<T>,
}

impl<T: Real> PowerAllocation<T> {
    pub fn total(&self) -> T {
        self.per_carrier.iter().copied().sum()
    }
}

fn check_budget<T: Real>(total: T) -> Result<()> {
    if !(total >= T::zero()) || !total.is_finite() {
        return Err(Error::InvalidArgument("total power must be finite and nonnegative".into()));
    }
    Ok(())
}

/// Central-difference marginal value, one-sided near zero.
fn marginal<T: Real, F: Fn(T) -> T>(f: &F, p: T) -> T {
    let step = T::epsilon().cbrt() * p.max(T::one());
    if p >= step {
        (f(p + step) - f(p - step)) / (step + step)
    } else {
        (f(p + step) - f(p)) / step
    }
}

/// Power at which `f`'s marginal value drops to `lambda`, clipped to `[0, cap]`.
fn demand<T: Real, F: Fn(T) -> T>(f: &F, lambda: T, cap: T) -> T {
    if marginal(f, T::zero()) <= lambda {
        return T::zero();
    }
    if marginal(f, cap) >= lambda {
        return cap;
    }
    let (mut lo, mut hi) = (T::zero(), cap);
    for _ in 0..MAX_ITERATIONS {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if marginal(f, mid) > lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) * lit(0.5)
}

/// Spreads `residual` evenly over `active` carriers, never driving one negative.
fn settle<T: Real>(alloc: &mut [T], total: T) {
    let active: Vec<usize> = (0..alloc.len()).filter(|&m| alloc[m] > T::zero()).collect();
    let targets: Vec<usize> = if active.is_empty() {
        (0..alloc.len()).collect()
    } else {
        active
    };
    let sum: T = alloc.iter().copied().sum();
    let share = (total - sum) / lit(targets.len() as f64);
    for m in targets {
        alloc[m] = (alloc[m] + share).max(T::zero());
    }
}

/// Maximizes `sum_m f_m(p_m)` subject to `sum_m p_m <= total`, for concave
/// nondecreasing `f_m` with `f_m(0) >= 0`.
///
/// Bisects on the common marginal value; each carrier's demand at a given
/// multiplier is itself found by bisection on a numerically differentiated
/// marginal. A marginal value that increases anywhere on `[0, total]`, or a
/// multiplier search that cannot meet the budget, is reported as
/// [`Error::NonConvergence`].
pub fn allocate_power<T, F>(bounds: &[F], total: T) -> Result<PowerAllocation<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    check_budget(total)?;
    if bounds.is_empty() {
        return Err(Error::InvalidArgument("at least one carrier is required".into()));
    }
    if total == T::zero() {
        return Ok(PowerAllocation { per_carrier: vec![T::zero(); bounds.len()] });
    }
    if bounds.len() == 1 {
        return Ok(PowerAllocation { per_carrier: vec![total] });
    }

    let slack = T::epsilon().cbrt();
    for (m, f) in bounds.iter().enumerate() {
        let mut prev = marginal(f, T::zero());
        if !prev.is_finite() {
            return Err(Error::NonConvergence(format!("carrier {m}: non-finite marginal value at 0")));
        }
        for k in 1..=CONCAVITY_PROBES {
            let p = total * lit(k as f64 / CONCAVITY_PROBES as f64);
            let cur = marginal(f, p);
            if !cur.is_finite() || cur > prev + slack * prev.abs().max(T::one()) {
                return Err(Error::NonConvergence(format!(
                    "carrier {m}: marginal value increases near p = {:?}; the function is not concave",
                    p
                )));
            }
            prev = cur;
        }
    }

    let lambda_hi = bounds
        .iter()
        .map(|f| marginal(f, T::zero()))
        .fold(T::neg_infinity(), T::max);
    let lambda_lo = bounds
        .iter()
        .map(|f| marginal(f, total))
        .fold(T::infinity(), T::min)
        .max(T::zero());
    if lambda_hi <= T::zero() {
        // Nothing gains from power.
        return Ok(PowerAllocation { per_carrier: vec![T::zero(); bounds.len()] });
    }

    let demands = |lambda: T| -> Vec<T> { bounds.iter().map(|f| demand(f, lambda, total)).collect() };
    let (mut lo, mut hi) = (lambda_lo, lambda_hi);
    let mut alloc = demands(lo);
    for _ in 0..MAX_ITERATIONS {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let d = demands(mid);
        let used: T = d.iter().copied().sum();
        if used > total {
            lo = mid;
        } else {
            hi = mid;
            alloc = d;
        }
    }
    let at_lo = demands(lo);
    let used_lo: T = at_lo.iter().copied().sum();
    let used_hi: T = alloc.iter().copied().sum();
    // Take whichever bracket end is closer to the budget.
    if (used_lo - total).abs() < (used_hi - total).abs() {
        alloc = at_lo;
    }

    let used: T = alloc.iter().copied().sum();
    let strictly_increasing = lambda_lo > T::zero();
    let gap_tol = slack * total.max(T::one());
    if strictly_increasing && (used - total).abs() > gap_tol {
        return Err(Error::NonConvergence(format!(
            "budget mismatch after {MAX_ITERATIONS} iterations: used {:?} of {:?}",
            used, total
        )));
    }
    if strictly_increasing || used > total {
        settle(&mut alloc, total);
    }
    Ok(PowerAllocation { per_carrier: alloc })
}

/// Water-filling for parallel Gaussian carriers with squared gains `gains`:
/// `p_m = max(0, mu - 1/g_m)` with the water level `mu` found by bisection so
/// that the budget is met.
pub fn water_fill<T: Real>(gains: &[T], total: T) -> Result<PowerAllocation<T>> {
    check_budget(total)?;
    if gains.is_empty() {
        return Err(Error::InvalidArgument("at least one carrier is required".into()));
    }
    if gains.iter().any(|&g| !(g > T::zero()) || !g.is_finite()) {
        return Err(Error::InvalidArgument("carrier gains must be positive".into()));
    }
    let fill = |mu: T| -> Vec<T> { gains.iter().map(|&g| (mu - g.recip()).max(T::zero())).collect() };
    let floor = gains.iter().map(|g| g.recip()).fold(T::infinity(), T::min);
    let (mut lo, mut hi) = (floor, floor + total + gains.iter().map(|g| g.recip()).fold(T::zero(), T::max));
    for _ in 0..MAX_ITERATIONS {
        let mid = (lo + hi) * lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let used: T = fill(mid).into_iter().sum();
        if used > total {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut alloc = fill((lo + hi) * lit(0.5));
    if total > T::zero() {
        settle(&mut alloc, total);
    }
    Ok(PowerAllocation { per_carrier: alloc })
}
