//! Degrees-of-freedom estimation from the high-SNR slope of a rate curve.
//!
//! Rates here carry the real-channel factor 1/2, so the abscissa is
//! `(1/2) log2(SNR)`: a curve `d * (1/2) log2(SNR) + O(1)` reads as `d` DoF.

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

pub const DEFAULT_SNR_DB_LO: f64 = 40.0;
pub const DEFAULT_SNR_DB_HI: f64 = 80.0;
pub const DEFAULT_POINTS: usize = 21;
/// Lowest window start accepted as "high SNR".
pub const MIN_SNR_DB: f64 = 30.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DofEstimate<T> {
    /// Least-squares slope against `(1/2) log2(SNR)`.
    pub slope: T,
    pub r_squared: T,
    pub snr_db_range: (T, T),
}

pub fn db_to_linear<T: Real>(db: T) -> T {
    lit::<T>(10.0).powf(db / lit(10.0))
}

/// Linearly spaced dB grid including both ends.
pub fn db_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    (0..n)
        .map(|k| lo + (hi - lo) * lit(k as f64 / (n - 1) as f64))
        .collect()
}

/// Fits `rate_fn(SNR)` against `(1/2) log2(SNR)` on `n_points` evenly spaced
/// dB values in `[snr_db_lo, snr_db_hi]`.
pub fn estimate_dof<T, F>(rate_fn: F, snr_db_lo: T, snr_db_hi: T, n_points: usize) -> Result<DofEstimate<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(snr_db_lo >= lit(MIN_SNR_DB)) || !(snr_db_hi > snr_db_lo) || !snr_db_hi.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "DoF window must satisfy {MIN_SNR_DB} <= lo < hi dB, got [{:?}, {:?}]",
            snr_db_lo, snr_db_hi
        )));
    }
    if n_points < 5 {
        return Err(Error::InvalidArgument(format!("need at least 5 points, got {n_points}")));
    }

    let mut xs = Vec::with_capacity(n_points);
    let mut ys = Vec::with_capacity(n_points);
    for db in db_grid(snr_db_lo, snr_db_hi, n_points) {
        let snr = db_to_linear(db);
        let y = rate_fn(snr);
        if !y.is_finite() {
            return Err(Error::NonFiniteRate {
                snr_db: db.to_f64().unwrap_or(f64::NAN),
                value: y.to_f64().unwrap_or(f64::NAN),
            });
        }
        xs.push(lit::<T>(0.5) * snr.log2());
        ys.push(y);
    }

    let n: T = lit(n_points as f64);
    let mean_x = xs.iter().copied().sum::<T>() / n;
    let mean_y = ys.iter().copied().sum::<T>() / n;
    let (mut sxx, mut sxy, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        let (dx, dy) = (x - mean_x, y - mean_y);
        sxx = sxx + dx * dx;
        sxy = sxy + dx * dy;
        syy = syy + dy * dy;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == T::zero() {
        T::one()
    } else {
        let intercept = mean_y - slope * mean_x;
        let ss_res: T = xs
            .iter()
            .zip(&ys)
            .map(|(&x, &y)| {
                let e = y - (intercept + slope * x);
                e * e
            })
            .sum();
        (T::one() - ss_res / syy).max(T::zero()).min(T::one())
    };
    Ok(DofEstimate {
        slope,
        r_squared,
        snr_db_range: (snr_db_lo, snr_db_hi),
    })
}

/// [`estimate_dof`] over the default 40-80 dB window with 21 points.
pub fn estimate_dof_default<T: Real, F: Fn(T) -> T>(rate_fn: F) -> Result<DofEstimate<T>> {
    estimate_dof(rate_fn, lit(DEFAULT_SNR_DB_LO), lit(DEFAULT_SNR_DB_HI), DEFAULT_POINTS)
}
