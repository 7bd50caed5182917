//! Achievable rates: interference-alignment beamforming with interference
//! treated as noise, and the single-user (TDMA) baseline.
//!
//! All rates are in bits per real channel use, normalized per carrier.

mod allocation;
mod ia;

pub use allocation::{allocate_power, water_fill, PowerAllocation};
pub use ia::{ia_feasibility, Beamformers};

use crate::channel::{ParallelChannel, USERS};
use crate::error::{Error, Result};
use crate::scalar::{half_log2_1p, lit, Real};

/// Transmit directions `v`, receive combiners `u` (all unit norm, length `M`)
/// and per-user powers `p`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeamformingScheme<T> {
    pub v: [Vec<T>; USERS],
    pub u: [Vec<T>; USERS],
    pub p: [T; USERS],
}

impl<T: Real> BeamformingScheme<T> {
    fn check(&self, m: usize) -> Result<()> {
        let tol = T::epsilon().sqrt() * lit(16.0);
        for (name, vecs) in [("v", &self.v), ("u", &self.u)] {
            for (user, x) in vecs.iter().enumerate() {
                if x.len() != m {
                    return Err(Error::DimensionMismatch { expected: m, got: x.len() });
                }
                let norm2: T = x.iter().map(|&c| c * c).sum();
                if !((norm2 - T::one()).abs() <= tol) {
                    return Err(Error::InvalidScheme(format!(
                        "{name}_{} has squared norm {:?}, expected 1",
                        user + 1,
                        norm2
                    )));
                }
            }
        }
        if self.p.iter().any(|&p| !(p >= T::zero()) || !p.is_finite()) {
            return Err(Error::InvalidScheme("powers must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateReport<T> {
    pub per_user_rate: [T; USERS],
    pub sum_rate: T,
    /// Total transmit power (linear).
    pub snr: T,
}

impl<T: Real> RateReport<T> {
    fn from_rates(per_user_rate: [T; USERS], snr: T) -> Self {
        let sum_rate = per_user_rate.iter().copied().sum();
        Self { per_user_rate, sum_rate, snr }
    }
}

/// Per-user rate with linear receivers, interference treated as Gaussian noise:
/// `(1/M) (1/2) log2(1 + p_i g_i^2 / (1 + sum_{j != i} p_j q_ij))`.
pub fn tin_rate<T: Real>(channel: &ParallelChannel<T>, scheme: &BeamformingScheme<T>) -> Result<RateReport<T>> {
    let m = channel.num_carriers();
    scheme.check(m)?;
    let per_carrier = T::one() / lit(m as f64);
    let mut rates = [T::zero(); USERS];
    for (i, rate) in rates.iter_mut().enumerate() {
        let desired = channel.effective_gain(i, i, &scheme.u[i], &scheme.v[i])?;
        let mut interference = T::zero();
        for j in (0..USERS).filter(|&j| j != i) {
            let cross = channel.effective_gain(i, j, &scheme.u[i], &scheme.v[j])?;
            interference = interference + scheme.p[j] * cross * cross;
        }
        let sinr = scheme.p[i] * desired * desired / (T::one() + interference);
        *rate = per_carrier * half_log2_1p(sinr);
    }
    Ok(RateReport::from_rates(rates, scheme.p.iter().copied().sum()))
}

/// Best rate for `active_user` alone over the parallel point-to-point channel,
/// with water-filling across carriers. Other users get rate 0.
pub fn tdma_rate<T: Real>(channel: &ParallelChannel<T>, active_user: usize, snr: T) -> Result<RateReport<T>> {
    if active_user >= USERS {
        return Err(Error::InvalidArgument(format!("user index {active_user} out of range")));
    }
    if !(snr >= T::zero()) {
        return Err(Error::InvalidArgument("snr must be nonnegative".into()));
    }
    let gains: Vec<T> = channel
        .diagonal(active_user, active_user)
        .into_iter()
        .map(|g| g * g)
        .collect();
    let alloc = water_fill(&gains, snr)?;
    let m: T = lit(channel.num_carriers() as f64);
    let total: T = gains
        .iter()
        .zip(&alloc.per_carrier)
        .map(|(&g, &p)| half_log2_1p(g * p))
        .sum();
    let mut rates = [T::zero(); USERS];
    rates[active_user] = total / m;
    Ok(RateReport::from_rates(rates, snr))
}

/// Largest single-user rate over the three users; ties go to the lowest index.
pub fn best_tdma_rate<T: Real>(channel: &ParallelChannel<T>, snr: T) -> Result<(usize, RateReport<T>)> {
    let mut best: Option<(usize, RateReport<T>)> = None;
    for user in 0..USERS {
        let r = tdma_rate(channel, user, snr)?;
        if best.as_ref().map_or(true, |(_, b)| r.sum_rate > b.sum_rate) {
            best = Some((user, r));
        }
    }
    Ok(best.expect("three users"))
}

/// How the joint (coding across carriers) rate was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointScheme {
    /// Interference alignment, equal power per user.
    AlignedEqualPower,
    /// No alignment solution; the best single-user rate is reported instead.
    TdmaFallback,
}

/// Sum rate of the joint scheme at total power `snr`: the IA beamformers with
/// `p_j = snr / 3` when alignment is feasible, otherwise TDMA.
pub fn joint_tin_rate<T: Real>(channel: &ParallelChannel<T>, snr: T) -> Result<(T, JointScheme)> {
    match ia_feasibility(channel) {
        Some(beams) => {
            let scheme = beams.with_equal_power(snr);
            Ok((tin_rate(channel, &scheme)?.sum_rate, JointScheme::AlignedEqualPower))
        }
        None => Ok((best_tdma_rate(channel, snr)?.1.sum_rate, JointScheme::TdmaFallback)),
    }
}
