//! Sum-capacity outerbounds obtained by letting one receiver decode every message.
//!
//! Two families are provided:
//!
//! * **MAC reduction without a genie.** If a receiver `k` can, after removing its
//!   own signal, reproduce receiver `i`'s view (the singularity ratio condition
//!   holds with `|h[k][i]| >= |h[i][i]|`) and then receiver `j`'s
//!   (`|h[k][j]| >= |h[j][j]|`), it decodes all three messages and the sum rate
//!   is bounded by its multiple-access capacity,
//!   `(1/2) log2(1 + max_c h[k][c]^2 * SNR)`. The counterexample carriers are of
//!   this type with unit gains, giving `(1/2) log2(1 + SNR)`.
//! * **Genie-aided MAC** for the symmetric channel (`h_ii = 1`, `h_ij = h > 1`):
//!   a second receive antenna `S1 = a1 X1 + (1 - h) X2 + noise`, with noise
//!   correlated to receiver 1's, yields a 2-antenna MAC whose sum capacity is
//!   minimized over the genie parameters.
//!
//! Everything is in bits per real channel use.

use rayon::prelude::*;

use crate::channel::{ParallelChannel, SingleCarrierChannel, Tolerance, DISTINCT_TRIPLES, USERS};
use crate::error::{Error, Result};
use crate::rates::allocate_power;
use crate::scalar::{half_log2_1p, lit, Real};
use crate::simplex::NelderMead;

/// Sum-capacity bound for a carrier shaped like the counterexample carriers,
/// `(1/2) log2(1 + snr)`.
pub fn example1_bound<T: Real>(snr: T) -> T {
    half_log2_1p(snr)
}

/// Genie parameters: gain `a1` on `X1`, genie-noise standard deviation `sigma`,
/// and its correlation `rho` with receiver 1's noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenieParams<T> {
    pub a1: T,
    pub sigma: T,
    pub rho: T,
}

impl<T: Real> GenieParams<T> {
    pub fn new(a1: T, sigma: T, rho: T) -> Result<Self> {
        let p = Self { a1, sigma, rho };
        p.check()?;
        Ok(p)
    }

    /// `E[(Z1 + Z~1)^2] = 1 + sigma^2 + 2 rho sigma`.
    pub fn combined_noise_power(&self) -> T {
        T::one() + self.sigma * self.sigma + lit::<T>(2.0) * self.rho * self.sigma
    }

    /// Determinant of `K_z = [[1, rho sigma], [rho sigma, sigma^2]]`.
    pub fn noise_cov_det(&self) -> T {
        self.sigma * self.sigma * (T::one() - self.rho * self.rho)
    }

    pub fn is_feasible(&self) -> bool {
        self.check().is_ok()
    }

    fn check(&self) -> Result<()> {
        let GenieParams { a1, sigma, rho } = *self;
        if !(a1.is_finite() && sigma.is_finite() && rho.is_finite()) {
            return Err(Error::InfeasibleGenie("parameters must be finite".into()));
        }
        if !(sigma > T::zero()) {
            return Err(Error::InfeasibleGenie(format!("sigma = {:?} must be positive", sigma)));
        }
        if !(rho.abs() < T::one()) {
            return Err(Error::InfeasibleGenie(format!("|rho| = {:?} must be below 1", rho.abs())));
        }
        if self.combined_noise_power() > T::one() + lit(1e-12) {
            return Err(Error::InfeasibleGenie(format!(
                "E[(Z1+Z~1)^2] = {:?} exceeds 1",
                self.combined_noise_power()
            )));
        }
        if !(self.noise_cov_det() > T::min_positive_value()) {
            return Err(Error::InfeasibleGenie("noise covariance is singular".into()));
        }
        Ok(())
    }
}

fn check_cross_gain<T: Real>(h: T) -> Result<()> {
    if !(h > T::one()) || !h.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "the symmetric genie bound needs a cross gain h > 1, got {:?}",
            h
        )));
    }
    Ok(())
}

fn check_snr<T: Real>(snr: T) -> Result<()> {
    if !(snr >= T::zero()) || !snr.is_finite() {
        return Err(Error::InvalidArgument(format!("snr must be finite and nonnegative, got {:?}", snr)));
    }
    Ok(())
}

/// `(1/2) log2(det(K_z + (snr/3) H H^T) / det(K_z))` with `H = [[1, h, h], [a1, 1-h, 0]]`.
pub fn mac_bound_eval<T: Real>(h: T, snr: T, params: &GenieParams<T>) -> Result<T> {
    check_cross_gain(h)?;
    check_snr(snr)?;
    params.check()?;
    Ok(mac_value(h, snr, params))
}

/// Unchecked evaluation; infeasible inputs give NaN or garbage.
fn mac_value<T: Real>(h: T, snr: T, p: &GenieParams<T>) -> T {
    let two: T = lit(2.0);
    let c = snr / lit(3.0);
    let one_minus_h = T::one() - h;
    // H H^T
    let g11 = T::one() + two * h * h;
    let g12 = p.a1 + h * one_minus_h;
    let g22 = p.a1 * p.a1 + one_minus_h * one_minus_h;
    let k12 = p.rho * p.sigma;
    let k22 = p.sigma * p.sigma;
    let a11 = T::one() + c * g11;
    let a12 = k12 + c * g12;
    let a22 = k22 + c * g22;
    let det_a = a11 * a22 - a12 * a12;
    let det_k = p.noise_cov_det();
    lit::<T>(0.5) * (det_a / det_k).log2()
}

/// Search box and effort for [`mac_bound_optimize`].
#[derive(Clone, Debug, PartialEq)]
pub struct MacSearchConfig<T> {
    /// `a1` ranges over `[-A, A]`; `None` means `A = 4h`.
    pub a1_half_width: Option<T>,
    pub sigma_max: T,
    /// `rho` stays inside `(-1 + margin, 1 - margin)`.
    pub rho_margin: T,
    pub grid_a1: usize,
    pub grid_sigma: usize,
    pub grid_rho: usize,
    pub max_iterations: usize,
    /// Nelder-Mead restarts from the previous optimum.
    pub restarts: usize,
}

impl<T: Real> Default for MacSearchConfig<T> {
    fn default() -> Self {
        Self {
            a1_half_width: None,
            sigma_max: lit(2.0),
            rho_margin: lit(1e-3),
            grid_a1: 33,
            grid_sigma: 20,
            grid_rho: 40,
            max_iterations: 2000,
            restarts: 3,
        }
    }
}

impl<T: Real> MacSearchConfig<T> {
    fn a1_range(&self, h: T) -> T {
        self.a1_half_width.unwrap_or(lit::<T>(4.0) * h)
    }

    /// Largest feasible `rho` for a given `sigma`.
    fn rho_ceiling(&self, sigma: T) -> T {
        (T::one() - self.rho_margin).min(-sigma / lit(2.0))
    }

    fn clip(&self, x: &[T; 3]) -> GenieParams<T> {
        let sigma_floor = T::epsilon().sqrt();
        let sigma = x[1].max(sigma_floor).min(self.sigma_max);
        let rho_floor = -T::one() + self.rho_margin;
        let rho = x[2].min(self.rho_ceiling(sigma)).max(rho_floor);
        GenieParams { a1: x[0], sigma, rho }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MacBoundResult<T> {
    /// Bound on the sum capacity (bits per real channel use).
    pub value: T,
    pub params: GenieParams<T>,
    pub h: T,
    pub evaluations: usize,
}

fn grid_points<T: Real>(lo: T, hi: T, n: usize) -> impl Iterator<Item = T> {
    (0..n).map(move |k| {
        if n == 1 {
            (lo + hi) * lit(0.5)
        } else {
            lo + (hi - lo) * lit(k as f64 / (n - 1) as f64)
        }
    })
}

/// Minimizes [`mac_bound_eval`] over feasible genie parameters: a coarse grid
/// over the search box, then Nelder-Mead from the best grid point with the
/// feasibility constraints enforced by clipping.
pub fn mac_bound_optimize<T: Real>(h: T, snr: T, cfg: &MacSearchConfig<T>) -> Result<MacBoundResult<T>> {
    check_cross_gain(h)?;
    check_snr(snr)?;
    let a = cfg.a1_range(h);
    let rho_floor = -T::one() + cfg.rho_margin;

    let mut evaluations = 0;
    let mut best: Option<(T, GenieParams<T>)> = None;
    for a1 in grid_points(-a, a, cfg.grid_a1) {
        for ks in 1..=cfg.grid_sigma {
            let sigma = cfg.sigma_max * lit(ks as f64 / cfg.grid_sigma as f64);
            for rho in grid_points(rho_floor, T::one() - cfg.rho_margin, cfg.grid_rho) {
                let p = GenieParams { a1, sigma, rho };
                if !p.is_feasible() {
                    continue;
                }
                evaluations += 1;
                let v = mac_value(h, snr, &p);
                if best.map_or(true, |(b, _)| v < b) {
                    best = Some((v, p));
                }
            }
        }
    }
    let (mut value, mut params) =
        best.ok_or_else(|| Error::InvalidArgument("genie search grid contains no feasible point".into()))?;

    let nm = NelderMead {
        max_iterations: cfg.max_iterations,
        f_tol: lit(1e-13),
        x_tol: lit(1e-9),
    };
    let objective = |x: &[T; 3]| {
        let p = cfg.clip(x);
        if p.is_feasible() {
            mac_value(h, snr, &p)
        } else {
            T::infinity()
        }
    };
    let mut step: [T; 3] = [a / lit(cfg.grid_a1.max(2) as f64), cfg.sigma_max / lit(cfg.grid_sigma.max(2) as f64), lit(0.05)];
    for _ in 0..=cfg.restarts {
        let m = nm.minimize(&objective, [params.a1, params.sigma, params.rho], step);
        evaluations += m.evaluations;
        let p = cfg.clip(&m.x);
        if p.is_feasible() {
            let v = mac_value(h, snr, &p);
            if v <= value {
                value = v;
                params = p;
            }
        }
        step = step.map(|s| s * lit(0.1));
    }

    Ok(MacBoundResult {
        value: value.max(T::zero()),
        params,
        h,
        evaluations,
    })
}

/// Exhaustive grid with spacing `step` on every axis over the same box as the
/// optimizer: `a1` in `[-A, A]`, `sigma` in `(0, sigma_max]`, `rho` in
/// `(-1, 1)` restricted to the feasible set. Ties go to the lowest
/// lexicographic `(a1, sigma, rho)` grid index, independent of thread count.
pub fn mac_bound_dense_grid<T: Real>(h: T, snr: T, step: T, cfg: &MacSearchConfig<T>) -> Result<MacBoundResult<T>> {
    check_cross_gain(h)?;
    check_snr(snr)?;
    if !(step > T::zero()) {
        return Err(Error::InvalidArgument("grid step must be positive".into()));
    }
    let a = cfg.a1_range(h);
    let count = |span: T| -> usize { (span / step + lit(1e-9)).floor().to_usize().unwrap_or(0) };
    let n_a1 = count(a + a) + 1;
    let n_sigma = count(cfg.sigma_max);
    let n_rho = count(lit(2.0)).saturating_sub(1);

    let best = (0..n_a1)
        .into_par_iter()
        .filter_map(|ia| {
            let a1 = -a + step * lit(ia as f64);
            let mut local: Option<(T, (usize, usize, usize), GenieParams<T>)> = None;
            for is in 0..n_sigma {
                let sigma = step * lit((is + 1) as f64);
                for ir in 0..n_rho {
                    let rho = -T::one() + step * lit((ir + 1) as f64);
                    let p = GenieParams { a1, sigma, rho };
                    if !p.is_feasible() {
                        continue;
                    }
                    let v = mac_value(h, snr, &p);
                    if local.map_or(true, |(b, _, _)| v < b) {
                        local = Some((v, (ia, is, ir), p));
                    }
                }
            }
            local
        })
        .reduce_with(|x, y| {
            if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) {
                y
            } else {
                x
            }
        });
    let (value, _, params) =
        best.ok_or_else(|| Error::InvalidArgument("dense grid contains no feasible point".into()))?;
    Ok(MacBoundResult {
        value: value.max(T::zero()),
        params,
        h,
        evaluations: n_a1 * n_sigma * n_rho,
    })
}

/// A receiver that can decode all three messages without noise reduction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MacReduction<T> {
    /// The decoding receiver.
    pub receiver: usize,
    /// `max_c h[receiver][c]^2`.
    pub gain: T,
}

impl<T: Real> MacReduction<T> {
    /// `(1/2) log2(1 + gain * snr)`.
    pub fn bound(&self, snr: T) -> T {
        half_log2_1p(self.gain * snr)
    }
}

/// Finds a [`MacReduction`] for `carrier`, scanning singularity witnesses
/// `(i, j, k)` lexicographically with `k` as the decoding receiver.
pub fn carrier_mac_reduction<T: Real>(carrier: &SingleCarrierChannel<T>) -> Option<MacReduction<T>> {
    let tol: T = lit(1e-9);
    let rel = Tolerance::Relative(tol);
    let ge = |a: T, b: T| a.abs() >= b.abs() * (T::one() - tol);
    DISTINCT_TRIPLES.iter().find_map(|&(i, j, k)| {
        let singular = carrier.singularity_witnesses(rel).iter().any(|w| (w.i, w.j, w.k) == (i, j, k));
        if singular && ge(carrier.gain(k, i), carrier.gain(i, i)) && ge(carrier.gain(k, j), carrier.gain(j, j)) {
            let gain = (0..USERS)
                .map(|c| carrier.gain(k, c) * carrier.gain(k, c))
                .fold(T::zero(), T::max);
            Some(MacReduction { receiver: k, gain })
        } else {
            None
        }
    })
}

/// Upper bound on what separate encoding per carrier can achieve, per carrier:
/// `(1/M) max_{sum SNR_m <= snr} sum_m bound_m(SNR_m)`.
///
/// Every carrier needs a finite-SNR bound ([`carrier_mac_reduction`]); carriers
/// without one are rejected.
pub fn separate_outerbound<T: Real>(channel: &ParallelChannel<T>, snr: T) -> Result<T> {
    check_snr(snr)?;
    let reductions = channel
        .carriers()
        .iter()
        .enumerate()
        .map(|(m, c)| {
            carrier_mac_reduction(c).ok_or_else(|| Error::NoCarrierBound {
                carrier: m,
                reason: "no receiver can decode all messages without noise reduction".into(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bounds: Vec<_> = reductions.iter().map(|r| move |p: T| r.bound(p)).collect();
    let alloc = allocate_power(&bounds, snr)?;
    let total: T = bounds.iter().zip(&alloc.per_carrier).map(|(f, &p)| f(p)).sum();
    Ok(total / lit(channel.num_carriers() as f64))
}
