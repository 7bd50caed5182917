//! SNR sweeps comparing joint coding across carriers with the best that
//! separate per-carrier coding could achieve.

use rayon::prelude::*;

use crate::channel::ParallelChannel;
use crate::dof::db_to_linear;
use crate::error::{Error, Result};
use crate::outerbounds::separate_outerbound;
use crate::rates::{best_tdma_rate, joint_tin_rate, JointScheme};
use crate::scalar::Real;

/// One row of a sweep. Rates are bits per real channel use per carrier.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult<T> {
    pub snr_db: T,
    /// Joint-coding achievable rate (alignment with TIN, equal power split).
    pub joint_tin: T,
    /// Separate-encoding outerbound; `None` when some carrier has no known bound.
    pub separate_outer: Option<T>,
    pub tdma: T,
    pub scheme_note: String,
}

fn note(scheme: JointScheme, has_separate: bool) -> String {
    let mut s = String::from(match scheme {
        JointScheme::AlignedEqualPower => "ia-feasible;equal-power",
        JointScheme::TdmaFallback => "ia-infeasible;tdma",
    });
    if !has_separate {
        s.push_str(";no-separate-bound");
    }
    s
}

/// Evaluates every grid point independently (in parallel); the output order and
/// values match a sequential evaluation.
pub fn sweep<T: Real>(channel: &ParallelChannel<T>, snr_db_grid: &[T]) -> Result<Vec<SweepResult<T>>> {
    if snr_db_grid.is_empty() {
        return Err(Error::InvalidArgument("SNR grid is empty".into()));
    }
    if snr_db_grid.windows(2).any(|w| !(w[1] > w[0])) || snr_db_grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("SNR grid must be finite and strictly increasing".into()));
    }
    snr_db_grid
        .par_iter()
        .map(|&snr_db| {
            let snr = db_to_linear(snr_db);
            let (joint_tin, scheme) = joint_tin_rate(channel, snr)?;
            let separate_outer = match separate_outerbound(channel, snr) {
                Ok(v) => Some(v),
                Err(Error::NoCarrierBound { .. }) => None,
                Err(e) => return Err(e),
            };
            let (_, tdma) = best_tdma_rate(channel, snr)?;
            Ok(SweepResult {
                snr_db,
                joint_tin,
                scheme_note: note(scheme, separate_outer.is_some()),
                separate_outer,
                tdma: tdma.sum_rate,
            })
        })
        .collect()
}
