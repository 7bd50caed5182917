//! Interference alignment over two carriers.
//!
//! With diagonal channel matrices every alignment condition is elementwise.
//! Fixing `v1`, receivers 2 and 3 align by construction through
//! `v3 ∝ H23⁻¹ H21 v1` and `v2 ∝ H32⁻¹ H31 v1`. Receiver 1 then needs `v1` to be
//! an eigenvector of `T = (H13 H23⁻¹ H21)⁻¹ H12 H32⁻¹ H31`. When `T` has distinct
//! diagonal entries its only eigenvectors are the coordinate axes, which leave
//! one carrier unused, so only `T ∝ I` is accepted.

use crate::channel::{ParallelChannel, USERS};
use crate::scalar::{lit, Real};

use super::BeamformingScheme;

const RATIO_TOL: f64 = 1e-9;

/// Unit transmit directions and zero-forcing combiners.
#[derive(Clone, Debug, PartialEq)]
pub struct Beamformers<T> {
    pub v: [Vec<T>; USERS],
    pub u: [Vec<T>; USERS],
}

impl<T: Real> Beamformers<T> {
    pub fn with_power(&self, p: [T; USERS]) -> BeamformingScheme<T> {
        BeamformingScheme {
            v: self.v.clone(),
            u: self.u.clone(),
            p,
        }
    }

    /// `p_j = snr / 3`.
    pub fn with_equal_power(&self, snr: T) -> BeamformingScheme<T> {
        self.with_power([snr / lit(USERS as f64); USERS])
    }
}

fn normalized<T: Real>(x: [T; 2]) -> [T; 2] {
    let n = (x[0] * x[0] + x[1] * x[1]).sqrt();
    [x[0] / n, x[1] / n]
}

/// Alignment beamformers for a two-carrier channel, or `None` when alignment
/// with both carriers in use is impossible (or `M != 2`).
pub fn ia_feasibility<T: Real>(channel: &ParallelChannel<T>) -> Option<Beamformers<T>> {
    if channel.num_carriers() != 2 {
        return None;
    }
    let g = |m: usize, rx: usize, tx: usize| channel.carrier(m).gain(rx, tx);
    let t: [T; 2] = [0, 1].map(|m| g(m, 1, 2) * g(m, 0, 1) * g(m, 2, 0) / (g(m, 1, 0) * g(m, 0, 2) * g(m, 2, 1)));
    let tol: T = lit(RATIO_TOL);
    if (t[0] - t[1]).abs() > tol * t[0].abs().max(t[1].abs()) {
        return None;
    }

    let s = lit::<T>(0.5).sqrt();
    let v1 = [s, s];
    let v3 = normalized([0, 1].map(|m| g(m, 1, 0) / g(m, 1, 2) * v1[m]));
    let v2 = normalized([0, 1].map(|m| g(m, 2, 0) / g(m, 2, 1) * v1[m]));
    let v = [v1, v2, v3];

    let mut u = [[T::zero(); 2]; USERS];
    for i in 0..USERS {
        let j = if i == 0 { 1 } else { 0 };
        let d = [0, 1].map(|m| g(m, i, j) * v[j][m]);
        let mut ui = normalized([-d[1], d[0]]);
        let desired = [0, 1].map(|m| g(m, i, i) * v[i][m]);
        let gain = ui[0] * desired[0] + ui[1] * desired[1];
        let scale = (desired[0] * desired[0] + desired[1] * desired[1]).sqrt();
        if gain.abs() <= tol * scale {
            return None;
        }
        if gain < T::zero() {
            ui = [-ui[0], -ui[1]];
        }
        u[i] = ui;
    }

    Some(Beamformers {
        v: v.map(|x| x.to_vec()),
        u: u.map(|x| x.to_vec()),
    })
}
