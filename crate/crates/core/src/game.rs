//! Two-player coefficient game. Player 1 designs the channel and wants many
//! degrees of freedom; player 2 then rewrites one coefficient per carrier to
//! make that carrier singular.

use std::fmt;

use serde::Serialize;

use crate::channel::{per_carrier_dof, third_user, CarrierDof, ParallelChannel, Position, SingleCarrierChannel, Tolerance};
use crate::dof::{estimate_dof_default, DofEstimate};
use crate::error::{Error, Result};
use crate::rates::{joint_tin_rate, JointScheme};
use crate::scalar::{lit, Real, Scalar};

/// Slack on the joint slope when declaring a winner.
pub const WINNER_TOLERANCE: f64 = 0.1;

/// Player 2's move: rewrites entry `pos = (r, c)` so that, with `j` the third
/// user, `h[r][c] = h[r][j] * h[c][c] / h[c][j]`. This is the ratio condition
/// for the triple `(i, j, k) = (c, j, r)`, and for `(1,2)` reads
/// `h12 = h13 h22 / h23`.
pub fn adversary_best_response<T: Scalar>(carrier: &SingleCarrierChannel<T>, pos: Position) -> Result<SingleCarrierChannel<T>> {
    carrier.validate()?;
    let Position { rx: r, tx: c } = Position::new(pos.rx, pos.tx)?;
    let j = third_user(r, c);
    let value = carrier.gain(r, j) * carrier.gain(c, c) / carrier.gain(c, j);
    let out = carrier.with_gain(r, c, value);
    out.validate()?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Winner {
    Player1,
    Player2,
    /// Joint slope strictly between the two thresholds.
    Undecided,
}

impl fmt::Display for Winner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Winner::Player1 => "player1",
            Winner::Player2 => "player2",
            Winner::Undecided => "undecided",
        })
    }
}

impl Winner {
    pub fn from_slope<T: Real>(slope: T) -> Self {
        let tol: T = lit(WINNER_TOLERANCE);
        if slope <= T::one() + tol {
            Winner::Player2
        } else if slope >= lit::<T>(1.5) - tol {
            Winner::Player1
        } else {
            Winner::Undecided
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GameOutcome<T> {
    pub winner: Winner,
    pub modified_channel: ParallelChannel<T>,
    pub per_carrier_dof: Vec<CarrierDof>,
    /// Slope of the joint achievable rate (alignment if feasible, else TDMA).
    pub joint_dof: DofEstimate<T>,
    pub joint_scheme: JointScheme,
}

/// Applies player 2's best response on every carrier (one position per
/// carrier), then judges the game by the joint achievable DoF.
pub fn play_game<T: Real>(base: &ParallelChannel<T>, adversary: &[Position]) -> Result<GameOutcome<T>> {
    if adversary.len() != base.num_carriers() {
        return Err(Error::InvalidArgument(format!(
            "need one adversary position per carrier: {} carriers, {} positions",
            base.num_carriers(),
            adversary.len()
        )));
    }
    let carriers = base
        .carriers()
        .iter()
        .zip(adversary)
        .map(|(c, &pos)| adversary_best_response(c, pos))
        .collect::<Result<Vec<_>>>()?;
    let modified = ParallelChannel::new(carriers)?;
    let per_carrier = per_carrier_dof(&modified, Tolerance::standard());

    let (_, joint_scheme) = joint_tin_rate(&modified, lit(1.0))?;
    let joint_dof = estimate_dof_default(|snr: T| joint_tin_rate(&modified, snr).map_or(T::nan(), |(r, _)| r))?;
    Ok(GameOutcome {
        winner: Winner::from_slope(joint_dof.slope),
        modified_channel: modified,
        per_carrier_dof: per_carrier,
        joint_dof,
        joint_scheme,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_counterexample;
    use num_rational::Rational64;

    #[test]
    fn best_response_one_two() {
        let h = SingleCarrierChannel::new([[1.0, 9.0, 2.0], [5.0, 3.0, 4.0], [6.0, 7.0, 8.0]]).unwrap();
        let out = adversary_best_response(&h, Position::new(0, 1).unwrap()).unwrap();
        assert_eq!(out.gain(0, 1), 1.5);
    }

    #[test]
    fn best_response_two_one_by_hand() {
        // Ratio condition through (2,1): h13/h11 = h23/h21, so h21 = h23 h11 / h13.
        let r = |x: i64| Rational64::from_integer(x);
        let h = SingleCarrierChannel::new([[r(2), r(5), r(3)], [r(7), r(1), r(4)], [r(6), r(8), r(9)]]).unwrap();
        let out = adversary_best_response(&h, Position::new(1, 0).unwrap()).unwrap();
        assert_eq!(out.gain(1, 0), Rational64::new(8, 3));
        let c1 = make_counterexample::<Rational64>().carrier(0).clone();
        let out = adversary_best_response(&c1, Position::new(1, 0).unwrap()).unwrap();
        assert_eq!(out.gain(1, 0), r(1));
    }

    #[test]
    fn idempotent_and_singular() {
        let r = |x: i64| Rational64::from_integer(x);
        let h = SingleCarrierChannel::new([[r(2), r(-5), r(3)], [r(7), r(1), r(4)], [r(6), r(8), r(-9)]]).unwrap();
        for rx in 0..3 {
            for tx in (0..3).filter(|&t| t != rx) {
                let pos = Position::new(rx, tx).unwrap();
                let once = adversary_best_response(&h, pos).unwrap();
                let twice = adversary_best_response(&once, pos).unwrap();
                assert_eq!(once, twice);
                let witnesses = once.singularity_witnesses(Tolerance::Exact);
                assert!(witnesses.iter().any(|w| w.involves(pos)), "{pos}");
            }
        }
    }

    #[test]
    fn winner_thresholds() {
        assert_eq!(Winner::from_slope(1.0), Winner::Player2);
        assert_eq!(Winner::from_slope(1.1), Winner::Player2);
        assert_eq!(Winner::from_slope(1.45), Winner::Player1);
        assert_eq!(Winner::from_slope(1.25), Winner::Undecided);
    }

    #[test]
    fn position_count_checked() {
        let c = make_counterexample::<f64>();
        assert!(play_game(&c, &[Position::new(0, 1).unwrap()]).is_err());
    }
}
