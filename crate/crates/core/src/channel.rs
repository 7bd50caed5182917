//! Channel data model for the 3-user Gaussian interference channel.
//!
//! Indices are 0-based throughout the library: `h[rx][tx]` is the gain from
//! transmitter `tx` to receiver `rx`. Display impls print 1-based user numbers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Number of users (transmitter/receiver pairs).
pub const USERS: usize = 3;

/// Ordered triples `(i, j, k)` of pairwise distinct users, lexicographic.
pub(crate) const DISTINCT_TRIPLES: [(usize, usize, usize); 6] = [
    (0, 1, 2),
    (0, 2, 1),
    (1, 0, 2),
    (1, 2, 0),
    (2, 0, 1),
    (2, 1, 0),
];

/// Index of the user that is neither `a` nor `b` (`a != b`).
#[inline]
pub(crate) fn third_user(a: usize, b: usize) -> usize {
    3 - a - b
}

/// An off-diagonal entry `(rx, tx)` of the gain matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub rx: usize,
    pub tx: usize,
}

impl Position {
    pub fn new(rx: usize, tx: usize) -> Result<Self> {
        if rx >= USERS || tx >= USERS || rx == tx {
            return Err(Error::NotOffDiagonal { rx, tx });
        }
        Ok(Self { rx, tx })
    }

    /// Parses a 1-based `"i,j"` pair.
    pub fn parse_one_based(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected a position like `1,2`, got `{s}`"));
        let (a, b) = s.split_once(',').ok_or_else(bad)?;
        let rx: usize = a.trim().parse().map_err(|_| bad())?;
        let tx: usize = b.trim().parse().map_err(|_| bad())?;
        if rx == 0 || tx == 0 {
            return Err(bad());
        }
        Self::new(rx - 1, tx - 1)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.rx + 1, self.tx + 1)
    }
}

/// How ratios are compared by the singularity detector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance<T> {
    /// Bitwise/rational equality.
    Exact,
    /// `|a - b| <= tol * max(|a|, |b|, 1)`.
    Relative(T),
}

impl<T: Scalar> Tolerance<T> {
    fn matches(&self, a: T, b: T) -> bool {
        match *self {
            Tolerance::Exact => a == b,
            Tolerance::Relative(tol) => {
                let scale = a.magnitude().max_of(b.magnitude()).max_of(T::one());
                (a - b).magnitude() <= tol * scale
            }
        }
    }
}

impl<T: Scalar> Tolerance<T> {
    /// Exact for rationals, otherwise relative with the scalar's default ratio tolerance.
    pub fn standard() -> Self {
        if T::EXACT {
            Tolerance::Exact
        } else {
            Tolerance::Relative(T::default_ratio_tol())
        }
    }
}

/// Single-carrier 3-user channel; `h[rx][tx]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleCarrierChannel<T> {
    h: [[T; USERS]; USERS],
}

impl<T: Scalar> SingleCarrierChannel<T> {
    /// Builds a channel, rejecting zero or non-finite gains.
    pub fn new(h: [[T; USERS]; USERS]) -> Result<Self> {
        let ch = Self { h };
        ch.validate()?;
        Ok(ch)
    }

    /// Wraps the matrix without validation. Use [`validate`](Self::validate) before
    /// handing it to anything that assumes nonzero gains.
    pub fn from_rows_unchecked(h: [[T; USERS]; USERS]) -> Self {
        Self { h }
    }

    pub fn rows(&self) -> &[[T; USERS]; USERS] {
        &self.h
    }

    #[inline]
    pub fn gain(&self, rx: usize, tx: usize) -> T {
        self.h[rx][tx]
    }

    /// Copy with entry `(rx, tx)` replaced. Not validated.
    pub fn with_gain(&self, rx: usize, tx: usize, value: T) -> Self {
        let mut h = self.h;
        h[rx][tx] = value;
        Self { h }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with(T::default_zero_tol())
    }

    /// Accepts iff every entry is finite with magnitude strictly above `zero_tol`.
    /// Reports the first offending entry in row-major order.
    pub fn validate_with(&self, zero_tol: T) -> Result<()> {
        for rx in 0..USERS {
            for tx in 0..USERS {
                let g = self.h[rx][tx];
                if !g.is_finite_scalar() || g.magnitude() <= zero_tol {
                    return Err(Error::InvalidGain { carrier: 0, rx, tx });
                }
            }
        }
        Ok(())
    }

    /// First witness, in lexicographic `(i, j, k)` order, of
    /// `h[i][j] / h[i][i] == h[k][j] / h[k][i]`.
    pub fn singularity_check(&self, tol: Tolerance<T>) -> Option<SingularityWitness<T>> {
        DISTINCT_TRIPLES
            .iter()
            .find_map(|&(i, j, k)| self.witness_at(i, j, k, tol))
    }

    /// Every triple satisfying the ratio condition, lexicographic.
    pub fn singularity_witnesses(&self, tol: Tolerance<T>) -> Vec<SingularityWitness<T>> {
        DISTINCT_TRIPLES
            .iter()
            .filter_map(|&(i, j, k)| self.witness_at(i, j, k, tol))
            .collect()
    }

    fn witness_at(&self, i: usize, j: usize, k: usize, tol: Tolerance<T>) -> Option<SingularityWitness<T>> {
        let lhs = self.h[i][j] / self.h[i][i];
        let rhs = self.h[k][j] / self.h[k][i];
        if tol.matches(lhs, rhs) && lhs != T::zero() {
            Some(SingularityWitness { i, j, k, gamma: lhs })
        } else {
            None
        }
    }

    /// Relabels users: entry `h[a][b]` moves to `h[perm[a]][perm[b]]`.
    pub fn permute_users(&self, perm: [usize; USERS]) -> Self {
        let mut h = self.h;
        for a in 0..USERS {
            for b in 0..USERS {
                h[perm[a]][perm[b]] = self.h[a][b];
            }
        }
        Self { h }
    }

    pub fn map<U: Scalar>(&self, mut f: impl FnMut(T) -> U) -> SingleCarrierChannel<U> {
        SingleCarrierChannel {
            h: self.h.map(|row| row.map(&mut f)),
        }
    }
}

/// A triple `(i, j, k)` for which the channel has a single degree of freedom.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularityWitness<T> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `h[i][j] / h[i][i]`.
    pub gamma: T,
}

impl<T> SingularityWitness<T> {
    /// Whether the ratio condition of this witness involves entry `pos`.
    pub fn involves(&self, pos: Position) -> bool {
        let entries = [(self.i, self.j), (self.i, self.i), (self.k, self.j), (self.k, self.i)];
        entries.contains(&(pos.rx, pos.tx))
    }
}

impl<T: Scalar> fmt::Display for SingularityWitness<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "i={} j={} k={} gamma={}",
            self.i + 1,
            self.j + 1,
            self.k + 1,
            self.gamma.to_f64_lossy()
        )
    }
}

/// `M` parallel carriers; carrier `m` holds the `m`-th diagonal entry of every `H_{i,j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParallelChannel<T> {
    carriers: Vec<SingleCarrierChannel<T>>,
}

impl<T: Scalar> ParallelChannel<T> {
    pub fn new(carriers: Vec<SingleCarrierChannel<T>>) -> Result<Self> {
        if carriers.is_empty() {
            return Err(Error::NoCarriers);
        }
        for (m, c) in carriers.iter().enumerate() {
            c.validate().map_err(|e| match e {
                Error::InvalidGain { rx, tx, .. } => Error::InvalidGain { carrier: m, rx, tx },
                other => other,
            })?;
        }
        Ok(Self { carriers })
    }

    pub fn single(carrier: SingleCarrierChannel<T>) -> Result<Self> {
        Self::new(vec![carrier])
    }

    pub fn carriers(&self) -> &[SingleCarrierChannel<T>] {
        &self.carriers
    }

    pub fn carrier(&self, m: usize) -> &SingleCarrierChannel<T> {
        &self.carriers[m]
    }

    pub fn num_carriers(&self) -> usize {
        self.carriers.len()
    }

    /// Diagonal of `H_{rx,tx}` across carriers.
    pub fn diagonal(&self, rx: usize, tx: usize) -> Vec<T> {
        self.carriers.iter().map(|c| c.gain(rx, tx)).collect()
    }

    /// `u . (H_{rx,tx} v)` for diagonal `H_{rx,tx}`.
    pub fn effective_gain(&self, rx: usize, tx: usize, u: &[T], v: &[T]) -> Result<T> {
        let m = self.num_carriers();
        for len in [u.len(), v.len()] {
            if len != m {
                return Err(Error::DimensionMismatch { expected: m, got: len });
            }
        }
        Ok(self
            .carriers
            .iter()
            .zip(u.iter().zip(v))
            .fold(T::zero(), |acc, (c, (&um, &vm))| acc + um * c.gain(rx, tx) * vm))
    }

    /// Carrier order swapped according to `order` (a permutation of `0..M`).
    pub fn reorder(&self, order: &[usize]) -> Result<Self> {
        let m = self.num_carriers();
        let mut seen = vec![false; m];
        if order.len() != m || order.iter().any(|&o| o >= m || std::mem::replace(&mut seen[o], true)) {
            return Err(Error::InvalidArgument("carrier order must be a permutation".into()));
        }
        Ok(Self {
            carriers: order.iter().map(|&o| self.carriers[o].clone()).collect(),
        })
    }
}

/// The two-carrier channel whose carriers each have one degree of freedom but
/// which supports 3/2 jointly: all cross gains 1, direct gains `(1, 1, -1)` on
/// carrier 1 and `(-1, -1, 1)` on carrier 2.
pub fn make_counterexample<T: Scalar>() -> ParallelChannel<T> {
    let one = T::one();
    let carrier = |d: [T; USERS]| {
        let mut h = [[one; USERS]; USERS];
        for (u, g) in d.into_iter().enumerate() {
            h[u][u] = g;
        }
        SingleCarrierChannel::from_rows_unchecked(h)
    };
    ParallelChannel {
        carriers: vec![carrier([one, one, -one]), carrier([-one, -one, one])],
    }
}

/// Per-carrier degrees of freedom as far as this library can certify them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CarrierDof {
    One,
    Unknown,
}

impl fmt::Display for CarrierDof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CarrierDof::One => f.write_str("1"),
            CarrierDof::Unknown => f.write_str("unknown"),
        }
    }
}

/// `One` for carriers the singularity detector fires on, `Unknown` otherwise.
pub fn per_carrier_dof<T: Scalar>(channel: &ParallelChannel<T>, tol: Tolerance<T>) -> Vec<CarrierDof> {
    channel
        .carriers()
        .iter()
        .map(|c| match c.singularity_check(tol) {
            Some(_) => CarrierDof::One,
            None => CarrierDof::Unknown,
        })
        .collect()
}

/// Carriers of a channel file, without validating the gains.
pub fn parse_carriers(s: &str) -> Result<Vec<SingleCarrierChannel<f64>>> {
    let file: ChannelFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    Ok(file
        .carriers
        .into_iter()
        .map(|c| SingleCarrierChannel::from_rows_unchecked(c.h))
        .collect())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    carriers: Vec<CarrierEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CarrierEntry {
    h: [[f64; USERS]; USERS],
}

impl ParallelChannel<f64> {
    /// Parses `{"carriers": [{"h": [[..3..],[..3..],[..3..]]}, ...]}` and validates it.
    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::new(parse_carriers(s)?)
    }

    pub fn to_json_string(&self) -> String {
        let file = ChannelFile {
            carriers: self.carriers.iter().map(|c| CarrierEntry { h: *c.rows() }).collect(),
        };
        serde_json::to_string_pretty(&file).expect("channel serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn ch(h: [[f64; 3]; 3]) -> SingleCarrierChannel<f64> {
        SingleCarrierChannel::from_rows_unchecked(h)
    }

    #[test]
    fn validate_cases() {
        assert!(ch([[1.0; 3]; 3]).validate().is_ok());
        let mut h = [[1.0; 3]; 3];
        h[0][1] = 0.0;
        assert_eq!(ch(h).validate(), Err(Error::InvalidGain { carrier: 0, rx: 0, tx: 1 }));
        h[0][1] = f64::NAN;
        assert!(ch(h).validate().is_err());
        h[0][1] = 1e-13;
        assert!(ch(h).validate().is_err());
        h[0][1] = 1e-11;
        assert!(ch(h).validate().is_ok());
        for c in make_counterexample::<f64>().carriers() {
            assert!(c.validate().is_ok());
        }
    }

    #[test]
    fn parallel_reports_carrier_index() {
        let good = ch([[1.0; 3]; 3]);
        let bad = good.with_gain(2, 0, 0.0);
        let err = ParallelChannel::new(vec![good, bad]).unwrap_err();
        assert_eq!(err, Error::InvalidGain { carrier: 1, rx: 2, tx: 0 });
        assert_eq!(ParallelChannel::<f64>::new(vec![]).unwrap_err(), Error::NoCarriers);
    }

    #[test]
    fn counterexample_layout() {
        let c = make_counterexample::<f64>();
        assert_eq!(c.num_carriers(), 2);
        assert_eq!(*c.carrier(0).rows(), [[1.0, 1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 1.0, -1.0]]);
        assert_eq!(*c.carrier(1).rows(), [[-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, 1.0]]);
        assert_eq!(c, make_counterexample::<f64>());
    }

    #[test]
    fn counterexample_witnesses() {
        let c = make_counterexample::<Rational64>();
        let one = Rational64::from_integer(1);
        let w1 = c.carrier(0).singularity_check(Tolerance::Exact).unwrap();
        // Lexicographically first triple on carrier 1.
        assert_eq!((w1.i, w1.j, w1.k, w1.gamma), (0, 1, 2, one));
        // The triple used in the single-DoF converse argument is also present.
        let all = c.carrier(0).singularity_witnesses(Tolerance::Exact);
        assert!(all.iter().any(|w| (w.i, w.j, w.k) == (1, 2, 0) && w.gamma == one));
        let w2 = c.carrier(1).singularity_check(Tolerance::Exact).unwrap();
        assert_eq!((w2.i, w2.j, w2.k, w2.gamma), (2, 0, 1, one));
        assert_eq!(per_carrier_dof(&c, Tolerance::Exact), vec![CarrierDof::One, CarrierDof::One]);
        let single = ParallelChannel::single(c.carrier(0).clone()).unwrap();
        assert_eq!(per_carrier_dof(&single, Tolerance::Exact), vec![CarrierDof::One]);
    }

    #[test]
    fn generic_matrix_has_no_witness() {
        // Exhaustive rational evaluation of all six triples: 2 vs 8/7, 3 vs 3/2,
        // 4/5 vs 7/8, 6/5 vs 3/2, 7/10 vs 2/3, 4/5 vs 2/3.
        let r = |x: i64| Rational64::from_integer(x);
        let h = SingleCarrierChannel::new([[r(1), r(2), r(3)], [r(4), r(5), r(6)], [r(7), r(8), r(10)]]).unwrap();
        assert!(h.singularity_check(Tolerance::Exact).is_none());
        let hf = h.map(|x| x.to_f64_lossy());
        assert!(hf.singularity_check(Tolerance::standard()).is_none());
        let p = ParallelChannel::single(hf).unwrap();
        assert_eq!(per_carrier_dof(&p, Tolerance::standard()), vec![CarrierDof::Unknown]);
    }

    #[test]
    fn relative_tolerance_scales() {
        // h[0][1]/h[0][0] = 1e6, h[2][1]/h[2][0] = 1e6 * (1 + 5e-10)
        let h = ch([[1.0, 1e6, 1.0], [1.0, 1.0, 1.0], [1.0, 1e6 * (1.0 + 5e-10), 1.0]]);
        let w = h.singularity_check(Tolerance::standard()).unwrap();
        assert_eq!((w.i, w.j, w.k), (0, 1, 2));
        assert!(h.singularity_check(Tolerance::Exact).map_or(true, |w| (w.i, w.j, w.k) != (0, 1, 2)));
    }

    #[test]
    fn position_parsing() {
        assert_eq!(Position::parse_one_based("1,2").unwrap(), Position { rx: 0, tx: 1 });
        assert_eq!(Position::parse_one_based(" 3 , 1").unwrap(), Position { rx: 2, tx: 0 });
        assert!(Position::parse_one_based("2,2").is_err());
        assert!(Position::parse_one_based("0,1").is_err());
        assert!(Position::parse_one_based("4,1").is_err());
        assert!(Position::parse_one_based("12").is_err());
    }

    #[test]
    fn json_roundtrip_and_errors() {
        let c = make_counterexample::<f64>();
        let back = ParallelChannel::from_json_str(&c.to_json_string()).unwrap();
        assert_eq!(back, c);
        let err = ParallelChannel::from_json_str(r#"{"carriers":[{"h":[[1,1,1],[1,1,1],[1,1]]}]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("line")), "{err}");
        let err = ParallelChannel::from_json_str(r#"{"carriers":[{"h":[[1,1,1],[1,1,1],[1,1,1]]},{"h":[[1,1,1],[1,1,0],[1,1,1]]}]}"#)
            .unwrap_err();
        assert_eq!(err, Error::InvalidGain { carrier: 1, rx: 1, tx: 2 });
    }

    #[test]
    fn effective_gain_dimension() {
        let c = make_counterexample::<f64>();
        assert!(matches!(
            c.effective_gain(0, 1, &[1.0], &[1.0, 1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
        assert_eq!(c.effective_gain(0, 0, &[1.0, -1.0], &[1.0, 1.0]).unwrap(), 2.0);
    }
}
