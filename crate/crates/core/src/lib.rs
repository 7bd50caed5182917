//! Rates, outerbounds and degrees-of-freedom diagnostics for 3-user Gaussian
//! interference channels, single-carrier and parallel (multi-carrier).
//!
//! Structural code (channel validation, the singularity detector, the
//! coefficient game's best response) is generic over [`Scalar`] and runs on
//! exact rationals; numerical code (rates, bounds, DoF fits) is generic over
//! [`Real`]. The aliases below fix the common instantiations.
//!
//! ```
//! use icsep::{make_counterexample, sweep, ParallelChannel};
//!
//! let channel: ParallelChannel<f64> = make_counterexample();
//! let rows = sweep(&channel, &[40.0, 60.0]).unwrap();
//! assert!(rows[1].joint_tin > rows[1].separate_outer.unwrap());
//! ```

pub mod channel;
pub mod dof;
pub mod error;
pub mod game;
pub mod outerbounds;
pub mod rates;
pub mod scalar;
mod simplex;
pub mod sweep;

use num_rational::Rational64;

pub use channel::{
    make_counterexample, per_carrier_dof, CarrierDof, ParallelChannel, Position, SingleCarrierChannel,
    SingularityWitness, Tolerance, USERS,
};
pub use dof::{db_to_linear, estimate_dof, estimate_dof_default, DofEstimate};
pub use error::{Error, Result};
pub use game::{adversary_best_response, play_game, GameOutcome, Winner};
pub use outerbounds::{
    carrier_mac_reduction, example1_bound, mac_bound_dense_grid, mac_bound_eval, mac_bound_optimize,
    separate_outerbound, GenieParams, MacBoundResult, MacReduction, MacSearchConfig,
};
pub use rates::{
    allocate_power, best_tdma_rate, ia_feasibility, joint_tin_rate, tdma_rate, tin_rate, water_fill, Beamformers,
    BeamformingScheme, JointScheme, PowerAllocation, RateReport,
};
pub use scalar::{Real, Scalar};
pub use sweep::{sweep, SweepResult};

/// Exact rational coefficient.
pub type Rational = Rational64;

pub type Channel = SingleCarrierChannel<f64>;
pub type ExactChannel = SingleCarrierChannel<Rational>;
pub type Parallel = ParallelChannel<f64>;
pub type ExactParallel = ParallelChannel<Rational>;
pub type Witness = SingularityWitness<f64>;
pub type ExactWitness = SingularityWitness<Rational>;
pub type Scheme = BeamformingScheme<f64>;
pub type Genie = GenieParams<f64>;
