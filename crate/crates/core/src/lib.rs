//! Stochastic-order tools for fading Gaussian multiuser channels when the
//! transmitter only knows the channel-gain distributions.
//!
//! The crate decides whether gains can be ordered in the usual stochastic
//! order, builds the equivalent coupled channels (maximal coupling,
//! comonotone coupling and the Fréchet–Hoeffding upper copula), classifies
//! broadcast, interference and wiretap topologies, certifies degradedness of
//! finite-state Markov fading broadcast channels, and evaluates ergodic rates.
//!
//! All rates use `C(x) = ½·log2(1 + x)`.

pub mod capacity;
pub mod classifier;
pub mod coupling;
pub mod distributions;
pub mod error;
pub mod figures;
pub mod markov;
pub mod quadrature;
pub mod special;
pub mod stochastic_order;
pub mod verify;

pub use capacity::{c_of, ergodic_rate, RateMethod, RateRegion, RateValue};
pub use classifier::{BcScenario, ClassificationReport, Dependence, IcScenario, WtcScenario};
pub use coupling::{CouplingSample, MaximalCouplingSpec};
pub use distributions::{EvaluationGrid, GainDistribution};
pub use error::{Error, Result};
pub use markov::{MarkovCertificate, MarkovChannelSpec};
pub use stochastic_order::{OrderRelation, OrderVerdict};
