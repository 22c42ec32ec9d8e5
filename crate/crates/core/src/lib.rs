//! Distributed Gaussian mean testing under communication and shared-randomness
//! budgets.
//!
//! Users each hold samples from `G(mu, I_d)` and send a few bits to a referee,
//! which decides between `mu = 0` and `||mu||_2 >= epsilon`. The crate contains
//! the building blocks (fast Walsh-Hadamard transform, a 4-wise independent sign
//! generator over `GF(2^k)`, the blockwise randomized Hadamard transform, the
//! collision-statistic mean test), five protocols with exact bit accounting, and
//! a Monte Carlo harness that estimates their two-sided error.

pub mod bpmt;
pub mod brht;
pub mod error;
pub mod hadamard;
pub mod harness;
pub mod protocols;
pub mod randomness;

pub use bpmt::{BitSampleMatrix, MomentReport, Verdict};
pub use brht::{BrhtSpec, CompressionProbeResult};
pub use error::{Error, Result};
pub use protocols::{Decision, Partition, PrivateCoins, ProtocolOutcome, Transcript, UserSpec};
pub use randomness::{PublicSeed, RademacherBlockSigns};
