//! Covert and secure power allocation for two-phase untrusted
//! amplify-and-forward relaying.
//!
//! A multi-antenna source reaches a destination through an untrusted relay
//! while one or more wardens ("Willies") run energy detectors. The
//! destination jams the relay in the first phase and the source jams in the
//! second; the power split between data and jamming is chosen to maximize
//! the secrecy rate subject to a covertness constraint on every warden.
//!
//! Modules, bottom up:
//! - [`channel`]: geometry, path loss and Rayleigh channel sampling.
//! - [`link`]: SINRs and secrecy rates of the relayed link.
//! - [`detection`]: the wardens' radiometer and the covert box.
//! - [`allocation`]: the successive convex approximation solver, oracles and
//!   relay selection.
//! - [`direct`]: direct transmission with null-space artificial noise.

pub mod allocation;
pub mod channel;
pub mod detection;
pub mod direct;
pub mod error;
pub mod link;
pub mod numeric;

pub use channel::{
    link_variances, sample_channels, ChannelRealization, HopVariances, LinkVariances, Point,
    SystemParams, Topology, WillieLinks,
};
pub use detection::{CovertBox, DetectionOutcome, Phase, PhaseScales};
pub use error::{Error, Result};
pub use link::{Hypothesis, LinkGains, PowerSplit, SinrMode};
