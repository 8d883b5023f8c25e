//! Core algorithms for the virus spread-performance-cost (VSPC) network
//! formation game.
//!
//! Every player is a node that pays `alpha` per link it installs, `gamma` per
//! hop on its shortest paths to everyone else, and its NIMFA SIS metastable
//! infection probability. This crate holds the pure computations:
//!
//! * [`graph`]: bitmask-row graphs, BFS hopcounts, spectral radius, and
//!   exhaustive generators for labeled trees and connected graphs.
//! * [`epidemic`]: the NIMFA fixed point, the epidemic threshold, and an
//!   explicit-Euler integrator of the SIS ODE used as a cross-check.
//! * [`game`]: ownership profiles, player and social costs, exact Nash
//!   verification and the drop/add best-response dynamics.
//! * [`analysis`]: exhaustive optima, price of anarchy/stability, closed-form
//!   costs, regime classification and structural bounds.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled.
#![cfg_attr(not(feature = "std"), no_std)]
// Guards are written `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod epidemic;
mod error;
pub mod game;
pub mod graph;

pub use error::{Error, Result};
pub use graph::{Graph, HopcountTable};
