//! Massively parallel GRAND decoding for 5G NR polar codes over M-QAM.
//!
//! * [`gf2`]: packed GF(2) matrices, RREF and null spaces.
//! * [`polar`]: NR polar codes from the universal reliability sequence.
//! * [`qam`]: square M-QAM with Gray labels, symbol likelihood and
//!   near-neighbour candidates.
//! * [`channel`]: AWGN at complex baseband, in lattice units.
//! * [`pmult`]: the step-counted parallel syndrome multiplication and its
//!   gate-cost model.
//! * [`grand`]: the decoder.
//! * [`sim`]: seeded Monte Carlo BLER campaigns and CSV/JSON output.

pub mod channel;
pub mod error;
pub mod gf2;
pub mod grand;
pub mod pmult;
pub mod polar;
pub mod qam;
pub mod reference;
pub mod sim;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use grand::{decode, latency_model, DecodeOutcome, DecodeResult, Decoder, SyndromeEngine, TestErrorPattern};
pub use pmult::{pmult, GateCostReport, RowIndexSets};
pub use polar::{PolarCode, ReliabilitySequence};
pub use qam::{Constellation, Point, ReceivedSymbol};
