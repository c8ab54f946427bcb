//! secidx: construction, verification, and minimization of perfectly secure
//! index codes over prime fields.
//!
//! A sender broadcasts one public codeword to `t` receivers; receiver `i`
//! wants message `M_i`, already knows the messages in its side-information
//! set, and shares a common key `K` and a private key `K_i` with the sender.
//! An eavesdropper sees the codeword and must learn nothing about the
//! messages. This crate provides:
//!
//! - exact GF(p) linear algebra ([`field`]),
//! - the problem-instance and rate-vector vocabulary ([`problem`]),
//! - conventional (non-secret) index coding searches, including exhaustive
//!   min-rank computation ([`conventional`]),
//! - exact verifiers for zero-error decoding and for perfect / strong / weak
//!   secrecy ([`secure`]),
//! - the generalized one-time-pad construction of secure codes from
//!   conventional ones ([`gotp`]),
//! - the reduction of a linear secure code matrix to standard form and the
//!   extraction of its underlying conventional code ([`linreduce`]),
//! - a command-line front end ([`cli`], `secidx` binary).
//!
//! Every secrecy verdict is computed with exact rational arithmetic; the
//! only floating point in the crate is the logarithm inside the
//! mutual-information metric, which is reported together with an error
//! bound.
//!
//! Start with the examples: each one is a runnable walkthrough of a single
//! capability (`cargo run --example shannon_pad`, `--example xor_broadcast`,
//! and so on).

// index arithmetic over matrix cells reads better as plain loops
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod conventional;
pub mod field;
pub mod gotp;
pub mod linreduce;
pub mod problem;
pub mod secure;

use thiserror::Error;

/// Default cap on exhaustive message-tuple enumeration for conventional
/// zero-error verification.
pub const DEFAULT_VERIFY_CAP: u64 = 1 << 24;

/// Default cap on exhaustive input enumeration (messages x keys x encoder
/// randomness) for secrecy verification.
pub const DEFAULT_SECURE_CAP: u64 = 1 << 26;

/// Default cap on nodes visited by combinatorial code searches.
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 28;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u16, right: u16 },
    #[error("{0} is not a supported modulus (need a prime below 2^16)")]
    InvalidModulus(u64),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("enumeration of {needed} items exceeds the cap of {cap}; raise SECIDX_CAP or --cap")]
    CapExceeded { needed: u128, cap: u64 },
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("security violation: row {row} combines message symbols only")]
    SecurityViolation { row: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Guard helper shared by the exhaustive loops: `needed` enumerated items
/// against a cap.
pub(crate) fn check_cap(needed: u128, cap: u64) -> Result<()> {
    if needed > cap as u128 {
        Err(Error::CapExceeded { needed, cap })
    } else {
        Ok(())
    }
}

/// p^e as u128 with overflow detection folded into the cap guard later.
pub(crate) fn pow_u128(p: u16, e: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..e {
        acc = acc.saturating_mul(p as u128);
    }
    acc
}
