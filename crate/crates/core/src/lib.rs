//! The m-gonal numeration system.
//!
//! For a bin size `m >= 1` the m-gonal sequence is `a_0 = 1` followed by
//! bins of `m` terms, bin `b_{k+1}` holding `2r(m+1)^k` for `r = 1..=m`.
//! Every non-negative integer has exactly one decomposition into distinct
//! terms using at most one term per bin.
//!
//! * [`seqcore`]: terms, bins, encoding and decoding.
//! * [`exact`]: exact summand-count distributions, moments and gap
//!   probabilities.
//! * [`oracle`]: brute-force enumeration used as independent ground truth.
//! * [`mc`]: seeded, chunk-parallel Monte Carlo experiments.
//! * [`cli`]: the `mgonal` command-line front end.

pub mod cli;
mod error;
pub mod exact;
pub mod exec;
pub mod mc;
pub mod oracle;
pub mod seqcore;

pub use error::{Error, Result};
pub use exec::Execution;
pub use seqcore::{
    bin_of, decompose, decompose_greedy, gaps_of, is_legal, omega, recompose, sequence_prefix,
    term, BinIndex, Decomposition, DigitVector, GapMultiset, MGonParams, SeqIndex,
};
