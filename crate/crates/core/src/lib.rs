//! Correlation dynamics of two coupled harmonic oscillators under local
//! pure-dephasing baths.
//!
//! The state is evolved on the conserved-charge ladder ([`ladder`],
//! [`evolve`]), cross-checked against the full tensor-product master
//! equation ([`full`]) and closed forms ([`analytic`]), and analysed with
//! the measures in [`measures`]. [`experiments`] holds the scenario
//! registry and scaling fits; [`cli`] is the command-line front end.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod cli;
pub mod error;
pub mod evolve;
pub mod experiments;
pub mod full;
pub mod ladder;
pub mod linops;
pub mod measures;

pub use error::{Error, Result};

// the book's code listings run as doctests
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/ladder.md")]
    mod ladder {}
    #[doc = include_str!("../../../book/src/dephasing.md")]
    mod dephasing {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/closed_forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
