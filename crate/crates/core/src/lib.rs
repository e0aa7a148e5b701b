#![allow(clippy::neg_cmp_op_on_partial_ord)]
//! Multihop underwater optical wireless network simulator.

pub mod config;
pub mod error;
pub mod geom;
pub mod link_budget;
pub mod lipar;
pub mod plot;
pub mod pointing;
pub mod relay_af;
pub mod relay_df;
pub mod routing;
pub mod sim;
pub mod special;
pub mod water;

pub use error::{Error, Result};
