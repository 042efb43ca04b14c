//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

pub mod ci;
pub mod dense;
pub mod fock;
pub mod ints;
pub mod overlap;
