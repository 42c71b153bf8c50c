//! Differentially private releases of power-system data.
//!
//! [`wpo`] publishes a synthetic wind power curve dataset whose ridge fit
//! tracks the real one. [`tco`] publishes transmission line capacities that
//! keep a population of public OPF instances near their real-capacity costs.
//! Both spend their budget through the mechanisms in [`dp`] and carry the
//! resulting [`dp::PrivacyLedger`].

pub mod dp;
pub mod error;
pub mod opf;
pub mod regression;
pub mod tco;
pub mod wpo;

pub use error::{Error, Result};
