//! Multistationarity analysis for chemical reaction networks with poly-PL
//! kinetics.
//!
//! The pipeline is: build a [`network::Network`] with
//! [`kinetics::PolyPLKinetics`], convert it to a dynamically equivalent
//! power-law system with [`star::star_msc`], then run [`msa::run_msa`] on the
//! result and carry the verdict back with [`msa::pyk_verdict`].

pub mod decomposition;
pub mod generate;
pub mod kinetics;
pub mod linalg;
pub mod msa;
pub mod network;
pub mod star;

pub use linalg::{RatMatrix, RatVector, Rational};
pub use network::{Complex, Network, NetworkNumbers};
