//! Values of finite two-player nonlocal games.
//!
//! The crate computes, exactly where an algorithm exists at desk scale:
//!
//! - classical and synchronous-classical values by exhaustive enumeration
//!   ([`classical`]), including max c-cut and the bipartite double cover;
//! - quantum and synchronous-quantum values of XOR games through a single
//!   optimization kernel, `max Tr(A P)` over the elliptope, solved by
//!   low-rank factorization with a diagonal dual certificate ([`sdp`],
//!   [`xor`]);
//! - quantum max-cut numbers, graph correlation at 1/2, bias and
//!   balancedness analysis, and closed forms for odd cycles ([`xor`]);
//! - verification of first-order, exchange and POVM optimality conditions on
//!   explicit projection-valued strategies ([`strategies`]).
//!
//! Game constructions (colouring games, products, XOR-sums) live in
//! [`game`]; JSON readers for the CLI file formats in [`io`]. All numeric
//! code is generic over the [`Scalar`] floating type; the `*64`/`*32`
//! aliases below fix `f64` (used everywhere in practice) and `f32`.

pub mod classical;
pub mod error;
pub mod game;
pub mod io;
pub mod linalg;
pub mod scalar;
pub mod sdp;
pub mod strategies;
pub mod xor;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Mat64 = linalg::Mat<f64>;
pub type SymMatrix64 = linalg::SymMatrix<f64>;
pub type Spectrum64 = linalg::Spectrum<f64>;
pub type Prior64 = game::PriorDistribution<f64>;
pub type GameInstance64 = game::GameInstance<f64>;
pub type XorGame64 = game::XorGame<f64>;
pub type SdpSolution64 = sdp::SdpSolution<f64>;
pub type BiasReport64 = xor::BiasReport<f64>;
pub type Density64 = strategies::Density<f64>;
pub type PvmFamily64 = strategies::PvmFamily<f64>;
pub type PovmFamily64 = strategies::PovmFamily<f64>;
pub type CMat64 = strategies::CMat<f64>;

pub type SymMatrix32 = linalg::SymMatrix<f32>;
pub type Prior32 = game::PriorDistribution<f32>;
pub type XorGame32 = game::XorGame<f32>;
