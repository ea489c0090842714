//! Equilibrium analysis of a duopoly price-search market in which consumers
//! learn prices either by costly sequential search or by word of mouth from
//! friends in a random social network.
//!
//! # Model
//!
//! Two firms sell a homogeneous good of value `v` to a unit mass of
//! consumers. Each period a consumer may pay `s` to observe one price, or
//! wait one period (discounting by `delta`) and ask their friends; a friend
//! who searched reports the price they saw. Friend counts are drawn from a degree
//! distribution `t(k)` on `1..=kmax`, summarised by its probability
//! generating function. In a symmetric equilibrium a fraction `q` of
//! consumers searches immediately and firms mix over prices on
//! `[p_lo, p_hi]` according to an equal-profit price law indexed by a single
//! markup ratio `eta` (mass of captive buyers relative to price comparers).
//!
//! The crate computes, for a given network and market parameters:
//!
//! * the candidate price law and its moments ([`pricing`]),
//! * all interior search equilibria, their stability, and the search-cost
//!   threshold below which they exist ([`eq_baseline`]),
//! * the full-diffusion benchmark, purchase-threshold and diffusion-depth
//!   diagnostics ([`eq_variants`]),
//! * cutoff equilibria when consumers know their own degree ([`eq_asym`]),
//! * Monte Carlo estimates of payoffs, prices paid, and firm profits that
//!   verify the analytic solution ([`simulate`]).
//!
//! # Randomness
//!
//! Simulations use a counter-based ChaCha8 generator with one stream per
//! replication, so runs are bit-identical for a fixed seed regardless of
//! thread count.

pub mod eq_asym;
pub mod eq_baseline;
pub mod eq_variants;
mod error;
pub mod network;
pub mod pricing;
mod roots;
pub mod simulate;
pub mod textio;

pub use eq_asym::{AsymEquilibrium, AsymRegime};
pub use eq_baseline::Equilibrium;
pub use error::{Error, Result};
pub use network::DegreeDistribution;
pub use pricing::{MarketParams, PriceLaw};
pub use simulate::{SimConfig, SimReport};
