//! Inter-tenant device-to-device (D2D) resource sharing in a virtualized,
//! single-cell uplink.
//!
//! The crate models two (or more) tenants that each own a slice of the
//! cell's resource blocks (RBs). Cross-tenant D2D links reuse cellular
//! uplink RBs in underlay mode, and the crate compares four ways of
//! handing RBs to those links:
//!
//! * **inter-tenant optimal**: exact sum-rate maximization over the fused
//!   RB pool of all tenants ([`ilp::solve_exact`]);
//! * **inter-tenant heuristic**: greedy best-SINR rounds alternating between
//!   receiver tenants ([`heuristics::inter_tenant_heuristic`]);
//! * **intra-tenant optimal**: each tenant solves the exact problem on its
//!   own pool for the links its subscribers initiate;
//! * **intra-tenant heuristic**: the greedy rounds, per tenant.
//!
//! [`experiment`] drives seeded Monte Carlo trials and sweeps over them, and
//! [`cli`] wraps it all for the `d2dshare` binary.

pub mod channel;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod heuristics;
pub mod ilp;
pub mod model;
pub mod plot;
pub mod scheduler;

pub use error::{Error, Result};
