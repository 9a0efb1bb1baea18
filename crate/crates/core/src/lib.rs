//! Gossip networks with degrading updates, analysed through first-passage
//! percolation on an auxiliary graph.
//!
//! The simulator in [`simulate`] runs the gossip process directly. The
//! percolation oracle in [`percolation`] predicts its long-run quality and
//! age, and [`analysis`] compares the two.

pub mod analysis;
pub mod chains;
pub mod error;
pub mod percolation;
pub mod seed;
pub mod simulate;
pub mod stats;
pub mod topology;

pub use chains::{ChainSpec, DegradationChain, StateDistribution, FALSE, TRUE};
pub use error::{Error, Result};
pub use percolation::{
    HopcountEstimate, NodeSelection, PassageTimeEstimate, PercolationSample, RandomBall, SourceTree,
};
pub use seed::SeedStream;
pub use simulate::{AcceptanceRule, SimulationConfig, SimulationOutput, NOT_REACHED};
pub use topology::{Arc, AuxiliaryGraph, Family, GossipNetwork, NodeId, SOURCE};
