//! Separation systems, tree sets, and their correspondences with graph
//! trees, order trees, bipartitions, S-trees and tree decompositions.

pub mod bipart;
pub mod gen;
pub mod graphdecomp;
pub mod json;
pub mod orderbridge;
pub mod orient;
pub mod stree;
pub mod system;
pub mod treebridge;

pub use system::{Members, SeparationSystem, SystemError};
