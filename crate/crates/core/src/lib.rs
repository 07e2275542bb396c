//! Symmetries of multicore architectures and task graphs, and their use for
//! deduplicating task-to-processor mappings in design-space exploration.

pub mod archgraph;
pub mod autos;
pub mod error;
pub mod dse;
pub mod exec;
pub mod fixtures;
pub mod grp;
pub mod io;
pub mod isg;
pub mod mapping;
pub mod perm;

pub use archgraph::{derive_architecture_graph, ArchitectureGraph, EdgeLabel, TopologyGraph};
pub use error::{Error, Result};
pub use exec::Exec;
pub use grp::{PermutationGroup, ProductGroup};
pub use isg::InverseSemigroup;
pub use mapping::{Mapping, TaskGraph, TaskSymmetry};
pub use perm::{PartialPermutation, Permutation, PointSet};
