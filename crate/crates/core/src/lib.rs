//! Rigidity-matroid rank oracles, matroid partition, degree-specified
//! orientations and exact connectivity checks for building and certifying
//! packings of rigid spanning subgraphs and k-connected orientations.

pub mod connectivity;
pub mod constructions;
pub mod ff;
pub(crate) mod flow;
pub mod graph;
pub mod matroid;
pub mod orientation;
pub mod rigidity;
pub mod stochastic;
pub mod stream;

pub use connectivity::{is_k_connected, vertex_connectivity_pair, CutCertificate};
pub use graph::{ArcSet, Digraph, EdgeId, Graph, GraphError, VertexOrdering};
pub use matroid::{pack_rigid, pack_tree_rigid, partition, IndependenceOracle, MatroidPartition};
pub use orientation::{hakimi_orientation, k_connected_orientation, DegreeSpec, RSet};
pub use rigidity::{complete_rank, RigidityOracle};
pub use stream::SeededStream;
