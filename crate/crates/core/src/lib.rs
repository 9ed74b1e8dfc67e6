//! Graph neural networks, 1-WL color refinement and computable
//! VC-dimension bounds for message-passing models.
//!
//! The crate is organised bottom-up: [`graph`] and [`tud_io`] hold data,
//! [`wl`] refines colors, [`pfaffian`] and [`bounds`] evaluate the
//! theoretical bounds, [`gnn`] trains the model and [`harness`] runs the
//! experiment sweeps.

pub mod bounds;
pub mod gnn;
pub mod graph;
pub mod harness;
pub mod par;
pub mod pfaffian;
pub mod tud_io;
pub mod wl;

pub use graph::{AttributeMatrix, AttributeMode, Dataset, Graph, GraphError};
pub use par::Execution;
pub use pfaffian::{Activation, PfaffianFormat};
