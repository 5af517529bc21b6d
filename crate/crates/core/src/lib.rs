//! Exact computation of coding-function reductions, fixed points and
//! (linear, strict) guessing numbers of small digraphs, with the network
//! coding constructions built on them.

pub mod coding;
pub mod constructions;
pub mod digraph;
pub mod error;
pub mod guessing;
pub mod instance;
pub mod io;
pub mod limits;
pub mod linear;
mod par;

pub use coding::{min_net, mindim, CodingFunction, CumulativeFn, FixedPointSet};
pub use constructions::{named, Family, GkVariant, NamedGraph};
pub use digraph::{CompatMode, Digraph, GraphParams, Reduced};
pub use error::{Error, Result};
pub use guessing::{GuessKind, GuessingReport, Method, TableFilter};
pub use instance::UnicastInstance;
pub use io::{Diagnostic, Document, Format, Parsed};
pub use limits::Limits;
pub use linear::{LinearCodingFunction, LinearMode, LinearVerdict, WeakCompatVerdict};
