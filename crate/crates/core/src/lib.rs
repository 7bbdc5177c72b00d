//! Compact hyperbolic Coxeter polytopes through their Coxeter diagrams:
//! classification of diagrams, verification with recovery of unknown facet
//! distances, enumeration of polytopes with few pairs of disjoint facets,
//! explicit bounds, and dissection/doubling tools for essentiality questions.

pub mod bounds;
pub mod canon;
pub mod classify;
pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod essential;
pub mod linalg;
pub mod localdet;
pub mod numeric;
pub mod polytope;

pub use diagram::{parse_cox, parse_diagram, CoxDocument, Diagram, EdgeLabel, GramView, SignatureReport};
pub use error::{Error, Result};
