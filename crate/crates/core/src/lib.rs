//! Decision support for metal additive manufacturing over an embedded
//! knowledge graph.
//!
//! - [`graph`]: the property graph store
//! - [`cypher`]: the read-only query language
//! - [`domain`]: the metal-AM schema, seed dataset, and graph construction
//! - [`nl`]: natural-language question answering on top of the above

pub mod cypher;
pub mod domain;
pub mod graph;
pub mod nl;
