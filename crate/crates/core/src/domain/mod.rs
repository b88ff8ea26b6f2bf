//! Metal AM domain: seed format, ingestion, validation, graph construction,
//! and the schema descriptor.

mod build;
mod report;
mod schema;
mod seed;

pub use build::{build_graph, export_dataset, labels, rels, ExportError, PROCESS_QUANTITIES};
pub use report::{validate_dataset, Counts, ValidationReport, Violation};
pub use schema::{
    schema_summary, unit_for, LabelSchema, PropertyKind, PropertySchema, RelationshipSchema, SchemaDescriptor,
};
pub use seed::{
    load_seed, load_seed_file, shipped_dataset, CompatibilityRecord, DomainDataset, Family, FeedstockKind,
    FeedstockSpec, FusionTechniqueSpec, IntegrityIssue, LoadError, MaterialSpec, PostProcessSpec, ProcessSpec,
    StateSpec, StateTransition, SHIPPED_SEED,
};
