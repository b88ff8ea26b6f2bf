//! Schema descriptor: labels, properties with units, relationship endpoints,
//! and entity names. Consumed by query validation, prompts, and formatting.

use serde::{Deserialize, Serialize};

use super::build::{labels, rels, PROCESS_QUANTITIES};
use super::seed::DomainDataset;
use crate::cypher::SchemaCatalog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    Text,
    Number,
    TextList,
}

impl PropertyKind {
    pub fn name(self) -> &'static str {
        match self {
            PropertyKind::Text => "text",
            PropertyKind::Number => "number",
            PropertyKind::TextList => "text list",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertySchema {
    pub name: String,
    pub kind: PropertyKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSchema {
    pub label: String,
    pub properties: Vec<PropertySchema>,
    pub entities: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationshipSchema {
    pub rel_type: String,
    pub from_label: String,
    pub to_label: String,
    pub properties: Vec<PropertySchema>,
}

/// Everything sorted alphabetically so that renderings are deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemaDescriptor {
    pub labels: Vec<LabelSchema>,
    pub relationships: Vec<RelationshipSchema>,
}

pub fn unit_for(property: &str) -> Option<&'static str> {
    if property == "deposition_rate_cc_hr" {
        Some("cc/hr")
    } else if property.ends_with("_mm") {
        Some("mm")
    } else {
        None
    }
}

fn prop(name: &str, kind: PropertyKind) -> PropertySchema {
    PropertySchema { name: name.to_string(), kind, unit: unit_for(name).map(str::to_string) }
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v.dedup();
    v
}

pub fn schema_summary(d: &DomainDataset) -> SchemaDescriptor {
    use labels::*;
    use PropertyKind::*;

    let name_only = || vec![prop("name", Text)];
    let mut process_props = vec![prop("abbreviation", Text), prop("name", Text)];
    process_props.extend(PROCESS_QUANTITIES.iter().map(|k| prop(k, Number)));

    let mut label_list = vec![
        LabelSchema {
            label: MATERIAL.into(),
            properties: vec![prop("name", Text), prop("synonyms", TextList)],
            entities: sorted(d.materials.iter().map(|m| m.name.clone()).collect()),
        },
        LabelSchema {
            label: FAMILY.into(),
            properties: name_only(),
            entities: sorted(d.families().iter().map(|f| f.name().to_string()).collect()),
        },
        LabelSchema {
            label: PROCESS.into(),
            properties: process_props,
            entities: sorted(d.processes.iter().map(|p| p.name.clone()).collect()),
        },
        LabelSchema {
            label: FEEDSTOCK.into(),
            properties: vec![prop("name", Text), prop("size_note", Text)],
            entities: sorted(d.feedstocks.iter().map(|f| f.name.name().to_string()).collect()),
        },
        LabelSchema {
            label: FUSION.into(),
            properties: name_only(),
            entities: sorted(d.fusion_techniques.iter().map(|f| f.name.clone()).collect()),
        },
        LabelSchema {
            label: POST.into(),
            properties: name_only(),
            entities: sorted(d.post_processing.iter().map(|p| p.name.clone()).collect()),
        },
        LabelSchema {
            label: STATE.into(),
            properties: name_only(),
            entities: sorted(d.states.iter().map(|s| s.name.clone()).collect()),
        },
    ];
    for l in &mut label_list {
        l.properties.sort_by(|a, b| a.name.cmp(&b.name));
    }
    label_list.sort_by(|a, b| a.label.cmp(&b.label));

    let rel = |t: &str, from: &str, to: &str, properties: Vec<PropertySchema>| RelationshipSchema {
        rel_type: t.into(),
        from_label: from.into(),
        to_label: to.into(),
        properties,
    };
    let mut relationships = vec![
        rel(rels::BELONGS_TO, MATERIAL, FAMILY, vec![]),
        rel(rels::PRINTABLE_BY, MATERIAL, PROCESS, vec![]),
        rel(rels::USES_FEEDSTOCK, PROCESS, FEEDSTOCK, vec![]),
        rel(rels::USES_FUSION, PROCESS, FUSION, vec![]),
        rel(rels::REQUIRES_POST, PROCESS, POST, vec![]),
        rel(rels::TRANSITIONS_TO, STATE, STATE, vec![prop("via_step", Text)]),
        rel(rels::VIA_STEP, STATE, POST, vec![]),
    ];
    relationships.sort_by(|a, b| a.rel_type.cmp(&b.rel_type));
    SchemaDescriptor { labels: label_list, relationships }
}

impl SchemaDescriptor {
    pub fn label(&self, label: &str) -> Option<&LabelSchema> {
        self.labels.iter().find(|l| l.label == label)
    }

    pub fn relationship(&self, rel_type: &str) -> Option<&RelationshipSchema> {
        self.relationships.iter().find(|r| r.rel_type == rel_type)
    }

    pub fn entities(&self, label: &str) -> &[String] {
        self.label(label).map(|l| l.entities.as_slice()).unwrap_or(&[])
    }

    /// Unit of a property on any label, if it carries one.
    pub fn unit_of(&self, property: &str) -> Option<&str> {
        self.labels
            .iter()
            .flat_map(|l| &l.properties)
            .find(|p| p.name == property)
            .and_then(|p| p.unit.as_deref())
    }

    /// Label whose entity list contains `name`, first in alphabetical label order.
    pub fn label_of_entity(&self, name: &str) -> Option<&str> {
        self.labels
            .iter()
            .find(|l| l.entities.iter().any(|e| e == name))
            .map(|l| l.label.as_str())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }
}

impl SchemaCatalog for SchemaDescriptor {
    fn has_label(&self, label: &str) -> bool {
        self.label(label).is_some()
    }

    fn has_rel_type(&self, rel_type: &str) -> bool {
        self.relationship(rel_type).is_some()
    }

    fn label_has_property(&self, label: &str, key: &str) -> bool {
        self.label(label).is_some_and(|l| l.properties.iter().any(|p| p.name == key))
    }

    fn rel_has_property(&self, rel_type: &str, key: &str) -> bool {
        self.relationship(rel_type).is_some_and(|r| r.properties.iter().any(|p| p.name == key))
    }

    fn any_label_has_property(&self, key: &str) -> bool {
        self.labels.iter().any(|l| l.properties.iter().any(|p| p.name == key))
    }

    fn any_rel_has_property(&self, key: &str) -> bool {
        self.relationships.iter().any(|r| r.properties.iter().any(|p| p.name == key))
    }
}
