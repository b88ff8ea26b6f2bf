//! Table-to-text rendering with schema units.

use super::intent::IntentCategory;
use crate::cypher::{ResultTable, Value};
use crate::domain::SchemaDescriptor;

pub const REJECTION: &str = "Sorry, the current knowledge graph does not support this type of query.";
pub const NO_RESULTS: &str = "No matching records found in the knowledge graph.";

fn property_of(column: &str) -> &str {
    column.rsplit_once('.').map_or(column, |(_, p)| p)
}

/// Column label without the variable prefix or the unit suffix. Name
/// columns are labelled by the kind of entity they name.
fn column_label<'a>(column: &'a str, unit: Option<&str>) -> &'a str {
    let prop = property_of(column);
    if prop == "name" && prop != column {
        let var = column.split('.').next().unwrap_or("").trim_end_matches(|c: char| c.is_ascii_digit());
        return match var {
            "m" => "material",
            "f" => "family",
            "p" => "process",
            "fs" => "feedstock",
            "ft" => "fusion technique",
            "pp" => "post-processing",
            _ => prop,
        };
    }
    let suffix = match unit {
        Some("mm") => "_mm",
        Some("cc/hr") => "_cc_hr",
        _ => return prop,
    };
    prop.strip_suffix(suffix).unwrap_or(prop)
}

fn cell(value: &Value, unit: Option<&str>) -> Option<String> {
    match value {
        Value::Null => None,
        Value::List(items) if items.is_empty() => None,
        v => Some(match unit {
            Some(u) => format!("{v} {u}"),
            None => v.to_string(),
        }),
    }
}

/// Renders an executed table: one bullet per row, a `label: value` line for a
/// lone scalar, or the no-results sentence.
pub fn format_response(intent: IntentCategory, table: &ResultTable, schema: &SchemaDescriptor) -> String {
    if intent == IntentCategory::Unsupported {
        return REJECTION.to_string();
    }
    if table.rows.is_empty() {
        return NO_RESULTS.to_string();
    }
    let units: Vec<Option<&str>> = table.columns.iter().map(|c| schema.unit_of(property_of(c))).collect();
    if let ([column], [row]) = (table.columns.as_slice(), table.rows.as_slice()) {
        if !matches!(row[0], Value::Text(_) | Value::List(_)) {
            let value = cell(&row[0], units[0]).unwrap_or_else(|| "none".into());
            return format!("{}: {value}", column_label(column, units[0]));
        }
    }
    let mut lines = Vec::with_capacity(table.rows.len());
    for row in &table.rows {
        let head = cell(&row[0], units[0]).unwrap_or_else(|| "none".into());
        let rest: Vec<String> = row
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(i, v)| cell(v, units[i]).map(|c| format!("{}: {c}", column_label(&table.columns[i], units[i]))))
            .collect();
        if rest.is_empty() {
            lines.push(format!("- {head}"));
        } else {
            lines.push(format!("- {head} ({})", rest.join(", ")));
        }
    }
    lines.join("\n")
}
