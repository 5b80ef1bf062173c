use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Default accepted header names per logical column. The first name is the
/// canonical one used when writing tables.
const DEFAULTS: &[(&str, &[&str])] = &[
    ("patents.id", &["patent_id", "id", "number"]),
    ("patents.date", &["patent_date", "date", "grant_date"]),
    ("patents.type", &["patent_type", "type", "kind"]),
    ("citations.citing", &["patent_id", "citing_id"]),
    ("citations.cited", &["citation_patent_id", "citation_id", "cited_id"]),
    ("app_citations.citing", &["patent_id", "citing_id"]),
    (
        "app_citations.cited",
        &["citation_document_number", "application_id", "citation_id", "cited_id", "number"],
    ),
    ("app_citations.date", &["citation_date", "date"]),
    ("app_grants.application", &["application_id", "document_number"]),
    ("app_grants.grant", &["patent_id", "grant_id"]),
    ("app_grants.grant_date", &["patent_date", "grant_date"]),
    ("app_grants.pub_date", &["application_pub_date", "pub_date", "application_date"]),
    ("wipo.patent", &["patent_id"]),
    ("wipo.field", &["wipo_field_id", "field_id"]),
    ("exogenous.id", &["patent_id", "id"]),
    ("exogenous.date", &["patent_date", "date"]),
];

/// Maps logical columns (`"patents.date"`, ...) to accepted header names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    names: BTreeMap<String, Vec<String>>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            names: DEFAULTS
                .iter()
                .map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect()))
                .collect(),
        }
    }
}

impl ColumnMap {
    pub fn names(&self, logical: &str) -> &[String] {
        self.names.get(logical).map_or(&[], |v| v.as_slice())
    }

    pub fn canonical(&self, logical: &str) -> &str {
        self.names(logical).first().map_or("", |s| s.as_str())
    }

    /// Makes `header` the preferred name for `logical`.
    pub fn set(&mut self, logical: &str, header: &str) -> Result<()> {
        let names = self.names.get_mut(logical).ok_or_else(|| {
            Error::Config(format!(
                "unknown logical column `{logical}`; known: {}",
                DEFAULTS.iter().map(|(k, _)| *k).collect::<Vec<_>>().join(", ")
            ))
        })?;
        names.retain(|n| n != header);
        names.insert(0, header.to_string());
        Ok(())
    }

    /// Applies a `logical=header` override.
    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        let (logical, header) = spec
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("column override `{spec}` is not logical=header")))?;
        self.set(logical.trim(), header.trim())
    }

    pub fn logical_columns() -> impl Iterator<Item = &'static str> {
        DEFAULTS.iter().map(|(k, _)| *k)
    }
}
