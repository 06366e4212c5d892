//! Curated list of catalog cells the computation contradicts. Hard checks
//! consult it so accepted disagreements stay visible without failing runs.

use serde::{Deserialize, Serialize};

use crate::analysis::{DiscrepancyKind, DiscrepancyRecord};

pub const EMBEDDED: &str = include_str!("../data/known-discrepancies.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownEntry {
    pub case: String,
    pub kind: String,
    pub item: String,
    pub note: String,
    /// Command line that reproduces the disagreement.
    pub reproduce: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnownDiscrepancies {
    pub schema: u32,
    pub entries: Vec<KnownEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum KnownError {
    #[error("malformed known-discrepancies file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported known-discrepancies schema {0}")]
    Schema(u32),
    #[error("entry for case {case} has unknown kind '{kind}'")]
    Kind { case: String, kind: String },
}

impl KnownDiscrepancies {
    pub fn parse(src: &str) -> Result<Self, KnownError> {
        let k: Self = serde_json::from_str(src)?;
        if k.schema != 1 {
            return Err(KnownError::Schema(k.schema));
        }
        for e in &k.entries {
            if DiscrepancyKind::parse(&e.kind).is_none() {
                return Err(KnownError::Kind {
                    case: e.case.clone(),
                    kind: e.kind.clone(),
                });
            }
        }
        Ok(k)
    }

    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded known-discrepancies file is valid")
    }

    pub fn contains(&self, case: &str, record: &DiscrepancyRecord) -> bool {
        self.entries
            .iter()
            .any(|e| e.case == case && e.kind == record.kind.name() && e.item == record.item)
    }

    pub fn has_kind(&self, kind: DiscrepancyKind) -> bool {
        self.entries.iter().any(|e| e.kind == kind.name())
    }
}

/// Relations, the determinant header and the two dimensions decide a run;
/// patterns and coefficient cells are reported only.
pub fn is_hard(kind: DiscrepancyKind) -> bool {
    matches!(kind, DiscrepancyKind::Relation | DiscrepancyKind::DimR | DiscrepancyKind::DimI)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_file_parses() {
        let k = KnownDiscrepancies::embedded();
        assert_eq!(k.schema, 1);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(KnownDiscrepancies::parse("{").is_err());
        assert!(matches!(
            KnownDiscrepancies::parse(r#"{"schema": 2, "entries": []}"#),
            Err(KnownError::Schema(2))
        ));
        let bad = r#"{"schema": 1, "entries": [{"case": "1.1", "kind": "typo", "item": "x", "note": "", "reproduce": ""}]}"#;
        assert!(matches!(KnownDiscrepancies::parse(bad), Err(KnownError::Kind { .. })));
    }

    #[test]
    fn matching_uses_case_kind_and_item() {
        let k = KnownDiscrepancies::parse(
            r#"{"schema": 1, "entries": [{"case": "1.1", "kind": "pattern", "item": "R(1,4)", "note": "", "reproduce": ""}]}"#,
        )
        .unwrap();
        let rec = DiscrepancyRecord {
            kind: DiscrepancyKind::Pattern,
            item: "R(1,4)".into(),
            expected: String::new(),
            computed: String::new(),
            residual: 0.0,
        };
        assert!(k.contains("1.1", &rec));
        assert!(!k.contains("1.2", &rec));
        assert!(k.has_kind(DiscrepancyKind::Pattern));
        assert!(!k.has_kind(DiscrepancyKind::DimR));
    }
}
