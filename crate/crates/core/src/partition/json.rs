use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::Partition;
use crate::error::{Error, Result};
use crate::system::SampleSpace;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub id: usize,
    pub label: String,
    pub members: Vec<usize>,
}

/// Wire form `{"cells": [{"id", "label", "members"}], "space_size"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub cells: Vec<CellDoc>,
    pub space_size: usize,
}

impl PartitionDoc {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidPartition(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    /// Validate against `space` and build the partition. Cell ids must be
    /// distinct; cells are reordered canonically.
    pub fn into_partition(self, space: &Arc<SampleSpace>) -> Result<Partition> {
        if self.space_size != space.len() {
            return Err(Error::InvalidPartition(format!(
                "document describes {} points, space has {}",
                self.space_size,
                space.len()
            )));
        }
        let mut ids: Vec<usize> = self.cells.iter().map(|c| c.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidPartition("duplicate cell id".into()));
        }
        Partition::from_cells(
            space,
            self.cells
                .into_iter()
                .map(|c| (c.members, Some(c.label)))
                .collect(),
        )
    }
}

impl Partition {
    pub fn to_doc(&self) -> PartitionDoc {
        PartitionDoc {
            cells: (0..self.len())
                .map(|c| CellDoc {
                    id: c,
                    label: self.display_label(c),
                    members: self.cell(c).iter().map(|&i| i as usize).collect(),
                })
                .collect(),
            space_size: self.space.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn document_shape() {
        let s = Arc::new(SampleSpace::discrete(3).unwrap());
        let p = Partition::from_labels(&s, &[1, 0, 1]).unwrap();
        let json = serde_json::to_value(p.to_doc()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "cells": [
                    {"id": 0, "label": "A0", "members": [0, 2]},
                    {"id": 1, "label": "A1", "members": [1]}
                ],
                "space_size": 3
            })
        );
    }

    #[test]
    fn rejects_wrong_size_and_overlap() {
        let s = Arc::new(SampleSpace::discrete(3).unwrap());
        let doc = PartitionDoc::parse(r#"{"cells":[{"id":0,"label":"a","members":[0,1,2]}],"space_size":4}"#).unwrap();
        assert!(doc.into_partition(&s).is_err());
        let doc = PartitionDoc::parse(
            r#"{"cells":[{"id":0,"label":"a","members":[0,1]},{"id":1,"label":"b","members":[1,2]}],"space_size":3}"#,
        )
        .unwrap();
        assert!(doc.into_partition(&s).is_err());
        assert!(PartitionDoc::parse("{\"cells\": 3}").is_err());
    }

    proptest! {
        #[test]
        fn documents_round_trip(labels in prop::collection::vec(0usize..5, 1..40)) {
            let s = Arc::new(SampleSpace::discrete(labels.len()).unwrap());
            let p = Partition::from_labels(&s, &labels).unwrap();
            let text = p.to_doc().to_json();
            let back = PartitionDoc::parse(&text).unwrap().into_partition(&s).unwrap();
            prop_assert_eq!(back.to_doc(), p.to_doc());
        }
    }
}
