use serde::{Deserialize, Serialize};

use super::{FiniteLattice, LatticeElement};
use crate::error::{Error, Result};
use crate::system::EpistemicState;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub id: usize,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<usize>>,
}

/// Wire form `{"elements": [{"id", "label", "members"?}], "leq": [[bool]], "ortho": [int]?}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDoc {
    pub elements: Vec<ElementDoc>,
    pub leq: Vec<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ortho: Option<Vec<usize>>,
}

impl LatticeDoc {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidLattice(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    /// Validate and build. Element ids must be `0..n` in order.
    pub fn into_lattice(self) -> Result<FiniteLattice> {
        if let Some((i, e)) = self.elements.iter().enumerate().find(|(i, e)| e.id != *i) {
            return Err(Error::InvalidLattice(format!(
                "element at position {i} has id {}",
                e.id
            )));
        }
        let elements = self
            .elements
            .into_iter()
            .map(|e| {
                let members = match e.members {
                    None => None,
                    Some(m) => {
                        let bound = m.iter().max().map_or(0, |&x| x + 1);
                        Some(EpistemicState::new(bound, m)?)
                    }
                };
                Ok(LatticeElement {
                    label: e.label,
                    members,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        FiniteLattice::new(elements, &self.leq, self.ortho)
    }
}

impl FiniteLattice {
    pub fn to_doc(&self) -> LatticeDoc {
        LatticeDoc {
            elements: self
                .elements()
                .iter()
                .enumerate()
                .map(|(id, e)| ElementDoc {
                    id,
                    label: e.label.clone(),
                    members: e.members.as_ref().map(|s| s.members().to_vec()),
                })
                .collect(),
            leq: self.leq_matrix(),
            ortho: self.ortho_map().map(<[usize]>::to_vec),
        }
    }
}
