use std::fmt;

use serde::{Deserialize, Serialize};

/// One scoring configuration: which fairness notion and its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "notion", rename_all = "snake_case")]
pub enum FairnessConfig {
    Individual { hops: usize },
    Group { k: usize, attribute: String, value: String },
}

impl fmt::Display for FairnessConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FairnessConfig::Individual { hops } => write!(f, "individual(hops={hops})"),
            FairnessConfig::Group { k, attribute, value } => {
                write!(f, "group(k={k}, {attribute}={value})")
            }
        }
    }
}
