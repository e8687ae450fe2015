//! Fairness auditing for graph embeddings.
//!
//! Given a graph, one or more node embeddings, and categorical node attributes,
//! this crate scores every node for individual fairness (embedding distance to
//! its k-hop neighborhood) and group fairness (label balance of its top-k
//! link recommendations), and precomputes those tables together with a
//! network summary, a spring layout, and a PCA projection into one JSON
//! artifact per dataset.

pub mod config;
pub mod embedding;
pub mod error;
pub mod graph;
pub mod group;
pub mod individual;
pub mod layout;
pub mod pipeline;
pub mod summary;

pub use config::FairnessConfig;
pub use embedding::{dot_similarity, pca_project, sq_euclidean, EmbeddingMatrix, Extents, Projection2D};
pub use error::{Error, Result};
pub use graph::{compare_ids, Graph, GraphBuilder, Neighborhood, NodeSet, Subgraph};
pub use group::{
    attribute_bias, attribute_bias_from_lists, group_score_table, group_score_table_from_lists, network_bias,
    network_bias_from_lists, recommended_set, recommended_sets, restricted_set, share, user_score, AttributeTable,
    GroupRate, GroupScoreTable, NetworkBias, RecommendationList,
};
pub use individual::{individual_score, individual_score_table, IndividualScoreTable};
pub use layout::{filter_salient_edges, spring_layout, Layout};
pub use summary::{summarize, SummaryReport};
