//! Exact nearest-neighbor search over divisive cluster trees.
//!
//! A [`Tree`] is built by recursively splitting a [`Dataset`] around two
//! poles until every leaf holds a single point (or duplicates of one point).
//! Search algorithms then use the triangle inequality on cluster centers and
//! radii to skip whole subtrees. When the data lie on a manifold of low local
//! fractal dimension, the work per query grows far slower than the
//! cardinality of the dataset.
//!
//! The main entry points are:
//!
//! * [`metrics`]: the distance functions and the [`Metric`] trait.
//! * [`dataset`]: point storage, file formats, and permutations.
//! * [`tree`]: building, reordering, serializing, and summarizing trees.
//! * [`search`]: rho-NN search and the three exact k-NN algorithms, plus the
//!   linear-scan oracle.
//! * [`tuning`] and [`augment`]: algorithm auto-selection and synthetic
//!   dataset augmentation.

pub mod augment;
pub mod dataset;
mod error;
pub mod metrics;
pub mod output;
pub mod recall;
pub mod search;
pub mod synthetic;
pub mod tree;
pub mod tuning;
mod utils;

pub use augment::{augment, AugmentSpec, Augmented};
pub use dataset::{AnyDataset, Dataset, Format, GroundTruth, PointStore, Sequences, Vectors};
pub use error::{Error, Result};
pub use metrics::{Cosine, DistanceKind, Dtw, Euclidean, Hamming, Levenshtein, Metric};
pub use search::{Algorithm, DeltaTriple, Neighbor, SearchReport};
pub use tree::{Cluster, PartitionCriteria, Strategy, Tree};
pub use tuning::{auto_tune, TuningResult};
