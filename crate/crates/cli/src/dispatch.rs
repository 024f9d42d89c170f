//! Running generic code for a distance chosen at run time.

use cakes_core::{
    AnyDataset, Cosine, Dataset, DistanceKind, Dtw, Error, Euclidean, Hamming, Levenshtein, Metric, PointStore, Result,
    Sequences, Vectors,
};

/// A point store that can be pulled out of an [`AnyDataset`].
pub trait Store: PointStore + 'static {
    fn from_any(data: AnyDataset) -> Result<Dataset<Self>>;
}

impl Store for Vectors {
    fn from_any(data: AnyDataset) -> Result<Dataset<Self>> {
        data.into_vectors()
    }
}

impl Store for Sequences {
    fn from_any(data: AnyDataset) -> Result<Dataset<Self>> {
        data.into_sequences()
    }
}

/// Work that needs the concrete store and metric types.
pub trait Job {
    type Output;

    fn run<S, M>(self, data: Dataset<S>, metric: M) -> Result<Self::Output>
    where
        S: Store,
        M: Metric<S::Point> + Copy + 'static;
}

pub fn dispatch<J: Job>(kind: DistanceKind, data: AnyDataset, job: J) -> Result<J::Output> {
    match (kind, data) {
        (DistanceKind::Euclidean, AnyDataset::Vectors(d)) => job.run(d, Euclidean),
        (DistanceKind::Cosine, AnyDataset::Vectors(d)) => job.run(d, Cosine),
        (DistanceKind::Dtw, AnyDataset::Vectors(d)) => job.run(d, Dtw),
        (DistanceKind::Hamming, AnyDataset::Sequences(d)) => job.run(d, Hamming),
        (DistanceKind::Levenshtein, AnyDataset::Sequences(d)) => job.run(d, Levenshtein),
        (kind, AnyDataset::Vectors(_)) => {
            Err(Error::Unsupported(format!("{kind} needs sequence data but the dataset holds vectors")))
        }
        (kind, AnyDataset::Sequences(_)) => {
            Err(Error::Unsupported(format!("{kind} needs vector data but the dataset holds sequences")))
        }
    }
}
