//! JSON-lines search results.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::search::SearchReport;
use crate::Result;

/// What a query asked for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueryKind {
    Knn(usize),
    Rnn(f64),
}

/// One line of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultLine {
    pub query: usize,
    pub algo: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub neighbors: Vec<(usize, f64)>,
    pub distance_count: usize,
    /// Omitted when timings are disabled, so files can be compared byte
    /// for byte.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_us: Option<u64>,
}

impl ResultLine {
    pub fn new(query: usize, algo: &str, kind: QueryKind, report: &SearchReport, timing: bool) -> Self {
        let (k, radius) = match kind {
            QueryKind::Knn(k) => (Some(k), None),
            QueryKind::Rnn(r) => (None, Some(r)),
        };
        Self {
            query,
            algo: algo.to_string(),
            k,
            radius,
            neighbors: report.neighbors.iter().map(|n| (n.index, n.distance)).collect(),
            distance_count: report.distance_count,
            elapsed_us: timing.then_some(report.elapsed.as_micros() as u64),
        }
    }

    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        serde_json::to_writer(&mut *w, self)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::search::Neighbor;

    fn report() -> SearchReport {
        SearchReport {
            neighbors: vec![Neighbor { index: 3, distance: 0.5 }, Neighbor { index: 1, distance: 2.0 }],
            distance_count: 17,
            elapsed: Duration::from_micros(42),
        }
    }

    #[test]
    fn knn_line_format() {
        let mut buf = Vec::new();
        ResultLine::new(7, "depth-sieve", QueryKind::Knn(2), &report(), true).write(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"query\":7,\"algo\":\"depth-sieve\",\"k\":2,\"neighbors\":[[3,0.5],[1,2.0]],\"distance_count\":17,\"elapsed_us\":42}\n"
        );
    }

    #[test]
    fn rnn_line_without_timing_round_trips() {
        let line = ResultLine::new(0, "rnn", QueryKind::Rnn(1.5), &report(), false);
        let text = serde_json::to_string(&line).unwrap();
        assert!(text.contains("\"radius\":1.5") && !text.contains("elapsed_us") && !text.contains("\"k\""));
        assert_eq!(serde_json::from_str::<ResultLine>(&text).unwrap(), line);
    }
}
