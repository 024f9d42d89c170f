//! Point storage, file formats, and permutations.
//!
//! Points are addressed by their *stored position*. Once a dataset has been
//! reordered, the permutation maps every stored position back to the index
//! the point had when it was loaded, and every index reported to callers is
//! such an original index.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Magic bytes at the start of a raw-f32 file.
pub const RAW_MAGIC: &[u8; 8] = b"CAKESBIN";

/// Random-access storage for the points of a dataset.
pub trait PointStore: Send + Sync + Sized {
    type Point: ?Sized + Sync;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, i: usize) -> &Self::Point;

    /// A copy in which position `j` holds the point at position `order[j]`.
    fn reordered(&self, order: &[usize]) -> Self;

    /// A copy holding only the points at the given positions, in order.
    fn select(&self, positions: &[usize]) -> Self {
        self.reordered(positions)
    }

    /// `None` for variable-length data.
    fn dimensionality(&self) -> Option<usize>;
}

/// Fixed-dimensional real vectors stored row-major in one buffer.
#[derive(Debug, Clone, PartialEq)]
pub struct Vectors {
    dim: usize,
    data: Vec<f32>,
}

impl Vectors {
    pub fn new(dim: usize, data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Input("dimensionality must be positive".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::Input(format!(
                "buffer of {} values is not a multiple of dimensionality {dim}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Input(format!("non-finite value in row {}", i / dim)));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let dim = rows.first().map(|r| r.as_ref().len()).ok_or(Error::ZeroCardinality)?;
        let mut data = Vec::with_capacity(dim * rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return Err(Error::Input(format!("row {i} has {} values, expected {dim}", row.len())));
            }
            data.extend_from_slice(row);
        }
        Self::new(dim, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.dim)
    }
}

impl PointStore for Vectors {
    type Point = [f32];

    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    fn get(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn reordered(&self, order: &[usize]) -> Self {
        let mut data = Vec::with_capacity(order.len() * self.dim);
        for &i in order {
            data.extend_from_slice(self.get(i));
        }
        Self { dim: self.dim, data }
    }

    fn dimensionality(&self) -> Option<usize> {
        Some(self.dim)
    }
}

/// Variable-length byte sequences stored contiguously with an offsets table.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequences {
    bytes: Vec<u8>,
    /// `offsets[i]..offsets[i + 1]` is sequence `i`.
    offsets: Vec<usize>,
}

impl Sequences {
    pub fn from_seqs<S: AsRef<[u8]>>(seqs: &[S]) -> Self {
        let mut bytes = Vec::with_capacity(seqs.iter().map(|s| s.as_ref().len()).sum());
        let mut offsets = Vec::with_capacity(seqs.len() + 1);
        offsets.push(0);
        for s in seqs {
            bytes.extend_from_slice(s.as_ref());
            offsets.push(bytes.len());
        }
        Self { bytes, offsets }
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.offsets.windows(2).map(|w| &self.bytes[w[0]..w[1]])
    }

    /// The common length of all sequences, if they share one.
    pub fn uniform_length(&self) -> Option<usize> {
        let mut lengths = self.offsets.windows(2).map(|w| w[1] - w[0]);
        let first = lengths.next()?;
        lengths.all(|l| l == first).then_some(first)
    }
}

impl PointStore for Sequences {
    type Point = [u8];

    fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn get(&self, i: usize) -> &[u8] {
        &self.bytes[self.offsets[i]..self.offsets[i + 1]]
    }

    fn reordered(&self, order: &[usize]) -> Self {
        let seqs: Vec<&[u8]> = order.iter().map(|&i| self.get(i)).collect();
        Self::from_seqs(&seqs)
    }

    fn dimensionality(&self) -> Option<usize> {
        None
    }
}

/// A named collection of points plus the permutation back to original indices.
#[derive(Debug, Clone)]
pub struct Dataset<S> {
    name: String,
    store: S,
    permutation: Vec<usize>,
}

impl<S: PointStore> Dataset<S> {
    pub fn new(name: impl Into<String>, store: S) -> Result<Self> {
        if store.is_empty() {
            return Err(Error::ZeroCardinality);
        }
        let permutation = (0..store.len()).collect();
        Ok(Self { name: name.into(), store, permutation })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cardinality(&self) -> usize {
        self.store.len()
    }

    pub fn dimensionality(&self) -> Option<usize> {
        self.store.dimensionality()
    }

    pub fn store(&self) -> &S {
        &self.store
    }

    /// The point at a stored position.
    #[inline]
    pub fn get(&self, position: usize) -> &S::Point {
        self.store.get(position)
    }

    #[inline]
    pub fn original_index(&self, position: usize) -> usize {
        self.permutation[position]
    }

    /// Maps stored positions to original indices.
    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Physically reorders the points so that new position `j` holds the
    /// point previously at position `order[j]`.
    pub fn apply_permutation(&mut self, order: &[usize]) -> Result<()> {
        check_bijection(order, self.cardinality())?;
        self.store = self.store.reordered(order);
        self.permutation = order.iter().map(|&i| self.permutation[i]).collect();
        Ok(())
    }

    /// `n` points drawn uniformly without replacement, as a new dataset.
    pub fn subsample(&self, n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroCardinality);
        }
        if n > self.cardinality() {
            return Err(Error::Input(format!("cannot draw {n} points from a dataset of {}", self.cardinality())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = rand::seq::index::sample(&mut rng, self.cardinality(), n).into_vec();
        Dataset::new(format!("{}-sub{n}", self.name), self.store.select(&positions))
    }
}

pub(crate) fn check_bijection(order: &[usize], n: usize) -> Result<()> {
    if order.len() != n {
        return Err(Error::Input(format!("permutation has {} entries, expected {n}", order.len())));
    }
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || std::mem::replace(&mut seen[i], true) {
            return Err(Error::Input(format!("permutation is not a bijection at index {i}")));
        }
    }
    Ok(())
}

/// On-disk dataset formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// `CAKESBIN`, then little-endian u64 cardinality and dimensionality,
    /// then row-major little-endian f32 values.
    RawF32,
    /// One point per line, comma-separated decimal floats, no header.
    Csv,
    /// One sequence per line, or FASTA.
    Sequences,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::RawF32 => "raw-f32",
            Format::Csv => "csv",
            Format::Sequences => "sequences",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw-f32" => Ok(Format::RawF32),
            "csv" => Ok(Format::Csv),
            "sequences" | "fasta" => Ok(Format::Sequences),
            _ => Err(Error::Input(format!("unknown format {s:?}"))),
        }
    }
}

/// A dataset of either kind, as read from a file.
#[derive(Debug, Clone)]
pub enum AnyDataset {
    Vectors(Dataset<Vectors>),
    Sequences(Dataset<Sequences>),
}

impl AnyDataset {
    pub fn load(path: impl AsRef<Path>, format: Format) -> Result<Self> {
        let path = path.as_ref();
        let name = path.file_stem().map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
        match format {
            Format::RawF32 => {
                let bytes = fs::read(path)?;
                let store = decode_raw(&bytes).map_err(|e| with_path(e, path))?;
                Ok(AnyDataset::Vectors(Dataset::new(name, store)?))
            }
            Format::Csv => {
                let file = fs::File::open(path)?;
                let store = read_csv(BufReader::new(file)).map_err(|e| with_path(e, path))?;
                Ok(AnyDataset::Vectors(Dataset::new(name, store)?))
            }
            Format::Sequences => {
                let text = fs::read(path)?;
                let store = parse_sequences(&text).map_err(|e| with_path(e, path))?;
                Ok(AnyDataset::Sequences(Dataset::new(name, store)?))
            }
        }
    }

    pub fn cardinality(&self) -> usize {
        match self {
            AnyDataset::Vectors(d) => d.cardinality(),
            AnyDataset::Sequences(d) => d.cardinality(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            AnyDataset::Vectors(d) => d.name(),
            AnyDataset::Sequences(d) => d.name(),
        }
    }

    pub fn into_vectors(self) -> Result<Dataset<Vectors>> {
        match self {
            AnyDataset::Vectors(d) => Ok(d),
            AnyDataset::Sequences(_) => Err(Error::Unsupported("expected real vectors, found sequences".into())),
        }
    }

    pub fn into_sequences(self) -> Result<Dataset<Sequences>> {
        match self {
            AnyDataset::Sequences(d) => Ok(d),
            AnyDataset::Vectors(_) => Err(Error::Unsupported("expected sequences, found real vectors".into())),
        }
    }
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Input(detail) => Error::Parse { path: path.to_path_buf(), detail },
        other => other,
    }
}

/// Writes vectors in the given format. Stored order is written as-is.
pub fn save_vectors(store: &Vectors, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    match format {
        Format::RawF32 => write_raw(store, &mut w)?,
        Format::Csv => write_csv(store, &mut w)?,
        Format::Sequences => return Err(Error::Unsupported("real vectors cannot be written as sequences".into())),
    }
    w.flush()?;
    Ok(())
}

pub fn save_sequences(store: &Sequences, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    write_sequences(store, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn write_raw(store: &Vectors, w: &mut impl Write) -> Result<()> {
    w.write_all(RAW_MAGIC)?;
    w.write_all(&(store.len() as u64).to_le_bytes())?;
    w.write_all(&(store.dim() as u64).to_le_bytes())?;
    for x in store.as_slice() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

pub fn decode_raw(bytes: &[u8]) -> Result<Vectors> {
    if bytes.is_empty() {
        return Err(Error::ZeroCardinality);
    }
    if bytes.len() < 24 || &bytes[..8] != RAW_MAGIC {
        return Err(Error::Input("malformed header: missing CAKESBIN magic".into()));
    }
    let n = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let d = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
    if n == 0 {
        return Err(Error::ZeroCardinality);
    }
    if d == 0 {
        return Err(Error::Input("malformed header: zero dimensionality".into()));
    }
    let expected = n
        .checked_mul(d)
        .and_then(|v| v.checked_mul(4))
        .ok_or_else(|| Error::Input("malformed header: size overflow".into()))?;
    let payload = &bytes[24..];
    if payload.len() as u64 != expected {
        return Err(Error::Input(format!(
            "malformed header: expected {expected} payload bytes for {n} x {d}, found {}",
            payload.len()
        )));
    }
    let data: Vec<f32> = payload.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
    Vectors::new(d as usize, data)
}

pub fn read_csv(reader: impl BufRead) -> Result<Vectors> {
    let mut data = Vec::new();
    let mut dim = None;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for field in line.split(',') {
            let x: f32 = field
                .trim()
                .parse()
                .map_err(|_| Error::Input(format!("line {}: cannot parse {:?} as a float", lineno + 1, field)))?;
            if !x.is_finite() {
                return Err(Error::Input(format!("line {}: non-finite value", lineno + 1)));
            }
            data.push(x);
            count += 1;
        }
        match dim {
            None => dim = Some(count),
            Some(d) if d != count => {
                return Err(Error::Input(format!("line {}: ragged row with {count} values, expected {d}", lineno + 1)))
            }
            Some(_) => {}
        }
    }
    let dim = dim.ok_or(Error::ZeroCardinality)?;
    Vectors::new(dim, data)
}

pub fn write_csv(store: &Vectors, w: &mut impl Write) -> Result<()> {
    for row in store.rows() {
        let mut first = true;
        for x in row {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            // `Display` for f32 prints the shortest string that parses back
            // to the same value.
            write!(w, "{x}")?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Parses one-sequence-per-line text, or FASTA when the first non-empty
/// line starts with `>`.
pub fn parse_sequences(text: &[u8]) -> Result<Sequences> {
    let text =
        std::str::from_utf8(text).map_err(|e| Error::Input(format!("invalid UTF-8 at byte {}", e.valid_up_to())))?;
    let lines: Vec<&str> = text.lines().collect();
    let is_fasta = lines.iter().find(|l| !l.trim().is_empty()).is_some_and(|l| l.starts_with('>'));

    let seqs: Vec<String> = if is_fasta {
        let mut seqs = Vec::new();
        let mut current: Option<String> = None;
        for line in lines {
            if line.starts_with('>') {
                seqs.extend(current.take());
                current = Some(String::new());
            } else if let Some(seq) = current.as_mut() {
                seq.push_str(line.trim());
            }
        }
        seqs.extend(current);
        seqs
    } else {
        lines.into_iter().map(str::to_string).collect()
    };

    if seqs.is_empty() {
        return Err(Error::ZeroCardinality);
    }
    Ok(Sequences::from_seqs(&seqs))
}

pub fn write_sequences(store: &Sequences, w: &mut impl Write) -> Result<()> {
    for (i, seq) in store.iter().enumerate() {
        if seq.contains(&b'\n') || seq.contains(&b'\r') || seq.first() == Some(&b'>') {
            return Err(Error::Input(format!("sequence {i} cannot be written one per line")));
        }
        w.write_all(seq)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Exact neighbors for a panel of queries, produced by linear search.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub k: usize,
    pub distance: String,
    /// Per query, `(original index, distance)` sorted by distance.
    pub neighbors: Vec<Vec<(usize, f64)>>,
}

#[derive(Serialize, Deserialize)]
struct TruthLine {
    query: usize,
    neighbors: Vec<(usize, f64)>,
}

impl GroundTruth {
    pub fn write(&self, w: &mut impl Write) -> Result<()> {
        for (query, neighbors) in self.neighbors.iter().enumerate() {
            let line = TruthLine { query, neighbors: neighbors.clone() };
            serde_json::to_writer(&mut *w, &line)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(fs::File::create(path)?);
        self.write(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn read(reader: impl Read, distance: &str) -> Result<Self> {
        let mut rows: Vec<(usize, Vec<(usize, f64)>)> = Vec::new();
        for (lineno, line) in BufReader::new(reader).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: TruthLine = serde_json::from_str(&line)
                .map_err(|e| Error::Input(format!("ground truth line {}: {e}", lineno + 1)))?;
            if parsed.neighbors.windows(2).any(|w| w[0].1 > w[1].1) {
                return Err(Error::Input(format!(
                    "ground truth line {}: neighbors not sorted by distance",
                    lineno + 1
                )));
            }
            rows.push((parsed.query, parsed.neighbors));
        }
        rows.sort_by_key(|(q, _)| *q);
        let k = rows.iter().map(|(_, n)| n.len()).max().unwrap_or(0);
        Ok(Self { k, distance: distance.to_string(), neighbors: rows.into_iter().map(|(_, n)| n).collect() })
    }

    pub fn load(path: impl AsRef<Path>, distance: &str) -> Result<Self> {
        Self::read(fs::File::open(path)?, distance)
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn abc() -> Dataset<Vectors> {
        let store = Vectors::from_rows(&[[0.0_f32], [1.0], [2.0]]).unwrap();
        Dataset::new("abc", store).unwrap()
    }

    #[test]
    fn raw_decode_two_points() {
        let mut bytes = RAW_MAGIC.to_vec();
        bytes.extend(2u64.to_le_bytes());
        bytes.extend(2u64.to_le_bytes());
        for x in [0.0_f32, 0.0, 3.0, 4.0] {
            bytes.extend(x.to_le_bytes());
        }
        let v = decode_raw(&bytes).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.get(1), &[3.0, 4.0]);
    }

    #[test]
    fn raw_rejects_bad_input() {
        assert!(matches!(decode_raw(&[]), Err(Error::ZeroCardinality)));
        assert!(matches!(decode_raw(b"NOTMAGIC________________"), Err(Error::Input(_))));
        let mut bytes = RAW_MAGIC.to_vec();
        bytes.extend(2u64.to_le_bytes());
        bytes.extend(2u64.to_le_bytes());
        bytes.extend(1.0_f32.to_le_bytes());
        assert!(matches!(decode_raw(&bytes), Err(Error::Input(_))));

        let mut bytes = RAW_MAGIC.to_vec();
        bytes.extend(1u64.to_le_bytes());
        bytes.extend(1u64.to_le_bytes());
        bytes.extend(f32::NAN.to_le_bytes());
        let err = decode_raw(&bytes).unwrap_err().to_string();
        assert!(err.contains("row 0"), "{err}");
    }

    #[test]
    fn csv_shapes_and_errors() {
        let v = read_csv("1,2,3\n4,5,6\n7,8,9\n10,11,12\n".as_bytes()).unwrap();
        assert_eq!((v.len(), v.dim()), (4, 3));
        let err = read_csv("1,2\n3\n".as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        let err = read_csv("1,inf\n".as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 1"), "{err}");
        assert!(matches!(read_csv("".as_bytes()), Err(Error::ZeroCardinality)));
    }

    #[test]
    fn empty_files_have_zero_cardinality() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty");
        fs::write(&path, b"").unwrap();
        for format in [Format::RawF32, Format::Csv, Format::Sequences] {
            let err = AnyDataset::load(&path, format).unwrap_err();
            assert_eq!(err.to_string(), "zero cardinality");
        }
    }

    #[test]
    fn sequences_plain_and_fasta() {
        let s = parse_sequences(b"ACGT\nAC\nGGG").unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![&b"ACGT"[..], b"AC", b"GGG"]);
        let s = parse_sequences(b">one\nACG\nTT\n>two\nGG\n").unwrap();
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![&b"ACGTT"[..], b"GG"]);
        assert_eq!(s.uniform_length(), None);
        assert!(parse_sequences(&[0xff, 0xfe]).is_err());
    }

    #[test]
    fn permutation_examples() {
        let mut d = abc();
        d.apply_permutation(&[0, 1, 2]).unwrap();
        assert!(d.is_identity());

        d.apply_permutation(&[2, 0, 1]).unwrap();
        assert_eq!(d.get(0), &[2.0]);
        assert_eq!(d.get(1), &[0.0]);
        assert_eq!(d.original_index(0), 2);

        // inverse of [2, 0, 1] in the current storage is [1, 2, 0]
        d.apply_permutation(&[1, 2, 0]).unwrap();
        assert!(d.is_identity());
        assert_eq!(d.get(0), &[0.0]);

        assert!(d.apply_permutation(&[0, 0, 1]).is_err());
        assert!(d.apply_permutation(&[0, 1]).is_err());
    }

    #[test]
    fn subsample_contract() {
        let d = abc();
        let full = d.subsample(3, 5).unwrap();
        let mut values: Vec<f32> = full.store().as_slice().to_vec();
        values.sort_by(f32::total_cmp);
        assert_eq!(values, vec![0.0, 1.0, 2.0]);
        assert_eq!(d.subsample(1, 5).unwrap().cardinality(), 1);
        assert_eq!(d.subsample(2, 9).unwrap().store().as_slice(), d.subsample(2, 9).unwrap().store().as_slice());
        assert!(d.subsample(4, 0).is_err());
    }

    #[test]
    fn ground_truth_round_trip() {
        let gt = GroundTruth {
            k: 2,
            distance: "euclidean".into(),
            neighbors: vec![vec![(3, 0.5), (1, 0.75)], vec![(0, 0.0), (2, 1.0)]],
        };
        let mut buf = Vec::new();
        gt.write(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("{\"query\":0,\"neighbors\":[[3,0.5],[1,0.75]]}\n"));
        assert_eq!(GroundTruth::read(&buf[..], "euclidean").unwrap(), gt);
        assert!(GroundTruth::read(&b"{\"query\":0,\"neighbors\":[[1,2.0],[0,1.0]]}"[..], "x").is_err());
    }

    proptest! {
        #[test]
        fn vector_formats_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6_f32..1e6, 3), 1..20)) {
            let store = Vectors::from_rows(&rows).unwrap();
            let mut raw = Vec::new();
            write_raw(&store, &mut raw).unwrap();
            prop_assert_eq!(&decode_raw(&raw).unwrap(), &store);
            let mut csv = Vec::new();
            write_csv(&store, &mut csv).unwrap();
            let back = read_csv(&csv[..]).unwrap();
            prop_assert!(back.as_slice().iter().zip(store.as_slice()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }

        #[test]
        fn sequences_round_trip(seqs in prop::collection::vec("[ACGT]{1,12}", 1..20)) {
            let store = Sequences::from_seqs(&seqs);
            let mut buf = Vec::new();
            write_sequences(&store, &mut buf).unwrap();
            prop_assert_eq!(parse_sequences(&buf).unwrap(), store);
        }

        #[test]
        fn permutation_recovers_originals(n in 1usize..40, seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let rows: Vec<[f32; 1]> = (0..n).map(|i| [i as f32]).collect();
            let original = Dataset::new("p", Vectors::from_rows(&rows).unwrap()).unwrap();
            let mut d = original.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..2 {
                let mut order: Vec<usize> = (0..n).collect();
                order.shuffle(&mut rng);
                d.apply_permutation(&order).unwrap();
            }
            for i in 0..n {
                prop_assert_eq!(d.get(i), original.get(d.original_index(i)));
            }
        }
    }
}
