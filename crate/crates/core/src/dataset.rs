//! Ensemble persistence, measured-data import and nSNR summaries.
//!
//! An ensemble file is a UTF-8 header of `key=value` lines between
//! `PLCSEC-ENSEMBLE v1` and `end_header`, followed by `count` records of
//! `6 N` little-endian `f64`: Bob's CFR as `(re, im)` pairs, Bob's noise
//! powers, Eve's CFR, Eve's noise powers.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{nsnr, BobBin, MetricsError, Scenario, Side, WiretapPair};
use crate::numeric::{mean, percentile, sample_sd};
use crate::spectral::{dbm_to_watts, ChannelRealization, SpectralError, SpectralGrid};

const MAGIC: &str = "PLCSEC-ENSEMBLE v1";
const END: &str = "end_header";

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed header at line {line}: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("record {record} is truncated ({got} of {expected} bytes)")]
    Truncated {
        record: usize,
        expected: usize,
        got: usize,
    },
    #[error("header declares {declared} records but the body holds {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("record {record}: {field} bin {bin} is not finite")]
    NonFinite {
        record: usize,
        field: &'static str,
        bin: usize,
    },
    #[error("record {record}: {source}")]
    InvalidRecord {
        record: usize,
        #[source]
        source: SpectralError,
    },
    #[error("ensemble is empty")]
    Empty,
    #[error("pair {record} does not match the ensemble's {what}")]
    Inconsistent { record: usize, what: &'static str },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("{path}: frequency column must be strictly increasing (row {row})")]
    NonMonotone { path: PathBuf, row: usize },
    #[error(
        "{path}: data covers [{have_lo}, {have_hi}] Hz but the grid needs [{need_lo}, {need_hi}] Hz"
    )]
    Coverage {
        path: PathBuf,
        have_lo: f64,
        have_hi: f64,
        need_lo: f64,
        need_hi: f64,
    },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Metadata stored ahead of the records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleHeader {
    pub grid: SpectralGrid,
    pub scenario: Scenario,
    pub bob_bin: BobBin,
    pub generator_hash: String,
    pub master_seed: u64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleFile {
    pub header: EnsembleHeader,
    pub pairs: Vec<WiretapPair>,
}

impl EnsembleFile {
    /// Wraps `pairs`, which must be non-empty and share grid, scenario and bin.
    pub fn new(
        pairs: Vec<WiretapPair>,
        generator_hash: impl Into<String>,
        master_seed: u64,
    ) -> Result<Self, DatasetError> {
        let first = pairs.first().ok_or(DatasetError::Empty)?;
        let grid = *first.bob().grid();
        let (scenario, bob_bin) = (first.scenario(), first.bob_bin());
        for (record, p) in pairs.iter().enumerate() {
            if *p.bob().grid() != grid {
                return Err(DatasetError::Inconsistent {
                    record,
                    what: "grid",
                });
            }
            if p.scenario() != scenario {
                return Err(DatasetError::Inconsistent {
                    record,
                    what: "scenario",
                });
            }
            if p.bob_bin() != bob_bin {
                return Err(DatasetError::Inconsistent {
                    record,
                    what: "bin",
                });
            }
        }
        let generator_hash = generator_hash.into();
        if generator_hash
            .chars()
            .any(|c| c.is_whitespace() || c == '=')
        {
            return Err(DatasetError::MalformedHeader {
                line: 0,
                reason: "generator hash may not contain whitespace or '='".into(),
            });
        }
        Ok(EnsembleFile {
            header: EnsembleHeader {
                grid,
                scenario,
                bob_bin,
                generator_hash,
                master_seed,
                count: pairs.len(),
            },
            pairs,
        })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        let h = &self.header;
        writeln!(w, "{MAGIC}")?;
        writeln!(w, "n_subchannels={}", h.grid.n_subchannels())?;
        writeln!(w, "f_start={}", h.grid.f_start())?;
        writeln!(w, "f_stop={}", h.grid.f_stop())?;
        writeln!(w, "scenario={}", h.scenario)?;
        writeln!(w, "bin={}", h.bob_bin)?;
        writeln!(w, "generator_hash={}", h.generator_hash)?;
        writeln!(w, "master_seed={}", h.master_seed)?;
        writeln!(w, "count={}", h.count)?;
        writeln!(w, "{END}")?;
        let mut buf = Vec::with_capacity(record_bytes(h.grid.n_subchannels()));
        for p in &self.pairs {
            buf.clear();
            for ch in [p.bob(), p.eve()] {
                for h in ch.cfr() {
                    buf.extend_from_slice(&h.re.to_le_bytes());
                    buf.extend_from_slice(&h.im.to_le_bytes());
                }
                for v in ch.noise_power() {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
            }
            w.write_all(&buf)?;
        }
        w.flush()
    }

    pub fn read_from<R: BufRead>(mut r: R) -> Result<Self, DatasetError> {
        let header = read_header(&mut r)?;
        let n = header.grid.n_subchannels();
        let size = record_bytes(n);
        let mut buf = vec![0u8; size];
        let mut pairs = Vec::with_capacity(header.count);
        for record in 0..header.count {
            let got = fill(&mut r, &mut buf).map_err(|source| DatasetError::Io {
                path: PathBuf::new(),
                source,
            })?;
            if got == 0 {
                return Err(DatasetError::CountMismatch {
                    declared: header.count,
                    found: record,
                });
            }
            if got < size {
                return Err(DatasetError::Truncated {
                    record,
                    expected: size,
                    got,
                });
            }
            pairs.push(decode_record(&buf, n, record, &header)?);
        }
        let mut rest = Vec::new();
        r.read_to_end(&mut rest)
            .map_err(|source| DatasetError::Io {
                path: PathBuf::new(),
                source,
            })?;
        if !rest.is_empty() {
            if rest.len() % size != 0 {
                return Err(DatasetError::Truncated {
                    record: header.count + rest.len() / size,
                    expected: size,
                    got: rest.len() % size,
                });
            }
            return Err(DatasetError::CountMismatch {
                declared: header.count,
                found: header.count + rest.len() / size,
            });
        }
        Ok(EnsembleFile { header, pairs })
    }
}

fn record_bytes(n: usize) -> usize {
    6 * n * std::mem::size_of::<f64>()
}

/// Reads until `buf` is full or the stream ends; returns the bytes read.
fn fill<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut got = 0;
    while got < buf.len() {
        match r.read(&mut buf[got..]) {
            Ok(0) => break,
            Ok(k) => got += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(got)
}

fn read_header<R: BufRead>(r: &mut R) -> Result<EnsembleHeader, DatasetError> {
    let bad = |line: usize, reason: String| DatasetError::MalformedHeader { line, reason };
    let mut line = String::new();
    let mut lineno = 0;
    let mut next_line = |line: &mut String| -> Result<Option<usize>, DatasetError> {
        line.clear();
        lineno += 1;
        let k = r
            .read_line(line)
            .map_err(|e| bad(lineno, format!("unreadable header line: {e}")))?;
        if k == 0 {
            return Ok(None);
        }
        if line.ends_with('\n') {
            line.pop();
        }
        Ok(Some(lineno))
    };

    match next_line(&mut line)? {
        Some(_) if line == MAGIC => {}
        _ => return Err(bad(1, format!("expected {MAGIC:?}"))),
    }
    let mut fields: Vec<(String, String, usize)> = Vec::new();
    loop {
        let Some(no) = next_line(&mut line)? else {
            return Err(bad(lineno, format!("missing {END:?}")));
        };
        if line == END {
            break;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(bad(no, format!("expected key=value, got {line:?}")));
        };
        if fields.iter().any(|(key, _, _)| key == k) {
            return Err(bad(no, format!("duplicate key {k:?}")));
        }
        fields.push((k.to_string(), v.to_string(), no));
    }
    let end_line = lineno;
    let get = |key: &str| -> Result<(&str, usize), DatasetError> {
        fields
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, no)| (v.as_str(), *no))
            .ok_or_else(|| bad(end_line, format!("missing key {key:?}")))
    };
    fn parse<T: std::str::FromStr>((v, no): (&str, usize), key: &str) -> Result<T, DatasetError> {
        v.parse().map_err(|_| DatasetError::MalformedHeader {
            line: no,
            reason: format!("cannot parse {key} value {v:?}"),
        })
    }
    let n: usize = parse(get("n_subchannels")?, "n_subchannels")?;
    let f_start: f64 = parse(get("f_start")?, "f_start")?;
    let f_stop: f64 = parse(get("f_stop")?, "f_stop")?;
    let grid = SpectralGrid::new(n, f_start, f_stop).map_err(|e| {
        bad(
            get("n_subchannels").map(|x| x.1).unwrap_or(0),
            e.to_string(),
        )
    })?;
    let (sv, sno) = get("scenario")?;
    let scenario: Scenario = sv.parse().map_err(|e: String| bad(sno, e))?;
    let (bv, bno) = get("bin")?;
    let bob_bin: BobBin = bv.parse().map_err(|e: String| bad(bno, e))?;
    Ok(EnsembleHeader {
        grid,
        scenario,
        bob_bin,
        generator_hash: get("generator_hash")?.0.to_string(),
        master_seed: parse(get("master_seed")?, "master_seed")?,
        count: parse(get("count")?, "count")?,
    })
}

fn decode_record(
    buf: &[u8],
    n: usize,
    record: usize,
    header: &EnsembleHeader,
) -> Result<WiretapPair, DatasetError> {
    let mut words = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")));
    let mut side = |cfr_field: &'static str,
                    noise_field: &'static str|
     -> Result<ChannelRealization, DatasetError> {
        let mut cfr = Vec::with_capacity(n);
        for bin in 0..n {
            let re = words.next().expect("record length checked");
            let im = words.next().expect("record length checked");
            if !(re.is_finite() && im.is_finite()) {
                return Err(DatasetError::NonFinite {
                    record,
                    field: cfr_field,
                    bin,
                });
            }
            cfr.push(Complex64::new(re, im));
        }
        let mut noise = Vec::with_capacity(n);
        for bin in 0..n {
            let v = words.next().expect("record length checked");
            if !v.is_finite() {
                return Err(DatasetError::NonFinite {
                    record,
                    field: noise_field,
                    bin,
                });
            }
            noise.push(v);
        }
        ChannelRealization::new(header.grid, cfr, noise)
            .map_err(|source| DatasetError::InvalidRecord { record, source })
    };
    let bob = side("Bob CFR", "Bob noise")?;
    let eve = side("Eve CFR", "Eve noise")?;
    Ok(WiretapPair::new(bob, eve, header.scenario, header.bob_bin)?)
}

/// Writes `pairs` to `path`.
pub fn write_ensemble(
    path: &Path,
    pairs: &[WiretapPair],
    generator_hash: &str,
    master_seed: u64,
) -> Result<(), DatasetError> {
    let file = EnsembleFile::new(pairs.to_vec(), generator_hash, master_seed)?;
    write_ensemble_file(path, &file)
}

pub fn write_ensemble_file(path: &Path, file: &EnsembleFile) -> Result<(), DatasetError> {
    let f = File::create(path).map_err(io_err(path))?;
    file.write_to(BufWriter::new(f)).map_err(io_err(path))
}

pub fn read_ensemble(path: &Path) -> Result<EnsembleFile, DatasetError> {
    let f = File::open(path).map_err(io_err(path))?;
    EnsembleFile::read_from(BufReader::new(f)).map_err(|e| match e {
        DatasetError::Io { source, .. } => DatasetError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

#[derive(Debug, Deserialize)]
struct CfrRow {
    #[serde(default)]
    realization: Option<String>,
    frequency_hz: f64,
    re: f64,
    im: f64,
}

#[derive(Debug, Deserialize)]
struct NoiseRow {
    #[serde(default)]
    realization: Option<String>,
    frequency_hz: f64,
    psd_dbm_per_hz: f64,
}

/// Rows per realization id.
type Groups<T> = Vec<(Option<String>, Vec<T>)>;

/// Rows grouped by realization id in order of first appearance.
fn read_groups<T, F>(path: &Path, key: F) -> Result<Groups<T>, DatasetError>
where
    T: for<'de> Deserialize<'de>,
    F: Fn(&T) -> Option<String>,
{
    let csv_err = |message: String| DatasetError::Csv {
        path: path.to_path_buf(),
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(e.to_string()))?;
    let mut groups: Groups<T> = Vec::new();
    for row in reader.deserialize::<T>() {
        let row = row.map_err(|e| csv_err(e.to_string()))?;
        let id = key(&row);
        match groups.iter_mut().find(|(g, _)| *g == id) {
            Some((_, rows)) => rows.push(row),
            None => groups.push((id, vec![row])),
        }
    }
    if groups.is_empty() {
        return Err(csv_err("no data rows".into()));
    }
    Ok(groups)
}

/// Linear interpolation of `values` sampled at strictly increasing `freqs`.
struct Interpolant {
    freqs: Vec<f64>,
}

impl Interpolant {
    fn new(path: &Path, freqs: Vec<f64>, grid: &SpectralGrid) -> Result<Self, DatasetError> {
        for (row, w) in freqs.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(DatasetError::NonMonotone {
                    path: path.to_path_buf(),
                    row: row + 2,
                });
            }
        }
        let need_lo = grid.bin_center(0);
        let need_hi = grid.bin_center(grid.n_subchannels() - 1);
        let (have_lo, have_hi) = (freqs[0], freqs[freqs.len() - 1]);
        if !(have_lo <= need_lo && have_hi >= need_hi) {
            return Err(DatasetError::Coverage {
                path: path.to_path_buf(),
                have_lo,
                have_hi,
                need_lo,
                need_hi,
            });
        }
        Ok(Interpolant { freqs })
    }

    fn at(&self, f: f64, values: &[f64]) -> f64 {
        let i = self.freqs.partition_point(|&x| x <= f);
        if i == 0 {
            return values[0];
        }
        if i >= self.freqs.len() {
            return values[values.len() - 1];
        }
        let (f0, f1) = (self.freqs[i - 1], self.freqs[i]);
        if f == f0 {
            return values[i - 1];
        }
        let t = (f - f0) / (f1 - f0);
        values[i - 1] + t * (values[i] - values[i - 1])
    }
}

/// Imports measured responses and noise PSDs onto `grid`.
///
/// The CFR file has columns `frequency_hz, re, im` and the noise file
/// `frequency_hz, psd_dbm_per_hz`. An optional `realization` column groups
/// rows into several realizations; a noise file without it applies to every
/// CFR realization. PSDs are interpolated in dB and integrated over the bin
/// width.
pub fn import_measured(
    cfr_csv_path: &Path,
    noise_csv_path: &Path,
    grid: &SpectralGrid,
) -> Result<Vec<ChannelRealization>, DatasetError> {
    let cfr_groups = read_groups::<CfrRow, _>(cfr_csv_path, |r| r.realization.clone())?;
    let noise_groups = read_groups::<NoiseRow, _>(noise_csv_path, |r| r.realization.clone())?;
    let centers: Vec<f64> = grid.bin_centers().collect();

    let mut noise_profiles = Vec::with_capacity(noise_groups.len());
    for (id, rows) in &noise_groups {
        let interp = Interpolant::new(
            noise_csv_path,
            rows.iter().map(|r| r.frequency_hz).collect(),
            grid,
        )?;
        let psd: Vec<f64> = rows.iter().map(|r| r.psd_dbm_per_hz).collect();
        let watts: Vec<f64> = centers
            .iter()
            .map(|&f| dbm_to_watts(interp.at(f, &psd)) * grid.bin_width())
            .collect();
        noise_profiles.push((id.clone(), watts));
    }

    let shared = noise_profiles.len() == 1 && noise_profiles[0].0.is_none();
    let mut out = Vec::with_capacity(cfr_groups.len());
    for (id, rows) in &cfr_groups {
        let interp = Interpolant::new(
            cfr_csv_path,
            rows.iter().map(|r| r.frequency_hz).collect(),
            grid,
        )?;
        let re: Vec<f64> = rows.iter().map(|r| r.re).collect();
        let im: Vec<f64> = rows.iter().map(|r| r.im).collect();
        let cfr: Vec<Complex64> = centers
            .iter()
            .map(|&f| Complex64::new(interp.at(f, &re), interp.at(f, &im)))
            .collect();
        let noise = if shared {
            noise_profiles[0].1.clone()
        } else {
            noise_profiles
                .iter()
                .find(|(nid, _)| nid == id)
                .map(|(_, w)| w.clone())
                .ok_or_else(|| DatasetError::Csv {
                    path: noise_csv_path.to_path_buf(),
                    message: format!(
                        "no noise profile for realization {:?}",
                        id.as_deref().unwrap_or("")
                    ),
                })?
        };
        out.push(ChannelRealization::new(*grid, cfr, noise)?);
    }
    Ok(out)
}

/// Summary statistics of nSNR in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsnrStats {
    pub max_db: f64,
    pub mean_db: f64,
    pub min_db: f64,
    pub sd_db: f64,
    pub p90_db: f64,
    pub count: usize,
}

impl NsnrStats {
    pub fn from_db(values: &[f64]) -> Result<Self, DatasetError> {
        if values.is_empty() {
            return Err(DatasetError::Empty);
        }
        let max_db = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_db = values.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(NsnrStats {
            max_db,
            mean_db: mean(values).clamp(min_db, max_db),
            min_db,
            sd_db: sample_sd(values),
            p90_db: percentile(values, 0.9),
            count: values.len(),
        })
    }
}

/// Statistics of one side's nSNR over an ensemble.
pub fn ensemble_stats(pairs: &[WiretapPair], side: Side) -> Result<NsnrStats, DatasetError> {
    let values: Vec<f64> = pairs.iter().map(|p| nsnr(p.side(side)).db()).collect();
    NsnrStats::from_db(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(4, 1e6, 5e6).unwrap()
    }

    fn pair(seed: f64) -> WiretapPair {
        let g = grid();
        let mk = |s: f64| {
            ChannelRealization::new(
                g,
                (0..4)
                    .map(|k| Complex64::new(s + k as f64, -s * 0.5))
                    .collect(),
                (0..4).map(|k| 1e-12 * (1.0 + k as f64 + s)).collect(),
            )
            .unwrap()
        };
        WiretapPair::new(mk(seed), mk(seed / 3.0), Scenario::LongPath, BobBin::Low).unwrap()
    }

    fn bytes(pairs: Vec<WiretapPair>) -> Vec<u8> {
        let mut out = Vec::new();
        EnsembleFile::new(pairs, "abc123", 42)
            .unwrap()
            .write_to(&mut out)
            .unwrap();
        out
    }

    fn header_len(b: &[u8]) -> usize {
        let marker = b"end_header\n";
        b.windows(marker.len()).position(|w| w == marker).unwrap() + marker.len()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let pairs: Vec<_> = (0..10).map(|i| pair(0.1 + i as f64 / 7.0)).collect();
        let b = bytes(pairs.clone());
        let f = EnsembleFile::read_from(Cursor::new(b)).unwrap();
        assert_eq!(f.pairs, pairs);
        assert_eq!(f.header.master_seed, 42);
        assert_eq!(f.header.generator_hash, "abc123");
        assert_eq!(f.header.count, 10);
        assert_eq!(f.header.grid, grid());
    }

    #[test]
    fn truncation_names_record() {
        let b = bytes((0..3).map(|i| pair(i as f64 + 1.0)).collect());
        let h = header_len(&b);
        let rec = record_bytes(4);
        let cut = &b[..h + rec + rec / 2];
        match EnsembleFile::read_from(Cursor::new(cut)) {
            Err(DatasetError::Truncated { record, got, .. }) => {
                assert_eq!(record, 1);
                assert_eq!(got, rec / 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn count_mismatch_detected() {
        let b = bytes((0..3).map(|i| pair(i as f64 + 1.0)).collect());
        let h = header_len(&b);
        let short = &b[..h + 2 * record_bytes(4)];
        assert!(matches!(
            EnsembleFile::read_from(Cursor::new(short)),
            Err(DatasetError::CountMismatch {
                declared: 3,
                found: 2
            })
        ));
        let mut long = b.clone();
        long.extend_from_slice(&b[h..h + record_bytes(4)]);
        assert!(matches!(
            EnsembleFile::read_from(Cursor::new(long)),
            Err(DatasetError::CountMismatch {
                declared: 3,
                found: 4
            })
        ));
    }

    #[test]
    fn non_finite_value_names_record() {
        let mut b = bytes((0..3).map(|i| pair(i as f64 + 1.0)).collect());
        let h = header_len(&b);
        // Eve noise, bin 1, of record 2.
        let off = h + 2 * record_bytes(4) + (8 + 4 + 8 + 1) * 8;
        b[off..off + 8].copy_from_slice(&f64::NAN.to_le_bytes());
        match EnsembleFile::read_from(Cursor::new(b)) {
            Err(DatasetError::NonFinite { record, field, bin }) => {
                assert_eq!((record, field, bin), (2, "Eve noise", 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_headers_rejected() {
        let b = bytes(vec![pair(1.0)]);
        let text = String::from_utf8_lossy(&b[..header_len(&b)]).to_string();
        let cases = [
            text.replace("PLCSEC-ENSEMBLE v1", "SOMETHING ELSE"),
            text.replace("count=1", "count=one"),
            text.replace("scenario=LP\n", ""),
            text.replace("end_header\n", ""),
            text.replace("bin=bin1", "bin=bin7"),
            text.replace("f_stop=5000000", "f_stop=0"),
        ];
        for c in cases {
            assert!(
                matches!(
                    EnsembleFile::read_from(Cursor::new(c.as_bytes().to_vec())),
                    Err(DatasetError::MalformedHeader { .. })
                ),
                "{c}"
            );
        }
    }

    #[test]
    fn mixed_pairs_rejected() {
        let mut other = pair(2.0);
        other = WiretapPair::new(
            other.bob().clone(),
            other.eve().clone(),
            Scenario::ShortPath,
            BobBin::Low,
        )
        .unwrap();
        assert!(matches!(
            EnsembleFile::new(vec![pair(1.0), other], "h", 0),
            Err(DatasetError::Inconsistent {
                record: 1,
                what: "scenario"
            })
        ));
        assert!(matches!(
            EnsembleFile::new(vec![], "h", 0),
            Err(DatasetError::Empty)
        ));
    }

    #[test]
    fn stats_hand_values() {
        let s = NsnrStats::from_db(&[40.0, 60.0]).unwrap();
        assert_eq!(s.mean_db, 50.0);
        assert!((s.sd_db - 200f64.sqrt()).abs() < 1e-12);
        assert_eq!((s.min_db, s.max_db), (40.0, 60.0));
        let d = NsnrStats::from_db(&[3.0; 5]).unwrap();
        assert_eq!(
            (d.max_db, d.mean_db, d.min_db, d.p90_db, d.sd_db),
            (3.0, 3.0, 3.0, 3.0, 0.0)
        );
        assert!(matches!(NsnrStats::from_db(&[]), Err(DatasetError::Empty)));
    }

    #[test]
    fn stats_of_identical_pairs() {
        let pairs = vec![pair(1.0); 4];
        let s = ensemble_stats(&pairs, Side::Bob).unwrap();
        assert_eq!(s.sd_db, 0.0);
        assert_eq!(s.max_db, s.min_db);
        assert_eq!(s.p90_db, s.mean_db);
    }
}
