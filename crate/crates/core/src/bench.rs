//! Measurement harness for the encryption-time decomposition.
//!
//! Each frame protection run is split into its six named components —
//! MIC IV, the two AAD headers, the MIC calculation, the counter preload,
//! and the counter-mode encryption of payload plus MIC. The CBC-MAC time
//! is the sum of the first four, the counter-mode time the sum of the
//! last two, and the total their sum; throughput is payload bytes over
//! total time. Sweeps run both the sequential and the interleaved engine
//! over the same seeded payloads and a comparison report gives per-size
//! percent changes plus a least-squares fit of total time against size.
//!
//! Timing uses the monotonic [`Instant`] clock with a start/stop bracket
//! around each component per iteration. Where the clock cannot resolve a
//! single call, set [`BenchConfig::batch`] (1024 is a sensible value) to
//! time that many back-to-back calls and divide.
//!
//! Cipher work is also counted exactly: `cipher_calls_total` is the
//! measured number of block-cipher invocations on the MIC path (3 + m for
//! m payload blocks) and `cipher_calls_critical_path` the longest
//! sequentially dependent chain (3 + ceil(m / N)). The counts are
//! timing-independent, which is what makes the parallelism claim
//! checkable without wall clocks.
//!
//! Sizes beyond the 802.11 MSDU bound are measured through the same
//! internal routines the frame API uses, minus the bound check; the
//! 2-octet counter field wraps past 65535 blocks, which only a 1 MiB+
//! sweep size can reach.

use crate::aes::{expand_key, Block, Cipher, Key128};
use crate::ccmp::{
    construct_mic_header1, construct_mic_header2, ctr_crypt, ctr_preload, mic_iv_unchecked,
    MicEngine, MpduHeader,
};
use crate::icbc::{critical_path_cipher_calls, IcbcConfig, IcbcError};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::hint::black_box;
use std::io::{self, BufRead, Write};
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::OnceLock;
use std::time::Instant;
use thiserror::Error;

/// The paper's payload ladder: 1–4 blocks of 16 bytes.
pub const PAPER_SIZES: [usize; 4] = [16, 32, 48, 64];

/// Extended sizes where thread-level interleaving gains are measurable.
pub const EXTENDED_SIZES: [usize; 4] = [1 << 10, 16 << 10, 256 << 10, 1 << 20];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchError {
    #[error("reps must be at least 1")]
    InvalidReps,
    #[error(
        "clock resolution {resolution_ns} ns is coarser than 1 µs; \
         set BenchConfig::batch (e.g. 1024) for batched timing"
    )]
    ClockTooCoarse { resolution_ns: u64 },
    #[error("non-positive encryption time {0} ns")]
    InvalidTime(f64),
    #[error("baseline and optimized records cover different sizes")]
    SizeMismatch,
    #[error(transparent)]
    Icbc(#[from] IcbcError),
    #[error("malformed benchmark CSV: {0}")]
    Csv(String),
}

/// A cipher wrapper that counts `encrypt` invocations. Shareable across
/// lane workers; the count is exact regardless of scheduling.
pub struct CountingCipher<'a, C: Cipher> {
    inner: &'a C,
    calls: AtomicU64,
}

impl<'a, C: Cipher> CountingCipher<'a, C> {
    pub fn new(inner: &'a C) -> Self {
        CountingCipher {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.calls.store(0, Ordering::Relaxed);
    }
}

impl<C: Cipher> Cipher for CountingCipher<'_, C> {
    fn encrypt(&self, block: Block) -> Block {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.encrypt(block)
    }
}

/// Which MIC engine a record was measured with.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Sequential,
    Icbc,
}

impl From<&MicEngine> for EngineKind {
    fn from(engine: &MicEngine) -> Self {
        match engine {
            MicEngine::Sequential => EngineKind::Sequential,
            MicEngine::Interleaved(_) => EngineKind::Icbc,
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EngineKind::Sequential => "sequential",
            EngineKind::Icbc => "icbc",
        })
    }
}

impl FromStr for EngineKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "sequential" => Ok(EngineKind::Sequential),
            "icbc" => Ok(EngineKind::Icbc),
            other => Err(BenchError::Csv(format!("unknown engine {other:?}"))),
        }
    }
}

/// Sweep parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    /// Payload sizes in bytes.
    pub sizes: Vec<usize>,
    /// Timed repetitions per size and engine.
    pub reps: u32,
    /// Leading repetitions discarded before averaging.
    pub warmup: u32,
    /// Lane count for the interleaved arm.
    pub lanes: usize,
    /// Worker count for the interleaved arm.
    pub workers: usize,
    /// Calls per timing bracket; 1 times single calls, larger values
    /// time batches for coarse clocks.
    pub batch: u32,
}

impl BenchConfig {
    /// Warmup defaults to 10% of reps, at least 3.
    pub fn new(
        sizes: Vec<usize>,
        reps: u32,
        lanes: usize,
        workers: usize,
    ) -> Result<Self, BenchError> {
        let config = BenchConfig {
            sizes,
            reps,
            warmup: (reps / 10).max(3),
            lanes,
            workers,
            batch: 1,
        };
        config.validate()?;
        Ok(config)
    }

    /// The paper's 16–64-byte ladder plus the extended sizes.
    pub fn default_sizes() -> Vec<usize> {
        PAPER_SIZES.iter().chain(EXTENDED_SIZES.iter()).copied().collect()
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.reps == 0 {
            return Err(BenchError::InvalidReps);
        }
        IcbcConfig::new(self.lanes, self.workers)?;
        Ok(())
    }
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: Self::default_sizes(),
            reps: 1000,
            warmup: 100,
            lanes: 2,
            workers: 2,
            batch: 1,
        }
    }
}

/// One measured row: per-component means in nanoseconds over the reps,
/// derived sums, throughput, and the cipher-call counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub engine: EngineKind,
    pub lanes: usize,
    pub workers: usize,
    pub size_bytes: usize,
    pub reps: u32,
    pub t_mic_iv_ns: f64,
    pub t_header1_ns: f64,
    pub t_header2_ns: f64,
    pub t_calc_mic_ns: f64,
    /// Sum of the four CBC-MAC components.
    pub t_cbc_mac_ns: f64,
    pub t_ctr_preload_ns: f64,
    pub t_encrypt_mpdu_ns: f64,
    /// Sum of the two counter-mode components.
    pub t_counter_ns: f64,
    /// `t_cbc_mac_ns + t_counter_ns`, exactly.
    pub t_total_ns: f64,
    pub stddev_total_ns: f64,
    pub throughput_bps: f64,
    /// Measured block-cipher invocations on the MIC path: 3 + m.
    pub cipher_calls_total: u64,
    /// Longest sequential chain on the MIC path: 3 + ceil(m / lanes).
    pub cipher_calls_critical_path: u64,
}

impl BenchRecord {
    pub const CSV_HEADER: &'static str = "engine,lanes,workers,size_bytes,reps,\
t_mic_iv_ns,t_header1_ns,t_header2_ns,t_calc_mic_ns,t_cbc_mac_ns,\
t_ctr_preload_ns,t_encrypt_mpdu_ns,t_counter_ns,t_total_ns,stddev_total_ns,\
throughput_Bps,cipher_calls_total,cipher_calls_critical_path";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.engine,
            self.lanes,
            self.workers,
            self.size_bytes,
            self.reps,
            self.t_mic_iv_ns,
            self.t_header1_ns,
            self.t_header2_ns,
            self.t_calc_mic_ns,
            self.t_cbc_mac_ns,
            self.t_ctr_preload_ns,
            self.t_encrypt_mpdu_ns,
            self.t_counter_ns,
            self.t_total_ns,
            self.stddev_total_ns,
            self.throughput_bps,
            self.cipher_calls_total,
            self.cipher_calls_critical_path,
        )
    }

    pub fn from_csv_row(line: &str) -> Result<Self, BenchError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 18 {
            return Err(BenchError::Csv(format!(
                "expected 18 fields, got {}",
                fields.len()
            )));
        }
        fn num<T: FromStr>(field: &str, name: &str) -> Result<T, BenchError> {
            field
                .parse()
                .map_err(|_| BenchError::Csv(format!("bad {name}: {field:?}")))
        }
        Ok(BenchRecord {
            engine: fields[0].parse()?,
            lanes: num(fields[1], "lanes")?,
            workers: num(fields[2], "workers")?,
            size_bytes: num(fields[3], "size_bytes")?,
            reps: num(fields[4], "reps")?,
            t_mic_iv_ns: num(fields[5], "t_mic_iv_ns")?,
            t_header1_ns: num(fields[6], "t_header1_ns")?,
            t_header2_ns: num(fields[7], "t_header2_ns")?,
            t_calc_mic_ns: num(fields[8], "t_calc_mic_ns")?,
            t_cbc_mac_ns: num(fields[9], "t_cbc_mac_ns")?,
            t_ctr_preload_ns: num(fields[10], "t_ctr_preload_ns")?,
            t_encrypt_mpdu_ns: num(fields[11], "t_encrypt_mpdu_ns")?,
            t_counter_ns: num(fields[12], "t_counter_ns")?,
            t_total_ns: num(fields[13], "t_total_ns")?,
            stddev_total_ns: num(fields[14], "stddev_total_ns")?,
            throughput_bps: num(fields[15], "throughput_Bps")?,
            cipher_calls_total: num(fields[16], "cipher_calls_total")?,
            cipher_calls_critical_path: num(fields[17], "cipher_calls_critical_path")?,
        })
    }
}

/// Writes the record CSV: one header row, then one row per record.
pub fn write_csv<W: Write>(records: &[BenchRecord], out: &mut W) -> io::Result<()> {
    writeln!(out, "{}", BenchRecord::CSV_HEADER)?;
    for record in records {
        writeln!(out, "{}", record.to_csv_row())?;
    }
    Ok(())
}

/// Reads a record CSV produced by [`write_csv`].
pub fn read_csv<R: BufRead>(input: R) -> Result<Vec<BenchRecord>, BenchError> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| BenchError::Csv("empty file".into()))?
        .map_err(|e| BenchError::Csv(e.to_string()))?;
    if header.trim_end() != BenchRecord::CSV_HEADER {
        return Err(BenchError::Csv("unexpected header row".into()));
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line.map_err(|e| BenchError::Csv(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(BenchRecord::from_csv_row(line.trim_end())?);
    }
    Ok(records)
}

/// Smallest nonzero step the monotonic clock can report, in nanoseconds.
/// Measured once per process.
pub fn clock_resolution_ns() -> u64 {
    static RESOLUTION: OnceLock<u64> = OnceLock::new();
    *RESOLUTION.get_or_init(|| {
        let mut best = u64::MAX;
        for _ in 0..64 {
            let start = Instant::now();
            let mut elapsed = start.elapsed();
            while elapsed.is_zero() {
                elapsed = start.elapsed();
            }
            best = best.min(elapsed.as_nanos() as u64);
        }
        best.max(1)
    })
}

/// Times one call (or a batch of `batch` calls, divided) and hands back
/// the last return value.
fn bracket<T>(batch: u32, mut f: impl FnMut() -> T) -> (f64, T) {
    if batch <= 1 {
        let start = Instant::now();
        let value = black_box(f());
        (start.elapsed().as_nanos() as f64, value)
    } else {
        let start = Instant::now();
        for _ in 1..batch {
            black_box(f());
        }
        let value = black_box(f());
        (start.elapsed().as_nanos() as f64 / f64::from(batch), value)
    }
}

/// Bytes per second from a payload size and total time.
pub fn throughput(size_bytes: u64, t_total_ns: f64) -> Result<f64, BenchError> {
    if t_total_ns.is_nan() || t_total_ns <= 0.0 {
        return Err(BenchError::InvalidTime(t_total_ns));
    }
    Ok(size_bytes as f64 * 1e9 / t_total_ns)
}

/// Measures one (size, engine) cell: warmup plus `reps` iterations, each
/// timing the six components separately; means and the stddev of the
/// per-iteration totals are reported. Cipher-call counts come from one
/// extra instrumented iteration, not accumulated across reps.
pub fn time_components(
    key: &Key128,
    header: &MpduHeader,
    payload: &[u8],
    config: &BenchConfig,
    engine: MicEngine,
) -> Result<BenchRecord, BenchError> {
    config.validate()?;
    if config.batch <= 1 {
        let resolution_ns = clock_resolution_ns();
        if resolution_ns > 1_000 {
            return Err(BenchError::ClockTooCoarse { resolution_ns });
        }
    }

    let schedule = expand_key(key);
    let dlen = (payload.len() & 0xffff) as u16;
    let mut sums = [0f64; 6];
    let mut totals = Vec::with_capacity(config.reps as usize);

    for iteration in 0..config.warmup + config.reps {
        let (t_iv, b0) = bracket(config.batch, || mic_iv_unchecked(header, dlen));
        let (t_h1, aad1) = bracket(config.batch, || construct_mic_header1(header));
        let (t_h2, aad2) = bracket(config.batch, || construct_mic_header2(header));
        let (t_mic, mic) = bracket(config.batch, || {
            engine.compute(&schedule, b0, aad1, aad2, payload)
        });
        let (t_pre, _preload) = bracket(config.batch, || ctr_preload(header, 0));
        let (t_enc, _out) = bracket(config.batch, || {
            ctr_crypt(&schedule, header, payload, mic.0)
        });

        if iteration >= config.warmup {
            let components = [t_iv, t_h1, t_h2, t_mic, t_pre, t_enc];
            for (sum, t) in sums.iter_mut().zip(components.iter()) {
                *sum += t;
            }
            totals.push(components.iter().sum::<f64>());
        }
    }

    let reps = f64::from(config.reps);
    let means: Vec<f64> = sums.iter().map(|s| s / reps).collect();
    let t_cbc_mac = means[0] + means[1] + means[2] + means[3];
    let t_counter = means[4] + means[5];
    let t_total = t_cbc_mac + t_counter;

    let mean_total = totals.iter().sum::<f64>() / reps;
    let stddev = if totals.len() > 1 {
        let var = totals
            .iter()
            .map(|t| (t - mean_total).powi(2))
            .sum::<f64>()
            / (totals.len() - 1) as f64;
        var.sqrt()
    } else {
        0.0
    };

    // One representative instrumented iteration for the MIC-path count.
    let counting = CountingCipher::new(&schedule);
    let b0 = mic_iv_unchecked(header, dlen);
    let aad1 = construct_mic_header1(header);
    let aad2 = construct_mic_header2(header);
    black_box(engine.compute(&counting, b0, aad1, aad2, payload));
    let cipher_calls_total = counting.calls();
    let m = payload.len().div_ceil(16) as u64;
    let cipher_calls_critical_path = critical_path_cipher_calls(m, engine.lanes())?;

    let throughput_bps = if payload.is_empty() {
        0.0
    } else {
        throughput(payload.len() as u64, t_total)?
    };

    Ok(BenchRecord {
        engine: EngineKind::from(&engine),
        lanes: engine.lanes(),
        workers: engine.workers(),
        size_bytes: payload.len(),
        reps: config.reps,
        t_mic_iv_ns: means[0],
        t_header1_ns: means[1],
        t_header2_ns: means[2],
        t_calc_mic_ns: means[3],
        t_cbc_mac_ns: t_cbc_mac,
        t_ctr_preload_ns: means[4],
        t_encrypt_mpdu_ns: means[5],
        t_counter_ns: t_counter,
        t_total_ns: t_total,
        stddev_total_ns: stddev,
        throughput_bps,
        cipher_calls_total,
        cipher_calls_critical_path,
    })
}

/// Deterministic pseudo-random payload seeded from the size, so every
/// engine and every invocation hashes identical bytes.
pub fn seeded_payload(size: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(size as u64);
    let mut out = vec![0u8; size];
    rng.fill_bytes(&mut out);
    out
}

/// Fixed key used by the sweep.
pub fn bench_key() -> Key128 {
    Key128(std::array::from_fn(|i| i as u8))
}

/// Fixed header used by the sweep.
pub fn bench_header() -> MpduHeader {
    MpduHeader::new(
        0x0008,
        [0x02, 0x00, 0x00, 0x00, 0x00, 0x11],
        [0x02, 0x00, 0x00, 0x00, 0x00, 0x22],
        [0x02, 0x00, 0x00, 0x00, 0x00, 0x33],
        0,
        0,
        1,
    )
    .expect("constant header is valid")
}

/// Runs the size sweep: one sequential and one interleaved record per
/// size, sizes ascending, sequential first.
pub fn run_suite(config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    config.validate()?;
    let mut sizes = config.sizes.clone();
    sizes.sort_unstable();

    let key = bench_key();
    let header = bench_header();
    let icbc = MicEngine::Interleaved(IcbcConfig::new(config.lanes, config.workers)?);

    let mut records = Vec::with_capacity(sizes.len() * 2);
    for size in sizes {
        let payload = seeded_payload(size);
        records.push(time_components(
            &key,
            &header,
            &payload,
            config,
            MicEngine::Sequential,
        )?);
        records.push(time_components(&key, &header, &payload, config, icbc)?);
    }
    Ok(records)
}

/// Least-squares fit of y against x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(points: &[(f64, f64)]) -> LinearFit {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

/// One size's baseline-vs-optimized deltas.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub size_bytes: usize,
    pub baseline_t_total_ns: f64,
    pub optimized_t_total_ns: f64,
    pub pct_time_change: f64,
    pub baseline_throughput_bps: f64,
    pub optimized_throughput_bps: f64,
    pub pct_throughput_change: f64,
    pub pct_calc_mic_change: f64,
    pub critical_path_ratio: f64,
}

/// The full comparison: per-size rows plus a time-vs-size fit per engine.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
    pub baseline_fit: LinearFit,
    pub optimized_fit: LinearFit,
}

impl ComparisonReport {
    pub const CSV_HEADER: &'static str = "size_bytes,baseline_t_total_ns,optimized_t_total_ns,\
pct_time_change,baseline_throughput_Bps,optimized_throughput_Bps,pct_throughput_change,\
pct_calc_mic_change,critical_path_ratio";

    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                row.size_bytes,
                row.baseline_t_total_ns,
                row.optimized_t_total_ns,
                row.pct_time_change,
                row.baseline_throughput_bps,
                row.optimized_throughput_bps,
                row.pct_throughput_change,
                row.pct_calc_mic_change,
                row.critical_path_ratio,
            )?;
        }
        Ok(())
    }
}

fn pct_change(baseline: f64, optimized: f64) -> f64 {
    if baseline == 0.0 {
        0.0
    } else {
        (optimized - baseline) / baseline * 100.0
    }
}

/// Pairs baseline and optimized records size by size.
pub fn compare(
    baseline: &[BenchRecord],
    optimized: &[BenchRecord],
) -> Result<ComparisonReport, BenchError> {
    if baseline.len() != optimized.len()
        || baseline
            .iter()
            .zip(optimized.iter())
            .any(|(b, o)| b.size_bytes != o.size_bytes)
    {
        return Err(BenchError::SizeMismatch);
    }

    let rows = baseline
        .iter()
        .zip(optimized.iter())
        .map(|(b, o)| ComparisonRow {
            size_bytes: b.size_bytes,
            baseline_t_total_ns: b.t_total_ns,
            optimized_t_total_ns: o.t_total_ns,
            pct_time_change: pct_change(b.t_total_ns, o.t_total_ns),
            baseline_throughput_bps: b.throughput_bps,
            optimized_throughput_bps: o.throughput_bps,
            pct_throughput_change: pct_change(b.throughput_bps, o.throughput_bps),
            pct_calc_mic_change: pct_change(b.t_calc_mic_ns, o.t_calc_mic_ns),
            critical_path_ratio: o.cipher_calls_critical_path as f64
                / b.cipher_calls_critical_path as f64,
        })
        .collect();

    let points = |records: &[BenchRecord]| -> Vec<(f64, f64)> {
        records
            .iter()
            .map(|r| (r.size_bytes as f64, r.t_total_ns))
            .collect()
    };
    Ok(ComparisonReport {
        rows,
        baseline_fit: linear_fit(&points(baseline)),
        optimized_fit: linear_fit(&points(optimized)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> BenchConfig {
        BenchConfig {
            sizes: vec![16, 32],
            reps: 3,
            warmup: 1,
            lanes: 2,
            workers: 1,
            batch: 1,
        }
    }

    #[test]
    fn throughput_arithmetic() {
        assert_eq!(throughput(64, 2000.0).unwrap(), 32_000_000.0);
        assert_eq!(throughput(16, 1000.0).unwrap(), 16_000_000.0);
        assert_eq!(
            throughput(128, 2000.0).unwrap(),
            2.0 * throughput(64, 2000.0).unwrap()
        );
        assert!(matches!(
            throughput(64, 0.0),
            Err(BenchError::InvalidTime(_))
        ));
        assert!(matches!(
            throughput(64, -1.0),
            Err(BenchError::InvalidTime(_))
        ));
    }

    #[test]
    fn record_identities_hold() {
        let record = time_components(
            &bench_key(),
            &bench_header(),
            &seeded_payload(64),
            &tiny_config(),
            MicEngine::Sequential,
        )
        .unwrap();

        assert_eq!(
            record.t_total_ns,
            record.t_cbc_mac_ns + record.t_counter_ns
        );
        assert_eq!(
            record.t_cbc_mac_ns,
            record.t_mic_iv_ns
                + record.t_header1_ns
                + record.t_header2_ns
                + record.t_calc_mic_ns
        );
        let product = record.throughput_bps * record.t_total_ns * 1e-9;
        assert!((product - 64.0).abs() <= 1e-9 * 64.0);
    }

    #[test]
    fn cipher_call_counts_at_size_64() {
        let config = tiny_config();
        let payload = seeded_payload(64);

        let seq = time_components(
            &bench_key(),
            &bench_header(),
            &payload,
            &config,
            MicEngine::Sequential,
        )
        .unwrap();
        assert_eq!(seq.cipher_calls_total, 7);
        assert_eq!(seq.cipher_calls_critical_path, 7);

        let engine = MicEngine::Interleaved(IcbcConfig::new(2, 1).unwrap());
        let icbc = time_components(&bench_key(), &bench_header(), &payload, &config, engine)
            .unwrap();
        assert_eq!(icbc.cipher_calls_total, 7);
        assert_eq!(icbc.cipher_calls_critical_path, 5);
    }

    #[test]
    fn run_suite_shape_and_order() {
        let records = run_suite(&tiny_config()).unwrap();
        assert_eq!(records.len(), 4);
        assert_eq!(records[0].size_bytes, 16);
        assert_eq!(records[0].engine, EngineKind::Sequential);
        assert_eq!(records[1].size_bytes, 16);
        assert_eq!(records[1].engine, EngineKind::Icbc);
        assert_eq!(records[2].size_bytes, 32);
        assert_eq!(records[3].size_bytes, 32);
    }

    #[test]
    fn default_sizes_include_the_paper_ladder() {
        let sizes = BenchConfig::default_sizes();
        for s in PAPER_SIZES {
            assert!(sizes.contains(&s));
        }
        assert!(sizes.contains(&(1 << 20)));
    }

    #[test]
    fn seeded_payload_is_deterministic() {
        assert_eq!(seeded_payload(100), seeded_payload(100));
        assert_ne!(seeded_payload(100)[..16], seeded_payload(16)[..]);
    }

    #[test]
    fn compare_identical_inputs_is_all_zero() {
        let records = run_suite(&tiny_config()).unwrap();
        let seq: Vec<_> = records
            .iter()
            .filter(|r| r.engine == EngineKind::Sequential)
            .cloned()
            .collect();
        let report = compare(&seq, &seq).unwrap();
        for row in &report.rows {
            assert_eq!(row.pct_time_change, 0.0);
            assert_eq!(row.pct_throughput_change, 0.0);
            assert_eq!(row.pct_calc_mic_change, 0.0);
            assert_eq!(row.critical_path_ratio, 1.0);
        }
    }

    #[test]
    fn compare_thirty_percent_example() {
        let mut base = time_components(
            &bench_key(),
            &bench_header(),
            &seeded_payload(16),
            &tiny_config(),
            MicEngine::Sequential,
        )
        .unwrap();
        base.t_total_ns = 100.0;
        base.throughput_bps = throughput(16, 100.0).unwrap();
        let mut opt = base.clone();
        opt.t_total_ns = 70.0;
        opt.throughput_bps = throughput(16, 70.0).unwrap();

        let report = compare(&[base], &[opt]).unwrap();
        assert!((report.rows[0].pct_time_change - -30.0).abs() < 1e-12);
        assert!((report.rows[0].pct_throughput_change - 42.857142857142854).abs() < 1e-9);
    }

    #[test]
    fn compare_rejects_size_mismatch() {
        let records = run_suite(&tiny_config()).unwrap();
        assert_eq!(
            compare(&records[0..1], &records[3..4]),
            Err(BenchError::SizeMismatch)
        );
        assert_eq!(
            compare(&records[0..1], &records[1..3]),
            Err(BenchError::SizeMismatch)
        );
    }

    #[test]
    fn linear_fit_recovers_an_exact_line() {
        let points: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 3.0 * i as f64 + 7.0)).collect();
        let fit = linear_fit(&points);
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept - 7.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let records = run_suite(&tiny_config()).unwrap();
        let mut buf = Vec::new();
        write_csv(&records, &mut buf).unwrap();
        let parsed = read_csv(buf.as_slice()).unwrap();
        assert_eq!(parsed, records);
    }

    #[test]
    fn csv_rejects_malformed_rows() {
        assert!(matches!(
            BenchRecord::from_csv_row("sequential,1,1"),
            Err(BenchError::Csv(_))
        ));
        assert!(matches!(
            read_csv("not,a,header\n".as_bytes()),
            Err(BenchError::Csv(_))
        ));
        assert!(matches!(
            "warp".parse::<EngineKind>(),
            Err(BenchError::Csv(_))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            BenchConfig::new(vec![16], 0, 1, 1),
            Err(BenchError::InvalidReps)
        ));
        assert!(matches!(
            BenchConfig::new(vec![16], 10, 0, 1),
            Err(BenchError::Icbc(_))
        ));
        let config = BenchConfig::new(vec![16], 100, 2, 2).unwrap();
        assert_eq!(config.warmup, 10);
        let config = BenchConfig::new(vec![16], 10, 2, 2).unwrap();
        assert_eq!(config.warmup, 3);
    }

    #[test]
    fn clock_resolves_on_this_host() {
        // The harness requires a sub-microsecond clock unless batching.
        assert!(clock_resolution_ns() >= 1);
    }
}
