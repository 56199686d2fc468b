//! Seeded Monte Carlo BLER simulation.
//!
//! Trial `t` at grid point `p` draws all of its randomness (info bits and
//! channel noise) from [`stream_rng`]`(seed, p, t)`, and per-point tallies are
//! integer sums, so every output is independent of the worker count.

use std::io::Write;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{stream_rng, transmit, ChannelParams};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::grand::{DecodeOutcome, Decoder, DEFAULT_CUTOFF};
use crate::polar::{PolarCode, ReliabilitySequence, MAX_CODE_EXPONENT, MIN_CODE_EXPONENT};
use crate::qam::{Constellation, SUPPORTED_ORDERS};

pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: u32,
    pub order: usize,
    pub cutoff: usize,
    pub ebn0_grid: Vec<f64>,
    pub trials_per_point: u64,
    pub master_seed: u64,
}

impl SimConfig {
    pub fn new(n: u32, order: usize, ebn0_grid: Vec<f64>) -> Self {
        Self { n, order, cutoff: DEFAULT_CUTOFF, ebn0_grid, trials_per_point: DEFAULT_TRIALS, master_seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(MIN_CODE_EXPONENT..=MAX_CODE_EXPONENT).contains(&self.n) {
            return Err(Error::Config(format!("n = {} outside 5..=10", self.n)));
        }
        if !SUPPORTED_ORDERS.contains(&self.order) {
            return Err(Error::Config(format!("{}-QAM is not supported", self.order)));
        }
        if self.trials_per_point == 0 {
            return Err(Error::Config("trials per point must be at least 1".into()));
        }
        if self.ebn0_grid.is_empty() {
            return Err(Error::Config("Eb/N0 grid is empty".into()));
        }
        if let Some(x) = self.ebn0_grid.iter().find(|x| x.is_nan() || **x == f64::NEG_INFINITY) {
            return Err(Error::Config(format!("invalid Eb/N0 value {x}")));
        }
        Ok(())
    }

    pub fn block_length(&self) -> usize {
        1 << self.n
    }

    /// Symbols per codeword, `⌈N / log2 M⌉`.
    pub fn symbols_per_block(&self) -> usize {
        let bits = self.order.trailing_zeros() as usize;
        self.block_length().div_ceil(bits)
    }

    /// Cut-off after clamping to the number of symbols per block.
    pub fn effective_cutoff(&self) -> usize {
        self.cutoff.min(self.symbols_per_block())
    }

    /// `bler_N{N}_M{M}_S{S}.{ext}`
    pub fn default_file_name(&self, format: OutputFormat) -> String {
        format!("bler_N{}_M{}_S{}.{}", self.block_length(), self.order, self.cutoff, format.extension())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialKind {
    Success,
    Mismatch,
    Abandoned,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub kind: TrialKind,
    pub queries: u64,
    pub patterns_valid: u64,
    /// Hard decisions alone differ from the transmitted codeword.
    pub uncoded_error: bool,
}

/// Random info word, encode, modulate, add noise, decode.
pub fn run_trial<R: RngCore + ?Sized>(decoder: &Decoder<'_>, params: &ChannelParams, rng: &mut R) -> Result<TrialOutcome> {
    let code = decoder.code();
    let cst = decoder.constellation();
    let info = BitVector::from_bools((0..code.dimension()).map(|_| rng.random::<bool>()));
    let codeword = code.encode(&info)?;
    let symbols = cst.bits_to_symbols(&codeword);
    let received = transmit(&symbols, params, rng);

    let hard: Vec<_> = received.iter().map(|&r| cst.hard_demodulate(r)).collect();
    let uncoded_error = cst.symbols_to_bits(&hard, code.block_length())? != codeword;

    let result = decoder.decode(&received)?;
    let kind = match &result.outcome {
        DecodeOutcome::Decoded { codeword: c, .. } if *c == codeword => TrialKind::Success,
        DecodeOutcome::Decoded { .. } => TrialKind::Mismatch,
        DecodeOutcome::Abandoned => TrialKind::Abandoned,
    };
    Ok(TrialOutcome { kind, queries: result.queries_checked, patterns_valid: result.patterns_valid, uncoded_error })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlerPoint {
    pub ebn0_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub mismatches: u64,
    pub abandonments: u64,
    /// Blocks whose hard decisions alone were wrong, on the same noise.
    pub uncoded_block_errors: u64,
    pub bler: f64,
    pub mean_queries: f64,
    pub mean_patterns_valid: f64,
}

impl BlerPoint {
    pub fn successes(&self) -> u64 {
        self.trials - self.block_errors
    }

    pub fn uncoded_bler(&self) -> f64 {
        self.uncoded_block_errors as f64 / self.trials as f64
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    mismatches: u64,
    abandonments: u64,
    uncoded: u64,
    queries: u64,
    valid: u64,
}

impl Tally {
    fn of(o: &TrialOutcome) -> Self {
        Self {
            trials: 1,
            mismatches: u64::from(o.kind == TrialKind::Mismatch),
            abandonments: u64::from(o.kind == TrialKind::Abandoned),
            uncoded: u64::from(o.uncoded_error),
            queries: o.queries,
            valid: o.patterns_valid,
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            mismatches: self.mismatches + o.mismatches,
            abandonments: self.abandonments + o.abandonments,
            uncoded: self.uncoded + o.uncoded,
            queries: self.queries + o.queries,
            valid: self.valid + o.valid,
        }
    }

    fn into_point(self, ebn0_db: f64) -> BlerPoint {
        let t = self.trials as f64;
        let block_errors = self.mismatches + self.abandonments;
        BlerPoint {
            ebn0_db,
            trials: self.trials,
            block_errors,
            mismatches: self.mismatches,
            abandonments: self.abandonments,
            uncoded_block_errors: self.uncoded,
            bler: block_errors as f64 / t,
            mean_queries: self.queries as f64 / t,
            mean_patterns_valid: self.valid as f64 / t,
        }
    }
}

/// One BLER point per grid value. `workers == 0` uses rayon's default pool size.
pub fn run_bler(config: &SimConfig, seq: &ReliabilitySequence, workers: usize) -> Result<Vec<BlerPoint>> {
    config.validate()?;
    let code = PolarCode::build(seq, config.n)?;
    let decoder = Decoder::new(&code, Constellation::new(config.order)?, config.cutoff)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    config
        .ebn0_grid
        .iter()
        .enumerate()
        .map(|(p, &ebn0)| {
            let params = ChannelParams::new(config.order, ebn0)?;
            let tally = pool.install(|| {
                (0..config.trials_per_point)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = stream_rng(config.master_seed, p as u64, t);
                        run_trial(&decoder, &params, &mut rng).map(|o| Tally::of(&o))
                    })
                    .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
            })?;
            Ok(tally.into_point(ebn0))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

pub const CSV_HEADER: &str = "ebn0_db,trials,block_errors,mismatches,abandonments,bler,mean_queries";

/// Formats a value with six significant digits, `%g` style.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}"))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct SimReport {
    pub config: SimConfig,
    pub points: Vec<BlerPoint>,
}

pub fn write_csv<W: Write>(points: &[BlerPoint], mut sink: W) -> Result<()> {
    writeln!(sink, "{CSV_HEADER}")?;
    for p in points {
        writeln!(
            sink,
            "{},{},{},{},{},{},{}",
            format_sig6(p.ebn0_db),
            p.trials,
            p.block_errors,
            p.mismatches,
            p.abandonments,
            format_sig6(p.bler),
            format_sig6(p.mean_queries)
        )?;
    }
    sink.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(config: &SimConfig, points: &[BlerPoint], mut sink: W) -> Result<()> {
    let report = SimReport { config: config.clone(), points: points.to_vec() };
    serde_json::to_writer_pretty(&mut sink, &report).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(sink)?;
    sink.flush()?;
    Ok(())
}

pub fn write_results<W: Write>(config: &SimConfig, points: &[BlerPoint], format: OutputFormat, sink: W) -> Result<()> {
    match format {
        OutputFormat::Csv => write_csv(points, sink),
        OutputFormat::Json => write_json(config, points, sink),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(ebn0: f64) -> BlerPoint {
        Tally { trials: 3, mismatches: 1, abandonments: 0, uncoded: 2, queries: 100, valid: 4 }.into_point(ebn0)
    }

    #[test]
    fn sig6_formatting() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (2.5, "2.5"),
            (-3.0, "-3"),
            (1.0 / 3.0, "0.333333"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e6"),
            (0.000123456789, "0.000123457"),
            (0.0000123, "1.23e-5"),
            (65536.0, "65536"),
        ];
        for (x, s) in cases {
            assert_eq!(format_sig6(x), s, "{x}");
        }
    }

    #[test]
    fn csv_shapes() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));

        let mut buf = Vec::new();
        write_csv(&[point(2.0)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1).unwrap(), "2,3,1,1,0,0.333333,33.3333");
    }

    #[test]
    fn json_roundtrip() {
        let cfg = SimConfig::new(5, 16, vec![0.0, 2.5]);
        let pts = vec![point(0.0), point(2.5)];
        let mut buf = Vec::new();
        write_json(&cfg, &pts, &mut buf).unwrap();
        let back: SimReport = serde_json::from_slice(&buf).unwrap();
        assert_eq!(back, SimReport { config: cfg, points: pts });
    }

    #[test]
    fn sink_failure_is_reported() {
        struct Broken;
        impl Write for Broken {
            fn write(&mut self, _: &[u8]) -> std::io::Result<usize> {
                Err(std::io::Error::other("disk full"))
            }
            fn flush(&mut self) -> std::io::Result<()> {
                Ok(())
            }
        }
        assert!(matches!(write_csv(&[], Broken), Err(Error::Io(_))));
    }

    #[test]
    fn config_validation() {
        let ok = SimConfig::new(5, 4, vec![0.0]);
        assert!(ok.validate().is_ok());
        assert!(SimConfig { n: 4, ..ok.clone() }.validate().is_err());
        assert!(SimConfig { order: 8, ..ok.clone() }.validate().is_err());
        assert!(SimConfig { trials_per_point: 0, ..ok.clone() }.validate().is_err());
        assert!(SimConfig { ebn0_grid: vec![], ..ok.clone() }.validate().is_err());
        assert!(SimConfig { ebn0_grid: vec![f64::NAN], ..ok }.validate().is_err());
    }

    #[test]
    fn clamping_and_names() {
        let cfg = SimConfig::new(5, 256, vec![10.0]);
        assert_eq!(cfg.symbols_per_block(), 4);
        assert_eq!(cfg.effective_cutoff(), 4);
        assert_eq!(SimConfig::new(5, 64, vec![0.0]).symbols_per_block(), 6);
        assert_eq!(cfg.default_file_name(OutputFormat::Csv), "bler_N32_M256_S8.csv");
    }

    #[test]
    fn noiseless_trial_succeeds_and_replays() {
        let code = PolarCode::build(&ReliabilitySequence::nr(), 5).unwrap();
        let dec = Decoder::new(&code, Constellation::new(16).unwrap(), 8).unwrap();
        let quiet = ChannelParams::noiseless(16).unwrap();
        let o = run_trial(&dec, &quiet, &mut stream_rng(1, 0, 0)).unwrap();
        assert_eq!(o.kind, TrialKind::Success);
        assert!(!o.uncoded_error);

        let noisy = ChannelParams::new(16, 3.0).unwrap();
        let a = run_trial(&dec, &noisy, &mut stream_rng(1, 0, 5)).unwrap();
        let b = run_trial(&dec, &noisy, &mut stream_rng(1, 0, 5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_trial_point() {
        let mut cfg = SimConfig::new(5, 4, vec![40.0]);
        cfg.trials_per_point = 1;
        let pts = run_bler(&cfg, &ReliabilitySequence::nr(), 1).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].bler, 0.0);
        assert_eq!(pts[0].successes(), 1);
    }
}
