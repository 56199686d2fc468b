//! Massively parallel GRAND over M-QAM.
//!
//! Every received symbol is scored with [`likelihood`](crate::qam::likelihood);
//! the `S` least reliable symbols are cut off and each contributes its hard
//! decision plus up to three near-neighbour candidates. Every joint choice
//! (a test error pattern, at most `4^S` of them) is applied to the hard
//! decisions and checked against the parity-check matrix. Among the patterns
//! with a zero syndrome the decoder returns the word closest to the received
//! samples, ties going to the earliest pattern in graded order.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::pmult::{pmult, RowIndexSets};
use crate::polar::PolarCode;
use crate::qam::{Constellation, Point, ReceivedSymbol, SymbolReliability};

/// Cut-off used when none is given.
pub const DEFAULT_CUTOFF: usize = 8;

/// Clock-cycle bound `2n + 2S + 4` of one decode on a `4^S`-wide array of
/// multiplication circuits.
pub fn latency_model(n: u32, cutoff: usize) -> u64 {
    2 * u64::from(n) + 2 * cutoff as u64 + 4
}

/// One candidate index per cut-off symbol; index 0 is the hard decision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TestErrorPattern {
    pub assignment: Vec<u8>,
}

impl TestErrorPattern {
    pub fn all_hard(len: usize) -> Self {
        Self { assignment: vec![0; len] }
    }

    /// Number of symbols moved off their hard decision.
    pub fn substitutions(&self) -> usize {
        self.assignment.iter().filter(|&&a| a != 0).count()
    }

    /// Graded order: fewer substitutions first, then lexicographic.
    pub fn graded_cmp(&self, other: &Self) -> Ordering {
        graded_cmp(&self.assignment, &other.assignment)
    }
}

fn graded_cmp(a: &[u8], b: &[u8]) -> Ordering {
    let weight = |x: &[u8]| x.iter().filter(|&&v| v != 0).count();
    weight(a).cmp(&weight(b)).then_with(|| a.cmp(b))
}

/// Symbol reliabilities and the cut-off selection.
#[derive(Clone, Debug, PartialEq)]
pub struct CutOff {
    pub reliabilities: Vec<SymbolReliability>,
    /// Positions of the least reliable symbols, least reliable first.
    pub selected: Vec<usize>,
}

impl CutOff {
    pub fn hard_decisions(&self) -> Vec<Point> {
        self.reliabilities.iter().map(|r| r.hard).collect()
    }

    pub fn candidate_counts(&self) -> Vec<usize> {
        self.selected.iter().map(|&p| self.reliabilities[p].candidates.len()).collect()
    }

    /// Size of the test-error-pattern set, the product of candidate counts.
    pub fn pattern_count(&self) -> u64 {
        self.candidate_counts().iter().map(|&c| c as u64).product()
    }

    /// Hard decisions with the pattern's substitutions applied.
    pub fn symbols_for(&self, tep: &TestErrorPattern) -> Vec<Point> {
        let mut symbols = self.hard_decisions();
        for (&pos, &choice) in self.selected.iter().zip(&tep.assignment) {
            symbols[pos] = self.reliabilities[pos].candidates[choice as usize];
        }
        symbols
    }
}

/// Scores all symbols and keeps the `min(S, L)` least reliable ones. Equal
/// likelihoods keep symbol order.
pub fn rank_and_cutoff(received: &[ReceivedSymbol], cst: &Constellation, cutoff: usize) -> CutOff {
    let reliabilities: Vec<SymbolReliability> = received.iter().map(|&r| cst.reliability_of(r)).collect();
    let mut order: Vec<usize> = (0..received.len()).collect();
    order.sort_by(|&a, &b| reliabilities[a].likelihood.total_cmp(&reliabilities[b].likelihood));
    order.truncate(cutoff.min(received.len()));
    CutOff { reliabilities, selected: order }
}

/// All patterns over the given per-symbol candidate counts, in graded order.
pub fn enumerate_teps(candidate_counts: &[usize]) -> Vec<TestErrorPattern> {
    let total: usize = candidate_counts.iter().product();
    let mut out = Vec::with_capacity(total);
    let mut digits = vec![0u8; candidate_counts.len()];
    for _ in 0..total {
        out.push(TestErrorPattern { assignment: digits.clone() });
        advance(&mut digits, candidate_counts);
    }
    out.sort_by(TestErrorPattern::graded_cmp);
    out
}

// Odometer increment, least significant digit first. Returns the digit that
// was incremented (lower digits wrapped to 0), or None after the last value.
fn advance(digits: &mut [u8], counts: &[usize]) -> Option<usize> {
    for (t, d) in digits.iter_mut().enumerate() {
        if (*d as usize) + 1 < counts[t] {
            *d += 1;
            return Some(t);
        }
        *d = 0;
    }
    None
}

/// Candidate bit string for a pattern: the first `n` bits of the substituted
/// symbol sequence, so padding bits are zero.
pub fn apply_tep(cut: &CutOff, tep: &TestErrorPattern, cst: &Constellation, n: usize) -> Result<BitVector> {
    cst.symbols_to_bits(&cut.symbols_for(tep), n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum DecodeOutcome {
    Decoded { codeword: BitVector, info: BitVector },
    Abandoned,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub outcome: DecodeOutcome,
    pub queries_checked: u64,
    pub patterns_valid: u64,
    pub modeled_latency_cycles: u64,
    /// Squared distance between the received samples and the decoded word
    /// re-modulated; `None` when abandoned.
    pub selected_distance: Option<f64>,
    pub winner: Option<TestErrorPattern>,
    /// Cut-off after clamping to the number of symbols.
    pub cutoff: usize,
}

impl DecodeResult {
    pub fn codeword(&self) -> Option<&BitVector> {
        match &self.outcome {
            DecodeOutcome::Decoded { codeword, .. } => Some(codeword),
            DecodeOutcome::Abandoned => None,
        }
    }
}

/// How syndromes of the candidate strings are obtained.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SyndromeEngine {
    /// One [`pmult`] run per pattern, spread over the rayon pool.
    Pmult,
    /// `pmult` on the hard-decision string only; every other syndrome is
    /// updated by XOR-ing precomputed per-candidate contributions.
    #[default]
    Incremental,
}

// Best zero-syndrome candidate seen so far.
struct Best {
    distance: f64,
    assignment: Vec<u8>,
}

impl Best {
    fn better_than(&self, other: &Best) -> bool {
        match self.distance.total_cmp(&other.distance) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => graded_cmp(&self.assignment, &other.assignment) == Ordering::Less,
        }
    }
}

fn keep_better(a: Option<Best>, b: Option<Best>) -> Option<Best> {
    match (a, b) {
        (Some(a), Some(b)) => Some(if b.better_than(&a) { b } else { a }),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Decoder bound to one code, constellation and cut-off.
#[derive(Clone, Debug)]
pub struct Decoder<'a> {
    code: &'a PolarCode,
    cst: Constellation,
    cutoff: usize,
    engine: SyndromeEngine,
    rows: RowIndexSets,
    // Syndrome of each unit vector e_j, packed row-bit-wise.
    column_syndromes: Vec<u64>,
    syndrome_words: usize,
}

impl<'a> Decoder<'a> {
    pub fn new(code: &'a PolarCode, cst: Constellation, cutoff: usize) -> Result<Self> {
        let h = code.parity_check();
        let rows = RowIndexSets::new(h)?;
        let syndrome_words = h.rows().div_ceil(64);
        let mut column_syndromes = vec![0u64; h.cols() * syndrome_words];
        for i in 0..h.rows() {
            for j in h.row_support(i) {
                column_syndromes[j * syndrome_words + i / 64] |= 1 << (i % 64);
            }
        }
        Ok(Self { code, cst, cutoff, engine: SyndromeEngine::default(), rows, column_syndromes, syndrome_words })
    }

    pub fn with_engine(mut self, engine: SyndromeEngine) -> Self {
        self.engine = engine;
        self
    }

    pub fn code(&self) -> &PolarCode {
        self.code
    }

    pub fn constellation(&self) -> &Constellation {
        &self.cst
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn row_index_sets(&self) -> &RowIndexSets {
        &self.rows
    }

    /// Cut-off in effect for a block of `symbols` symbols.
    pub fn effective_cutoff(&self, symbols: usize) -> usize {
        self.cutoff.min(symbols)
    }

    pub fn rank(&self, received: &[ReceivedSymbol]) -> CutOff {
        rank_and_cutoff(received, &self.cst, self.cutoff)
    }

    pub fn decode(&self, received: &[ReceivedSymbol]) -> Result<DecodeResult> {
        let n = self.code.block_length();
        if received.len() * self.cst.bits_per_symbol() < n {
            return Err(Error::Dimension(format!(
                "{} symbols of {} bits cannot carry {n} bits",
                received.len(),
                self.cst.bits_per_symbol()
            )));
        }
        let cut = self.rank(received);
        let (best, valid) = match self.engine {
            SyndromeEngine::Pmult => self.search_pmult(&cut, received)?,
            SyndromeEngine::Incremental => self.search_incremental(&cut, received)?,
        };

        let mut result = DecodeResult {
            outcome: DecodeOutcome::Abandoned,
            queries_checked: cut.pattern_count(),
            patterns_valid: valid,
            modeled_latency_cycles: latency_model(self.code.exponent(), cut.selected.len()),
            selected_distance: None,
            winner: None,
            cutoff: cut.selected.len(),
        };
        if let Some(best) = best {
            let tep = TestErrorPattern { assignment: best.assignment };
            let codeword = apply_tep(&cut, &tep, &self.cst, n)?;
            let check = pmult(&self.rows, &codeword)?;
            assert!(check.syndrome.is_zero(), "decoder selected a non-codeword");
            let info = self.code.extract_info(&codeword)?;
            result.outcome = DecodeOutcome::Decoded { codeword, info };
            result.selected_distance = Some(best.distance);
            result.winner = Some(tep);
        }
        Ok(result)
    }

    /// Squared distance between the received samples and `bits` re-modulated.
    pub fn distance_to(&self, bits: &BitVector, received: &[ReceivedSymbol]) -> f64 {
        self.cst.bits_to_symbols(bits).iter().zip(received).map(|(p, &r)| p.distance_sq(r)).sum()
    }

    fn search_pmult(&self, cut: &CutOff, received: &[ReceivedSymbol]) -> Result<(Option<Best>, u64)> {
        let n = self.code.block_length();
        let teps = enumerate_teps(&cut.candidate_counts());
        teps.into_par_iter()
            .map(|tep| -> Result<(Option<Best>, u64)> {
                let bits = apply_tep(cut, &tep, &self.cst, n)?;
                if !pmult(&self.rows, &bits)?.syndrome.is_zero() {
                    return Ok((None, 0));
                }
                let distance = self.distance_to(&bits, received);
                Ok((Some(Best { distance, assignment: tep.assignment }), 1))
            })
            .try_reduce(|| (None, 0), |(a, va), (b, vb)| Ok((keep_better(a, b), va + vb)))
    }

    fn search_incremental(&self, cut: &CutOff, received: &[ReceivedSymbol]) -> Result<(Option<Best>, u64)> {
        let n = self.code.block_length();
        let sw = self.syndrome_words;
        let w = self.cst.bits_per_symbol();
        let counts = cut.candidate_counts();

        let hard_tep = TestErrorPattern::all_hard(counts.len());
        let hard_bits = apply_tep(cut, &hard_tep, &self.cst, n)?;
        let mut syndrome: Vec<u64> = pmult(&self.rows, &hard_bits)?.syndrome.words().to_vec();

        // contributions[(t, c)] = syndrome change when symbol t moves from its
        // hard decision to candidate c.
        let max_c = 4;
        let mut contributions = vec![0u64; counts.len() * max_c * sw];
        for (t, &pos) in cut.selected.iter().enumerate() {
            let rel = &cut.reliabilities[pos];
            let hard_label = self.cst.label_of(rel.hard)?;
            for (c, &cand) in rel.candidates.iter().enumerate().skip(1) {
                let diff = self.cst.label_of(cand)? ^ hard_label;
                let slot = &mut contributions[(t * max_c + c) * sw..(t * max_c + c + 1) * sw];
                for k in 0..w {
                    let bit = pos * w + k;
                    if bit < n && diff >> (w - 1 - k) & 1 == 1 {
                        let col = &self.column_syndromes[bit * sw..(bit + 1) * sw];
                        for (s, x) in slot.iter_mut().zip(col) {
                            *s ^= x;
                        }
                    }
                }
            }
        }

        let mut digits = vec![0u8; counts.len()];
        let mut best: Option<Best> = None;
        let mut valid = 0u64;
        loop {
            if syndrome.iter().all(|&s| s == 0) {
                valid += 1;
                let tep = TestErrorPattern { assignment: digits.clone() };
                let bits = apply_tep(cut, &tep, &self.cst, n)?;
                let candidate = Best { distance: self.distance_to(&bits, received), assignment: tep.assignment };
                best = keep_better(best, Some(candidate));
            }
            let before = digits.clone();
            let Some(top) = advance(&mut digits, &counts) else { break };
            for t in 0..=top {
                for c in [before[t] as usize, digits[t] as usize] {
                    let slot = &contributions[(t * max_c + c) * sw..(t * max_c + c + 1) * sw];
                    for (s, x) in syndrome.iter_mut().zip(slot) {
                        *s ^= x;
                    }
                }
            }
        }
        Ok((best, valid))
    }
}

/// One-shot decode; builds a [`Decoder`] for the call.
pub fn decode(code: &PolarCode, received: &[ReceivedSymbol], cst: &Constellation, cutoff: usize) -> Result<DecodeResult> {
    Decoder::new(code, cst.clone(), cutoff)?.decode(received)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{stream_rng, transmit, ChannelParams};
    use crate::polar::ReliabilitySequence;
    use rand::Rng;

    fn code(n: u32) -> PolarCode {
        PolarCode::build(&ReliabilitySequence::nr(), n).unwrap()
    }

    #[test]
    fn latency_values() {
        assert_eq!(latency_model(7, 8), 34);
        assert_eq!(latency_model(5, 8), 30);
        assert_eq!(latency_model(10, 8), 40);
        assert_eq!(latency_model(6, 0), 16);
    }

    #[test]
    fn cutoff_selection() {
        let cst = Constellation::new(16).unwrap();
        let rx = [ReceivedSymbol::new(1.0, 1.0), ReceivedSymbol::new(0.1, 0.1), ReceivedSymbol::new(2.9, 1.0)];
        assert!(rank_and_cutoff(&rx, &cst, 0).selected.is_empty());
        assert_eq!(rank_and_cutoff(&rx, &cst, 1).selected, vec![1]);
        assert_eq!(rank_and_cutoff(&rx, &cst, 8).selected, vec![1, 2, 0]);
    }

    #[test]
    fn cutoff_ties_keep_symbol_order() {
        let cst = Constellation::new(4).unwrap();
        let rx = [ReceivedSymbol::new(1.0, 1.0); 5];
        assert_eq!(rank_and_cutoff(&rx, &cst, 3).selected, vec![0, 1, 2]);
    }

    #[test]
    fn least_reliable_symbol_is_selected() {
        // Equal displacement x on both axes gives L = (1 - x) * sqrt(2).
        let cst = Constellation::new(16).unwrap();
        let at = |l: f64| {
            let x = 1.0 - l / 2f64.sqrt();
            ReceivedSymbol::new(1.0 - x, -1.0 + x)
        };
        let rx = [at(0.9), at(0.1)];
        let cut = rank_and_cutoff(&rx, &cst, 1);
        assert!((cut.reliabilities[0].likelihood - 0.9).abs() < 1e-12);
        assert!((cut.reliabilities[1].likelihood - 0.1).abs() < 1e-12);
        assert_eq!(cut.selected, vec![1]);
    }

    #[test]
    fn tep_enumeration() {
        let teps = enumerate_teps(&[4, 4]);
        assert_eq!(teps.len(), 16);
        assert_eq!(teps[0], TestErrorPattern::all_hard(2));
        assert!(teps.windows(2).all(|w| w[0].graded_cmp(&w[1]) == Ordering::Less));
        assert_eq!(teps[1].assignment, vec![0, 1]);
        assert_eq!(teps[7].assignment, vec![1, 1]);
        assert_eq!(enumerate_teps(&[1, 4]).len(), 4);
        assert_eq!(enumerate_teps(&[]), vec![TestErrorPattern::all_hard(0)]);
    }

    #[test]
    fn apply_tep_locality_and_padding() {
        let cst = Constellation::new(64).unwrap();
        let c = code(5);
        let mut rng = stream_rng(5, 0, 0);
        let info = BitVector::from_bools((0..16).map(|_| rng.random::<bool>()));
        let cw = c.encode(&info).unwrap();
        let pts = cst.bits_to_symbols(&cw);
        assert_eq!(pts.len(), 6);
        let rx = transmit(&pts, &ChannelParams::new(64, 6.0).unwrap(), &mut rng);
        let cut = rank_and_cutoff(&rx, &cst, 8);
        let hard = apply_tep(&cut, &TestErrorPattern::all_hard(cut.selected.len()), &cst, 32).unwrap();
        assert_eq!(hard, cst.symbols_to_bits(&cut.hard_decisions(), 32).unwrap());
        for tep in enumerate_teps(&cut.candidate_counts()) {
            let bits = apply_tep(&cut, &tep, &cst, 32).unwrap();
            let padded = cst.symbols_to_bits(&cst.bits_to_symbols(&bits), 36).unwrap();
            assert!((32..36).all(|p| !padded.get(p)));
            if tep.substitutions() == 1 {
                let t = tep.assignment.iter().position(|&a| a != 0).unwrap();
                let sym = cut.selected[t];
                let diff = &bits ^ &hard;
                assert!((0..32).filter(|&p| diff.get(p)).all(|p| p / 6 == sym));
            }
        }
    }

    #[test]
    fn noiseless_decodes_with_hard_pattern() {
        for order in [4, 16, 64, 256] {
            let cst = Constellation::new(order).unwrap();
            let c = code(6);
            let mut rng = stream_rng(9, 0, order as u64);
            let info = BitVector::from_bools((0..c.dimension()).map(|_| rng.random::<bool>()));
            let cw = c.encode(&info).unwrap();
            let rx: Vec<ReceivedSymbol> = cst.bits_to_symbols(&cw).into_iter().map(Into::into).collect();
            let res = decode(&c, &rx, &cst, 8).unwrap();
            assert_eq!(res.codeword(), Some(&cw));
            assert_eq!(res.winner, Some(TestErrorPattern::all_hard(res.cutoff)));
            assert_eq!(res.selected_distance, Some(0.0));
            assert!(matches!(&res.outcome, DecodeOutcome::Decoded { info: i, .. } if *i == info));
        }
    }

    #[test]
    fn short_input_is_rejected() {
        let cst = Constellation::new(4).unwrap();
        let rx = vec![ReceivedSymbol::new(1.0, 1.0); 15];
        assert!(matches!(decode(&code(5), &rx, &cst, 8), Err(Error::Dimension(_))));
    }

    #[test]
    fn single_neighbour_error_is_corrected() {
        let cst = Constellation::new(16).unwrap();
        let c = code(5);
        let cw = c.encode(&BitVector::from_bools((0..16).map(|i| i % 3 == 1))).unwrap();
        let pts = cst.bits_to_symbols(&cw);
        let mut rx: Vec<ReceivedSymbol> = pts.iter().copied().map(Into::into).collect();
        let k = pts.iter().position(|p| p.i < 3).unwrap();
        rx[k].a += 1.2;
        let res = decode(&c, &rx, &cst, 8).unwrap();
        assert_eq!(res.codeword(), Some(&cw));
        assert!((res.selected_distance.unwrap() - 1.44).abs() < 1e-12);
    }

    #[test]
    fn engines_agree() {
        for (order, n) in [(4, 5), (16, 5), (64, 5), (16, 6), (256, 7)] {
            let cst = Constellation::new(order).unwrap();
            let c = code(n);
            let fast = Decoder::new(&c, cst.clone(), 5).unwrap();
            let slow = fast.clone().with_engine(SyndromeEngine::Pmult);
            for trial in 0..40 {
                let mut rng = stream_rng(77, n as u64, trial);
                let info = BitVector::from_bools((0..c.dimension()).map(|_| rng.random::<bool>()));
                let pts = cst.bits_to_symbols(&c.encode(&info).unwrap());
                let rx = transmit(&pts, &ChannelParams::new(order, 2.0).unwrap(), &mut rng);
                assert_eq!(fast.decode(&rx).unwrap(), slow.decode(&rx).unwrap(), "{order}-QAM n={n} trial {trial}");
            }
        }
    }
}
