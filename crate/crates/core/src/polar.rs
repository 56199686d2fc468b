//! 5G NR polar codes built from the universal reliability sequence.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Length of the NR universal reliability sequence.
pub const SEQUENCE_LEN: usize = 1024;

/// Smallest and largest supported exponent for [`PolarCode::build`].
pub const MIN_CODE_EXPONENT: u32 = 5;
pub const MAX_CODE_EXPONENT: u32 = 10;

const BUNDLED_SEQUENCE: &str = include_str!("../data/nr_reliability_sequence.txt");

/// Bit-channel indices `0..1024` ordered from least to most reliable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReliabilitySequence {
    order: Vec<u16>,
}

impl ReliabilitySequence {
    /// Parses whitespace-separated decimal indices. Errors name the 1-based
    /// line of the offending token.
    pub fn parse(text: &str) -> Result<Self> {
        let mut order = Vec::with_capacity(SEQUENCE_LEN);
        let mut seen_at = vec![0usize; SEQUENCE_LEN];
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            for token in line.split_whitespace() {
                let value: usize = token.parse().map_err(|_| Error::Sequence {
                    line: line_no,
                    reason: format!("{token:?} is not a non-negative integer"),
                })?;
                if value >= SEQUENCE_LEN {
                    return Err(Error::Sequence {
                        line: line_no,
                        reason: format!("index {value} out of range 0..{SEQUENCE_LEN}"),
                    });
                }
                if seen_at[value] != 0 {
                    return Err(Error::Sequence {
                        line: line_no,
                        reason: format!("duplicate index {value} (first seen on line {})", seen_at[value]),
                    });
                }
                seen_at[value] = line_no;
                order.push(value as u16);
            }
        }
        if order.len() != SEQUENCE_LEN {
            return Err(Error::SequenceLength(order.len()));
        }
        Ok(Self { order })
    }

    pub fn from_reader<R: Read>(mut source: R) -> Result<Self> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::parse(&text)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("cannot read reliability sequence {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// The sequence from TS 38.212 Table 5.3.1.2-1, shipped with the crate.
    pub fn nr() -> Self {
        Self::parse(BUNDLED_SEQUENCE).expect("bundled reliability sequence is valid")
    }

    pub fn as_slice(&self) -> &[u16] {
        &self.order
    }

    /// Splits `0..n` into (information, frozen) index sets, both ascending.
    /// The `n - k` least reliable indices below `n` are frozen.
    pub fn select_sets(&self, n: usize, k: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        if !n.is_power_of_two() || n > SEQUENCE_LEN {
            return Err(Error::Unsupported(format!("block length {n} is not a power of two <= 1024")));
        }
        if k > n {
            return Err(Error::Unsupported(format!("dimension {k} exceeds block length {n}")));
        }
        let restricted: Vec<usize> = self.order.iter().map(|&q| q as usize).filter(|&q| q < n).collect();
        let (frozen, info) = restricted.split_at(n - k);
        let mut info = info.to_vec();
        let mut frozen = frozen.to_vec();
        info.sort_unstable();
        frozen.sort_unstable();
        Ok((info, frozen))
    }
}

/// `F^{⊗n}` with kernel `F = [[1,0],[1,1]]`: entry `(i,j)` is 1 iff the bits
/// of `j` are a subset of the bits of `i`.
pub fn build_generator(n: u32) -> Result<BitMatrix> {
    if !(1..=MAX_CODE_EXPONENT).contains(&n) {
        return Err(Error::Unsupported(format!("generator exponent {n} outside 1..=10")));
    }
    let size = 1usize << n;
    BitMatrix::from_fn(size, size, |i, j| j & !i == 0)
}

#[derive(Clone, Debug)]
pub struct PolarCode {
    n: u32,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    generator: BitMatrix,
    info_generator: BitMatrix,
    parity_check: BitMatrix,
}

impl PolarCode {
    /// Rate-1/2 code of length `2^n`, `5 <= n <= 10`.
    pub fn build(seq: &ReliabilitySequence, n: u32) -> Result<Self> {
        if !(MIN_CODE_EXPONENT..=MAX_CODE_EXPONENT).contains(&n) {
            return Err(Error::Unsupported(format!("code exponent {n} outside 5..=10")));
        }
        let size = 1usize << n;
        Self::with_dimension(seq, n, size / 2)
    }

    /// Code of length `2^n` and dimension `k`, `0 < k < 2^n`.
    pub fn with_dimension(seq: &ReliabilitySequence, n: u32, k: usize) -> Result<Self> {
        let generator = build_generator(n)?;
        let (info_set, frozen_set) = seq.select_sets(generator.rows(), k)?;
        if info_set.is_empty() || frozen_set.is_empty() {
            return Err(Error::Unsupported(format!("dimension {k} leaves an empty info or frozen set")));
        }
        let info_generator = generator.select_rows(&info_set)?;
        let parity_check = info_generator.null_space();
        Ok(Self { n, info_set, frozen_set, generator, info_generator, parity_check })
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn block_length(&self) -> usize {
        1 << self.n
    }

    pub fn dimension(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.dimension() as f64 / self.block_length() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn generator(&self) -> &BitMatrix {
        &self.generator
    }

    pub fn info_generator(&self) -> &BitMatrix {
        &self.info_generator
    }

    /// `(N - K) x N` parity-check matrix.
    pub fn parity_check(&self) -> &BitMatrix {
        &self.parity_check
    }

    /// `c = u · G_N` with info bits on the information set and zeros elsewhere.
    pub fn encode(&self, info: &BitVector) -> Result<BitVector> {
        if info.len() != self.dimension() {
            return Err(Error::Dimension(format!(
                "info vector has {} bits, code dimension is {}",
                info.len(),
                self.dimension()
            )));
        }
        let mut u = BitVector::zeros(self.block_length());
        for (k, &pos) in self.info_set.iter().enumerate() {
            u.set(pos, info.get(k));
        }
        Ok(self.times_generator(&u))
    }

    /// Inverts [`encode`](Self::encode) using `G_N · G_N = I`.
    pub fn extract_info(&self, codeword: &BitVector) -> Result<BitVector> {
        Ok(self.info_from_input(&self.input_of(codeword)?))
    }

    /// The input vector `u = c · G_N` of a word.
    pub fn input_of(&self, codeword: &BitVector) -> Result<BitVector> {
        if codeword.len() != self.block_length() {
            return Err(Error::Dimension(format!(
                "word has {} bits, block length is {}",
                codeword.len(),
                self.block_length()
            )));
        }
        Ok(self.times_generator(codeword))
    }

    fn info_from_input(&self, u: &BitVector) -> BitVector {
        BitVector::from_bools(self.info_set.iter().map(|&p| u.get(p)))
    }

    pub fn is_codeword(&self, word: &BitVector) -> Result<bool> {
        Ok(self.parity_check.mat_vec(word)?.is_zero())
    }

    // Row vector times G_N: XOR of the generator rows selected by `u`.
    fn times_generator(&self, u: &BitVector) -> BitVector {
        let mut c = BitVector::zeros(self.block_length());
        for i in (0..u.len()).filter(|&i| u.get(i)) {
            c.xor_assign(&self.generator.row(i));
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_info(rng: &mut ChaCha8Rng, k: usize) -> BitVector {
        BitVector::from_bools((0..k).map(|_| rng.random::<bool>()))
    }

    #[test]
    fn bundled_sequence_loads() {
        let seq = ReliabilitySequence::nr();
        assert_eq!(seq.as_slice().len(), 1024);
        assert_eq!(&seq.as_slice()[..8], &[0, 1, 2, 4, 8, 16, 32, 3]);
        assert_eq!(seq.as_slice()[1023], 1023);
    }

    #[test]
    fn short_sequence_is_rejected() {
        let text: String = (0..1023).map(|i| format!("{i}\n")).collect();
        let err = ReliabilitySequence::parse(&text).unwrap_err();
        assert!(err.to_string().contains("expected 1024"), "{err}");
    }

    #[test]
    fn duplicate_is_rejected_with_line() {
        let mut entries: Vec<usize> = (0..1024).collect();
        entries[500] = 17;
        let text: String = entries.iter().map(|i| format!("{i}\n")).collect();
        let err = ReliabilitySequence::parse(&text).unwrap_err();
        assert_eq!(err, Error::Sequence { line: 501, reason: "duplicate index 17 (first seen on line 18)".into() });
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn out_of_range_and_garbage_are_rejected() {
        let mut text: String = (0..1023).map(|i| format!("{i}\n")).collect();
        text.push_str("1024\n");
        assert!(matches!(ReliabilitySequence::parse(&text), Err(Error::Sequence { line: 1024, .. })));
        assert!(matches!(ReliabilitySequence::parse("0\n1\nx\n"), Err(Error::Sequence { line: 3, .. })));
    }

    #[test]
    fn generator_small_cases() {
        let g1 = BitMatrix::from_rows(&[[1u8, 0], [1, 1]]).unwrap();
        assert_eq!(build_generator(1).unwrap(), g1);
        let g2 = BitMatrix::from_rows(&[[1u8, 0, 0, 0], [1, 1, 0, 0], [1, 0, 1, 0], [1, 1, 1, 1]]).unwrap();
        assert_eq!(build_generator(2).unwrap(), g2);
        assert!(build_generator(0).is_err());
        assert!(build_generator(11).is_err());
    }

    #[test]
    fn generator_is_kronecker_power() {
        // G_{2N} = [[G_N, 0], [G_N, G_N]]
        for n in 1..8 {
            let g = build_generator(n).unwrap();
            let big = build_generator(n + 1).unwrap();
            let half = g.rows();
            for i in 0..2 * half {
                for j in 0..2 * half {
                    let expected = match (i >= half, j >= half) {
                        (false, true) => false,
                        _ => g.get(i % half, j % half),
                    };
                    assert_eq!(big.get(i, j), expected, "n={n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn select_sets_edges() {
        let seq = ReliabilitySequence::nr();
        let (i, f) = seq.select_sets(32, 32).unwrap();
        assert_eq!(i, (0..32).collect::<Vec<_>>());
        assert!(f.is_empty());
        let (i, f) = seq.select_sets(32, 0).unwrap();
        assert!(i.is_empty());
        assert_eq!(f.len(), 32);
        assert!(seq.select_sets(32, 33).is_err());
        assert!(seq.select_sets(48, 8).is_err());
    }

    #[test]
    fn n32_sets() {
        let seq = ReliabilitySequence::nr();
        let (info, frozen) = seq.select_sets(32, 16).unwrap();
        assert_eq!(info, vec![7, 11, 13, 14, 15, 19, 21, 22, 23, 25, 26, 27, 28, 29, 30, 31]);
        assert_eq!(frozen.len(), 16);
        let code = PolarCode::build(&seq, 5).unwrap();
        assert_eq!((code.parity_check().rows(), code.parity_check().cols()), (16, 32));
    }

    #[test]
    fn build_rejects_out_of_range() {
        let seq = ReliabilitySequence::nr();
        assert!(PolarCode::build(&seq, 4).is_err());
        assert!(PolarCode::build(&seq, 11).is_err());
    }

    #[test]
    fn encode_zero_and_wrong_length() {
        let code = PolarCode::build(&ReliabilitySequence::nr(), 5).unwrap();
        assert!(code.encode(&BitVector::zeros(16)).unwrap().is_zero());
        assert!(code.encode(&BitVector::zeros(15)).is_err());
        assert!(code.extract_info(&BitVector::zeros(32)).unwrap().is_zero());
        assert!(code.extract_info(&BitVector::zeros(31)).is_err());
    }

    #[test]
    fn random_codewords_satisfy_parity_and_roundtrip() {
        let seq = ReliabilitySequence::nr();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 5..=10 {
            let code = PolarCode::build(&seq, n).unwrap();
            let trials = if n == 5 { 1000 } else { 100 };
            for _ in 0..trials {
                let info = random_info(&mut rng, code.dimension());
                let c = code.encode(&info).unwrap();
                assert!(code.parity_check().mat_vec(&c).unwrap().is_zero());
                assert_eq!(code.extract_info(&c).unwrap(), info);
                let u = code.input_of(&c).unwrap();
                assert!(code.frozen_set().iter().all(|&f| !u.get(f)));
            }
        }
    }

    #[test]
    fn encode_is_linear() {
        let code = PolarCode::build(&ReliabilitySequence::nr(), 6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let a = random_info(&mut rng, code.dimension());
            let b = random_info(&mut rng, code.dimension());
            let lhs = code.encode(&(&a ^ &b)).unwrap();
            let rhs = &code.encode(&a).unwrap() ^ &code.encode(&b).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn codebook_is_null_space_of_h() {
        // rank(G_I) = K and every row of G_I satisfies H, so the codebook and
        // ker(H) have equal dimension and coincide.
        let seq = ReliabilitySequence::nr();
        for n in 5..=10 {
            let code = PolarCode::build(&seq, n).unwrap();
            let (k, nn) = (code.dimension(), code.block_length());
            assert_eq!(code.info_generator().rank(), k);
            assert_eq!(code.parity_check().rank(), nn - k);
            assert!(code.info_generator().mat_mul(&code.parity_check().transpose()).unwrap().is_zero());
        }
    }
}
