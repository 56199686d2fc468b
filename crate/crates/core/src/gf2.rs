//! Dense linear algebra over GF(2).
//!
//! Vectors and matrices are bit-packed into `u64` words, least significant bit
//! first. Bits past the logical length of a word row are always zero, so the
//! derived equality is entry-wise equality.

use std::fmt;
use std::ops::BitXor;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A binary vector of fixed length. Serializes as a string of `0`/`1`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitVector {
    words: Vec<u64>,
    len: usize,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; words_for(len)], len }
    }

    /// Builds a vector from 0/1 entries. Any non-zero byte counts as 1.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Empty("bit vector"));
        }
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        Ok(v)
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Parses a hex string; the most significant bit of the first digit is bit 0.
    /// The string must carry exactly `len.div_ceil(4)` digits and any bits past
    /// `len` in the final digit must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self> {
        let hex = hex.trim();
        let hex = hex.strip_prefix("0x").unwrap_or(hex);
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Dimension(format!(
                "expected {} hex digits for {} bits, got {}",
                len.div_ceil(4),
                len,
                hex.len()
            )));
        }
        let mut v = Self::zeros(len);
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::Dimension(format!("invalid hex digit {ch:?}")))?;
            for k in 0..4 {
                let bit = nibble >> (3 - k) & 1 == 1;
                let pos = 4 * d + k;
                if pos < len {
                    v.set(pos, bit);
                } else if bit {
                    return Err(Error::Dimension(format!("hex sets bit {pos} past length {len}")));
                }
            }
        }
        Ok(v)
    }

    pub fn to_hex(&self) -> String {
        (0..self.len.div_ceil(4))
            .map(|d| {
                let nibble = (0..4).fold(0u32, |acc, k| {
                    let pos = 4 * d + k;
                    acc << 1 | u32::from(pos < self.len && self.get(pos))
                });
                char::from_digit(nibble, 16).unwrap()
            })
            .collect()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Packed words, least significant bit first.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Copy of bits `start..start + len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        BitVector::from_bools((start..start + len).map(|i| self.get(i)))
    }
}

impl From<BitVector> for String {
    fn from(v: BitVector) -> String {
        v.to_string()
    }
}

impl TryFrom<String> for BitVector {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Dimension(format!("invalid bit character {c:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::from_bits(&bits)
    }
}

impl BitXor for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: Self) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(rhs);
        out
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense row-major binary matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    // Zero-row results are legal output of `null_space`; the public
    // constructors reject them.
    fn blank(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    fn check_shape(rows: usize, cols: usize) -> Result<()> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty("matrix needs at least one row and one column"));
        }
        Ok(())
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::check_shape(rows, cols)?;
        Ok(Self::blank(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "identity of size 0");
        let mut m = Self::blank(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        Self::check_shape(rows, cols)?;
        let mut m = Self::blank(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::check_shape(rows.len(), cols)?;
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.as_ref().len() != cols) {
            return Err(Error::Dimension(format!(
                "row {i} has {} entries, expected {cols}",
                r.as_ref().len()
            )));
        }
        Self::from_fn(rows.len(), cols, |i, j| rows[i].as_ref()[j] != 0)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        self.data[i * self.stride + j / WORD] >> (j % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) out of range");
        let w = &mut self.data[i * self.stride + j / WORD];
        let mask = 1u64 << (j % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    fn xor_rows(&mut self, dst: usize, src: usize) {
        let (s, d) = (src * self.stride, dst * self.stride);
        for k in 0..self.stride {
            self.data[d + k] ^= self.data[s + k];
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for k in 0..self.stride {
            self.data.swap(a * self.stride + k, b * self.stride + k);
        }
    }

    pub fn row(&self, i: usize) -> BitVector {
        BitVector { words: self.row_words(i).to_vec(), len: self.cols }
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row_words(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Column indices of the 1-entries of row `i`, ascending.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.row_weight(i));
        for (k, &w) in self.row_words(i).iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(k * WORD + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn weight(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Keeps the listed rows, in the listed order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        Self::check_shape(indices.len(), self.cols)?;
        let mut m = Self::blank(indices.len(), self.cols);
        for (dst, &src) in indices.iter().enumerate() {
            if src >= self.rows {
                return Err(Error::Dimension(format!("row {src} out of range ({} rows)", self.rows)));
            }
            m.data[dst * m.stride..(dst + 1) * m.stride].copy_from_slice(self.row_words(src));
        }
        Ok(m)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::blank(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row_support(i) {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mat_mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::blank(self.rows, other.cols);
        for i in 0..self.rows {
            for k in self.row_support(i) {
                let src = other.row_words(k);
                let dst = &mut out.data[i * out.stride..(i + 1) * out.stride];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        Ok(out)
    }

    /// Sequential matrix-vector product `A · v^T`.
    pub fn mat_vec(&self, v: &BitVector) -> Result<BitVector> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} matrix by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let ones: u32 = self.row_words(i).iter().zip(v.words()).map(|(a, b)| (a & b).count_ones()).sum();
            out.set(i, ones & 1 == 1);
        }
        Ok(out)
    }

    /// Reduced row echelon form together with the pivot columns (ascending).
    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut r = self.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..r.cols {
            if next == r.rows {
                break;
            }
            let Some(p) = (next..r.rows).find(|&i| r.get(i, col)) else {
                continue;
            };
            r.swap_rows(next, p);
            for i in 0..r.rows {
                if i != next && r.get(i, col) {
                    r.xor_rows(i, next);
                }
            }
            pivots.push(col);
            next += 1;
        }
        (r, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A · x^T = 0}`, one row per non-pivot column of the RREF,
    /// in increasing free-column order. A full-column-rank input yields a
    /// matrix with zero rows.
    pub fn null_space(&self) -> BitMatrix {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut h = Self::blank(free.len(), self.cols);
        for (row, &f) in free.iter().enumerate() {
            h.set(row, f, true);
            for (pr, &p) in pivots.iter().enumerate() {
                if r.get(pr, f) {
                    h.set(row, p, true);
                }
            }
        }
        h
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            writeln!(f, "{}", self.row(i))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[u8]]) -> BitMatrix {
        BitMatrix::from_rows(rows).unwrap()
    }

    fn arb_matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c)
                .prop_map(move |bits| BitMatrix::from_fn(r, c, |i, j| bits[i * c + j]).unwrap())
        })
    }

    #[test]
    fn identity_is_left_neutral() {
        let a = m(&[&[1, 0, 1, 1], &[0, 1, 1, 0], &[1, 1, 1, 1], &[0, 0, 0, 1]]);
        assert_eq!(BitMatrix::identity(4).mat_mul(&a).unwrap(), a);
    }

    #[test]
    fn zero_annihilates() {
        let a = m(&[&[1, 0, 1, 1], &[0, 1, 1, 0], &[1, 1, 1, 1], &[0, 0, 0, 1]]);
        let z = BitMatrix::zeros(4, 4).unwrap();
        assert!(a.mat_mul(&z).unwrap().is_zero());
    }

    #[test]
    fn small_product() {
        let a = m(&[&[1, 1], &[0, 1]]);
        let b = m(&[&[1, 0], &[1, 1]]);
        assert_eq!(a.mat_mul(&b).unwrap(), m(&[&[0, 1], &[1, 1]]));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let a = BitMatrix::zeros(2, 3).unwrap();
        assert!(matches!(a.mat_mul(&a), Err(Error::Dimension(_))));
        assert!(matches!(a.mat_vec(&BitVector::zeros(2)), Err(Error::Dimension(_))));
    }

    #[test]
    fn empty_shapes_are_rejected() {
        assert!(BitMatrix::zeros(0, 3).is_err());
        assert!(BitMatrix::from_rows::<&[u8]>(&[]).is_err());
        assert!(BitVector::from_bits(&[]).is_err());
        assert!(BitMatrix::from_rows(&[&[1u8, 0][..], &[1][..]]).is_err());
    }

    #[test]
    fn mat_vec_trivial_cases() {
        let a = m(&[&[1, 0, 1], &[1, 1, 1]]);
        assert!(a.mat_vec(&BitVector::zeros(3)).unwrap().is_zero());
        let v = BitVector::from_bits(&[1, 0, 1, 1, 0]).unwrap();
        assert_eq!(BitMatrix::identity(5).mat_vec(&v).unwrap(), v);
    }

    #[test]
    fn rref_cases() {
        let (r, p) = BitMatrix::identity(3).rref();
        assert_eq!((r, p), (BitMatrix::identity(3), vec![0, 1, 2]));

        let z = BitMatrix::zeros(2, 4).unwrap();
        let (r, p) = z.rref();
        assert_eq!((r.clone(), p.len()), (z, 0));

        let (r, p) = m(&[&[1, 1, 0], &[1, 1, 1]]).rref();
        assert_eq!(r, m(&[&[1, 1, 0], &[0, 0, 1]]));
        assert_eq!(p, vec![0, 2]);
    }

    #[test]
    fn null_space_cases() {
        let h = BitMatrix::identity(5).null_space();
        assert_eq!((h.rows(), h.cols()), (0, 5));

        assert_eq!(m(&[&[1, 1]]).null_space(), m(&[&[1, 1]]));
    }

    #[test]
    fn hex_roundtrip_and_errors() {
        let v = BitVector::from_bits(&[1, 0, 1, 1, 0, 0, 0, 1, 1]).unwrap();
        assert_eq!(v.to_hex(), "b18");
        assert_eq!(BitVector::from_hex("b18", 9).unwrap(), v);
        assert!(BitVector::from_hex("b1g", 9).is_err());
        assert!(BitVector::from_hex("b19", 9).is_err());
        assert!(BitVector::from_hex("b1", 9).is_err());
    }

    #[test]
    fn mat_vec_matches_column_combination_exhaustively() {
        let a = m(&[
            &[1, 0, 1, 1, 0, 0, 1, 0, 1, 1],
            &[0, 1, 1, 0, 1, 0, 0, 0, 1, 0],
            &[1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
        ]);
        for x in 0u32..1 << 10 {
            let v = BitVector::from_bools((0..10).map(|j| x >> j & 1 == 1));
            let mut expected = vec![0u8; 3];
            for j in (0..10).filter(|&j| v.get(j)) {
                for (i, e) in expected.iter_mut().enumerate() {
                    *e ^= u8::from(a.get(i, j));
                }
            }
            assert_eq!(a.mat_vec(&v).unwrap().to_bits(), expected);
        }
    }

    proptest! {
        #[test]
        fn null_space_is_orthogonal_and_complementary(a in arb_matrix(12, 70)) {
            let h = a.null_space();
            prop_assert_eq!(a.rank() + h.rows(), a.cols());
            if h.rows() > 0 {
                prop_assert!(a.mat_mul(&h.transpose()).unwrap().is_zero());
                prop_assert_eq!(h.rank(), h.rows());
            }
        }

        #[test]
        fn rref_is_idempotent(a in arb_matrix(10, 70)) {
            let (r, p) = a.rref();
            let (r2, p2) = r.rref();
            prop_assert_eq!(r2, r);
            prop_assert_eq!(p2, p);
        }

        #[test]
        fn mat_mul_agrees_with_mat_vec(a in arb_matrix(8, 70), bits in proptest::collection::vec(any::<bool>(), 70)) {
            let v = BitVector::from_bools(bits.into_iter().take(a.cols()));
            let col = BitMatrix::from_fn(a.cols(), 1, |i, _| v.get(i)).unwrap();
            let prod = a.mat_mul(&col).unwrap();
            let mv = a.mat_vec(&v).unwrap();
            for i in 0..a.rows() {
                prop_assert_eq!(prod.get(i, 0), mv.get(i));
            }
        }
    }
}
