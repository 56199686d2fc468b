//! Square M-QAM on the odd-integer lattice.
//!
//! Coordinates are expressed in units of the half minimum distance, so
//! neighbouring points are 2 apart and every amplitude is an odd integer in
//! `±1, ±3, …, ±(2^m − 1)`. A symbol carries `2m` bits: the first `m` select
//! the in-phase amplitude and the last `m` the quadrature amplitude, each
//! through a reflected binary Gray code over the amplitude levels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

/// Orders named in the 5G NR modulation tables.
pub const SUPPORTED_ORDERS: [usize; 6] = [4, 16, 64, 256, 1024, 4096];

/// A constellation point with odd-integer coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub i: i32,
    pub q: i32,
}

impl Point {
    pub const fn new(i: i32, q: i32) -> Self {
        Self { i, q }
    }

    pub fn distance_sq(self, r: ReceivedSymbol) -> f64 {
        let di = f64::from(self.i) - r.a;
        let dq = f64::from(self.q) - r.b;
        di * di + dq * dq
    }
}

/// Received sample in lattice units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReceivedSymbol {
    pub a: f64,
    pub b: f64,
}

impl ReceivedSymbol {
    pub const fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }
}

impl From<Point> for ReceivedSymbol {
    fn from(p: Point) -> Self {
        Self { a: f64::from(p.i), b: f64::from(p.q) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constellation {
    bits_per_axis: u32,
}

impl Constellation {
    pub fn new(order: usize) -> Result<Self> {
        if !SUPPORTED_ORDERS.contains(&order) {
            return Err(Error::Unsupported(format!(
                "{order}-QAM (supported: {SUPPORTED_ORDERS:?})"
            )));
        }
        Ok(Self { bits_per_axis: order.trailing_zeros() / 2 })
    }

    /// M.
    pub fn order(&self) -> usize {
        1 << (2 * self.bits_per_axis)
    }

    /// m, with M = 2^{2m}.
    pub fn bits_per_axis(&self) -> u32 {
        self.bits_per_axis
    }

    /// 2m = log2 M.
    pub fn bits_per_symbol(&self) -> usize {
        2 * self.bits_per_axis as usize
    }

    fn levels(&self) -> i32 {
        1 << self.bits_per_axis
    }

    /// Largest amplitude, `2^m − 1`.
    pub fn max_amplitude(&self) -> i32 {
        self.levels() - 1
    }

    pub fn contains(&self, p: Point) -> bool {
        let lim = self.max_amplitude();
        let on_axis = |x: i32| x.abs() <= lim && x.rem_euclid(2) == 1;
        on_axis(p.i) && on_axis(p.q)
    }

    fn amplitude(&self, level: u32) -> i32 {
        2 * level as i32 - self.max_amplitude()
    }

    fn level(&self, amplitude: i32) -> u32 {
        ((amplitude + self.max_amplitude()) / 2) as u32
    }

    /// Point carrying the `2m`-bit label (first transmitted bit is the MSB).
    pub fn point_of(&self, label: u32) -> Point {
        let m = self.bits_per_axis;
        assert!(label < self.order() as u32, "label {label} out of range");
        let mask = (1 << m) - 1;
        Point::new(
            self.amplitude(gray_decode(label >> m)),
            self.amplitude(gray_decode(label & mask)),
        )
    }

    pub fn label_of(&self, p: Point) -> Result<u32> {
        if !self.contains(p) {
            return Err(Error::NotInConstellation(p.i, p.q));
        }
        let m = self.bits_per_axis;
        Ok(gray_encode(self.level(p.i)) << m | gray_encode(self.level(p.q)))
    }

    /// All points in label order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.order() as u32).map(|l| self.point_of(l))
    }

    /// Number of symbols needed for `bits` bits, `⌈bits / 2m⌉`.
    pub fn symbols_for(&self, bits: usize) -> usize {
        bits.div_ceil(self.bits_per_symbol())
    }

    /// Maps bits to symbols, padding with trailing zeros to a whole symbol.
    pub fn bits_to_symbols(&self, bits: &BitVector) -> Vec<Point> {
        let w = self.bits_per_symbol();
        (0..self.symbols_for(bits.len()))
            .map(|s| {
                let label = (0..w).fold(0u32, |acc, k| {
                    let pos = s * w + k;
                    acc << 1 | u32::from(pos < bits.len() && bits.get(pos))
                });
                self.point_of(label)
            })
            .collect()
    }

    /// Concatenates the labels of `points` and keeps the first `len` bits.
    pub fn symbols_to_bits(&self, points: &[Point], len: usize) -> Result<BitVector> {
        let w = self.bits_per_symbol();
        if len > w * points.len() {
            return Err(Error::Dimension(format!(
                "{} symbols carry {} bits, {len} requested",
                points.len(),
                w * points.len()
            )));
        }
        let mut out = BitVector::zeros(len);
        for (s, &p) in points.iter().enumerate() {
            let label = self.label_of(p)?;
            for k in 0..w {
                let pos = s * w + k;
                if pos < len && label >> (w - 1 - k) & 1 == 1 {
                    out.set(pos, true);
                }
            }
        }
        Ok(out)
    }

    /// Nearest constellation point: round each coordinate to the nearest odd
    /// integer and clamp to the outermost amplitude.
    pub fn hard_demodulate(&self, r: ReceivedSymbol) -> Point {
        let lim = self.max_amplitude();
        let axis = |x: f64| -> i32 {
            let level = ((x + f64::from(lim)) / 2.0).round();
            let level = level.clamp(0.0, f64::from(lim + 1) - 1.0) as i32;
            2 * level - lim
        };
        Point::new(axis(r.a), axis(r.b))
    }

    /// Near-neighbour error candidates of `s` for the sample `r`, in the order
    /// horizontal, vertical, diagonal, keeping only points of the constellation.
    pub fn nne_candidates(&self, r: ReceivedSymbol, s: Point) -> Vec<Point> {
        let step_i = 2 * sign(f64::from(s.i) - r.a);
        let step_q = 2 * sign(f64::from(s.q) - r.b);
        [
            Point::new(s.i - step_i, s.q),
            Point::new(s.i, s.q - step_q),
            Point::new(s.i - step_i, s.q - step_q),
        ]
        .into_iter()
        .filter(|&p| self.contains(p))
        .collect()
    }

    pub fn reliability_of(&self, r: ReceivedSymbol) -> SymbolReliability {
        let hard = self.hard_demodulate(r);
        let mut candidates = Vec::with_capacity(4);
        candidates.push(hard);
        candidates.extend(self.nne_candidates(r, hard));
        SymbolReliability { likelihood: likelihood(r, hard), hard, candidates }
    }
}

/// Symbol reliability `sqrt(d1² + d2²)` with `d = 1 − |A − x|` per axis, where
/// `s` is the hard decision for `r`. Equals √2 on the point and 0 at the
/// corners of its decision region; larger means more reliable.
pub fn likelihood(r: ReceivedSymbol, s: Point) -> f64 {
    let d1 = 1.0 - (f64::from(s.i) - r.a).abs();
    let d2 = 1.0 - (f64::from(s.q) - r.b).abs();
    (d1 * d1 + d2 * d2).sqrt()
}

// sign(0) = +1
fn sign(x: f64) -> i32 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

fn gray_encode(x: u32) -> u32 {
    x ^ (x >> 1)
}

fn gray_decode(mut g: u32) -> u32 {
    let mut x = g;
    while g > 1 {
        g >>= 1;
        x ^= g;
    }
    x
}

/// Per-symbol output of the first decoding step.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolReliability {
    pub likelihood: f64,
    pub hard: Point,
    /// Hard decision first, then the surviving near-neighbour candidates.
    pub candidates: Vec<Point>,
}
