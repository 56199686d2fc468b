//! Complex-baseband AWGN channel.
//!
//! Noise is generated in physical units from Eb/N0 and then divided by the
//! half minimum distance `d`, so received samples live on the same
//! odd-integer lattice as [`Constellation`](crate::qam::Constellation).

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qam::{Point, ReceivedSymbol, SUPPORTED_ORDERS};

/// Half minimum distance `d = sqrt(3 m Eb / (M − 1))` of square M-QAM with
/// `M = 2^{2m}` and average energy `Eb` per bit.
pub fn min_distance(order: usize, eb: f64) -> Result<f64> {
    if !SUPPORTED_ORDERS.contains(&order) {
        return Err(Error::Unsupported(format!("{order}-QAM")));
    }
    if eb.is_nan() || eb <= 0.0 {
        return Err(Error::Unsupported(format!("energy per bit {eb} must be positive")));
    }
    let m = f64::from(order.trailing_zeros() / 2);
    Ok((3.0 * m * eb / (order as f64 - 1.0)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub order: usize,
    pub bits_per_axis: u32,
    pub eb: f64,
    pub ebn0_db: f64,
    /// Half minimum distance in physical units.
    pub d: f64,
    /// Per-axis noise deviation in lattice units.
    pub sigma: f64,
}

impl ChannelParams {
    /// Operating point with `Eb = 1`.
    pub fn new(order: usize, ebn0_db: f64) -> Result<Self> {
        Self::with_energy(order, 1.0, ebn0_db)
    }

    /// `ebn0_db = +inf` gives a noiseless channel.
    pub fn with_energy(order: usize, eb: f64, ebn0_db: f64) -> Result<Self> {
        if ebn0_db.is_nan() || ebn0_db == f64::NEG_INFINITY {
            return Err(Error::Unsupported(format!("Eb/N0 of {ebn0_db} dB")));
        }
        let d = min_distance(order, eb)?;
        let sigma = physical_noise_deviation(eb, ebn0_db) / d;
        Ok(Self { order, bits_per_axis: order.trailing_zeros() / 2, eb, ebn0_db, d, sigma })
    }

    pub fn noiseless(order: usize) -> Result<Self> {
        Self::new(order, f64::INFINITY)
    }
}

/// `sqrt(N0 / 2)` with `N0 = Eb / 10^{ebn0_db/10}`.
pub fn physical_noise_deviation(eb: f64, ebn0_db: f64) -> f64 {
    let n0 = eb / 10f64.powf(ebn0_db / 10.0);
    (n0 / 2.0).sqrt()
}

/// Lattice-unit noise deviation for the given parameters.
pub fn derive_sigma(params: &ChannelParams) -> f64 {
    physical_noise_deviation(params.eb, params.ebn0_db) / params.d
}

/// Two independent standard normal deviates via the Box–Muller transform.
///
/// Uses `libm` for the transcendental functions so a seed yields the same
/// bits on every platform.
pub fn standard_normal_pair<R: RngCore + ?Sized>(rng: &mut R) -> (f64, f64) {
    // u1 in (0, 1] keeps the logarithm finite.
    let u1 = 1.0 - rng.random::<f64>();
    let u2 = rng.random::<f64>();
    let radius = libm::sqrt(-2.0 * libm::log(u1));
    let (s, c) = libm::sincos(2.0 * std::f64::consts::PI * u2);
    (radius * c, radius * s)
}

/// Adds i.i.d. Gaussian noise of deviation `params.sigma` to both coordinates
/// of every point. One normal pair is drawn per symbol even when `sigma == 0`,
/// so the stream position does not depend on the operating point.
pub fn transmit<R: RngCore + ?Sized>(points: &[Point], params: &ChannelParams, rng: &mut R) -> Vec<ReceivedSymbol> {
    points
        .iter()
        .map(|p| {
            let (zi, zq) = standard_normal_pair(rng);
            let (ni, nq) = if params.sigma == 0.0 { (0.0, 0.0) } else { (params.sigma * zi, params.sigma * zq) };
            ReceivedSymbol::new(f64::from(p.i) + ni, f64::from(p.q) + nq)
        })
        .collect()
}

/// Independent generator for trial `trial` of operating point `point`.
///
/// All streams share the key derived from `master_seed`; the ChaCha stream id
/// packs `(point, trial)`, so streams never overlap for `trial < 2^40`.
pub fn stream_rng(master_seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    assert!(point < 1 << 24 && trial < 1 << 40, "stream index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(point << 40 | trial);
    rng
}
