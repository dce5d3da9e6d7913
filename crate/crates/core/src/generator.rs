//! Random benchmark instances.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{BeamType, Instance};
use crate::units::Length;

/// Candidate beam lengths in centimeters.
pub const LENGTH_POOL: [i64; 7] = [112, 145, 235, 250, 265, 295, 330];
pub const SHORT_MOLD: Length = Length::from_cm(595);
pub const LONG_MOLD: Length = Length::from_cm(1195);
pub const NEW_BAR: Length = Length::from_cm(1200);
pub const LEFTOVERS: [Length; 4] = [
    Length::from_cm(200),
    Length::from_cm(500),
    Length::from_cm(600),
    Length::from_cm(800),
];
pub const OVERLAP_LOSS: Length = Length::from_cm(30);

/// Draws an instance with `num_types` beam types and `num_molds` molds. The
/// result depends only on the three arguments.
/// One and a half times the curing-weighted demand over total mold length,
/// rounded up.
pub fn default_horizon(beam_types: &[BeamType], molds: &[Length]) -> u32 {
    let work: i64 = beam_types
        .iter()
        .map(|b| i64::from(b.curing_time) * b.demanded_length().cm())
        .sum();
    let capacity: i64 = molds.iter().map(|l| l.cm()).sum::<i64>().max(1);
    ((3 * work + 2 * capacity - 1) / (2 * capacity)) as u32
}

pub fn generate_instance(seed: u64, num_types: usize, num_molds: usize) -> Result<Instance> {
    if !(1..=LENGTH_POOL.len()).contains(&num_types) {
        return Err(Error::InvalidParams(format!(
            "number of beam types must be in 1..={}",
            LENGTH_POOL.len()
        )));
    }
    if num_molds == 0 {
        return Err(Error::InvalidParams("at least one mold is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut beam_types = Vec::with_capacity(num_types);
    for c in 1..=num_types {
        let q = rng.gen_range(2..=LENGTH_POOL.len());
        let mut lengths: Vec<Length> = LENGTH_POOL
            .choose_multiple(&mut rng, q)
            .map(|&cm| Length::from_cm(cm))
            .collect();
        lengths.sort_unstable();
        let curing_time = if num_types <= 3 {
            c as u32
        } else {
            rng.gen_range(1..=3)
        };
        let bars_per_beam = rng.gen_range(1..=3);
        let demands = (0..q).map(|_| rng.gen_range(17..=50)).collect();
        beam_types.push(BeamType {
            lengths,
            demands,
            curing_time,
            bars_per_beam,
        });
    }
    let molds: Vec<Length> = (0..num_molds)
        .map(|_| {
            if rng.gen_bool(0.8) {
                SHORT_MOLD
            } else {
                LONG_MOLD
            }
        })
        .collect();

    let horizon = default_horizon(&beam_types, &molds);

    let max_bars = beam_types
        .iter()
        .map(|b| b.bars_per_beam)
        .max()
        .unwrap_or(0);
    let ub = 2 * horizon * num_molds as u32 * max_bars;
    let mut stock = vec![ub];
    for _ in LEFTOVERS {
        stock.push(rng.gen_range(ub.div_ceil(5)..=ub));
    }

    let mut bars = vec![NEW_BAR];
    bars.extend(LEFTOVERS);
    Ok(Instance::new(
        horizon,
        beam_types,
        molds,
        bars,
        1,
        stock,
        OVERLAP_LOSS,
        [1.0; 4],
    ))
}
