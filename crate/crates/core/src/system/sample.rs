use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::map::{Domain, DynamicalMap};
use super::space::{Point, SampleSpace, Topology};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleKind {
    Grid,
    Trajectory,
    UniformRandom,
    /// Abstract finite point set `0..size`.
    Discrete,
}

/// Build a finite surrogate for the state space of `map` (or `[0,1)` when no
/// map is given).
///
/// Trajectory samples start at `x0` when given, otherwise at a seeded random
/// point. For the doubling map the orbit is generated from a seeded bit
/// stream so that every visited point carries full double precision: plain
/// floating-point iteration shifts the mantissa out and collapses to 0 after
/// about 53 steps.
pub fn build_sample(
    kind: SampleKind,
    size: usize,
    map: Option<&DynamicalMap>,
    seed: u64,
    x0: Option<&Point>,
) -> Result<SampleSpace> {
    if size < 2 {
        return Err(Error::SizeTooSmall { size });
    }
    let dimension = map.map_or(1, |m| m.dimension());
    let topology = map.map_or_else(|| vec![Topology::Line], |m| m.topology().to_vec());
    let domain = map.map_or(Domain::UnitBox, |m| m.domain());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SampleKind::Discrete => SampleSpace::discrete(size),
        SampleKind::Grid => {
            let per_dim = (size as f64).powf(1.0 / dimension as f64).round() as usize;
            if per_dim.checked_pow(dimension as u32) != Some(size) {
                return Err(Error::GridSize { size, dimension });
            }
            match domain {
                Domain::UnitBox => SampleSpace::grid(per_dim, topology),
                Domain::UnitDisk => SampleSpace::disk_grid(per_dim),
            }
        }
        SampleKind::UniformRandom => {
            let mut coords = Vec::with_capacity(size * dimension);
            while coords.len() < size * dimension {
                let p: Vec<f64> = match domain {
                    Domain::UnitBox => (0..dimension).map(|_| rng.gen::<f64>()).collect(),
                    Domain::UnitDisk => {
                        let p: Vec<f64> =
                            (0..dimension).map(|_| rng.gen_range(-1.0..1.0)).collect();
                        if p.iter().map(|x| x * x).sum::<f64>() > 1.0 {
                            continue;
                        }
                        p
                    }
                };
                coords.extend(p);
            }
            SampleSpace::from_points_merging(dimension, coords, None, topology, None)
        }
        SampleKind::Trajectory => {
            let map = map.ok_or(Error::MissingMap)?;
            let coords = if map.is_doubling() && x0.is_none() {
                doubling_orbit(&mut rng, size)
            } else {
                let start = match x0 {
                    Some(p) => p.clone(),
                    None => Point::new(match domain {
                        Domain::UnitBox => (0..dimension).map(|_| rng.gen::<f64>()).collect(),
                        Domain::UnitDisk => {
                            let r = rng.gen::<f64>().sqrt();
                            let a = rng.gen::<f64>() * std::f64::consts::TAU;
                            vec![r * a.cos(), r * a.sin()]
                        }
                    }),
                };
                map.trajectory(&start, size)?
                    .into_iter()
                    .flat_map(|p| p.0)
                    .collect()
            };
            SampleSpace::from_points_merging(dimension, coords, None, topology, None)
        }
    }
}

/// Orbit `x_t = Σ_k b_{t+k} 2^{-k-1}` (53-bit window) of the binary shift.
/// Consecutive points satisfy `x_{t+1} = 2 x_t mod 1` up to the last bit.
fn doubling_orbit(rng: &mut ChaCha8Rng, size: usize) -> Vec<f64> {
    const BITS: u32 = 53;
    let mask: u64 = (1 << BITS) - 1;
    let scale = 1.0 / (1u64 << BITS) as f64;
    let mut window: u64 = rng.gen::<u64>() & mask;
    let mut pool = 0u64;
    let mut left = 0u32;
    let mut coords = Vec::with_capacity(size);
    for _ in 0..size {
        coords.push(window as f64 * scale);
        if left == 0 {
            pool = rng.gen();
            left = 64;
        }
        let bit = pool & 1;
        pool >>= 1;
        left -= 1;
        window = ((window << 1) & mask) | bit;
    }
    coords
}
