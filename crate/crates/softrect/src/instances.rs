//! Benchmark instance generation, hardness-reduction constructors, the
//! subset-sum oracle they are tested against, and instance file I/O.
//!
//! Generation is deterministic: the PRNG is ChaCha8 seeded from the
//! 64-bit config seed (platform independent), and the generator id is
//! recorded in the instance name.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::domain::Instance;
use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, rat_int, Rational};

/// Area distribution classes for generated instances.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InstanceClass {
    /// Uniform on [1, 200].
    Uniform,
    /// One of three uniform ranges (1-10, 11-50, 51-150), equal odds.
    MixedUniform,
    /// One of three normals (5,2), (25,10), (125,50), resampled until
    /// the rounded value lands in [1, 200].
    MixedNormal,
}

impl InstanceClass {
    pub const ALL: [InstanceClass; 3] = [
        InstanceClass::Uniform,
        InstanceClass::MixedUniform,
        InstanceClass::MixedNormal,
    ];
}

impl std::fmt::Display for InstanceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InstanceClass::Uniform => "U",
            InstanceClass::MixedUniform => "MU",
            InstanceClass::MixedNormal => "MN",
        })
    }
}

impl std::str::FromStr for InstanceClass {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "U" | "u" => Ok(InstanceClass::Uniform),
            "MU" | "mu" => Ok(InstanceClass::MixedUniform),
            "MN" | "mn" => Ok(InstanceClass::MixedNormal),
            other => Err(format!("unknown instance class {other:?} (use U, MU or MN)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct GeneratorConfig {
    pub class: InstanceClass,
    pub n: usize,
    pub seed: u64,
}

const GENERATOR_ID: &str = "chacha8";
const MAX_REGION_RETRIES: usize = 100;

fn sample_area(class: InstanceClass, rng: &mut ChaCha8Rng) -> u64 {
    match class {
        InstanceClass::Uniform => rng.random_range(1..=200),
        InstanceClass::MixedUniform => match rng.random_range(0..3u8) {
            0 => rng.random_range(1..=10),
            1 => rng.random_range(11..=50),
            _ => rng.random_range(51..=150),
        },
        InstanceClass::MixedNormal => loop {
            let (mean, sd) = match rng.random_range(0..3u8) {
                0 => (5.0, 2.0),
                1 => (25.0, 10.0),
                _ => (125.0, 50.0),
            };
            let draw: f64 = Normal::new(mean, sd).expect("valid parameters").sample(rng);
            let rounded = draw.round();
            // The smallest normal can go non-positive; resample outside
            // [1, 200] rather than only above 200.
            if (1.0..=200.0).contains(&rounded) {
                break rounded as u64;
            }
        },
    }
}

/// Generates an instance: sample `n` integer areas by class, pick the
/// region sides from the area total, then shave single units off
/// randomly chosen rectangles until the areas exactly fill the region.
pub fn generate(config: &GeneratorConfig) -> Result<Instance> {
    if config.n == 0 {
        return Err(Error::EmptyInstance);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut areas: Vec<u64> = (0..config.n)
        .map(|_| sample_area(config.class, &mut rng))
        .collect();
    let total: u64 = areas.iter().sum();

    // L1 ranges over integers with L1 >= sqrt(total / 3) and
    // L1 <= sqrt(3 * total); the interval always contains an integer.
    let mut lo = crate::scalar::isqrt_floor(total / 3);
    while 3 * lo * lo < total {
        lo += 1;
    }
    let hi = crate::scalar::isqrt_floor(3 * total).max(lo);

    let mut chosen = None;
    for attempt in 0..MAX_REGION_RETRIES {
        let l1 = rng.random_range(lo..=hi);
        let l2 = total / l1;
        let deficit = total - l1 * l2;
        let shrinkable = areas.iter().filter(|&&a| a >= 2).count() as u64;
        if deficit <= shrinkable || attempt == MAX_REGION_RETRIES - 1 {
            chosen = Some((l1, l2, deficit));
            break;
        }
    }
    let (l1, l2, mut deficit) = chosen.expect("loop always chooses");

    let shrinkable: Vec<usize> = (0..config.n).filter(|&i| areas[i] >= 2).collect();
    if deficit <= shrinkable.len() as u64 {
        let picks = rand::seq::index::sample(&mut rng, shrinkable.len(), deficit as usize);
        for pick in picks {
            areas[shrinkable[pick]] -= 1;
        }
    } else {
        // Round-robin fallback: repeated passes shaving one unit from
        // every rectangle that still has at least two.
        while deficit > 0 {
            let before = deficit;
            for area in areas.iter_mut() {
                if deficit == 0 {
                    break;
                }
                if *area >= 2 {
                    *area -= 1;
                    deficit -= 1;
                }
            }
            if deficit == before {
                return Err(Error::GenerationFailed { deficit });
            }
        }
    }
    debug_assert_eq!(areas.iter().sum::<u64>(), l1 * l2);

    let name = format!(
        "{}-n{}-s{}-{GENERATOR_ID}",
        config.class, config.n, config.seed
    );
    Ok(Instance::new(
        rat_int(l1 as i64),
        rat_int(l2 as i64),
        areas.iter().map(|&a| rat_int(a as i64)).collect(),
    )?
    .with_name(name))
}

// ---------------------------------------------------------------------
// Hardness reductions
// ---------------------------------------------------------------------

/// Positive integers to be split into two equal-sum halves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoPartitionInstance {
    values: Vec<u64>,
}

impl TwoPartitionInstance {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySource);
        }
        if values.iter().any(|&v| v == 0) {
            return Err(Error::NonPositiveArea { index: 0 });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn sum(&self) -> u64 {
        self.values.iter().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.values).expect("plain integers")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let values: Vec<u64> = serde_json::from_str(text)?;
        Self::new(values)
    }
}

/// Largest-perimeter decision instance from an equal-split problem:
/// region `(sum/2) x (2 max)`, areas `c_i * max`, threshold `4 * max`.
/// The split exists iff some layout keeps every perimeter within the
/// threshold.
pub fn reduce_2partition_to_perimax(tp: &TwoPartitionInstance) -> (Instance, Rational) {
    let c_max = *tp.values().iter().max().expect("non-empty");
    let threshold = rat_int(4 * c_max as i64);
    let l1 = rat_int(tp.sum() as i64) / rat_int(2);
    let l2 = rat_int(2 * c_max as i64);
    let areas = tp
        .values()
        .iter()
        .map(|&c| rat_int((c * c_max) as i64))
        .collect();
    let instance = Instance::new(l1, l2, areas)
        .expect("areas sum to (sum/2) * 2max by construction")
        .with_name("two-partition-perimax");
    (instance, threshold)
}

/// Aspect-ratio decision instance from an equal-split problem. With
/// `M = 2 (C + 1)^2 / min c_i`, the region is `(M + 1/M + C/2) x 2` and
/// two rectangles each of area `M` and `1/M` are added; the split exists
/// iff some layout keeps every aspect ratio within `M`.
pub fn reduce_2partition_to_aspect(tp: &TwoPartitionInstance) -> (Instance, Rational) {
    let c_min = *tp.values().iter().min().expect("non-empty");
    let c_sum = rat_int(tp.sum() as i64);
    let c_plus_one = &c_sum + rat_int(1);
    let m = rat_int(2) * &c_plus_one * &c_plus_one / rat_int(c_min as i64);
    let m_inv = m.recip();
    let l1 = &m + &m_inv + &c_sum / rat_int(2);
    let l2 = rat_int(2);
    let mut areas: Vec<Rational> = tp.values().iter().map(|&c| rat_int(c as i64)).collect();
    areas.push(m.clone());
    areas.push(m.clone());
    areas.push(m_inv.clone());
    areas.push(m_inv);
    let instance = Instance::new(l1, l2, areas)
        .expect("areas sum to L1 * 2 by construction")
        .with_name("two-partition-aspect");
    (instance, m)
}

/// Pseudo-polynomial subset-sum oracle: can the values be split into
/// two equal-sum halves? Bitset sweep, guarded by the value total.
pub fn solve_2partition_dp(tp: &TwoPartitionInstance) -> Result<bool> {
    const GUARD: u64 = 1_000_000;
    let sum = tp.sum();
    if sum > GUARD {
        return Err(Error::SubsetSumGuard { sum, limit: GUARD });
    }
    if sum % 2 == 1 {
        return Ok(false);
    }
    let target = (sum / 2) as usize;
    let mut bits = vec![0u64; target / 64 + 1];
    bits[0] = 1;
    for &value in tp.values() {
        shift_or(&mut bits, value as usize);
    }
    Ok(bits[target / 64] >> (target % 64) & 1 == 1)
}

/// `bits |= bits << k` over a little-endian word vector.
fn shift_or(bits: &mut [u64], k: usize) {
    let word_shift = k / 64;
    let bit_shift = k % 64;
    for w in (word_shift..bits.len()).rev() {
        let mut incoming = bits[w - word_shift] << bit_shift;
        if bit_shift > 0 && w > word_shift {
            incoming |= bits[w - word_shift - 1] >> (64 - bit_shift);
        }
        bits[w] |= incoming;
    }
}

// ---------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------

/// On-disk instance format: every numeric field is a rational rendered
/// as `p/q` in lowest terms, or a plain integer string.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    version: u64,
    name: String,
    #[serde(rename = "L1")]
    l1: String,
    #[serde(rename = "L2")]
    l2: String,
    areas: Vec<String>,
}

const INSTANCE_FILE_VERSION: u64 = 1;

pub fn instance_to_json(instance: &Instance) -> String {
    let file = InstanceFile {
        version: INSTANCE_FILE_VERSION,
        name: instance.name().unwrap_or_default().to_string(),
        l1: format_rational(instance.l1()),
        l2: format_rational(instance.l2()),
        areas: instance.areas().iter().map(format_rational).collect(),
    };
    serde_json::to_string_pretty(&file).expect("no non-string keys")
}

pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    if file.version != INSTANCE_FILE_VERSION {
        return Err(Error::UnsupportedVersion {
            version: file.version,
        });
    }
    let l1 = parse_rational(&file.l1)?;
    let l2 = parse_rational(&file.l2)?;
    let areas = file
        .areas
        .iter()
        .map(|a| parse_rational(a))
        .collect::<Result<Vec<_>>>()?;
    let instance = Instance::new(l1, l2, areas)?;
    Ok(if file.name.is_empty() {
        instance
    } else {
        instance.with_name(file.name)
    })
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_json(&fs::read_to_string(path)?)
}

/// Writes atomically: the JSON goes to a sibling temp file which is
/// then renamed over the target.
pub fn write_instance(instance: &Instance, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, instance_to_json(instance))?;
    fs::rename(&tmp, path)?;
    Ok(())
}
