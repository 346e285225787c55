//! Instance files and named instance generators.
//!
//! Instances are stored as JSON documents with a `bidders` list plus
//! optional `units` and `scales`. Bidders need not be pre-sorted; the
//! parser sorts by support low (descending) and reports the permutation
//! it applied.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{AuctionInstance, ValueDistribution};
use crate::rng;
use crate::{Error, Result};

/// One bidder entry of an instance file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BidderSpec {
    Point { value: f64 },
    Discrete { values: Vec<f64>, probs: Vec<f64> },
    Uniform { lo: f64, hi: f64 },
}

impl BidderSpec {
    fn build(&self) -> Result<ValueDistribution> {
        match self {
            Self::Point { value } => ValueDistribution::point(*value),
            Self::Discrete { values, probs } => {
                ValueDistribution::discrete(values.clone(), probs.clone())
            }
            Self::Uniform { lo, hi } => ValueDistribution::uniform(*lo, *hi),
        }
    }

    fn from_distribution(d: &ValueDistribution) -> Self {
        match d {
            ValueDistribution::PointMass { value } => Self::Point { value: *value },
            ValueDistribution::DiscretePmf { values, masses } => Self::Discrete {
                values: values.clone(),
                probs: masses.clone(),
            },
            ValueDistribution::UniformInterval { lo, hi } => Self::Uniform { lo: *lo, hi: *hi },
        }
    }
}

/// The JSON document shape for auction instances.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceFile {
    pub bidders: Vec<BidderSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
}

impl InstanceFile {
    pub fn from_instance(inst: &AuctionInstance) -> Self {
        Self {
            bidders: inst
                .bidders()
                .iter()
                .map(BidderSpec::from_distribution)
                .collect(),
            units: Some(inst.units()),
            scales: inst.scales().map(|s| s.to_vec()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance files always serialize")
    }
}

/// Parses a JSON instance document into a sorted instance plus the
/// permutation mapping sorted positions to the file's bidder order.
pub fn parse_instance(text: &str) -> Result<(AuctionInstance, Vec<usize>)> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut bidders = Vec::with_capacity(file.bidders.len());
    for (i, spec) in file.bidders.iter().enumerate() {
        let d = spec
            .build()
            .map_err(|e| Error::Parse(format!("bidders[{i}]: {e}")))?;
        bidders.push(d);
    }
    AuctionInstance::sorted(bidders, file.units, file.scales)
        .map_err(|e| Error::Parse(e.to_string()))
}

/// Point values `1/i` for `i = 1..=n`: the tight instance where the best
/// single price earns 1 while per-bidder pricing earns `H_n`.
pub fn gen_harmonic(n: usize) -> AuctionInstance {
    let bidders = (1..=n)
        .map(|i| ValueDistribution::point(1.0 / i as f64).expect("positive point"))
        .collect();
    AuctionInstance::digital(bidders).expect("harmonic instance is sorted")
}

/// Bidder `i` has value `1/eps^i` with probability `eps^i`, else 0.
pub fn gen_geometric(eps: f64, n: usize) -> Result<AuctionInstance> {
    gen_geometric_delta(eps, 1.0, n)
}

/// The scaled variant: value `1/eps^i` with probability `delta * eps^i`.
pub fn gen_geometric_delta(eps: f64, delta: f64, n: usize) -> Result<AuctionInstance> {
    if !(0.0 < eps && eps < 1.0) {
        return Err(Error::InvalidArgument(format!("eps {eps} outside (0, 1)")));
    }
    if !(0.0 < delta && delta <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta {delta} outside (0, 1]"
        )));
    }
    let mut bidders = Vec::with_capacity(n);
    for i in 1..=n {
        let p = delta * eps.powi(i as i32);
        if p >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "high-value probability {p} at i = {i} reaches 1"
            )));
        }
        bidders.push(ValueDistribution::discrete(
            vec![0.0, eps.powi(-(i as i32))],
            vec![1.0 - p, p],
        )?);
    }
    AuctionInstance::digital(bidders)
}

/// The nested uniform family: `2^i * L` agents with values in
/// `U[0, 2^-i]` for each level `i = 0..levels-1`.
pub fn gen_nested_uniform(levels: u32, l: u64) -> Result<AuctionInstance> {
    if levels == 0 || l == 0 {
        return Err(Error::InvalidArgument(
            "nested uniform needs levels >= 1 and L >= 1".into(),
        ));
    }
    let mut bidders = Vec::new();
    for i in 0..levels {
        let hi = 2.0f64.powi(-(i as i32));
        for _ in 0..(l << i) {
            bidders.push(ValueDistribution::uniform(0.0, hi)?);
        }
    }
    AuctionInstance::digital(bidders)
}

/// A random instance that is exactly k-ambiguous: support lows decrease
/// geometrically, and each bidder's support high lands strictly between
/// the lows of its (k+1)-st and k-th predecessors, so it reaches exactly
/// k of them. Each bidder gets three equally weighted atoms.
pub fn gen_random_k_ambiguous(n: usize, k: usize, seed: u64) -> AuctionInstance {
    assert!(n >= 2 && k + 2 <= n, "need n >= max(2, k + 2)");
    let mut r = rng::stream(seed.wrapping_mul(0x9E37).wrapping_add(k as u64));
    let mut lows = vec![1.0f64];
    for _ in 1..n {
        let ratio = 0.55 + 0.30 * r.random::<f64>();
        lows.push(lows.last().unwrap() * ratio);
    }
    let mut bidders = Vec::with_capacity(n);
    for i in 0..n {
        let u = 0.03 + 0.94 * r.random::<f64>();
        let high = if i <= k {
            // Few enough predecessors that reaching all of them is fine.
            lows[0] * (1.0 + 0.25 * u)
        } else {
            lows[i - k] + u * (lows[i - k - 1] - lows[i - k])
        };
        let t = 0.3 + 0.4 * r.random::<f64>();
        let mid = lows[i] + t * (high - lows[i]);
        let third = 1.0 / 3.0;
        bidders.push(
            ValueDistribution::discrete(
                vec![lows[i], mid, high],
                vec![third, third, 1.0 - 2.0 * third],
            )
            .expect("generated atoms are strictly increasing"),
        );
    }
    let inst = AuctionInstance::digital(bidders).expect("lows are sorted descending");
    debug_assert_eq!(inst.ambiguity(), k);
    inst
}

/// As [`gen_random_k_ambiguous`], with position scales `s_j = 2^{-(j-1)}`.
pub fn gen_random_k_ambiguous_position(n: usize, k: usize, seed: u64) -> AuctionInstance {
    let inst = gen_random_k_ambiguous(n, k, seed);
    let scales: Vec<f64> = (0..n).map(|j| 2.0f64.powi(-(j as i32))).collect();
    AuctionInstance::new(inst.bidders().to_vec(), Some(n), Some(scales))
        .expect("scales are nonincreasing in [0, 1]")
}
