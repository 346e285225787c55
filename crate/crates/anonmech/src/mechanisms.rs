//! Executable auction mechanisms.
//!
//! The decreasing price mechanism (DPM) and its non-DSIC variant, single
//! price / VCG with a reserve, non-anonymous posted prices, VCG with
//! median reserves, and the position-auction mechanisms (scaled DPM and
//! the randomized-reserve top-item second price).
//!
//! Every mechanism is a pure function of (inputs, random stream). Bid
//! ties in descending sorts are broken by a seeded uniform random
//! priority permutation; the `*_with_order` / `*_with_reserve` entry
//! points expose the deterministic cores so that exhaustive checkers can
//! enumerate the randomness exactly.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::distributions::AuctionInstance;
use crate::{Error, Result};

/// Bids indexed by bidder identity.
#[derive(Debug, Clone, PartialEq)]
pub struct BidProfile {
    bids: Vec<f64>,
}

impl BidProfile {
    pub fn new(bids: Vec<f64>) -> Result<Self> {
        if bids.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidArgument(
                "bids must be finite and nonnegative".into(),
            ));
        }
        Ok(Self { bids })
    }

    pub fn len(&self) -> usize {
        self.bids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bids.is_empty()
    }

    pub fn bids(&self) -> &[f64] {
        &self.bids
    }

    pub fn get(&self, i: usize) -> f64 {
        self.bids[i]
    }
}

/// Nonincreasing price vector `p_1 >= ... >= p_n` defining a DPM.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingScheme {
    prices: Vec<f64>,
}

impl PricingScheme {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if prices.is_empty() {
            return Err(Error::InvalidArgument("empty pricing scheme".into()));
        }
        if prices.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidArgument(
                "prices must be finite and nonnegative".into(),
            ));
        }
        if prices.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(
                "prices must be nonincreasing".into(),
            ));
        }
        Ok(Self { prices })
    }

    /// The single-price special case `p_1 = ... = p_n = p`.
    pub fn constant(p: f64, n: usize) -> Self {
        Self {
            prices: vec![p; n],
        }
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }
}

/// One bidder's share of an auction outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BidderOutcome {
    /// Scale received: 1 for a full item, `s_j` for position item `j`, 0
    /// for nothing.
    pub allocation_scale: f64,
    /// Physical item received (1-based), when the setting has positions.
    pub item_index: Option<usize>,
    pub payment: f64,
}

impl BidderOutcome {
    pub fn none() -> Self {
        Self {
            allocation_scale: 0.0,
            item_index: None,
            payment: 0.0,
        }
    }
}

/// Per-bidder allocations and payments for one auction run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bidders: Vec<BidderOutcome>,
    pub total_revenue: f64,
}

impl Outcome {
    pub fn from_bidders(bidders: Vec<BidderOutcome>) -> Self {
        let total_revenue = bidders.iter().map(|b| b.payment).sum();
        Self {
            bidders,
            total_revenue,
        }
    }

    pub fn n(&self) -> usize {
        self.bidders.len()
    }
}

/// Uniformly random priority permutation used for tie-breaking.
pub fn random_priority(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}

/// Bidder indices sorted by bid descending; ties keep the relative order
/// given by `priority` (a permutation of `0..n`).
pub fn order_by_bid_desc(bids: &[f64], priority: &[usize]) -> Vec<usize> {
    let mut rank = vec![0usize; bids.len()];
    for (pos, &i) in priority.iter().enumerate() {
        rank[i] = pos;
    }
    let mut idx: Vec<usize> = (0..bids.len()).collect();
    idx.sort_by(|&a, &b| {
        bids[b]
            .partial_cmp(&bids[a])
            .unwrap()
            .then(rank[a].cmp(&rank[b]))
    });
    idx
}

fn check_lengths(scheme: &PricingScheme, bids: &BidProfile) -> Result<()> {
    if scheme.len() != bids.len() {
        return Err(Error::LengthMismatch(format!(
            "{} prices for {} bids",
            scheme.len(),
            bids.len()
        )));
    }
    Ok(())
}

/// Number of bids meeting `p`, for bids pre-sorted descending.
fn count_at_least(sorted_desc: &[f64], p: f64) -> usize {
    sorted_desc.partition_point(|&b| b >= p)
}

/// DPM winner prefix plus each winner's payment index (0-based rank of
/// the price charged). The payment index of the winner at sorted rank `r`
/// is the smallest `j >= r` where exactly `j + 1` bids meet `p_{j+1}`; it
/// exists for every winner because the deficit `count(j) - (j + 1)`
/// starts nonnegative at `j = r`, ends nonpositive at `j = n - 1`, and
/// falls by at most one per step.
fn dpm_winners_and_price_indices(prices: &[f64], sorted_desc: &[f64]) -> Vec<usize> {
    let n = prices.len();
    let mut winners = 0;
    while winners < n && sorted_desc[winners] >= prices[winners] {
        winners += 1;
    }
    let mut indices = Vec::with_capacity(winners);
    let mut j = 0;
    for r in 0..winners {
        if j < r {
            j = r;
        }
        while count_at_least(sorted_desc, prices[j]) != j + 1 {
            j += 1;
            assert!(j < n, "payment index must exist for every DPM winner");
        }
        indices.push(j);
    }
    indices
}

/// Decreasing Price Mechanism with an explicit descending order.
pub fn dpm_with_order(scheme: &PricingScheme, bids: &BidProfile, order: &[usize]) -> Outcome {
    let prices = scheme.prices();
    let sorted_desc: Vec<f64> = order.iter().map(|&i| bids.get(i)).collect();
    let price_indices = dpm_winners_and_price_indices(prices, &sorted_desc);
    let mut out = vec![BidderOutcome::none(); bids.len()];
    for (r, &j) in price_indices.iter().enumerate() {
        out[order[r]] = BidderOutcome {
            allocation_scale: 1.0,
            item_index: None,
            payment: prices[j],
        };
    }
    Outcome::from_bidders(out)
}

/// Decreasing Price Mechanism: sort bids descending (random tie-break),
/// allocate the maximal prefix with `b_(i) >= p_i`, and charge each
/// winner the price at the smallest index `j >= i` where exactly `j`
/// bidders meet `p_j`.
pub fn run_dpm(
    scheme: &PricingScheme,
    bids: &BidProfile,
    rng: &mut impl Rng,
) -> Result<Outcome> {
    check_lengths(scheme, bids)?;
    let priority = random_priority(bids.len(), rng);
    Ok(dpm_with_order(scheme, bids, &order_by_bid_desc(bids.bids(), &priority)))
}

/// Non-DSIC DPM with an explicit descending order: the rank-`i` bidder
/// buys at `p_i` iff `b_(i) >= p_i`; no drop, no chain correction.
pub fn dpm_nondsic_with_order(
    scheme: &PricingScheme,
    bids: &BidProfile,
    order: &[usize],
) -> Outcome {
    let prices = scheme.prices();
    let mut out = vec![BidderOutcome::none(); bids.len()];
    for (r, &i) in order.iter().enumerate() {
        if bids.get(i) >= prices[r] {
            out[i] = BidderOutcome {
                allocation_scale: 1.0,
                item_index: None,
                payment: prices[r],
            };
        }
    }
    Outcome::from_bidders(out)
}

pub fn run_dpm_nondsic(
    scheme: &PricingScheme,
    bids: &BidProfile,
    rng: &mut impl Rng,
) -> Result<Outcome> {
    check_lengths(scheme, bids)?;
    let priority = random_priority(bids.len(), rng);
    Ok(dpm_nondsic_with_order(scheme, bids, &order_by_bid_desc(bids.bids(), &priority)))
}

/// Single price (VCG with reserve `p`) with an explicit descending order:
/// the top `min(m, #{b >= p})` bids win and pay the maximum of `p` and
/// the (m+1)-st highest bid overall (0 when absent).
pub fn single_price_with_order(
    price: f64,
    units: usize,
    bids: &BidProfile,
    order: &[usize],
) -> Outcome {
    let sorted_desc: Vec<f64> = order.iter().map(|&i| bids.get(i)).collect();
    let runner_up = if bids.len() > units {
        sorted_desc[units]
    } else {
        0.0
    };
    let pay = price.max(runner_up);
    let winners = count_at_least(&sorted_desc, price).min(units);
    let mut out = vec![BidderOutcome::none(); bids.len()];
    for &i in &order[..winners] {
        out[i] = BidderOutcome {
            allocation_scale: 1.0,
            item_index: None,
            payment: pay,
        };
    }
    Outcome::from_bidders(out)
}

pub fn run_single_price(
    price: f64,
    units: usize,
    bids: &BidProfile,
    rng: &mut impl Rng,
) -> Outcome {
    let priority = random_priority(bids.len(), rng);
    single_price_with_order(price, units, bids, &order_by_bid_desc(bids.bids(), &priority))
}

/// Non-anonymous posted prices: bidder `i` (by identity) buys iff
/// `b_i >= prices[i]` and pays that price.
pub fn run_posted_prices(prices_by_identity: &[f64], bids: &BidProfile) -> Result<Outcome> {
    if prices_by_identity.len() != bids.len() {
        return Err(Error::LengthMismatch(format!(
            "{} prices for {} bids",
            prices_by_identity.len(),
            bids.len()
        )));
    }
    let out = bids
        .bids()
        .iter()
        .zip(prices_by_identity)
        .map(|(&b, &p)| {
            if b >= p {
                BidderOutcome {
                    allocation_scale: 1.0,
                    item_index: None,
                    payment: p,
                }
            } else {
                BidderOutcome::none()
            }
        })
        .collect();
    Ok(Outcome::from_bidders(out))
}

/// VCG with per-bidder median reserves, explicit eligibility order.
pub fn vcg_median_with_order(
    inst: &AuctionInstance,
    bids: &BidProfile,
    order: &[usize],
) -> Outcome {
    let medians = inst.medians();
    let units = inst.units();
    let eligible: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&i| bids.get(i) >= medians[i])
        .collect();
    let runner_up = if eligible.len() > units {
        bids.get(eligible[units])
    } else {
        0.0
    };
    let winners = eligible.len().min(units);
    let mut out = vec![BidderOutcome::none(); bids.len()];
    for &i in &eligible[..winners] {
        out[i] = BidderOutcome {
            allocation_scale: 1.0,
            item_index: None,
            payment: medians[i].max(runner_up),
        };
    }
    Outcome::from_bidders(out)
}

/// VCG-m: eligible bidders meet their own median; the top `m` eligible
/// bids win and pay the max of their median and the (m+1)-st highest
/// eligible bid.
pub fn run_vcg_median_reserve(
    inst: &AuctionInstance,
    bids: &BidProfile,
    rng: &mut impl Rng,
) -> Result<Outcome> {
    if inst.n() != bids.len() {
        return Err(Error::LengthMismatch(format!(
            "{} bidders for {} bids",
            inst.n(),
            bids.len()
        )));
    }
    let priority = random_priority(bids.len(), rng);
    Ok(vcg_median_with_order(inst, bids, &order_by_bid_desc(bids.bids(), &priority)))
}

/// Scaled DPM core. `accept(prob)` resolves each downgrade lottery; the
/// sequence of lottery offers is deterministic given the bids and order
/// because an item is consumed when offered, whether or not the lottery
/// succeeds.
pub fn scaled_dpm_core(
    scheme: &PricingScheme,
    inst: &AuctionInstance,
    bids: &BidProfile,
    order: &[usize],
    accept: &mut dyn FnMut(f64) -> bool,
) -> Outcome {
    let prices = scheme.prices();
    let sorted_desc: Vec<f64> = order.iter().map(|&i| bids.get(i)).collect();
    let price_indices = dpm_winners_and_price_indices(prices, &sorted_desc);
    let mut out = vec![BidderOutcome::none(); bids.len()];
    let mut used = vec![false; bids.len() + 1];
    let mut prev_index = 0usize; // 1-based; price indices are nondecreasing in rank
    for (r, &j0) in price_indices.iter().enumerate() {
        let j = j0 + 1;
        let s_j = inst.scale(j);
        let payment = s_j * prices[j0];
        let mut outcome = BidderOutcome {
            allocation_scale: 0.0,
            item_index: None,
            payment,
        };
        if j != prev_index {
            // First agent at this price index takes item j itself.
            used[j] = true;
            if j <= inst.units() {
                outcome.allocation_scale = s_j;
                outcome.item_index = Some(j);
            }
        } else if s_j > 0.0 {
            // Additional agent: offer the first unused item j' < j with
            // probability s_j / s_{j'}, else no item.
            if let Some(jp) = (1..j).find(|&x| !used[x]) {
                used[jp] = true;
                if accept(s_j / inst.scale(jp)) {
                    outcome.allocation_scale = inst.scale(jp);
                    outcome.item_index = Some(jp);
                }
            }
        }
        out[order[r]] = outcome;
        prev_index = j;
    }
    Outcome::from_bidders(out)
}

/// Scaled DPM for position auctions: run the DPM logic, charge the
/// winner at price index `j` the amount `s_j * p_j` unconditionally, and
/// assign physical items so that each winner's expected scale is `s_j`.
pub fn run_scaled_dpm(
    scheme: &PricingScheme,
    inst: &AuctionInstance,
    bids: &BidProfile,
    rng: &mut impl Rng,
) -> Result<Outcome> {
    if inst.scales().is_none() {
        return Err(Error::InvalidInstance(
            "scaled DPM needs an instance with scale factors".into(),
        ));
    }
    check_lengths(scheme, bids)?;
    let priority = random_priority(bids.len(), rng);
    let order = order_by_bid_desc(bids.bids(), &priority);
    let mut accept = |p: f64| rng.random::<f64>() < p;
    Ok(scaled_dpm_core(scheme, inst, bids, &order, &mut accept))
}

/// The reserve mixture for the top-item second price auction:
/// the monopoly price of agent 1 with weight 1/2, and of agents 2..k+1
/// with weight 1/(2k) each.
pub fn top_item_reserves(inst: &AuctionInstance, k: usize) -> Result<Vec<(f64, f64)>> {
    if k == 0 || inst.n() < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "top-item second price needs 1 <= k <= n - 1, got k = {k}, n = {}",
            inst.n()
        )));
    }
    let mut reserves = vec![(inst.bidder(0).monopoly().0, 0.5)];
    for i in 1..=k {
        reserves.push((inst.bidder(i).monopoly().0, 0.5 / k as f64));
    }
    Ok(reserves)
}

/// Top-item second price with an explicit reserve: item 1 goes to the
/// highest bidder if she meets the reserve, at `s_1 * max(reserve,
/// second-highest bid)`.
pub fn top_item_with_reserve(
    inst: &AuctionInstance,
    reserve: f64,
    bids: &BidProfile,
    order: &[usize],
) -> Outcome {
    let mut out = vec![BidderOutcome::none(); bids.len()];
    let top = order[0];
    if bids.get(top) >= reserve {
        let second = if bids.len() > 1 { bids.get(order[1]) } else { 0.0 };
        out[top] = BidderOutcome {
            allocation_scale: inst.scale(1),
            item_index: Some(1),
            payment: inst.scale(1) * reserve.max(second),
        };
    }
    Outcome::from_bidders(out)
}

/// Second price auction for item 1 only, with the randomized reserve
/// drawn from [`top_item_reserves`].
pub fn run_top_item_second_price(
    inst: &AuctionInstance,
    k: usize,
    bids: &BidProfile,
    rng: &mut impl Rng,
) -> Result<Outcome> {
    let reserves = top_item_reserves(inst, k)?;
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let mut reserve = reserves[reserves.len() - 1].0;
    for (p, w) in &reserves {
        cum += w;
        if u < cum {
            reserve = *p;
            break;
        }
    }
    let priority = random_priority(bids.len(), rng);
    let order = order_by_bid_desc(bids.bids(), &priority);
    Ok(top_item_with_reserve(inst, reserve, bids, &order))
}
