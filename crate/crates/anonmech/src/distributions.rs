//! Value priors and auction instances.
//!
//! A [`ValueDistribution`] is one bidder's prior: a point mass, a finite
//! pmf over increasing atoms, or a uniform interval. An
//! [`AuctionInstance`] is an ordered list of priors plus a unit count and
//! optional position scale factors. Bidders are kept sorted so that
//! support lows are nonincreasing; every downstream construction indexes
//! bidders in that order.
//!
//! Conventions, inherited by every mechanism in the crate:
//! - "value meets price" is the weak inequality `v >= p`, so atoms at the
//!   price count fully;
//! - monopoly-price ties break toward the lowest price;
//! - the median is the smallest `v` with `CDF(v) >= 1/2`;
//! - supports are treated as closed intervals on both ends.

use rand::Rng;

use crate::{Error, Result};

/// Tolerance for matching two floats that denote the same support atom.
pub fn values_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

/// One bidder's value prior.
#[derive(Debug, Clone, PartialEq)]
pub enum ValueDistribution {
    PointMass { value: f64 },
    DiscretePmf { values: Vec<f64>, masses: Vec<f64> },
    UniformInterval { lo: f64, hi: f64 },
}

impl ValueDistribution {
    pub fn point(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "point mass needs a finite nonnegative value, got {value}"
            )));
        }
        Ok(Self::PointMass { value })
    }

    pub fn discrete(values: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.len() != masses.len() {
            return Err(Error::InvalidDistribution(format!(
                "discrete pmf needs matching nonempty values/masses, got {}/{}",
                values.len(),
                masses.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidDistribution(
                "discrete pmf values must be finite and nonnegative".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDistribution(
                "discrete pmf values must be strictly increasing".into(),
            ));
        }
        if masses.iter().any(|m| !m.is_finite() || *m <= 0.0) {
            return Err(Error::InvalidDistribution(
                "discrete pmf masses must be positive".into(),
            ));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "discrete pmf masses sum to {total}, expected 1"
            )));
        }
        Ok(Self::DiscretePmf { values, masses })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || lo >= hi {
            return Err(Error::InvalidDistribution(format!(
                "uniform interval needs 0 <= lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Self::UniformInterval { lo, hi })
    }

    /// Lower end of the support (`a_i`).
    pub fn support_low(&self) -> f64 {
        match self {
            Self::PointMass { value } => *value,
            Self::DiscretePmf { values, .. } => values[0],
            Self::UniformInterval { lo, .. } => *lo,
        }
    }

    /// Upper end of the support (`b_i`).
    pub fn support_high(&self) -> f64 {
        match self {
            Self::PointMass { value } => *value,
            Self::DiscretePmf { values, .. } => *values.last().unwrap(),
            Self::UniformInterval { hi, .. } => *hi,
        }
    }

    /// `Pr[v >= p]`, closed form per variant. Atoms at `p` count fully.
    pub fn prob_at_least(&self, p: f64) -> f64 {
        match self {
            Self::PointMass { value } => {
                if *value >= p {
                    1.0
                } else {
                    0.0
                }
            }
            Self::DiscretePmf { values, masses } => values
                .iter()
                .zip(masses)
                .filter(|(v, _)| **v >= p)
                .map(|(_, m)| *m)
                .sum(),
            Self::UniformInterval { lo, hi } => {
                if p <= *lo {
                    1.0
                } else if p >= *hi {
                    0.0
                } else {
                    (hi - p) / (hi - lo)
                }
            }
        }
    }

    /// `Pr[v <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::PointMass { value } => {
                if x >= *value {
                    1.0
                } else {
                    0.0
                }
            }
            Self::DiscretePmf { values, masses } => values
                .iter()
                .zip(masses)
                .filter(|(v, _)| **v <= x)
                .map(|(_, m)| *m)
                .sum(),
            Self::UniformInterval { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
        }
    }

    /// Monopoly (Myerson reserve) price and its revenue: the maximizer of
    /// `p * Pr[v >= p]`, ties broken toward the lowest price.
    pub fn monopoly(&self) -> (f64, f64) {
        match self {
            Self::PointMass { value } => (*value, *value),
            Self::DiscretePmf { values, .. } => {
                let mut best = (values[0], values[0] * self.prob_at_least(values[0]));
                for &p in &values[1..] {
                    let rev = p * self.prob_at_least(p);
                    if rev > best.1 {
                        best = (p, rev);
                    }
                }
                best
            }
            Self::UniformInterval { lo, hi } => {
                let p = (hi / 2.0).max(*lo);
                (p, p * self.prob_at_least(p))
            }
        }
    }

    /// Smallest `v` with `CDF(v) >= 1/2`.
    pub fn median(&self) -> f64 {
        match self {
            Self::PointMass { value } => *value,
            Self::DiscretePmf { values, masses } => {
                let mut cum = 0.0;
                for (v, m) in values.iter().zip(masses) {
                    cum += m;
                    if cum >= 0.5 - 1e-9 {
                        return *v;
                    }
                }
                *values.last().unwrap()
            }
            Self::UniformInterval { lo, hi } => (lo + hi) / 2.0,
        }
    }

    /// Inverse-CDF draw from the caller's stream.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        let u: f64 = rng.random();
        match self {
            Self::PointMass { value } => *value,
            Self::DiscretePmf { values, masses } => {
                let mut cum = 0.0;
                for (v, m) in values.iter().zip(masses) {
                    cum += m;
                    if u < cum {
                        return *v;
                    }
                }
                *values.last().unwrap()
            }
            Self::UniformInterval { lo, hi } => lo + u * (hi - lo),
        }
    }

    /// Support atoms with masses, for the discrete variants.
    pub fn discrete_atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            Self::PointMass { value } => Some(vec![(*value, 1.0)]),
            Self::DiscretePmf { values, masses } => {
                Some(values.iter().copied().zip(masses.iter().copied()).collect())
            }
            Self::UniformInterval { .. } => None,
        }
    }

    /// Pmf mass at `v` (up to atom-matching tolerance); 0 for continuous
    /// variants.
    pub fn mass_at(&self, v: f64) -> f64 {
        match self.discrete_atoms() {
            Some(atoms) => atoms
                .iter()
                .find(|(a, _)| values_close(*a, v))
                .map(|(_, m)| *m)
                .unwrap_or(0.0),
            None => 0.0,
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self, Self::UniformInterval { .. })
    }
}

/// An ordered set of bidder priors plus the unit count and optional
/// position scale factors.
///
/// Bidders are ordered so support lows are nonincreasing:
/// `a_1 >= a_2 >= ... >= a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuctionInstance {
    bidders: Vec<ValueDistribution>,
    units: usize,
    scales: Option<Vec<f64>>,
}

impl AuctionInstance {
    /// Builds an instance from bidders already sorted by support low
    /// (descending). `units` defaults to `n` when `None`.
    pub fn new(
        bidders: Vec<ValueDistribution>,
        units: Option<usize>,
        scales: Option<Vec<f64>>,
    ) -> Result<Self> {
        if bidders.is_empty() {
            return Err(Error::InvalidInstance("no bidders".into()));
        }
        let sorted = bidders
            .windows(2)
            .all(|w| w[0].support_low() >= w[1].support_low());
        if !sorted {
            return Err(Error::InvalidInstance(
                "bidders must be sorted by support low, descending".into(),
            ));
        }
        let units = units.unwrap_or(bidders.len());
        if units == 0 {
            return Err(Error::InvalidInstance("units must be positive".into()));
        }
        if let Some(s) = &scales {
            if s.len() != units {
                return Err(Error::InvalidInstance(format!(
                    "{} scales for {} units",
                    s.len(),
                    units
                )));
            }
            if s.iter().any(|x| !(0.0..=1.0).contains(x)) {
                return Err(Error::InvalidInstance("scales must lie in [0, 1]".into()));
            }
            if s.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidInstance("scales must be nonincreasing".into()));
            }
        }
        Ok(Self {
            bidders,
            units,
            scales,
        })
    }

    /// Digital-goods instance: one unit per bidder, no scales.
    pub fn digital(bidders: Vec<ValueDistribution>) -> Result<Self> {
        Self::new(bidders, None, None)
    }

    /// Sorts bidders by support low (descending, stable) and builds the
    /// instance. The second return value maps each sorted position to the
    /// bidder's original index.
    pub fn sorted(
        bidders: Vec<ValueDistribution>,
        units: Option<usize>,
        scales: Option<Vec<f64>>,
    ) -> Result<(Self, Vec<usize>)> {
        let mut order: Vec<usize> = (0..bidders.len()).collect();
        order.sort_by(|&i, &j| {
            bidders[j]
                .support_low()
                .partial_cmp(&bidders[i].support_low())
                .unwrap()
        });
        let sorted: Vec<ValueDistribution> =
            order.iter().map(|&i| bidders[i].clone()).collect();
        Ok((Self::new(sorted, units, scales)?, order))
    }

    pub fn n(&self) -> usize {
        self.bidders.len()
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn bidders(&self) -> &[ValueDistribution] {
        &self.bidders
    }

    pub fn bidder(&self, i: usize) -> &ValueDistribution {
        &self.bidders[i]
    }

    pub fn scales(&self) -> Option<&[f64]> {
        self.scales.as_deref()
    }

    /// Scale factor of item `j` (1-based). Absent scales mean `s_j = 1`
    /// for `j <= m` and 0 afterwards.
    pub fn scale(&self, j: usize) -> f64 {
        if j == 0 || j > self.units {
            return 0.0;
        }
        match &self.scales {
            Some(s) => s[j - 1],
            None => 1.0,
        }
    }

    /// True for the unconstrained-supply digital-goods setting.
    pub fn is_digital(&self) -> bool {
        self.units >= self.n() && self.scales.is_none()
    }

    /// Support low of bidder `i` (0-based): the threshold `a_{i+1}`.
    pub fn support_low(&self, i: usize) -> f64 {
        self.bidders[i].support_low()
    }

    /// Minimal `k` such that the instance is k-ambiguous: the largest
    /// number of predecessors any bidder's support reaches into,
    /// `max_i #{j < i : a_j <= b_i}`.
    pub fn ambiguity(&self) -> usize {
        let mut k = 0;
        for i in 0..self.n() {
            let b_i = self.bidders[i].support_high();
            let reach = (0..i)
                .filter(|&j| self.bidders[j].support_low() <= b_i)
                .count();
            k = k.max(reach);
        }
        k
    }

    /// One truthful value per bidder, drawn in bidder order.
    pub fn sample_values(&self, rng: &mut impl Rng) -> Vec<f64> {
        self.bidders.iter().map(|d| d.sample(rng)).collect()
    }

    /// Per-bidder medians in bidder order.
    pub fn medians(&self) -> Vec<f64> {
        self.bidders.iter().map(|d| d.median()).collect()
    }
}
