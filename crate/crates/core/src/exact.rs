//! Exact laws of the monochromatic edge count by enumeration, plus exact
//! moments and covariances of the standardized edge indicators.
//!
//! Colorings of distinct components are independent, so the pmf of a graph
//! is the convolution of its component pmfs. Each component is enumerated
//! with its first vertex pinned to color 0 (counts are invariant under
//! permuting colors) and the remaining vertices driven by a mixed-radix
//! odometer that updates the count incrementally.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::Standardizer;
use crate::error::{invalid, Error, Result};
use crate::graph::Graph;
use crate::numeric::{checked_pow_u128, NeumaierSum};

/// Default limit on `c^|V|` for a single enumerated component.
pub const DEFAULT_CAP: u64 = 100_000_000;

const SUM_TOLERANCE: f64 = 1e-12;

/// Probabilities as integer counts over a common denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMass {
    pub counts: Vec<u128>,
    pub denominator: u128,
}

/// Finite pmf over non-negative integers. Support is strictly increasing
/// and every probability is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    support: Vec<u64>,
    probs: Vec<f64>,
    exact: Option<ExactMass>,
}

impl DiscreteDistribution {
    /// Builds from `(value, probability)` pairs in any order. Zero
    /// probabilities are dropped and repeated values merged.
    pub fn new(pairs: impl IntoIterator<Item = (u64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(u64, f64)> = pairs.into_iter().collect();
        if let Some(&(y, p)) = pairs.iter().find(|(_, p)| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidDistribution(format!("probability {p} at {y}")));
        }
        pairs.sort_by_key(|&(y, _)| y);
        let mut support: Vec<u64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (y, p) in pairs {
            if p == 0.0 {
                continue;
            }
            if support.last() == Some(&y) {
                *probs.last_mut().unwrap() += p;
            } else {
                support.push(y);
                probs.push(p);
            }
        }
        let d = DiscreteDistribution {
            support,
            probs,
            exact: None,
        };
        d.check_total()?;
        Ok(d)
    }

    /// Builds from integer counts over `denominator`; the counts must add
    /// up to it exactly.
    pub fn from_counts(counts: impl IntoIterator<Item = (u64, u128)>, denominator: u128) -> Result<Self> {
        let mut merged: std::collections::BTreeMap<u64, u128> = Default::default();
        for (y, k) in counts {
            if k > 0 {
                *merged.entry(y).or_insert(0) += k;
            }
        }
        let total: u128 = merged.values().sum();
        if denominator == 0 || total != denominator {
            return Err(Error::InvalidDistribution(format!(
                "counts sum to {total}, denominator is {denominator}"
            )));
        }
        let support: Vec<u64> = merged.keys().copied().collect();
        let counts: Vec<u128> = merged.values().copied().collect();
        let probs = counts.iter().map(|&k| ratio(k, denominator)).collect();
        Ok(DiscreteDistribution {
            support,
            probs,
            exact: Some(ExactMass { counts, denominator }),
        })
    }

    pub fn point_mass(y: u64) -> Self {
        Self::from_counts([(y, 1)], 1).expect("point mass")
    }

    /// Binomial(n, 1/c), exact counts `C(n,k)(c-1)^(n-k) / c^n` when
    /// `c^n` fits in 128 bits.
    pub fn binomial_one_over(n: u64, c: u32) -> Result<Self> {
        if c < 2 {
            return Err(invalid("binomial needs c >= 2"));
        }
        let c128 = u128::from(c);
        let exact = || -> Option<Self> {
            let denominator = checked_pow_u128(c128, usize::try_from(n).ok()?)?;
            let mut counts = Vec::with_capacity(n as usize + 1);
            let mut binom: u128 = 1;
            for k in 0..=n {
                let rest = checked_pow_u128(c128 - 1, (n - k) as usize)?;
                counts.push((k, binom.checked_mul(rest)?));
                binom = binom.checked_mul(u128::from(n - k))? / u128::from(k + 1);
            }
            Self::from_counts(counts, denominator).ok()
        };
        if let Some(d) = exact() {
            return Ok(d);
        }
        let nf = n as f64;
        let ln_p = -f64::from(c).ln();
        let ln_q = (1.0 - 1.0 / f64::from(c)).ln();
        let ln_n_fact = libm::lgamma(nf + 1.0);
        Self::new((0..=n).map(|k| {
            let kf = k as f64;
            let ln_binom = ln_n_fact - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0);
            (k, (ln_binom + kf * ln_p + (nf - kf) * ln_q).exp())
        }))
    }

    fn check_total(&self) -> Result<()> {
        if self.support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let total = self.probs.iter().copied().collect::<NeumaierSum>().value();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(())
    }

    pub fn support(&self) -> &[u64] {
        &self.support
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn exact(&self) -> Option<&ExactMass> {
        self.exact.as_ref()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.support.iter().copied().zip(self.probs.iter().copied())
    }

    /// Probability of `y` (zero off the support).
    pub fn prob(&self, y: u64) -> f64 {
        self.support.binary_search(&y).map(|i| self.probs[i]).unwrap_or(0.0)
    }

    /// Mean and variance by two compensated passes.
    pub fn moments(&self) -> (f64, f64) {
        let mean = self.iter().map(|(y, p)| y as f64 * p).collect::<NeumaierSum>().value();
        let variance = self
            .iter()
            .map(|(y, p)| {
                let d = y as f64 - mean;
                d * d * p
            })
            .collect::<NeumaierSum>()
            .value();
        (mean, variance)
    }

    /// Law of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Self) -> Self {
        let max = self.support.last().unwrap() + other.support.last().unwrap();
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a.denominator.checked_mul(b.denominator).and_then(|denominator| {
                let mut acc = vec![0u128; max as usize + 1];
                for (&x, &kx) in self.support.iter().zip(&a.counts) {
                    for (&y, &ky) in other.support.iter().zip(&b.counts) {
                        acc[(x + y) as usize] = acc[(x + y) as usize].checked_add(kx.checked_mul(ky)?)?;
                    }
                }
                Some((acc, denominator))
            }),
            _ => None,
        };
        if let Some((acc, denominator)) = exact {
            return Self::from_counts(acc.into_iter().enumerate().map(|(y, k)| (y as u64, k)), denominator)
                .expect("convolution of exact laws");
        }
        let mut acc = vec![NeumaierSum::default(); max as usize + 1];
        for (x, px) in self.iter() {
            for (y, py) in other.iter() {
                acc[(x + y) as usize].add(px * py);
            }
        }
        let pairs = acc
            .into_iter()
            .enumerate()
            .map(|(y, s)| (y as u64, s.value()))
            .filter(|&(_, p)| p > 0.0);
        let mut support = Vec::new();
        let mut probs = Vec::new();
        for (y, p) in pairs {
            support.push(y);
            probs.push(p);
        }
        DiscreteDistribution {
            support,
            probs,
            exact: None,
        }
    }

    /// Image under `y -> (y - m/c) / sqrt((m/c)(1 - 1/c))`.
    pub fn standardized(&self, m: u64, c: u32) -> Result<RealDistribution> {
        let map = Standardizer::new(m, c)?;
        Ok(RealDistribution {
            atoms: self.support.iter().map(|&y| map.apply(y)).collect(),
            probs: self.probs.clone(),
        })
    }

    /// `y,prob` CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,prob\n");
        for (y, p) in self.iter() {
            out.push_str(&format!("{y},{}\n", format_sig17(p)));
        }
        out
    }
}

fn ratio(k: u128, denominator: u128) -> f64 {
    if k == denominator {
        1.0
    } else {
        k as f64 / denominator as f64
    }
}

/// Shortest of `{:.16e}` and the round-trip form that keeps 17 significant
/// digits.
pub fn format_sig17(x: f64) -> String {
    let sci = format!("{x:.16e}");
    let parsed: f64 = sci.parse().expect("formatted float");
    let plain = format!("{parsed}");
    if plain.parse::<f64>().ok() == Some(parsed) && plain.len() <= sci.len() {
        plain
    } else {
        sci
    }
}

/// Finite law on the reals, atoms strictly increasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealDistribution {
    atoms: Vec<f64>,
    probs: Vec<f64>,
}

impl RealDistribution {
    pub fn new(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut pairs: Vec<(f64, f64)> = pairs.into_iter().collect();
        if pairs.iter().any(|(x, p)| !x.is_finite() || !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("non-finite atom or bad probability".into()));
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut atoms: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, p) in pairs {
            if p == 0.0 {
                continue;
            }
            if atoms.last() == Some(&x) {
                *probs.last_mut().unwrap() += p;
            } else {
                atoms.push(x);
                probs.push(p);
            }
        }
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        let total = probs.iter().copied().collect::<NeumaierSum>().value();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(RealDistribution { atoms, probs })
    }

    /// Empirical measure of `samples`, each carrying mass `1/n`.
    pub fn empirical(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDistribution("no samples".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut pairs = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && sorted[end] == sorted[start] {
                end += 1;
            }
            pairs.push((sorted[start], (end - start) as f64 / n as f64));
            start = end;
        }
        Self::new(pairs)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn shifted(&self, delta: f64) -> Self {
        RealDistribution {
            atoms: self.atoms.iter().map(|x| x + delta).collect(),
            probs: self.probs.clone(),
        }
    }
}

/// `c^k` as a float, for cap comparisons.
fn state_count(c: u32, k: usize) -> f64 {
    f64::from(c).powi(k as i32)
}

fn check_cap(c: u32, k: usize, cap: u64) -> Result<()> {
    let states = state_count(c, k);
    if states > cap as f64 {
        Err(Error::CapExceeded { states, cap })
    } else {
        Ok(())
    }
}

/// Exact pmf of the monochromatic count of `g` by enumerating all `c^|V|`
/// colorings (component structure is ignored here).
pub fn exact_pmf_component(g: &Graph, c: u32, cap: u64) -> Result<DiscreteDistribution> {
    if c < 2 {
        return Err(invalid("need at least 2 colors"));
    }
    let n = g.vertex_count();
    check_cap(c, n, cap)?;
    if g.edge_count() == 0 || n == 0 {
        return Ok(DiscreteDistribution::point_mass(0));
    }
    let histogram = enumerate_pinned(g, c);
    let c128 = u128::from(c);
    let denominator = checked_pow_u128(c128, n).expect("below cap");
    DiscreteDistribution::from_counts(
        histogram
            .into_iter()
            .enumerate()
            .map(|(y, k)| (y as u64, u128::from(k) * c128)),
        denominator,
    )
}

/// Histogram of counts over colorings with vertex 0 pinned to color 0.
fn enumerate_pinned(g: &Graph, c: u32) -> Vec<u64> {
    let n = g.vertex_count();
    let m = g.edge_count();
    // Vertices 1..lead are fixed per block; lead..n are odometer digits.
    let mut lead = 1;
    let mut blocks: u64 = 1;
    while lead < n && blocks < 256 && n - lead > 1 {
        blocks *= u64::from(c);
        lead += 1;
    }
    (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut colors = vec![0u32; n];
            let mut b = block;
            for v in (1..lead).rev() {
                colors[v] = (b % u64::from(c)) as u32;
                b /= u64::from(c);
            }
            let mut hist = vec![0u64; m + 1];
            let mut y = g.edges().iter().filter(|&&(u, v)| colors[u] == colors[v]).count();
            if lead == n {
                hist[y] += 1;
                return hist;
            }
            'odometer: loop {
                hist[y] += 1;
                let mut v = n - 1;
                loop {
                    let old = colors[v];
                    let new = if old + 1 == c { 0 } else { old + 1 };
                    let nbrs = g.neighbors(v);
                    let gained = nbrs.iter().filter(|&&w| colors[w] == new).count();
                    let lost = nbrs.iter().filter(|&&w| colors[w] == old).count();
                    y = y + gained - lost;
                    colors[v] = new;
                    if new != 0 {
                        break;
                    }
                    if v == lead {
                        break 'odometer;
                    }
                    v -= 1;
                }
            }
            hist
        })
        .reduce(
            || vec![0u64; m + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Exact pmf of the monochromatic count of `g`: per-component laws
/// convolved together. Components too large to enumerate are accepted only
/// when they are trees, whose edge indicators are independent, giving
/// Binomial(edges, 1/c).
pub fn exact_pmf(g: &Graph, c: u32, cap: u64) -> Result<DiscreteDistribution> {
    if c < 2 {
        return Err(invalid("need at least 2 colors"));
    }
    let mut cache: HashMap<String, DiscreteDistribution> = HashMap::new();
    let mut total = DiscreteDistribution::point_mass(0);
    for component in g.connected_components() {
        if component.edges.is_empty() {
            continue;
        }
        let sub = g.induced(&component);
        let key = sub.to_edge_list_string();
        if !cache.contains_key(&key) {
            let law = match exact_pmf_component(&sub, c, cap) {
                Err(Error::CapExceeded { .. }) if component.edges.len() + 1 == component.vertices.len() => {
                    DiscreteDistribution::binomial_one_over(component.edges.len() as u64, c)?
                }
                other => other?,
            };
            cache.insert(key.clone(), law);
        }
        total = total.convolve(&cache[&key]);
    }
    Ok(total)
}

/// Mean and variance of a pmf.
pub fn exact_moments(d: &DiscreteDistribution) -> (f64, f64) {
    d.moments()
}

/// Exact moments of one standardized edge indicator
/// `X = (I - 1/c) / sqrt((m/c)(1 - 1/c))` and the bounds they obey.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorMoments {
    pub abs_first: f64,
    pub second: f64,
    pub abs_third: f64,
    pub abs_first_bound: f64,
    pub abs_third_bound: f64,
}

impl IndicatorMoments {
    pub fn holds(&self, m: u64) -> bool {
        let rel = 1e-12;
        self.abs_first <= self.abs_first_bound * (1.0 + rel)
            && (self.second - 1.0 / m as f64).abs() <= rel / m as f64
            && self.abs_third <= self.abs_third_bound * (1.0 + rel)
    }
}

pub fn edge_indicator_moments(m: u64, c: u32) -> Result<IndicatorMoments> {
    if m == 0 || c < 2 {
        return Err(invalid("indicator moments need m >= 1 and c >= 2"));
    }
    let p = 1.0 / f64::from(c);
    let q = 1.0 - p;
    let mf = m as f64;
    let sigma = (mf * p * q).sqrt();
    Ok(IndicatorMoments {
        abs_first: 2.0 * p * q / sigma,
        second: 1.0 / mf,
        abs_third: (p * q * q * q + q * p * p * p) / (sigma * sigma * sigma),
        abs_first_bound: 2.0 / (mf * f64::from(c)).sqrt(),
        abs_third_bound: f64::from(c).sqrt() / mf.powf(1.5),
    })
}

/// `sum over colorings of prod (c * I_e - 1)` for a multiset of edges,
/// returned with the number of distinct vertices `k`. The expectation of
/// the product is `numerator / c^k`.
fn centered_product_sum(edges: &[(usize, usize)], c: u32) -> (i128, usize) {
    let mut vertices: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    vertices.sort_unstable();
    vertices.dedup();
    let local: Vec<(usize, usize)> = edges
        .iter()
        .map(|&(u, v)| (vertices.binary_search(&u).unwrap(), vertices.binary_search(&v).unwrap()))
        .collect();
    let k = vertices.len();
    if k == 0 {
        return (1, 0);
    }
    let c_i = i128::from(c);
    let mut colors = vec![0u32; k];
    let mut total: i128 = 0;
    // vertex 0 pinned, multiply by c
    loop {
        let term: i128 = local
            .iter()
            .map(|&(u, v)| if colors[u] == colors[v] { c_i - 1 } else { -1 })
            .product();
        total += term;
        let mut d = k;
        loop {
            if d == 1 {
                return (total * c_i, k);
            }
            d -= 1;
            colors[d] += 1;
            if colors[d] < c {
                break;
            }
            colors[d] = 0;
        }
    }
}

fn edge_product_expectation(edges: &[(usize, usize)], c: u32, m: u64) -> f64 {
    let (numerator, k) = centered_product_sum(edges, c);
    let scale = (m as f64 * f64::from(c - 1)).powf(edges.len() as f64 / 2.0);
    numerator as f64 / state_count(c, k) / scale
}

/// Exact `Cov(X_i, X_j)` from the colors of the (at most four) vertices
/// the two edges touch.
pub fn pair_covariance(g: &Graph, c: u32, i: usize, j: usize) -> Result<f64> {
    if c < 2 {
        return Err(invalid("need at least 2 colors"));
    }
    let m = g.edge_count();
    let ei = *g.edges().get(i).ok_or(Error::EdgeOutOfRange { index: i, m })?;
    let ej = *g.edges().get(j).ok_or(Error::EdgeOutOfRange { index: j, m })?;
    // E X = 0 exactly, so the covariance is E[X_i X_j].
    let (num, k) = centered_product_sum(&[ei, ej], c);
    if num == 0 {
        return Ok(0.0);
    }
    Ok(num as f64 / state_count(c, k) / (m as f64 * f64::from(c - 1)))
}

/// `E[X_i X_j^2 X_k]` for the three edges `i, j, k` of a triangle, and
/// the bound `1/m^2` it is compared to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangleMixedMoment {
    pub value: f64,
    pub bound: f64,
}

impl TriangleMixedMoment {
    pub fn holds(&self) -> bool {
        self.value <= self.bound * (1.0 + 1e-12)
    }
}

pub fn triangle_mixed_moment(c: u32, m: u64) -> Result<TriangleMixedMoment> {
    if c < 2 || m == 0 {
        return Err(invalid("need c >= 2 and m >= 1"));
    }
    let (i, j, k) = ((0, 1), (1, 2), (0, 2));
    Ok(TriangleMixedMoment {
        value: edge_product_expectation(&[i, j, j, k], c, m),
        bound: 1.0 / (m as f64 * m as f64),
    })
}

/// Exact variance of `S = sum_i sum_{j in N_i, j != i} X_i X_j` together
/// with the bounds it is compared to.
///
/// `Cov(X_i X_j, X_k X_l)` is nonzero when the two pairs coincide, when
/// they share one edge and span a triangle, and also when their four
/// distinct edges form a 4-cycle, where it equals `1 / (m^2 (c - 1))`.
/// `structural_bound` accounts for the first two cases only;
/// `four_cycle_bound` adds the third.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairSumVariance {
    pub variance: f64,
    /// Number of ordered pairs `(i, j)` in the sum.
    pub pair_count: u64,
    pub triangle_count: u64,
    /// Ordered couples of pairs whose four edges form a 4-cycle.
    pub four_cycle_terms: u64,
    /// `2 * pair_count / m^2 + 6 * triangles / m^2`.
    pub structural_bound: f64,
    /// `structural_bound + four_cycle_terms / (m^2 (c - 1))`.
    pub four_cycle_bound: f64,
    /// `(2 * 2^(1/4) / m^(1/4))^2`.
    pub universal_bound: f64,
}

impl PairSumVariance {
    fn tol(&self) -> f64 {
        1e-12 * self.universal_bound.max(1e-300)
    }

    /// `variance <= structural_bound <= universal_bound`.
    pub fn holds(&self) -> bool {
        self.variance <= self.structural_bound + self.tol()
            && self.structural_bound <= self.universal_bound + self.tol()
    }

    /// `variance <= four_cycle_bound`.
    pub fn holds_with_four_cycles(&self) -> bool {
        self.variance <= self.four_cycle_bound + self.tol()
    }
}

fn is_four_cycle(edges: [(usize, usize); 4]) -> bool {
    let mut ends: Vec<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    ends.sort_unstable();
    // four distinct vertices, each on exactly two of four distinct edges
    let mut distinct = edges;
    distinct.sort_unstable();
    distinct.windows(2).all(|w| w[0] != w[1]) && ends.chunks(2).all(|p| p[0] == p[1]) && {
        ends.dedup();
        ends.len() == 4
    }
}

/// Exact variance of the neighborhood pair sum by accumulating every
/// pairwise covariance `Cov(X_i X_j, X_k X_l)` in exact integer
/// arithmetic. `cap` bounds the total number of colorings enumerated.
pub fn pair_sum_variance(g: &Graph, c: u32, cap: u64) -> Result<PairSumVariance> {
    if c < 2 {
        return Err(invalid("need at least 2 colors"));
    }
    let m = g.edge_count();
    if m == 0 {
        return Err(invalid("pair sum variance needs m >= 1"));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..m {
        for j in g.neighborhood(i)? {
            if j != i {
                pairs.push((i, j));
            }
        }
    }
    let stats = g.edge_stats();
    let mf = m as f64;
    let structural_bound = (2.0 * pairs.len() as f64 + 6.0 * stats.triangle_count as f64) / (mf * mf);
    let universal_bound = (2.0 * 2f64.powf(0.25) / mf.powf(0.25)).powi(2);

    let p = pairs.len();
    let work = (p * (p + 1) / 2) as f64 * state_count(c, 5);
    if work > cap as f64 {
        return Err(Error::CapExceeded { states: work, cap });
    }

    let edges = g.edges();
    // Common denominator c^12 for every term, times (m(c-1))^2.
    let c_i = i128::from(c);
    let lift = |num: i128, k: usize| -> Option<i128> { num.checked_mul(c_i.checked_pow(12 - k as u32)?) };
    let second: Vec<(i128, usize)> = pairs
        .iter()
        .map(|&(i, j)| centered_product_sum(&[edges[i], edges[j]], c))
        .collect();
    let vertex_sets: Vec<[usize; 4]> = pairs
        .iter()
        .map(|&(i, j)| [edges[i].0, edges[i].1, edges[j].0, edges[j].1])
        .collect();

    let overflow = || invalid("exact covariance accumulation overflowed");
    let rows: Vec<Option<(i128, u64)>> = (0..p)
        .into_par_iter()
        .map(|a| {
            let mut row: i128 = 0;
            let mut cycles: u64 = 0;
            for b in a..p {
                if !vertex_sets[a].iter().any(|v| vertex_sets[b].contains(v)) {
                    continue; // independent pairs
                }
                let (i, j) = pairs[a];
                let (k, l) = pairs[b];
                let (n4, k4) = centered_product_sum(&[edges[i], edges[j], edges[k], edges[l]], c);
                let (n2a, k2a) = second[a];
                let (n2b, k2b) = second[b];
                let cov = lift(n4, k4)?.checked_sub(lift(n2a.checked_mul(n2b)?, k2a + k2b)?)?;
                let weight = if a == b { 1 } else { 2 };
                row = row.checked_add(cov.checked_mul(weight)?)?;
                if is_four_cycle([edges[i], edges[j], edges[k], edges[l]]) {
                    cycles += 2;
                }
            }
            Some((row, cycles))
        })
        .collect();
    let mut total: i128 = 0;
    let mut four_cycle_terms: u64 = 0;
    for row in rows {
        let (value, cycles) = row.ok_or_else(overflow)?;
        total = total.checked_add(value).ok_or_else(overflow)?;
        four_cycle_terms += cycles;
    }
    let scale = mf * f64::from(c - 1);
    let variance = total as f64 / state_count(c, 12) / (scale * scale);
    Ok(PairSumVariance {
        variance,
        pair_count: p as u64,
        triangle_count: stats.triangle_count,
        four_cycle_terms,
        structural_bound,
        four_cycle_bound: structural_bound + four_cycle_terms as f64 / (mf * mf * f64::from(c - 1)),
        universal_bound,
    })
}
