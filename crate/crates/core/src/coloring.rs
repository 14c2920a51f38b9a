//! Uniform random vertex colorings, monochromatic edge counts and Monte
//! Carlo simulation of their law.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::DiscreteDistribution;
use crate::graph::Graph;
use crate::numeric::NeumaierSum;
use crate::rng::CounterRng;

/// Samples per work unit. Fixed so results do not depend on the thread
/// count.
pub const CHUNK_SAMPLES: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringConfig {
    pub colors: u32,
    pub seed: u64,
    /// Namespace for independent experiments sharing a seed.
    pub stream_id: u64,
}

impl ColoringConfig {
    pub fn new(colors: u32, seed: u64) -> Result<Self> {
        let cfg = ColoringConfig {
            colors,
            seed,
            stream_id: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_stream(self, stream_id: u64) -> Self {
        ColoringConfig { stream_id, ..self }
    }

    fn validate(&self) -> Result<()> {
        if self.colors < 2 {
            return Err(invalid(format!("need at least 2 colors, got {}", self.colors)));
        }
        Ok(())
    }

    fn rng(&self) -> CounterRng {
        CounterRng::new(self.seed, self.stream_id)
    }
}

/// Colors of all vertices for one sample. Entry `v` depends only on
/// `(seed, stream_id, sample_index, v)`.
pub fn sample_coloring(g: &Graph, cfg: &ColoringConfig, sample_index: u64) -> Result<Vec<u32>> {
    cfg.validate()?;
    let mut colors = vec![0; g.vertex_count()];
    fill_coloring(&cfg.rng(), cfg.colors, sample_index, &mut colors);
    Ok(colors)
}

fn fill_coloring(rng: &CounterRng, c: u32, sample_index: u64, out: &mut [u32]) {
    let stream = rng.sample(sample_index);
    for (v, slot) in out.iter_mut().enumerate() {
        *slot = stream.below(v as u64, c);
    }
}

pub fn monochromatic_count(g: &Graph, coloring: &[u32]) -> Result<u64> {
    if coloring.len() != g.vertex_count() {
        return Err(Error::ColoringLength {
            got: coloring.len(),
            expected: g.vertex_count(),
        });
    }
    Ok(count_unchecked(g.edges(), coloring))
}

/// As [`monochromatic_count`], additionally rejecting colors `>= c`.
pub fn monochromatic_count_checked(g: &Graph, coloring: &[u32], c: u32) -> Result<u64> {
    if let Some((vertex, &color)) = coloring.iter().enumerate().find(|(_, &x)| x >= c) {
        return Err(Error::ColorOutOfRange { vertex, color, c });
    }
    monochromatic_count(g, coloring)
}

#[inline]
fn count_unchecked(edges: &[(usize, usize)], coloring: &[u32]) -> u64 {
    edges.iter().map(|&(u, v)| u64::from(coloring[u] == coloring[v])).sum()
}

/// `(y - m/c) / sqrt((m/c)(1 - 1/c))`, evaluated as `(c*y - m) / sqrt(m(c-1))`
/// so the numerator is exact.
pub fn standardize(y: u64, m: u64, c: u32) -> Result<f64> {
    Ok(Standardizer::new(m, c)?.apply(y))
}

/// The affine map from counts `y` to the standardized scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Standardizer {
    m: u64,
    c: u32,
    scale: f64,
}

impl Standardizer {
    pub fn new(m: u64, c: u32) -> Result<Self> {
        if m == 0 {
            return Err(invalid("standardization needs m >= 1"));
        }
        if c < 2 {
            return Err(invalid("standardization needs c >= 2"));
        }
        let scale = (m as f64 * f64::from(c - 1)).sqrt();
        Ok(Standardizer { m, c, scale })
    }

    #[inline]
    pub fn apply(&self, y: u64) -> f64 {
        let numerator = i128::from(self.c) * i128::from(y) - i128::from(self.m);
        numerator as f64 / self.scale
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n_samples: u64,
    pub histogram: BTreeMap<u64, u64>,
    pub mean: f64,
    pub variance: f64,
    pub seed: u64,
    pub stream_id: u64,
    /// Number of fixed-size sample chunks merged into this summary.
    pub stream_count: u64,
}

impl SampleSummary {
    fn from_histogram(histogram: BTreeMap<u64, u64>, cfg: &ColoringConfig, stream_count: u64) -> Self {
        let n_samples = histogram.values().sum();
        let (mean, variance) = histogram_moments(&histogram, n_samples);
        SampleSummary {
            n_samples,
            histogram,
            mean,
            variance,
            seed: cfg.seed,
            stream_id: cfg.stream_id,
            stream_count,
        }
    }

    /// Adds the counts of a summary drawn from a disjoint sample range of
    /// the same configuration.
    pub fn merge(mut self, other: &SampleSummary) -> Result<Self> {
        if (self.seed, self.stream_id) != (other.seed, other.stream_id) {
            return Err(invalid("cannot merge summaries from different seeds or streams"));
        }
        for (&y, &count) in &other.histogram {
            *self.histogram.entry(y).or_insert(0) += count;
        }
        self.n_samples += other.n_samples;
        self.stream_count += other.stream_count;
        let (mean, variance) = histogram_moments(&self.histogram, self.n_samples);
        self.mean = mean;
        self.variance = variance;
        Ok(self)
    }

    /// The empirical law of Y.
    pub fn to_distribution(&self) -> Result<DiscreteDistribution> {
        DiscreteDistribution::from_counts(
            self.histogram.iter().map(|(&y, &count)| (y, u128::from(count))),
            u128::from(self.n_samples),
        )
    }

    /// `y,count` CSV, rows ascending in y.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("y,count\n");
        for (y, count) in &self.histogram {
            out.push_str(&format!("{y},{count}\n"));
        }
        out
    }
}

/// Population mean and variance of a histogram, with compensated sums.
fn histogram_moments(histogram: &BTreeMap<u64, u64>, n: u64) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let n = n as f64;
    let mean = histogram
        .iter()
        .map(|(&y, &k)| y as f64 * k as f64)
        .collect::<NeumaierSum>()
        .value()
        / n;
    let variance = histogram
        .iter()
        .map(|(&y, &k)| {
            let d = y as f64 - mean;
            d * d * k as f64
        })
        .collect::<NeumaierSum>()
        .value()
        / n;
    (mean, variance)
}

pub fn simulate(g: &Graph, cfg: &ColoringConfig, n_samples: u64) -> Result<SampleSummary> {
    simulate_range(g, cfg, 0, n_samples)
}

/// Simulates samples `start .. start + count`. Disjoint ranges merge to
/// exactly the summary of their union.
pub fn simulate_range(g: &Graph, cfg: &ColoringConfig, start: u64, count: u64) -> Result<SampleSummary> {
    cfg.validate()?;
    if count == 0 {
        return Err(invalid("need at least one sample"));
    }
    let end = start
        .checked_add(count)
        .ok_or_else(|| invalid("sample range overflows"))?;
    let rng = cfg.rng();
    let c = cfg.colors;
    let chunks: Vec<(u64, u64)> = {
        let mut v = Vec::new();
        let mut lo = start;
        while lo < end {
            // align to the global chunk grid
            let hi = ((lo / CHUNK_SAMPLES + 1) * CHUNK_SAMPLES).min(end);
            v.push((lo, hi));
            lo = hi;
        }
        v
    };
    let stream_count = chunks.len() as u64;
    let partials: Vec<BTreeMap<u64, u64>> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut colors = vec![0u32; g.vertex_count()];
            let mut counts = BTreeMap::new();
            for s in lo..hi {
                fill_coloring(&rng, c, s, &mut colors);
                *counts.entry(count_unchecked(g.edges(), &colors)).or_insert(0) += 1;
            }
            counts
        })
        .collect();
    let mut histogram = BTreeMap::new();
    for part in partials {
        for (y, k) in part {
            *histogram.entry(y).or_insert(0) += k;
        }
    }
    Ok(SampleSummary::from_histogram(histogram, cfg, stream_count))
}
