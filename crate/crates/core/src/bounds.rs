//! Closed-form error bounds and the structural checks that feed them.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::graph::EdgeStats;

/// `E|W| + E|Z| <= 1 + sqrt(2/pi)` caps the W1 distance of any
/// standardized law to N(0,1); a bound above it says nothing.
pub fn trivial_wasserstein_cap() -> f64 {
    1.0 + (2.0 / std::f64::consts::PI).sqrt()
}

fn check_mc(m: u64, c: u32) -> Result<()> {
    if m == 0 {
        return Err(invalid("bounds need m >= 1"));
    }
    if c < 2 {
        return Err(invalid("bounds need c >= 2"));
    }
    Ok(())
}

/// `(3/2) sqrt(c/m) + 5 sqrt(2) / sqrt(c) + 2^(7/4) / (sqrt(pi) m^(1/4))`.
pub fn wasserstein_bound(m: u64, c: u32) -> Result<f64> {
    check_mc(m, c)?;
    let (m, c) = (m as f64, f64::from(c));
    Ok(1.5 * (c / m).sqrt()
        + 5.0 * std::f64::consts::SQRT_2 / c.sqrt()
        + 2f64.powf(1.75) / std::f64::consts::PI.sqrt() / m.powf(0.25))
}

/// `sqrt(8m) / c`.
pub fn poisson_tv_bound(m: u64, c: u32) -> Result<f64> {
    check_mc(m, c)?;
    Ok((8.0 * m as f64).sqrt() / f64::from(c))
}

/// The three terms of the structure-aware rate
/// `C0 (sqrt(c/m) + K_m / (sqrt(c) m^(3/2)) + m^(-1/4))`, before the
/// multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateTerms {
    pub sparsity: f64,
    pub neighborhood: f64,
    pub fluctuation: f64,
}

impl RateTerms {
    pub fn new(m: u64, c: u32, k_m: u64) -> Result<Self> {
        check_mc(m, c)?;
        let (mf, cf) = (m as f64, f64::from(c));
        Ok(RateTerms {
            sparsity: (cf / mf).sqrt(),
            neighborhood: k_m as f64 / (cf.sqrt() * mf.powf(1.5)),
            fluctuation: mf.powf(-0.25),
        })
    }

    pub fn sum(&self) -> f64 {
        self.sparsity + self.neighborhood + self.fluctuation
    }
}

pub fn remark_rate(m: u64, c: u32, k_m: u64, c0: f64) -> Result<f64> {
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(invalid("C0 must be positive"));
    }
    Ok(c0 * RateTerms::new(m, c, k_m)?.sum())
}

/// Outcome of one inequality `value <= bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            bound,
            slack: bound - value,
            pass: value <= bound,
        }
    }
}

/// `sum_i min(deg u_i, deg v_i) <= sqrt(2) m^(3/2)`.
pub fn min_degree_sum_check(stats: &EdgeStats) -> Check {
    let m = stats.m as f64;
    Check::new(
        "min_degree_sum",
        stats.k_m as f64,
        std::f64::consts::SQRT_2 * m.powf(1.5),
    )
}

/// `#triangles <= (sqrt(2)/3) m^(3/2)`.
pub fn triangle_count_check(stats: &EdgeStats) -> Check {
    let m = stats.m as f64;
    Check::new(
        "triangle_count (sqrt(2)/3 * m^(3/2))",
        stats.triangle_count as f64,
        std::f64::consts::SQRT_2 / 3.0 * m.powf(1.5),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeHint {
    PoissonFavored,
    NormalFavored,
    BothVacuous,
}

/// Heuristic cutoffs for [`RegimeHint`]; not derived from any bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeConfig {
    /// Largest `m/c` still treated as a Poisson-scale mean.
    pub poisson_max_mean: f64,
}

impl Default for RegimeConfig {
    fn default() -> Self {
        RegimeConfig { poisson_max_mean: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub m: u64,
    pub c: u32,
    pub wasserstein_bound: f64,
    pub wasserstein_vacuous: bool,
    pub poisson_tv_bound: f64,
    pub poisson_tv_vacuous: bool,
    pub remark_rate: Option<f64>,
    pub rate_terms: Option<RateTerms>,
    pub c0: f64,
    pub k_m: Option<u64>,
    pub regime_hint: RegimeHint,
}

impl BoundReport {
    pub fn new(m: u64, c: u32, k_m: Option<u64>, c0: f64, regime: RegimeConfig) -> Result<Self> {
        let wasserstein_bound = wasserstein_bound(m, c)?;
        let poisson_tv_bound = poisson_tv_bound(m, c)?;
        let (remark_rate, rate_terms) = match k_m {
            Some(k) => (Some(remark_rate(m, c, k, c0)?), Some(RateTerms::new(m, c, k)?)),
            None => {
                if !(c0.is_finite() && c0 > 0.0) {
                    return Err(invalid("C0 must be positive"));
                }
                (None, None)
            }
        };
        let wasserstein_vacuous = wasserstein_bound > trivial_wasserstein_cap();
        let poisson_tv_vacuous = poisson_tv_bound >= 1.0;
        let mean = m as f64 / f64::from(c);
        let regime_hint = if !poisson_tv_vacuous && mean <= regime.poisson_max_mean {
            RegimeHint::PoissonFavored
        } else if !wasserstein_vacuous {
            RegimeHint::NormalFavored
        } else {
            RegimeHint::BothVacuous
        };
        Ok(BoundReport {
            m,
            c,
            wasserstein_bound,
            wasserstein_vacuous,
            poisson_tv_bound,
            poisson_tv_vacuous,
            remark_rate,
            rate_terms,
            c0,
            k_m,
            regime_hint,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};

    #[test]
    fn wasserstein_values() {
        let direct = |m: f64, c: f64| {
            1.5 * (c / m).sqrt()
                + 5.0 * 2f64.sqrt() / c.sqrt()
                + 2f64.powf(1.75) / std::f64::consts::PI.sqrt() / m.powf(0.25)
        };
        assert!((wasserstein_bound(100, 10).unwrap() - 3.310_51).abs() < 1e-4);
        assert!((wasserstein_bound(1_000_000, 10_000).unwrap() - 0.2807).abs() < 1e-3);
        assert!((wasserstein_bound(1, 2).unwrap() - 9.019).abs() < 1e-3);
        assert!((wasserstein_bound(3, 2).unwrap() - 7.667).abs() < 1e-3);
        assert_eq!(wasserstein_bound(37, 5).unwrap(), direct(37.0, 5.0));
        assert!(wasserstein_bound(0, 5).is_err());
        assert!(wasserstein_bound(5, 1).is_err());
    }

    #[test]
    fn wasserstein_vanishes_along_sqrt_colors() {
        let mut prev = f64::INFINITY;
        for e in 2..=8 {
            let m = 10u64.pow(e);
            let c = (m as f64).sqrt() as u32;
            let b = wasserstein_bound(m, c).unwrap();
            assert!(b < prev);
            prev = b;
        }
        assert!(prev < 0.11);
    }

    #[test]
    fn poisson_values() {
        assert!((poisson_tv_bound(1000, 2000).unwrap() - 0.044_721_36).abs() < 1e-8);
        assert_eq!(poisson_tv_bound(2, 4).unwrap(), 1.0);
        assert_eq!(poisson_tv_bound(50, 10).unwrap(), 2.0);
    }

    #[test]
    fn structure_rate_values() {
        assert!((remark_rate(100, 2, 100, 1.0).unwrap() - 0.5284).abs() < 1e-4);
        assert!((remark_rate(1, 4, 0, 1.0).unwrap() - 3.0).abs() < 1e-15);
        assert!((remark_rate(1, 4, 0, 2.5).unwrap() - 7.5).abs() < 1e-15);
        assert!(remark_rate(1, 4, 0, 0.0).is_err());
        // complete graphs: neighborhood term stays near sqrt(2/c)
        let k = generate(Family::Complete { n: 60 }, None).unwrap().edge_stats();
        let t = RateTerms::new(k.m as u64, 2, k.k_m).unwrap();
        assert!(t.neighborhood > 0.99 && t.neighborhood <= 1.0);
    }

    #[test]
    fn structural_checks() {
        let k4 = generate(Family::Complete { n: 4 }, None).unwrap().edge_stats();
        let c = min_degree_sum_check(&k4);
        assert_eq!(c.value, 18.0);
        assert!((c.bound - 20.78).abs() < 0.01 && c.pass);
        let t = triangle_count_check(&k4);
        assert!(t.pass && (t.bound - 6.93).abs() < 0.01);
        let star = generate(Family::Star { n: 6 }, None).unwrap().edge_stats();
        assert!((min_degree_sum_check(&star).bound - 15.81).abs() < 0.01);
        let k6 = generate(Family::Complete { n: 6 }, None).unwrap().edge_stats();
        let t6 = triangle_count_check(&k6);
        assert_eq!(t6.value, 20.0);
        assert!((t6.bound - 27.39).abs() < 0.01 && t6.pass);
        let edge = generate(Family::Path { n: 2 }, None).unwrap().edge_stats();
        assert!(min_degree_sum_check(&edge).pass);
        let bip = generate(Family::CompleteBipartite { left: 3, right: 4 }, None)
            .unwrap()
            .edge_stats();
        assert_eq!(triangle_count_check(&bip).value, 0.0);
    }

    #[test]
    fn report_flags() {
        let r = BoundReport::new(2, 4, None, 1.0, RegimeConfig::default()).unwrap();
        assert!(r.poisson_tv_vacuous && r.wasserstein_vacuous);
        assert_eq!(r.regime_hint, RegimeHint::BothVacuous);
        let r = BoundReport::new(1000, 2000, Some(1000), 1.0, RegimeConfig::default()).unwrap();
        assert_eq!(r.regime_hint, RegimeHint::PoissonFavored);
        let r = BoundReport::new(1_000_000, 10_000, None, 1.0, RegimeConfig::default()).unwrap();
        assert_eq!(r.regime_hint, RegimeHint::NormalFavored);
        assert!(r.remark_rate.is_none());
    }
}
