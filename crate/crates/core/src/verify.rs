//! End-to-end checks of measured distances against the closed-form bounds,
//! rate sweeps over graph families, and the frozen standard test set.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{min_degree_sum_check, triangle_count_check, BoundReport, Check, RegimeConfig};
use crate::coloring::{simulate, ColoringConfig};
use crate::error::{invalid, Error, Result};
use crate::exact::{edge_indicator_moments, exact_pmf, pair_sum_variance, DiscreteDistribution, DEFAULT_CAP};
use crate::graph::{generate, Family, Graph};
use crate::metrics::{tv_to_poisson, wasserstein_to_normal};

pub const SCHEMA: &str = "mono-clt/1";

/// Failure probability budget for the total variation tolerance.
pub const TV_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "monte-carlo",
        })
    }
}

/// Additive tolerance on an empirical W1 distance: `10 / sqrt(n)`, i.e.
/// 0.01 at a million samples.
pub fn wasserstein_tolerance(n_samples: u64) -> f64 {
    10.0 / (n_samples as f64).sqrt()
}

/// Hoeffding plus a union bound over all `2^support` events:
/// `sqrt((support ln 2 + ln(2/delta)) / (2n))`.
pub fn tv_tolerance(n_samples: u64, support: usize, delta: f64) -> f64 {
    ((support as f64 * std::f64::consts::LN_2 + (2.0 / delta).ln()) / (2.0 * n_samples as f64)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub method: Method,
    pub cap: u64,
    pub samples: u64,
    pub seed: u64,
    pub stream_id: u64,
    pub c0: f64,
    pub regime: RegimeConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            method: Method::Exact,
            cap: DEFAULT_CAP,
            samples: 1_000_000,
            seed: 0,
            stream_id: 0,
            c0: 1.0,
            regime: RegimeConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDescriptor {
    pub label: Option<String>,
    pub vertex_count: usize,
    pub m: u64,
    pub hash: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticalTolerance {
    pub wasserstein: f64,
    pub tv: f64,
    pub n_samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

impl Verdict {
    fn new(claim: &str, measured: f64, tolerance: f64, bound: f64) -> Self {
        let slack = bound - (measured - tolerance);
        Verdict {
            claim: claim.into(),
            measured,
            tolerance,
            bound,
            slack,
            pass: slack >= 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub graph: GraphDescriptor,
    pub m: u64,
    pub c: u32,
    pub method: Method,
    pub measured_wasserstein: Option<f64>,
    pub measured_tv_poisson: Option<f64>,
    pub bounds: BoundReport,
    pub lemma_results: Vec<Check>,
    pub statistical_tolerance: Option<StatisticalTolerance>,
    pub verdicts: Vec<Verdict>,
}

impl VerificationReport {
    /// Every bound verdict passed. Structural checks are reported separately.
    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn checks_pass(&self) -> bool {
        self.lemma_results.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        if report.schema != SCHEMA {
            return Err(invalid(format!("unsupported schema {:?}", report.schema)));
        }
        Ok(report)
    }
}

/// The law of Y measured by the chosen method, with Monte Carlo
/// tolerances when sampled.
fn measured_law(
    g: &Graph,
    c: u32,
    opts: &VerifyOptions,
) -> Result<(DiscreteDistribution, Option<StatisticalTolerance>)> {
    match opts.method {
        Method::Exact => Ok((exact_pmf(g, c, opts.cap)?, None)),
        Method::MonteCarlo => {
            if opts.samples == 0 {
                return Err(invalid("Monte Carlo verification needs a positive sample budget"));
            }
            let cfg = ColoringConfig::new(c, opts.seed)?.with_stream(opts.stream_id);
            let summary = simulate(g, &cfg, opts.samples)?;
            let law = summary.to_distribution()?;
            let tol = StatisticalTolerance {
                wasserstein: wasserstein_tolerance(opts.samples),
                tv: tv_tolerance(opts.samples, law.support().len(), TV_DELTA),
                n_samples: opts.samples,
                seed: opts.seed,
            };
            Ok((law, Some(tol)))
        }
    }
}

pub fn verify_graph(g: &Graph, c: u32, opts: &VerifyOptions) -> Result<VerificationReport> {
    verify_labeled(g, None, c, opts)
}

pub fn verify_labeled(g: &Graph, label: Option<String>, c: u32, opts: &VerifyOptions) -> Result<VerificationReport> {
    let m = g.edge_count() as u64;
    if m == 0 {
        return Err(invalid("verification needs at least one edge"));
    }
    if c < 2 {
        return Err(invalid("verification needs c >= 2"));
    }
    let stats = g.edge_stats();
    let bounds = BoundReport::new(m, c, Some(stats.k_m), opts.c0, opts.regime)?;

    let (law, tolerance) = measured_law(g, c, opts)?;
    let w1 = wasserstein_to_normal(&law.standardized(m, c)?)?;
    let tv = tv_to_poisson(&law, m as f64 / f64::from(c))?;
    let (tol_w, tol_tv) = tolerance.map_or((0.0, 0.0), |t| (t.wasserstein, t.tv));
    let verdicts = vec![
        Verdict::new("wasserstein_normal", w1, tol_w, bounds.wasserstein_bound),
        Verdict::new("tv_poisson", tv, tol_tv, bounds.poisson_tv_bound.min(1.0)),
    ];

    let moments = edge_indicator_moments(m, c)?;
    let mut lemma_results = vec![
        Check::new("indicator_abs_first_moment", moments.abs_first, moments.abs_first_bound),
        Check::new(
            "indicator_second_moment (= 1/m)",
            (moments.second - 1.0 / m as f64).abs(),
            1e-12 / m as f64,
        ),
        Check::new("indicator_abs_third_moment", moments.abs_third, moments.abs_third_bound),
        min_degree_sum_check(&stats),
        triangle_count_check(&stats),
    ];
    if opts.method == Method::Exact {
        match pair_sum_variance(g, c, opts.cap) {
            Ok(v) => {
                // exact rational values rounded once; allow that rounding
                let tol = 1e-12 * v.universal_bound;
                for (name, value, bound) in [
                    ("pair_sum_variance_structural", v.variance, v.structural_bound),
                    ("pair_sum_variance_universal", v.structural_bound, v.universal_bound),
                    ("pair_sum_variance_with_four_cycles", v.variance, v.four_cycle_bound),
                ] {
                    let mut check = Check::new(name, value, bound);
                    check.pass = value <= bound + tol;
                    lemma_results.push(check);
                }
            }
            Err(Error::CapExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }

    Ok(VerificationReport {
        schema: SCHEMA.into(),
        graph: GraphDescriptor {
            label,
            vertex_count: g.vertex_count(),
            m,
            hash: g.content_hash(),
        },
        m,
        c,
        method: opts.method,
        measured_wasserstein: Some(w1),
        measured_tv_poisson: Some(tv),
        bounds,
        lemma_results,
        statistical_tolerance: tolerance,
        verdicts,
    })
}

/// Family selector for sweeps; the size parameter comes from the schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Complete,
    Cycle,
    Path,
    Star,
    Matching,
    /// `K_{n,n}`.
    CompleteBipartite,
    ErdosRenyi {
        p: f64,
    },
}

impl FamilyKind {
    pub fn with_size(self, n: usize) -> Family {
        match self {
            FamilyKind::Complete => Family::Complete { n },
            FamilyKind::Cycle => Family::Cycle { n },
            FamilyKind::Path => Family::Path { n },
            FamilyKind::Star => Family::Star { n },
            FamilyKind::Matching => Family::Matching { edges: n },
            FamilyKind::CompleteBipartite => Family::CompleteBipartite { left: n, right: n },
            FamilyKind::ErdosRenyi { p } => Family::ErdosRenyi { n, p },
        }
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    /// Names as in the edge-list generator; `erdos_renyi` needs its
    /// probability supplied separately and defaults to `p = 0`.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "complete" => FamilyKind::Complete,
            "cycle" => FamilyKind::Cycle,
            "path" => FamilyKind::Path,
            "star" => FamilyKind::Star,
            "matching" => FamilyKind::Matching,
            "complete_bipartite" => FamilyKind::CompleteBipartite,
            "erdos_renyi" => FamilyKind::ErdosRenyi { p: 0.0 },
            other => return Err(invalid(format!("unknown family {other:?}"))),
        })
    }
}

/// How the color count follows the edge count along a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColorRule {
    Fixed(u32),
    /// `ceil(sqrt(m))`, at least 2.
    SqrtCeil,
    /// `k * m`, at least 2.
    TimesM(u32),
}

impl ColorRule {
    pub fn colors(&self, m: u64) -> Result<u32> {
        let c = match *self {
            ColorRule::Fixed(c) => u64::from(c),
            ColorRule::SqrtCeil => {
                let mut r = (m as f64).sqrt() as u64;
                while r * r < m {
                    r += 1;
                }
                while r > 0 && (r - 1) * (r - 1) >= m {
                    r -= 1;
                }
                r.max(2)
            }
            ColorRule::TimesM(k) => (u64::from(k) * m).max(2),
        };
        u32::try_from(c).map_err(|_| invalid("color count overflows"))
    }
}

impl FromStr for ColorRule {
    type Err = Error;

    /// `sqrt`, `<k>m` (e.g. `10m`) or a plain integer.
    fn from_str(s: &str) -> Result<Self> {
        if s == "sqrt" {
            return Ok(ColorRule::SqrtCeil);
        }
        if let Some(k) = s.strip_suffix('m') {
            return k
                .parse()
                .map(ColorRule::TimesM)
                .map_err(|_| invalid(format!("bad color rule {s:?}")));
        }
        s.parse()
            .map(ColorRule::Fixed)
            .map_err(|_| invalid(format!("bad color rule {s:?}")))
    }
}

pub const SWEEP_HEADER: &str = "family,n,m,c,K_m,triangles,method,w1,w1_bound,tv,tv_bound,remark_rate,verdict";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub n: usize,
    pub m: u64,
    pub c: u32,
    pub k_m: u64,
    pub triangles: u64,
    pub method: Method,
    pub w1: f64,
    pub w1_bound: f64,
    pub tv: f64,
    pub tv_bound: f64,
    pub remark_rate: f64,
    pub pass: bool,
}

impl SweepRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.family,
            self.n,
            self.m,
            self.c,
            self.k_m,
            self.triangles,
            self.method,
            self.w1,
            self.w1_bound,
            self.tv,
            self.tv_bound,
            self.remark_rate,
            if self.pass { "pass" } else { "fail" }
        )
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}

/// One row per schedule entry, in schedule order. Row `k` samples with
/// stream id `opts.stream_id + k`; Erdős–Rényi graphs use `opts.seed + k`.
pub fn sweep(family: FamilyKind, sizes: &[usize], rule: ColorRule, opts: &VerifyOptions) -> Result<Vec<SweepRow>> {
    sizes
        .par_iter()
        .enumerate()
        .map(|(k, &n)| {
            let spec = family.with_size(n);
            let g = generate(spec, Some(opts.seed.wrapping_add(k as u64)))?;
            let m = g.edge_count() as u64;
            let c = rule.colors(m)?;
            let row_opts = VerifyOptions {
                stream_id: opts.stream_id.wrapping_add(k as u64),
                ..*opts
            };
            let report = verify_labeled(&g, Some(format!("{}:{n}", spec.name())), c, &row_opts)?;
            let stats = g.edge_stats();
            Ok(SweepRow {
                family: spec.name().into(),
                n,
                m,
                c,
                k_m: stats.k_m,
                triangles: stats.triangle_count,
                method: opts.method,
                w1: report.measured_wasserstein.unwrap_or(f64::NAN),
                w1_bound: report.bounds.wasserstein_bound,
                tv: report.measured_tv_poisson.unwrap_or(f64::NAN),
                tv_bound: report.bounds.poisson_tv_bound,
                remark_rate: report.bounds.remark_rate.unwrap_or(f64::NAN),
                pass: report.verdicts.iter().all(|v| v.pass),
            })
        })
        .collect()
}

/// Per-component enumeration limit for the standard test set.
pub const STANDARD_SET_CAP: u64 = 1 << 20;

/// One graph of the standard test set with the color counts it is
/// checked at.
#[derive(Debug, Clone)]
pub struct StandardCase {
    pub label: String,
    pub graph: Graph,
    pub colors: Vec<u32>,
}

/// Every labelled simple graph on 2..=5 vertices with at least one edge
/// (c = 2, 3, 4); K6 and K7 (c = 2, 3); cycles, paths and stars at each
/// c in {2, 3, 4} while `c^n` stays within [`STANDARD_SET_CAP`]; matchings
/// with 1..=20 edges (c = 2, 3, 4).
pub fn standard_test_set() -> Vec<StandardCase> {
    let small = vec![2, 3, 4];
    let mut cases = Vec::new();
    for n in 2..=5usize {
        let slots: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 1u32..(1 << slots.len()) {
            let pairs: Vec<_> = slots
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            cases.push(StandardCase {
                label: format!("labelled:n={n}:mask={mask}"),
                graph: Graph::from_edge_list(&pairs, n).expect("valid by construction"),
                colors: small.clone(),
            });
        }
    }
    for n in [6, 7] {
        cases.push(StandardCase {
            label: format!("complete:{n}"),
            graph: generate(Family::Complete { n }, None).unwrap(),
            colors: vec![2, 3],
        });
    }
    type Build = fn(usize) -> Family;
    let families: [(&str, usize, Build); 3] = [
        ("cycle", 3, |n| Family::Cycle { n }),
        ("path", 2, |n| Family::Path { n }),
        ("star", 2, |n| Family::Star { n }),
    ];
    for (name, start, build) in families {
        let mut n = start;
        while 2f64.powi(n as i32) <= STANDARD_SET_CAP as f64 {
            let colors: Vec<u32> = small
                .iter()
                .copied()
                .filter(|&c| f64::from(c).powi(n as i32) <= STANDARD_SET_CAP as f64)
                .collect();
            cases.push(StandardCase {
                label: format!("{name}:{n}"),
                graph: generate(build(n), None).unwrap(),
                colors,
            });
            n += 1;
        }
    }
    for edges in 1..=20 {
        cases.push(StandardCase {
            label: format!("matching:{edges}"),
            graph: generate(Family::Matching { edges }, None).unwrap(),
            colors: small.clone(),
        });
    }
    cases
}

/// Tab-separated `label, colors, vertices, edges, hash` lines for the
/// standard test set.
pub fn standard_manifest() -> String {
    let mut out = String::from("# label\tcolors\tvertices\tedges\tsha256\n");
    for case in standard_test_set() {
        let colors: Vec<String> = case.colors.iter().map(u32::to_string).collect();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            case.label,
            colors.join(","),
            case.graph.vertex_count(),
            case.graph.edge_count(),
            case.graph.content_hash()
        ));
    }
    out
}
