//! Exhaustive scan drivers over `(n, k, s)` triples.

mod dk;
mod gaps;
mod report;
mod tables;

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{self, FactorSieve};
use crate::criteria::{self, ExclusionVerdict, PipelineConfig, Triple, VerdictKind};
use crate::error::Error;
use crate::fixtures;
use crate::polys::LaguerreInstance;

pub use dk::{
    d2_from_najman, eliminate_dk_triples, ingest_najman, parse_najman, smooth_window_scan,
    smooth_windows, SmoothWindowSet,
};
pub use gaps::{first_gap_failure, verify_prime_gap};
pub use report::VERSION;
pub use tables::{
    filaseta_stage_survivors, omega_checks, reproduce_table, table1_s_overlap, RowCheck, TableName,
    TableReport,
};

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Inclusive integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub fn new(lo: u64, hi: u64) -> Self {
        Interval { lo, hi }
    }

    pub fn len(&self) -> u64 {
        if self.hi < self.lo {
            0
        } else {
            self.hi - self.lo + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: u64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `n > 4k`
    Outer,
    /// `2k <= n <= 4k`
    Inner,
    /// `n >= 2k` only
    Unconstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TripleRange {
    pub n: Interval,
    pub k: Interval,
    pub s: Interval,
    pub constraint: Constraint,
}

impl TripleRange {
    pub fn new(
        n: Interval,
        k: Interval,
        s: Interval,
        constraint: Constraint,
    ) -> Result<Self, Error> {
        if k.lo < 2 || s.lo < 1 {
            return Err(Error::Domain("ranges need k >= 2 and s >= 1".into()));
        }
        Ok(TripleRange {
            n,
            k,
            s,
            constraint,
        })
    }

    /// `2k <= n <= 4k` for the given `k` and `s` ranges.
    pub fn inner(k: Interval, s: Interval) -> Result<Self, Error> {
        Self::new(Interval::new(0, u64::MAX), k, s, Constraint::Inner)
    }

    pub fn pairs(&self) -> Vec<(u64, u64)> {
        let mut out = Vec::new();
        for k in self.k.lo..=self.k.hi {
            let (lo, hi) = match self.constraint {
                Constraint::Inner => (2 * k, 4 * k),
                Constraint::Outer => (4 * k + 1, u64::MAX),
                Constraint::Unconstrained => (2 * k, u64::MAX),
            };
            let lo = lo.max(self.n.lo);
            let hi = hi.min(self.n.hi);
            if hi == u64::MAX {
                continue;
            }
            out.extend((lo..=hi).map(|n| (n, k)));
        }
        out
    }
}

/// One block of a scan: explicit `(n, k)` pairs crossed with an `s` range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpaceComponent {
    pub label: String,
    #[serde(skip)]
    pub pairs: Vec<(u64, u64)>,
    pub s: Interval,
    /// Try the quadratic shift bound after the witness stage.
    pub shift_bound: bool,
}

impl SpaceComponent {
    pub fn new(label: impl Into<String>, pairs: Vec<(u64, u64)>, s: Interval) -> Self {
        SpaceComponent {
            label: label.into(),
            pairs,
            s,
            shift_bound: false,
        }
    }

    pub fn triple_count(&self) -> u64 {
        self.pairs.len() as u64 * self.s.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanSpace {
    pub description: String,
    pub components: Vec<SpaceComponent>,
}

impl ScanSpace {
    pub fn from_range(range: &TripleRange) -> Self {
        let label = format!("{:?}", range.constraint).to_lowercase();
        ScanSpace {
            description: format!(
                "k in [{}, {}], s in [{}, {}], n in [{}, {}] ({label})",
                range.k.lo, range.k.hi, range.s.lo, range.s.hi, range.n.lo, range.n.hi
            ),
            components: vec![SpaceComponent::new(label, range.pairs(), range.s)],
        }
    }

    pub fn triple_count(&self) -> u64 {
        self.components
            .iter()
            .map(SpaceComponent::triple_count)
            .sum()
    }

    /// Drops pairs whose `s` range an earlier component already covers.
    pub fn dedup(mut self) -> Self {
        let mut seen: BTreeMap<(u64, u64), Vec<Interval>> = BTreeMap::new();
        for c in &mut self.components {
            let s = c.s;
            c.pairs.retain(|&pair| {
                let ranges = seen.entry(pair).or_default();
                if ranges.iter().any(|r| r.lo <= s.lo && s.hi <= r.hi) {
                    return false;
                }
                ranges.push(s);
                true
            });
        }
        self
    }

    pub fn restrict_s(mut self, s: Interval) -> Self {
        for c in &mut self.components {
            c.s = Interval::new(c.s.lo.max(s.lo), c.s.hi.min(s.hi));
        }
        self
    }
}

/// Which verdicts a report keeps in full (counts are always kept).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerdictDetail {
    All,
    /// Everything not settled by a prime witness.
    NonWitness,
    SurvivorsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    pub budget: u64,
    pub pipeline: PipelineConfig,
    /// Run robust Dumas; when off, the pipeline stops after Filaseta.
    pub robust_dumas: bool,
    pub detail: VerdictDetail,
    pub timing: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: DEFAULT_BUDGET,
            pipeline: PipelineConfig::default(),
            robust_dumas: true,
            detail: VerdictDetail::All,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub space: ScanSpace,
    /// Triples left `NotExcluded` or `Inconclusive`, sorted by `(k, n, s)`.
    pub survivors: Vec<Triple>,
    pub verdicts: Vec<ExclusionVerdict>,
    pub counts: BTreeMap<&'static str, u64>,
    pub total: u64,
    pub seconds: Option<f64>,
}

impl ScanReport {
    pub fn count(&self, kind: &str) -> u64 {
        self.counts.get(kind).copied().unwrap_or(0)
    }

    /// Triples without a prime witness.
    pub fn non_witness_count(&self) -> u64 {
        self.total - self.count("ExcludedByPrimeWitness")
    }
}

/// Scans a range with default options.
pub fn scan(range: &TripleRange) -> Result<ScanReport, Error> {
    scan_space(&ScanSpace::from_range(range), &ScanOptions::default())
}

struct PairResult {
    kept: Vec<ExclusionVerdict>,
    survivors: Vec<Triple>,
    counts: BTreeMap<&'static str, u64>,
}

fn run_pair(n: u64, k: u64, c: &SpaceComponent, opts: &ScanOptions) -> PairResult {
    let window = criteria::window_primes(n, k);
    let cfg = PipelineConfig {
        shift_bound: c.shift_bound || opts.pipeline.shift_bound,
        ..opts.pipeline
    };
    let mut res = PairResult {
        kept: Vec::new(),
        survivors: Vec::new(),
        counts: BTreeMap::new(),
    };
    for s in c.s.lo..=c.s.hi {
        let inst = LaguerreInstance { n, s };
        let v = if opts.robust_dumas {
            criteria::verdict_with_window(inst, k, &window, &cfg)
        } else {
            criteria::verdict_without_robust(inst, k, &window, &cfg)
        };
        *res.counts.entry(v.kind.name()).or_insert(0) += 1;
        let survivor = matches!(v.kind, VerdictKind::NotExcluded | VerdictKind::Inconclusive);
        if survivor {
            res.survivors.push(v.triple);
        }
        let keep = match opts.detail {
            VerdictDetail::All => true,
            VerdictDetail::NonWitness => {
                !matches!(v.kind, VerdictKind::ExcludedByPrimeWitness { .. })
            }
            VerdictDetail::SurvivorsOnly => survivor,
        };
        if keep {
            res.kept.push(v);
        }
    }
    res
}

/// Runs the pipeline on every triple of the space. The result does not
/// depend on thread count or scheduling.
pub fn scan_space(space: &ScanSpace, opts: &ScanOptions) -> Result<ScanReport, Error> {
    let total = space.triple_count();
    if total > opts.budget {
        return Err(Error::Budget {
            count: total,
            budget: opts.budget,
        });
    }
    let start = Instant::now();
    let work: Vec<(u64, u64, &SpaceComponent)> = space
        .components
        .iter()
        .flat_map(|c| c.pairs.iter().map(move |&(n, k)| (n, k, c)))
        .collect();
    let results: Vec<PairResult> = work
        .par_iter()
        .with_min_len(1)
        .map(|&(n, k, c)| run_pair(n, k, c, opts))
        .collect();
    let mut verdicts = Vec::new();
    let mut survivors = Vec::new();
    let mut counts: BTreeMap<&'static str, u64> = BTreeMap::new();
    for r in results {
        verdicts.extend(r.kept);
        survivors.extend(r.survivors);
        for (k, v) in r.counts {
            *counts.entry(k).or_insert(0) += v;
        }
    }
    verdicts.sort_by_key(|v| v.triple);
    survivors.sort();
    Ok(ScanReport {
        space: space.clone(),
        survivors,
        verdicts,
        counts,
        total,
        seconds: opts.timing.then(|| start.elapsed().as_secs_f64()),
    })
}

fn band(label: &str, k: Interval, s: Interval, keep: impl Fn(u64, u64) -> bool) -> SpaceComponent {
    let pairs = (k.lo..=k.hi)
        .flat_map(|k| (2 * k..=4 * k).map(move |n| (n, k)))
        .filter(|&(n, k)| keep(n, k))
        .collect();
    SpaceComponent::new(label, pairs, s)
}

/// `2k <= n <= 4k`.
pub fn inner_space(k: Interval, s: Interval) -> ScanSpace {
    ScanSpace {
        description: format!(
            "2k <= n <= 4k, k in [{}, {}], s in [{}, {}]",
            k.lo, k.hi, s.lo, s.hi
        ),
        components: vec![band("2k<=n<=4k", k, s, |_, _| true)],
    }
}

/// `3k <= n <= 4k`, where every triple lacking a witness is listed in `S_1`.
pub fn s1_space() -> ScanSpace {
    ScanSpace {
        description: "3k <= n <= 4k, 2 <= k <= 92, 1 <= s <= 92".into(),
        components: vec![band(
            "3k<=n<=4k",
            Interval::new(2, 92),
            Interval::new(1, 92),
            |n, k| n >= 3 * k,
        )],
    }
}

/// `2.5k <= n < 3k`, `2 <= k <= 183`.
pub fn s3_space() -> ScanSpace {
    ScanSpace {
        description: "2.5k <= n < 3k, 2 <= k <= 183, 1 <= s <= 92".into(),
        components: vec![band(
            "2.5k<=n<3k",
            Interval::new(2, 183),
            Interval::new(1, 92),
            |n, k| 2 * n >= 5 * k && n < 3 * k,
        )],
    }
}

/// `2k <= n <= 4k` for `k <= 45` and `2k <= n <= 2k+92` for `46 <= k <= 105`.
pub fn s4_space() -> ScanSpace {
    ScanSpace {
        description: "2k <= n <= 4k for k <= 45; 2k <= n <= 2k+92 for 46 <= k <= 105; 1 <= s <= 92"
            .into(),
        components: vec![band(
            "s4",
            Interval::new(2, 105),
            Interval::new(1, 92),
            |n, k| k <= 45 || n <= 2 * k + 92,
        )],
    }
}

/// Pairs `(n, k)` with `lo <= n <= n_max`, `n >= 2k`, whose window has no
/// prime `>= bound`.
fn smooth_pairs(k: Interval, n_lo: impl Fn(u64) -> u64, n_max: u64, bound: u64) -> Vec<(u64, u64)> {
    let sieve = FactorSieve::new(n_max.max(2));
    let mut out = Vec::new();
    for k in k.lo..=k.hi {
        for n in n_lo(k).max(2 * k)..=n_max {
            if (n + 1 - k..=n).all(|m| sieve.gpf(m) < bound) {
                out.push((n, k));
            }
        }
    }
    out
}

/// `2k <= n <= 300`, `2 <= k <= 26`, smooth windows, `10 <= s <= 92`.
pub fn omega1_space() -> ScanSpace {
    ScanSpace {
        description: "2k <= n <= 300, 2 <= k <= 26, P(window) < 100, 10 <= s <= 92".into(),
        components: vec![SpaceComponent::new(
            "smooth n<=300",
            smooth_pairs(Interval::new(2, 26), |k| 2 * k, 300, 100),
            Interval::new(10, 92),
        )],
    }
}

/// `n > 4k` over the exceptional pairs and the smooth windows up to 300.
pub fn outer_space(k: Interval, s: Interval) -> ScanSpace {
    let t: Vec<(u64, u64)> = fixtures::t_pairs()
        .into_iter()
        .filter(|&(_, kk)| k.contains(kk))
        .collect();
    let smooth_k = Interval::new(k.lo, k.hi.min(26));
    ScanSpace {
        description: format!(
            "n > 4k over the exceptional pairs, and 4k < n <= 300 with P(window) < 100 for k <= 26; k in [{}, {}], s in [{}, {}]",
            k.lo, k.hi, s.lo, s.hi
        ),
        components: vec![
            SpaceComponent::new("exceptional pairs", t, s),
            SpaceComponent::new("smooth 4k<n<=300", smooth_pairs(smooth_k, |k| 4 * k + 1, 300, 100), s),
        ],
    }
    .dedup()
}

/// `4k < n < 5k` with `P(n(n-1)...(n-k+1)) <= 4.42k`. The exceptional
/// pairs describe rising windows, so these falling windows escape them.
pub fn falling_gap_pairs(k: Interval) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for k in k.lo..=k.hi {
        for n in 4 * k + 1..5 * k {
            let p = arith::gpf_falling_factorial(n, k).expect("window above 1");
            if 100 * p <= 442 * k {
                out.push((n, k));
            }
        }
    }
    out
}

/// Bounds for the smooth-window part of the full search space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothBounds {
    /// Sieve bound for `D_2` (beyond it only the supplied external values).
    pub d2_max: u64,
    /// Sieve bound for `D_3..D_8`.
    pub dk_max: u64,
    /// Extra `D_2` members, e.g. from [`ingest_najman`].
    pub d2_extra: Vec<u64>,
}

impl Default for SmoothBounds {
    fn default() -> Self {
        let extra = parse_najman(fixtures::NAJMAN_EXCERPT).expect("bundled excerpt parses");
        SmoothBounds {
            d2_max: 2_000_000,
            dk_max: 40_000,
            d2_extra: extra,
        }
    }
}

fn dk_components(bounds: &SmoothBounds, s: Interval) -> Result<Vec<SpaceComponent>, Error> {
    let mut out = Vec::new();
    for k in 2..=8u64 {
        let set = if k == 2 {
            let mut set = smooth_window_scan(2, bounds.d2_max, 100)?;
            let (extra, _) = d2_from_najman(&bounds.d2_extra);
            set.members.extend(extra.members);
            set.members.sort_unstable();
            set.members.dedup();
            set
        } else {
            smooth_window_scan(k, bounds.dk_max, 100)?
        };
        let mut c = SpaceComponent::new(
            format!("D_{k}"),
            set.members.iter().map(|&n| (n, k)).collect(),
            s,
        );
        c.shift_bound = k == 2;
        out.push(c);
    }
    Ok(out)
}

fn smooth_outer(s: Interval) -> SpaceComponent {
    let k = Interval::new(2, 26);
    SpaceComponent::new(
        "smooth 4k<n<=300",
        smooth_pairs(k, |k| 4 * k + 1, 300, 100),
        s,
    )
}

/// The space behind the `s <= 92` exception list: the inner band for
/// `k <= 92` and the exceptional pairs for every `s`; smooth windows up to
/// 300 (`k <= 26`) and the sets `D_2..D_8` beyond 300 for `s >= 10`.
pub fn exception_space(bounds: &SmoothBounds) -> Result<ScanSpace, Error> {
    let all = Interval::new(1, 92);
    let high = Interval::new(10, 92);
    let t = fixtures::t_pairs();
    let mut components = vec![
        band("2k<=n<=4k", Interval::new(2, 92), all, |_, _| true),
        SpaceComponent::new("exceptional pairs", t, all),
        smooth_outer(high),
    ];
    components.extend(dk_components(bounds, high)?);
    Ok(ScanSpace {
        description: format!(
            "2k <= n <= 4k (k <= 92) and n > 4k over the exceptional pairs for 1 <= s <= 92; 4k < n <= 300 with P(window) < 100 (k <= 26), D_2 (sieved to {} plus {} external values) and D_3..D_8 (sieved to {}) for 10 <= s <= 92",
            bounds.d2_max,
            bounds.d2_extra.len(),
            bounds.dk_max
        ),
        components,
    }
    .dedup())
}

/// [`exception_space`] with every smooth part taken over all `1 <= s <= 92`
/// and with the falling windows `4k < n < 5k` of [`falling_gap_pairs`].
pub fn completed_exception_space(bounds: &SmoothBounds) -> Result<ScanSpace, Error> {
    let all = Interval::new(1, 92);
    let mut components = vec![
        band("2k<=n<=4k", Interval::new(2, 92), all, |_, _| true),
        SpaceComponent::new("exceptional pairs", fixtures::t_pairs(), all),
        SpaceComponent::new(
            "4k<n<5k, P(window) <= 4.42k",
            falling_gap_pairs(Interval::new(2, 92)),
            all,
        ),
        smooth_outer(all),
    ];
    components.extend(dk_components(bounds, all)?);
    Ok(ScanSpace {
        description: format!(
            "2k <= n <= 4k (k <= 92); n > 4k over the exceptional pairs; 4k < n < 5k with P(window) <= 4.42k; 4k < n <= 300 with P(window) < 100 (k <= 26); D_2 (sieved to {} plus {} external values) and D_3..D_8 (sieved to {}); 1 <= s <= 92",
            bounds.d2_max,
            bounds.d2_extra.len(),
            bounds.dk_max
        ),
        components,
    }
    .dedup())
}

/// `6 <= k <= 410`, `2k <= n <= min(820, 4k)`, `10 <= s <= floor(1.9k)`.
pub fn wide_shift_space() -> ScanSpace {
    let components = (6..=410u64)
        .map(|k| {
            let pairs = (2 * k..=(4 * k).min(820)).map(|n| (n, k)).collect();
            SpaceComponent::new(format!("k={k}"), pairs, Interval::new(10, 19 * k / 10))
        })
        .collect();
    ScanSpace {
        description: "6 <= k <= 410, 2k <= n <= min(820, 4k), 10 <= s <= 1.9k".into(),
        components,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inner_pairs() {
        let r = TripleRange::inner(Interval::new(2, 3), Interval::new(1, 2)).unwrap();
        assert_eq!(
            r.pairs(),
            vec![
                (4, 2),
                (5, 2),
                (6, 2),
                (7, 2),
                (8, 2),
                (6, 3),
                (7, 3),
                (8, 3),
                (9, 3),
                (10, 3),
                (11, 3),
                (12, 3)
            ]
        );
        assert!(TripleRange::inner(Interval::new(1, 3), Interval::new(1, 2)).is_err());
        assert!(TripleRange::inner(Interval::new(2, 3), Interval::new(0, 2)).is_err());
    }

    #[test]
    fn budget_is_checked_first() {
        let space = inner_space(Interval::new(2, 92), Interval::new(1, 92));
        let opts = ScanOptions {
            budget: 10,
            ..ScanOptions::default()
        };
        assert!(matches!(
            scan_space(&space, &opts),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn small_scan_is_sorted_and_consistent() {
        let r = TripleRange::inner(Interval::new(2, 6), Interval::new(1, 30)).unwrap();
        let rep = scan(&r).unwrap();
        assert_eq!(rep.total, rep.verdicts.len() as u64);
        assert!(rep.verdicts.windows(2).all(|w| w[0].triple < w[1].triple));
        let from_verdicts: Vec<Triple> = rep
            .verdicts
            .iter()
            .filter(|v| !v.kind.is_excluded())
            .map(|v| v.triple)
            .collect();
        assert_eq!(rep.survivors, from_verdicts);
        assert!(rep.verdicts.iter().all(|v| v.reverify()));
        assert!(rep.survivors.contains(&Triple::new(4, 2, 7)));
        assert!(rep.survivors.contains(&Triple::new(10, 5, 4)));
    }

    #[test]
    fn outer_smooth_pairs_are_smooth() {
        let space = outer_space(Interval::new(2, 9), Interval::new(1, 9));
        for c in &space.components {
            for &(n, k) in &c.pairs {
                assert!(n > 4 * k);
            }
        }
        assert!(space.components[1].pairs.contains(&(16, 2)));
        // (9,2) is an exceptional pair and is not repeated.
        assert!(!space.components[1].pairs.contains(&(9, 2)));
    }
}
