use serde::Serialize;

use super::{scan_space, Interval, ScanOptions, ScanReport, ScanSpace, SpaceComponent};
use crate::arith;
use crate::error::Error;

/// `n > 300` with `n(n-1)...(n-k+1)` free of primes `>= bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmoothWindowSet {
    pub k: u64,
    pub bound: u64,
    /// Largest `n` examined by the sieve.
    pub n_max: u64,
    pub members: Vec<u64>,
}

const MIN_N: u64 = 300;
const SIEVE_CAP: u64 = 100_000_000;

/// Sieves the smooth-window set up to `n_max`.
pub fn smooth_window_scan(k: u64, n_max: u64, bound: u64) -> Result<SmoothWindowSet, Error> {
    if k < 2 {
        return Err(Error::Domain(format!("need k >= 2, got {k}")));
    }
    let members = smooth_windows(k, MIN_N + 1, n_max, bound)?;
    Ok(SmoothWindowSet {
        k,
        bound,
        n_max,
        members,
    })
}

/// All `n` in `[n_min, n_max]`, `n >= k`, with `n(n-1)...(n-k+1)` free
/// of primes `>= bound`.
pub fn smooth_windows(k: u64, n_min: u64, n_max: u64, bound: u64) -> Result<Vec<u64>, Error> {
    if k < 1 {
        return Err(Error::Domain("need k >= 1".into()));
    }
    if bound > 100 {
        return Err(Error::Domain(format!("prime bound {bound} above 100")));
    }
    if n_max > SIEVE_CAP {
        return Err(Error::Budget {
            count: n_max,
            budget: SIEVE_CAP,
        });
    }
    let len = n_max as usize + 1;
    let mut rest: Vec<u32> = (0..len as u32).collect();
    for p in arith::sieve_primes(bound.saturating_sub(1)) {
        let p = p as u32;
        for m in (p as usize..len).step_by(p as usize) {
            while rest[m].is_multiple_of(p) {
                rest[m] /= p;
            }
        }
    }
    let mut members = Vec::new();
    let mut run = 0u64;
    for (m, &r) in rest.iter().enumerate().skip(1) {
        run = if r == 1 { run + 1 } else { 0 };
        if run >= k && m as u64 >= n_min {
            members.push(m as u64);
        }
    }
    Ok(members)
}

/// Parses a list of odd `x` (one per line, `#` comments allowed) into
/// `n = (x+1)/2`, keeping `n > 300`.
pub fn parse_najman(text: &str) -> Result<Vec<u64>, Error> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse = |msg: String| Error::Parse { line: i + 1, msg };
        let x: u128 = line.parse().map_err(|e| parse(format!("{line:?}: {e}")))?;
        if x.is_multiple_of(2) {
            return Err(parse(format!("{x} is even")));
        }
        let n = u64::try_from(x.div_ceil(2)).map_err(|_| parse(format!("{x} too large")))?;
        if n > MIN_N {
            out.push(n);
        }
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

pub fn ingest_najman(path: &std::path::Path) -> Result<Vec<u64>, Error> {
    parse_najman(&std::fs::read_to_string(path)?)
}

fn is_smooth(mut m: u64, bound: u64) -> bool {
    for p in arith::small_primes()
        .iter()
        .copied()
        .take_while(|&p| p < bound)
    {
        while m.is_multiple_of(p) {
            m /= p;
        }
    }
    m == 1
}

/// Splits external `D_2` candidates into genuine members and rejects.
pub fn d2_from_najman(values: &[u64]) -> (SmoothWindowSet, Vec<u64>) {
    let (members, rejected): (Vec<u64>, Vec<u64>) = values
        .iter()
        .partition(|&&n| is_smooth(n, 100) && is_smooth(n - 1, 100));
    let n_max = members.last().copied().unwrap_or(0);
    (
        SmoothWindowSet {
            k: 2,
            bound: 100,
            n_max,
            members,
        },
        rejected,
    )
}

/// Runs the pipeline on `(n, k, s)` for every member of the set, with the
/// shift bound enabled when `k = 2`.
pub fn eliminate_dk_triples(
    set: &SmoothWindowSet,
    s: Interval,
    opts: &ScanOptions,
) -> Result<ScanReport, Error> {
    let mut c = SpaceComponent::new(
        format!("D_{}", set.k),
        set.members.iter().map(|&n| (n, set.k)).collect(),
        s,
    );
    c.shift_bound = set.k == 2;
    let space = ScanSpace {
        description: format!(
            "D_{} (n <= {}), {} <= s <= {}",
            set.k, set.n_max, s.lo, s.hi
        ),
        components: vec![c],
    };
    scan_space(&space, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn brute(k: u64, n_max: u64) -> Vec<u64> {
        (MIN_N + 1..=n_max)
            .filter(|&n| arith::gpf_falling_factorial(n, k).unwrap() < 100)
            .collect()
    }

    #[test]
    fn sieve_matches_factoring() {
        for k in 2..=5 {
            assert_eq!(
                smooth_window_scan(k, 20_000, 100).unwrap().members,
                brute(k, 20_000)
            );
        }
    }

    #[test]
    fn sets_are_nested() {
        let d7 = smooth_window_scan(7, 10_000, 100).unwrap().members;
        let d6 = smooth_window_scan(6, 10_000, 100).unwrap().members;
        assert!(d7.iter().all(|n| d6.contains(n)));
    }

    #[test]
    fn domain_checks() {
        assert!(smooth_window_scan(1, 1000, 100).is_err());
        assert!(smooth_window_scan(2, 1000, 101).is_err());
        assert!(smooth_window_scan(2, SIEVE_CAP + 1, 100).is_err());
    }

    #[test]
    fn najman_parsing() {
        let v = parse_najman(fixtures::NAJMAN_EXCERPT).unwrap();
        assert_eq!(v, vec![134849, 3939649, 166055401586083681]);
        let (set, rejected) = d2_from_najman(&v);
        assert_eq!(set.members, v);
        assert!(rejected.is_empty());
        // 599 maps to n = 300, which is not beyond 300.
        assert!(parse_najman("# x\n\n599\n7\n").unwrap().is_empty());
        assert_eq!(parse_najman("601 # tail comment\n").unwrap(), vec![301]);
        match parse_najman("601\n12\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_najman("abc"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn najman_values_in_sieve_range_agree() {
        let d2 = smooth_window_scan(2, 4_000_000, 100).unwrap().members;
        for n in parse_najman(fixtures::NAJMAN_EXCERPT).unwrap() {
            if n <= 4_000_000 {
                assert!(d2.binary_search(&n).is_ok(), "{n}");
            }
        }
    }
}
