//! Exclusion criteria as verdict-producing checks and the combined
//! witness, Filaseta, robust Dumas pipeline.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::Serialize;

use crate::arith;
use crate::error::Error;
use crate::newton::{self, DEFAULT_DUMAS_BUDGET};
use crate::polys::LaguerreInstance;

/// A scan coordinate `(n, k, s)`, ordered by `(k, n, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Triple {
    pub n: u64,
    pub k: u64,
    pub s: u64,
}

impl Triple {
    pub fn new(n: u64, k: u64, s: u64) -> Self {
        Triple { n, k, s }
    }

    pub fn instance(&self) -> LaguerreInstance {
        LaguerreInstance {
            n: self.n,
            s: self.s,
        }
    }
}

impl Ord for Triple {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.k, self.n, self.s).cmp(&(other.k, other.n, other.s))
    }
}

impl PartialOrd for Triple {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.k, self.s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    ExcludedByPrimeWitness {
        prime: u64,
    },
    /// `prime^r` divides `n - delta` and `s < prime^r - delta`.
    ExcludedByShiftBound {
        prime: u64,
        r: u32,
        delta: u8,
    },
    ExcludedByFilaseta {
        prime: u64,
        l: u64,
    },
    ExcludedByRobustDumas {
        prime: u64,
    },
    NotExcluded,
    Inconclusive,
}

impl VerdictKind {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictKind::ExcludedByPrimeWitness { .. } => "ExcludedByPrimeWitness",
            VerdictKind::ExcludedByShiftBound { .. } => "ExcludedByShiftBound",
            VerdictKind::ExcludedByFilaseta { .. } => "ExcludedByFilaseta",
            VerdictKind::ExcludedByRobustDumas { .. } => "ExcludedByRobustDumas",
            VerdictKind::NotExcluded => "NotExcluded",
            VerdictKind::Inconclusive => "Inconclusive",
        }
    }

    pub fn prime(&self) -> Option<u64> {
        match *self {
            VerdictKind::ExcludedByPrimeWitness { prime }
            | VerdictKind::ExcludedByShiftBound { prime, .. }
            | VerdictKind::ExcludedByFilaseta { prime, .. }
            | VerdictKind::ExcludedByRobustDumas { prime } => Some(prime),
            _ => None,
        }
    }

    pub fn is_excluded(&self) -> bool {
        self.prime().is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExclusionVerdict {
    pub triple: Triple,
    pub kind: VerdictKind,
}

impl ExclusionVerdict {
    /// Re-checks the stored certificate from scratch. Verdicts that
    /// exclude nothing carry no certificate and pass trivially.
    pub fn reverify(&self) -> bool {
        let Triple { n, k, s } = self.triple;
        let inst = LaguerreInstance { n, s };
        match self.kind {
            VerdictKind::ExcludedByPrimeWitness { prime } => is_valid_witness(n, k, s, prime),
            VerdictKind::ExcludedByShiftBound { prime, r, delta } => {
                k == 2 && is_valid_shift_bound(n, s, prime, r, delta)
            }
            VerdictKind::ExcludedByFilaseta { prime, l } => {
                l < k && arith::is_prime_u64(prime) && newton::filaseta_excludes(inst, prime, k, l)
            }
            VerdictKind::ExcludedByRobustDumas { prime } => {
                arith::is_prime_u64(prime)
                    && newton::robust_dumas_excludes(inst, prime, k) == Ok(true)
            }
            VerdictKind::NotExcluded | VerdictKind::Inconclusive => true,
        }
    }
}

/// Primes `> k` dividing `n(n-1)...(n-k+1)`, ascending.
pub fn window_primes(n: u64, k: u64) -> Vec<u64> {
    let mut primes: Vec<u64> = (n + 1 - k..=n)
        .filter(|&m| m > 1)
        .flat_map(|m| arith::factorize_u64(m).into_iter().map(|(p, _)| p))
        .filter(|&p| p > k)
        .collect();
    primes.sort_unstable();
    primes.dedup();
    primes
}

/// First prime of `window` (ascending) missing `C(n+s, s)`.
pub fn witness_among(window: &[u64], n: u64, s: u64) -> Option<u64> {
    window
        .iter()
        .copied()
        .find(|&p| arith::binomial_valuation(n + s, s, p) == 0)
}

/// Smallest prime `p > k` dividing the falling factorial of `n` but not
/// `C(n+s, s)`. Such a prime rules out a factor of degree `k`.
pub fn prime_witness(inst: LaguerreInstance, k: u64) -> Option<u64> {
    if k == 0 || k > inst.n {
        return None;
    }
    witness_among(&window_primes(inst.n, k), inst.n, inst.s)
}

pub fn is_valid_witness(n: u64, k: u64, s: u64, p: u64) -> bool {
    arith::is_prime_u64(p)
        && p > k
        && k <= n
        && (n + 1 - k..=n).any(|m| m % p == 0)
        && arith::binomial_valuation(n + s, s, p) == 0
}

/// `p^r - delta`: the least shift compatible with a quadratic factor when
/// `p^r` divides `n - delta`.
pub fn spr_min_shift(p: u64, r: u32, delta: u8) -> u64 {
    p.checked_pow(r).unwrap_or(u64::MAX) - u64::from(delta)
}

pub fn is_valid_shift_bound(n: u64, s: u64, p: u64, r: u32, delta: u8) -> bool {
    if p <= 2 || !arith::is_prime_u64(p) || delta > 1 || r == 0 || n < u64::from(delta) {
        return false;
    }
    let Some(pr) = p.checked_pow(r) else {
        return false;
    };
    let m = n - u64::from(delta);
    m.is_multiple_of(pr)
        && (delta == 0 || !(s + 1).is_multiple_of(p))
        && s < spr_min_shift(p, r, delta)
}

/// First (by prime, then `delta`) shift-bound certificate ruling out a
/// quadratic factor, using the full power of each odd prime in `n - delta`.
pub fn shift_bound_certificate(n: u64, s: u64) -> Option<(u64, u32, u8)> {
    let mut options: Vec<(u64, u32, u8)> = Vec::new();
    for delta in [0u8, 1] {
        let m = n - u64::from(delta);
        if m < 2 {
            continue;
        }
        for (p, e) in arith::factorize_u64(m) {
            if p > 2 {
                options.push((p, e, delta));
            }
        }
    }
    options.sort_unstable();
    options
        .into_iter()
        .find(|&(p, r, delta)| is_valid_shift_bound(n, s, p, r, delta))
}

/// `s^pi(s)`, the largest degree compatible with a linear factor.
pub fn degree_one_bound(s: u64) -> Result<BigUint, Error> {
    if s < 2 {
        return Err(Error::Domain(format!("need s >= 2, got {s}")));
    }
    let pi = arith::prime_count(s);
    Ok(BigUint::from(s).pow(pi as u32))
}

/// Supported gap parameters `theta` with their starting points `m_0`.
pub const GAP_PARAMETERS: [((u64, u64), u64); 2] = [((1, 39), 800), ((1, 1000), 48683)];

/// Threshold on `n` beyond which `s > 2(1 - 2 phi) k`, with that coefficient.
pub fn prime_gap_threshold(phi: Ratio<u64>) -> Result<(u64, Ratio<u64>), Error> {
    let one = Ratio::from_integer(1u64);
    if phi <= Ratio::from_integer(0) || phi >= Ratio::new(1, 9) {
        return Err(Error::Domain(format!("phi = {phi} outside (0, 1/9)")));
    }
    let theta = phi / (one - phi);
    let m0 = GAP_PARAMETERS
        .iter()
        .find(|((a, b), _)| theta == Ratio::new(*a, *b))
        .map(|&(_, m0)| m0)
        .ok_or_else(|| {
            let list: Vec<String> = GAP_PARAMETERS
                .iter()
                .map(|((a, b), m0)| format!("theta={a}/{b} (m0={m0})"))
                .collect();
            Error::Unsupported(format!("theta = {theta}; supported: {}", list.join(", ")))
        })?;
    let threshold = (Ratio::from_integer(m0) / (one - phi)).ceil().to_integer();
    let coeff = Ratio::from_integer(2) * (one - Ratio::from_integer(2) * phi);
    Ok((threshold, coeff))
}

/// Knobs for [`excludes_factor_degree_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineConfig {
    pub dumas_budget: u64,
    /// Polygon stages are skipped (verdict `Inconclusive`) above this degree.
    pub polygon_limit: u64,
    /// Also try the quadratic shift bound after the witness stage.
    pub shift_bound: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            dumas_budget: DEFAULT_DUMAS_BUDGET,
            polygon_limit: 200_000,
            shift_bound: false,
        }
    }
}

/// Cap on candidate lattice points before robust Dumas gives up.
const MAX_CHAIN_POINTS: u64 = 200_000;

/// Primes that divide `c_j` for some `j <= n-2`.
pub fn candidate_primes(inst: LaguerreInstance) -> Vec<u64> {
    let (n, s) = (inst.n, inst.s);
    if n < 2 {
        return Vec::new();
    }
    arith::sieve_primes(n + s)
        .into_iter()
        .filter(|&p| p <= n || (0..=n - 2).any(|j| inst.coeff_valuation(j, p) > 0))
        .collect()
}

fn check_k(inst: LaguerreInstance, k: u64) -> Result<(), Error> {
    if k < 2 || 2 * k > inst.n {
        return Err(Error::Domain(format!(
            "need 2 <= k <= n/2, got n={}, k={k}",
            inst.n
        )));
    }
    Ok(())
}

/// Full pipeline with default settings: witness, then Filaseta with
/// `l = k-1`, then robust Dumas, each over ascending primes.
pub fn excludes_factor_degree(inst: LaguerreInstance, k: u64) -> Result<ExclusionVerdict, Error> {
    excludes_factor_degree_with(inst, k, &PipelineConfig::default())
}

pub fn excludes_factor_degree_with(
    inst: LaguerreInstance,
    k: u64,
    cfg: &PipelineConfig,
) -> Result<ExclusionVerdict, Error> {
    check_k(inst, k)?;
    let window = window_primes(inst.n, k);
    Ok(verdict_with_window(inst, k, &window, cfg))
}

/// Pipeline with precomputed window primes (shared across `s` in scans).
pub fn verdict_with_window(
    inst: LaguerreInstance,
    k: u64,
    window: &[u64],
    cfg: &PipelineConfig,
) -> ExclusionVerdict {
    let triple = Triple::new(inst.n, k, inst.s);
    let kind = match witness_among(window, inst.n, inst.s) {
        Some(prime) => VerdictKind::ExcludedByPrimeWitness { prime },
        None => after_witness(inst, k, cfg, true),
    };
    ExclusionVerdict { triple, kind }
}

/// Witness and Filaseta stages only, as in the published tables.
pub fn verdict_without_robust(
    inst: LaguerreInstance,
    k: u64,
    window: &[u64],
    cfg: &PipelineConfig,
) -> ExclusionVerdict {
    let triple = Triple::new(inst.n, k, inst.s);
    let kind = match witness_among(window, inst.n, inst.s) {
        Some(prime) => VerdictKind::ExcludedByPrimeWitness { prime },
        None => after_witness(inst, k, cfg, false),
    };
    ExclusionVerdict { triple, kind }
}

fn after_witness(
    inst: LaguerreInstance,
    k: u64,
    cfg: &PipelineConfig,
    robust: bool,
) -> VerdictKind {
    if cfg.shift_bound && k == 2 {
        if let Some((prime, r, delta)) = shift_bound_certificate(inst.n, inst.s) {
            return VerdictKind::ExcludedByShiftBound { prime, r, delta };
        }
    }
    if inst.n > cfg.polygon_limit {
        return VerdictKind::Inconclusive;
    }
    let primes = candidate_primes(inst);
    if let Some(&prime) = primes
        .iter()
        .find(|&&p| newton::filaseta_excludes(inst, p, k, k - 1))
    {
        return VerdictKind::ExcludedByFilaseta { prime, l: k - 1 };
    }
    if !robust {
        return VerdictKind::NotExcluded;
    }
    let mut inconclusive = false;
    for &p in &primes {
        match robust_dumas_screened(inst, p, k, cfg.dumas_budget) {
            Some(true) => return VerdictKind::ExcludedByRobustDumas { prime: p },
            Some(false) => {}
            None => inconclusive = true,
        }
    }
    if inconclusive {
        VerdictKind::Inconclusive
    } else {
        VerdictKind::NotExcluded
    }
}

/// Robust Dumas with cheap necessary conditions first; `None` when the
/// search is too large to finish.
fn robust_dumas_screened(inst: LaguerreInstance, p: u64, k: u64, budget: u64) -> Option<bool> {
    let n = inst.n;
    let v_end = inst.coeff_valuation(0, p);
    // Raising every interior point leaves the single chord edge.
    let g = num_integer::gcd(n, v_end);
    if k.is_multiple_of(n / g) {
        return Some(false);
    }
    let base = newton::instance_polygon(inst, p);
    if newton::dumas_degree_set(&base).contains(k) {
        return Some(false);
    }
    // Lattice points between the base path and the chord bound the search.
    let values = inst.polygon_values(p);
    let mut points = 0u64;
    for (x, &v) in values.iter().enumerate().skip(1).take(n as usize - 1) {
        let chord = (v_end as u128 * x as u128).div_ceil(n as u128) as u64;
        points += chord.saturating_sub(v);
        if points > MAX_CHAIN_POINTS {
            return None;
        }
    }
    newton::robust_dumas_excludes_with(inst, p, k, budget).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: u64, s: u64) -> LaguerreInstance {
        LaguerreInstance::new(n, s).unwrap()
    }

    #[test]
    fn witness_examples() {
        assert_eq!(prime_witness(inst(9, 1), 2), Some(3));
        assert_eq!(prime_witness(inst(14, 3), 3), Some(7));
        assert_eq!(prime_witness(inst(10, 4), 5), None);
    }

    #[test]
    fn witnesses_reverify() {
        for n in 4..=60u64 {
            for k in 2..=n / 2 {
                for s in 1..=40u64 {
                    if let Some(p) = prime_witness(inst(n, s), k) {
                        assert!(is_valid_witness(n, k, s, p));
                    }
                }
            }
        }
    }

    #[test]
    fn shift_examples() {
        assert_eq!(spr_min_shift(3, 2, 0), 9);
        assert_eq!(spr_min_shift(2521, 1, 0), 2521);
        assert_eq!(spr_min_shift(17, 2, 1), 288);
        let n = 332110803172167361;
        assert!((0..=92).all(|s| is_valid_shift_bound(n, s, 2521, 1, 0)));
        let n = 3939649;
        assert!(is_valid_shift_bound(n, 92, 17, 2, 1));
        assert_eq!(shift_bound_certificate(n, 92), Some((17, 2, 1)));
        // The (s+1, p) guard: s = 101 has 17 | s + 1.
        assert!(!is_valid_shift_bound(n, 101, 17, 2, 1));
    }

    #[test]
    fn shift_telescoping_for_nine() {
        // 3^2 | 9, so C(9+s, s) is prime to 3 for s < 9.
        for s in 0..=8 {
            assert_eq!(arith::binomial_valuation(9 + s, s, 3), 0);
        }
        // The first carry in base 3 comes at s = 18.
        assert_eq!(arith::binomial_valuation(9 + 17, 17, 3), 0);
        assert_eq!(arith::binomial_valuation(9 + 18, 18, 3), 1);
    }

    #[test]
    fn degree_one_examples() {
        assert_eq!(degree_one_bound(2).unwrap(), BigUint::from(2u32));
        assert_eq!(degree_one_bound(4).unwrap(), BigUint::from(16u32));
        assert_eq!(degree_one_bound(10).unwrap(), BigUint::from(10000u32));
        assert!(degree_one_bound(1).is_err());
    }

    #[test]
    fn gap_threshold_examples() {
        assert_eq!(
            prime_gap_threshold(Ratio::new(1, 40)).unwrap(),
            (821, Ratio::new(19, 10))
        );
        assert_eq!(
            prime_gap_threshold(Ratio::new(1, 1001)).unwrap(),
            (48732, Ratio::new(1998, 1001))
        );
        assert!(matches!(
            prime_gap_threshold(Ratio::new(1, 50)),
            Err(Error::Unsupported(_))
        ));
        assert!(prime_gap_threshold(Ratio::new(1, 8)).is_err());
        // coefficient tends to 2 as phi shrinks
        let c = Ratio::from_integer(2) * (Ratio::from_integer(1) - Ratio::new(2, 1_000_000u64));
        assert!(Ratio::from_integer(2) - c < Ratio::new(1, 1000));
    }

    #[test]
    fn pipeline_examples() {
        let v = excludes_factor_degree(inst(6, 47), 3).unwrap();
        assert_eq!(v.kind, VerdictKind::ExcludedByRobustDumas { prime: 2 });
        let v = excludes_factor_degree(inst(9, 19), 2).unwrap();
        assert_eq!(v.kind, VerdictKind::NotExcluded);
        let v = excludes_factor_degree(inst(4, 2), 2).unwrap();
        assert_eq!(v.kind, VerdictKind::ExcludedByRobustDumas { prime: 2 });
        assert!(excludes_factor_degree(inst(5, 2), 3).is_err());
        assert!(excludes_factor_degree(inst(5, 2), 1).is_err());
    }

    #[test]
    fn polygon_limit_gives_inconclusive() {
        let cfg = PipelineConfig {
            polygon_limit: 5,
            ..PipelineConfig::default()
        };
        let v = excludes_factor_degree_with(inst(9, 19), 2, &cfg).unwrap();
        assert_eq!(v.kind, VerdictKind::Inconclusive);
    }

    #[test]
    fn candidate_primes_cover_large_shift_divisors() {
        // 53 > n divides C(53, 6) = a_0 for (6, 47).
        let ps = candidate_primes(inst(6, 47));
        assert!(ps.contains(&2) && ps.contains(&5) && ps.contains(&53));
        assert!(!ps.contains(&47));
    }

    #[test]
    fn binomial_valuation_two_ways() {
        for p in arith::sieve_primes(600) {
            for n in 0..=500u64 {
                let mut direct: i64 = 0;
                for s in 1..=92u64 {
                    // nu_p((n+1)...(n+s)) - nu_p(s!)
                    let mut t = n + s;
                    while t % p == 0 {
                        t /= p;
                        direct += 1;
                    }
                    let mut u = s;
                    while u % p == 0 {
                        u /= p;
                        direct -= 1;
                    }
                    assert_eq!(arith::binomial_valuation(n + s, s, p) as i64, direct);
                }
            }
        }
    }
}
