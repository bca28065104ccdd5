//! Exact integer number theory: primes, factorization, valuations,
//! binomials and greatest prime factors of integer windows.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;

/// Trial division bound used before switching to probabilistic splitting.
pub const TRIAL_LIMIT: u64 = 1_000_000;

/// A complete prime factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: BigUint,
    /// Strictly increasing primes with positive exponents.
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Number of positive divisors.
    pub fn divisor_count(&self) -> u64 {
        self.factors
            .iter()
            .map(|(_, e)| u64::from(*e) + 1)
            .product()
    }

    pub fn divisors(&self) -> Vec<BigUint> {
        let mut out = vec![BigUint::one()];
        for (p, e) in &self.factors {
            let len = out.len();
            let mut pk = BigUint::one();
            for _ in 0..*e {
                pk *= p;
                for i in 0..len {
                    out.push(&out[i] * &pk);
                }
            }
        }
        out.sort();
        out
    }
}

/// Primes `<= limit`, ascending. Empty when `limit < 2`.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = usize::try_from(limit).expect("sieve limit exceeds address space");
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= limit {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub(crate) fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(TRIAL_LIMIT))
}

/// Smallest-prime-factor table for fast factoring of many small integers.
#[derive(Debug, Clone)]
pub struct FactorSieve {
    spf: Vec<u32>,
}

impl FactorSieve {
    pub fn new(limit: u64) -> Self {
        let limit = usize::try_from(limit.max(1)).expect("sieve limit exceeds address space");
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] != 0 {
                continue;
            }
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        FactorSieve { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Distinct prime factors of `m` (ascending). Falls back to general
    /// factoring above the table.
    pub fn prime_factors(&self, m: u64) -> Vec<u64> {
        if m > self.limit() {
            return factorize_u64(m).into_iter().map(|(p, _)| p).collect();
        }
        let mut m = m as usize;
        let mut out = Vec::new();
        while m > 1 {
            let p = self.spf[m] as usize;
            out.push(p as u64);
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        out
    }

    /// Greatest prime factor of `m`, or 1 for `m <= 1`.
    pub fn gpf(&self, m: u64) -> u64 {
        self.prime_factors(m).last().copied().unwrap_or(1)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin for all 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let r = (n - 1).trailing_zeros();
    'bases: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Miller-Rabin with the first twelve prime bases. Deterministic below
/// 3.3 * 10^24, a strong probable-prime test above.
pub fn is_probable_prime(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let r = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> r;
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    'bases: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..r {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of a 64-bit integer as ascending (prime, exponent).
pub fn factorize_u64(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for &p in small_primes().iter().take_while(|&&p| p <= 1000) {
        if p * p > m {
            break;
        }
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![m];
    let mut large = Vec::new();
    while let Some(c) = stack.pop() {
        if c == 1 {
            continue;
        }
        if is_prime_u64(c) {
            large.push(c);
            continue;
        }
        let d = rho_u64(c);
        stack.push(d);
        stack.push(c / d);
    }
    large.sort_unstable();
    for p in large {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

fn rho_big(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        // Brent's cycle detection with batched gcds.
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut y = BigUint::from(2u32);
        let mut x = y.clone();
        let mut q = BigUint::one();
        let mut g = BigUint::one();
        let mut r: u64 = 1;
        let mut ys = y.clone();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..128.min(r - k) {
                    y = f(&y);
                    let diff = if x > y { &x - &y } else { &y - &x };
                    q = (q * diff) % n;
                }
                g = q.gcd(n);
                k += 128;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                let diff = if x > ys { &x - &ys } else { &ys - &x };
                g = diff.gcd(n);
                if g != one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

/// Complete factorization of `m >= 2`.
pub fn factorize(m: &BigUint) -> Result<Factorization, Error> {
    if *m < BigUint::from(2u32) {
        return Err(Error::Domain(format!("cannot factor {m}: need m >= 2")));
    }
    if let Some(v) = m.to_u64() {
        let factors = factorize_u64(v)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
        return Ok(Factorization {
            value: m.clone(),
            factors,
        });
    }
    let mut rest = m.clone();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for &p in small_primes() {
        let pb = BigUint::from(p);
        if &pb * &pb > rest {
            break;
        }
        let mut e = 0;
        while (&rest % p).is_zero() {
            rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((pb, e));
        }
    }
    let mut large = Vec::new();
    let mut stack = vec![rest];
    while let Some(c) = stack.pop() {
        if c.is_one() {
            continue;
        }
        if let Some(v) = c.to_u64() {
            large.extend(
                factorize_u64(v)
                    .into_iter()
                    .flat_map(|(p, e)| std::iter::repeat_n(BigUint::from(p), e as usize)),
            );
            continue;
        }
        if is_probable_prime(&c) {
            large.push(c);
            continue;
        }
        let d = rho_big(&c);
        stack.push(&c / &d);
        stack.push(d);
    }
    large.sort();
    for p in large {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization {
        value: m.clone(),
        factors,
    })
}

/// Like [`factorize`], but gives up when trial division leaves a
/// composite cofactor wider than `max_bits` bits.
pub fn factorize_bounded(m: &BigUint, max_bits: u64) -> Option<Factorization> {
    if m.bits() <= 64 {
        return factorize(m).ok();
    }
    let mut rest = m.clone();
    for &p in small_primes() {
        while (&rest % p).is_zero() {
            rest /= p;
        }
    }
    if rest.bits() > max_bits && !is_probable_prime(&rest) {
        return None;
    }
    factorize(m).ok()
}

/// `nu_p(x)`, or `None` for `x = 0` (infinite valuation).
pub fn p_adic_valuation(x: &BigInt, p: u64) -> Option<u64> {
    if x.is_zero() {
        return None;
    }
    let mut m = x.magnitude().clone();
    let mut e = 0;
    // Strip p^(2^i) blocks first so huge valuations stay cheap.
    let mut powers = vec![BigUint::from(p)];
    while let Some(last) = powers.last() {
        if !(&m % last).is_zero() {
            break;
        }
        let sq = last * last;
        powers.push(sq);
    }
    for (i, pk) in powers.iter().enumerate().rev() {
        while (&m % pk).is_zero() {
            m /= pk;
            e += 1u64 << i;
        }
    }
    Some(e)
}

/// Legendre's formula: `nu_p(n!)`.
pub fn valuation_of_factorial(n: u64, p: u64) -> u64 {
    let mut total = 0;
    let mut m = n;
    while m >= p {
        m /= p;
        total += m;
    }
    total
}

/// `nu_p(C(n, k))` from factorial valuations; 0 when `k > n`.
pub fn binomial_valuation(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    valuation_of_factorial(n, p) - valuation_of_factorial(k, p) - valuation_of_factorial(n - k, p)
}

/// Exact `C(n, k)`, 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Greatest prime factor of `n(n-1)...(n-k+1)`.
pub fn gpf_falling_factorial(n: u64, k: u64) -> Result<u64, Error> {
    if k == 0 || k > n || n - k + 1 < 2 {
        return Err(Error::Domain(format!(
            "window {n} down to {} contains no integer >= 2 throughout",
            (n + 1).saturating_sub(k)
        )));
    }
    Ok((n - k + 1..=n).map(gpf_u64).max().unwrap_or(1))
}

/// Greatest prime factor of `n(n+2)...(n+2(k-1))`.
pub fn gpf_arith_progression(n: u64, k: u64) -> Result<u64, Error> {
    if n < 2 || k == 0 {
        return Err(Error::Domain(format!(
            "need n >= 2 and k >= 1, got n={n}, k={k}"
        )));
    }
    Ok((0..k).map(|i| gpf_u64(n + 2 * i)).max().unwrap_or(1))
}

fn gpf_u64(m: u64) -> u64 {
    factorize_u64(m).last().map(|&(p, _)| p).unwrap_or(1)
}

/// Number of primes `<= x`.
pub fn prime_count(x: u64) -> u64 {
    sieve_primes(x).len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_primes(limit: u64) -> Vec<u64> {
        (2..=limit)
            .filter(|&m| (2..m).all(|d| m % d != 0))
            .collect()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_primes(10), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2), vec![2]);
        assert_eq!(sieve_primes(1), Vec::<u64>::new());
        assert_eq!(sieve_primes(100), trial_primes(100));
        assert_eq!(sieve_primes(100).len(), 25);
    }

    #[test]
    fn factorize_examples() {
        let f = factorize(&big(72)).unwrap();
        assert_eq!(f.factors, vec![(big(2), 3), (big(3), 2)]);
        let f = factorize(&big(3939649)).unwrap();
        assert_eq!(
            f.factors,
            vec![(big(7), 2), (big(37), 1), (big(41), 1), (big(53), 1)]
        );
        let f = factorize(&big(332110803172167361)).unwrap();
        assert_eq!(
            f.factors,
            vec![(big(2521), 1), (big(187177), 1), (big(703813633), 1)]
        );
        assert!(factorize(&big(1)).is_err());
    }

    #[test]
    fn factorize_beyond_u64() {
        // (2^61 - 1) * (2^31 - 1) * 3^5
        let m = (BigUint::one() << 61u32) - 1u32;
        let n = (BigUint::one() << 31u32) - 1u32;
        let v = &m * &n * 243u32;
        let f = factorize(&v).unwrap();
        assert_eq!(f.product(), v);
        assert_eq!(f.factors, vec![(big(3), 5), (n, 1), (m, 1)]);
        // two 40-bit primes
        let p = big(1_099_511_627_791);
        let q = big(1_099_511_628_401);
        assert!(is_probable_prime(&p) && is_probable_prime(&q));
        let f = factorize(&(&p * &q * &p)).unwrap();
        assert_eq!(f.factors, vec![(p, 2), (q, 1)]);
    }

    #[test]
    fn divisors_of_small_number() {
        let f = factorize(&big(12)).unwrap();
        let d: Vec<u64> = f.divisors().iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(d, vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(f.divisor_count(), 6);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(p_adic_valuation(&BigInt::from(1), 7), Some(0));
        assert_eq!(p_adic_valuation(&BigInt::from(720), 2), Some(4));
        assert_eq!(p_adic_valuation(&BigInt::from(-720), 3), Some(2));
        assert_eq!(p_adic_valuation(&BigInt::zero(), 3), None);
        let c0 = BigInt::from(factorial(9) * binomial(21, 9));
        assert_eq!(p_adic_valuation(&c0, 3), Some(4));
        let huge = BigInt::from(BigUint::from(5u32).pow(1000) * 7u32);
        assert_eq!(p_adic_valuation(&huge, 5), Some(1000));
    }

    #[test]
    fn factorial_valuation_examples() {
        assert_eq!(valuation_of_factorial(0, 5), 0);
        assert_eq!(valuation_of_factorial(10, 3), 4);
        assert_eq!(valuation_of_factorial(92, 17), 5);
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(7, 0), big(1));
        assert_eq!(binomial(12, 9), big(220));
        assert_eq!(binomial(21, 9), big(293930));
        assert_eq!(binomial(3, 5), big(0));
    }

    #[test]
    fn gpf_examples() {
        assert_eq!(gpf_falling_factorial(9, 2).unwrap(), 3);
        assert_eq!(gpf_falling_factorial(292, 9).unwrap(), 97);
        assert_eq!(gpf_falling_factorial(14, 2).unwrap(), 13);
        assert!(gpf_falling_factorial(1, 1).is_err());
        assert!(gpf_falling_factorial(3, 3).is_err());
        assert_eq!(gpf_arith_progression(5, 3).unwrap(), 7);
        assert_eq!(gpf_arith_progression(3, 2).unwrap(), 5);
        assert_eq!(gpf_arith_progression(9, 4).unwrap(), 13);
    }

    #[test]
    fn factor_sieve_agrees_with_factorize() {
        let s = FactorSieve::new(5000);
        for m in 2..5000u64 {
            let direct: Vec<u64> = factorize_u64(m).into_iter().map(|(p, _)| p).collect();
            assert_eq!(s.prime_factors(m), direct);
        }
        assert_eq!(s.gpf(1), 1);
        assert_eq!(s.prime_factors(10_007 * 3), vec![3, 10_007]);
    }

    #[test]
    fn factorize_reconstructs_up_to_a_million() {
        for m in 2..=1_000_000u64 {
            let f = factorize_u64(m);
            let prod: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, m);
            assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.iter().all(|&(p, e)| e >= 1 && is_prime_u64(p)));
        }
    }

    #[test]
    fn legendre_matches_direct_valuation() {
        for p in sieve_primes(100) {
            let mut fact = BigUint::one();
            for n in 0..=500u64 {
                if n > 0 {
                    fact *= n;
                }
                let direct = p_adic_valuation(&BigInt::from(fact.clone()), p).unwrap();
                assert_eq!(valuation_of_factorial(n, p), direct, "n={n} p={p}");
            }
        }
    }

    #[test]
    fn pascal_rule() {
        for n in 1..=300u64 {
            for k in 1..n {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }

    #[test]
    fn consecutive_window_gpf_exceeds_twice_length() {
        for k in 2..=40u64 {
            let lo = (2 * k + 13).max((541 * k).div_ceil(262));
            for n in lo..=2000 {
                assert!(gpf_falling_factorial(n, k).unwrap() > 2 * k, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn odd_progression_gpf_exceeds_twice_length() {
        for k in 2..=40u64 {
            for n in (k + 1..=2000).filter(|n| n % 2 == 1) {
                assert!(gpf_arith_progression(n, k).unwrap() > 2 * k, "n={n} k={k}");
            }
        }
        // Even starts break the bound.
        assert_eq!(gpf_arith_progression(4, 3).unwrap(), 3);
    }
}
