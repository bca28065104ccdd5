use num_rational::Ratio;

use crate::arith;
use crate::error::Error;

const GAP_CAP: u64 = 200_000_000;

/// First `m` in `[m_lo, m_hi]` with no prime in `(m, ratio * m]`.
pub fn first_gap_failure(m_lo: u64, m_hi: u64, ratio: Ratio<u64>) -> Result<Option<u64>, Error> {
    if m_lo < 2 || m_hi < m_lo || ratio <= Ratio::from_integer(1) {
        return Err(Error::Domain(format!(
            "bad gap range [{m_lo}, {m_hi}] or ratio {ratio}"
        )));
    }
    let top = (Ratio::from_integer(m_hi) * ratio).floor().to_integer();
    if top > GAP_CAP {
        return Err(Error::Budget {
            count: top,
            budget: GAP_CAP,
        });
    }
    let primes = arith::sieve_primes(top + 1);
    let (num, den) = (*ratio.numer() as u128, *ratio.denom() as u128);
    let mut idx = 0usize;
    for m in m_lo..=m_hi {
        while idx < primes.len() && primes[idx] <= m {
            idx += 1;
        }
        let ok = primes
            .get(idx)
            .is_some_and(|&q| q as u128 * den <= m as u128 * num);
        if !ok {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Whether every `m` in `[m_lo, m_hi]` has a prime in `(m, ratio * m]`.
pub fn verify_prime_gap(m_lo: u64, m_hi: u64, ratio: Ratio<u64>) -> Result<bool, Error> {
    Ok(first_gap_failure(m_lo, m_hi, ratio)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranges() {
        assert!(verify_prime_gap(2, 10, Ratio::from_integer(2)).unwrap());
        assert!(verify_prime_gap(2, 100_000, Ratio::from_integer(2)).unwrap());
        // 3 -> next prime 5 > 4.5
        assert_eq!(
            first_gap_failure(2, 100, Ratio::new(3, 2)).unwrap(),
            Some(3)
        );
        assert_eq!(
            first_gap_failure(4, 100, Ratio::new(3, 2)).unwrap(),
            Some(7)
        );
        assert!(verify_prime_gap(800, 100_000, Ratio::new(40, 39)).unwrap());
        assert!(!verify_prime_gap(100, 1_000, Ratio::new(40, 39)).unwrap());
        assert!(verify_prime_gap(1, 10, Ratio::from_integer(2)).is_err());
        assert!(verify_prime_gap(2, 10, Ratio::from_integer(1)).is_err());
    }
}
