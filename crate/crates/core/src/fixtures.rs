//! Tables transcribed from the source article, bundled as CSV.

use crate::criteria::Triple;
use crate::newton::NewtonPolygon;
use crate::polys::LaguerreInstance;

const TABLE1: &str = include_str!("../fixtures/table1.csv");
const TABLE2: &str = include_str!("../fixtures/table2.csv");
const TABLE3: &str = include_str!("../fixtures/table3.csv");
const TABLE4: &str = include_str!("../fixtures/table4.csv");
const OMEGA: &str = include_str!("../fixtures/omega.csv");
const T_PAIRS: &str = include_str!("../fixtures/t_pairs.csv");
const S2: &str = include_str!("../fixtures/s2.csv");
const S3: &str = include_str!("../fixtures/s3.csv");
const S4: &str = include_str!("../fixtures/s4.csv");
const OMEGA1: &str = include_str!("../fixtures/omega1.csv");
const SMALL_N: &str = include_str!("../fixtures/small_n_exceptions.csv");
const S_LE_9: &str = include_str!("../fixtures/s_le_9.csv");
const EXCEPTIONS: &str = include_str!("../fixtures/exceptions.csv");
const DK: &str = include_str!("../fixtures/dk_printed.csv");
const POLYGONS: &str = include_str!("../fixtures/polygons.csv");

/// Odd `x` with `x^2 - 1` free of primes above 100 (an excerpt).
pub const NAJMAN_EXCERPT: &str = include_str!("../fixtures/najman_excerpt.txt");

fn rows(src: &str) -> impl Iterator<Item = Vec<u64>> + '_ {
    src.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.split(',')
                .map(|f| f.trim().parse().expect("numeric fixture field"))
                .collect()
        })
}

fn triples(src: &str) -> Vec<Triple> {
    rows(src).map(|r| Triple::new(r[0], r[1], r[2])).collect()
}

/// Rows `(n, s, p)` for a fixed `k`.
fn with_k(src: &str, k: u64) -> Vec<(Triple, u64)> {
    rows(src)
        .map(|r| (Triple::new(r[0], k, r[1]), r[2]))
        .collect()
}

fn quads(src: &str) -> Vec<(Triple, u64)> {
    rows(src)
        .map(|r| (Triple::new(r[0], r[1], r[2]), r[3]))
        .collect()
}

/// Witness primes for the `k = 2` pairs of the exceptional set.
pub fn table1() -> Vec<(Triple, u64)> {
    with_k(TABLE1, 2)
}

/// Filaseta primes (with `l = 1`) for the set `S`, `k = 2`.
pub fn table2() -> Vec<(Triple, u64)> {
    with_k(TABLE2, 2)
}

/// Witness primes for the `k > 2` pairs of the exceptional set.
pub fn table3() -> Vec<(Triple, u64)> {
    quads(TABLE3)
}

/// Witness primes for `(29,7)` and `(30,7)`, `s = 10..12`.
pub fn table4() -> Vec<(Triple, u64)> {
    with_k(TABLE4, 7)
}

/// Triples eliminated by polygon arguments, each with its prime.
pub fn omega() -> Vec<(Triple, u64)> {
    quads(OMEGA)
}

/// Pairs `(n, k)` with `n > 4k` for which `n(n+1)...(n+k-1)` has no
/// prime above `4.5k`. Note the rising window.
pub fn t_pairs() -> Vec<(u64, u64)> {
    rows(T_PAIRS).map(|r| (r[0], r[1])).collect()
}

pub fn s2() -> Vec<Triple> {
    triples(S2)
}

pub fn s3() -> Vec<Triple> {
    triples(S3)
}

pub fn s4() -> Vec<Triple> {
    triples(S4)
}

pub fn omega1() -> Vec<Triple> {
    triples(OMEGA1)
}

/// Survivors for `n <= 300` with smooth windows, after removing `omega`.
pub fn small_n_exceptions() -> Vec<Triple> {
    triples(SMALL_N)
}

pub fn s_le_9() -> Vec<Triple> {
    triples(S_LE_9)
}

/// The ten printed exceptions for `s <= 92`.
pub fn exception_triples() -> Vec<Triple> {
    triples(EXCEPTIONS)
}

/// Printed members of `D_k`, ascending. Empty for `k` not listed.
pub fn dk_printed(k: u64) -> Vec<u64> {
    let mut out: Vec<u64> = rows(DK).filter(|r| r[0] == k).map(|r| r[1]).collect();
    out.sort_unstable();
    out
}

/// Printed Newton polygons.
pub fn polygons() -> Vec<(LaguerreInstance, NewtonPolygon)> {
    POLYGONS
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.splitn(4, ',').collect();
            let num = |s: &str| s.trim().parse::<u64>().expect("numeric fixture field");
            let vertices = f[3]
                .split(';')
                .map(|pt| {
                    let mut it = pt.split_whitespace();
                    let x = num(it.next().expect("x"));
                    let y = num(it.next().expect("y")) as i64;
                    (x, y)
                })
                .collect();
            let inst = LaguerreInstance {
                n: num(f[0]),
                s: num(f[1]),
            };
            (
                inst,
                NewtonPolygon {
                    prime: num(f[2]),
                    vertices,
                },
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;

    #[test]
    fn sizes() {
        assert_eq!(table1().len(), 135);
        assert_eq!(table2().len(), 14);
        assert_eq!(table3().len(), 216);
        assert_eq!(table4().len(), 6);
        assert_eq!(omega().len(), 39);
        assert_eq!(t_pairs().len(), 39);
        assert_eq!(s2().len(), 13);
        assert_eq!(s3().len(), 2);
        assert_eq!(s4().len(), 24);
        assert_eq!(omega1().len(), 38);
        assert_eq!(small_n_exceptions().len(), 8);
        assert_eq!(s_le_9().len(), 2);
        assert_eq!(exception_triples().len(), 10);
        assert_eq!(dk_printed(3).len(), 54);
        assert_eq!(dk_printed(4).len(), 21);
        assert_eq!(dk_printed(5), vec![497, 531, 533, 783, 1275]);
        assert_eq!(dk_printed(8), Vec::<u64>::new());
        assert_eq!(polygons().len(), 7);
    }

    fn rising_gpf(n: u64, k: u64) -> u64 {
        (n..n + k)
            .map(|m| arith::gpf_falling_factorial(m, 1).unwrap())
            .max()
            .unwrap()
    }

    #[test]
    fn t_pairs_lack_large_window_primes() {
        for (n, k) in t_pairs() {
            assert!(n > 4 * k);
            assert!(10 * rising_gpf(n, k) <= 45 * k, "({n},{k})");
        }
    }

    #[test]
    fn rising_window_gpf_beyond_the_exceptional_pairs() {
        let t = t_pairs();
        for k in 2..=40u64 {
            for n in 4 * k + 1..=2000 {
                if !t.contains(&(n, k)) {
                    assert!(100 * rising_gpf(n, k) > 442 * k, "({n},{k})");
                }
            }
        }
    }

    #[test]
    fn falling_windows_differ() {
        // (10,2): 10*9 is 5-smooth, yet 10*11 is not.
        assert!(!t_pairs().contains(&(10, 2)));
        assert_eq!(arith::gpf_falling_factorial(10, 2).unwrap(), 5);
    }

    #[test]
    fn excerpt_lines_are_odd() {
        for line in NAJMAN_EXCERPT.lines().filter(|l| !l.starts_with('#')) {
            assert_eq!(line.trim().parse::<u64>().unwrap() % 2, 1);
        }
    }
}
