//! Slow, independent reference implementations used to cross-check the
//! fast paths.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::newton::Point;

/// Exponent of `p` in `m` by repeated division. `None` for zero.
pub fn direct_valuation(m: &BigInt, p: u64) -> Option<u64> {
    if m.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut m = m.clone();
    let mut e = 0;
    while (&m % &p).is_zero() {
        m /= &p;
        e += 1;
    }
    Some(e)
}

/// `C(n, k)` by Pascal's rule, row by row.
pub fn pascal_binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut row = vec![BigUint::one()];
    for _ in 0..n {
        let mut next = vec![BigUint::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    row.swap_remove(k as usize)
}

/// Greatest prime factor of `n(n-1)...(n-k+1)` by trial division.
pub fn trial_gpf_window(n: u64, k: u64) -> u64 {
    let mut best = 1;
    for mut m in n + 1 - k..=n {
        let mut d = 2;
        while d * d <= m {
            while m % d == 0 {
                best = best.max(d);
                m /= d;
            }
            d += 1;
        }
        if m > 1 {
            best = best.max(m);
        }
    }
    best
}

fn cross(o: Point, a: Point, b: Point) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

/// Lower-hull vertices by checking every point against every chord that
/// spans it. Cubic, but obviously right.
pub fn brute_lower_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    // keep the lowest point at each x
    pts.dedup_by(|b, a| a.0 == b.0);
    let Some(&first) = pts.first() else {
        return Vec::new();
    };
    let last = *pts.last().expect("non-empty");
    pts.iter()
        .copied()
        .filter(|&q| {
            if q == first || q == last {
                return true;
            }
            pts.iter().all(|&a| {
                pts.iter().all(|&b| {
                    // q strictly below the chord a-b whenever a.x < q.x < b.x
                    !(a.0 < q.0 && q.0 < b.0) || cross(a, b, q) < 0
                })
            })
        })
        .collect()
}

/// Degree set by enumerating every subset of segments.
pub fn brute_degree_set(vertices: &[Point]) -> Vec<u64> {
    let mut lengths = Vec::new();
    for w in vertices.windows(2) {
        let dx = w[1].0 - w[0].0;
        let dy = (w[1].1 - w[0].1).unsigned_abs();
        let g = num_integer::gcd(dx, dy);
        lengths.extend(std::iter::repeat_n(dx / g, g as usize));
    }
    let mut out: Vec<u64> = (0u64..1 << lengths.len())
        .map(|mask| {
            lengths
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, l)| l)
                .sum()
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Robust exclusion by trying every way to raise the interior points:
/// each finite interior value goes to any height below the chord or
/// disappears. Exponential; meant for `n <= 8` with small valuations.
pub fn raise_enumeration_excludes(values: &[Option<i64>], k: u64) -> bool {
    let n = values.len() - 1;
    let (y0, yn) = (values[0].expect("endpoint"), values[n].expect("endpoint"));
    let mut choices: Vec<Vec<Option<i64>>> = Vec::with_capacity(n + 1);
    for (x, v) in values.iter().enumerate() {
        if x == 0 || x == n {
            choices.push(vec![*v]);
            continue;
        }
        let mut opts = vec![None];
        if let Some(v) = *v {
            // heights strictly below the chord at x
            let num = y0 * n as i64 + (yn - y0) * x as i64;
            let mut y = v;
            while y * (n as i64) < num {
                opts.push(Some(y));
                y += 1;
            }
        }
        choices.push(opts);
    }
    let mut idx = vec![0usize; n + 1];
    loop {
        let pts: Vec<Point> = (0..=n)
            .filter_map(|x| choices[x][idx[x]].map(|y| (x as u64, y)))
            .collect();
        let hull = brute_lower_hull(&pts);
        if brute_degree_set(&hull).contains(&k) {
            return false;
        }
        let mut i = 0;
        loop {
            if i > n {
                return true;
            }
            idx[i] += 1;
            if idx[i] < choices[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith;

    #[test]
    fn pascal_agrees_with_product_formula() {
        for n in 0..=60 {
            for k in 0..=n + 1 {
                assert_eq!(pascal_binomial(n, k), arith::binomial(n, k));
            }
        }
    }

    #[test]
    fn brute_hull_small_cases() {
        let pts = [(0, 0), (1, 0), (2, 3), (3, 1), (4, 4), (5, 2)];
        // (3,1) lies on the chord from (1,0) to (5,2)
        assert_eq!(brute_lower_hull(&pts), vec![(0, 0), (1, 0), (5, 2)]);
        assert_eq!(brute_degree_set(&[(0, 0), (9, 4)]), vec![0, 9]);
        assert_eq!(brute_degree_set(&[(0, 0), (4, 2)]), vec![0, 2, 4]);
    }

    #[test]
    fn raise_enumeration_examples() {
        // straight edge (0,0)-(6,7): nothing to raise, degrees {0, 6}
        let v: Vec<Option<i64>> = (0..=6).map(|x| Some((7 * x + 5) / 6)).collect();
        assert!(raise_enumeration_excludes(&v, 3));
        let v = vec![Some(0), Some(0), Some(0), Some(2)];
        assert!(!raise_enumeration_excludes(&v, 1));
        assert_eq!(trial_gpf_window(10, 2), 5);
    }
}
