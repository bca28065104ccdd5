//! Newton polygons, Dumas degree sets, Filaseta's test and the
//! perturbation-closed Dumas exclusion.
//!
//! Polygon abscissa `i` carries the coefficient of `x^(n-i)`, so the
//! leading coefficient sits at `x = 0` and the constant term at `x = n`.

use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::arith;
use crate::error::Error;
use crate::polys::{IntegerPolynomial, LaguerreInstance};

pub type Point = (u64, i64);

pub const DEFAULT_DUMAS_BUDGET: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NewtonPolygon {
    pub prime: u64,
    pub vertices: Vec<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub start: Point,
    pub end: Point,
}

impl Edge {
    pub fn run(&self) -> u64 {
        self.end.0 - self.start.0
    }

    pub fn rise(&self) -> i64 {
        self.end.1 - self.start.1
    }

    /// Slope in lowest terms as (numerator, positive denominator).
    pub fn slope(&self) -> (i64, u64) {
        let g = (self.rise().unsigned_abs()).gcd(&self.run());
        (self.rise() / g as i64, self.run() / g)
    }

    /// Number of minimal lattice segments the edge splits into.
    pub fn segments(&self) -> u64 {
        self.rise().unsigned_abs().gcd(&self.run())
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.slope();
        write!(f, "{num}/{den}")
    }
}

impl NewtonPolygon {
    pub fn edges(&self) -> Vec<Edge> {
        self.vertices
            .windows(2)
            .map(|w| Edge {
                start: w[0],
                end: w[1],
            })
            .collect()
    }

    pub fn width(&self) -> u64 {
        self.vertices.last().map_or(0, |v| v.0)
    }

    /// Height of the path at abscissa `x` as (numerator, denominator).
    fn height_at(&self, x: u64) -> (i128, i128) {
        for e in self.edges() {
            if e.start.0 <= x && x <= e.end.0 {
                let run = e.run() as i128;
                let num = e.start.1 as i128 * run + e.rise() as i128 * (x - e.start.0) as i128;
                return (num, run);
            }
        }
        panic!("abscissa {x} outside polygon");
    }

    /// Whether the point lies on or above the polygonal path.
    pub fn point_on_or_above(&self, pt: Point) -> bool {
        let (num, den) = self.height_at(pt.0);
        pt.1 as i128 * den >= num
    }

    /// Whether every vertex of `other` lies on or above this path.
    pub fn is_below(&self, other: &NewtonPolygon) -> bool {
        other.vertices.iter().all(|&v| self.point_on_or_above(v))
    }

    /// Checks the structural invariants: x strictly increasing and
    /// strictly increasing slopes.
    pub fn is_well_formed(&self) -> bool {
        if self.vertices.first().map(|v| v.0) != Some(0) {
            return false;
        }
        let edges = self.edges();
        edges.iter().all(|e| e.run() > 0)
            && edges.windows(2).all(|w| {
                // rise0/run0 < rise1/run1
                (w[0].rise() as i128) * (w[1].run() as i128)
                    < (w[1].rise() as i128) * (w[0].run() as i128)
            })
    }
}

fn cross(o: Point, a: Point, b: Point) -> i128 {
    let (ox, oy) = (o.0 as i128, o.1 as i128);
    (a.0 as i128 - ox) * (b.1 as i128 - oy) - (a.1 as i128 - oy) * (b.0 as i128 - ox)
}

/// Lower convex hull of points with strictly increasing x. Collinear
/// interior points are dropped.
pub fn lower_hull(points: &[Point]) -> Vec<Point> {
    let mut hull: Vec<Point> = Vec::with_capacity(points.len());
    for &pt in points {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], pt) <= 0 {
            hull.pop();
        }
        hull.push(pt);
    }
    hull
}

/// Polygon from valuations listed by abscissa; `None` marks a vanishing
/// coefficient, which sits above everything.
pub fn polygon_from_values(values: &[Option<i64>], p: u64) -> Result<NewtonPolygon, Error> {
    if values.first().copied().flatten().is_none() || values.last().copied().flatten().is_none() {
        return Err(Error::Domain("constant term vanishes".into()));
    }
    let points: Vec<Point> = values
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|y| (i as u64, y)))
        .collect();
    Ok(NewtonPolygon {
        prime: p,
        vertices: lower_hull(&points),
    })
}

/// Newton polygon of `poly` with respect to `p`.
pub fn newton_polygon(poly: &IntegerPolynomial, p: u64) -> Result<NewtonPolygon, Error> {
    polygon_from_values(&polynomial_values(poly, p), p)
}

/// Valuations by abscissa: entry `i` is `nu_p` of the coefficient of `x^(n-i)`.
pub fn polynomial_values(poly: &IntegerPolynomial, p: u64) -> Vec<Option<i64>> {
    poly.coeffs()
        .iter()
        .rev()
        .map(|c| arith::p_adic_valuation(c, p).map(|v| v as i64))
        .collect()
}

fn instance_values(inst: LaguerreInstance, p: u64) -> Vec<Option<i64>> {
    inst.polygon_values(p)
        .into_iter()
        .map(|v| Some(v as i64))
        .collect()
}

/// Polygon of `g_1` for the instance, computed from Legendre sums.
pub fn instance_polygon(inst: LaguerreInstance, p: u64) -> NewtonPolygon {
    polygon_from_values(&instance_values(inst, p), p).expect("g_1 has nonzero endpoints")
}

/// Integer points strictly inside the edge.
pub fn edge_lattice_points(e: &Edge) -> Vec<Point> {
    let g = e.segments();
    let (dx, dy) = (e.run() / g, e.rise() / g as i64);
    (1..g)
        .map(|t| (e.start.0 + t * dx, e.start.1 + t as i64 * dy))
        .collect()
}

/// Subset-sum bitset over `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSet {
    n: u64,
    bits: Vec<u64>,
}

impl DegreeSet {
    fn with_zero(n: u64) -> Self {
        let mut bits = vec![0u64; (n as usize) / 64 + 1];
        bits[0] = 1;
        DegreeSet { n, bits }
    }

    fn add_length(&mut self, len: u64) {
        let (words, shift) = ((len / 64) as usize, (len % 64) as u32);
        for i in (0..self.bits.len()).rev() {
            let mut v = 0;
            if i >= words {
                v = self.bits[i - words] << shift;
                if shift > 0 && i > words {
                    v |= self.bits[i - words - 1] >> (64 - shift);
                }
            }
            self.bits[i] |= v;
        }
        let extra = self.bits.len() as u64 * 64 - (self.n + 1);
        if extra > 0 {
            let last = self.bits.len() - 1;
            self.bits[last] &= u64::MAX >> extra;
        }
    }

    fn add_edge(&mut self, e: &Edge) {
        let g = e.segments();
        let len = e.run() / g;
        for _ in 0..g {
            self.add_length(len);
        }
    }

    pub fn contains(&self, d: u64) -> bool {
        d <= self.n && self.bits[(d / 64) as usize] >> (d % 64) & 1 == 1
    }

    pub fn degrees(&self) -> Vec<u64> {
        (0..=self.n).filter(|&d| self.contains(d)).collect()
    }

    pub fn union(&mut self, other: &DegreeSet) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn max_degree(&self) -> u64 {
        self.n
    }
}

/// Degrees a rational factor can have according to Dumas' theorem.
pub fn dumas_degree_set(np: &NewtonPolygon) -> DegreeSet {
    let mut set = DegreeSet::with_zero(np.width());
    for e in np.edges() {
        set.add_edge(&e);
    }
    set
}

/// Filaseta's test: `p` misses the leading coefficient, divides `c_j` for
/// `j <= n-l-1`, and the rightmost edge has slope below `1/k`.
///
/// True certifies that no unit-endpoint perturbation of `g_1` has a
/// factor with degree in `l+1..=k`.
pub fn filaseta_excludes(inst: LaguerreInstance, p: u64, k: u64, l: u64) -> bool {
    assert!(k > l, "need k > l");
    let n = inst.n;
    if l + 1 > n {
        return false;
    }
    // c_n = 1, so (i) always holds. Check the weakest coefficient first.
    if inst.coeff_valuation(n - l - 1, p) == 0 {
        return false;
    }
    if (0..n - l).any(|j| inst.coeff_valuation(j, p) == 0) {
        return false;
    }
    // The last hull edge has the steepest slope from any point to (n, V).
    let v_end = inst.coeff_valuation(0, p) as i128;
    (0..n).all(|i| {
        let vi = inst.coeff_valuation(n - i, p) as i128;
        (v_end - vi) * (k as i128) < (n - i) as i128
    })
}

/// Budget exhaustion while enumerating achievable polygons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExhausted {
    pub nodes: u64,
}

/// Every polygon reachable by some perturbation is a strictly convex
/// lattice chain between the pinned endpoints whose interior vertices
/// satisfy `v_x <= y` and lie strictly below the endpoint chord.
struct ChainSearch<'a> {
    start: Point,
    end: Point,
    candidates: Vec<Point>,
    budget: u64,
    nodes: u64,
    target: Option<u64>,
    collected: Option<&'a mut Vec<Vec<Point>>>,
}

impl ChainSearch<'_> {
    fn below_line(a: Point, b: Point, q: Point) -> bool {
        // q strictly below the line through a and b (a.x < q.x < b.x)
        cross(a, b, q) < 0 && q.0 < b.0
    }

    /// Returns Ok(true) when the target degree becomes reachable.
    fn descend(
        &mut self,
        cur: Point,
        prev: Option<(i64, u64)>,
        set: &DegreeSet,
        path: &mut Vec<Point>,
    ) -> Result<bool, BudgetExhausted> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(BudgetExhausted { nodes: self.nodes });
        }
        let first = self.candidates.partition_point(|c| c.0 <= cur.0);
        for idx in first..=self.candidates.len() {
            let q = if idx == self.candidates.len() {
                self.end
            } else {
                self.candidates[idx]
            };
            if q != self.end && !Self::below_line(cur, self.end, q) {
                continue;
            }
            let e = Edge { start: cur, end: q };
            if let Some((pr, pd)) = prev {
                // slope(cur, q) > prev
                if (e.rise() as i128) * (pd as i128) <= (pr as i128) * (e.run() as i128) {
                    continue;
                }
            }
            let mut next = set.clone();
            next.add_edge(&e);
            if let Some(k) = self.target {
                if next.contains(k) {
                    return Ok(true);
                }
            }
            path.push(q);
            if q == self.end {
                if let Some(out) = self.collected.as_deref_mut() {
                    out.push(path.clone());
                }
            } else if self.descend(q, Some((e.rise(), e.run())), &next, path)? {
                return Ok(true);
            }
            path.pop();
        }
        Ok(false)
    }
}

fn chain_search(
    values: &[Option<i64>],
    budget: u64,
    target: Option<u64>,
    collected: Option<&mut Vec<Vec<Point>>>,
) -> Result<bool, BudgetExhausted> {
    let n = (values.len() - 1) as u64;
    let y0 = values[0].expect("pinned endpoint");
    let yn = values[n as usize].expect("pinned endpoint");
    let start = (0, y0);
    let end = (n, yn);
    let mut candidates = Vec::new();
    for (x, v) in values.iter().enumerate().take(n as usize).skip(1) {
        let Some(v) = *v else { continue };
        let x = x as u64;
        // y strictly below the chord: (y - y0) n < (yn - y0) x
        let bound = (yn - y0) as i128 * x as i128;
        let mut y = v;
        while ((y - y0) as i128) * (n as i128) < bound {
            candidates.push((x, y));
            y += 1;
        }
    }
    let bits = target.map_or(n, |k| k.min(n));
    let mut search = ChainSearch {
        start,
        end,
        candidates,
        budget,
        nodes: 0,
        target,
        collected,
    };
    let mut path = vec![search.start];
    let set = DegreeSet::with_zero(bits);
    search.descend(start, None, &set, &mut path)
}

/// Whether degree `k` is absent from the Dumas set of every polygon
/// reachable from these valuations by raising interior points.
pub fn robust_exclusion_from_values(
    values: &[Option<i64>],
    k: u64,
    budget: u64,
) -> Result<bool, BudgetExhausted> {
    let n = (values.len() - 1) as u64;
    if k == 0 || k >= n {
        return Ok(false);
    }
    chain_search(values, budget, Some(k), None).map(|hit| !hit)
}

/// Robust Dumas exclusion for `g_1` of the instance with the default budget.
pub fn robust_dumas_excludes(
    inst: LaguerreInstance,
    p: u64,
    k: u64,
) -> Result<bool, BudgetExhausted> {
    robust_dumas_excludes_with(inst, p, k, DEFAULT_DUMAS_BUDGET)
}

pub fn robust_dumas_excludes_with(
    inst: LaguerreInstance,
    p: u64,
    k: u64,
    budget: u64,
) -> Result<bool, BudgetExhausted> {
    robust_exclusion_from_values(&instance_values(inst, p), k, budget)
}

/// All polygons reachable from these valuations by perturbation.
pub fn case_polygons(
    values: &[Option<i64>],
    p: u64,
    budget: u64,
) -> Result<Vec<NewtonPolygon>, BudgetExhausted> {
    let mut paths = Vec::new();
    chain_search(values, budget, None, Some(&mut paths))?;
    let mut out: Vec<NewtonPolygon> = paths
        .into_iter()
        .map(|vertices| NewtonPolygon { prime: p, vertices })
        .collect();
    out.sort();
    Ok(out)
}

pub fn instance_case_polygons(
    inst: LaguerreInstance,
    p: u64,
    budget: u64,
) -> Result<Vec<NewtonPolygon>, BudgetExhausted> {
    case_polygons(&instance_values(inst, p), p, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: u64, s: u64) -> LaguerreInstance {
        LaguerreInstance::new(n, s).unwrap()
    }

    fn poly(vertices: &[Point]) -> NewtonPolygon {
        NewtonPolygon {
            prime: 2,
            vertices: vertices.to_vec(),
        }
    }

    #[test]
    fn polygon_examples() {
        assert_eq!(
            instance_polygon(inst(6, 47), 2).vertices,
            vec![(0, 0), (6, 7)]
        );
        assert_eq!(
            instance_polygon(inst(10, 5), 3).vertices,
            vec![(0, 0), (9, 4), (10, 5)]
        );
        assert_eq!(
            instance_polygon(inst(9, 12), 5).vertices,
            vec![(0, 0), (2, 0), (7, 1), (9, 2)]
        );
    }

    #[test]
    fn bigint_and_legendre_polygons_agree() {
        for (n, s) in [(9, 12), (10, 5), (6, 47), (16, 62), (30, 7)] {
            let g = crate::polys::g1_coefficients(inst(n, s));
            for p in [2, 3, 5, 7, 11, 13] {
                assert_eq!(
                    newton_polygon(&g, p).unwrap(),
                    instance_polygon(inst(n, s), p)
                );
            }
        }
    }

    #[test]
    fn vanishing_constant_term_rejected() {
        let p = IntegerPolynomial::from_i64(&[0, 3, 1]).unwrap();
        assert!(newton_polygon(&p, 3).is_err());
    }

    #[test]
    fn lattice_point_examples() {
        let e = |a: Point, b: Point| Edge { start: a, end: b };
        assert!(edge_lattice_points(&e((0, 0), (6, 7))).is_empty());
        assert_eq!(
            edge_lattice_points(&e((0, 0), (10, 5))),
            vec![(2, 1), (4, 2), (6, 3), (8, 4)]
        );
        assert!(edge_lattice_points(&e((0, 0), (9, 1))).is_empty());
        assert_eq!(
            edge_lattice_points(&e((1, 5), (7, 2))),
            vec![(3, 4), (5, 3)]
        );
    }

    #[test]
    fn degree_set_examples() {
        assert_eq!(
            dumas_degree_set(&poly(&[(0, 0), (6, 7)])).degrees(),
            vec![0, 6]
        );
        assert_eq!(
            dumas_degree_set(&poly(&[(0, 0), (9, 4), (10, 5)])).degrees(),
            vec![0, 1, 9, 10]
        );
        assert_eq!(
            dumas_degree_set(&poly(&[(0, 0), (10, 5)])).degrees(),
            vec![0, 2, 4, 6, 8, 10]
        );
        // crosses word boundaries
        let wide = dumas_degree_set(&poly(&[(0, 0), (70, 1), (200, 3)]));
        assert_eq!(wide.degrees(), vec![0, 65, 70, 130, 135, 200]);
    }

    #[test]
    fn edge_slopes() {
        let e = Edge {
            start: (2, 0),
            end: (7, 1),
        };
        assert_eq!(e.slope(), (1, 5));
        assert_eq!(e.to_string(), "1/5");
        let e = Edge {
            start: (0, 4),
            end: (6, 0),
        };
        assert_eq!(e.to_string(), "-2/3");
    }

    #[test]
    fn filaseta_examples() {
        assert!(filaseta_excludes(inst(9, 12), 13, 3, 1));
        assert!(filaseta_excludes(inst(9, 3), 3, 2, 1));
        assert!(!filaseta_excludes(inst(9, 12), 11, 3, 1));
    }

    #[test]
    fn filaseta_slope_matches_hull() {
        for (n, s) in [(9, 12), (15, 9), (49, 8), (20, 30), (33, 4)] {
            let i = inst(n, s);
            for p in arith::sieve_primes(n + s) {
                let hull = instance_polygon(i, p);
                let last = *hull.edges().last().unwrap();
                for k in 2..=n / 2 {
                    let l = k - 1;
                    let divides = (0..n - l).all(|j| i.coeff_valuation(j, p) > 0);
                    let by_hull =
                        divides && (last.rise() as i128) * (k as i128) < last.run() as i128;
                    assert_eq!(filaseta_excludes(i, p, k, l), by_hull, "{n} {s} {p} {k}");
                }
            }
        }
    }

    #[test]
    fn robust_examples() {
        assert_eq!(robust_dumas_excludes(inst(6, 47), 2, 3), Ok(true));
        assert_eq!(robust_dumas_excludes(inst(10, 5), 3, 5), Ok(true));
        assert_eq!(robust_dumas_excludes(inst(10, 5), 3, 1), Ok(false));
    }

    #[test]
    fn robust_budget_reports_exhaustion() {
        let r = robust_dumas_excludes_with(inst(81, 77), 79, 4, 1);
        assert!(matches!(r, Err(BudgetExhausted { .. })));
    }

    #[test]
    fn case_polygons_for_split_edge() {
        // (10,5) at p = 3: raising (9,4) leaves the single edge to (10,5).
        let cases = instance_case_polygons(inst(10, 5), 3, 1000).unwrap();
        assert!(cases.contains(&NewtonPolygon {
            prime: 3,
            vertices: vec![(0, 0), (10, 5)]
        }));
        assert!(cases.contains(&instance_polygon(inst(10, 5), 3)));
        for c in &cases {
            assert!(c.is_well_formed());
            assert!(instance_polygon(inst(10, 5), 3).is_below(c));
        }
    }

    #[test]
    fn well_formed_and_on_or_above() {
        let np = poly(&[(0, 0), (2, 0), (7, 1), (9, 2)]);
        assert!(np.is_well_formed());
        assert!(np.point_on_or_above((5, 1)));
        assert!(!np.point_on_or_above((8, 1)));
        assert!(!poly(&[(0, 0), (5, 1), (9, 1)]).is_well_formed());
    }
}
