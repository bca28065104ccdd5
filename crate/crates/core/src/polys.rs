//! Laguerre-derived polynomials `g_1`, their perturbations, and a
//! Kronecker brute-force factor finder used as an independent oracle.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Factorization};
use crate::error::Error;

/// The pair `(n, s)`; the Laguerre parameter is `-n-s-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LaguerreInstance {
    pub n: u64,
    pub s: u64,
}

impl LaguerreInstance {
    pub fn new(n: u64, s: u64) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::Domain("degree n must be positive".into()));
        }
        Ok(LaguerreInstance { n, s })
    }

    /// `nu_p(c_j)` where `c_j = n!/j! * C(n+s-j, n-j)`.
    pub fn coeff_valuation(&self, j: u64, p: u64) -> u64 {
        let (n, s) = (self.n, self.s);
        let f = |m| arith::valuation_of_factorial(m, p);
        f(n) + f(n + s - j) - f(j) - f(n - j) - f(s)
    }

    /// Valuation points `(i, nu_p(c_{n-i}))` listed by `i = 0..=n`.
    pub fn polygon_values(&self, p: u64) -> Vec<u64> {
        (0..=self.n)
            .map(|i| self.coeff_valuation(self.n - i, p))
            .collect()
    }
}

/// Dense integer polynomial; `coeffs[j]` multiplies `x^j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegerPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntegerPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self, Error> {
        while coeffs.len() > 1 && coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() || coeffs.last().is_some_and(Zero::is_zero) {
            return Err(Error::Invariant(
                "polynomial has no nonzero coefficient".into(),
            ));
        }
        Ok(IntegerPolynomial { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, Error> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("nonempty by construction")
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Quotient by a monic divisor, or `None` when the remainder is nonzero.
    pub fn div_exact_monic(&self, d: &IntegerPolynomial) -> Option<IntegerPolynomial> {
        assert!(d.leading().is_one(), "divisor must be monic");
        let dd = d.degree();
        if dd > self.degree() {
            return None;
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.degree() - dd + 1];
        for i in (0..quot.len()).rev() {
            let q = rem[i + dd].clone();
            if q.is_zero() {
                continue;
            }
            for (j, c) in d.coeffs.iter().enumerate() {
                rem[i + j] -= &q * c;
            }
            quot[i] = q;
        }
        if rem[..dd].iter().all(Zero::is_zero) {
            IntegerPolynomial::new(quot).ok()
        } else {
            None
        }
    }
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            match (j, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{j}")?,
                (_, false) => write!(f, "{mag}x^{j}")?,
            }
        }
        Ok(())
    }
}

/// Multipliers `b_0..b_n` with unit endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationVector {
    b: Vec<BigInt>,
}

impl PerturbationVector {
    pub fn new(b: Vec<BigInt>) -> Result<Self, Error> {
        let unit = |x: Option<&BigInt>| x.is_some_and(|v| v.abs().is_one());
        if b.len() < 2 || !unit(b.first()) || !unit(b.last()) {
            return Err(Error::Invariant(
                "perturbation endpoints must be +1 or -1".into(),
            ));
        }
        Ok(PerturbationVector { b })
    }

    pub fn ones(n: usize) -> Self {
        PerturbationVector {
            b: vec![BigInt::one(); n + 1],
        }
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.b
    }
}

/// `a_j = C(n+s-j, n-j)`.
pub fn coeff_a(inst: LaguerreInstance, j: u64) -> Result<BigUint, Error> {
    if j > inst.n {
        return Err(Error::Domain(format!("index {j} outside 0..={}", inst.n)));
    }
    Ok(arith::binomial(inst.n + inst.s - j, inst.n - j))
}

/// Monic integer form `g_1 = n! g`, with `c_j = n!/j! * a_j`.
pub fn g1_coefficients(inst: LaguerreInstance) -> IntegerPolynomial {
    let (n, s) = (inst.n, inst.s);
    let mut coeffs = vec![BigUint::zero(); n as usize + 1];
    coeffs[n as usize] = BigUint::one();
    // c_j = c_{j+1} (j+1) (n+s-j) / (n-j), an exact division.
    for j in (0..n).rev() {
        let next = &coeffs[j as usize + 1] * (j + 1) * (n + s - j);
        coeffs[j as usize] = next / (n - j);
    }
    IntegerPolynomial {
        coeffs: coeffs.into_iter().map(BigInt::from).collect(),
    }
}

/// Coefficient-wise product with `b`.
pub fn perturb(g1: &IntegerPolynomial, b: &PerturbationVector) -> Result<IntegerPolynomial, Error> {
    if g1.coeffs.len() != b.b.len() {
        return Err(Error::Invariant(format!(
            "perturbation has {} entries for a degree-{} polynomial",
            b.b.len(),
            g1.degree()
        )));
    }
    let coeffs = g1.coeffs.iter().zip(&b.b).map(|(c, m)| c * m).collect();
    IntegerPolynomial::new(coeffs)
}

const KRONECKER_MAX_DEGREE: usize = 12;
const KRONECKER_MAX_FACTOR: usize = 3;
const KRONECKER_SPAN: i64 = 40;
const KRONECKER_CHECKS: usize = 6;

struct SamplePoint {
    x: BigInt,
    value: BigInt,
    factors: Option<Factorization>,
}

/// All monic divisors of `poly` with degree in `1..=k` (and below the
/// degree of `poly`), found by Kronecker interpolation.
///
/// Requires a unit leading coefficient, degree at most 12 and `k <= 3`.
pub fn kronecker_factor_oracle(
    poly: &IntegerPolynomial,
    k: usize,
) -> Result<Vec<IntegerPolynomial>, Error> {
    if poly.degree() > KRONECKER_MAX_DEGREE || k > KRONECKER_MAX_FACTOR {
        return Err(Error::OracleNotApplicable(format!(
            "degree {} with factor bound {k}; limits are {KRONECKER_MAX_DEGREE} and {KRONECKER_MAX_FACTOR}",
            poly.degree()
        )));
    }
    if !poly.leading().abs().is_one() {
        return Err(Error::OracleNotApplicable(
            "leading coefficient must be +1 or -1".into(),
        ));
    }
    let poly = if poly.leading().is_negative() {
        IntegerPolynomial::new(poly.coeffs.iter().map(|c| -c).collect())?
    } else {
        poly.clone()
    };

    let mut points: Vec<SamplePoint> = (0..=2 * KRONECKER_SPAN)
        .map(|i| {
            // 0, 1, -1, 2, -2, ...
            let x = if i % 2 == 1 { (i + 1) / 2 } else { -(i / 2) };
            let x = BigInt::from(x);
            let value = poly.eval(&x);
            SamplePoint {
                x,
                value,
                factors: None,
            }
        })
        .collect();
    let mut found = Vec::new();
    // Integer roots show up directly.
    for pt in points.iter().filter(|pt| pt.value.is_zero()) {
        found.push(IntegerPolynomial::new(vec![-pt.x.clone(), BigInt::one()])?);
    }
    points.retain(|pt| !pt.value.is_zero());
    for pt in &mut points {
        pt.factors = if pt.value.abs().is_one() {
            Some(Factorization {
                value: BigUint::one(),
                factors: vec![],
            })
        } else {
            arith::factorize_bounded(pt.value.magnitude(), 80)
        };
    }
    points.retain(|pt| pt.factors.is_some());
    points.sort_by_key(|pt| pt.factors.as_ref().map(|f| f.divisor_count()));

    let top = k.min(poly.degree().saturating_sub(1));
    for d in 1..=top {
        if points.len() < d + 1 {
            return Err(Error::OracleNotApplicable(
                "too few factorable sample points".into(),
            ));
        }
        let (interp, checks) = points.split_at(d);
        let checks = &checks[..checks.len().min(KRONECKER_CHECKS)];
        let choices: Vec<Vec<BigInt>> = interp
            .iter()
            .map(|pt| {
                let divs = pt.factors.as_ref().expect("retained").divisors();
                divs.into_iter()
                    .flat_map(|v| {
                        let v = BigInt::from(v);
                        [v.clone(), -v]
                    })
                    .collect()
            })
            .collect();
        let xs: Vec<BigInt> = interp.iter().map(|pt| pt.x.clone()).collect();
        let mut chosen = Vec::with_capacity(d);
        search_divisors(&poly, d, &xs, &choices, checks, &mut chosen, &mut found);
    }
    found.sort_by(|a, b| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.coeffs.iter().rev().cmp(b.coeffs.iter().rev()))
    });
    found.dedup();
    found.retain(|f| f.degree() <= top);
    Ok(found)
}

/// Newton divided differences of `(xs[i], ys[i])`; `None` if any is not
/// an integer, which rules out an integer interpolant.
fn integer_divided_differences(xs: &[BigInt], ys: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut table = ys.to_vec();
    let mut out = vec![table[0].clone()];
    for level in 1..xs.len() {
        for i in (level..xs.len()).rev() {
            let num = &table[i] - &table[i - 1];
            let den = &xs[i] - &xs[i - level];
            let (q, r) = num.div_rem(&den);
            if !r.is_zero() {
                return None;
            }
            table[i] = q;
        }
        out.push(table[level].clone());
    }
    Some(out)
}

fn search_divisors(
    poly: &IntegerPolynomial,
    d: usize,
    xs: &[BigInt],
    choices: &[Vec<BigInt>],
    checks: &[SamplePoint],
    chosen: &mut Vec<BigInt>,
    found: &mut Vec<IntegerPolynomial>,
) {
    let level = chosen.len();
    // Targets for the lower part q = h - x^d.
    let targets: Vec<BigInt> = chosen
        .iter()
        .zip(xs)
        .map(|(e, x)| e - x.pow(d as u32))
        .collect();
    if level > 1 && integer_divided_differences(&xs[..level], &targets).is_none() {
        return;
    }
    if level == d {
        let Some(dd) = integer_divided_differences(xs, &targets) else {
            return;
        };
        // Expand the Newton form into monomial coefficients.
        let mut q = vec![BigInt::zero(); d];
        let mut basis = vec![BigInt::one()];
        for (i, c) in dd.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                q[j] += c * b;
            }
            if i + 1 < d {
                let mut next = vec![BigInt::zero(); basis.len() + 1];
                for (j, b) in basis.iter().enumerate() {
                    next[j + 1] += b;
                    next[j] -= b * &xs[i];
                }
                basis = next;
            }
        }
        q.push(BigInt::one());
        let h = IntegerPolynomial { coeffs: q };
        for pt in checks {
            let hv = h.eval(&pt.x);
            if hv.is_zero() || !(&pt.value % &hv).is_zero() {
                return;
            }
        }
        if poly.div_exact_monic(&h).is_some() {
            found.push(h);
        }
        return;
    }
    for e in &choices[level] {
        chosen.push(e.clone());
        search_divisors(poly, d, xs, choices, checks, chosen, found);
        chosen.pop();
    }
}

/// Decimal strings for JSON output.
pub fn coeff_strings(poly: &IntegerPolynomial) -> Vec<String> {
    poly.coeffs.iter().map(|c| c.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: u64, s: u64) -> LaguerreInstance {
        LaguerreInstance::new(n, s).unwrap()
    }

    #[test]
    fn coeff_a_examples() {
        assert_eq!(coeff_a(inst(7, 3), 7).unwrap(), BigUint::one());
        assert_eq!(coeff_a(inst(9, 12), 0).unwrap(), BigUint::from(293930u32));
        assert_eq!(coeff_a(inst(10, 4), 0).unwrap(), BigUint::from(1001u32));
        assert!(coeff_a(inst(3, 1), 4).is_err());
    }

    #[test]
    fn g1_examples() {
        let g = g1_coefficients(inst(9, 12));
        assert_eq!(g.coeffs()[8], BigInt::from(117));
        assert_eq!(g.coeffs()[9], BigInt::one());
        let c0 = &g.coeffs()[0];
        assert_eq!(arith::p_adic_valuation(c0, 2), Some(8));
        assert_eq!(arith::p_adic_valuation(c0, 3), Some(4));
        assert_eq!(arith::p_adic_valuation(c0, 5), Some(2));
        // 2^8 3^4 5^2 7^2 13 17 19
        let expect: u64 = 256 * 81 * 25 * 49 * 13 * 17 * 19;
        assert_eq!(*c0, BigInt::from(expect));
    }

    #[test]
    fn g1_matches_definition() {
        for n in 1..=30u64 {
            for s in 0..=30u64 {
                let i = inst(n, s);
                let g = g1_coefficients(i);
                for j in 0..=n {
                    let direct = arith::factorial(n) / arith::factorial(j) * coeff_a(i, j).unwrap();
                    assert_eq!(g.coeffs()[j as usize], BigInt::from(direct));
                    for p in [2, 3, 5, 7, 11, 13] {
                        assert_eq!(
                            arith::p_adic_valuation(&g.coeffs()[j as usize], p),
                            Some(i.coeff_valuation(j, p))
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn g1_endpoints() {
        for (n, s) in [(1, 0), (5, 9), (92, 92), (40, 3)] {
            let g = g1_coefficients(inst(n, s));
            assert!(g.leading().is_one());
            let c0 = BigInt::from(arith::factorial(n) * arith::binomial(n + s, n));
            assert_eq!(g.coeffs()[0], c0);
        }
    }

    #[test]
    fn perturb_examples() {
        let g = g1_coefficients(inst(10, 5));
        assert_eq!(perturb(&g, &PerturbationVector::ones(10)).unwrap(), g);

        let mut b = vec![BigInt::one(); 11];
        b[9] = BigInt::from(3);
        let pg = perturb(&g, &PerturbationVector::new(b).unwrap()).unwrap();
        let before = arith::p_adic_valuation(&g.coeffs()[9], 3).unwrap();
        assert_eq!(
            arith::p_adic_valuation(&pg.coeffs()[9], 3),
            Some(before + 1)
        );

        let alt: Vec<BigInt> = (0..11)
            .map(|j| BigInt::from(if j % 2 == 0 { 1 } else { -1 }))
            .collect();
        let pg = perturb(&g, &PerturbationVector::new(alt).unwrap()).unwrap();
        for (a, b) in g.coeffs().iter().zip(pg.coeffs()) {
            assert_eq!(arith::p_adic_valuation(a, 3), arith::p_adic_valuation(b, 3));
        }

        assert!(PerturbationVector::new(vec![BigInt::from(2), BigInt::one()]).is_err());
        let short = PerturbationVector::ones(3);
        assert!(perturb(&g, &short).is_err());
    }

    #[test]
    fn display() {
        let p = IntegerPolynomial::from_i64(&[-1, 0, 1]).unwrap();
        assert_eq!(p.to_string(), "x^2 - 1");
        let p = IntegerPolynomial::from_i64(&[3, -2, 0, -1]).unwrap();
        assert_eq!(p.to_string(), "-x^3 - 2x + 3");
    }

    #[test]
    fn kronecker_difference_of_squares() {
        let p = IntegerPolynomial::from_i64(&[-1, 0, 1]).unwrap();
        let f = kronecker_factor_oracle(&p, 2).unwrap();
        assert_eq!(
            f,
            vec![
                IntegerPolynomial::from_i64(&[-1, 1]).unwrap(),
                IntegerPolynomial::from_i64(&[1, 1]).unwrap()
            ]
        );
    }

    #[test]
    fn kronecker_finds_hidden_factors() {
        // (x^2 + 3x + 7)(x^3 - 5x + 11)(x^4 + 2)
        let a = IntegerPolynomial::from_i64(&[7, 3, 1]).unwrap();
        let b = IntegerPolynomial::from_i64(&[11, -5, 0, 1]).unwrap();
        let c = IntegerPolynomial::from_i64(&[2, 0, 0, 0, 1]).unwrap();
        let mul = |p: &IntegerPolynomial, q: &IntegerPolynomial| {
            let mut out = vec![BigInt::zero(); p.degree() + q.degree() + 1];
            for (i, x) in p.coeffs().iter().enumerate() {
                for (j, y) in q.coeffs().iter().enumerate() {
                    out[i + j] += x * y;
                }
            }
            IntegerPolynomial::new(out).unwrap()
        };
        let prod = mul(&mul(&a, &b), &c);
        let f = kronecker_factor_oracle(&prod, 3).unwrap();
        assert_eq!(f, vec![a, b]);
    }

    #[test]
    fn kronecker_on_laguerre_instances() {
        let g = g1_coefficients(inst(10, 4));
        assert!(kronecker_factor_oracle(&g, 3).unwrap().is_empty());
        let g = g1_coefficients(inst(6, 47));
        assert!(kronecker_factor_oracle(&g, 3).unwrap().is_empty());
    }

    #[test]
    fn kronecker_limits() {
        let g = g1_coefficients(inst(13, 1));
        assert!(matches!(
            kronecker_factor_oracle(&g, 2),
            Err(Error::OracleNotApplicable(_))
        ));
        let g = g1_coefficients(inst(8, 1));
        assert!(matches!(
            kronecker_factor_oracle(&g, 4),
            Err(Error::OracleNotApplicable(_))
        ));
        let p = IntegerPolynomial::from_i64(&[1, 0, 2]).unwrap();
        assert!(kronecker_factor_oracle(&p, 1).is_err());
    }
}
