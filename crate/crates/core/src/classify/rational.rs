use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{CmcError, Result};

/// Univariate polynomial with exact rational coefficients, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        self + &(-rhs)
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::new(Vec::new());
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::new(out)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("({c}) x"),
                _ => format!("({c}) x^{k}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `P(x) = 4 a6 [g^2/(4b) + x g - c^2/b] - (g + 4c)^2 (1 - x)` with
/// `g = a6 + b - b x`, the difference of the two expressions for
/// `16(H^2 + tau^2) ||grad nu||^2` in `x = nu^2`. Returns `P` and its `x^3`
/// coefficient, which equals `b^2`.
pub fn leading_coefficient_check(
    a6: &BigRational,
    b: &BigRational,
    c: &BigRational,
) -> Result<(RationalPoly, BigRational)> {
    if b.is_zero() {
        return Err(CmcError::DegenerateB);
    }
    if a6.is_zero() {
        return Err(CmcError::DegenerateA);
    }
    let x = RationalPoly::x();
    let one = RationalPoly::constant(int(1));
    let g = RationalPoly::new(vec![a6 + b, -b.clone()]);
    let bracket = &(&(&g * &g).scale(&(int(1) / (int(4) * b))) + &(&x * &g)) - &RationalPoly::constant(c * c / b);
    let lhs = bracket.scale(&(int(4) * a6));
    let g4c = &g + &RationalPoly::constant(int(4) * c);
    let rhs = &(&g4c * &g4c) * &(&one - &x);
    let p = &lhs - &rhs;
    let lead = p.coeff(3);
    debug_assert_eq!(lead, b * b);
    Ok((p, lead))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn leading_coefficient_examples() {
        let (p, lead) = leading_coefficient_check(&int(4), &int(-1), &int(1)).unwrap();
        assert_eq!(lead, int(1));
        assert_eq!(p.degree(), Some(3));
        let (_, lead0) = leading_coefficient_check(&int(4), &int(-1), &int(0)).unwrap();
        assert_eq!(lead0, lead);
        assert_eq!(leading_coefficient_check(&int(4), &int(0), &int(1)), Err(CmcError::DegenerateB));
    }

    #[test]
    fn polynomial_matches_pointwise_evaluation() {
        let (a6, b, c) = (r(7, 3), r(-5, 2), r(1, 7));
        let (p, _) = leading_coefficient_check(&a6, &b, &c).unwrap();
        for xn in [-3, 0, 1, 5] {
            let x = r(xn, 4);
            let g = &a6 + &b - &b * &x;
            let direct = int(4) * &a6 * (&g * &g / (int(4) * &b) + &x * &g - &c * &c / &b)
                - (&g + int(4) * &c) * (&g + int(4) * &c) * (int(1) - &x);
            assert_eq!(p.eval(&x), direct);
        }
    }

    #[test]
    fn arithmetic_and_display() {
        let x = RationalPoly::x();
        let p = &(&x * &x) - &RationalPoly::constant(int(1));
        assert_eq!(p.eval(&int(1)), int(0));
        assert_eq!(p.degree(), Some(2));
        assert_eq!(format!("{p}"), "-1 + (1) x^2");
        assert!((&p - &p).is_zero());
    }
}
