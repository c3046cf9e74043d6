//! Exact rational functions in one variable, used as Poincaré and Molien series.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::ZPoly;

/// A rational function `numerator / denominator` with a nonvanishing
/// constant term in the denominator, stored in lowest terms: the two
/// polynomials are coprime over `Q[t]`, their joint integer content is 1
/// and the denominator's constant term is positive. The representation is
/// canonical, so structural equality is equality of rational functions.
///
/// For series with integer expansion (all dimension series) the constant
/// term of the denominator is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PoincareSeries {
    numerator: ZPoly,
    denominator: ZPoly,
}

impl PoincareSeries {
    pub fn new(numerator: ZPoly, denominator: ZPoly) -> Result<Self> {
        if denominator.coeff(0).is_zero() {
            return Err(Error::InvalidInput("denominator must have a nonzero constant term".into()));
        }
        Ok(Self::normalized(numerator, denominator))
    }

    fn normalized(numerator: ZPoly, denominator: ZPoly) -> Self {
        if numerator.is_zero() {
            return PoincareSeries { numerator, denominator: ZPoly::one() };
        }
        let g = numerator.gcd(&denominator);
        let (mut n, mut d) = if g.degree().unwrap_or(0) > 0 {
            (
                numerator.exact_div(&g).expect("gcd divides numerator"),
                denominator.exact_div(&g).expect("gcd divides denominator"),
            )
        } else {
            (numerator, denominator)
        };
        let c = n.content().gcd(&d.content());
        if !c.is_one() {
            n = n.div_scalar(&c);
            d = d.div_scalar(&c);
        }
        if d.coeff(0).is_negative() {
            n = n.neg();
            d = d.neg();
        }
        PoincareSeries { numerator: n, denominator: d }
    }

    pub fn one() -> Self {
        PoincareSeries { numerator: ZPoly::one(), denominator: ZPoly::one() }
    }

    pub fn zero() -> Self {
        PoincareSeries { numerator: ZPoly::zero(), denominator: ZPoly::one() }
    }

    pub fn from_poly(p: ZPoly) -> Self {
        Self::normalized(p, ZPoly::one())
    }

    /// `1 / p`
    pub fn reciprocal_of(p: ZPoly) -> Result<Self> {
        Self::new(ZPoly::one(), p)
    }

    /// `prod_i 1/(1 - t^{d_i})`
    pub fn from_degrees(degrees: &[u32]) -> Self {
        let den = degrees.iter().fold(ZPoly::one(), |acc, &d| acc.mul(&ZPoly::binomial(-1, d as usize)));
        Self::normalized(ZPoly::one(), den)
    }

    pub fn numerator(&self) -> &ZPoly {
        &self.numerator
    }

    pub fn denominator(&self) -> &ZPoly {
        &self.denominator
    }

    pub fn is_one(&self) -> bool {
        self.numerator.is_one() && self.denominator.is_one()
    }

    pub fn add(&self, o: &Self) -> Self {
        let g = self.denominator.gcd(&o.denominator);
        let a = self.denominator.exact_div(&g).expect("gcd divides");
        let b = o.denominator.exact_div(&g).expect("gcd divides");
        let num = self.numerator.mul(&b).add(&o.numerator.mul(&a));
        Self::normalized(num, a.mul(&o.denominator))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::normalized(self.numerator.mul(&o.numerator), self.denominator.mul(&o.denominator))
    }

    pub fn mul_poly(&self, p: &ZPoly) -> Self {
        Self::normalized(self.numerator.mul(p), self.denominator.clone())
    }

    /// Multiply by the rational number `num / den`.
    pub fn scale(&self, num: &BigInt, den: &BigInt) -> Self {
        assert!(!den.is_zero());
        Self::normalized(self.numerator.scale(num), self.denominator.scale(den))
    }

    /// `f(t^k)`
    pub fn substitute_power(&self, k: usize) -> Self {
        Self::normalized(self.numerator.substitute_power(k), self.denominator.substitute_power(k))
    }

    /// `f(c t)` for an integer `c`.
    pub fn substitute_scaled(&self, c: i64) -> Self {
        Self::normalized(self.numerator.substitute_scaled(c), self.denominator.substitute_scaled(c))
    }

    /// Power-series coefficients of degrees `0..=n`; fails if any is not an integer.
    pub fn expand(&self, n: usize) -> Result<Vec<BigInt>> {
        let d0 = self.denominator.coeff(0);
        let dcoeffs = self.denominator.coeffs();
        let mut out: Vec<BigInt> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.numerator.coeff(k);
            for j in 1..dcoeffs.len().min(k + 1) {
                if !dcoeffs[j].is_zero() {
                    acc -= &dcoeffs[j] * &out[k - j];
                }
            }
            let (q, r) = acc.div_rem(&d0);
            if !r.is_zero() {
                return Err(Error::NonIntegralSeries);
            }
            out.push(q);
        }
        Ok(out)
    }

    /// Expansion as machine integers; fails on overflow or negative-free violations.
    pub fn expand_i64(&self, n: usize) -> Result<Vec<i64>> {
        self.expand(n)?
            .into_iter()
            .map(|c| i64::try_from(&c).map_err(|_| Error::Overflow("series coefficient")))
            .collect()
    }

    /// Whether every coefficient through degree `n` is nonnegative.
    pub fn is_nonnegative_through(&self, n: usize) -> Result<bool> {
        Ok(self.expand(n)?.iter().all(|c| !c.is_negative()))
    }
}

impl fmt::Debug for PoincareSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PoincareSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denominator.is_one() {
            return write!(f, "{}", self.numerator);
        }
        let wrap = |p: &ZPoly| {
            if p.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                format!("({p})")
            } else {
                p.to_string()
            }
        };
        write!(f, "{}/{}", wrap(&self.numerator), wrap(&self.denominator))
    }
}

fn serialize_poly<S: Serializer>(p: &ZPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(p.coeffs().len()))?;
    for c in p.coeffs() {
        match i64::try_from(c) {
            Ok(x) => seq.serialize_element(&x)?,
            Err(_) => seq.serialize_element(&c.to_string())?,
        }
    }
    seq.end()
}

impl Serialize for PoincareSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct P<'a>(&'a ZPoly);
        impl Serialize for P<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_poly(self.0, s)
            }
        }
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PoincareSeries", 2)?;
        st.serialize_field("denominator", &P(&self.denominator))?;
        st.serialize_field("numerator", &P(&self.numerator))?;
        st.end()
    }
}
