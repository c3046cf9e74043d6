//! Dense univariate polynomials with big-integer coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Coefficients from low to high degree; no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ZPoly(Vec<BigInt>);

impl ZPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPoly(coeffs)
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        ZPoly(Vec::new())
    }

    pub fn one() -> Self {
        ZPoly(vec![BigInt::one()])
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    /// `1 + c t^d`
    pub fn binomial(c: i64, d: usize) -> Self {
        let mut v = vec![BigInt::zero(); d + 1];
        v[0] += 1;
        v[d] += c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_one()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.0.get(i).cloned().unwrap_or_default()
    }

    pub fn lead(&self) -> BigInt {
        self.0.last().cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &ZPoly) -> ZPoly {
        let n = self.0.len().max(o.0.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &ZPoly) -> ZPoly {
        let n = self.0.len().max(o.0.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> ZPoly {
        ZPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ZPoly::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> ZPoly {
        ZPoly::new(self.0.iter().map(|a| a * c).collect())
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_scalar(&self, c: &BigInt) -> ZPoly {
        ZPoly(self.0.iter().map(|a| a / c).collect())
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive_part(&self) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut g = self.content();
        if self.lead().is_negative() {
            g = -g;
        }
        self.div_scalar(&g)
    }

    /// Pseudo-remainder of `self` by `d`; `lead(d)^k * self = q d + r`.
    pub fn pseudo_rem(&self, d: &ZPoly) -> ZPoly {
        assert!(!d.is_zero());
        let dd = d.degree().unwrap();
        let ld = d.lead();
        let mut r = self.clone();
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let lr = r.lead();
            let shift = rd - dd;
            let mut next: Vec<BigInt> = r.0.iter().map(|c| c * &ld).collect();
            for (i, c) in d.0.iter().enumerate() {
                next[i + shift] -= c * &lr;
            }
            r = ZPoly::new(next);
        }
        r
    }

    /// Exact quotient `self / d` over the integers, if it exists.
    pub fn exact_div(&self, d: &ZPoly) -> Option<ZPoly> {
        assert!(!d.is_zero());
        let dd = d.degree().unwrap();
        let ld = d.lead();
        let mut r = self.0.clone();
        let Some(sd) = self.degree() else {
            return Some(ZPoly::zero());
        };
        if sd < dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); sd - dd + 1];
        for k in (0..=sd - dd).rev() {
            let c = &r[k + dd];
            if c.is_zero() {
                continue;
            }
            let (qk, rem) = c.div_rem(&ld);
            if !rem.is_zero() {
                return None;
            }
            for (i, dc) in d.0.iter().enumerate() {
                r[k + i] -= &qk * dc;
            }
            q[k] = qk;
        }
        r.iter().all(|c| c.is_zero()).then(|| ZPoly::new(q))
    }

    /// Greatest common divisor over `Q[t]`, returned primitive with positive lead.
    pub fn gcd(&self, o: &ZPoly) -> ZPoly {
        let mut a = self.primitive_part();
        let mut b = o.primitive_part();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    /// `p(c t)` for an integer `c`.
    pub fn substitute_scaled(&self, c: i64) -> ZPoly {
        let c = BigInt::from(c);
        let mut pw = BigInt::one();
        let mut out = Vec::with_capacity(self.0.len());
        for a in &self.0 {
            out.push(a * &pw);
            pw *= &c;
        }
        ZPoly::new(out)
    }

    /// `p(t^k)`.
    pub fn substitute_power(&self, k: usize) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![BigInt::zero(); (self.0.len() - 1) * k + 1];
        for (i, a) in self.0.iter().enumerate() {
            out[i * k] = a.clone();
        }
        ZPoly::new(out)
    }

    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.0.iter().map(|c| i64::try_from(c).ok()).collect()
    }
}

impl fmt::Debug for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "t")?,
                (1, false) => write!(f, "{mag}t")?,
                (_, true) => write!(f, "t^{i}")?,
                (_, false) => write!(f, "{mag}t^{i}")?,
            }
        }
        Ok(())
    }
}
