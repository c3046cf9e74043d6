//! Exact arithmetic in `Z[x]/(Phi_m)` and roots of unity named by (order, exponent).

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

/// The root of unity `exp(2 pi i * exponent / order)`, with `gcd(exponent, order) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub order: u32,
    pub exponent: u32,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { order: 1, exponent: 0 };

    /// `exp(2 pi i * j / m)` reduced to lowest terms.
    pub fn new(j: u64, m: u64) -> Self {
        assert!(m > 0);
        let j = j % m;
        let g = j.gcd(&m);
        RootOfUnity { order: (m / g) as u32, exponent: (j / g) as u32 }
    }

    pub fn is_one(&self) -> bool {
        self.order == 1
    }

    pub fn mul(&self, o: &RootOfUnity) -> RootOfUnity {
        let m = (self.order as u64).lcm(&(o.order as u64));
        let j = self.exponent as u64 * (m / self.order as u64) + o.exponent as u64 * (m / o.order as u64);
        RootOfUnity::new(j, m)
    }

    pub fn pow(&self, k: u64) -> RootOfUnity {
        RootOfUnity::new(self.exponent as u64 * k, self.order as u64)
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.order, self.exponent) {
            (1, _) => write!(f, "1"),
            (2, _) => write!(f, "-1"),
            (m, j) => write!(f, "exp(2πi·{j}/{m})"),
        }
    }
}

/// Integer coefficients of the `m`-th cyclotomic polynomial, low degree first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<i64> {
    assert!(m > 0);
    // Phi_m = (x^m - 1) / prod_{d | m, d < m} Phi_d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = div_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn div_monic(a: &[i64], b: &[i64]) -> Vec<i64> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i64; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db];
        q[k] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[k + i] -= c * bc;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// Euler's totient.
pub fn totient(m: u64) -> u64 {
    (1..=m).filter(|k| k.gcd(&m) == 1).count() as u64
}

/// The ring `Z[x]/(Phi_m(x))`, elements stored as coefficient vectors of length `phi(m)`.
#[derive(Clone, Debug)]
pub struct CyclotomicRing {
    m: u64,
    modulus: Vec<i64>,
}

pub type CyclotomicElement = Vec<i128>;

impl CyclotomicRing {
    pub fn new(m: u64) -> Self {
        CyclotomicRing { m, modulus: cyclotomic_polynomial(m) }
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn zero(&self) -> CyclotomicElement {
        vec![0; self.dim()]
    }

    pub fn from_int(&self, c: i128) -> CyclotomicElement {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    /// `x^j`, a root of unity of order dividing `m`.
    pub fn root(&self, j: u64) -> CyclotomicElement {
        let mut v = vec![0i128; self.m as usize];
        v[(j % self.m) as usize] = 1;
        self.reduce(v)
    }

    /// The element for a root of unity whose order divides `m`.
    pub fn embed(&self, z: RootOfUnity) -> CyclotomicElement {
        assert_eq!(self.m % z.order as u64, 0, "root order must divide the conductor");
        self.root(z.exponent as u64 * (self.m / z.order as u64))
    }

    fn reduce(&self, mut v: Vec<i128>) -> CyclotomicElement {
        let d = self.dim();
        for k in (d..v.len()).rev() {
            let c = v[k];
            if c != 0 {
                for (i, &mc) in self.modulus.iter().enumerate() {
                    v[k - d + i] -= c * mc as i128;
                }
            }
        }
        v.truncate(d.max(1));
        v.resize(d, 0);
        v
    }

    pub fn add(&self, a: &CyclotomicElement, b: &CyclotomicElement) -> CyclotomicElement {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn sub(&self, a: &CyclotomicElement, b: &CyclotomicElement) -> CyclotomicElement {
        a.iter().zip(b).map(|(x, y)| x - y).collect()
    }

    pub fn mul(&self, a: &CyclotomicElement, b: &CyclotomicElement) -> CyclotomicElement {
        let d = self.dim();
        let mut out = vec![0i128; 2 * d.max(1)];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        self.reduce(out)
    }

    pub fn is_zero(&self, a: &CyclotomicElement) -> bool {
        a.iter().all(|&x| x == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(2), vec![1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn sum_of_primitive_cube_roots_is_minus_one() {
        let r = CyclotomicRing::new(3);
        let s = r.add(&r.root(1), &r.root(2));
        assert_eq!(s, r.from_int(-1));
        assert_eq!(r.mul(&r.root(1), &r.root(2)), r.from_int(1));
    }

    #[test]
    fn roots_of_unity_multiply() {
        let w = RootOfUnity::new(1, 3);
        assert_eq!(w.mul(&w).mul(&w), RootOfUnity::ONE);
        assert_eq!(RootOfUnity::new(2, 4), RootOfUnity { order: 2, exponent: 1 });
        assert_eq!(RootOfUnity::new(1, 4).pow(2).to_string(), "-1");
    }
}
