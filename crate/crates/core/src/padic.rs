//! Units of `Z_l` at finite precision `l^k`.
//!
//! Provides multiplicative orders, Teichmüller lifts, the untwisting
//! factorization `q = zeta * q'` with `q' = 1 mod l`, valuations of `q' - 1`,
//! and closed-subgroup comparisons and membership tests.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 8;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

pub(crate) fn pow_mod(mut a: u64, mut e: u64, n: u64) -> u64 {
    let mut r = 1 % n;
    a %= n;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, n);
        }
        a = mul_mod(a, a, n);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, n: u64) -> Option<u64> {
    crate::matrix::mod_inverse(a as i128, n as i128).map(|x| x as u64)
}

fn check_context(prime: u64, precision: u32) -> Result<u64> {
    if !is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    if precision == 0 {
        return Err(Error::InvalidInput("precision must be at least 1".into()));
    }
    prime.checked_pow(precision).filter(|&m| m < (1u64 << 62)).ok_or(Error::PrecisionOverflow { prime, precision })
}

/// A unit of `Z_l` known modulo `l^k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PAdicUnit {
    prime: u64,
    precision: u32,
    residue: u64,
}

impl PAdicUnit {
    /// The unit with the given residue (reduced mod `l^k`).
    pub fn new(value: i128, prime: u64, precision: u32) -> Result<Self> {
        let modulus = check_context(prime, precision)?;
        let residue = value.rem_euclid(modulus as i128) as u64;
        if residue % prime == 0 {
            return Err(Error::NotAUnit { value: value.to_string(), prime });
        }
        Ok(PAdicUnit { prime, precision, residue })
    }

    /// The unit `num / den`; both must be prime to `l`.
    pub fn from_rational(num: i128, den: i128, prime: u64, precision: u32) -> Result<Self> {
        let modulus = check_context(prime, precision)?;
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let d = den.rem_euclid(modulus as i128) as u64;
        let dinv = inv_mod(d, modulus).ok_or(Error::NotAUnit { value: format!("{num}/{den}"), prime })?;
        let n = num.rem_euclid(modulus as i128) as u64;
        let r = mul_mod(n, dinv, modulus);
        if r % prime == 0 {
            return Err(Error::NotAUnit { value: format!("{num}/{den}"), prime });
        }
        Ok(PAdicUnit { prime, precision, residue: r })
    }

    /// Parse `"a"` or `"a/b"`.
    pub fn parse(s: &str, prime: u64, precision: u32) -> Result<Self> {
        let s = s.trim();
        let parse_int =
            |t: &str| t.trim().parse::<i128>().map_err(|_| Error::Parse(format!("not an integer or rational: {s:?}")));
        match s.split_once('/') {
            Some((a, b)) => Self::from_rational(parse_int(a)?, parse_int(b)?, prime, precision),
            None => Self::new(parse_int(s)?, prime, precision),
        }
    }

    pub fn one(prime: u64, precision: u32) -> Result<Self> {
        Self::new(1, prime, precision)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.prime.pow(self.precision)
    }

    pub fn is_one(&self) -> bool {
        self.residue == 1
    }

    /// Whether this is `-1` at the working precision.
    pub fn is_minus_one(&self) -> bool {
        self.residue == self.modulus() - 1
    }

    /// Residue of smallest absolute value (in `(-l^k/2, l^k/2]`).
    pub fn signed_residue(&self) -> i64 {
        let m = self.modulus();
        if self.residue > m / 2 {
            self.residue as i64 - m as i64
        } else {
            self.residue as i64
        }
    }

    fn same_context(&self, o: &PAdicUnit) -> Result<()> {
        if self.prime != o.prime || self.precision != o.precision {
            return Err(Error::ContextMismatch(
                format!("{}^{}", self.prime, self.precision),
                format!("{}^{}", o.prime, o.precision),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, o: &PAdicUnit) -> Result<PAdicUnit> {
        self.same_context(o)?;
        Ok(PAdicUnit { residue: mul_mod(self.residue, o.residue, self.modulus()), ..*self })
    }

    pub fn inverse(&self) -> PAdicUnit {
        let r = inv_mod(self.residue, self.modulus()).expect("units are invertible");
        PAdicUnit { residue: r, ..*self }
    }

    pub fn pow(&self, e: u64) -> PAdicUnit {
        PAdicUnit { residue: pow_mod(self.residue, e, self.modulus()), ..*self }
    }

    pub fn neg(&self) -> PAdicUnit {
        PAdicUnit { residue: self.modulus() - self.residue, ..*self }
    }

    /// The same element read at a lower precision.
    pub fn truncate(&self, precision: u32) -> Result<PAdicUnit> {
        if precision > self.precision {
            return Err(Error::PrecisionTooLow(format!(
                "cannot raise precision {} to {precision} without a canonical lift",
                self.precision
            )));
        }
        PAdicUnit::new(self.residue as i128, self.prime, precision)
    }

    /// Residue mod 4 (meaningful for `l = 2`, `k >= 2`).
    pub fn mod4(&self) -> u64 {
        self.residue % 4
    }

    /// Multiplicative order in the finite group `(Z/l^k)^x`.
    pub fn order_at_precision(&self) -> u64 {
        let group = group_order(self.prime, self.precision);
        let mut n = group;
        for (p, _) in factorize(group) {
            while n % p == 0 && pow_mod(self.residue, n / p, self.modulus()) == 1 {
                n /= p;
            }
        }
        n
    }

    /// Whether the unit is a root of unity of `Z_l` (its own Teichmüller lift,
    /// or `-1` when `l = 2`).
    pub fn is_root_of_unity(&self) -> bool {
        if self.prime == 2 {
            self.is_one() || self.is_minus_one()
        } else {
            teichmuller_lift(self) == *self
        }
    }
}

impl fmt::Debug for PAdicUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self.residue, self.prime, self.precision)
    }
}

impl fmt::Display for PAdicUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.prime, self.precision)
    }
}

#[derive(Serialize, Deserialize)]
struct UnitRepr {
    precision: u32,
    prime: u64,
    residue: String,
}

impl Serialize for PAdicUnit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        UnitRepr { precision: self.precision, prime: self.prime, residue: self.residue.to_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PAdicUnit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = UnitRepr::deserialize(d)?;
        let v: i128 = r.residue.parse().map_err(serde::de::Error::custom)?;
        PAdicUnit::new(v, r.prime, r.precision).map_err(serde::de::Error::custom)
    }
}

fn group_order(prime: u64, precision: u32) -> u64 {
    prime.pow(precision - 1) * (prime - 1)
}

pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Smallest `e >= 1` with `q^e = 1 mod l`.
pub fn mult_order(q: &PAdicUnit) -> u64 {
    let l = q.prime;
    let r = q.residue % l;
    let mut e = 1;
    let mut x = r;
    while x != 1 % l {
        x = mul_mod(x, r, l);
        e += 1;
    }
    e
}

/// The root of unity congruent to `q` mod `l` (1 when `l = 2`), by iterating
/// `x -> x^l` until it stabilizes.
pub fn teichmuller_lift(q: &PAdicUnit) -> PAdicUnit {
    if q.prime == 2 {
        return PAdicUnit { residue: 1, ..*q };
    }
    let m = q.modulus();
    let mut x = q.residue;
    loop {
        let y = pow_mod(x, q.prime, m);
        if y == x {
            return PAdicUnit { residue: x, ..*q };
        }
        x = y;
    }
}

/// `q = zeta * q'` with `zeta` the Teichmüller lift, `q' = 1 mod l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct UntwistFactor {
    pub e: u64,
    pub zeta: PAdicUnit,
    pub q_prime: PAdicUnit,
}

pub fn untwist_factor(q: &PAdicUnit) -> UntwistFactor {
    let e = mult_order(q);
    let zeta = teichmuller_lift(q);
    let q_prime = q.mul(&zeta.inverse()).expect("same context");
    UntwistFactor { e, zeta, q_prime }
}

/// `v_l(u - 1)`, or the precision sentinel when `u = 1 mod l^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(u32),
    AtPrecision,
}

impl Valuation {
    pub fn finite(&self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::AtPrecision => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtPrecision => write!(f, "AT_PRECISION"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Valuation::Finite(v) => s.serialize_u32(*v),
            Valuation::AtPrecision => s.serialize_str("AT_PRECISION"),
        }
    }
}

pub fn unit_valuation(u: &PAdicUnit) -> Valuation {
    let m = u.modulus();
    let mut d = (u.residue + m - 1) % m;
    if d == 0 {
        return Valuation::AtPrecision;
    }
    let mut v = 0;
    while d % u.prime == 0 {
        d /= u.prime;
        v += 1;
    }
    Valuation::Finite(v)
}

/// Largest subgroup order for which cyclic subgroups are compared by listing them.
const LISTING_LIMIT: u64 = 1 << 20;

fn generated_subgroup(a: &PAdicUnit, order: u64) -> Vec<u64> {
    let m = a.modulus();
    let mut v = Vec::with_capacity(order as usize);
    let mut x = 1u64;
    for _ in 0..order {
        v.push(x);
        x = mul_mod(x, a.residue, m);
    }
    v.sort_unstable();
    v
}

/// Whether `b` is a power of `a` in `(Z/l^k)^x`, where `a` has order `n`
/// (baby-step giant-step).
fn in_cyclic_subgroup(a: &PAdicUnit, n: u64, b: &PAdicUnit) -> bool {
    let m = a.modulus();
    let step = (n as f64).sqrt().ceil() as u64 + 1;
    let mut baby = HashMap::with_capacity(step as usize);
    let mut x = 1u64;
    for j in 0..step {
        baby.entry(x).or_insert(j);
        x = mul_mod(x, a.residue, m);
    }
    // giant step by a^-step
    let giant = pow_mod(inv_mod(a.residue, m).unwrap(), step, m);
    let mut y = b.residue;
    for _ in 0..=n / step + 1 {
        if baby.contains_key(&y) {
            return true;
        }
        y = mul_mod(y, giant, m);
    }
    false
}

/// Whether `q1` and `q2` generate the same cyclic subgroup of `(Z/l^k)^x`.
///
/// This is a finite-precision stand-in for equality of the closed subgroups
/// of `Z_l^x`; it is faithful when `k >= max v_l(q_i' - 1) + 2`, and fails
/// with `PRECISION_TOO_LOW` when either valuation reaches the precision.
pub fn closed_subgroup_equal(q1: &PAdicUnit, q2: &PAdicUnit) -> Result<bool> {
    q1.same_context(q2)?;
    for q in [q1, q2] {
        let f = untwist_factor(q);
        if unit_valuation(&f.q_prime) == Valuation::AtPrecision {
            return Err(Error::PrecisionTooLow(format!("v(q'-1) of {q} reaches the working precision")));
        }
    }
    let n1 = q1.order_at_precision();
    let n2 = q2.order_at_precision();
    if n1 != n2 {
        return Ok(false);
    }
    if n1 <= LISTING_LIMIT {
        return Ok(generated_subgroup(q1, n1) == generated_subgroup(q2, n2));
    }
    // equal orders: <q1> = <q2> iff q2 in <q1>
    Ok(in_cyclic_subgroup(q1, n1, q2))
}

/// Closed subgroups of `Z_l^x` in the forms `mu_e H_n` (odd `l`) and
/// `H'_n`, `+-H'_n`, `H'_n u (-1 + 2^{n-1}) H'_n` (`l = 2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum SubgroupDescriptor {
    /// `mu_e H_n`: `e | l - 1`, `n >= 1`.
    Odd { prime: u64, e: u64, n: u32 },
    /// `H'_n`, `n >= 2`.
    TwoAdic { n: u32 },
    /// `+-H'_n`, `n >= 2`.
    SignedTwoAdic { n: u32 },
    /// `H'_n u (-1 + 2^{n-1}) H'_n`, `n >= 3`.
    MixedTwoAdic { n: u32 },
}

impl SubgroupDescriptor {
    pub fn new_odd(prime: u64, e: u64, n: u32) -> Result<Self> {
        if prime == 2 || !is_prime(prime) {
            return Err(Error::InvalidInput(format!("mu_e H_n needs an odd prime, got {prime}")));
        }
        if e == 0 || (prime - 1) % e != 0 || n < 1 {
            return Err(Error::InvalidInput(format!("need e | {} and n >= 1", prime - 1)));
        }
        Ok(SubgroupDescriptor::Odd { prime, e, n })
    }

    pub fn two_adic(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("H'_n needs n >= 2".into()));
        }
        Ok(SubgroupDescriptor::TwoAdic { n })
    }

    pub fn signed_two_adic(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("+-H'_n needs n >= 2".into()));
        }
        Ok(SubgroupDescriptor::SignedTwoAdic { n })
    }

    pub fn mixed_two_adic(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidInput("mixed form needs n >= 3".into()));
        }
        Ok(SubgroupDescriptor::MixedTwoAdic { n })
    }

    pub fn prime(&self) -> u64 {
        match self {
            SubgroupDescriptor::Odd { prime, .. } => *prime,
            _ => 2,
        }
    }
}

impl fmt::Display for SubgroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupDescriptor::Odd { e, n, .. } => write!(f, "mu_{e} H_{n}"),
            SubgroupDescriptor::TwoAdic { n } => write!(f, "H'_{n}"),
            SubgroupDescriptor::SignedTwoAdic { n } => write!(f, "±H'_{n}"),
            SubgroupDescriptor::MixedTwoAdic { n } => write!(f, "H'_{n} ∪ (-1+2^{})H'_{n}", n - 1),
        }
    }
}

/// `v >= n` where `v = v_l(u - 1)`; undecidable only if `v` is at precision
/// and `n > k`.
fn valuation_at_least(u: &PAdicUnit, n: u32) -> Result<bool> {
    match unit_valuation(u) {
        Valuation::Finite(v) => Ok(v >= n),
        Valuation::AtPrecision if n <= u.precision => Ok(true),
        Valuation::AtPrecision => {
            Err(Error::PrecisionTooLow(format!("testing v(q-1) >= {n} needs precision above {}", u.precision)))
        }
    }
}

fn in_h_prime(u: &PAdicUnit, n: u32) -> Result<bool> {
    if u.precision < 2 {
        return Err(Error::PrecisionTooLow("2-adic forms need precision >= 2".into()));
    }
    if u.mod4() != 1 {
        return Ok(false);
    }
    valuation_at_least(u, n)
}

pub fn subgroup_membership(q: &PAdicUnit, s: &SubgroupDescriptor) -> Result<bool> {
    if q.prime != s.prime() {
        return Err(Error::ContextMismatch(format!("l = {}", q.prime), format!("l = {}", s.prime())));
    }
    if q.is_one() {
        return Ok(true);
    }
    match *s {
        SubgroupDescriptor::Odd { e, n, .. } => {
            let f = untwist_factor(q);
            if e % f.e != 0 {
                return Ok(false);
            }
            valuation_at_least(&f.q_prime, n)
        }
        SubgroupDescriptor::TwoAdic { n } => in_h_prime(q, n),
        SubgroupDescriptor::SignedTwoAdic { n } => Ok(in_h_prime(q, n)? || in_h_prime(&q.neg(), n)?),
        SubgroupDescriptor::MixedTwoAdic { n } => {
            if in_h_prime(q, n)? {
                return Ok(true);
            }
            let m = q.modulus() as i128;
            let g = PAdicUnit::new((-1 + (1i128 << (n - 1))).rem_euclid(m), 2, q.precision)?;
            in_h_prime(&q.mul(&g.inverse())?, n)
        }
    }
}

/// Descriptor of the closed subgroup generated by `q`, read at precision.
/// A valuation at the precision sentinel is reported as `n = k`.
pub fn generated_subgroup_descriptor(q: &PAdicUnit) -> Result<SubgroupDescriptor> {
    let k = q.precision;
    let v_or_k = |u: &PAdicUnit| unit_valuation(u).finite().unwrap_or(k);
    if q.prime != 2 {
        let f = untwist_factor(q);
        return SubgroupDescriptor::new_odd(q.prime, f.e, v_or_k(&f.q_prime).max(1));
    }
    if k < 2 {
        return Err(Error::PrecisionTooLow("2-adic forms need precision >= 2".into()));
    }
    if q.mod4() == 1 {
        return SubgroupDescriptor::two_adic(v_or_k(q).max(2));
    }
    // q = -u with u = 1 mod 4
    let u = q.neg();
    match unit_valuation(&u) {
        Valuation::AtPrecision => SubgroupDescriptor::signed_two_adic(k),
        Valuation::Finite(v) => SubgroupDescriptor::mixed_two_adic(v + 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(v: i128, l: u64, k: u32) -> PAdicUnit {
        PAdicUnit::new(v, l, k).unwrap()
    }

    #[test]
    fn orders_mod_ell() {
        assert_eq!(mult_order(&u(2, 5, 3)), 4);
        assert_eq!(mult_order(&u(4, 3, 3)), 1);
        assert_eq!(mult_order(&u(3, 7, 2)), 6);
        assert_eq!(mult_order(&u(3, 2, 4)), 1);
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller_lift(&u(2, 5, 2)).residue(), 7);
        assert_eq!(teichmuller_lift(&u(1, 7, 5)).residue(), 1);
        assert_eq!(teichmuller_lift(&u(3, 2, 3)).residue(), 1);
    }

    #[test]
    fn untwist_examples() {
        let f = untwist_factor(&u(2, 5, 2));
        assert_eq!((f.e, f.zeta.residue(), f.q_prime.residue()), (4, 7, 11));
        let f = untwist_factor(&u(4, 3, 4));
        assert_eq!((f.e, f.zeta.residue(), f.q_prime.residue()), (1, 1, 4));
        let f = untwist_factor(&u(3, 2, 4));
        assert_eq!((f.e, f.zeta.residue(), f.q_prime.residue()), (1, 1, 3));
    }

    #[test]
    fn valuations() {
        assert_eq!(unit_valuation(&u(11, 5, 2)), Valuation::Finite(1));
        assert_eq!(unit_valuation(&u(1, 5, 2)), Valuation::AtPrecision);
        assert_eq!(unit_valuation(&u(4, 3, 4)), Valuation::Finite(1));
    }

    #[test]
    fn rationals_reduce_on_entry() {
        let a = PAdicUnit::from_rational(1, 2, 3, 2).unwrap();
        assert_eq!(a.residue(), 5); // 2 * 5 = 10 = 1 mod 9
        assert!(PAdicUnit::from_rational(1, 3, 3, 2).is_err());
        assert!(PAdicUnit::parse("6", 3, 2).is_err());
        assert_eq!(PAdicUnit::parse("-2", 3, 2).unwrap().residue(), 7);
    }

    #[test]
    fn context_errors() {
        assert_eq!(PAdicUnit::new(2, 4, 2), Err(Error::NotPrime(4)));
        assert!(matches!(PAdicUnit::new(2, 7, 40), Err(Error::PrecisionOverflow { .. })));
        assert!(u(2, 5, 2).mul(&u(2, 5, 3)).is_err());
    }

    #[test]
    fn subgroup_comparisons() {
        assert!(closed_subgroup_equal(&u(4, 3, 6), &u(7, 3, 6)).unwrap());
        assert!(!closed_subgroup_equal(&u(2, 3, 6), &u(4, 3, 6)).unwrap());
        let q = u(2, 5, 6);
        assert!(closed_subgroup_equal(&q, &q.inverse()).unwrap());
        assert!(matches!(closed_subgroup_equal(&u(1, 3, 4), &u(4, 3, 4)), Err(Error::PrecisionTooLow(_))));
    }

    #[test]
    fn membership_examples() {
        let s = SubgroupDescriptor::new_odd(5, 4, 1).unwrap();
        assert!(subgroup_membership(&u(2, 5, 4), &s).unwrap());
        let s = SubgroupDescriptor::signed_two_adic(2).unwrap();
        assert!(subgroup_membership(&u(3, 2, 6), &s).unwrap());
        assert!(!subgroup_membership(&u(3, 2, 6), &SubgroupDescriptor::two_adic(2).unwrap()).unwrap());
        for d in [SubgroupDescriptor::new_odd(7, 1, 3).unwrap(), SubgroupDescriptor::mixed_two_adic(3).unwrap()] {
            let q = u(1, d.prime(), 6);
            assert!(subgroup_membership(&q, &d).unwrap());
        }
    }

    #[test]
    fn descriptor_invariants() {
        assert!(SubgroupDescriptor::new_odd(5, 3, 1).is_err());
        assert!(SubgroupDescriptor::two_adic(1).is_err());
        assert!(SubgroupDescriptor::mixed_two_adic(2).is_err());
        assert_eq!(generated_subgroup_descriptor(&u(7, 2, 6)).unwrap(), SubgroupDescriptor::MixedTwoAdic { n: 4 });
        assert_eq!(generated_subgroup_descriptor(&u(-1, 2, 6)).unwrap(), SubgroupDescriptor::SignedTwoAdic { n: 6 });
    }
}
