//! Poincaré-series models of `H*(BG)`, `H*(G)`, `H*(LBG)` and `H*(BG(q))`
//! for polynomial cohomology, the `psi^q` action, Koszul-complex Tor,
//! Serre `E_2` dimension tables and the rank-one module check.

use std::collections::{BTreeMap, HashMap};

use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::padic::PAdicUnit;
use crate::poly::ZPoly;
use crate::series::PoincareSeries;

pub const DEFAULT_TRUNCATION: usize = 64;

fn check_degrees(degrees: &[u32]) -> Result<()> {
    if degrees.contains(&0) {
        return Err(Error::InvalidInput("degrees must be positive".into()));
    }
    Ok(())
}

/// Top degree of `H*(G)`: `sum (2 d_i - 1)`.
pub fn dim_g(degrees: &[u32]) -> u64 {
    degrees.iter().map(|&d| 2 * d as u64 - 1).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Selector {
    #[serde(rename = "BG")]
    Bg,
    #[serde(rename = "G")]
    G,
    #[serde(rename = "LBG")]
    Lbg,
    #[serde(rename = "BGq")]
    Bgq,
}

/// `BG = prod 1/(1 - t^{2d})`, `G = prod (1 + t^{2d-1})`, and
/// `LBG = BGq = prod (1 + t^{2d-1})/(1 - t^{2d})`.
pub fn poincare_series(degrees: &[u32], selector: Selector) -> PoincareSeries {
    let bg = || PoincareSeries::from_degrees(&degrees.iter().map(|&d| 2 * d).collect::<Vec<_>>());
    let g = || {
        PoincareSeries::from_poly(
            degrees.iter().fold(ZPoly::one(), |acc, &d| acc.mul(&ZPoly::binomial(1, 2 * d as usize - 1))),
        )
    };
    match selector {
        Selector::Bg => bg(),
        Selector::G => g(),
        Selector::Lbg | Selector::Bgq => bg().mul(&g()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PsiqVerdict {
    Identity,
    NotIdentity,
}

/// Eigenvalues `q^{d_i} mod l` of `psi^q` on the generators of `H^{2 d_i}(BG)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiqAction {
    pub eigenvalues: Vec<(u32, u64)>,
    pub verdict: PsiqVerdict,
}

pub fn psiq_action(degrees: &[u32], q: &PAdicUnit) -> PsiqAction {
    let l = q.prime();
    let base = q.residue() % l;
    let eigenvalues: Vec<(u32, u64)> =
        degrees.iter().map(|&d| (2 * d, crate::padic::pow_mod(base, d as u64, l))).collect();
    let identity = l == 2 || eigenvalues.iter().all(|&(_, v)| v == 1);
    PsiqAction { eigenvalues, verdict: if identity { PsiqVerdict::Identity } else { PsiqVerdict::NotIdentity } }
}

/// Finitely supported dimensions indexed by `(s, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BigradedDims {
    entries: BTreeMap<(i64, i64), u64>,
    truncation: usize,
}

impl BigradedDims {
    pub fn new(truncation: usize) -> Self {
        BigradedDims { entries: BTreeMap::new(), truncation }
    }

    pub fn set(&mut self, s: i64, t: i64, dim: u64) {
        if dim == 0 {
            self.entries.remove(&(s, t));
        } else {
            self.entries.insert((s, t), dim);
        }
    }

    pub fn get(&self, s: i64, t: i64) -> u64 {
        self.entries.get(&(s, t)).copied().unwrap_or(0)
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn entries(&self) -> impl Iterator<Item = (i64, i64, u64)> + '_ {
        self.entries.iter().map(|(&(s, t), &d)| (s, t, d))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sums of dimensions with total degree `s + t = n` for `n` in `0..=max`.
    pub fn totals(&self, max: usize) -> Vec<u64> {
        let mut out = vec![0u64; max + 1];
        for (&(s, t), &d) in &self.entries {
            let n = s + t;
            if (0..=max as i64).contains(&n) {
                out[n as usize] += d;
            }
        }
        out
    }
}

impl Serialize for BigradedDims {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<(i64, i64, u64)> = self.entries().collect();
        v.serialize(s)
    }
}

/// Exponent vectors `a` with `sum a_i w_i = target`.
fn monomials(weights: &[u64], target: u64) -> Vec<Vec<u32>> {
    fn go(weights: &[u64], i: usize, left: u64, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let mut a = 0u32;
        loop {
            let used = a as u64 * weights[i];
            if used > left {
                break;
            }
            cur.push(a);
            go(weights, i + 1, left - used, cur, out);
            cur.pop();
            a += 1;
        }
    }
    let mut out = Vec::new();
    go(weights, 0, target, &mut Vec::new(), &mut out);
    out
}

/// Basis of the Koszul complex `A (x) Lambda(e_1..e_r)` in homological
/// degree `s` and internal degree `t`: pairs (exterior subset bitmask, monomial).
fn koszul_basis(weights: &[u64], s: usize, t: u64) -> Vec<(u32, Vec<u32>)> {
    let r = weights.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << r) {
        if mask.count_ones() as usize != s {
            continue;
        }
        let ext: u64 = (0..r).filter(|&i| mask >> i & 1 == 1).map(|i| weights[i]).sum();
        if ext > t {
            continue;
        }
        for m in monomials(weights, t - ext) {
            out.push((mask, m));
        }
    }
    out
}

/// Matrix of `d: C_{s,t} -> C_{s-1,t}`, `d(x^a e_S) = sum_{j in S} +-(c_j - 1) x^{a + e_j} e_{S - j}`.
fn koszul_differential(weights: &[u64], multipliers: &[i64], s: usize, t: u64, prime: u64) -> IntMatrix {
    let src = koszul_basis(weights, s, t);
    let dst = koszul_basis(weights, s - 1, t);
    let index: HashMap<&(u32, Vec<u32>), usize> = dst.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let mut m = IntMatrix::zeros(dst.len(), src.len());
    let p = prime as i64;
    for (col, (mask, mono)) in src.iter().enumerate() {
        let mut sign = 1i64;
        for j in 0..weights.len() {
            if mask >> j & 1 == 0 {
                continue;
            }
            let coeff = (multipliers[j] - 1).rem_euclid(p) * sign;
            sign = -sign;
            if coeff.rem_euclid(p) == 0 {
                continue;
            }
            let mut target = mono.clone();
            target[j] += 1;
            let key = (mask & !(1 << j), target);
            let row = index[&key];
            m.set(row, col, (m.get(row, col) + coeff).rem_euclid(p));
        }
    }
    m
}

/// Homology of the Koszul complex on `y_i = x'_i - c_i x_i` after base change
/// along `x'_i -> c_i x_i`, over `F_l`, through internal degree `max_internal`.
/// Entries sit at bidegree `(-s, t)`.
pub fn koszul_tor_with_multipliers(
    degrees: &[u32],
    multipliers: &[i64],
    max_internal: usize,
    prime: u64,
) -> Result<BigradedDims> {
    check_degrees(degrees)?;
    if multipliers.len() != degrees.len() {
        return Err(Error::InvalidInput("one multiplier per degree".into()));
    }
    if !crate::padic::is_prime(prime) {
        return Err(Error::NotPrime(prime));
    }
    let weights: Vec<u64> = degrees.iter().map(|&d| 2 * d as u64).collect();
    let r = weights.len();
    let mut out = BigradedDims::new(max_internal);
    for t in 0..=max_internal as u64 {
        // ranks[s] = rank of d_s : C_s -> C_{s-1}
        let mut ranks = vec![0usize; r + 2];
        let mut dims = vec![0usize; r + 1];
        for (s, dim) in dims.iter_mut().enumerate() {
            *dim = koszul_basis(&weights, s, t).len();
        }
        for s in 1..=r {
            if dims[s] > 0 && dims[s - 1] > 0 {
                ranks[s] = koszul_differential(&weights, multipliers, s, t, prime).rank_mod_prime(prime);
            }
        }
        for s in 0..=r {
            let h = dims[s] - ranks[s] - ranks[s + 1];
            out.set(-(s as i64), t as i64, h as u64);
        }
    }
    Ok(out)
}

/// `Tor` of the two diagonal modules over the doubled polynomial ring.
pub fn koszul_tor(degrees: &[u32], max_internal: usize, prime: u64) -> Result<BigradedDims> {
    koszul_tor_with_multipliers(degrees, &vec![1; degrees.len()], max_internal, prime)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollapseReport {
    pub passed: bool,
    pub truncation: usize,
    pub tor_totals: Vec<u64>,
    pub series_coefficients: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<usize>,
}

/// Compare Koszul Tor totals (by `t - s`) with the `BGq` series through degree `n`.
pub fn em_collapse_check(degrees: &[u32], n: usize, prime: u64) -> Result<CollapseReport> {
    check_degrees(degrees)?;
    let tor = koszul_tor(degrees, n + degrees.len(), prime)?;
    let tor_totals = tor.totals(n);
    let series_coefficients: Vec<u64> = poincare_series(degrees, Selector::Bgq)
        .expand(n)?
        .iter()
        .map(|c| c.to_u64().ok_or(Error::Overflow("series coefficient")))
        .collect::<Result<_>>()?;
    let first_mismatch = (0..=n).find(|&i| tor_totals[i] != series_coefficients[i]);
    Ok(CollapseReport {
        passed: first_mismatch.is_none(),
        truncation: n,
        tor_totals,
        series_coefficients,
        first_mismatch,
    })
}

fn nonnegative_expansion(s: &PoincareSeries, n: usize) -> Result<Vec<u64>> {
    s.expand(n)?
        .iter()
        .map(|c| c.to_u64().ok_or_else(|| Error::InvalidInput(format!("series {s} has a negative coefficient"))))
        .collect()
}

/// `E_2^{s,t} = base_s * fiber_t` for `s + t <= n`.
pub fn serre_e2(base: &PoincareSeries, fiber: &PoincareSeries, n: usize) -> Result<BigradedDims> {
    let b = nonnegative_expansion(base, n)?;
    let f = nonnegative_expansion(fiber, n)?;
    let mut out = BigradedDims::new(n);
    for (s, &bs) in b.iter().enumerate() {
        for (t, &ft) in f.iter().enumerate().take(n - s + 1) {
            out.set(s as i64, t as i64, bs * ft);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankOneReport {
    pub passed: bool,
    pub generator: (u64, u64),
    pub generator_dim: u64,
    pub fiber_palindromic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_mismatch: Option<(i64, i64)>,
}

/// Dimension-level check that `E_2(BG^{h sigma})` is free of rank one over
/// `E_2(LBG)` on a class in `E_2^{0,d}`, `d = dim G`: the module map sends
/// `E^{s,t}(LBG)` isomorphically onto `E^{s,d-t}(BG^{h sigma})`.
pub fn module_rank_one_check(degrees: &[u32], n: usize) -> Result<RankOneReport> {
    check_degrees(degrees)?;
    let d = dim_g(degrees) as usize;
    let bg = poincare_series(degrees, Selector::Bg);
    let g = poincare_series(degrees, Selector::G);
    let width = n.max(d) + d;
    let lbg = serre_e2(&bg, &g, width)?;
    let hsigma = serre_e2(&bg, &g, width)?;
    let fiber = nonnegative_expansion(&g, d)?;
    let fiber_palindromic = (0..=d).all(|t| fiber[t] == fiber[d - t]);
    let generator_dim = hsigma.get(0, d as i64);
    let mut first_mismatch = None;
    'outer: for s in 0..=n as i64 {
        for t in 0..=d as i64 {
            if lbg.get(s, t) != hsigma.get(s, d as i64 - t) {
                first_mismatch = Some((s, t));
                break 'outer;
            }
        }
    }
    Ok(RankOneReport {
        passed: first_mismatch.is_none() && generator_dim == 1 && fiber_palindromic,
        generator: (0, d as u64),
        generator_dim,
        fiber_palindromic,
        first_mismatch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions_of_groups() {
        assert_eq!(dim_g(&[2]), 3);
        assert_eq!(dim_g(&[2, 3]), 8);
        assert_eq!(dim_g(&[2, 6]), 14);
        assert_eq!(dim_g(&[]), 0);
    }

    #[test]
    fn series_models() {
        let s = poincare_series(&[1], Selector::Bgq);
        assert_eq!(s, PoincareSeries::from_degrees(&[1]));
        let l = poincare_series(&[2], Selector::Lbg);
        assert_eq!(
            l.expand(8).unwrap().iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>(),
            vec![1, 0, 0, 1, 1, 0, 0, 1, 1]
        );
        assert!(poincare_series(&[], Selector::G).is_one());
    }

    #[test]
    fn psiq_examples() {
        let a = psiq_action(&[2, 3], &PAdicUnit::new(4, 3, 4).unwrap());
        assert_eq!((a.eigenvalues.clone(), a.verdict), (vec![(4, 1), (6, 1)], PsiqVerdict::Identity));
        let b = psiq_action(&[2, 3], &PAdicUnit::new(2, 5, 4).unwrap());
        assert_eq!((b.eigenvalues.clone(), b.verdict), (vec![(4, 4), (6, 3)], PsiqVerdict::NotIdentity));
        assert_eq!(psiq_action(&[2], &PAdicUnit::new(3, 2, 4).unwrap()).verdict, PsiqVerdict::Identity);
    }

    #[test]
    fn koszul_rank_one() {
        let t = koszul_tor(&[2], 8, 3).unwrap();
        let e: Vec<_> = t.entries().collect();
        assert_eq!(e, vec![(-1, 4, 1), (-1, 8, 1), (0, 0, 1), (0, 4, 1), (0, 8, 1)]);
        let point = koszul_tor(&[], 5, 2).unwrap();
        assert_eq!(point.entries().collect::<Vec<_>>(), vec![(0, 0, 1)]);
    }

    #[test]
    fn twisted_koszul_loses_the_exterior_classes() {
        // multiplier 2 at l = 3: d(e) = x, so Tor is F_3 in degree 0
        let t = koszul_tor_with_multipliers(&[2], &[2], 12, 3).unwrap();
        assert_eq!(t.entries().collect::<Vec<_>>(), vec![(0, 0, 1)]);
    }

    #[test]
    fn collapse_small() {
        assert!(em_collapse_check(&[2], 20, 2).unwrap().passed);
        assert!(em_collapse_check(&[2, 3], 10, 5).unwrap().passed);
        assert!(em_collapse_check(&[], 5, 3).unwrap().passed);
    }

    #[test]
    fn serre_tables() {
        let t = serre_e2(&PoincareSeries::from_degrees(&[4]), &PoincareSeries::from_poly(ZPoly::binomial(1, 3)), 8)
            .unwrap();
        let keys: Vec<(i64, i64)> = t.entries().map(|(s, t, _)| (s, t)).collect();
        assert_eq!(keys, vec![(0, 0), (0, 3), (4, 0), (4, 3), (8, 0)]);
        let one = serre_e2(&PoincareSeries::one(), &PoincareSeries::one(), 6).unwrap();
        assert_eq!(one.entries().collect::<Vec<_>>(), vec![(0, 0, 1)]);
    }

    #[test]
    fn rank_one_examples() {
        let r = module_rank_one_check(&[2], 6).unwrap();
        assert!(r.passed);
        assert_eq!(r.generator, (0, 3));
        assert_eq!(module_rank_one_check(&[2, 3], 10).unwrap().generator, (0, 8));
        assert_eq!(module_rank_one_check(&[], 0).unwrap().generator, (0, 0));
    }
}
