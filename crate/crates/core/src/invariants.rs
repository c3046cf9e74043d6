//! Weyl-group enumeration, Molien and twisted Molien series, fundamental
//! degrees, and Springer's twisting eigenvalues.

use std::collections::HashMap;
use std::hash::BuildHasher;

use hashbrown::{DefaultHashBuilder, HashTable};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::{CyclotomicElement, CyclotomicRing, RootOfUnity};
use crate::error::{Error, Result};
use crate::lattice::{inverse_in, smith_in};
use crate::matrix::{Coefficients, IntMatrix};
use crate::poly::ZPoly;
use crate::rootdata::{cartan_matrix, DatumAutomorphism, DynkinType, LabelFactor, RootDatum};
use crate::series::PoincareSeries;

pub const DEFAULT_CAP: usize = 2_000_000;

/// Enumeration cap: `LIETYPE_CAP` if set and valid, else [`DEFAULT_CAP`].
pub fn cap_from_env() -> usize {
    std::env::var("LIETYPE_CAP").ok().and_then(|s| s.trim().parse().ok()).filter(|&c| c > 0).unwrap_or(DEFAULT_CAP)
}

/// All elements of a finite matrix group, stored contiguously in the order
/// they were discovered (identity first).
pub struct WeylEnumeration {
    dim: usize,
    coefficients: Coefficients,
    data: Vec<i64>,
    count: usize,
    index: HashTable<u32>,
    hasher: DefaultHashBuilder,
}

impl std::fmt::Debug for WeylEnumeration {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WeylEnumeration {{ dim: {}, order: {} }}", self.dim, self.order())
    }
}

impl WeylEnumeration {
    fn empty(dim: usize, coefficients: Coefficients) -> Self {
        WeylEnumeration {
            dim,
            coefficients,
            data: Vec::new(),
            count: 0,
            index: HashTable::with_capacity(16),
            hasher: DefaultHashBuilder::default(),
        }
    }

    fn block(&self, i: usize) -> &[i64] {
        let s = self.dim * self.dim;
        &self.data[i * s..(i + 1) * s]
    }

    fn find(&self, m: &[i64]) -> Option<usize> {
        let h = self.hasher.hash_one(m);
        self.index.find(h, |&i| self.block(i as usize) == m).map(|&i| i as usize)
    }

    /// Insert if new; returns whether it was new.
    fn insert(&mut self, m: &[i64]) -> bool {
        let h = self.hasher.hash_one(m);
        if self.index.find(h, |&i| self.block(i as usize) == m).is_some() {
            return false;
        }
        let idx = self.order() as u32;
        self.data.extend_from_slice(m);
        self.count += 1;
        let s = self.dim * self.dim;
        let (data, hasher) = (&self.data, &self.hasher);
        self.index.insert_unique(h, idx, |&i| hasher.hash_one(&data[i as usize * s..(i as usize + 1) * s]));
        true
    }

    /// Closure of the given generators under multiplication.
    pub fn generate(dim: usize, generators: &[IntMatrix], coefficients: Coefficients, cap: usize) -> Result<Self> {
        let mut e = Self::empty(dim, coefficients);
        e.insert(IntMatrix::identity(dim).data());
        let mut next = 0;
        while next < e.order() {
            let x = e.element(next);
            for s in generators {
                let y = s.mul_in(&x, coefficients);
                if e.insert(y.data()) && e.order() > cap {
                    return Err(Error::CapExceeded { cap, partial: e.order() });
                }
            }
            next += 1;
        }
        Ok(e)
    }

    /// A group given by its full element list; fails if the list is not closed.
    pub fn from_elements(dim: usize, elements: &[IntMatrix], coefficients: Coefficients) -> Result<Self> {
        let mut e = Self::empty(dim, coefficients);
        e.insert(IntMatrix::identity(dim).data());
        for m in elements {
            e.insert(m.reduced(coefficients).data());
        }
        let n = e.order();
        for i in 0..n {
            for j in 0..n {
                let p = e.element(i).mul_in(&e.element(j), coefficients);
                if e.find(p.data()).is_none() {
                    return Err(Error::Inconsistent("element list is not closed under products".into()));
                }
            }
        }
        Ok(e)
    }

    pub fn order(&self) -> usize {
        self.count
    }

    pub fn rank(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coefficients
    }

    pub fn element(&self, i: usize) -> IntMatrix {
        IntMatrix::new(self.dim, self.dim, self.block(i).to_vec())
    }

    pub fn elements(&self) -> impl Iterator<Item = IntMatrix> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn contains(&self, m: &IntMatrix) -> bool {
        m.rows() == self.dim && self.find(m.reduced(self.coefficients).data()).is_some()
    }

    /// Number of (pseudo-)reflections: elements with `rank(w - I) = 1`.
    pub fn reflection_count(&self) -> Result<usize> {
        let c = self.coefficients;
        let counts: Vec<Result<bool>> = (0..self.order())
            .into_par_iter()
            .map(|i| {
                let d = self.element(i).minus_identity_in(c);
                Ok(match c {
                    Coefficients::Integer => d.rank() == 1,
                    _ => smith_in(&d, c)?.rank() == 1,
                })
            })
            .collect();
        let mut n = 0;
        for r in counts {
            n += usize::from(r?);
        }
        Ok(n)
    }

    /// The reflections themselves, in enumeration order.
    pub fn reflections(&self) -> Result<Vec<IntMatrix>> {
        let c = self.coefficients;
        let mut out = Vec::new();
        for w in self.elements() {
            let d = w.minus_identity_in(c);
            let r = match c {
                Coefficients::Integer => d.rank(),
                _ => smith_in(&d, c)?.rank(),
            };
            if r == 1 {
                out.push(w);
            }
        }
        Ok(out)
    }

    /// Whether conjugation by `m` maps the group to itself. Checking the
    /// generators' conjugates suffices, and is exact.
    pub fn normalized_by(&self, m: &IntMatrix, generators: &[IntMatrix]) -> Result<bool> {
        let c = self.coefficients;
        let Some(inv) = inverse_in(m, c)? else { return Ok(false) };
        Ok(generators.iter().all(|s| self.contains(&m.mul_in(s, c).mul_in(&inv, c))))
    }
}

pub fn enumerate_weyl(d: &RootDatum, cap: usize) -> Result<WeylEnumeration> {
    if let Some(order) = labeled_weyl_order(d)? {
        if order > cap as u128 {
            return Err(Error::CapExceeded { cap, partial: 0 });
        }
    }
    WeylEnumeration::generate(d.rank(), d.generators(), d.coefficients(), cap)
}

// ---------------------------------------------------------------------------
// Orders and root counts from Cartan matrices, computed by orbit chains on
// weights. Independent of the matrix enumeration; used to reject oversized
// labeled groups before enumerating and to certify the degree table.

fn weight_orbit(cartan: &IntMatrix, start: Vec<i64>) -> usize {
    let n = cartan.rows();
    let mut seen = std::collections::HashSet::new();
    let mut queue = vec![start.clone()];
    seen.insert(start);
    while let Some(l) = queue.pop() {
        for i in 0..n {
            if l[i] == 0 {
                continue;
            }
            // s_i(lambda) = lambda - <lambda, alpha_i^vee> alpha_i; alpha_i has weight coordinates a_ji
            let m: Vec<i64> = (0..n).map(|j| l[j] - l[i] * cartan.get(j, i)).collect();
            if seen.insert(m.clone()) {
                queue.push(m);
            }
        }
    }
    seen.len()
}

/// `|W|` of a Cartan matrix: `|W . omega_n| * |W_{I - n}|`, recursively.
pub fn weyl_order_from_cartan(cartan: &IntMatrix) -> u128 {
    let n = cartan.rows();
    if n == 0 {
        return 1;
    }
    let mut w = vec![0i64; n];
    w[n - 1] = 1;
    let orbit = weight_orbit(cartan, w) as u128;
    let sub: Vec<usize> = (0..n - 1).collect();
    orbit * weyl_order_from_cartan(&cartan.select_rows(&sub).select_columns(&sub))
}

/// Number of positive roots (reflections) of a Cartan matrix, from the orbits of the simple roots.
pub fn positive_root_count(cartan: &IntMatrix) -> usize {
    let n = cartan.rows();
    let mut roots = std::collections::HashSet::new();
    for i in 0..n {
        let alpha: Vec<i64> = (0..n).map(|j| cartan.get(j, i)).collect();
        if roots.contains(&alpha) {
            continue;
        }
        let mut queue = vec![alpha.clone()];
        roots.insert(alpha);
        while let Some(l) = queue.pop() {
            for k in 0..n {
                let m: Vec<i64> = (0..n).map(|j| l[j] - l[k] * cartan.get(j, k)).collect();
                if roots.insert(m.clone()) {
                    queue.push(m);
                }
            }
        }
    }
    roots.len() / 2
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn factor_weyl_order(f: &LabelFactor) -> u128 {
    match *f {
        LabelFactor::Simple { ty, rank, .. } => {
            weyl_order_from_cartan(&cartan_matrix(ty, rank).expect("validated label"))
        }
        LabelFactor::Torus { .. } => 1,
        LabelFactor::Gl { n } => factorial(n),
    }
}

/// `|W|` computed from the label, when the datum carries one that its matrices match.
pub fn labeled_weyl_order(d: &RootDatum) -> Result<Option<u128>> {
    match d.label() {
        Some(l) if d.matches_label()? => Ok(Some(l.factors().iter().map(factor_weyl_order).product())),
        _ => Ok(None),
    }
}

/// Degrees of `E_7` and `E_8`, certified against the orbit-chain order and
/// the root count before being returned.
pub fn table_degrees(ty: DynkinType, rank: usize) -> Result<Option<Vec<u32>>> {
    let degrees: Vec<u32> = match (ty, rank) {
        (DynkinType::E, 7) => vec![2, 6, 8, 10, 12, 14, 18],
        (DynkinType::E, 8) => vec![2, 8, 12, 14, 18, 20, 24, 30],
        _ => return Ok(None),
    };
    let c = cartan_matrix(ty, rank)?;
    let prod: u128 = degrees.iter().map(|&d| d as u128).product();
    let refl: usize = degrees.iter().map(|&d| d as usize - 1).sum();
    if prod != weyl_order_from_cartan(&c) || refl != positive_root_count(&c) {
        return Err(Error::Inconsistent(format!("degree table for {}{rank} fails its cross-checks", ty.letter())));
    }
    Ok(Some(degrees))
}

// ---------------------------------------------------------------------------
// Molien series

fn charpoly_classes(e: &WeylEnumeration, twist: Option<&IntMatrix>) -> HashMap<Vec<i64>, u64> {
    let n = e.dim;
    (0..e.order())
        .into_par_iter()
        .fold(HashMap::new, |mut acc: HashMap<Vec<i64>, u64>, i| {
            let w = e.element(i);
            let m = match twist {
                Some(t) => t.mul(&w),
                None => w,
            };
            debug_assert_eq!(m.rows(), n);
            *acc.entry(m.reversed_charpoly()).or_insert(0) += 1;
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        })
}

fn average(classes: HashMap<Vec<i64>, u64>, order: usize) -> Result<PoincareSeries> {
    let mut keys: Vec<_> = classes.into_iter().collect();
    keys.sort();
    let mut sum = PoincareSeries::zero();
    for (p, count) in keys {
        let term = PoincareSeries::new(ZPoly::constant(BigInt::from(count)), ZPoly::from_i64(&p))?;
        sum = sum.add(&term);
    }
    Ok(sum.scale(&BigInt::one(), &BigInt::from(order)))
}

fn require_integer(e: &WeylEnumeration) -> Result<()> {
    if !e.coefficients.is_integer() {
        return Err(Error::InvalidInput("Molien series need an integral group".into()));
    }
    Ok(())
}

/// `(1/|W|) sum_w 1/det(I - t w)`.
pub fn molien_series(e: &WeylEnumeration) -> Result<PoincareSeries> {
    require_integer(e)?;
    average(charpoly_classes(e, None), e.order())
}

/// `(1/|W|) sum_w 1/det(I - t phi w)` for the integral part of `phi`.
pub fn twisted_molien(
    e: &WeylEnumeration,
    generators: &[IntMatrix],
    phi: &DatumAutomorphism,
) -> Result<PoincareSeries> {
    require_integer(e)?;
    let m = phi.matrix();
    if !e.normalized_by(m, generators)? {
        return Err(Error::NormalizationFailed(format!("{m:?}")));
    }
    average(charpoly_classes(e, Some(m)), e.order())
}

/// Read off `d_1 <= ... <= d_r` from `prod 1/(1 - t^{d_i})`.
pub fn degrees_from_series(s: &PoincareSeries, max_degree: usize) -> Result<Vec<u32>> {
    let mut g = s.clone();
    let mut out = Vec::new();
    let fail = |why: &str| Error::NotPolynomialInvariants(format!("{s}: {why}"));
    while !g.is_one() {
        if out.len() > s.denominator().degree().unwrap_or(0) {
            return Err(fail("too many factors"));
        }
        let coeffs = g.expand(max_degree)?;
        let Some(k) = (1..coeffs.len()).find(|&k| !coeffs[k].is_zero()) else {
            return Err(fail("no leading term"));
        };
        if coeffs[k] < BigInt::zero() {
            return Err(fail("negative leading coefficient"));
        }
        out.push(k as u32);
        g = g.mul_poly(&ZPoly::binomial(-1, k));
    }
    Ok(out)
}

/// Fundamental degrees, optionally with twisting eigenvalues, and where they came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeData {
    pub degrees: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub twist_eigenvalues: Option<Vec<(u32, RootOfUnity)>>,
    pub source: DegreeSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeSource {
    Molien,
    Table,
    Factors,
    LehrerSpringer,
}

impl DegreeData {
    pub fn new(mut degrees: Vec<u32>, source: DegreeSource) -> Self {
        degrees.sort_unstable();
        DegreeData { degrees, twist_eigenvalues: None, source }
    }

    pub fn product(&self) -> u128 {
        self.degrees.iter().map(|&d| d as u128).product()
    }

    pub fn reflection_count(&self) -> usize {
        self.degrees.iter().map(|&d| d as usize - 1).sum()
    }
}

/// Degrees from an enumeration, checked against `|W|` and the reflection count.
pub fn degrees_of_group(e: &WeylEnumeration) -> Result<DegreeData> {
    let s = molien_series(e)?;
    let deg = DegreeData::new(degrees_from_series(&s, e.order() + 1)?, DegreeSource::Molien);
    check_degree_identities(e, &deg)?;
    Ok(deg)
}

pub fn check_degree_identities(e: &WeylEnumeration, deg: &DegreeData) -> Result<()> {
    if deg.product() != e.order() as u128 {
        return Err(Error::Inconsistent(format!("product of degrees {:?} is not |W| = {}", deg.degrees, e.order())));
    }
    let refl = e.reflection_count()?;
    if deg.reflection_count() != refl {
        return Err(Error::Inconsistent(format!(
            "degrees {:?} predict {} reflections, found {refl}",
            deg.degrees,
            deg.reflection_count()
        )));
    }
    Ok(())
}

pub fn degrees(d: &RootDatum) -> Result<DegreeData> {
    degrees_with_cap(d, cap_from_env())
}

pub fn degrees_with_cap(d: &RootDatum, cap: usize) -> Result<DegreeData> {
    if let Some(order) = labeled_weyl_order(d)? {
        if order > cap as u128 {
            return labeled_degrees_by_factor(d, cap);
        }
    }
    degrees_of_group(&WeylEnumeration::generate(d.rank(), d.generators(), d.coefficients(), cap)?)
}

fn labeled_degrees_by_factor(d: &RootDatum, cap: usize) -> Result<DegreeData> {
    let label = d.label().ok_or(Error::UnlabeledDatum)?;
    let mut all = Vec::new();
    let mut single_table = label.factors().len() == 1;
    for f in label.factors() {
        match *f {
            LabelFactor::Simple { ty, rank, .. } => match table_degrees(ty, rank)? {
                Some(t) => all.extend(t),
                None => {
                    single_table = false;
                    let part = RootDatum::from_label(&crate::rootdata::Label::new(vec![*f])?)?;
                    let e = enumerate_weyl(&part, cap)?;
                    all.extend(degrees_of_group(&e)?.degrees);
                }
            },
            LabelFactor::Torus { rank } => all.extend(std::iter::repeat_n(1, rank)),
            LabelFactor::Gl { n } => {
                single_table = false;
                all.extend(1..=n as u32)
            }
        }
    }
    let source = if single_table { DegreeSource::Table } else { DegreeSource::Factors };
    Ok(DegreeData::new(all, source))
}

// ---------------------------------------------------------------------------
// Twisting eigenvalues

fn shift_mul(ring: &CyclotomicRing, g: &mut [CyclotomicElement], eps: &CyclotomicElement, d: usize) {
    // g <- g * (1 - eps t^d), truncated
    for n in (d..g.len()).rev() {
        let t = ring.mul(eps, &g[n - d]);
        g[n] = ring.sub(&g[n], &t);
    }
}

fn multisets(m: u64, k: usize) -> Vec<Vec<u64>> {
    fn go(m: u64, k: usize, start: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..m {
            cur.push(j);
            go(m, k, j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(m, k, 0, &mut Vec::new(), &mut out);
    out
}

fn fit(ring: &CyclotomicRing, g: &[CyclotomicElement], groups: &[(usize, usize)], out: &mut Vec<(u32, u64)>) -> bool {
    let Some((&(d, k), rest)) = groups.split_first() else {
        return g.iter().skip(1).all(|c| ring.is_zero(c));
    };
    let target = if d < g.len() { g[d].clone() } else { ring.zero() };
    for ms in multisets(ring.conductor(), k) {
        let sum = ms.iter().fold(ring.zero(), |acc, &j| ring.add(&acc, &ring.root(j)));
        if sum != target {
            continue;
        }
        let mut h = g.to_vec();
        for &j in &ms {
            shift_mul(ring, &mut h, &ring.root(j), d);
        }
        let mark = out.len();
        out.extend(ms.iter().map(|&j| (d as u32, j)));
        if fit(ring, &h, rest, out) {
            return true;
        }
        out.truncate(mark);
    }
    false
}

/// The `(d_i, eps_i)` with `twisted_molien = prod 1/(1 - eps_i t^{d_i})`.
///
/// Only the multiset of eigenvalues at each degree is determined. A residue
/// scalar `zeta` of order `e` multiplies `eps_i` by `zeta^{d_i}`, with `zeta`
/// identified with `exp(2 pi i/e)`; counts of `eps_i = 1` do not depend on
/// that identification because each degree's multiset is Galois-stable.
pub fn twisting_eigenvalues(
    e: &WeylEnumeration,
    generators: &[IntMatrix],
    phi: &DatumAutomorphism,
    deg: &DegreeData,
) -> Result<Vec<(u32, RootOfUnity)>> {
    let m = crate::rootdata::matrix_order(phi.matrix()).ok_or(Error::TauInfiniteOrder)?;
    let series = twisted_molien(e, generators, phi)?;
    let total: usize = deg.degrees.iter().map(|&d| d as usize).sum::<usize>()
        + deg.degrees.iter().copied().max().unwrap_or(0) as usize;
    let coeffs =
        series.expand(total).map_err(|_| Error::NoConsistentEigenvalues("twisted series is not integral".into()))?;
    let ring = CyclotomicRing::new(m);
    let g: Vec<CyclotomicElement> = coeffs
        .iter()
        .map(|c| i128::try_from(c).map(|x| ring.from_int(x)).map_err(|_| Error::Overflow("twisted series coefficient")))
        .collect::<Result<_>>()?;
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &d in &deg.degrees {
        match groups.last_mut() {
            Some((x, k)) if *x == d as usize => *k += 1,
            _ => groups.push((d as usize, 1)),
        }
    }
    let mut out = Vec::new();
    if !fit(&ring, &g, &groups, &mut out) {
        return Err(Error::NoConsistentEigenvalues(format!(
            "series {series} does not factor over degrees {:?}",
            deg.degrees
        )));
    }
    let zeta = match phi.scalar() {
        None => RootOfUnity::ONE,
        Some(u) if u.is_root_of_unity() => RootOfUnity::new(1, u.order_at_precision()),
        Some(_) => return Err(Error::TauInfiniteOrder),
    };
    let mut eps: Vec<(u32, RootOfUnity)> =
        out.into_iter().map(|(d, j)| (d, RootOfUnity::new(j, m).mul(&zeta.pow(d as u64)))).collect();
    eps.sort();
    Ok(eps)
}

/// `#{i : eps_i = 1}`.
pub fn springer_rank(eigenvalues: &[(u32, RootOfUnity)]) -> usize {
    eigenvalues.iter().filter(|(_, z)| z.is_one()).count()
}

/// Degrees `d_i` with `eps_i = 1`: the degrees of the relative Weyl group.
pub fn lehrer_springer_degrees(eigenvalues: &[(u32, RootOfUnity)]) -> Vec<u32> {
    eigenvalues.iter().filter(|(_, z)| z.is_one()).map(|(d, _)| *d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::{diagram_automorphism, gl_datum, sign_automorphism, simple_datum, torus_datum, Isogeny};

    fn sc(ty: DynkinType, n: usize) -> RootDatum {
        simple_datum(ty, n, Isogeny::Sc).unwrap()
    }

    #[test]
    fn small_orders() {
        assert_eq!(enumerate_weyl(&sc(DynkinType::A, 1), DEFAULT_CAP).unwrap().order(), 2);
        assert_eq!(enumerate_weyl(&sc(DynkinType::A, 2), DEFAULT_CAP).unwrap().order(), 6);
        assert_eq!(enumerate_weyl(&sc(DynkinType::D, 4), DEFAULT_CAP).unwrap().order(), 192);
        assert_eq!(enumerate_weyl(&torus_datum(2), DEFAULT_CAP).unwrap().order(), 1);
        assert!(matches!(
            enumerate_weyl(&sc(DynkinType::E, 8), 1_000_000),
            Err(Error::CapExceeded { cap: 1_000_000, .. })
        ));
        assert!(matches!(
            WeylEnumeration::generate(2, sc(DynkinType::G, 2).generators(), Coefficients::Integer, 5),
            Err(Error::CapExceeded { cap: 5, .. })
        ));
    }

    #[test]
    fn orbit_chain_orders() {
        let order = |t, n| weyl_order_from_cartan(&cartan_matrix(t, n).unwrap());
        assert_eq!(order(DynkinType::E, 8), 696_729_600);
        assert_eq!(order(DynkinType::E, 7), 2_903_040);
        assert_eq!(order(DynkinType::F, 4), 1152);
        assert_eq!(order(DynkinType::B, 4), 384);
        assert_eq!(positive_root_count(&cartan_matrix(DynkinType::E, 8).unwrap()), 120);
        assert_eq!(positive_root_count(&cartan_matrix(DynkinType::G, 2).unwrap()), 6);
    }

    #[test]
    fn molien_examples() {
        let series = |d: &RootDatum| molien_series(&enumerate_weyl(d, DEFAULT_CAP).unwrap()).unwrap();
        assert_eq!(series(&sc(DynkinType::A, 1)), PoincareSeries::from_degrees(&[2]));
        assert_eq!(series(&sc(DynkinType::A, 2)), PoincareSeries::from_degrees(&[2, 3]));
        assert_eq!(series(&sc(DynkinType::G, 2)), PoincareSeries::from_degrees(&[2, 6]));
    }

    #[test]
    fn degree_examples() {
        assert_eq!(degrees(&sc(DynkinType::F, 4)).unwrap().degrees, vec![2, 6, 8, 12]);
        assert_eq!(degrees(&gl_datum(3).unwrap()).unwrap().degrees, vec![1, 2, 3]);
        let e8 = degrees(&sc(DynkinType::E, 8)).unwrap();
        assert_eq!(e8.degrees, vec![2, 8, 12, 14, 18, 20, 24, 30]);
        assert_eq!(e8.source, DegreeSource::Table);
        assert_eq!(degrees(&torus_datum(0)).unwrap().degrees, Vec::<u32>::new());
    }

    #[test]
    fn twisted_examples() {
        let a2 = sc(DynkinType::A, 2);
        let e = enumerate_weyl(&a2, DEFAULT_CAP).unwrap();
        let flip = diagram_automorphism(&a2, &[1, 0]).unwrap();
        let s = twisted_molien(&e, a2.generators(), &flip).unwrap();
        let expect = PoincareSeries::reciprocal_of(ZPoly::binomial(-1, 2).mul(&ZPoly::binomial(1, 3))).unwrap();
        assert_eq!(s, expect);
        let deg = degrees_of_group(&e).unwrap();
        let eps = twisting_eigenvalues(&e, a2.generators(), &flip, &deg).unwrap();
        assert_eq!(eps, vec![(2, RootOfUnity::ONE), (3, RootOfUnity::new(1, 2))]);
        assert_eq!(springer_rank(&eps), 1);

        let a1 = sc(DynkinType::A, 1);
        let e1 = enumerate_weyl(&a1, DEFAULT_CAP).unwrap();
        let neg = sign_automorphism(&a1, -1);
        assert_eq!(twisted_molien(&e1, a1.generators(), &neg).unwrap(), PoincareSeries::from_degrees(&[2]));
        let deg1 = degrees_of_group(&e1).unwrap();
        assert_eq!(twisting_eigenvalues(&e1, a1.generators(), &neg, &deg1).unwrap(), vec![(2, RootOfUnity::ONE)]);
    }

    #[test]
    fn triality_eigenvalues() {
        let d4 = sc(DynkinType::D, 4);
        let e = enumerate_weyl(&d4, DEFAULT_CAP).unwrap();
        let t = diagram_automorphism(&d4, &[2, 1, 3, 0]).unwrap();
        let deg = degrees_of_group(&e).unwrap();
        assert_eq!(deg.degrees, vec![2, 4, 4, 6]);
        let eps = twisting_eigenvalues(&e, d4.generators(), &t, &deg).unwrap();
        assert_eq!(
            eps,
            vec![
                (2, RootOfUnity::ONE),
                (4, RootOfUnity::new(1, 3)),
                (4, RootOfUnity::new(2, 3)),
                (6, RootOfUnity::ONE)
            ]
        );
        assert_eq!(springer_rank(&eps), 2);
    }

    #[test]
    fn non_normalizing_twist_is_rejected() {
        let a2 = sc(DynkinType::A, 2);
        let e = enumerate_weyl(&a2, DEFAULT_CAP).unwrap();
        let m = IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]], 2).unwrap();
        let phi = DatumAutomorphism::from_matrix(m, crate::rootdata::AutomorphismKind::Composite);
        assert!(matches!(twisted_molien(&e, a2.generators(), &phi), Err(Error::NormalizationFailed(_))));
    }
}
