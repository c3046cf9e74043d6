//! Fixed lattices of automorphisms, maximal-rank lifts, relative Weyl
//! groups and the fixed-point root datum `(N_W(L^phi)/C_W(L^phi), L^phi, L0^phi)`.

use rayon::prelude::*;
use serde::Serialize;

use crate::cyclotomic::RootOfUnity;
use crate::error::{Error, Result};
use crate::invariants::{
    degrees_of_group, lehrer_springer_degrees, springer_rank, twisting_eigenvalues, DegreeData, DegreeSource,
    WeylEnumeration,
};
use crate::lattice::{column_hermite_form, smith_in};
use crate::matrix::{Coefficients, IntMatrix};
use crate::padic::{is_prime, teichmuller_lift, PAdicUnit};
use crate::rootdata::{DatumAutomorphism, FundamentalGroupSnf, RootDatum};

/// A saturated sublattice `S` of `L = Z^r` (or `(Z/l^k)^r`), with the maps
/// needed to test membership and take coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    basis: IntMatrix,
    projector: IntMatrix,
    annihilator: IntMatrix,
    coefficients: Coefficients,
}

impl Sublattice {
    /// The sublattice spanned by independent columns; fails unless saturated.
    pub fn saturated(basis: &IntMatrix, coefficients: Coefficients) -> Result<Self> {
        let basis = column_hermite_form(basis, coefficients)?;
        let r = basis.rows();
        let s = basis.cols();
        let snf = smith_in(&basis, coefficients)?;
        if snf.diagonal.iter().any(|&d| d != 1) {
            return Err(Error::Inconsistent("sublattice is not saturated".into()));
        }
        // U B V = [I; 0]: coordinates are V [I 0] U v, membership is [0 I] U v = 0
        let top: Vec<usize> = (0..s).collect();
        let bottom: Vec<usize> = (s..r).collect();
        let projector = snf.right.mul_in(&snf.left.select_rows(&top), coefficients);
        let annihilator = snf.left.select_rows(&bottom);
        Ok(Sublattice { basis, projector, annihilator, coefficients })
    }

    pub fn ambient_rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    /// Basis as columns, in canonical Hermite form.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coefficients
    }

    pub fn is_saturated(&self) -> bool {
        true
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        self.annihilator.mul_vec_in(v, self.coefficients).iter().all(|&x| x == 0)
    }

    /// Coordinates of a member of `S` in the basis.
    pub fn coordinates(&self, v: &[i64]) -> Vec<i64> {
        self.projector.mul_vec_in(v, self.coefficients)
    }

    /// Whether `w(S) = S`.
    pub fn is_stable_under(&self, w: &IntMatrix) -> bool {
        let c = self.coefficients;
        self.annihilator.mul_in(w, c).mul_in(&self.basis, c).is_zero()
    }

    /// The action of `w` on `S` in basis coordinates.
    pub fn restrict(&self, w: &IntMatrix) -> IntMatrix {
        let c = self.coefficients;
        self.projector.mul_in(w, c).mul_in(&self.basis, c)
    }
}

impl Serialize for Sublattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Sublattice", 4)?;
        st.serialize_field("ambient_rank", &self.ambient_rank())?;
        st.serialize_field("basis_columns", &self.basis.transpose().to_rows())?;
        st.serialize_field("rank", &self.rank())?;
        st.serialize_field("saturated", &true)?;
        st.end()
    }
}

fn kernel_columns(a: &IntMatrix, coefficients: Coefficients) -> Result<IntMatrix> {
    let snf = smith_in(a, coefficients)?;
    let n = a.cols();
    let zero: Vec<usize> = (0..n).filter(|&j| j >= snf.diagonal.len() || snf.diagonal[j] == 0).collect();
    Ok(snf.right.select_columns(&zero))
}

fn fixed_lattice_in(m: &IntMatrix, coefficients: Coefficients) -> Result<Sublattice> {
    let k = kernel_columns(&m.minus_identity_in(coefficients), coefficients)?;
    Sublattice::saturated(&k, coefficients)
}

/// The same automorphism read at precision `k + 2`, recomputing a root-of-unity scalar there.
fn at_higher_precision(phi: &DatumAutomorphism) -> Result<Option<(IntMatrix, Coefficients)>> {
    let Some(u) = phi.scalar() else { return Ok(None) };
    let k2 = u.precision() + 2;
    let lifted = PAdicUnit::new(u.residue() as i128, u.prime(), k2)?;
    let z = if u.is_root_of_unity() { teichmuller_lift(&lifted) } else { lifted };
    let c = Coefficients::Residue { prime: u.prime(), precision: k2 };
    Ok(Some((phi.matrix().scale_in(z.residue() as i64, c), c)))
}

/// `L^phi`: the saturated kernel of `phi - I`. With a residue scalar the
/// kernel is computed mod `l^k` and its rank re-certified at `l^{k+2}`.
pub fn fixed_lattice(phi: &DatumAutomorphism) -> Result<Sublattice> {
    let s = fixed_lattice_in(&phi.full_matrix(), phi.coefficients())?;
    if let Some((m2, c2)) = at_higher_precision(phi)? {
        let r2 = smith_in(&m2.minus_identity_in(c2), c2)?;
        let rank2 = m2.rows() - r2.rank();
        if rank2 != s.rank() {
            return Err(Error::PrecisionUnstableRank { at_k: s.rank(), at_k2: rank2 });
        }
    }
    Ok(s)
}

/// The rank of `L^phi` for a full matrix, without building the sublattice.
fn fixed_rank(m: &IntMatrix, coefficients: Coefficients) -> Result<usize> {
    Ok(m.rows() - smith_in(&m.minus_identity_in(coefficients), coefficients)?.rank())
}

/// Candidate lifts `tau * w` of prime-to-`l` order, with their fixed ranks.
fn lift_candidates(e: &WeylEnumeration, tau: &DatumAutomorphism, ell: u64) -> Result<Vec<(DatumAutomorphism, usize)>> {
    let c = tau.coefficients();
    let found: Vec<Result<Option<(DatumAutomorphism, usize)>>> = (0..e.order())
        .into_par_iter()
        .map(|i| {
            let phi = tau.compose_matrix(&e.element(i));
            match phi.order() {
                Some(n) if n % ell != 0 => {
                    let r = fixed_rank(&phi.full_matrix(), c)?;
                    Ok(Some((phi, r)))
                }
                _ => Ok(None),
            }
        })
        .collect();
    let mut out = Vec::new();
    for f in found {
        if let Some(x) = f? {
            out.push(x);
        }
    }
    Ok(out)
}

fn check_prime(ell: u64) -> Result<()> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    Ok(())
}

/// The lift `phi = tau * w` (`w` in `W`, `l` not dividing `ord(phi)`)
/// whose fixed lattice has maximal rank; ties go to the lexicographically
/// least full matrix.
pub fn best_lift(e: &WeylEnumeration, tau: &DatumAutomorphism, ell: u64) -> Result<DatumAutomorphism> {
    check_prime(ell)?;
    let mut cands = lift_candidates(e, tau, ell)?;
    let best = cands.iter().map(|(_, r)| *r).max().ok_or(Error::NoPrimeOrderLift(ell))?;
    cands.retain(|(_, r)| *r == best);
    cands.sort_by_cached_key(|(p, _)| p.full_matrix());
    Ok(cands.swap_remove(0).0)
}

/// All maximal-rank prime-to-`l` lifts, sorted by full matrix.
pub fn maximal_lifts(e: &WeylEnumeration, tau: &DatumAutomorphism, ell: u64) -> Result<Vec<DatumAutomorphism>> {
    check_prime(ell)?;
    let cands = lift_candidates(e, tau, ell)?;
    let best = cands.iter().map(|(_, r)| *r).max().ok_or(Error::NoPrimeOrderLift(ell))?;
    let mut out: Vec<DatumAutomorphism> = cands.into_iter().filter(|(_, r)| *r == best).map(|(p, _)| p).collect();
    out.sort_by_cached_key(|p| p.full_matrix());
    Ok(out)
}

/// `N_W(S)/C_W(S)`: elements preserving `S`, restricted to `S`, duplicates collapsed.
pub fn relative_weyl(e: &WeylEnumeration, s: &Sublattice) -> Result<WeylEnumeration> {
    let restricted: Vec<IntMatrix> = (0..e.order())
        .into_par_iter()
        .filter_map(|i| {
            let w = e.element(i);
            s.is_stable_under(&w).then(|| s.restrict(&w))
        })
        .collect();
    let mut uniq = restricted;
    uniq.sort();
    uniq.dedup();
    WeylEnumeration::from_elements(s.rank(), &uniq, s.coefficients())
}

/// Reflections of `w` chosen greedily (in enumeration order) until they generate it.
fn reflection_generators(w: &WeylEnumeration) -> Result<Vec<IntMatrix>> {
    let mut gens: Vec<IntMatrix> = Vec::new();
    let mut current = 1usize;
    for r in w.reflections()? {
        if current == w.order() {
            break;
        }
        let mut trial = gens.clone();
        trial.push(r);
        let sub = WeylEnumeration::generate(w.rank(), &trial, w.coefficients(), w.order())?;
        if sub.order() > current {
            current = sub.order();
            gens = trial;
        }
    }
    if current != w.order() {
        return Err(Error::Inconsistent(format!(
            "relative Weyl group of order {} is not generated by its reflections",
            w.order()
        )));
    }
    Ok(gens)
}

/// `L0 ∩ S` in the basis coordinates of `S`.
fn coroot_intersection(d: &RootDatum, s: &Sublattice) -> Result<IntMatrix> {
    let c = s.coefficients();
    let b = s.basis();
    let l0 = d.coroot_basis().reduced(c);
    let stacked = b.hstack(&l0.scale_in(-1, c));
    let k = kernel_columns(&stacked, c)?;
    let top: Vec<usize> = (0..b.cols()).collect();
    column_hermite_form(&k.select_rows(&top), c)
}

/// The fixed-point datum of a twisting, with the chosen lift and the Springer data.
#[derive(Clone, Debug, Serialize)]
pub struct FixedDatum {
    #[serde(serialize_with = "serialize_datum")]
    pub datum: RootDatum,
    pub lift: DatumAutomorphism,
    pub lattice: Sublattice,
    pub relative_order: usize,
    pub degrees: DegreeData,
    pub eigenvalues: Vec<(u32, RootOfUnity)>,
    pub springer_rank: usize,
    pub fundamental_group: FundamentalGroupSnf,
}

fn serialize_datum<S: serde::Serializer>(d: &RootDatum, s: S) -> std::result::Result<S::Ok, S::Error> {
    d.to_json_value().serialize(s)
}

impl FixedDatum {
    pub fn rank(&self) -> usize {
        self.datum.rank()
    }
}

/// Checks shared by the lift search and the fixed datum: `tau` acts on
/// the right lattice, normalizes `W` and preserves `L0`.
pub fn check_twisting(d: &RootDatum, e: &WeylEnumeration, tau: &DatumAutomorphism) -> Result<()> {
    if tau.rank() != d.rank() {
        return Err(Error::InvalidInput(format!("twisting has rank {}, datum {}", tau.rank(), d.rank())));
    }
    if !e.normalized_by(tau.matrix(), d.generators())? {
        return Err(Error::NormalizationFailed("twisting does not normalize W".into()));
    }
    let c = d.coefficients();
    for j in 0..d.coroot_basis().cols() {
        if !d.in_coroot_lattice(&tau.matrix().mul_vec_in(&d.coroot_basis().column(j), c))? {
            return Err(Error::NormalizationFailed("twisting does not preserve L0".into()));
        }
    }
    Ok(())
}

/// `(N_W(L^phi)/C_W(L^phi), L^phi, L0^phi)` for the maximal-rank lift
/// `phi` of `tau`. The rank is cross-checked against Springer's count and
/// the degrees against the Lehrer–Springer prediction; either mismatch is
/// a hard `SPRINGER_MISMATCH`.
pub fn fixed_datum(d: &RootDatum, e: &WeylEnumeration, tau: &DatumAutomorphism, ell: u64) -> Result<FixedDatum> {
    check_twisting(d, e, tau)?;
    if let Some(u) = tau.scalar() {
        if u.prime() != ell {
            return Err(Error::ContextMismatch(format!("l = {ell}"), format!("scalar over l = {}", u.prime())));
        }
    }
    let lift = best_lift(e, tau, ell)?;
    let lattice = fixed_lattice(&lift)?;
    fixed_datum_for_lift(d, e, tau, lift, lattice)
}

fn fixed_datum_for_lift(
    d: &RootDatum,
    e: &WeylEnumeration,
    tau: &DatumAutomorphism,
    lift: DatumAutomorphism,
    lattice: Sublattice,
) -> Result<FixedDatum> {
    let rel = relative_weyl(e, &lattice)?;
    let gens = reflection_generators(&rel)?;
    let l0 = coroot_intersection(d, &lattice)?;
    let datum = RootDatum::new(lattice.rank(), gens, l0, None, lattice.coefficients())?;
    let violations = datum.validate();
    if !violations.is_empty() {
        let v: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(Error::Inconsistent(format!("fixed datum fails validation: {}", v.join("; "))));
    }
    let full_degrees = degrees_of_group(e)?;
    let eigenvalues = twisting_eigenvalues(e, d.generators(), tau, &full_degrees)?;
    let springer = springer_rank(&eigenvalues);
    if springer != lattice.rank() {
        return Err(Error::SpringerMismatch(format!(
            "fixed lattice has rank {} but {springer} twisting eigenvalues are 1",
            lattice.rank()
        )));
    }
    let predicted = DegreeData::new(lehrer_springer_degrees(&eigenvalues), DegreeSource::LehrerSpringer);
    let degrees = if lattice.coefficients().is_integer() {
        let computed = degrees_of_group(&rel)?;
        if computed.degrees != predicted.degrees {
            return Err(Error::SpringerMismatch(format!(
                "relative Weyl group has degrees {:?}, eigenvalue-1 degrees are {:?}",
                computed.degrees, predicted.degrees
            )));
        }
        computed
    } else {
        if predicted.product() != rel.order() as u128 || predicted.reflection_count() != rel.reflection_count()? {
            return Err(Error::SpringerMismatch(format!(
                "degrees {:?} do not match |W'| = {} and its pseudo-reflections",
                predicted.degrees,
                rel.order()
            )));
        }
        predicted
    };
    let fundamental_group = datum.fundamental_group()?;
    Ok(FixedDatum {
        relative_order: rel.order(),
        datum,
        lift,
        lattice,
        degrees,
        eigenvalues,
        springer_rank: springer,
        fundamental_group,
    })
}

/// Fixed-datum fingerprints over every maximal-rank lift, and whether they agree.
#[derive(Clone, Debug, Serialize)]
pub struct LiftDiagnostic {
    pub lifts: usize,
    pub fingerprints: Vec<(Vec<u32>, usize, FundamentalGroupSnf)>,
    pub agree: bool,
}

pub fn lift_diagnostic(
    d: &RootDatum,
    e: &WeylEnumeration,
    tau: &DatumAutomorphism,
    ell: u64,
) -> Result<LiftDiagnostic> {
    check_twisting(d, e, tau)?;
    let lifts = maximal_lifts(e, tau, ell)?;
    let mut prints = Vec::new();
    for phi in &lifts {
        let lattice = fixed_lattice(phi)?;
        let f = fixed_datum_for_lift(d, e, tau, phi.clone(), lattice)?;
        prints.push((f.degrees.degrees, f.relative_order, f.fundamental_group));
    }
    prints.sort();
    prints.dedup();
    Ok(LiftDiagnostic { lifts: lifts.len(), agree: prints.len() <= 1, fingerprints: prints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{enumerate_weyl, DEFAULT_CAP};
    use crate::rootdata::{
        diagram_automorphism, product, scalar_automorphism, sign_automorphism, simple_datum, AutomorphismKind,
        DynkinType, Isogeny,
    };

    fn sc(ty: DynkinType, n: usize) -> RootDatum {
        simple_datum(ty, n, Isogeny::Sc).unwrap()
    }

    #[test]
    fn fixed_lattice_examples() {
        let id = DatumAutomorphism::identity(3);
        assert_eq!(fixed_lattice(&id).unwrap().rank(), 3);
        let neg = DatumAutomorphism::from_matrix(IntMatrix::scalar(2, -1), AutomorphismKind::Scalar);
        assert_eq!(fixed_lattice(&neg).unwrap().rank(), 0);
        let swap = DatumAutomorphism::from_matrix(IntMatrix::permutation(&[1, 0]), AutomorphismKind::Diagram);
        let s = fixed_lattice(&swap).unwrap();
        assert_eq!(s.basis().to_rows(), vec![vec![1], vec![1]]);
        assert!(s.contains(&[3, 3]));
        assert!(!s.contains(&[1, 2]));
        assert_eq!(s.coordinates(&[3, 3]), vec![3]);
    }

    #[test]
    fn a2_minus_one_at_three() {
        let a2 = sc(DynkinType::A, 2);
        let e = enumerate_weyl(&a2, DEFAULT_CAP).unwrap();
        let tau = sign_automorphism(&a2, -1);
        let phi = best_lift(&e, &tau, 3).unwrap();
        assert_eq!(phi.order(), Some(2));
        assert_eq!(fixed_lattice(&phi).unwrap().rank(), 1);
        let f = fixed_datum(&a2, &e, &tau, 3).unwrap();
        assert_eq!((f.rank(), f.relative_order, f.degrees.degrees.clone()), (1, 2, vec![2]));
    }

    #[test]
    fn triality_fixed_datum() {
        let d4 = sc(DynkinType::D, 4);
        let e = enumerate_weyl(&d4, DEFAULT_CAP).unwrap();
        let t = diagram_automorphism(&d4, &[2, 1, 3, 0]).unwrap();
        let f = fixed_datum(&d4, &e, &t, 2).unwrap();
        assert_eq!(f.rank(), 2);
        assert_eq!(f.relative_order, 12);
        assert_eq!(f.degrees.degrees, vec![2, 6]);
        assert!(f.fundamental_group.is_trivial());
    }

    #[test]
    fn factor_swap() {
        let a1 = sc(DynkinType::A, 1);
        let d = product(&a1, &a1).unwrap();
        let e = enumerate_weyl(&d, DEFAULT_CAP).unwrap();
        let swap = diagram_automorphism(&d, &[1, 0]).unwrap();
        let phi = best_lift(&e, &swap, 3).unwrap();
        assert_eq!(phi.matrix().to_rows(), vec![vec![0, -1], vec![-1, 0]]);
        let f = fixed_datum(&d, &e, &swap, 3).unwrap();
        assert_eq!((f.rank(), f.relative_order, f.degrees.degrees.clone()), (1, 2, vec![2]));
        let s = relative_weyl(
            &e,
            &fixed_lattice(&DatumAutomorphism::from_matrix(IntMatrix::permutation(&[1, 0]), AutomorphismKind::Diagram))
                .unwrap(),
        )
        .unwrap();
        assert_eq!(s.order(), 2);
    }

    #[test]
    fn identity_reproduces_the_datum() {
        for d in [sc(DynkinType::G, 2), simple_datum(DynkinType::B, 3, Isogeny::Ad).unwrap()] {
            let e = enumerate_weyl(&d, DEFAULT_CAP).unwrap();
            let f = fixed_datum(&d, &e, &DatumAutomorphism::identity(d.rank()), 5).unwrap();
            assert_eq!(f.relative_order, e.order());
            assert_eq!(f.fundamental_group, d.fundamental_group().unwrap());
            assert_eq!(f.degrees.degrees, degrees_of_group(&e).unwrap().degrees);
        }
    }

    #[test]
    fn cube_root_twist_at_seven() {
        // q = 2 at l = 7 has e = 3; the fixed datum is the line with mu_3 acting
        let a2 = sc(DynkinType::A, 2);
        let e = enumerate_weyl(&a2, DEFAULT_CAP).unwrap();
        let zeta = teichmuller_lift(&PAdicUnit::new(2, 7, 6).unwrap());
        let tau = scalar_automorphism(&a2, &zeta);
        let f = fixed_datum(&a2, &e, &tau, 7).unwrap();
        assert_eq!(f.rank(), 1);
        assert_eq!(f.relative_order, 3);
        assert_eq!(f.degrees.degrees, vec![3]);
        assert!(f.datum.is_valid());
    }

    #[test]
    fn lifts_agree_on_small_cases() {
        let a2 = sc(DynkinType::A, 2);
        let e = enumerate_weyl(&a2, DEFAULT_CAP).unwrap();
        let diag = lift_diagnostic(&a2, &e, &sign_automorphism(&a2, -1), 3).unwrap();
        assert!(diag.lifts >= 3);
        assert!(diag.agree);
    }
}
