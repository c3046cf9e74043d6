//! End-to-end untwisting, classification keys, fundamental-class verdicts,
//! Tezuka reports, fingerprints and input parsing.

use std::path::Path;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::cohomology::{
    em_collapse_check, module_rank_one_check, poincare_series, psiq_action, CollapseReport, PsiqAction, PsiqVerdict,
    RankOneReport, Selector,
};
use crate::cyclotomic::RootOfUnity;
use crate::error::{Error, Result};
use crate::fixedpoint::{fixed_datum, FixedDatum, Sublattice};
use crate::invariants::{degrees_with_cap, enumerate_weyl, DegreeData};
use crate::matrix::IntMatrix;
use crate::padic::{is_prime, unit_valuation, untwist_factor, PAdicUnit, Valuation, DEFAULT_PRECISION};
use crate::rootdata::{
    default_diagram_permutation, diagram_automorphism, scalar_automorphism, simple_datum, AutomorphismKind,
    DatumAutomorphism, DynkinType, FundamentalGroupSnf, Isogeny, Label, LabelFactor, RootDatum,
};

/// `(sorted degrees, Weyl group order, pi_1 Smith form)`. Equal data have
/// equal fingerprints; the converse fails in general.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Fingerprint {
    pub degrees: Vec<u32>,
    pub weyl_order: u128,
    pub fundamental_group: FundamentalGroupSnf,
}

impl Fingerprint {
    pub fn new(degrees: Vec<u32>, weyl_order: u128, fundamental_group: FundamentalGroupSnf) -> Result<Self> {
        let product: u128 = degrees.iter().map(|&d| d as u128).product();
        if product != weyl_order {
            return Err(Error::Inconsistent(format!("degrees {degrees:?} multiply to {product}, not {weyl_order}")));
        }
        Ok(Fingerprint { degrees, weyl_order, fundamental_group })
    }

    fn of_fixed(f: &FixedDatum) -> Result<Self> {
        Self::new(f.degrees.degrees.clone(), f.relative_order as u128, f.fundamental_group.clone())
    }
}

pub fn fingerprint(d: &RootDatum, cap: usize) -> Result<Fingerprint> {
    let deg = degrees_with_cap(d, cap)?;
    let order = deg.product();
    Fingerprint::new(deg.degrees, order, d.fundamental_group()?)
}

/// `q = zeta * q'`, `tau_e = tau psi^zeta` and the fixed-point datum of `tau_e`.
#[derive(Clone, Debug)]
pub struct UntwistResult {
    pub e: u64,
    pub zeta: PAdicUnit,
    pub q_prime: PAdicUnit,
    pub tau_e: DatumAutomorphism,
    pub fixed: FixedDatum,
    pub valuation: Valuation,
}

impl UntwistResult {
    pub fn chosen_lift(&self) -> &DatumAutomorphism {
        &self.fixed.lift
    }

    pub fn fixed_datum(&self) -> &RootDatum {
        &self.fixed.datum
    }

    pub fn fingerprint(&self) -> Result<Fingerprint> {
        Fingerprint::of_fixed(&self.fixed)
    }
}

impl Serialize for UntwistResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::{Error as _, SerializeStruct};
        let fp = self.fingerprint().map_err(S::Error::custom)?;
        let two_adic = self.q_prime.prime() == 2 && self.q_prime.precision() >= 2;
        let mut st = s.serialize_struct("UntwistResult", 10 + two_adic as usize)?;
        st.serialize_field("chosen_lift", self.chosen_lift())?;
        st.serialize_field("e", &self.e)?;
        st.serialize_field("eigenvalues", &self.fixed.eigenvalues)?;
        st.serialize_field("fingerprint", &fp)?;
        st.serialize_field("fixed_datum", &self.fixed.datum.to_json_value())?;
        st.serialize_field("q_prime", &self.q_prime)?;
        if two_adic {
            st.serialize_field("q_prime_mod4", &self.q_prime.mod4())?;
        }
        st.serialize_field("springer_rank", &self.fixed.springer_rank)?;
        st.serialize_field("tau_e", &self.tau_e)?;
        st.serialize_field("valuation", &self.valuation)?;
        st.serialize_field("zeta", &self.zeta)?;
        st.end()
    }
}

/// The order of `tau`, rejecting infinite orders and orders divisible by `l`.
fn checked_tau_order(tau: &DatumAutomorphism, ell: u64) -> Result<u64> {
    let order = tau.order().ok_or(Error::TauInfiniteOrder)?;
    if order % ell == 0 {
        return Err(Error::TauOrderDivisibleByEll { order, prime: ell });
    }
    Ok(order)
}

/// The datum itself as the fixed datum of the identity; needs no enumeration
/// when degrees are available from tables.
fn identity_fixed_datum(d: &RootDatum, cap: usize) -> Result<FixedDatum> {
    let degrees = degrees_with_cap(d, cap)?;
    let n = d.rank();
    let lattice = Sublattice::saturated(&IntMatrix::identity(n), d.coefficients())?;
    let relative_order = degrees.product().to_usize().ok_or(Error::Overflow("relative Weyl group order"))?;
    let eigenvalues = degrees.degrees.iter().map(|&k| (k, RootOfUnity::ONE)).collect();
    Ok(FixedDatum {
        datum: d.clone(),
        lift: DatumAutomorphism::identity(n),
        lattice,
        relative_order,
        springer_rank: degrees.degrees.len(),
        degrees,
        eigenvalues,
        fundamental_group: d.fundamental_group()?,
    })
}

/// Replace the twisted form over `q` by an untwisted form of the fixed
/// datum of `tau_e` over `q'`, with `q' = 1 mod l`.
pub fn untwist(d: &RootDatum, tau: &DatumAutomorphism, q: &PAdicUnit, cap: usize) -> Result<UntwistResult> {
    let ell = q.prime();
    if tau.rank() != d.rank() {
        return Err(Error::InvalidInput(format!("twisting has rank {}, datum {}", tau.rank(), d.rank())));
    }
    let violations = d.validate();
    if let Some(v) = violations.first() {
        return Err(Error::InvalidInput(format!("invalid root datum: {v}")));
    }
    checked_tau_order(tau, ell)?;
    let f = untwist_factor(q);
    let tau_e = tau.compose(&scalar_automorphism(d, &f.zeta))?;
    let fixed = if tau_e.is_identity() {
        identity_fixed_datum(d, cap)?
    } else {
        let e = enumerate_weyl(d, cap)?;
        fixed_datum(d, &e, &tau_e, ell)?
    };
    Ok(UntwistResult { e: f.e, zeta: f.zeta, q_prime: f.q_prime, tau_e, fixed, valuation: unit_valuation(&f.q_prime) })
}

/// `(fingerprint of the fixed datum, v_l(q' - 1))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ClassificationKey {
    pub fingerprint: Fingerprint,
    pub valuation: u32,
}

pub fn classification_key(r: &UntwistResult) -> Result<ClassificationKey> {
    let valuation = r.valuation.finite().ok_or(Error::ValuationAtPrecision)?;
    Ok(ClassificationKey { fingerprint: r.fingerprint()?, valuation })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    GuaranteedThmExamples,
    GuaranteedThmExamples2,
    Unknown,
}

impl VerdictStatus {
    pub fn is_guaranteed(&self) -> bool {
        *self != VerdictStatus::Unknown
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictStatus::GuaranteedThmExamples => "GUARANTEED_THM_EXAMPLES",
            VerdictStatus::GuaranteedThmExamples2 => "GUARANTEED_THM_EXAMPLES2",
            VerdictStatus::Unknown => "UNKNOWN",
        }
    }
}

/// Verdict for one `tau`-stable block of factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockVerdict {
    pub factors: String,
    pub status: VerdictStatus,
    pub reasons: Vec<&'static str>,
}

/// Whether `BG^{h tau_e}(q)` is guaranteed a fundamental class, and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub reasons: Vec<&'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockVerdict>,
}

pub const TAG_SIMPLY_CONNECTED: &str = "SIMPLY_CONNECTED";
pub const TAG_TAU_ORDER_PRIME_TO_ELL: &str = "TAU_ORDER_PRIME_TO_ELL";
pub const TAG_NO_EXCLUDED_SUMMAND: &str = "NO_EXCLUDED_SUMMAND";
pub const TAG_POLYNOMIAL_OR_SPIN: &str = "POLYNOMIAL_OR_SPIN_FACTORS";
pub const TAG_TAU_TRIVIAL: &str = "TAU_TRIVIAL";
pub const TAG_PRODUCT_CLOSURE: &str = "PRODUCT_CLOSURE";
pub const TAG_NOT_SIMPLY_CONNECTED: &str = "NOT_SIMPLY_CONNECTED";
pub const TAG_EXCLUDED_CASE: &str = "EXCLUDED_CASE";
pub const TAG_NONPOLYNOMIAL_FACTOR: &str = "NONPOLYNOMIAL_FACTOR";
pub const TAG_TAU_INFINITE_ORDER: &str = "TAU_INFINITE_ORDER";
pub const TAG_TAU_ORDER_DIVISIBLE_BY_ELL: &str = "TAU_ORDER_DIVISIBLE_BY_ELL";
pub const TAG_TAU_NONTRIVIAL_AT_TWO: &str = "TAU_NONTRIVIAL_AT_TWO";
pub const TAG_CLASSIFICATION_GAP: &str = "CLASSIFICATION_GAP";

/// The eight `(l, summand)` pairs left open for simply connected groups.
pub fn is_excluded_summand(ty: DynkinType, rank: usize, ell: u64) -> bool {
    match (ell, ty) {
        (5, DynkinType::E) => rank == 8,
        (3, DynkinType::F) => true,
        (3, DynkinType::E) | (2, DynkinType::E) => (6..=8).contains(&rank),
        _ => false,
    }
}

/// `Spin(n)` for some `n`: `B_n`, `D_n` and the low-rank coincidences
/// `A1 = Spin(3)`, `C2 = Spin(5)`, `A3 = Spin(6)`, all simply connected.
pub fn is_spin_factor(f: &LabelFactor) -> bool {
    match *f {
        LabelFactor::Simple { ty, rank, isogeny: Isogeny::Sc } => matches!(
            (ty, rank),
            (DynkinType::B, _) | (DynkinType::D, _) | (DynkinType::A, 1) | (DynkinType::C, 2) | (DynkinType::A, 3)
        ),
        _ => false,
    }
}

/// Whether `H*(BG; F_l)` is polynomial for one labeled factor.
pub fn is_polynomial_factor(f: &LabelFactor, ell: u64) -> Result<bool> {
    let LabelFactor::Simple { ty, rank, isogeny } = *f else { return Ok(true) };
    let pi1 = simple_datum(ty, rank, isogeny)?.fundamental_group()?;
    if ell != 2 {
        return Ok(!pi1.has_torsion_at(ell) && !is_excluded_summand(ty, rank, ell));
    }
    if !pi1.has_torsion_at(2) {
        // E_6, E_7, E_8 and Spin(n), n >= 10, are the non-polynomial covers.
        let big_spin = matches!(ty, DynkinType::B | DynkinType::D) && rank >= 5;
        return Ok(!(ty == DynkinType::E || big_spin));
    }
    // SO(2n+1), PSp(n) for odd n, and PSp(2) = SO(5)
    Ok(match ty {
        DynkinType::A => rank == 1,
        DynkinType::B => true,
        DynkinType::C => rank % 2 == 1 || rank == 2,
        _ => false,
    })
}

fn factors_string(fs: &[LabelFactor]) -> String {
    Label::new(fs.to_vec()).map(|l| l.to_string()).unwrap_or_default()
}

fn block_verdict(factors: &[LabelFactor], tau_order: Option<u64>, ell: u64) -> Result<BlockVerdict> {
    let mut fail1 = Vec::new();
    let all_sc = factors.iter().all(|f| matches!(f, LabelFactor::Simple { isogeny: Isogeny::Sc, .. }));
    let mut pi1_trivial = all_sc;
    for f in factors {
        if let LabelFactor::Simple { ty, rank, isogeny } = *f {
            pi1_trivial &= simple_datum(ty, rank, isogeny)?.fundamental_group()?.is_trivial();
        }
    }
    if !pi1_trivial {
        fail1.push(TAG_NOT_SIMPLY_CONNECTED);
    }
    let order_ok = match tau_order {
        None => {
            fail1.push(TAG_TAU_INFINITE_ORDER);
            false
        }
        Some(o) if o % ell == 0 => {
            fail1.push(TAG_TAU_ORDER_DIVISIBLE_BY_ELL);
            false
        }
        Some(_) => true,
    };
    let excluded = factors.iter().any(|f| match *f {
        LabelFactor::Simple { ty, rank, .. } => is_excluded_summand(ty, rank, ell),
        _ => false,
    });
    if excluded {
        fail1.push(TAG_EXCLUDED_CASE);
    }
    let name = factors_string(factors);
    if fail1.is_empty() {
        return Ok(BlockVerdict {
            factors: name,
            status: VerdictStatus::GuaranteedThmExamples,
            reasons: vec![TAG_SIMPLY_CONNECTED, TAG_TAU_ORDER_PRIME_TO_ELL, TAG_NO_EXCLUDED_SUMMAND],
        });
    }
    let mut fail2 = Vec::new();
    let mut poly_or_spin = true;
    for f in factors {
        poly_or_spin &= is_spin_factor(f) || is_polynomial_factor(f, ell)?;
    }
    if !poly_or_spin {
        fail2.push(TAG_NONPOLYNOMIAL_FACTOR);
    }
    let tau_tag = if ell == 2 {
        if tau_order == Some(1) {
            Some(TAG_TAU_TRIVIAL)
        } else {
            fail2.push(TAG_TAU_NONTRIVIAL_AT_TWO);
            None
        }
    } else if order_ok {
        Some(TAG_TAU_ORDER_PRIME_TO_ELL)
    } else {
        None
    };
    if let (true, Some(tag)) = (fail2.is_empty(), tau_tag) {
        return Ok(BlockVerdict {
            factors: name,
            status: VerdictStatus::GuaranteedThmExamples2,
            reasons: vec![TAG_POLYNOMIAL_OR_SPIN, tag],
        });
    }
    let mut reasons = fail1;
    for t in fail2 {
        if !reasons.contains(&t) {
            reasons.push(t);
        }
    }
    Ok(BlockVerdict { factors: name, status: VerdictStatus::Unknown, reasons })
}

/// Partition the label's factors into blocks permuted among themselves by `tau`.
fn tau_blocks(label: &Label, tau: &DatumAutomorphism) -> Vec<Vec<usize>> {
    let mut ranges = Vec::new();
    let mut start = 0;
    for f in label.factors() {
        ranges.push(start..start + f.lattice_rank());
        start += f.lattice_rank();
    }
    let k = ranges.len();
    let mut parent: Vec<usize> = (0..k).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    let m = tau.matrix();
    for a in 0..k {
        for b in 0..k {
            if a != b && ranges[a].clone().any(|i| ranges[b].clone().any(|j| m.get(i, j) != 0)) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut root_of = Vec::new();
    for i in 0..k {
        let r = find(&mut parent, i);
        match root_of.iter().position(|&x| x == r) {
            Some(p) => blocks[p].push(i),
            None => {
                root_of.push(r);
                blocks.push(vec![i]);
            }
        }
    }
    blocks
}

fn restrict_to_block(label: &Label, tau: &DatumAutomorphism, block: &[usize]) -> DatumAutomorphism {
    let mut coords = Vec::new();
    let mut start = 0;
    for (i, f) in label.factors().iter().enumerate() {
        if block.contains(&i) {
            coords.extend(start..start + f.lattice_rank());
        }
        start += f.lattice_rank();
    }
    let sub = tau.matrix().select_rows(&coords).select_columns(&coords);
    DatumAutomorphism::with_scalar(sub, tau.scalar().copied(), tau.kind())
}

/// Verdict for data whose matrices differ from their label's constructor:
/// the label is read as the universal cover and `pi_1` is computed.
fn unmatched_verdict(d: &RootDatum, label: &Label, tau: &DatumAutomorphism, ell: u64) -> Result<Verdict> {
    let pi1 = d.fundamental_group()?;
    let simple: Vec<(DynkinType, usize)> = label
        .factors()
        .iter()
        .filter_map(|f| match *f {
            LabelFactor::Simple { ty, rank, .. } => Some((ty, rank)),
            _ => None,
        })
        .collect();
    let excluded = simple.iter().any(|&(t, r)| is_excluded_summand(t, r, ell));
    let order = tau.order();
    let order_ok = order.is_some_and(|o| o % ell != 0);
    if pi1.is_trivial() && order_ok && !excluded {
        let sc_factors: Vec<LabelFactor> =
            simple.iter().map(|&(ty, rank)| LabelFactor::Simple { ty, rank, isogeny: Isogeny::Sc }).collect();
        if sc_factors.len() == label.factors().len() {
            return Ok(Verdict {
                status: VerdictStatus::GuaranteedThmExamples,
                reasons: vec![TAG_SIMPLY_CONNECTED, TAG_TAU_ORDER_PRIME_TO_ELL, TAG_NO_EXCLUDED_SUMMAND],
                blocks: Vec::new(),
            });
        }
    }
    let mut reasons = Vec::new();
    if pi1.has_torsion_at(ell) && ell == 2 {
        reasons.push(TAG_CLASSIFICATION_GAP);
    } else {
        let poly = if ell == 2 {
            !simple.iter().any(|&(t, r)| t == DynkinType::E || (matches!(t, DynkinType::B | DynkinType::D) && r >= 5))
        } else {
            !pi1.has_torsion_at(ell) && !excluded
        };
        if !poly {
            reasons.push(TAG_NONPOLYNOMIAL_FACTOR);
        }
    }
    let tau_tag = match (ell, order) {
        (2, Some(1)) => Some(TAG_TAU_TRIVIAL),
        (2, _) => {
            reasons.push(TAG_TAU_NONTRIVIAL_AT_TWO);
            None
        }
        (_, None) => {
            reasons.push(TAG_TAU_INFINITE_ORDER);
            None
        }
        (_, Some(o)) if o % ell == 0 => {
            reasons.push(TAG_TAU_ORDER_DIVISIBLE_BY_ELL);
            None
        }
        _ => Some(TAG_TAU_ORDER_PRIME_TO_ELL),
    };
    match (reasons.is_empty(), tau_tag) {
        (true, Some(tag)) => Ok(Verdict {
            status: VerdictStatus::GuaranteedThmExamples2,
            reasons: vec![TAG_POLYNOMIAL_OR_SPIN, tag],
            blocks: Vec::new(),
        }),
        _ => Ok(Verdict { status: VerdictStatus::Unknown, reasons, blocks: Vec::new() }),
    }
}

/// Table-driven encoding of the two existence theorems, closed under products
/// of `tau`-stable blocks.
pub fn fundamental_class_verdict(d: &RootDatum, tau: &DatumAutomorphism, ell: u64) -> Result<Verdict> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    let label = d.label().ok_or(Error::UnlabeledDatum)?;
    if tau.rank() != d.rank() {
        return Err(Error::InvalidInput(format!("twisting has rank {}, datum {}", tau.rank(), d.rank())));
    }
    if !d.matches_label()? {
        return unmatched_verdict(d, label, tau, ell);
    }
    let whole = block_verdict(label.factors(), tau.order(), ell)?;
    if whole.status.is_guaranteed() {
        return Ok(Verdict { status: whole.status, reasons: whole.reasons, blocks: Vec::new() });
    }
    let blocks = tau_blocks(label, tau);
    if blocks.len() <= 1 {
        return Ok(Verdict { status: whole.status, reasons: whole.reasons, blocks: Vec::new() });
    }
    let mut verdicts = Vec::new();
    for b in &blocks {
        let fs: Vec<LabelFactor> = b.iter().map(|&i| label.factors()[i]).collect();
        verdicts.push(block_verdict(&fs, restrict_to_block(label, tau, b).order(), ell)?);
    }
    if verdicts.iter().all(|v| v.status.is_guaranteed()) {
        let status = if verdicts.iter().all(|v| v.status == VerdictStatus::GuaranteedThmExamples) {
            VerdictStatus::GuaranteedThmExamples
        } else {
            VerdictStatus::GuaranteedThmExamples2
        };
        return Ok(Verdict { status, reasons: vec![TAG_PRODUCT_CLOSURE], blocks: verdicts });
    }
    let mut reasons = Vec::new();
    for v in verdicts.iter().filter(|v| !v.status.is_guaranteed()) {
        for &t in &v.reasons {
            if !reasons.contains(&t) {
                reasons.push(t);
            }
        }
    }
    Ok(Verdict { status: VerdictStatus::Unknown, reasons, blocks: verdicts })
}

/// Whether the mod-`l` cohomology of `BG` is known to be polynomial.
/// `None` when the datum carries no label to look up.
pub fn polynomial_cohomology(d: &RootDatum, ell: u64) -> Result<Option<bool>> {
    let Some(label) = d.label() else { return Ok(None) };
    if d.matches_label()? {
        for f in label.factors() {
            if !is_polynomial_factor(f, ell)? {
                return Ok(Some(false));
            }
        }
        return Ok(Some(true));
    }
    let pi1 = d.fundamental_group()?;
    if pi1.has_torsion_at(ell) {
        return Ok(if ell == 2 { None } else { Some(false) });
    }
    for f in label.factors() {
        if let LabelFactor::Simple { ty, rank, .. } = *f {
            let sc = LabelFactor::Simple { ty, rank, isogeny: Isogeny::Sc };
            if !is_polynomial_factor(&sc, ell)? {
                return Ok(Some(false));
            }
        }
    }
    Ok(Some(true))
}

/// A Poincaré series as a product formula, reduced fraction and expansion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    pub formula: String,
    pub reduced: String,
    pub coefficients: Vec<u64>,
}

/// `prod (1 + t^{2d-1}) / prod (1 - t^{2d})`, or without the numerator for `BG`.
pub fn product_formula(degrees: &[u32], with_exterior: bool) -> String {
    let pow = |k: u32| if k == 1 { "t".to_string() } else { format!("t^{k}") };
    let num: Vec<String> = degrees.iter().map(|&d| format!("(1+{})", pow(2 * d - 1))).collect();
    let den: Vec<String> = degrees.iter().map(|&d| format!("(1-{})", pow(2 * d))).collect();
    let num = if with_exterior && !num.is_empty() { num.join("") } else { "1".to_string() };
    if den.is_empty() {
        num
    } else {
        format!("{num}/{}", den.join(""))
    }
}

fn series_report(degrees: &[u32], sel: Selector, n: usize) -> Result<SeriesReport> {
    let s = poincare_series(degrees, sel);
    let coefficients =
        s.expand(n)?.iter().map(|c| c.to_u64().ok_or(Error::Overflow("series coefficient"))).collect::<Result<_>>()?;
    Ok(SeriesReport { formula: product_formula(degrees, sel != Selector::Bg), reduced: s.to_string(), coefficients })
}

/// Series-level comparison of `H*(BG^{tau}(q))` and `H*(L BG^{h tau_e})`.
/// The equality is that of the collapse model, not a statement about spaces.
#[derive(Clone, Debug, Serialize)]
pub struct TezukaReport {
    pub untwist: UntwistResult,
    pub fixed_degrees: DegreeData,
    pub polynomial_certified: bool,
    pub truncation: usize,
    pub lbg_series: SeriesReport,
    pub bgq_series: SeriesReport,
    pub series_equal: bool,
    pub equality_kind: &'static str,
    pub em_collapse: CollapseReport,
    pub rank_one: RankOneReport,
    pub psiq: PsiqAction,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict_error: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification_key: Option<ClassificationKey>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_error: Option<&'static str>,
    pub consistent: bool,
}

pub fn tezuka_report(
    d: &RootDatum,
    tau: &DatumAutomorphism,
    q: &PAdicUnit,
    n: usize,
    cap: usize,
) -> Result<TezukaReport> {
    let ell = q.prime();
    let polynomial = polynomial_cohomology(d, ell)?;
    if polynomial == Some(false) || (polynomial.is_none() && d.label().is_some()) {
        return Err(Error::NonpolynomialUnsupported(format!(
            "mod {ell} cohomology of {} is not known to be polynomial",
            d.label().map_or_else(|| "the datum".to_string(), |l| l.to_string())
        )));
    }
    let r = untwist(d, tau, q, cap)?;
    let degrees = r.fixed.degrees.degrees.clone();
    let lbg = poincare_series(&degrees, Selector::Lbg);
    let bgq = poincare_series(&degrees, Selector::Bgq);
    let series_equal = lbg == bgq;
    let em = em_collapse_check(&degrees, n, ell)?;
    let rank_one = module_rank_one_check(&degrees, n)?;
    let psiq = psiq_action(&degrees, &r.q_prime);
    let (verdict, verdict_error) = match fundamental_class_verdict(d, tau, ell) {
        Ok(v) => (Some(v), None),
        Err(e @ Error::UnlabeledDatum) => (None, Some(e.code())),
        Err(e) => return Err(e),
    };
    let (classification_key, key_error) = match classification_key(&r) {
        Ok(k) => (Some(k), None),
        Err(e @ Error::ValuationAtPrecision) => (None, Some(e.code())),
        Err(e) => return Err(e),
    };
    let consistent = series_equal && em.passed && rank_one.passed && psiq.verdict == PsiqVerdict::Identity;
    Ok(TezukaReport {
        fixed_degrees: r.fixed.degrees.clone(),
        polynomial_certified: polynomial == Some(true),
        truncation: n,
        lbg_series: series_report(&degrees, Selector::Lbg, n)?,
        bgq_series: series_report(&degrees, Selector::Bgq, n)?,
        series_equal,
        equality_kind: "MODEL",
        em_collapse: em,
        rank_one,
        psiq,
        verdict,
        verdict_error,
        classification_key,
        key_error,
        consistent,
        untwist: r,
    })
}

/// A datum from a label such as `A2`, `T1xB3ad` or `GL3`.
pub fn datum_from_label(s: &str) -> Result<RootDatum> {
    let label: Label = s.parse()?;
    RootDatum::from_label(&label)
}

pub fn load_datum_file(path: &Path) -> Result<RootDatum> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    RootDatum::from_json_str(&text)
}

/// A unit from an integer or `a/b` string at `(l, k)`.
pub fn parse_unit(s: &str, ell: u64, precision: Option<u32>) -> Result<PAdicUnit> {
    PAdicUnit::parse(s.trim(), ell, precision.unwrap_or(DEFAULT_PRECISION))
}

fn parse_permutation(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad permutation entry `{t}`"))))
        .collect()
}

/// Parse a twisting: `id`, `diagram`, `diagram:<i,j,...>`, `psi:<u>`,
/// `auto:<name>` (an automorphism stored in the datum file), or a product
/// of these joined by `*` (rightmost applied first).
pub fn parse_tau(d: &RootDatum, spec: &str, ell: u64, precision: Option<u32>) -> Result<DatumAutomorphism> {
    let mut acc = DatumAutomorphism::identity(d.rank());
    for part in spec.split('*') {
        let part = part.trim();
        let (head, arg) = match part.split_once(':') {
            Some((h, a)) => (h.trim(), Some(a.trim())),
            None => (part, None),
        };
        let t = match (head, arg) {
            ("id" | "1", None) => DatumAutomorphism::identity(d.rank()),
            ("diagram", None) => {
                let label = d.label().ok_or(Error::UnlabeledDatum)?;
                diagram_automorphism(d, &default_diagram_permutation(label)?)?
            }
            ("diagram", Some(p)) => diagram_automorphism(d, &parse_permutation(p)?)?,
            ("psi", Some(u)) => {
                if !is_prime(ell) {
                    return Err(Error::NotPrime(ell));
                }
                scalar_automorphism(d, &parse_unit(u, ell, precision)?)
            }
            ("auto", Some(name)) => {
                let m = d
                    .automorphisms()
                    .get(name)
                    .ok_or_else(|| Error::InvalidInput(format!("datum has no automorphism `{name}`")))?;
                DatumAutomorphism::from_matrix(m.clone(), AutomorphismKind::Composite)
            }
            _ => return Err(Error::Parse(format!("unrecognized twisting `{part}`"))),
        };
        acc = acc.compose(&t)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::DEFAULT_CAP;
    use crate::rootdata::{gl_datum, sign_automorphism, torus_datum};

    fn unit(q: i128, l: u64, k: u32) -> PAdicUnit {
        PAdicUnit::new(q, l, k).unwrap()
    }

    #[test]
    fn fingerprints() {
        let a2 = datum_from_label("A2").unwrap();
        let f = fingerprint(&a2, DEFAULT_CAP).unwrap();
        assert_eq!((f.degrees, f.weyl_order, f.fundamental_group.0), (vec![2, 3], 6, vec![]));
        let g = fingerprint(&gl_datum(2).unwrap(), DEFAULT_CAP).unwrap();
        assert_eq!((g.degrees, g.weyl_order, g.fundamental_group.0), (vec![1, 2], 2, vec![0]));
        let t = fingerprint(&torus_datum(1), DEFAULT_CAP).unwrap();
        assert_eq!((t.degrees, t.weyl_order, t.fundamental_group.0), (vec![1], 1, vec![0]));
    }

    #[test]
    fn untwist_a2_q2() {
        let a2 = datum_from_label("A2").unwrap();
        let r = untwist(&a2, &DatumAutomorphism::identity(2), &unit(2, 3, 6), DEFAULT_CAP).unwrap();
        assert_eq!(r.e, 2);
        assert!(r.zeta.is_minus_one());
        assert_eq!(r.q_prime.residue(), 727);
        assert_eq!(r.valuation, Valuation::Finite(1));
        assert_eq!(r.fixed.rank(), 1);
        let k = classification_key(&r).unwrap();
        assert_eq!((k.fingerprint.degrees, k.fingerprint.weyl_order, k.valuation), (vec![2], 2, 1));
    }

    #[test]
    fn untwist_trivial_when_q_is_one_mod_l() {
        let a2 = datum_from_label("A2").unwrap();
        let r = untwist(&a2, &DatumAutomorphism::identity(2), &unit(4, 3, 6), DEFAULT_CAP).unwrap();
        assert_eq!(r.e, 1);
        assert!(r.zeta.is_one());
        assert_eq!(r.fingerprint().unwrap(), fingerprint(&a2, DEFAULT_CAP).unwrap());
    }

    #[test]
    fn untwist_triality() {
        let d4 = datum_from_label("D4").unwrap();
        let tau = parse_tau(&d4, "diagram", 2, None).unwrap();
        let r = untwist(&d4, &tau, &unit(5, 2, 6), DEFAULT_CAP).unwrap();
        assert_eq!(r.e, 1);
        assert_eq!(r.tau_e, tau);
        assert_eq!(r.valuation, Valuation::Finite(2));
        let f = r.fingerprint().unwrap();
        assert_eq!((f.degrees, f.weyl_order, f.fundamental_group.0), (vec![2, 6], 12, vec![]));
    }

    #[test]
    fn untwist_rejects_bad_orders() {
        let a2 = datum_from_label("A2").unwrap();
        let flip = parse_tau(&a2, "diagram", 2, None).unwrap();
        assert!(matches!(
            untwist(&a2, &flip, &unit(3, 2, 6), DEFAULT_CAP),
            Err(Error::TauOrderDivisibleByEll { order: 2, prime: 2 })
        ));
        let psi = parse_tau(&a2, "psi:4", 3, Some(6)).unwrap();
        assert!(matches!(untwist(&a2, &psi, &unit(2, 3, 6), DEFAULT_CAP), Err(Error::TauInfiniteOrder)));
    }

    #[test]
    fn key_at_precision_sentinel() {
        let a1 = datum_from_label("A1").unwrap();
        let r = untwist(&a1, &DatumAutomorphism::identity(1), &unit(1, 3, 4), DEFAULT_CAP).unwrap();
        assert!(matches!(classification_key(&r), Err(Error::ValuationAtPrecision)));
        let r = untwist(&a1, &DatumAutomorphism::identity(1), &unit(3, 2, 6), DEFAULT_CAP).unwrap();
        let k = classification_key(&r).unwrap();
        assert_eq!((k.fingerprint.degrees, k.fingerprint.weyl_order, k.valuation), (vec![2], 2, 1));
    }

    #[test]
    fn verdict_examples() {
        let b3 = datum_from_label("B3").unwrap();
        let v = fundamental_class_verdict(&b3, &DatumAutomorphism::identity(3), 2).unwrap();
        assert_eq!(v.status, VerdictStatus::GuaranteedThmExamples);
        let e8 = datum_from_label("E8").unwrap();
        let v = fundamental_class_verdict(&e8, &DatumAutomorphism::identity(8), 3).unwrap();
        assert_eq!(v.status, VerdictStatus::Unknown);
        assert!(v.reasons.contains(&TAG_EXCLUDED_CASE));
        let d4 = datum_from_label("D4").unwrap();
        let tri = parse_tau(&d4, "diagram", 2, None).unwrap();
        assert_eq!(fundamental_class_verdict(&d4, &tri, 2).unwrap().status, VerdictStatus::GuaranteedThmExamples);
    }

    #[test]
    fn verdict_second_theorem_and_products() {
        let so5 = datum_from_label("B2ad").unwrap();
        let v = fundamental_class_verdict(&so5, &DatumAutomorphism::identity(2), 2).unwrap();
        assert_eq!(v.status, VerdictStatus::GuaranteedThmExamples2);
        let pu3 = datum_from_label("A2ad").unwrap();
        let v = fundamental_class_verdict(&pu3, &DatumAutomorphism::identity(2), 3).unwrap();
        assert_eq!(v.status, VerdictStatus::Unknown);
        assert!(v.reasons.contains(&TAG_NONPOLYNOMIAL_FACTOR));
        let t_d4 = datum_from_label("T1xD4").unwrap();
        let tri = parse_tau(&t_d4, "diagram", 2, None).unwrap();
        let v = fundamental_class_verdict(&t_d4, &tri, 2).unwrap();
        assert_eq!(v.status, VerdictStatus::GuaranteedThmExamples2);
        assert_eq!(v.reasons, vec![TAG_PRODUCT_CLOSURE]);
        assert_eq!(v.blocks.len(), 2);
        let e8 = datum_from_label("E8").unwrap();
        assert!(matches!(
            fundamental_class_verdict(&e8.clone().with_label(None), &DatumAutomorphism::identity(8), 3),
            Err(Error::UnlabeledDatum)
        ));
    }

    #[test]
    fn polynomial_table() {
        let f = |s: &str, l| {
            let label: Label = s.parse().unwrap();
            is_polynomial_factor(&label.factors()[0], l).unwrap()
        };
        assert!(f("B4", 2));
        assert!(!f("B5", 2));
        assert!(!f("D5", 2));
        assert!(f("B3ad", 2));
        assert!(f("C3ad", 2));
        assert!(!f("C4ad", 2));
        assert!(!f("D4ad", 2));
        assert!(f("F4", 5));
        assert!(!f("F4", 3));
        assert!(!f("E8", 5));
        assert!(f("E8", 7));
        assert!(f("A1ad", 2));
        assert!(!f("A2ad", 3));
        assert!(f("A2ad", 5));
    }

    #[test]
    fn tezuka_examples() {
        let gl3 = gl_datum(3).unwrap();
        let r = tezuka_report(&gl3, &DatumAutomorphism::identity(3), &unit(4, 3, 6), 20, DEFAULT_CAP).unwrap();
        assert!(r.series_equal && r.consistent);
        assert_eq!(r.lbg_series.formula, "(1+t)(1+t^3)(1+t^5)/(1-t^2)(1-t^4)(1-t^6)");
        let a1 = datum_from_label("A1").unwrap();
        let r = tezuka_report(&a1, &DatumAutomorphism::identity(1), &unit(3, 2, 6), 12, DEFAULT_CAP).unwrap();
        assert_eq!(r.rank_one.generator, (0, 3));
        assert!(r.consistent);
        let t1 = torus_datum(1);
        let r = tezuka_report(&t1, &DatumAutomorphism::identity(1), &unit(3, 2, 6), 8, DEFAULT_CAP).unwrap();
        assert_eq!(r.lbg_series.formula, "(1+t)/(1-t^2)");
        assert!(r.series_equal);
        let e8 = datum_from_label("E8").unwrap();
        assert!(matches!(
            tezuka_report(&e8, &DatumAutomorphism::identity(8), &unit(6, 5, 4), 8, DEFAULT_CAP),
            Err(Error::NonpolynomialUnsupported(_))
        ));
    }

    #[test]
    fn tau_parsing() {
        let a2 = datum_from_label("A2").unwrap();
        let t = parse_tau(&a2, "diagram*psi:-1", 3, None).unwrap();
        assert_eq!(t.matrix(), &IntMatrix::permutation(&[1, 0]).neg());
        assert_eq!(sign_automorphism(&a2, -1).compose(&t).unwrap().matrix(), &IntMatrix::permutation(&[1, 0]));
        assert!(parse_tau(&a2, "diagram:0,0", 3, None).is_err());
        assert!(parse_tau(&a2, "rotate", 3, None).is_err());
        assert!(parse_tau(&a2, "psi:2", 3, Some(4)).unwrap().scalar().is_some());
    }
}
