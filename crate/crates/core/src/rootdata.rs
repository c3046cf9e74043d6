//! Root data `(W, L, L0)` as integer matrices: label constructors, products,
//! validation, fundamental groups, the datum file format, and the
//! automorphisms (diagram symmetries, scalars `psi^u`) acting on them.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::{column_hermite_form, inverse_in, lattice_coordinates, smith_in};
use crate::matrix::{Coefficients, IntMatrix};
use crate::padic::PAdicUnit;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DynkinType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl DynkinType {
    pub fn letter(&self) -> char {
        match self {
            DynkinType::A => 'A',
            DynkinType::B => 'B',
            DynkinType::C => 'C',
            DynkinType::D => 'D',
            DynkinType::E => 'E',
            DynkinType::F => 'F',
            DynkinType::G => 'G',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        Some(match c.to_ascii_uppercase() {
            'A' => DynkinType::A,
            'B' => DynkinType::B,
            'C' => DynkinType::C,
            'D' => DynkinType::D,
            'E' => DynkinType::E,
            'F' => DynkinType::F,
            'G' => DynkinType::G,
            _ => return None,
        })
    }

    pub fn is_valid_rank(&self, n: usize) -> bool {
        match self {
            DynkinType::A => n >= 1,
            DynkinType::B | DynkinType::C => n >= 2,
            DynkinType::D => n >= 3,
            DynkinType::E => (6..=8).contains(&n),
            DynkinType::F => n == 4,
            DynkinType::G => n == 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Isogeny {
    Sc,
    Ad,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum LabelFactor {
    Simple {
        #[serde(rename = "type")]
        ty: DynkinType,
        rank: usize,
        isogeny: Isogeny,
    },
    Torus {
        rank: usize,
    },
    Gl {
        n: usize,
    },
}

impl LabelFactor {
    /// Rank of the lattice this factor contributes.
    pub fn lattice_rank(&self) -> usize {
        match *self {
            LabelFactor::Simple { rank, .. } | LabelFactor::Torus { rank } => rank,
            LabelFactor::Gl { n } => n,
        }
    }

    /// Number of simple reflections this factor contributes.
    pub fn generator_count(&self) -> usize {
        match *self {
            LabelFactor::Simple { rank, .. } => rank,
            LabelFactor::Torus { .. } => 0,
            LabelFactor::Gl { n } => n - 1,
        }
    }
}

impl fmt::Display for LabelFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            LabelFactor::Simple { ty, rank, isogeny } => {
                write!(f, "{}{rank}", ty.letter())?;
                if isogeny == Isogeny::Ad {
                    write!(f, "ad")?;
                }
                Ok(())
            }
            LabelFactor::Torus { rank } => write!(f, "T{rank}"),
            LabelFactor::Gl { n } => write!(f, "GL{n}"),
        }
    }
}

/// Structured type of a labeled datum: an ordered list of simple factors,
/// tori and `GL_n` blocks. Zero-rank tori are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(Vec<LabelFactor>);

impl Label {
    pub fn new(factors: Vec<LabelFactor>) -> Result<Self> {
        for f in &factors {
            match *f {
                LabelFactor::Simple { ty, rank, .. } if !ty.is_valid_rank(rank) => {
                    return Err(Error::InvalidType(format!("{}{rank}", ty.letter())))
                }
                LabelFactor::Gl { n: 0 } => return Err(Error::InvalidType("GL0".into())),
                _ => {}
            }
        }
        Ok(Label(factors.into_iter().filter(|f| *f != LabelFactor::Torus { rank: 0 }).collect()))
    }

    pub fn factors(&self) -> &[LabelFactor] {
        &self.0
    }

    pub fn lattice_rank(&self) -> usize {
        self.0.iter().map(|f| f.lattice_rank()).sum()
    }

    pub fn concat(&self, o: &Label) -> Label {
        Label(self.0.iter().chain(&o.0).copied().collect())
    }

    /// Whether all factors are simple and simply connected.
    pub fn is_semisimple_sc(&self) -> bool {
        self.0.iter().all(|f| matches!(f, LabelFactor::Simple { isogeny: Isogeny::Sc, .. }))
    }

    /// The Dynkin diagram of the simple factors, in coordinates of the labeled datum.
    pub fn diagram(&self) -> Diagram {
        let mut nodes = Vec::new();
        let mut blocks = Vec::new();
        let (mut coord, mut gen) = (0, 0);
        for (fi, f) in self.0.iter().enumerate() {
            if let LabelFactor::Simple { ty, rank, .. } = *f {
                blocks.push(cartan_matrix(ty, rank).expect("label ranks are validated"));
                for i in 0..rank {
                    nodes.push(DiagramNode { factor: fi, coordinate: coord + i, generator: gen + i });
                }
            }
            coord += f.lattice_rank();
            gen += f.generator_count();
        }
        let cartan = blocks.into_iter().fold(IntMatrix::zeros(0, 0), |acc, b| acc.block_diag(&b));
        Diagram { cartan, nodes }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "T0");
        }
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join("x"))
    }
}

impl FromStr for Label {
    type Err = Error;

    /// Parses labels such as `A2`, `B3sc`, `A1ad`, `T1xA2`, `GL3`, `A1*A1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidType(s.to_string());
        let mut factors = Vec::new();
        for part in s.split(['x', '*', '×']).map(str::trim) {
            if part.is_empty() {
                return Err(bad());
            }
            let upper = part.to_ascii_uppercase();
            if let Some(n) = upper.strip_prefix("GL") {
                factors.push(LabelFactor::Gl { n: n.parse().map_err(|_| bad())? });
                continue;
            }
            let ty_char = upper.chars().next().ok_or_else(bad)?;
            let rest = &upper[ty_char.len_utf8()..];
            let (digits, iso) = match rest.find(|c: char| !c.is_ascii_digit()) {
                Some(i) => rest.split_at(i),
                None => (rest, ""),
            };
            let rank: usize = digits.parse().map_err(|_| bad())?;
            if ty_char == 'T' {
                if !iso.is_empty() {
                    return Err(bad());
                }
                factors.push(LabelFactor::Torus { rank });
                continue;
            }
            let ty = DynkinType::from_letter(ty_char).ok_or_else(bad)?;
            let isogeny = match iso {
                "" | "SC" => Isogeny::Sc,
                "AD" => Isogeny::Ad,
                _ => return Err(bad()),
            };
            factors.push(LabelFactor::Simple { ty, rank, isogeny });
        }
        Label::new(factors)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiagramNode {
    pub factor: usize,
    pub coordinate: usize,
    pub generator: usize,
}

/// Block Cartan matrix of the simple factors and, per node, where it lives.
#[derive(Clone, Debug)]
pub struct Diagram {
    pub cartan: IntMatrix,
    pub nodes: Vec<DiagramNode>,
}

/// Cartan matrix `a_ij = <alpha_i^vee, alpha_j>` in Bourbaki numbering.
pub fn cartan_matrix(ty: DynkinType, n: usize) -> Result<IntMatrix> {
    if !ty.is_valid_rank(n) {
        return Err(Error::InvalidType(format!("{}{n}", ty.letter())));
    }
    let mut a = IntMatrix::scalar(n, 2);
    let mut link = |i: usize, j: usize| {
        a.set(i, j, -1);
        a.set(j, i, -1);
    };
    match ty {
        DynkinType::A | DynkinType::B | DynkinType::C => (1..n).for_each(|i| link(i - 1, i)),
        DynkinType::D => {
            (1..n - 1).for_each(|i| link(i - 1, i));
            link(n - 3, n - 1);
        }
        DynkinType::E => {
            link(0, 2);
            link(1, 3);
            (3..n).for_each(|i| link(i - 1, i));
        }
        DynkinType::F => (1..4).for_each(|i| link(i - 1, i)),
        DynkinType::G => link(0, 1),
    }
    match ty {
        DynkinType::B => a.set(n - 1, n - 2, -2),
        DynkinType::C => a.set(n - 2, n - 1, -2),
        DynkinType::F => a.set(2, 1, -2),
        DynkinType::G => a.set(1, 0, -3),
        _ => {}
    }
    Ok(a)
}

/// Elementary divisors of `L / L0` other than 1, followed by a `0` per free factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FundamentalGroupSnf(pub Vec<i64>);

impl FundamentalGroupSnf {
    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }

    pub fn free_rank(&self) -> usize {
        self.0.iter().filter(|&&d| d == 0).count()
    }

    /// Whether the finite part has torsion of order divisible by `prime`.
    pub fn has_torsion_at(&self, prime: u64) -> bool {
        self.0.iter().any(|&d| d != 0 && d % prime as i64 == 0)
    }
}

impl fmt::Display for FundamentalGroupSnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// A violated root-datum axiom, reported by [`RootDatum::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<usize>,
    pub detail: String,
}

impl Violation {
    fn new(code: &'static str, generator: Option<usize>, detail: impl Into<String>) -> Self {
        Violation { code, generator, detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.generator {
            Some(g) => write!(f, "{} (generator {g}): {}", self.code, self.detail),
            None => write!(f, "{}: {}", self.code, self.detail),
        }
    }
}

/// A root datum `(W, L, L0)`: `L = Z^r` (or `(Z/l^k)^r`), `W` generated by
/// the given reflections, `L0` spanned by the columns of `coroot_basis`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootDatum {
    rank: usize,
    generators: Vec<IntMatrix>,
    coroot_basis: IntMatrix,
    label: Option<Label>,
    coefficients: Coefficients,
    automorphisms: BTreeMap<String, IntMatrix>,
}

impl RootDatum {
    /// Assemble a datum, checking only shapes; see [`RootDatum::validate`].
    pub fn new(
        rank: usize,
        generators: Vec<IntMatrix>,
        coroot_basis: IntMatrix,
        label: Option<Label>,
        coefficients: Coefficients,
    ) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != rank || g.cols() != rank {
                return Err(Error::InvalidInput(format!("generator {i} is not {rank}x{rank}")));
            }
        }
        if coroot_basis.rows() != rank || coroot_basis.cols() > rank {
            return Err(Error::InvalidInput(format!(
                "coroot basis must be {rank}xm with m <= {rank}, got {}x{}",
                coroot_basis.rows(),
                coroot_basis.cols()
            )));
        }
        if let Some(l) = &label {
            if l.lattice_rank() != rank {
                return Err(Error::InvalidInput(format!("label {l} has rank {}, datum {rank}", l.lattice_rank())));
            }
        }
        let generators = generators.into_iter().map(|g| g.reduced(coefficients)).collect();
        let coroot_basis = coroot_basis.reduced(coefficients);
        Ok(RootDatum { rank, generators, coroot_basis, label, coefficients, automorphisms: BTreeMap::new() })
    }

    pub fn from_label(label: &Label) -> Result<Self> {
        let mut d = torus_datum(0);
        for f in label.factors() {
            let part = match *f {
                LabelFactor::Simple { ty, rank, isogeny } => simple_datum(ty, rank, isogeny)?,
                LabelFactor::Torus { rank } => torus_datum(rank),
                LabelFactor::Gl { n } => gl_datum(n)?,
            };
            d = product(&d, &part)?;
        }
        Ok(d)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    pub fn coroot_basis(&self) -> &IntMatrix {
        &self.coroot_basis
    }

    pub fn label(&self) -> Option<&Label> {
        self.label.as_ref()
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coefficients
    }

    pub fn automorphisms(&self) -> &BTreeMap<String, IntMatrix> {
        &self.automorphisms
    }

    pub fn with_label(mut self, label: Option<Label>) -> Self {
        self.label = label;
        self
    }

    pub fn with_automorphism(mut self, name: &str, m: IntMatrix) -> Result<Self> {
        if m.rows() != self.rank || m.cols() != self.rank {
            return Err(Error::InvalidInput(format!("automorphism {name} has the wrong shape")));
        }
        self.automorphisms.insert(name.to_string(), m.reduced(self.coefficients));
        Ok(self)
    }

    /// Whether the datum's matrices agree with the constructor for its label.
    pub fn matches_label(&self) -> Result<bool> {
        let Some(l) = &self.label else { return Ok(false) };
        let built = RootDatum::from_label(l)?;
        Ok(built.generators == self.generators
            && column_hermite_form(&built.coroot_basis, self.coefficients)?
                == column_hermite_form(&self.coroot_basis, self.coefficients)?)
    }

    /// Whether the vector lies in `L0`.
    pub fn in_coroot_lattice(&self, v: &[i64]) -> Result<bool> {
        Ok(lattice_coordinates(&self.coroot_basis, v, self.coefficients)?.is_some())
    }

    /// Check every root-datum axiom; an empty list means the datum is valid.
    pub fn validate(&self) -> Vec<Violation> {
        match self.validate_inner() {
            Ok(v) => v,
            Err(e) => vec![Violation::new("ARITHMETIC", None, e.to_string())],
        }
    }

    fn validate_inner(&self) -> Result<Vec<Violation>> {
        let c = self.coefficients;
        let n = self.rank;
        let mut out = Vec::new();
        let m = self.coroot_basis.cols();
        let basis_rank = smith_in(&self.coroot_basis, c)?.rank();
        if basis_rank != m {
            out.push(Violation::new(
                "COROOT_BASIS_DEPENDENT",
                None,
                format!("{m} columns span a rank-{basis_rank} lattice"),
            ));
            return Ok(out);
        }
        let id = IntMatrix::identity(n);
        // pseudo-reflections over Z/l^k have order dividing lcm(2, l - 1)
        let period = match c {
            Coefficients::Integer => 2,
            Coefficients::Residue { prime, .. } => num_integer::lcm(2, prime - 1),
        };
        let mut images = IntMatrix::zeros(n, 0);
        for (i, s) in self.generators.iter().enumerate() {
            if s.pow_in(period, c) != id {
                let what = if period == 2 { "s^2 != I" } else { "s has order not dividing lcm(2, l-1)" };
                out.push(Violation::new("REFLECTION_ORDER", Some(i), what));
            }
            let d = s.minus_identity_in(c);
            let r = smith_in(&d, c)?.rank();
            if r != 1 {
                out.push(Violation::new("NOT_A_REFLECTION", Some(i), format!("rank(s - I) = {r}")));
            }
            for j in 0..n {
                let col = d.column(j);
                if lattice_coordinates(&self.coroot_basis, &col, c)?.is_none() {
                    out.push(Violation::new("COROOT_NOT_IN_L0", Some(i), format!("column {j} of s - I is not in L0")));
                    break;
                }
            }
            for j in 0..m {
                let img = s.mul_vec_in(&self.coroot_basis.column(j), c);
                if lattice_coordinates(&self.coroot_basis, &img, c)?.is_none() {
                    out.push(Violation::new("L0_NOT_STABLE", Some(i), format!("s(b_{j}) is not in L0")));
                    break;
                }
            }
            images = images.hstack(&d);
        }
        let span = smith_in(&images, c)?.rank();
        if span != m {
            out.push(Violation::new("COROOT_RANK", None, format!("coroots span rank {span} but L0 has rank {m}")));
        }
        for (name, a) in &self.automorphisms {
            if inverse_in(a, c)?.is_none() {
                out.push(Violation::new("AUTOMORPHISM_NOT_INVERTIBLE", None, name.clone()));
                continue;
            }
            for j in 0..m {
                let img = a.mul_vec_in(&self.coroot_basis.column(j), c);
                if lattice_coordinates(&self.coroot_basis, &img, c)?.is_none() {
                    out.push(Violation::new("AUTOMORPHISM_MOVES_L0", None, name.clone()));
                    break;
                }
            }
        }
        Ok(out)
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// `pi_1 = L / L0` in Smith normal form.
    pub fn fundamental_group(&self) -> Result<FundamentalGroupSnf> {
        let snf = smith_in(&self.coroot_basis, self.coefficients)?;
        let mut divisors: Vec<i64> = snf.diagonal.iter().copied().filter(|&d| d != 0 && d != 1).collect();
        divisors.extend(std::iter::repeat_n(0, self.rank - snf.rank()));
        Ok(FundamentalGroupSnf(divisors))
    }

    /// The datum file document: sorted keys, compact, byte-stable.
    pub fn to_json_value(&self) -> Value {
        let mut obj = serde_json::Map::new();
        if !self.automorphisms.is_empty() {
            let autos: serde_json::Map<String, Value> =
                self.automorphisms.iter().map(|(k, m)| (k.clone(), json!(m.to_rows()))).collect();
            obj.insert("automorphisms".into(), Value::Object(autos));
        }
        obj.insert("coefficients".into(), serde_json::to_value(self.coefficients).expect("serializable"));
        obj.insert("coroot_basis".into(), json!(self.coroot_basis.to_rows()));
        obj.insert("coroot_rank".into(), json!(self.coroot_basis.cols()));
        obj.insert(
            "label".into(),
            match &self.label {
                Some(l) => serde_json::to_value(l).expect("serializable"),
                None => Value::Null,
            },
        );
        obj.insert("rank".into(), json!(self.rank));
        obj.insert("weyl_generators".into(), json!(self.generators.iter().map(|g| g.to_rows()).collect::<Vec<_>>()));
        Value::Object(obj)
    }

    pub fn to_canonical_json(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&v)
    }

    pub fn from_json_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Parse("datum file must be a JSON object".into()))?;
        let rank = obj
            .get("rank")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing integer field `rank`".into()))? as usize;
        let coefficients = match obj.get("coefficients") {
            None | Some(Value::Null) => Coefficients::Integer,
            Some(c) => serde_json::from_value(c.clone()).map_err(|e| Error::Parse(format!("coefficients: {e}")))?,
        };
        if let Coefficients::Residue { prime, precision } = coefficients {
            PAdicUnit::one(prime, precision)?;
        }
        let matrix = |val: &Value, what: &str, cols: usize| -> Result<IntMatrix> {
            let rows: Vec<Vec<i64>> =
                serde_json::from_value(val.clone()).map_err(|e| Error::Parse(format!("{what}: {e}")))?;
            IntMatrix::from_rows(&rows, cols)
        };
        let generators = match obj.get("weyl_generators") {
            None | Some(Value::Null) => Vec::new(),
            Some(Value::Array(gs)) => gs
                .iter()
                .enumerate()
                .map(|(i, g)| matrix(g, &format!("weyl_generators[{i}]"), rank))
                .collect::<Result<_>>()?,
            Some(_) => return Err(Error::Parse("weyl_generators must be an array".into())),
        };
        let coroot_rows = obj.get("coroot_basis").ok_or_else(|| Error::Parse("missing `coroot_basis`".into()))?;
        let rows: Vec<Vec<i64>> =
            serde_json::from_value(coroot_rows.clone()).map_err(|e| Error::Parse(format!("coroot_basis: {e}")))?;
        let m = match obj.get("coroot_rank").and_then(Value::as_u64) {
            Some(m) => m as usize,
            None => rows.first().map_or(0, |r| r.len()),
        };
        if rows.len() != rank {
            return Err(Error::InvalidInput(format!("coroot_basis has {} rows, rank is {rank}", rows.len())));
        }
        let coroot_basis = IntMatrix::from_rows(&rows, m)?;
        let label = match obj.get("label") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.parse()?),
            Some(l) => {
                let factors: Vec<LabelFactor> =
                    serde_json::from_value(l.clone()).map_err(|e| Error::Parse(format!("label: {e}")))?;
                Some(Label::new(factors)?)
            }
        };
        let mut d = RootDatum::new(rank, generators, coroot_basis, label, coefficients)?;
        if let Some(a) = obj.get("automorphisms") {
            let a = a.as_object().ok_or_else(|| Error::Parse("automorphisms must be an object".into()))?;
            for (name, m) in a {
                let mat = matrix(m, &format!("automorphisms.{name}"), rank)?;
                d = d.with_automorphism(name, mat)?;
            }
        }
        Ok(d)
    }
}

/// The simple datum of the given type: `sc` in simple-coroot coordinates
/// (`L0 = L`), `ad` in fundamental-coweight coordinates (`L0` spanned by
/// the columns of the transposed Cartan matrix).
pub fn simple_datum(ty: DynkinType, rank: usize, isogeny: Isogeny) -> Result<RootDatum> {
    let a = cartan_matrix(ty, rank)?;
    let at = a.transpose();
    let n = rank;
    let mut gens = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = IntMatrix::identity(n);
        match isogeny {
            // s_i(b_j) = b_j - a_ji b_i
            Isogeny::Sc => (0..n).for_each(|j| s.set(i, j, i64::from(i == j) - a.get(j, i))),
            // s_i(w_j) = w_j - delta_ij alpha_i^vee
            Isogeny::Ad => (0..n).for_each(|k| s.set(k, i, i64::from(k == i) - at.get(k, i))),
        }
        gens.push(s);
    }
    let basis = match isogeny {
        Isogeny::Sc => IntMatrix::identity(n),
        Isogeny::Ad => at,
    };
    let label = Label::new(vec![LabelFactor::Simple { ty, rank, isogeny }])?;
    RootDatum::new(n, gens, basis, Some(label), Coefficients::Integer)
}

/// `GL_n`: permutation action of `S_n` on `Z^n`, `L0` spanned by `e_i - e_{i+1}`.
pub fn gl_datum(n: usize) -> Result<RootDatum> {
    if n == 0 {
        return Err(Error::InvalidType("GL0".into()));
    }
    let gens = (0..n - 1)
        .map(|i| {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, i + 1);
            IntMatrix::permutation(&p)
        })
        .collect();
    let mut basis = IntMatrix::zeros(n, n - 1);
    for i in 0..n - 1 {
        basis.set(i, i, 1);
        basis.set(i + 1, i, -1);
    }
    RootDatum::new(n, gens, basis, Some(Label::new(vec![LabelFactor::Gl { n }])?), Coefficients::Integer)
}

pub fn torus_datum(r: usize) -> RootDatum {
    let label = Label::new(vec![LabelFactor::Torus { rank: r }]).expect("tori are valid");
    RootDatum::new(r, Vec::new(), IntMatrix::zeros(r, 0), Some(label), Coefficients::Integer)
        .expect("shapes are consistent")
}

fn pad(m: &IntMatrix, before: usize, after: usize) -> IntMatrix {
    IntMatrix::identity(before).block_diag(m).block_diag(&IntMatrix::identity(after))
}

/// Block-diagonal product of two data.
pub fn product(a: &RootDatum, b: &RootDatum) -> Result<RootDatum> {
    if a.coefficients != b.coefficients {
        return Err(Error::ContextMismatch(format!("{:?}", a.coefficients), format!("{:?}", b.coefficients)));
    }
    let (ra, rb) = (a.rank, b.rank);
    let gens = a.generators.iter().map(|g| pad(g, 0, rb)).chain(b.generators.iter().map(|g| pad(g, ra, 0))).collect();
    let label = match (&a.label, &b.label) {
        (Some(x), Some(y)) => Some(x.concat(y)),
        _ => None,
    };
    let mut d = RootDatum::new(ra + rb, gens, a.coroot_basis.block_diag(&b.coroot_basis), label, a.coefficients)?;
    for (k, m) in &a.automorphisms {
        d = d.with_automorphism(&format!("{k}.1"), pad(m, 0, rb))?;
    }
    for (k, m) in &b.automorphisms {
        d = d.with_automorphism(&format!("{k}.2"), pad(m, ra, 0))?;
    }
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutomorphismKind {
    Diagram,
    Scalar,
    Composite,
}

/// Largest exponent tried when computing the order of a matrix.
const ORDER_SEARCH_LIMIT: u64 = 10_000;

/// An automorphism `u * M` of a root datum: an integer matrix `M` and an
/// optional `l`-adic unit scalar `u` (absent means `u = 1`; `u = -1` is
/// folded into `M`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DatumAutomorphism {
    matrix: IntMatrix,
    scalar: Option<PAdicUnit>,
    order: Option<u64>,
    kind: AutomorphismKind,
}

impl DatumAutomorphism {
    pub fn identity(rank: usize) -> Self {
        Self::from_matrix(IntMatrix::identity(rank), AutomorphismKind::Composite)
    }

    pub fn from_matrix(matrix: IntMatrix, kind: AutomorphismKind) -> Self {
        Self::with_scalar(matrix, None, kind)
    }

    /// `u * matrix`. Scalars congruent to `+-1` at the working precision are
    /// folded into the matrix.
    pub fn with_scalar(mut matrix: IntMatrix, mut scalar: Option<PAdicUnit>, kind: AutomorphismKind) -> Self {
        if let Some(u) = scalar {
            if u.is_one() {
                scalar = None;
            } else if u.is_minus_one() {
                matrix = matrix.neg();
                scalar = None;
            }
        }
        let order = combined_order(&matrix, scalar.as_ref());
        DatumAutomorphism { matrix, scalar, order, kind }
    }

    /// The integral part `M`.
    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn scalar(&self) -> Option<&PAdicUnit> {
        self.scalar.as_ref()
    }

    /// Multiplicative order; `None` if infinite or not determined.
    pub fn order(&self) -> Option<u64> {
        self.order
    }

    pub fn kind(&self) -> AutomorphismKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.scalar.is_none() && self.matrix.is_identity()
    }

    /// Ring in which the full matrix lives.
    pub fn coefficients(&self) -> Coefficients {
        match self.scalar {
            None => Coefficients::Integer,
            Some(u) => Coefficients::Residue { prime: u.prime(), precision: u.precision() },
        }
    }

    /// `u * M`, reduced in [`DatumAutomorphism::coefficients`].
    pub fn full_matrix(&self) -> IntMatrix {
        match self.scalar {
            None => self.matrix.clone(),
            Some(u) => {
                let c = self.coefficients();
                self.matrix.scale_in(u.residue() as i64, c)
            }
        }
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &DatumAutomorphism) -> Result<DatumAutomorphism> {
        let scalar = match (self.scalar, other.scalar) {
            (None, s) | (s, None) => s,
            (Some(a), Some(b)) => Some(a.mul(&b)?),
        };
        let kind = if self.is_identity() {
            other.kind
        } else if other.is_identity() {
            self.kind
        } else {
            AutomorphismKind::Composite
        };
        Ok(Self::with_scalar(self.matrix.mul(&other.matrix), scalar, kind))
    }

    /// `self * w` for an integral matrix `w`.
    pub fn compose_matrix(&self, w: &IntMatrix) -> DatumAutomorphism {
        let kind = if w.is_identity() { self.kind } else { AutomorphismKind::Composite };
        DatumAutomorphism {
            order: combined_order(&self.matrix.mul(w), self.scalar.as_ref()),
            matrix: self.matrix.mul(w),
            scalar: self.scalar,
            kind,
        }
    }

    /// The same automorphism with the scalar part removed.
    pub fn integral_part(&self) -> DatumAutomorphism {
        Self::from_matrix(self.matrix.clone(), self.kind)
    }
}

impl Serialize for DatumAutomorphism {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("DatumAutomorphism", 4)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("matrix", &self.matrix)?;
        st.serialize_field("order", &self.order)?;
        st.serialize_field("scalar", &self.scalar)?;
        st.end()
    }
}

/// Order of an integer matrix, if finite and at most the search limit.
pub fn matrix_order(m: &IntMatrix) -> Option<u64> {
    let id = IntMatrix::identity(m.rows());
    let mut p = m.clone();
    for n in 1..=ORDER_SEARCH_LIMIT {
        if p == id {
            return Some(n);
        }
        if p.data().iter().any(|x| x.unsigned_abs() > 1 << 40) {
            return None;
        }
        p = p.mul(m);
    }
    None
}

fn combined_order(m: &IntMatrix, scalar: Option<&PAdicUnit>) -> Option<u64> {
    let om = matrix_order(m)?;
    let Some(u) = scalar else { return Some(om) };
    if !u.is_root_of_unity() {
        return None;
    }
    let e = u.order_at_precision();
    let bound = num_integer::lcm(om, e);
    let id = IntMatrix::identity(m.rows());
    let mut p = IntMatrix::identity(m.rows());
    for n in 1..=bound {
        p = p.mul(m);
        let un = u.pow(n);
        if (p == id && un.is_one()) || (p == id.neg() && un.is_minus_one()) {
            return Some(n);
        }
    }
    None
}

fn permutation_order(p: &[usize]) -> u64 {
    let mut seen = vec![false; p.len()];
    let mut ord = 1u64;
    for i in 0..p.len() {
        if seen[i] {
            continue;
        }
        let mut len = 0u64;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = p[j];
            len += 1;
        }
        ord = num_integer::lcm(ord, len);
    }
    ord
}

/// The automorphism induced by a permutation of the Dynkin diagram's nodes
/// (numbered across the simple factors in label order).
pub fn diagram_automorphism(d: &RootDatum, perm: &[usize]) -> Result<DatumAutomorphism> {
    let label = d.label().ok_or(Error::UnlabeledDatum)?;
    let diagram = label.diagram();
    let n = diagram.nodes.len();
    let bad = || Error::NotADiagramSymmetry(perm.to_vec());
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&j| j >= n || std::mem::replace(&mut seen[j], true)) {
        return Err(bad());
    }
    let c = &diagram.cartan;
    for i in 0..n {
        for j in 0..n {
            if c.get(perm[i], perm[j]) != c.get(i, j) {
                return Err(bad());
            }
        }
    }
    let mut images: Vec<usize> = (0..d.rank()).collect();
    for (i, node) in diagram.nodes.iter().enumerate() {
        images[node.coordinate] = diagram.nodes[perm[i]].coordinate;
    }
    let p = IntMatrix::permutation(&images);
    let pinv = p.transpose();
    let mut gen_images: Vec<usize> = (0..d.generators().len()).collect();
    for (i, node) in diagram.nodes.iter().enumerate() {
        gen_images[node.generator] = diagram.nodes[perm[i]].generator;
    }
    let coeffs = d.coefficients();
    for (g, s) in d.generators().iter().enumerate() {
        if p.mul_in(s, coeffs).mul_in(&pinv, coeffs) != d.generators()[gen_images[g]] {
            return Err(bad());
        }
    }
    for j in 0..d.coroot_basis().cols() {
        if !d.in_coroot_lattice(&p.mul_vec_in(&d.coroot_basis().column(j), coeffs))? {
            return Err(bad());
        }
    }
    let mut a = DatumAutomorphism::from_matrix(p, AutomorphismKind::Diagram);
    a.order = Some(permutation_order(perm));
    Ok(a)
}

/// The standard nontrivial diagram symmetry of a labeled datum: the cyclic
/// shift when the label is several copies of one simple factor, otherwise
/// the symmetry of its single simple factor (reversal for `A_n`, the swap
/// of the two end nodes for `D_n`, triality for `D_4`, `1 <-> 6, 3 <-> 5`
/// for `E_6`).
pub fn default_diagram_permutation(label: &Label) -> Result<Vec<usize>> {
    let simple: Vec<(usize, &LabelFactor)> =
        label.factors().iter().enumerate().filter(|(_, f)| matches!(f, LabelFactor::Simple { .. })).collect();
    let none = || Error::NotADiagramSymmetry(Vec::new());
    if simple.len() >= 2 && simple.iter().all(|(_, f)| *f == simple[0].1) {
        let k = simple.len();
        let r = simple[0].1.generator_count();
        return Ok((0..k * r).map(|i| ((i / r + 1) % k) * r + i % r).collect());
    }
    if simple.len() != 1 {
        return Err(none());
    }
    let LabelFactor::Simple { ty, rank: n, .. } = *simple[0].1 else { unreachable!() };
    let mut p: Vec<usize> = (0..n).collect();
    match (ty, n) {
        (DynkinType::A, n) if n >= 2 => p.reverse(),
        (DynkinType::D, 4) => p = vec![2, 1, 3, 0],
        (DynkinType::D, n) => p.swap(n - 2, n - 1),
        (DynkinType::E, 6) => p = vec![5, 1, 4, 3, 2, 0],
        _ => return Err(none()),
    }
    Ok(p)
}

/// `u * I` for an `l`-adic unit `u`.
pub fn scalar_automorphism(d: &RootDatum, u: &PAdicUnit) -> DatumAutomorphism {
    DatumAutomorphism::with_scalar(IntMatrix::identity(d.rank()), Some(*u), AutomorphismKind::Scalar)
}

/// `+-I`.
pub fn sign_automorphism(d: &RootDatum, sign: i64) -> DatumAutomorphism {
    assert!(sign == 1 || sign == -1);
    DatumAutomorphism::from_matrix(IntMatrix::scalar(d.rank(), sign), AutomorphismKind::Scalar)
}
