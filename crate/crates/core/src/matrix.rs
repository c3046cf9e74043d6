//! Dense integer matrices, optionally read modulo a prime power.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficient ring of a matrix: the integers, or residues modulo `prime^precision`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "ring", rename_all = "snake_case")]
pub enum Coefficients {
    Integer,
    Residue { prime: u64, precision: u32 },
}

impl Coefficients {
    pub fn modulus(&self) -> Option<i64> {
        match *self {
            Coefficients::Integer => None,
            Coefficients::Residue { prime, precision } => Some(prime.pow(precision) as i64),
        }
    }

    pub fn is_integer(&self) -> bool {
        matches!(self, Coefficients::Integer)
    }

    /// Reduce to the canonical representative (`[0, modulus)` for residues).
    pub fn reduce(&self, x: i128) -> i64 {
        match self.modulus() {
            None => i64::try_from(x).expect("integer matrix entry overflows i64"),
            Some(n) => x.rem_euclid(n as i128) as i64,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i64>) -> Self {
        assert_eq!(rows * cols, data.len(), "matrix data length mismatch");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = c;
        }
        m
    }

    /// Build from row arrays. `cols` disambiguates the zero-row case.
    pub fn from_rows(rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::InvalidInput(format!("row {i} has {} entries, expected {cols}", r.len())));
            }
            data.extend_from_slice(r);
        }
        Ok(IntMatrix { rows: rows.len(), cols, data })
    }

    pub fn from_columns(columns: &[Vec<i64>], rows: usize) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::InvalidInput(format!("column {j} has wrong length")));
            }
            for (i, &x) in c.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        Ok(m)
    }

    pub fn permutation(images: &[usize]) -> Self {
        let n = images.len();
        let mut m = Self::zeros(n, n);
        for (i, &j) in images.iter().enumerate() {
            // column i is e_{images[i]}
            m.set(j, i, 1);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }

    pub fn data(&self) -> &[i64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == i64::from(i == j)))
    }

    /// `Some(c)` if the matrix is `c` times the identity.
    pub fn as_scalar(&self) -> Option<i64> {
        if !self.is_square() {
            return None;
        }
        if self.rows == 0 {
            return Some(1);
        }
        let c = self.get(0, 0);
        let ok = (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == if i == j { c } else { 0 }));
        ok.then_some(c)
    }

    pub fn reduced(&self, coeffs: Coefficients) -> Self {
        match coeffs {
            Coefficients::Integer => self.clone(),
            _ => IntMatrix {
                rows: self.rows,
                cols: self.cols,
                data: self.data.iter().map(|&x| coeffs.reduce(x as i128)).collect(),
            },
        }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        self.mul_in(other, Coefficients::Integer)
    }

    pub fn mul_in(&self, other: &IntMatrix, coeffs: Coefficients) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch in product");
        let mut out = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            let row = self.row(i);
            for j in 0..other.cols {
                let mut acc: i128 = 0;
                for (k, &a) in row.iter().enumerate() {
                    if a != 0 {
                        acc += a as i128 * other.data[k * other.cols + j] as i128;
                    }
                }
                out.push(coeffs.reduce(acc));
            }
        }
        IntMatrix { rows: self.rows, cols: other.cols, data: out }
    }

    pub fn mul_vec_in(&self, v: &[i64], coeffs: Coefficients) -> Vec<i64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let acc: i128 = self.row(i).iter().zip(v).map(|(&a, &b)| a as i128 * b as i128).sum();
                coeffs.reduce(acc)
            })
            .collect()
    }

    pub fn add_in(&self, other: &IntMatrix, coeffs: Coefficients) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| coeffs.reduce(a as i128 + b as i128)).collect(),
        }
    }

    pub fn sub_in(&self, other: &IntMatrix, coeffs: Coefficients) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| coeffs.reduce(a as i128 - b as i128)).collect(),
        }
    }

    pub fn scale_in(&self, c: i64, coeffs: Coefficients) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| coeffs.reduce(a as i128 * c as i128)).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale_in(-1, Coefficients::Integer)
    }

    /// `self - I`.
    pub fn minus_identity_in(&self, coeffs: Coefficients) -> IntMatrix {
        self.sub_in(&IntMatrix::identity(self.rows), coeffs)
    }

    pub fn pow_in(&self, mut n: u64, coeffs: Coefficients) -> IntMatrix {
        assert!(self.is_square());
        let mut result = IntMatrix::identity(self.rows).reduced(coeffs);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_in(&base, coeffs);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_in(&base, coeffs);
            }
        }
        result
    }

    pub fn hstack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = IntMatrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..other.cols {
                m.set(i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(idx.len(), self.cols);
        for (a, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(a, j, self.get(i, j));
            }
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (b, &j) in idx.iter().enumerate() {
                m.set(i, b, self.get(i, j));
            }
        }
        m
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> IntMatrix {
        let r: Vec<usize> = rows.collect();
        let c: Vec<usize> = cols.collect();
        self.select_rows(&r).select_columns(&c)
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a: Vec<Vec<i128>> = (0..self.rows).map(|i| self.row(i).iter().map(|&x| x as i128).collect()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&i| a[i][col] != 0) else {
                continue;
            };
            a.swap(rank, p);
            let pivot_row = a[rank].clone();
            for row in a.iter_mut().skip(rank + 1) {
                let f = row[col];
                if f == 0 {
                    continue;
                }
                let pv = pivot_row[col];
                let mut g: i128 = 0;
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = *x * pv - y * f;
                    g = num_integer::Integer::gcd(&g, x);
                }
                if g > 1 {
                    for x in row.iter_mut() {
                        *x /= g;
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Number of unit pivots modulo `prime`, i.e. the rank of the reduction mod `prime`.
    pub fn rank_mod_prime(&self, prime: u64) -> usize {
        let p = prime as i128;
        let mut a: Vec<Vec<i128>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|&x| (x as i128).rem_euclid(p)).collect()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&i| a[i][col] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let inv = mod_inverse(a[rank][col], p).expect("nonzero mod prime is invertible");
            let pivot_row: Vec<i128> = a[rank].iter().map(|&x| x * inv % p).collect();
            for row in a.iter_mut().skip(rank + 1) {
                let f = row[col];
                if f != 0 {
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        *x = (*x - f * y).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Coefficients `[1, c_1, ..., c_n]` of `det(I - t M)` (Faddeev-LeVerrier).
    pub fn reversed_charpoly(&self) -> Vec<i64> {
        assert!(self.is_square());
        let n = self.rows;
        let a: Vec<i128> = self.data.iter().map(|&x| x as i128).collect();
        let mut coeffs = vec![1i128];
        // m_k = A m_{k-1} + c_{k-1} I, c_k = -tr(A m_k)/k
        let mut m = vec![0i128; n * n];
        for k in 1..=n {
            let c_prev = *coeffs.last().unwrap();
            let mut next = vec![0i128; n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0i128;
                    for l in 0..n {
                        acc += a[i * n + l] * m[l * n + j];
                    }
                    if i == j {
                        acc += c_prev;
                    }
                    next[i * n + j] = acc;
                }
            }
            m = next;
            let mut tr = 0i128;
            for i in 0..n {
                for l in 0..n {
                    tr += a[i * n + l] * m[l * n + i];
                }
            }
            debug_assert_eq!(tr % k as i128, 0);
            coeffs.push(-tr / k as i128);
        }
        coeffs.into_iter().map(|c| i64::try_from(c).expect("charpoly overflow")).collect()
    }
}

pub(crate) fn mod_inverse(a: i128, n: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(n), n);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(n))
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_rows())
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}
