//! Smith and Hermite normal forms over the integers and over `Z/l^k`.
//!
//! Both Smith routines return unimodular transforms `U`, `V` (and `V^-1`)
//! with `U * A * V = D`, so kernels, saturations and coordinate maps of
//! sublattices can be read off the columns of `V` and the rows of `V^-1`.

use crate::error::{Error, Result};
use crate::matrix::{mod_inverse, Coefficients, IntMatrix};

#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Diagonal of `D`, length `min(rows, cols)`. Over `Z/l^k` entries are
    /// `l^v` (or `0` when the pivot vanishes at the working precision).
    pub diagonal: Vec<i64>,
    pub left: IntMatrix,
    pub right: IntMatrix,
    pub right_inverse: IntMatrix,
}

impl SmithForm {
    /// Number of nonzero diagonal entries.
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|&&d| d != 0).count()
    }
}

struct Work {
    rows: usize,
    cols: usize,
    a: Vec<Vec<i128>>,
    u: Vec<Vec<i128>>,
    v: Vec<Vec<i128>>,
    vinv: Vec<Vec<i128>>,
    modulus: Option<i128>,
}

fn ident(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

impl Work {
    fn new(m: &IntMatrix, modulus: Option<i128>) -> Self {
        let a = (0..m.rows())
            .map(|i| {
                m.row(i)
                    .iter()
                    .map(|&x| match modulus {
                        Some(n) => (x as i128).rem_euclid(n),
                        None => x as i128,
                    })
                    .collect()
            })
            .collect();
        Work {
            rows: m.rows(),
            cols: m.cols(),
            a,
            u: ident(m.rows()),
            v: ident(m.cols()),
            vinv: ident(m.cols()),
            modulus,
        }
    }

    fn red(&self, x: i128) -> i128 {
        match self.modulus {
            Some(n) => x.rem_euclid(n),
            None => x,
        }
    }

    fn check(&self, x: i128) -> Result<i128> {
        if x.unsigned_abs() > (1u128 << 100) {
            return Err(Error::Overflow("Smith normal form"));
        }
        Ok(x)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
        self.vinv.swap(i, j);
    }

    /// row_i += f * row_j
    fn add_row(&mut self, i: usize, j: usize, f: i128) -> Result<()> {
        for c in 0..self.cols {
            let x = self.a[i][c] + f * self.a[j][c];
            self.a[i][c] = self.check(self.red(x))?;
        }
        for c in 0..self.rows {
            let x = self.u[i][c] + f * self.u[j][c];
            self.u[i][c] = self.check(self.red(x))?;
        }
        Ok(())
    }

    /// col_i += f * col_j
    fn add_col(&mut self, i: usize, j: usize, f: i128) -> Result<()> {
        for r in 0..self.rows {
            let x = self.a[r][i] + f * self.a[r][j];
            self.a[r][i] = self.check(self.red(x))?;
        }
        for r in 0..self.cols {
            let x = self.v[r][i] + f * self.v[r][j];
            self.v[r][i] = self.check(self.red(x))?;
        }
        // V^-1 <- E^-1 V^-1 where E^-1 subtracts f * row_i from row_j
        for c in 0..self.cols {
            let x = self.vinv[j][c] - f * self.vinv[i][c];
            self.vinv[j][c] = self.check(self.red(x))?;
        }
        Ok(())
    }

    fn scale_row(&mut self, i: usize, f: i128) {
        for c in 0..self.cols {
            self.a[i][c] = self.red(self.a[i][c] * f);
        }
        for c in 0..self.rows {
            self.u[i][c] = self.red(self.u[i][c] * f);
        }
    }

    fn finish(self, diagonal: Vec<i64>) -> Result<SmithForm> {
        let conv = |m: &Vec<Vec<i128>>, r: usize, c: usize| -> Result<IntMatrix> {
            let mut data = Vec::with_capacity(r * c);
            for row in m {
                for &x in row {
                    data.push(i64::try_from(x).map_err(|_| Error::Overflow("Smith transform"))?);
                }
            }
            Ok(IntMatrix::new(r, c, data))
        };
        Ok(SmithForm {
            diagonal,
            left: conv(&self.u, self.rows, self.rows)?,
            right: conv(&self.v, self.cols, self.cols)?,
            right_inverse: conv(&self.vinv, self.cols, self.cols)?,
        })
    }
}

/// Smith normal form over the integers. Diagonal entries are nonnegative and
/// form a divisibility chain.
pub fn smith_normal_form(m: &IntMatrix) -> Result<SmithForm> {
    let mut w = Work::new(m, None);
    let n = w.rows.min(w.cols);
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..w.rows {
            for j in t..w.cols {
                let x = w.a[i][j].abs();
                if x != 0 && best.is_none_or(|(bi, bj)| x < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else {
            diag.extend(std::iter::repeat_n(0, n - t));
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..w.rows {
                if w.a[i][t] != 0 {
                    let q = w.a[i][t].div_euclid(w.a[t][t]);
                    w.add_row(i, t, -q)?;
                    if w.a[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..w.cols {
                if w.a[t][j] != 0 {
                    let q = w.a[t][j].div_euclid(w.a[t][t]);
                    w.add_col(j, t, -q)?;
                    if w.a[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if dirty {
                // move the smallest remaining entry of row/column t onto the pivot
                let mut bi = t;
                let mut bj = t;
                let mut bv = w.a[t][t].abs();
                for i in t + 1..w.rows {
                    let x = w.a[i][t].abs();
                    if x != 0 && x < bv {
                        (bi, bj, bv) = (i, t, x);
                    }
                }
                for j in t + 1..w.cols {
                    let x = w.a[t][j].abs();
                    if x != 0 && x < bv {
                        (bi, bj, bv) = (t, j, x);
                    }
                }
                w.swap_rows(t, bi);
                w.swap_cols(t, bj);
                continue;
            }
            // divisibility of the trailing block
            let p = w.a[t][t];
            let bad = (t + 1..w.rows).find(|&i| (t + 1..w.cols).any(|j| w.a[i][j] % p != 0));
            match bad {
                Some(i) => w.add_row(t, i, 1)?,
                None => break,
            }
        }
        if w.a[t][t] < 0 {
            w.scale_row(t, -1);
        }
        diag.push(i64::try_from(w.a[t][t]).map_err(|_| Error::Overflow("Smith diagonal"))?);
    }
    w.finish(diag)
}

fn valuation_i128(x: i128, p: i128, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    let mut y = x;
    while y % p == 0 && v < cap {
        y /= p;
        v += 1;
    }
    v
}

/// Smith normal form over `Z/prime^precision`. Diagonal entries are `prime^v`
/// with nondecreasing `v`, or `0`.
pub fn smith_normal_form_mod(m: &IntMatrix, prime: u64, precision: u32) -> Result<SmithForm> {
    let modulus = (prime as i128).pow(precision);
    let p = prime as i128;
    let mut w = Work::new(m, Some(modulus));
    let n = w.rows.min(w.cols);
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        let mut best: Option<(usize, usize, u32)> = None;
        for i in t..w.rows {
            for j in t..w.cols {
                let v = valuation_i128(w.a[i][j], p, precision);
                if v < precision && best.is_none_or(|(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                }
            }
        }
        let Some((pi, pj, v)) = best else {
            diag.extend(std::iter::repeat_n(0, n - t));
            break;
        };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        let pv = p.pow(v);
        let unit = w.a[t][t] / pv;
        let inv = mod_inverse(unit, modulus).expect("unit part is invertible");
        w.scale_row(t, inv);
        debug_assert_eq!(w.a[t][t], pv);
        for i in t + 1..w.rows {
            if w.a[i][t] != 0 {
                let q = w.a[i][t] / pv;
                w.add_row(i, t, -q)?;
            }
        }
        for j in t + 1..w.cols {
            if w.a[t][j] != 0 {
                let q = w.a[t][j] / pv;
                w.add_col(j, t, -q)?;
            }
        }
        diag.push(pv as i64);
    }
    w.finish(diag)
}

/// Smith normal form in the given coefficient ring.
pub fn smith_in(m: &IntMatrix, coeffs: Coefficients) -> Result<SmithForm> {
    match coeffs {
        Coefficients::Integer => smith_normal_form(m),
        Coefficients::Residue { prime, precision } => smith_normal_form_mod(m, prime, precision),
    }
}

/// Canonical basis (as columns) of the lattice spanned by the columns of `b`.
///
/// Integer case: column Hermite normal form (echelon from the top, positive
/// pivots, entries left of a pivot reduced into `[0, pivot)`), zero columns
/// dropped. Residue case: the analogous echelon form with pivots `l^v`.
pub fn column_hermite_form(b: &IntMatrix, coeffs: Coefficients) -> Result<IntMatrix> {
    // Work on rows of the transpose: row-style HNF, then transpose back.
    let t = b.transpose();
    let (nr, nc) = (t.rows(), t.cols());
    let modulus = coeffs.modulus().map(|x| x as i128);
    let red = |x: i128| match modulus {
        Some(n) => x.rem_euclid(n),
        None => x,
    };
    let mut a: Vec<Vec<i128>> = (0..nr).map(|i| t.row(i).iter().map(|&x| red(x as i128)).collect()).collect();
    let mut pivot_row = 0;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..nc {
        if pivot_row == nr {
            break;
        }
        match modulus {
            None => {
                // Euclid on column entries at rows >= pivot_row
                loop {
                    let nz: Vec<usize> = (pivot_row..nr).filter(|&i| a[i][col] != 0).collect();
                    if nz.is_empty() {
                        break;
                    }
                    let &m = nz.iter().min_by_key(|&&i| a[i][col].abs()).unwrap();
                    a.swap(pivot_row, m);
                    if nz.len() == 1 {
                        break;
                    }
                    for i in pivot_row + 1..nr {
                        if a[i][col] != 0 {
                            let q = a[i][col].div_euclid(a[pivot_row][col]);
                            let pr = a[pivot_row].clone();
                            for (x, y) in a[i].iter_mut().zip(&pr) {
                                *x -= q * y;
                                if x.unsigned_abs() > (1u128 << 100) {
                                    return Err(Error::Overflow("Hermite form"));
                                }
                            }
                        }
                    }
                }
                if a[pivot_row][col] == 0 {
                    continue;
                }
                if a[pivot_row][col] < 0 {
                    for x in a[pivot_row].iter_mut() {
                        *x = -*x;
                    }
                }
            }
            Some(n) => {
                let p = match coeffs {
                    Coefficients::Residue { prime, .. } => prime as i128,
                    _ => unreachable!(),
                };
                let prec = match coeffs {
                    Coefficients::Residue { precision, .. } => precision,
                    _ => unreachable!(),
                };
                let best = (pivot_row..nr)
                    .map(|i| (i, valuation_i128(a[i][col], p, prec)))
                    .filter(|&(_, v)| v < prec)
                    .min_by_key(|&(i, v)| (v, i));
                let Some((m, v)) = best else { continue };
                a.swap(pivot_row, m);
                let pv = p.pow(v);
                let inv = mod_inverse(a[pivot_row][col] / pv, n).unwrap();
                for x in a[pivot_row].iter_mut() {
                    *x = (*x * inv).rem_euclid(n);
                }
                let pr = a[pivot_row].clone();
                for i in pivot_row + 1..nr {
                    if a[i][col] != 0 {
                        let q = a[i][col] / pv;
                        for (x, y) in a[i].iter_mut().zip(&pr) {
                            *x = (*x - q * y).rem_euclid(n);
                        }
                    }
                }
            }
        }
        // reduce rows above the pivot
        let pv = a[pivot_row][col];
        let pr = a[pivot_row].clone();
        for i in 0..pivot_row {
            let q = a[i][col].div_euclid(pv);
            if q != 0 {
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x = red(*x - q * y);
                }
            }
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
    }
    let kept: Vec<Vec<i64>> = a[..pivot_row]
        .iter()
        .map(|r| r.iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow("Hermite form"))).collect())
        .collect::<Result<_>>()?;
    Ok(IntMatrix::from_rows(&kept, nc)?.transpose())
}

/// Inverse of a square matrix over the coefficient ring, if it exists.
pub fn inverse_in(m: &IntMatrix, coeffs: Coefficients) -> Result<Option<IntMatrix>> {
    if !m.is_square() {
        return Ok(None);
    }
    let snf = smith_in(m, coeffs)?;
    if snf.diagonal.iter().any(|&d| d != 1) {
        return Ok(None);
    }
    // U A V = I, so A^-1 = V U
    Ok(Some(snf.right.mul_in(&snf.left, coeffs)))
}

/// Whether `v` lies in the lattice spanned by the columns of `span` (which
/// must be independent), and its coordinates if so.
pub fn lattice_coordinates(span: &IntMatrix, v: &[i64], coeffs: Coefficients) -> Result<Option<Vec<i64>>> {
    let snf = smith_in(span, coeffs)?;
    let y = snf.left.mul_vec_in(v, coeffs);
    let m = span.cols();
    let mut x = vec![0i64; m];
    for (i, &yi) in y.iter().enumerate() {
        let d = if i < snf.diagonal.len() { snf.diagonal[i] } else { 0 };
        if d == 0 {
            if yi != 0 {
                return Ok(None);
            }
            if i < m {
                // dependent column or vanishing pivot: coordinate is free, keep 0
            }
            continue;
        }
        match coeffs {
            Coefficients::Integer => {
                if yi % d != 0 {
                    return Ok(None);
                }
                x[i] = yi / d;
            }
            Coefficients::Residue { .. } => {
                // d = l^v; yi must be divisible by l^v as an integer residue
                if yi % d != 0 {
                    return Ok(None);
                }
                x[i] = yi / d;
            }
        }
    }
    Ok(Some(snf.right.mul_vec_in(&x, coeffs)))
}
