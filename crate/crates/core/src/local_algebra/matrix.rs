use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::fmt;

use super::scalar::{is_p_integral, pow_p, valuation};
use super::AlgebraError;

/// Dense matrix over the p-local integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalMatrix {
    prime: u64,
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl LocalMatrix {
    pub fn zeros(prime: u64, rows: usize, cols: usize) -> Self {
        LocalMatrix { prime, rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(prime: u64, n: usize) -> Self {
        let mut m = Self::zeros(prime, n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_rows(prime: u64, cols: usize, rows: Vec<Vec<BigRational>>) -> Result<Self, AlgebraError> {
        let nrows = rows.len();
        let mut data = Vec::with_capacity(nrows * cols);
        for row in rows {
            if row.len() != cols {
                return Err(AlgebraError::Shape { expected: cols, found: row.len() });
            }
            for x in row {
                if !is_p_integral(&x, prime) {
                    return Err(AlgebraError::NotLocal { value: x.to_string(), prime });
                }
                data.push(x);
            }
        }
        Ok(LocalMatrix { prime, rows: nrows, cols, data })
    }

    pub fn from_int_rows(prime: u64, cols: usize, rows: &[Vec<i64>]) -> Result<Self, AlgebraError> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
            .collect();
        Self::from_rows(prime, cols, rows)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> Vec<BigRational> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    pub fn row_vecs(&self) -> Vec<Vec<BigRational>> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn mul(&self, other: &LocalMatrix) -> LocalMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let mut out = LocalMatrix::zeros(self.prime, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![BigRational::zero(); self.cols];
        for (k, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                let b = self.get(k, j);
                if !b.is_zero() {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant by fraction-free elimination over the rationals.
    pub fn determinant(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = BigRational::one();
        for c in 0..n {
            let Some(pivot) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
                return BigRational::zero();
            };
            if pivot != c {
                for j in 0..n {
                    a.swap(pivot * n + j, c * n + j);
                }
                det = -det;
            }
            let pv = a[c * n + c].clone();
            det *= &pv;
            for r in c + 1..n {
                let f = &a[r * n + c] / &pv;
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = &a[r * n + j] - &f * &a[c * n + j];
                    a[r * n + j] = v;
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn scale_row(&mut self, r: usize, f: &BigRational) {
        for j in 0..self.cols {
            let v = self.get(r, j) * f;
            self.set(r, j, v);
        }
    }

    /// row[dst] -= f * row[src]
    fn sub_row(&mut self, dst: usize, src: usize, f: &BigRational) {
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s.is_zero() {
                continue;
            }
            let v = self.get(dst, j) - f * s;
            self.set(dst, j, v);
        }
    }

    /// col[dst] -= f * col[src]
    fn sub_col(&mut self, dst: usize, src: usize, f: &BigRational) {
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s.is_zero() {
                continue;
            }
            let v = self.get(i, dst) - f * s;
            self.set(i, dst, v);
        }
    }

    /// row[dst] += f * row[src]
    fn add_row(&mut self, dst: usize, src: usize, f: &BigRational) {
        let neg = -f.clone();
        self.sub_row(dst, src, &neg);
    }
}

impl fmt::Display for LocalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Result of a local Smith normal form computation: `u * m * v == d`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: LocalMatrix,
    pub d: LocalMatrix,
    pub v: LocalMatrix,
    /// Inverse of `v`, tracked alongside so quotient maps need no inversion.
    pub v_inv: LocalMatrix,
    /// Valuations of the nonzero diagonal entries, nondecreasing.
    pub exponents: Vec<u32>,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.exponents.len()
    }
}

/// Smith normal form over the p-local integers.
///
/// Pivots are chosen with minimal p-valuation, ties broken row-major, and
/// every pivot is rescaled to an exact power of p.
pub fn snf(m: &LocalMatrix) -> Snf {
    let p = m.prime;
    let (rows, cols) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = LocalMatrix::identity(p, rows);
    let mut v = LocalMatrix::identity(p, cols);
    let mut v_inv = LocalMatrix::identity(p, cols);
    let mut exponents = Vec::new();

    for t in 0..rows.min(cols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if let Some(val) = valuation(a.get(i, j), p) {
                    if best.is_none_or(|(b, _, _)| val < b) {
                        best = Some((val, i, j));
                    }
                }
            }
        }
        let Some((val, pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        v_inv.swap_rows(t, pj);

        let target = BigRational::from_integer(pow_p(p, val));
        let unit_inv = &target / a.get(t, t);
        a.scale_row(t, &unit_inv);
        u.scale_row(t, &unit_inv);

        for i in t + 1..rows {
            if a.get(i, t).is_zero() {
                continue;
            }
            let f = a.get(i, t) / &target;
            a.sub_row(i, t, &f);
            u.sub_row(i, t, &f);
        }
        for j in t + 1..cols {
            if a.get(t, j).is_zero() {
                continue;
            }
            let f = a.get(t, j) / &target;
            a.sub_col(j, t, &f);
            v.sub_col(j, t, &f);
            v_inv.add_row(t, j, &f);
        }
        exponents.push(val);
    }

    Snf { u, d: a, v, v_inv, exponents }
}

/// Integer power of p as a rational, for building relation rows.
pub fn p_power(p: u64, e: u32) -> BigRational {
    BigRational::from_integer(pow_p(p, e))
}

pub fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &LocalMatrix) -> Snf {
        let s = snf(m);
        assert_eq!(s.u.mul(m).mul(&s.v), s.d);
        assert_eq!(s.v.mul(&s.v_inv), LocalMatrix::identity(m.prime(), m.cols()));
        assert!(s.d.is_diagonal());
        s
    }

    #[test]
    fn unit_normalizes_to_one() {
        let m = LocalMatrix::from_int_rows(2, 1, &[vec![3]]).unwrap();
        let s = check(&m);
        assert_eq!(s.d.get(0, 0), &int(1));
    }

    #[test]
    fn twelve_at_two() {
        let m = LocalMatrix::from_int_rows(2, 1, &[vec![12]]).unwrap();
        let s = check(&m);
        assert_eq!(s.d.get(0, 0), &int(4));
    }

    #[test]
    fn rectangular() {
        let m = LocalMatrix::from_int_rows(3, 3, &[vec![6, 9, 0], vec![3, 27, 81]]).unwrap();
        let s = check(&m);
        assert_eq!(s.exponents, vec![1, 2]);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let m = LocalMatrix::zeros(2, 2, 3);
        assert_eq!(check(&m).rank(), 0);
    }
}
