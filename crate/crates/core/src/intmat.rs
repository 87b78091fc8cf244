//! Small dense integer matrices with exact determinants and characteristic
//! polynomials.

use std::fmt;
use std::ops::{Add, Mul};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// `None` for ragged input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Option<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return None;
        }
        Some(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    /// Matrix of `e_j -> e_{images[j]}`.
    pub fn permutation(images: &[usize]) -> Self {
        let mut m = Self::zeros(images.len(), images.len());
        for (j, &i) in images.iter().enumerate() {
            m.set(i, j, 1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

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
    pub fn set(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: i64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.data
            .chunks(self.cols.max(1))
            .map(<[i64]>::to_vec)
            .take(self.rows)
            .collect()
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

    pub fn scale(&self, c: i64) -> Self {
        Self {
            data: self.data.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    pub fn row_sums(&self) -> Vec<i64> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j)).sum())
            .collect()
    }

    /// First entry where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<(usize, usize)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((0, 0));
        }
        (0..self.data.len())
            .find(|&k| self.data[k] != other.data[k])
            .map(|k| (k / self.cols, k % self.cols))
    }

    /// Fraction-free Gaussian elimination (Bareiss).
    pub fn det(&self) -> i128 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return 1;
        }
        let mut a: Vec<Vec<i128>> = self
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(i128::from).collect())
            .collect();
        let mut sign = 1;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a[k][k] == 0 {
                match (k + 1..n).find(|&r| a[r][k] != 0) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        sign * a[n - 1][n - 1]
    }

    /// Coefficients of `det(xI - A)`, leading coefficient first, by the
    /// Faddeev–LeVerrier recursion (all divisions are exact).
    pub fn charpoly(&self) -> Vec<i128> {
        assert!(
            self.is_square(),
            "characteristic polynomial of a non-square matrix"
        );
        let n = self.rows;
        let a: Vec<i128> = self.data.iter().map(|&x| i128::from(x)).collect();
        let matmul = |x: &[i128], y: &[i128]| -> Vec<i128> {
            let mut out = vec![0i128; n * n];
            for i in 0..n {
                for k in 0..n {
                    let xik = x[i * n + k];
                    if xik != 0 {
                        for j in 0..n {
                            out[i * n + j] += xik * y[k * n + j];
                        }
                    }
                }
            }
            out
        };
        let mut coeffs = vec![1i128];
        let mut m = vec![0i128; n * n];
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I
            let mut next = matmul(&a, &m);
            let c_prev = *coeffs.last().unwrap();
            for i in 0..n {
                next[i * n + i] += c_prev;
            }
            let am = matmul(&a, &next);
            let trace: i128 = (0..n).map(|i| am[i * n + i]).sum();
            debug_assert_eq!(trace % k as i128, 0);
            coeffs.push(-trace / k as i128);
            m = next;
        }
        coeffs
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;

    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x != 0 {
                    for j in 0..rhs.cols {
                        out.add_at(i, j, x * rhs.get(k, j));
                    }
                }
            }
        }
        out
    }
}

impl Add for &IntMatrix {
    type Output = IntMatrix;

    fn add(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "dimension mismatch"
        );
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(&rows).ok_or_else(|| serde::de::Error::custom("ragged matrix"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    /// Cofactor expansion, for small matrices only.
    fn det_expand(a: &IntMatrix) -> i128 {
        let n = a.rows();
        if n == 1 {
            return a.get(0, 0) as i128;
        }
        (0..n)
            .map(|j| {
                let minor = IntMatrix::from_rows(
                    &(1..n)
                        .map(|i| (0..n).filter(|&c| c != j).map(|c| a.get(i, c)).collect())
                        .collect::<Vec<_>>(),
                )
                .unwrap();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * a.get(0, j) as i128 * det_expand(&minor)
            })
            .sum()
    }

    #[test]
    fn det_small() {
        assert_eq!(m(&[&[2, 1], &[7, 4]]).det(), 1);
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), -1);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).det(), 0);
        let a = m(&[&[0, 2, 1, 3], &[1, 0, -2, 1], &[4, 1, 0, 0], &[2, -1, 3, 5]]);
        assert_eq!(a.det(), det_expand(&a));
    }

    #[test]
    fn charpoly_matches_determinants() {
        let a = m(&[&[0, 2, 1, 3], &[1, 0, -2, 1], &[4, 1, 0, 0], &[2, -1, 3, 5]]);
        let p = a.charpoly();
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], 1);
        for x in -3i64..=3 {
            let shifted = &IntMatrix::identity(4).scale(x) + &a.scale(-1);
            let value = p.iter().fold(0i128, |acc, &c| acc * x as i128 + c);
            assert_eq!(value, shifted.det());
        }
    }

    #[test]
    fn permutation_matrix_action() {
        let p = IntMatrix::permutation(&[2, 0, 1]);
        let e0 = m(&[&[1], &[0], &[0]]);
        assert_eq!((&p * &e0).to_rows(), vec![vec![0], vec![0], vec![1]]);
        assert_eq!(p.det(), 1);
    }
}
