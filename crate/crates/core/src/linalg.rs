//! Small dense linear algebra for the per-stage Patankar systems.

use std::fmt;

use crate::error::{Error, Result};

/// Square row-major matrix.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from rows; panics if the rows are ragged or not square.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            data.extend_from_slice(row);
        }
        Self { n, data }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v;
            }
        }
        sums
    }

    /// Sum of absolute values down each column.
    pub fn column_abs_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n];
        for i in 0..self.n {
            for (s, v) in sums.iter_mut().zip(self.row(i)) {
                *s += v.abs();
            }
        }
        sums
    }

    pub fn lu(&self) -> Result<LuFactors> {
        LuFactors::new(self.clone())
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        Ok(self.lu()?.inverse())
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[f64]> = (0..self.n).map(|i| self.row(i)).collect();
        f.debug_list().entries(rows).finish()
    }
}

/// LU factorisation with partial (row) pivoting, `P A = L U`.
///
/// A row swap only happens when a candidate pivot is strictly larger in
/// magnitude than the diagonal, so column diagonally dominant matrices are
/// factored without any interchange.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: DenseMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn new(mut a: DenseMatrix) -> Result<Self> {
        let n = a.n;
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].abs();
            for i in k + 1..n {
                let v = a[(i, k)].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            // Only an exactly vanishing or non-finite pivot is rejected: Patankar
            // matrices may mix columns whose scales differ by many decades.
            if best == 0.0 || !best.is_finite() {
                return Err(Error::SingularMatrix {
                    column: k,
                    pivot: a[(p, k)],
                });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a[(k, k)];
            for i in k + 1..n {
                let l = a[(i, k)] / pivot;
                a[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        let u = a[(k, j)];
                        a[(i, j)] -= l * u;
                    }
                }
            }
        }
        Ok(Self { lu: a, perm })
    }

    /// Factorisation without pivoting of a column diagonally dominant
    /// M-matrix given by its off-diagonal entries (all `<= 0`) and its column
    /// sums (all `> 0`); the diagonal of `a` is ignored.
    ///
    /// Every Schur complement keeps the same structure, so its column sums
    /// can be updated alongside and each pivot rebuilt as column sum plus the
    /// magnitudes of the entries below it. No step subtracts quantities of
    /// equal sign, hence the factors, and the solution for a non-negative
    /// right-hand side, carry small componentwise relative error however
    /// badly the columns are scaled.
    pub fn column_dominant(mut a: DenseMatrix, col_sums: &[f64]) -> Result<Self> {
        let n = a.n;
        if col_sums.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: col_sums.len(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && !(a[(i, j)] <= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "off-diagonal entry ({i}, {j}) = {} is not <= 0",
                        a[(i, j)]
                    )));
                }
            }
        }
        let mut s = col_sums.to_vec();
        for k in 0..n {
            let pivot = s[k] - (k + 1..n).map(|i| a[(i, k)]).sum::<f64>();
            if !(pivot > 0.0) || !pivot.is_finite() {
                return Err(Error::SingularMatrix { column: k, pivot });
            }
            a[(k, k)] = pivot;
            for j in k + 1..n {
                s[j] -= a[(k, j)] / pivot * s[k];
            }
            for i in k + 1..n {
                let l = a[(i, k)] / pivot;
                a[(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..n {
                        if j != i {
                            let u = a[(k, j)];
                            a[(i, j)] -= l * u;
                        }
                    }
                }
            }
        }
        Ok(Self {
            lu: a,
            perm: (0..n).collect(),
        })
    }

    pub fn inverse(&self) -> DenseMatrix {
        let n = self.lu.n;
        let mut inv = DenseMatrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }

    #[allow(clippy::needless_range_loop)]
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.n;
        assert_eq!(b.len(), n, "right-hand side has wrong length");
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(i, j)] * x[j];
            }
            x[i] = s / self.lu[(i, i)];
        }
        x
    }
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.len(),
        });
    }
    Ok(a.lu()?.solve(b))
}

/// Solves `A x = b` for a column diagonally dominant M-matrix whose column
/// sums are known exactly; see [`LuFactors::column_dominant`].
pub fn mmatrix_solve(a: &DenseMatrix, col_sums: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != a.n {
        return Err(Error::DimensionMismatch {
            expected: a.n,
            found: b.len(),
        });
    }
    Ok(LuFactors::column_dominant(a.clone(), col_sums)?.solve(b))
}

pub fn column_sums(a: &DenseMatrix) -> Vec<f64> {
    a.column_sums()
}
