//! Dense complex matrices and exact permanent computation.
//!
//! `permanent_naive` is the oracle: a direct sum over permutations, capped at
//! n = 10. `permanent_ryser` is the production algorithm: Ryser's
//! inclusion-exclusion formula with Gray-code subset ordering, O(2^n * n),
//! capped at n = 30. `permanental_polynomial_coeffs` expands
//! p(x) = perm(xI - T) into coefficients, each a signed sum of diagonal
//! sub-permanents.

use num_complex::Complex64;

use crate::error::{Error, Result};

const NAIVE_LIMIT: usize = 10;
const RYSER_LIMIT: usize = 30;
const POLY_LIMIT: usize = 16;

/// Dense complex matrix in row-major order. Entries are validated finite on
/// construction and immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidArgument(format!(
                "entry count {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if let Some(z) = data.iter().find(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite entry {z}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .expect("identity is finite")
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
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Entrywise scaling by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// x*I - self, for the permanental polynomial.
    pub fn x_identity_minus(&self, x: Complex64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Self::from_fn(self.rows, self.cols, |i, j| {
            let d = if i == j { x } else { Complex64::new(0.0, 0.0) };
            d - self.get(i, j)
        })
    }
}

/// A set of row and column indices picking out an n x n sub-matrix.
/// Both index lists are strictly increasing and of equal length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubmatrixSpec {
    rows: Vec<usize>,
    cols: Vec<usize>,
}

impl SubmatrixSpec {
    pub fn new(rows: Vec<usize>, cols: Vec<usize>) -> Result<Self> {
        if rows.is_empty() || rows.len() != cols.len() {
            return Err(Error::InvalidArgument(format!(
                "index lists must be non-empty and equal length, got {} and {}",
                rows.len(),
                cols.len()
            )));
        }
        for list in [&rows, &cols] {
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidArgument(
                    "indices must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { rows, cols })
    }

    /// The leading n x n block: rows and columns 0..n.
    pub fn leading(n: usize) -> Result<Self> {
        let idx: Vec<usize> = (0..n).collect();
        Self::new(idx.clone(), idx)
    }

    /// Diagonal sub-matrix: the same index set for rows and columns.
    pub fn diagonal(indices: Vec<usize>) -> Result<Self> {
        Self::new(indices.clone(), indices)
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    pub fn row_indices(&self) -> &[usize] {
        &self.rows
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.cols
    }
}

/// Extract the sub-matrix selected by `spec`.
pub fn submatrix(m: &ComplexMatrix, spec: &SubmatrixSpec) -> Result<ComplexMatrix> {
    let row_max = *spec.rows.last().unwrap();
    let col_max = *spec.cols.last().unwrap();
    if row_max >= m.rows() || col_max >= m.cols() {
        return Err(Error::InvalidArgument(format!(
            "sub-matrix index ({row_max}, {col_max}) out of range for {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    ComplexMatrix::from_fn(spec.order(), spec.order(), |i, j| {
        m.get(spec.rows[i], spec.cols[j])
    })
}

fn require_square(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    Ok(m.rows())
}

/// Permanent by direct permutation enumeration. The oracle for all other
/// permanent code; factorial cost, so n is capped at 10.
pub fn permanent_naive(m: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(m)?;
    if n > NAIVE_LIMIT {
        return Err(Error::SizeLimit {
            what: "permanent_naive matrix order",
            got: n,
            limit: NAIVE_LIMIT,
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    let mut used = vec![false; n];
    fn walk(
        m: &ComplexMatrix,
        row: usize,
        partial: Complex64,
        used: &mut [bool],
        total: &mut Complex64,
    ) {
        if row == m.rows() {
            *total += partial;
            return;
        }
        for col in 0..m.cols() {
            if !used[col] {
                used[col] = true;
                walk(m, row + 1, partial * m.get(row, col), used, total);
                used[col] = false;
            }
        }
    }
    walk(m, 0, Complex64::new(1.0, 0.0), &mut used, &mut total);
    Ok(total)
}

/// Compensated complex accumulator. Ryser's sum alternates in sign, so the
/// outer accumulation carries a Kahan correction per component.
#[derive(Default)]
struct KahanSum {
    sum: Complex64,
    comp: Complex64,
}

impl KahanSum {
    fn add(&mut self, term: Complex64) {
        let y = term - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Permanent via Ryser's inclusion-exclusion formula:
///
///   perm(A) = (-1)^n sum_{S != {}} (-1)^|S| prod_i sum_{j in S} a_ij
///
/// Subsets are visited in Gray-code order so each step updates the running
/// row sums by a single column. O(2^n * n); n capped at 30.
pub fn permanent_ryser(m: &ComplexMatrix) -> Result<Complex64> {
    let n = require_square(m)?;
    if n > RYSER_LIMIT {
        return Err(Error::SizeLimit {
            what: "permanent_ryser matrix order",
            got: n,
            limit: RYSER_LIMIT,
        });
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut acc = KahanSum::default();
    let mut prev_gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let gray = k ^ (k >> 1);
        let changed = gray ^ prev_gray;
        let col = changed.trailing_zeros() as usize;
        if gray & changed != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m.get(i, col);
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m.get(i, col);
            }
        }
        prev_gray = gray;
        let product: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            acc.add(-product);
        } else {
            acc.add(product);
        }
    }
    let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
    Ok(acc.sum * sign)
}

/// Coefficients b_0..b_m of the permanental polynomial
/// p(x) = perm(xI - T) = sum_n b_n x^(m-n), with
/// b_n = (-1)^n * sum over all diagonal n x n sub-matrices of their
/// permanents, and b_0 = 1. Enumerates C(m, n) sub-matrices per
/// coefficient, so m is capped at 16.
pub fn permanental_polynomial_coeffs(t: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let m = require_square(t)?;
    if m > POLY_LIMIT {
        return Err(Error::SizeLimit {
            what: "permanental polynomial matrix order",
            got: m,
            limit: POLY_LIMIT,
        });
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
    coeffs[0] = Complex64::new(1.0, 0.0);
    for mask in 1u32..(1u32 << m) {
        let n = mask.count_ones() as usize;
        let indices: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let spec = SubmatrixSpec::diagonal(indices)?;
        let sub = submatrix(t, &spec)?;
        let p = permanent_ryser(&sub)?;
        let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
        coeffs[n] += p * sign;
    }
    Ok(coeffs)
}

/// Evaluate p(x) = sum_n b_n x^(m-n) from its coefficient list.
pub fn eval_permanental_polynomial(coeffs: &[Complex64], x: Complex64) -> Complex64 {
    // Horner in descending powers: coeffs[0] multiplies x^m.
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &b| acc * x + b)
}
