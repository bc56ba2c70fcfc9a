//! Dense complex matrices, tolerances, and the plain-text matrix format.

use std::fmt::Write as _;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Numerical thresholds shared by the whole pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Unitarity, reconstruction and structure checks.
    pub eps: f64,
    /// Max-entry deviation under which a side matrix counts as the identity.
    pub identity: f64,
    /// Two angles (degrees) closer than this belong to the same cluster.
    pub angle_cluster: f64,
    /// Rotation and phase angles (degrees) at or below this are dropped.
    pub prune: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eps: 1e-10,
            identity: 1e-9,
            angle_cluster: 1e-8,
            prune: 1e-10,
        }
    }
}

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{} entries for {rows}x{cols}", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::ShapeMismatch {
                    expected: format!("rows of length {c}"),
                    found: format!("row of length {}", row.len()),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(ComplexMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Real matrix given row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
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

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch {
                expected: format!("left operand with {} columns", other.rows),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_same_shape(other)?;
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    fn check_same_shape(&self, other: &ComplexMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry-wise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Copy of the sub-block starting at (r0, c0).
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> ComplexMatrix {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                out[(i, j)] = self[(r0 + i, c0 + j)];
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &ComplexMatrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Max-entry deviation of `self` from the identity.
    pub fn identity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((self[(i, j)] - target).norm());
            }
        }
        dev
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.is_square() && self.identity_deviation() <= tol
    }

    /// Largest modulus among the off-diagonal entries.
    pub fn max_off_diagonal(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j {
                    dev = dev.max(self[(i, j)].norm());
                }
            }
        }
        dev
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        self.is_square() && self.max_off_diagonal() <= tol
    }

    /// Max-entry deviation of `self† self` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        match self.adjoint().matmul(self) {
            Ok(p) => p.identity_deviation(),
            Err(_) => f64::INFINITY,
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    /// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

/// Kronecker product with `a` as the high-order (left) factor.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let s = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = s * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Block-diagonal direct sum, first factor top-left.
pub fn direct_sum(ms: &[ComplexMatrix]) -> ComplexMatrix {
    let rows = ms.iter().map(|m| m.rows).sum();
    let cols = ms.iter().map(|m| m.cols).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for m in ms {
        out.set_block(r, c, m);
        r += m.rows;
        c += m.cols;
    }
    out
}

pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    m.unitarity_deviation() <= tol
}

pub fn frobenius_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    Ok(a.sub(b)?.frobenius_norm())
}

/// Permutation matrix of a product of transpositions on `0..n`.
///
/// The product is read right to left: the last transposition acts first.
/// The matrix sends basis vector `|i>` to `|g(i)>`.
pub fn state_permutation_matrix(n: usize, transpositions: &[(usize, usize)]) -> Result<ComplexMatrix> {
    let mut image: Vec<usize> = (0..n).collect();
    for &(a, b) in transpositions.iter().rev() {
        if a >= n || b >= n {
            return Err(Error::IndexOutOfRange {
                index: a.max(b),
                bound: n,
            });
        }
        for v in image.iter_mut() {
            if *v == a {
                *v = b;
            } else if *v == b {
                *v = a;
            }
        }
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for (i, &gi) in image.iter().enumerate() {
        m[(gi, i)] = Complex64::new(1.0, 0.0);
    }
    Ok(m)
}

/// Parse the text format: a line holding `N`, then `N` rows of `2N` floats
/// (real and imaginary parts alternating). Any whitespace separates tokens.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(ln, line)| line.split_whitespace().map(move |t| (ln + 1, t)));
    let (ln, first) = tokens.next().ok_or_else(|| Error::Parse {
        line: 1,
        message: "empty matrix file".into(),
    })?;
    let n: usize = first.parse().map_err(|_| Error::Parse {
        line: ln,
        message: format!("expected the dimension, found '{first}'"),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line: ln,
            message: "dimension must be positive".into(),
        });
    }
    let mut data = Vec::with_capacity(n * n);
    let mut last_line = ln;
    for _ in 0..n * n {
        let mut parts = [0.0; 2];
        for p in parts.iter_mut() {
            let (l, t) = tokens.next().ok_or_else(|| Error::Parse {
                line: last_line,
                message: format!("expected {} numbers after the dimension", 2 * n * n),
            })?;
            last_line = l;
            *p = t.parse().map_err(|_| Error::Parse {
                line: l,
                message: format!("not a number: '{t}'"),
            })?;
        }
        data.push(Complex64::new(parts[0], parts[1]));
    }
    if let Some((l, t)) = tokens.next() {
        return Err(Error::Parse {
            line: l,
            message: format!("unexpected trailing token '{t}'"),
        });
    }
    ComplexMatrix::from_vec(n, n, data)
}

/// Inverse of [`parse_matrix`], 17 significant digits per number.
pub fn serialize_matrix(m: &ComplexMatrix) -> Result<String> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let mut out = String::new();
    writeln!(out, "{}", m.rows).unwrap();
    for i in 0..m.rows {
        let line: Vec<String> = m
            .row(i)
            .iter()
            .flat_map(|z| [format!("{:.16e}", z.re), format!("{:.16e}", z.im)])
            .collect();
        writeln!(out, "{}", line.join(" ")).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_of_identities_is_identity() {
        let t = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert_eq!(t, ComplexMatrix::identity(4));
    }

    #[test]
    fn left_factor_is_high_order() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let t = tensor_product(&x, &ComplexMatrix::identity(2));
        // Flipping the high bit maps |00> to |10>.
        assert_eq!(t[(2, 0)], c(1.0, 0.0));
        assert_eq!(t[(1, 1)], c(0.0, 0.0));
    }

    #[test]
    fn direct_sum_places_blocks_on_diagonal() {
        let a = ComplexMatrix::from_real_rows(&[&[2.0]]).unwrap();
        let b = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let d = direct_sum(&[a, b]);
        assert_eq!(d.rows(), 3);
        assert_eq!(d[(0, 0)], c(2.0, 0.0));
        assert_eq!(d[(1, 2)], c(1.0, 0.0));
        assert_eq!(d[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn diag_one_two_is_not_unitary() {
        let m = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(!is_unitary(&m, 1e-10));
        assert!(is_unitary(&ComplexMatrix::identity(3), 1e-10));
    }

    #[test]
    fn transposition_product_is_right_to_left() {
        let m = state_permutation_matrix(3, &[(0, 1), (1, 2)]).unwrap();
        // (1,2) acts first: 1 -> 2, then (0,1) leaves 2 alone.
        assert_eq!(m[(2, 1)], c(1.0, 0.0));
        // 2 -> 1 -> 0.
        assert_eq!(m[(0, 2)], c(1.0, 0.0));
        // 0 -> 0 -> 1.
        assert_eq!(m[(1, 0)], c(1.0, 0.0));
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(0.1, -0.2), c(1.0 / 3.0, 0.0)],
            vec![c(-1e-300, 5.0), c(0.0, std::f64::consts::PI)],
        ])
        .unwrap();
        let s = serialize_matrix(&m).unwrap();
        assert_eq!(parse_matrix(&s).unwrap(), m);
    }

    #[test]
    fn parser_accepts_arbitrary_whitespace() {
        let m = parse_matrix("1\n  1.0\t\t0.0 \n").unwrap();
        assert_eq!(m, ComplexMatrix::identity(1));
    }

    #[test]
    fn parser_rejects_wrong_token_count() {
        assert!(parse_matrix("2\n1 0 0 0\n0 0 1 0 5\n").is_err());
        assert!(parse_matrix("2\n1 0 0 0\n0 0\n").is_err());
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("x\n").is_err());
    }
}
