//! Cosine-sine decomposition, QR with non-negative diagonal, lightening,
//! and phase extraction from complex D matrices.
//!
//! All angles are in degrees.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::{is_unitary, ComplexMatrix, Tolerance};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `m = q r` with `q` unitary (`m.rows()` square), `r` zero below its principal
/// diagonal and with a real non-negative principal diagonal.
pub fn qr_nonneg(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut r = m.clone();
    let mut q = ComplexMatrix::identity(rows);
    for k in 0..rows.min(cols) {
        let norm: f64 = (k..rows).map(|i| r[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k..rows).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // r <- (I - 2 v v^dagger / |v|^2) r
        for j in k..cols {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * r[(k + t, j)]).sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                r[(k + t, j)] -= vi * f;
            }
        }
        // q <- q (I - 2 v v^dagger / |v|^2)
        for i in 0..rows {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| q[(i, k + t)] * vi).sum();
            let f = dot * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                q[(i, k + t)] -= f * vi.conj();
            }
        }
        for i in k + 1..rows {
            r[(i, k)] = ZERO;
        }
    }
    for k in 0..rows.min(cols) {
        let d = r[(k, k)];
        if d.norm() == 0.0 {
            continue;
        }
        let p = d / d.norm();
        for j in 0..cols {
            r[(k, j)] *= p.conj();
        }
        for i in 0..rows {
            q[(i, k)] *= p;
        }
        r[(k, k)] = Complex64::new(r[(k, k)].re, 0.0);
    }
    (q, r)
}

/// Factors of `U = (L0 (+) L1) D (R0 (+) R1)` with
/// `D = [[C, S], [-S, C]]`, `C = diag(cos theta)`, `S = diag(sin theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsdFactors {
    pub l0: ComplexMatrix,
    pub l1: ComplexMatrix,
    pub r0: ComplexMatrix,
    pub r1: ComplexMatrix,
    /// Degrees, non-decreasing, within `[0, 90]` once canonical.
    pub thetas: Vec<f64>,
}

impl CsdFactors {
    pub fn half(&self) -> usize {
        self.thetas.len()
    }

    pub fn d_matrix(&self) -> ComplexMatrix {
        d_matrix_from_angles(&self.thetas)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.half();
        let mut left = ComplexMatrix::zeros(2 * n, 2 * n);
        left.set_block(0, 0, &self.l0);
        left.set_block(n, n, &self.l1);
        let mut right = ComplexMatrix::zeros(2 * n, 2 * n);
        right.set_block(0, 0, &self.r0);
        right.set_block(n, n, &self.r1);
        &(&left * &self.d_matrix()) * &right
    }

    /// True when angles are non-decreasing and inside `[0, 90]`.
    pub fn angles_canonical(&self) -> bool {
        self.thetas.iter().all(|&t| (0.0..=90.0).contains(&t))
            && self.thetas.windows(2).all(|w| w[0] <= w[1])
    }
}

/// Real D matrix `[[C, S], [-S, C]]` for the given angles in degrees.
pub fn d_matrix_from_angles(thetas: &[f64]) -> ComplexMatrix {
    let n = thetas.len();
    let mut d = ComplexMatrix::zeros(2 * n, 2 * n);
    for (i, t) in thetas.iter().enumerate() {
        let (s, c) = t.to_radians().sin_cos();
        d[(i, i)] = Complex64::new(c, 0.0);
        d[(i, n + i)] = Complex64::new(s, 0.0);
        d[(n + i, i)] = Complex64::new(-s, 0.0);
        d[(n + i, n + i)] = Complex64::new(c, 0.0);
    }
    d
}

fn col_norm(m: &ComplexMatrix, j: usize) -> f64 {
    (0..m.rows()).map(|i| m[(i, j)].norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormalize the columns of `m` in the given order, completing with
/// standard basis vectors where a column has collapsed.
fn orthonormalize_columns(m: &mut ComplexMatrix, order: &[usize]) {
    let n = m.rows();
    let mut done: Vec<usize> = Vec::with_capacity(order.len());
    for &j in order {
        for _ in 0..2 {
            for &k in &done {
                let dot: Complex64 = (0..n).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
                for i in 0..n {
                    let v = m[(i, k)];
                    m[(i, j)] -= v * dot;
                }
            }
        }
        let mut norm = col_norm(m, j);
        if norm.is_nan() || norm < 0.5 {
            // Pick the basis vector with the largest component outside the span so far.
            let mut best = (0, -1.0);
            for e in 0..n {
                let resid = 1.0 - done.iter().map(|&k| m[(e, k)].norm_sqr()).sum::<f64>();
                if resid > best.1 {
                    best = (e, resid);
                }
            }
            for i in 0..n {
                m[(i, j)] = if i == best.0 { Complex64::new(1.0, 0.0) } else { ZERO };
            }
            for _ in 0..2 {
                for &k in &done {
                    let dot: Complex64 = (0..n).map(|i| m[(i, k)].conj() * m[(i, j)]).sum();
                    for i in 0..n {
                        let v = m[(i, k)];
                        m[(i, j)] -= v * dot;
                    }
                }
            }
            norm = col_norm(m, j);
        }
        for i in 0..n {
            m[(i, j)] /= norm;
        }
        done.push(j);
    }
}

/// Singular value decomposition `a = u diag(sigma) vh` by one-sided Jacobi
/// rotations. Singular values come out in descending order.
pub fn svd(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let (rows, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let col_dot = |m: &ComplexMatrix, p: usize, q: usize| -> Complex64 {
        (0..m.rows()).map(|i| m[(i, p)].conj() * m[(i, q)]).sum()
    };
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = col_dot(&w, p, p).re;
                let beta = col_dot(&w, q, q).re;
                let gamma = col_dot(&w, p, q);
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut w, &mut v] {
                    for i in 0..m.rows() {
                        let xp = m[(i, p)];
                        let xq = m[(i, q)] * phase.conj();
                        m[(i, p)] = xp * c - xq * s;
                        m[(i, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sigma: Vec<f64> = (0..n).map(|j| col_norm(&w, j)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let mut u = ComplexMatrix::zeros(rows, n);
    let mut vh = ComplexMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..rows {
            u[(i, new)] = if sigma[old] > 0.0 { w[(i, old)] / sigma[old] } else { ZERO };
        }
        for i in 0..n {
            vh[(new, i)] = v[(i, old)].conj();
        }
    }
    sigma = order.iter().map(|&o| sigma[o]).collect();
    if rows == n {
        let natural: Vec<usize> = (0..n).collect();
        orthonormalize_columns(&mut u, &natural);
    }
    (u, sigma, vh)
}

/// Cosine-sine decomposition of an even-dimensional unitary matrix.
///
/// Angles come out canonical: non-decreasing and inside `[0, 90]`.
pub fn csd(u: &ComplexMatrix) -> Result<CsdFactors> {
    csd_with_tol(u, &Tolerance::default())
}

pub fn csd_with_tol(u: &ComplexMatrix, tol: &Tolerance) -> Result<CsdFactors> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    if !u.rows().is_multiple_of(2) || u.rows() == 0 {
        return Err(Error::OddDimension(u.rows()));
    }
    let dev = u.unitarity_deviation();
    if dev > tol.eps {
        return Err(Error::NotUnitary { max_deviation: dev });
    }
    let n = u.rows() / 2;
    let a = u.block(0, 0, n, n);
    let b = u.block(0, n, n, n);
    let c = u.block(n, 0, n, n);
    let e = u.block(n, n, n, n);

    let (l0_raw, sigma, r0_raw) = svd(&a);

    // C' R0^dagger = -L1 S
    let t_raw = &c * &r0_raw.adjoint();
    let raw_angles: Vec<f64> = (0..n)
        .map(|i| col_norm(&t_raw, i).atan2(sigma[i].min(1.0)).to_degrees())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw_angles[i].total_cmp(&raw_angles[j]));

    let mut l0 = ComplexMatrix::zeros(n, n);
    let mut r0 = ComplexMatrix::zeros(n, n);
    let mut t = ComplexMatrix::zeros(n, n);
    let mut thetas = Vec::with_capacity(n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            l0[(i, new)] = l0_raw[(i, old)];
            r0[(new, i)] = r0_raw[(old, i)];
            t[(i, new)] = t_raw[(i, old)];
        }
        thetas.push(raw_angles[old].clamp(0.0, 90.0));
    }
    let (sines, cosines): (Vec<f64>, Vec<f64>) =
        thetas.iter().map(|t| t.to_radians().sin_cos()).unzip();

    let mut l1 = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            l1[(i, j)] = if sines[j] > 0.0 { -t[(i, j)] / sines[j] } else { ZERO };
        }
    }
    let mut by_sine: Vec<usize> = (0..n).collect();
    by_sine.sort_by(|&i, &j| sines[j].total_cmp(&sines[i]));
    orthonormalize_columns(&mut l1, &by_sine);

    // Rows of R1 from whichever of S R1 = L0^dagger B or C R1 = L1^dagger E is better conditioned.
    let x = &l0.adjoint() * &b;
    let y = &l1.adjoint() * &e;
    let mut r1t = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            r1t[(j, i)] = if sines[i] >= cosines[i] {
                x[(i, j)] / sines[i]
            } else {
                y[(i, j)] / cosines[i]
            };
        }
    }
    let natural: Vec<usize> = (0..n).collect();
    orthonormalize_columns(&mut r1t, &natural);
    let r1 = r1t.transpose();

    Ok(normalize_angles(CsdFactors {
        l0,
        l1,
        r0,
        r1,
        thetas,
    }))
}

/// Bring arbitrary angles to `[0, 90]` in non-decreasing order, adjusting
/// the side matrices so the product is unchanged.
pub fn normalize_angles(mut f: CsdFactors) -> CsdFactors {
    let n = f.half();
    for i in 0..n {
        let mut t = wrap_degrees(f.thetas[i]);
        if t.abs() > 90.0 {
            // Negate row i of both diagonal blocks: theta -> theta + 180.
            for r in 0..n {
                f.l0[(r, i)] = -f.l0[(r, i)];
                f.l1[(r, i)] = -f.l1[(r, i)];
            }
            t = wrap_degrees(t + 180.0);
        }
        if t < 0.0 {
            // Negate L1 column and R1 row: theta -> -theta.
            for r in 0..n {
                f.l1[(r, i)] = -f.l1[(r, i)];
                f.r1[(i, r)] = -f.r1[(i, r)];
            }
            t = -t;
        }
        f.thetas[i] = t.clamp(0.0, 90.0);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| f.thetas[i].total_cmp(&f.thetas[j]));
    if order.iter().enumerate().all(|(i, &o)| i == o) {
        return f;
    }
    let permute_cols = |m: &ComplexMatrix| {
        let mut out = ComplexMatrix::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for r in 0..n {
                out[(r, new)] = m[(r, old)];
            }
        }
        out
    };
    let permute_rows = |m: &ComplexMatrix| {
        let mut out = ComplexMatrix::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for c in 0..n {
                out[(new, c)] = m[(old, c)];
            }
        }
        out
    };
    CsdFactors {
        l0: permute_cols(&f.l0),
        l1: permute_cols(&f.l1),
        r0: permute_rows(&f.r0),
        r1: permute_rows(&f.r1),
        thetas: order.iter().map(|&o| f.thetas[o]).collect(),
    }
}

/// Index ranges of maximal runs of angles whose neighbours differ by at most `tol`.
pub fn angle_clusters(thetas: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=thetas.len() {
        if i == thetas.len() || (thetas[i] - thetas[i - 1]).abs() > tol {
            if i > start {
                out.push(start..i);
            }
            start = i;
        }
    }
    out
}

/// Use the freedom inside each cluster of equal angles to make the matching
/// row block of `r0` upper-triangular with a non-negative diagonal.
pub fn lighten(f: &CsdFactors, tol: &Tolerance) -> CsdFactors {
    let n = f.half();
    let mut g = ComplexMatrix::zeros(n, n);
    for range in angle_clusters(&f.thetas, tol.angle_cluster) {
        let block = f.r0.block(range.start, 0, range.len(), n);
        let (q, _) = qr_nonneg(&block);
        g.set_block(range.start, range.start, &q);
    }
    let gh = g.adjoint();
    CsdFactors {
        l0: &f.l0 * &g,
        l1: &f.l1 * &g,
        r0: &gh * &f.r0,
        r1: &gh * &f.r1,
        thetas: f.thetas.clone(),
    }
}

/// Phase parameters of one 2x2 block
/// `diag(1, e^{i wl}) [[c, s], [-s, c]] e^{i W} diag(1, e^{i wr})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockPhases {
    pub omega: f64,
    pub omega_l: f64,
    pub omega_r: f64,
    pub theta: f64,
}

impl BlockPhases {
    pub fn entries(&self) -> [Complex64; 4] {
        let (s, c) = self.theta.to_radians().sin_cos();
        let e = |deg: f64| Complex64::from_polar(1.0, deg.to_radians());
        [
            e(self.omega) * c,
            e(self.omega + self.omega_r) * s,
            -e(self.omega + self.omega_l) * s,
            e(self.omega + self.omega_l + self.omega_r) * c,
        ]
    }

    pub fn has_phases(&self, tol: f64) -> bool {
        self.omega.abs() > tol || self.omega_l.abs() > tol || self.omega_r.abs() > tol
    }
}

/// Reduce an angle in degrees to `(-180, 180]`.
pub fn wrap_degrees(deg: f64) -> f64 {
    let r = deg.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

fn arg_deg(z: Complex64) -> f64 {
    z.arg().to_degrees()
}

/// Split a unitary 2x2 block `[[d00, d01], [d10, d11]]` into phases and a rotation.
pub fn block_phases(d: [Complex64; 4], tol: f64) -> BlockPhases {
    let [d00, d01, d10, d11] = d;
    let c = 0.5 * (d00.norm() + d11.norm());
    let s = 0.5 * (d01.norm() + d10.norm());
    let theta = s.atan2(c).to_degrees();
    let (omega, omega_l, omega_r) = if c <= tol {
        (0.0, arg_deg(-d10), arg_deg(d01))
    } else if s <= tol {
        let w = arg_deg(d00);
        (w, arg_deg(d11) - w, 0.0)
    } else {
        let w = arg_deg(d00);
        let wr = arg_deg(d01) - w;
        let wl = if c >= s {
            arg_deg(d11) - w - wr
        } else {
            arg_deg(-d10) - w
        };
        (w, wl, wr)
    };
    BlockPhases {
        omega: wrap_degrees(omega),
        omega_l: wrap_degrees(omega_l),
        omega_r: wrap_degrees(omega_r),
        theta,
    }
}

/// Per-index phase parameters of a complex D matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseFactors {
    pub omega: Vec<f64>,
    pub omega_l: Vec<f64>,
    pub omega_r: Vec<f64>,
    pub thetas: Vec<f64>,
}

impl PhaseFactors {
    pub fn from_blocks(blocks: &[BlockPhases]) -> Self {
        PhaseFactors {
            omega: blocks.iter().map(|b| b.omega).collect(),
            omega_l: blocks.iter().map(|b| b.omega_l).collect(),
            omega_r: blocks.iter().map(|b| b.omega_r).collect(),
            thetas: blocks.iter().map(|b| b.theta).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    pub fn block(&self, j: usize) -> BlockPhases {
        BlockPhases {
            omega: self.omega[j],
            omega_l: self.omega_l[j],
            omega_r: self.omega_r[j],
            theta: self.thetas[j],
        }
    }

    /// Dense complex D matrix with these parameters.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.len();
        let mut d = ComplexMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            let [a, b, c, e] = self.block(j).entries();
            d[(j, j)] = a;
            d[(j, n + j)] = b;
            d[(n + j, j)] = c;
            d[(n + j, n + j)] = e;
        }
        d
    }
}

/// Largest entry of `d` lying off the diagonals of its four half-size blocks.
pub fn complex_d_deviation(d: &ComplexMatrix) -> f64 {
    let n = d.rows() / 2;
    let mut dev: f64 = 0.0;
    for i in 0..d.rows() {
        for j in 0..d.cols() {
            if i % n.max(1) != j % n.max(1) || n == 0 {
                dev = dev.max(d[(i, j)].norm());
            }
        }
    }
    dev
}

/// True when each of the four half-size blocks of `d` is diagonal.
pub fn is_complex_d(d: &ComplexMatrix, tol: f64) -> bool {
    d.is_square() && d.rows().is_multiple_of(2) && d.rows() > 0 && complex_d_deviation(d) <= tol
}

/// Phase parameters of a unitary complex D matrix.
pub fn extract_phases(d: &ComplexMatrix, tol: &Tolerance) -> Result<PhaseFactors> {
    if !d.is_square() {
        return Err(Error::NotSquare {
            rows: d.rows(),
            cols: d.cols(),
        });
    }
    if !d.rows().is_multiple_of(2) || d.rows() == 0 {
        return Err(Error::OddDimension(d.rows()));
    }
    let dev = complex_d_deviation(d);
    if dev > tol.eps {
        return Err(Error::NotComplexD {
            max_off_diagonal: dev,
        });
    }
    if !is_unitary(d, tol.eps) {
        return Err(Error::NotUnitary {
            max_deviation: d.unitarity_deviation(),
        });
    }
    let n = d.rows() / 2;
    let blocks: Vec<BlockPhases> = (0..n)
        .map(|j| {
            block_phases(
                [d[(j, j)], d[(j, n + j)], d[(n + j, j)], d[(n + j, n + j)]],
                tol.eps,
            )
        })
        .collect();
    Ok(PhaseFactors::from_blocks(&blocks))
}
