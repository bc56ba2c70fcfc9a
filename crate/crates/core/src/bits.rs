//! Bit strings, Gray codes, Hadamard transforms and bit permutations.
//!
//! Bit 0 is the least significant bit of a state index.

use std::ops::{Add, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// An `nb`-bit string stored as an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitString {
    pub nb: usize,
    pub value: usize,
}

impl BitString {
    pub fn new(nb: usize, value: usize) -> Result<Self> {
        if nb < usize::BITS as usize && value >> nb != 0 {
            return Err(Error::IndexOutOfRange {
                index: value,
                bound: 1 << nb,
            });
        }
        Ok(BitString { nb, value })
    }

    pub fn bit(&self, beta: usize) -> bool {
        (self.value >> beta) & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.value.count_ones()
    }

    /// Positions of the set bits, lowest first.
    pub fn set_bits(&self) -> Vec<usize> {
        (0..self.nb).filter(|&b| self.bit(b)).collect()
    }
}

impl std::fmt::Display for BitString {
    /// Most significant bit first.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for b in (0..self.nb).rev() {
            write!(f, "{}", if self.bit(b) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Parity of the popcount of `a & b`.
pub fn dot_parity(a: usize, b: usize) -> bool {
    (a & b).count_ones() % 2 == 1
}

/// Reverse the low `n` bits of `x`.
pub fn reverse_bits(x: usize, n: usize) -> usize {
    (0..n).fold(0, |acc, b| acc | (((x >> b) & 1) << (n - 1 - b)))
}

/// Reflected Gray code on `n` bits, starting at zero and ending on a string
/// with a single set bit. Consecutive entries differ in exactly one bit.
pub fn gray_sequence(n: usize) -> Vec<BitString> {
    (0..1usize << n)
        .map(|i| BitString {
            nb: n,
            value: reverse_bits(i ^ (i >> 1), n),
        })
        .collect()
}

/// Index of the single bit in which `a` and `b` differ.
pub fn flipped_bit(a: usize, b: usize) -> Option<usize> {
    let d = a ^ b;
    (d.count_ones() == 1).then(|| d.trailing_zeros() as usize)
}

/// In-place unnormalized Walsh-Hadamard butterfly.
pub fn hadamard_in_place<T>(v: &mut [T]) -> Result<()>
where
    T: Copy + Add<Output = T> + Sub<Output = T>,
{
    let n = v.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut h = 1;
    while h < n {
        for start in (0..n).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
    Ok(())
}

/// `H_nb * v` with the unnormalized Sylvester-Hadamard matrix.
pub fn hadamard_transform(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    hadamard_in_place(&mut out)?;
    Ok(out)
}

/// Entries of the Sylvester-Hadamard matrix: `(H)_{ab} = (-1)^{a.b}`.
pub fn sylvester_hadamard(nb: usize) -> ComplexMatrix {
    let n = 1 << nb;
    let mut m = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            m[(a, b)] = Complex64::new(if dot_parity(a, b) { -1.0 } else { 1.0 }, 0.0);
        }
    }
    m
}

/// Which single-bit basis to express projectors in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// Rows are `P_a`, columns are products of `sigma_z`: the Hadamard matrix.
    ProjectorToSigmaZ,
    /// Rows are `P_a`, columns are products of the number operator `n`.
    ProjectorToNumber,
}

/// Matrix `M` with `X = M X'`, where `X` lists the projectors `P_a` and `X'`
/// lists products of the chosen single-bit operators.
pub fn basis_change_matrix(kind: BasisKind, nb: usize) -> ComplexMatrix {
    let n = 1 << nb;
    let mut m = ComplexMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let v = match kind {
                BasisKind::ProjectorToSigmaZ => {
                    let s = if dot_parity(a, b) { -1.0 } else { 1.0 };
                    s / n as f64
                }
                BasisKind::ProjectorToNumber => {
                    if a & b == a {
                        if (a ^ b).count_ones() % 2 == 1 {
                            -1.0
                        } else {
                            1.0
                        }
                    } else {
                        0.0
                    }
                }
            };
            m[(a, b)] = Complex64::new(v, 0.0);
        }
    }
    m
}

/// Coefficients `theta` with `sum_a phi_a P_a = sum_b theta_b prod_{beta in b} n(beta)`.
///
/// Applies the transpose of the projector-to-number basis change, one bit at a time.
pub fn number_basis_coefficients(phi: &[f64]) -> Result<Vec<f64>> {
    let n = phi.len();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let mut t = phi.to_vec();
    let mut h = 1;
    while h < n {
        for i in 0..n {
            if i & h != 0 {
                t[i] -= t[i ^ h];
            }
        }
        h *= 2;
    }
    Ok(t)
}

/// Permutation of bit positions: bit `beta` moves to position `map[beta]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitPermutation {
    map: Vec<usize>,
}

impl BitPermutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &m in &map {
            if m >= n {
                return Err(Error::IndexOutOfRange { index: m, bound: n });
            }
            if seen[m] {
                return Err(Error::InvalidArgument(format!(
                    "bit permutation maps two bits to {m}"
                )));
            }
            seen[m] = true;
        }
        Ok(BitPermutation { map })
    }

    pub fn identity(nb: usize) -> Self {
        BitPermutation {
            map: (0..nb).collect(),
        }
    }

    pub fn nb(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn image(&self, beta: usize) -> usize {
        self.map[beta]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &m)| i == m)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.map.len()];
        for (b, &m) in self.map.iter().enumerate() {
            inv[m] = b;
        }
        BitPermutation { map: inv }
    }

    /// `self` after `first`: bit `b` goes to `self(first(b))`.
    pub fn compose(&self, first: &BitPermutation) -> Self {
        BitPermutation {
            map: first.map.iter().map(|&m| self.map[m]).collect(),
        }
    }

    /// State index obtained by moving every bit of `s` to its image.
    pub fn permute_state(&self, s: usize) -> usize {
        self.map
            .iter()
            .enumerate()
            .fold(0, |acc, (b, &m)| acc | (((s >> b) & 1) << m))
    }

    /// Matrix `G` with `G|s> = |permute_state(s)>`.
    pub fn state_matrix(&self) -> ComplexMatrix {
        let n = 1 << self.nb();
        let mut g = ComplexMatrix::zeros(n, n);
        for s in 0..n {
            g[(self.permute_state(s), s)] = Complex64::new(1.0, 0.0);
        }
        g
    }
}

/// Bit `beta` goes to `nb - 1 - beta`.
pub fn bit_reversal_permutation(nb: usize) -> BitPermutation {
    BitPermutation {
        map: (0..nb).rev().collect(),
    }
}

/// `G m G^dagger` where `G` moves bits according to `p`.
pub fn apply_bit_permutation(p: &BitPermutation, m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = 1usize << p.nb();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.rows(),
        });
    }
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let pi = p.permute_state(i);
        for j in 0..n {
            out[(pi, p.permute_state(j))] = m[(i, j)];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{state_permutation_matrix, tensor_product};

    fn values(seq: &[BitString]) -> Vec<usize> {
        seq.iter().map(|b| b.value).collect()
    }

    #[test]
    fn gray_sequence_three_bits() {
        assert_eq!(
            values(&gray_sequence(3)),
            vec![0b000, 0b100, 0b110, 0b010, 0b011, 0b111, 0b101, 0b001]
        );
        assert_eq!(values(&gray_sequence(2)), vec![0b00, 0b10, 0b11, 0b01]);
        assert_eq!(values(&gray_sequence(0)), vec![0]);
    }

    #[test]
    fn gray_sequence_is_a_single_flip_cycle_ending_on_one_bit() {
        for n in 1..=8 {
            let g = values(&gray_sequence(n));
            let mut sorted = g.clone();
            sorted.sort_unstable();
            assert_eq!(sorted, (0..1 << n).collect::<Vec<_>>());
            for w in g.windows(2) {
                assert!(flipped_bit(w[0], w[1]).is_some());
            }
            assert_eq!(g[0], 0);
            assert_eq!(g.last().unwrap().count_ones(), 1);
        }
    }

    #[test]
    fn hadamard_transform_of_delta() {
        assert_eq!(hadamard_transform(&[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![1.0; 4]);
        assert!(hadamard_transform(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn hadamard_transform_matches_matrix() {
        let v = [0.5, -1.25, 3.0, 7.0, 0.0, 1.0, -2.0, 4.5];
        let h = sylvester_hadamard(3);
        let fast = hadamard_transform(&v).unwrap();
        for a in 0..8 {
            let slow: f64 = (0..8).map(|b| h[(a, b)].re * v[b]).sum();
            assert!((slow - fast[a]).abs() < 1e-12);
        }
    }

    #[test]
    fn hadamard_is_exact_on_integers() {
        let mut v: Vec<i64> = vec![3, -1, 4, 1, -5, 9, 2, -6];
        let orig = v.clone();
        hadamard_in_place(&mut v).unwrap();
        hadamard_in_place(&mut v).unwrap();
        assert_eq!(v, orig.iter().map(|x| x * 8).collect::<Vec<_>>());
    }

    #[test]
    fn bit_reversal_on_three_bits_matches_transpositions() {
        let p = bit_reversal_permutation(3);
        let expected = state_permutation_matrix(8, &[(1, 4), (3, 6)]).unwrap();
        assert_eq!(p.state_matrix(), expected);
    }

    #[test]
    fn swapping_bits_swaps_tensor_factors() {
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let y = ComplexMatrix::from_rows(&[
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        let swap = BitPermutation::new(vec![1, 0]).unwrap();
        let out = apply_bit_permutation(&swap, &tensor_product(&x, &y)).unwrap();
        assert_eq!(out, tensor_product(&y, &x));
    }

    #[test]
    fn permutation_validation() {
        assert!(BitPermutation::new(vec![0, 0]).is_err());
        assert!(BitPermutation::new(vec![0, 2]).is_err());
        let p = BitPermutation::new(vec![2, 0, 1]).unwrap();
        assert!(p.compose(&p.inverse()).is_identity());
    }

    #[test]
    fn number_basis_coefficients_match_basis_matrix() {
        let phi = [0.3, -1.0, 2.5, 0.25, 4.0, -0.5, 1.5, 3.0];
        let m = basis_change_matrix(BasisKind::ProjectorToNumber, 3);
        let fast = number_basis_coefficients(&phi).unwrap();
        for b in 0..8 {
            let slow: f64 = (0..8).map(|a| m[(a, b)].re * phi[a]).sum();
            assert!((slow - fast[b]).abs() < 1e-12);
        }
    }

    #[test]
    fn number_basis_reconstructs_phases() {
        let phi = [0.0, 10.0, 20.0, 35.0];
        let t = number_basis_coefficients(&phi).unwrap();
        for (a, &p) in phi.iter().enumerate() {
            let s: f64 = (0..4).filter(|&b| a & b == b).map(|b| t[b]).sum();
            assert!((s - p).abs() < 1e-12);
        }
    }

    #[test]
    fn sigma_z_basis_change_is_scaled_hadamard() {
        let m = basis_change_matrix(BasisKind::ProjectorToSigmaZ, 2);
        let h = sylvester_hadamard(2);
        for a in 0..4 {
            for b in 0..4 {
                assert!((m[(a, b)] - h[(a, b)] / 4.0).norm() < 1e-15);
            }
        }
    }
}
